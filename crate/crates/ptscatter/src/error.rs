//! Error taxonomy shared by every module.
//!
//! Numerical evaluation refuses to return garbage: parameter points where an
//! answer cannot be computed reliably surface as typed errors, and callers
//! (sweeps, root finders) decide whether to skip, record a gap, or abort.

use thiserror::Error;

/// All failure modes of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Scattering requires a propagating incident wave, i.e. E > 0.
    #[error("non-positive energy: E = {energy} eV")]
    NonPositiveEnergy { energy: f64 },

    /// E sits on the degenerate locus of the barrier: for a real potential,
    /// within 1e−12 eV of E = V_R (where the slab wavenumber vanishes and
    /// the k₀/k₁ ratio blows up); for a stack slab, |k|·w < 1e−12.
    #[error("degenerate energy: slab wavenumber vanishes (|k1|*L = {k1_l:e}; E on the E = V_R locus)")]
    DegenerateEnergy { k1_l: f64 },

    /// A closed-form denominator collapsed below 1e-300. Signals a
    /// numerically inaccessible parameter point, not a physical pole.
    #[error("singular denominator in {context}: |D| = {magnitude:e} < 1e-300")]
    SingularDenominator {
        context: &'static str,
        magnitude: f64,
    },

    /// An evaluation guard fired: the slab phase thickness |Im Λ| exceeds
    /// what the chosen path can evaluate without precision loss or overflow
    /// (20 for the printed closed form, whose transmission loses a factor
    /// e^{2|Im Λ|}; 300 for the stack oracle, where e^{2|Im Λ|} itself would
    /// leave double range). Guarding beats returning garbage.
    #[error("evaluation guard: |Im lambda| = {im_lambda:.3} exceeds {limit} for this path")]
    EvaluationGuard { im_lambda: f64, limit: f64 },

    /// The simultaneous root iteration failed to converge (never observed
    /// for desk-scale amplitudes; indicates pathological inputs).
    #[error("quartic root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// An eigenvalue modulus is zero or non-numeric, so its pair has no
    /// meaningful log-modulus label: the parameters sit on a spectral
    /// singularity.
    #[error("indeterminate phase: pair log-moduli ({m1}, {m2}) contain a vanishing or non-numeric eigenvalue")]
    Indeterminate { m1: f64, m2: f64 },

    /// Both reflectances vanish at a transmission resonance (accidental
    /// bidirectional transparency), so no side can be assigned.
    #[error("ambiguous resonance side at E = {energy} eV: R_L = {refl_left:e} and R_R = {refl_right:e} both < 1e-6")]
    AmbiguousSide {
        energy: f64,
        refl_left: f64,
        refl_right: f64,
    },

    /// A device-configuration string does not match `^(L[012])?M(R[012])?$`.
    #[error("invalid device configuration {input:?}: expected the grammar (L[012])?M(R[012])?")]
    Grammar { input: String },

    /// A run-configuration file failed strict-schema parsing.
    #[error("run-config schema error: {message}")]
    Schema { message: String },

    /// A sweep specification violates its own invariants (e_min < e_max,
    /// n_points ≥ 2, e_min > 0, ...).
    #[error("invalid sweep specification: {message}")]
    InvalidSpec { message: String },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
