//! Wavenumbers and spinless scattering amplitudes of the PT-symmetric bilayer.
//!
//! The scatterer occupies −L/2 ≤ z ≤ L/2 and consists of two slabs of width
//! L/2: the left slab carries the complex potential V = V_R + iV_I (gain) and
//! the right slab its conjugate V* (loss), so that V(z) = V*(−z). Incident
//! plane waves in the V = 0 leads scatter into a reflection amplitude per side
//! and one transmission amplitude (transmission is reciprocal, t_L = t_R).
//!
//! Two independent evaluation paths exist:
//! - [`amplitudes_closed_form`], the textbook boundary-matching solution
//!   expressed through Λ = k₁L/2, Ω₀ = k₀/k₁, Ω₁ = k₁/k₁*, evaluated with
//!   complex cos/sin exactly as printed. Its transmission numerator suffers a
//!   cancellation that grows like e^{2|Im Λ|}, so evaluation is guarded by
//!   |Im Λ| ≤ 20.
//! - the layer-stack oracle in [`crate::stack`], a scattering-matrix
//!   composition of per-slab closed forms that is accurate at machine
//!   precision for every |Im Λ| representable in double precision. Where the
//!   two disagree beyond tolerance, the oracle is authoritative.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{um_to_nm, HBAR2_OVER_2ME};

/// Imaginary unit, to keep the closed-form transcription readable.
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Physical scene: the bilayer potential and the particle it scatters.
///
/// Invariants: `length > 0`, `mass_ratio > 0`, `e0 > 0`, `v_imag ≥ 0`.
/// The sign convention places the +iV_I (gain) slab on the left; the PT
/// partner slab carries −iV_I automatically. This orientation is the one
/// whose left-reflection amplitude matches the closed form's r_L (the
/// reversed orientation swaps r_L ↔ r_R and leaves t unchanged).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Real part of the slab potential V_R, in eV.
    pub v_real: f64,
    /// Imaginary part V_I ≥ 0 (gain/loss strength), in eV.
    pub v_imag: f64,
    /// Total length L of the two-slab region, in μm.
    pub length: f64,
    /// Particle mass in units of the free-electron mass, m/mₑ.
    pub mass_ratio: f64,
    /// Reference energy scale E₀, in eV (energies are reported as E/E₀).
    pub e0: f64,
}

impl PhysParams {
    /// Validated constructor. Lengths in μm, energies in eV.
    pub fn new(v_real: f64, v_imag: f64, length: f64, mass_ratio: f64, e0: f64) -> Result<Self> {
        let p = Self {
            v_real,
            v_imag,
            length,
            mass_ratio,
            e0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Check the type invariants, for use after field-level mutation.
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Error::InvalidSpec { message };
        if !(self.length > 0.0) {
            return Err(bad(format!("length must be > 0 um, got {}", self.length)));
        }
        if !(self.mass_ratio > 0.0) {
            return Err(bad(format!(
                "mass_ratio must be > 0, got {}",
                self.mass_ratio
            )));
        }
        if !(self.e0 > 0.0) {
            return Err(bad(format!("e0 must be > 0 eV, got {}", self.e0)));
        }
        if !(self.v_imag >= 0.0) {
            return Err(bad(format!(
                "v_imag must be >= 0 eV (the loss slab is implied), got {}",
                self.v_imag
            )));
        }
        Ok(())
    }

    /// Complex potential V = V_R + iV_I of the gain slab.
    pub fn potential(&self) -> Complex64 {
        Complex64::new(self.v_real, self.v_imag)
    }

    /// Slab length in nm.
    pub fn length_nm(&self) -> f64 {
        um_to_nm(self.length)
    }

    /// 2m/ħ² in eV⁻¹·nm⁻², the factor converting energy to squared wavenumber.
    pub(crate) fn k2_per_ev(&self) -> f64 {
        self.mass_ratio / HBAR2_OVER_2ME
    }
}

impl Default for PhysParams {
    /// The bilayer used throughout the examples and datasets:
    /// V_R = 0.3 eV, V_I = 0.005 eV, L = 0.5 μm, m = mₑ, E₀ = 1 eV.
    fn default() -> Self {
        Self {
            v_real: 0.3,
            v_imag: 0.005,
            length: 0.5,
            mass_ratio: 1.0,
            e0: 1.0,
        }
    }
}

/// Principal square root with a deterministic branch: Re ≥ 0, and on the
/// Re = 0 ray the root with Im > 0 is chosen. Continuous along energy sweeps
/// that stay away from E = V.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let mut s = z.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        s = -s;
    }
    s
}

/// Wavenumbers and the derived dimensionless combinations at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumbers {
    /// Lead wavenumber k₀ = √(2mE/ħ²), real and positive for E > 0 (nm⁻¹).
    pub k0: Complex64,
    /// Gain-slab wavenumber k₁ = √(2m(E−V)/ħ²) on the principal branch (nm⁻¹).
    pub k1: Complex64,
    /// Λ = k₁L/2, the one-slab phase thickness (dimensionless).
    pub lambda_half: Complex64,
    /// Ω₀ = k₀/k₁ (dimensionless).
    pub omega0: Complex64,
    /// Ω₁ = k₁/k₁*, unimodular by construction (dimensionless).
    pub omega1: Complex64,
}

/// Compute [`Wavenumbers`] at energy `e` (eV).
///
/// Errors: [`Error::NonPositiveEnergy`] for E ≤ 0;
/// [`Error::DegenerateEnergy`] when |k₁|·L < 1e−12 (E ≈ V, the Ω₀ division
/// blows up).
pub fn wavenumbers(e: f64, p: &PhysParams) -> Result<Wavenumbers> {
    if !(e > 0.0) {
        return Err(Error::NonPositiveEnergy { energy: e });
    }
    let s = p.k2_per_ev();
    let k0 = Complex64::new((e * s).sqrt(), 0.0);
    let k1 = principal_sqrt(Complex64::new((e - p.v_real) * s, -p.v_imag * s));
    let l_nm = p.length_nm();
    // For a real potential the in-barrier wavenumber vanishes at E = V_R and
    // the two-branch decomposition breaks down; the locus is declared
    // degenerate with a 1e−12 eV margin so grid scans account for it
    // deterministically.
    if p.v_imag == 0.0 && (e - p.v_real).abs() <= 1e-12 {
        return Err(Error::DegenerateEnergy {
            k1_l: k1.norm() * l_nm,
        });
    }
    Ok(Wavenumbers {
        k0,
        k1,
        lambda_half: k1 * (l_nm / 2.0),
        omega0: k0 / k1,
        omega1: k1 / k1.conj(),
    })
}

/// The complex amplitude triple at one energy plus its squared moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    /// Reflection amplitude for incidence from the left lead.
    pub r_left: Complex64,
    /// Reflection amplitude for incidence from the right lead.
    pub r_right: Complex64,
    /// Transmission amplitude (identical for both incidence sides).
    pub t: Complex64,
    /// R_L = |r_L|².
    pub refl_left: f64,
    /// R_R = |r_R|².
    pub refl_right: f64,
    /// T = |t|².
    pub trans: f64,
}

impl Amplitudes {
    /// Package a complex amplitude triple, deriving the squared moduli.
    pub fn from_complex(r_left: Complex64, r_right: Complex64, t: Complex64) -> Self {
        Self {
            r_left,
            r_right,
            t,
            refl_left: r_left.norm_sqr(),
            refl_right: r_right.norm_sqr(),
            trans: t.norm_sqr(),
        }
    }

    /// Pseudo-unitarity defect | |1−T| − √(R_R·R_L) |.
    ///
    /// PT-symmetric scattering replaces flux conservation by the generalized
    /// unitarity relation |1−T| = √(R_R·R_L); this residual is zero for exact
    /// amplitudes at every propagating energy.
    pub fn pseudo_unitarity_residual(&self) -> f64 {
        ((1.0 - self.trans).abs() - (self.refl_right * self.refl_left).sqrt()).abs()
    }

    /// Spontaneous-symmetry-breaking measure (R_L + R_R)/2 − T.
    ///
    /// Crosses 1 exactly where the case-2 S-matrix spectrum switches between
    /// all-unimodular and broken.
    pub fn ssb_measure(&self) -> f64 {
        0.5 * (self.refl_left + self.refl_right) - self.trans
    }
}

/// One-side evaluation of the boundary-matching closed form: returns
/// (reflection, transmission) for the orientation described by (Λ, Ω₀, Ω₁).
fn closed_form_side(
    lam: Complex64,
    om0: Complex64,
    om1: Complex64,
) -> Result<(Complex64, Complex64)> {
    let lamc = lam.conj();
    let om0c = om0.conj();
    let (cl, sl) = (lam.cos(), lam.sin());
    let (clc, slc) = (lamc.cos(), lamc.sin());

    let n_l = (I * om1 * sl + om0c * cl) * (clc - I * om0c * slc)
        + (I * slc - om0c * clc) * (cl + I * om0 * sl);
    let d_l = (cl - I * om0 * sl) * (om0c * clc - I * slc)
        + (om0c * cl - I * om1 * sl) * (clc - I * om0c * slc);
    if d_l.norm() < 1e-300 {
        return Err(Error::SingularDenominator {
            context: "reflection denominator D_L",
            magnitude: d_l.norm(),
        });
    }
    let r = n_l / d_l;

    let d_t = clc - I * om0c * slc;
    if d_t.norm() < 1e-300 {
        return Err(Error::SingularDenominator {
            context: "transmission denominator D_T",
            magnitude: d_t.norm(),
        });
    }
    let t = ((cl - I * om0 * sl) * r + cl + I * om0 * sl) / d_t;
    Ok((r, t))
}

/// Scattering amplitudes from the printed closed form.
///
/// r_L = N_L/D_L and t = N_T/D_T are evaluated exactly as written (N_T
/// contains r_L); the right-incidence amplitudes follow from the substitution
/// k₁ ↦ k₁*, i.e. conjugating Λ, Ω₀ and Ω₁ together (k₀ is real, so the two
/// possible readings of Ω₀* coincide). Transmission is stored once because it
/// is reciprocal.
///
/// Errors: wavenumber errors propagate; [`Error::EvaluationGuard`] when
/// |Im Λ| > 20 (the cos/sin evaluation would lose all precision in t);
/// [`Error::SingularDenominator`] if a denominator magnitude drops below
/// 1e−300.
pub fn amplitudes_closed_form(e: f64, p: &PhysParams) -> Result<Amplitudes> {
    let w = wavenumbers(e, p)?;
    let im_lambda = w.lambda_half.im.abs();
    if im_lambda > 20.0 {
        return Err(Error::EvaluationGuard { im_lambda, limit: 20.0 });
    }
    let (r_left, t) = closed_form_side(w.lambda_half, w.omega0, w.omega1)?;
    let (r_right, _t_right) = closed_form_side(
        w.lambda_half.conj(),
        w.omega0.conj(),
        w.omega1.conj(),
    )?;
    Ok(Amplitudes::from_complex(r_left, r_right, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// 60-digit-arithmetic reference amplitudes at E = 0.5 eV for the default
    /// bilayer (V_R = 0.3, V_I = 0.005, L = 0.5 μm, m = mₑ). |Im Λ| ≈ 7.16.
    pub(crate) const REF_MID: (f64, [f64; 6]) = (
        0.5,
        [
            4.4389902713445641,
            -0.11649377171900568,
            0.22512140381524459,
            -0.005907929466394529,
            5.3511553512358869e-6,
            2.0390554957638255e-4,
        ],
    );

    /// Reference amplitudes at a mildly non-Hermitian point:
    /// E = 0.8 eV, V_R = 0.3, V_I = 0.002, L = 0.15 μm. |Im Λ| ≈ 0.54.
    pub(crate) const REF_MILD: (f64, [f64; 6]) = (
        0.8,
        [
            0.0032867151639185484,
            0.031570418317677811,
            0.0021911488643602288,
            0.021046997623512781,
            -0.99429039552634646,
            0.10351301929012231,
        ],
    );

    pub(crate) fn unpack(reference: &(f64, [f64; 6])) -> (f64, [Complex64; 3]) {
        let (e, v) = reference;
        (*e, [c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5])])
    }

    #[test]
    fn lead_wavenumber_value() {
        let p = PhysParams::default();
        let w = wavenumbers(1.0, &p).unwrap();
        assert!((w.k0.re - 5.1232).abs() < 5e-4);
        assert_eq!(w.k0.im, 0.0);
    }

    #[test]
    fn zero_potential_identity() {
        let p = PhysParams::new(0.0, 0.0, 0.5, 1.0, 1.0).unwrap();
        let w = wavenumbers(1.0, &p).unwrap();
        assert_abs_diff_eq!(w.omega0.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w.omega0.im, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w.omega1.re, 1.0, epsilon = 1e-14);

        let a = amplitudes_closed_form(1.0, &p).unwrap();
        assert!(a.r_left.norm() < 1e-14, "r_L = {}", a.r_left);
        assert!(a.r_right.norm() < 1e-14);
        assert_abs_diff_eq!(a.t.norm(), 1.0, epsilon = 1e-14);
        // t = e^{ik0 L}
        let expect = (I * w.k0 * p.length_nm()).exp();
        assert!((a.t - expect).norm() < 1e-12);
    }

    #[test]
    fn hermitian_limit_is_real_branch() {
        let p = PhysParams::new(0.3, 0.0, 0.5, 1.0, 1.0).unwrap();
        let w = wavenumbers(0.8, &p).unwrap();
        assert_eq!(w.k1.im, 0.0, "E > V_R with V_I = 0 must give real k1");
        let a = amplitudes_closed_form(0.8, &p).unwrap();
        assert!((a.trans + a.refl_left - 1.0).abs() < 1e-12);
        assert!((a.refl_left - a.refl_right).abs() < 1e-12);
    }

    #[test]
    fn evanescent_branch_points_up() {
        // E below the barrier with V_I = 0: k1 purely imaginary, Im > 0.
        let p = PhysParams::new(0.3, 0.0, 0.5, 1.0, 1.0).unwrap();
        let w = wavenumbers(0.1, &p).unwrap();
        assert_eq!(w.k1.re, 0.0);
        assert!(w.k1.im > 0.0);
    }

    #[test]
    fn branch_is_continuous_in_energy() {
        let p = PhysParams::default();
        let mut prev = wavenumbers(0.32, &p).unwrap().k1;
        let de = 1e-4;
        let mut e = 0.32 + de;
        while e < 2.0 {
            let k1 = wavenumbers(e, &p).unwrap().k1;
            assert!(
                (k1 - prev).norm() < 50.0 * de,
                "branch jump near E = {e}: {prev} -> {k1}"
            );
            prev = k1;
            e += de;
        }
    }

    #[test]
    fn rejects_bad_energies() {
        let p = PhysParams::default();
        assert!(matches!(
            wavenumbers(0.0, &p),
            Err(Error::NonPositiveEnergy { .. })
        ));
        assert!(matches!(
            wavenumbers(-1.0, &p),
            Err(Error::NonPositiveEnergy { .. })
        ));
        // E very near the complex potential's real part with V_I = 0.
        let ph = PhysParams::new(0.3, 0.0, 0.5, 1.0, 1.0).unwrap();
        assert!(matches!(
            wavenumbers(0.3, &ph),
            Err(Error::DegenerateEnergy { .. })
        ));
    }

    #[test]
    fn guard_fires_in_the_deep_gain_regime() {
        // Just above the band edge at m = mₑ the slab phase has |Im Λ| ≈ 31.
        let p = PhysParams::default();
        let err = amplitudes_closed_form(0.311, &p).unwrap_err();
        assert!(matches!(err, Error::EvaluationGuard { im_lambda, .. } if im_lambda > 20.0));
    }

    #[test]
    fn matches_reference_values_mid() {
        let p = PhysParams::default();
        let (e, [r_l, r_r, t]) = unpack(&REF_MID);
        let a = amplitudes_closed_form(e, &p).unwrap();
        // r amplitudes are well-conditioned; t carries the e^{2|Im Λ|}
        // cancellation (measured ≈ 7e−11 relative at this point).
        assert!((a.r_left - r_l).norm() / r_l.norm() < 1e-12);
        assert!((a.r_right - r_r).norm() / r_r.norm() < 1e-12);
        assert!((a.t - t).norm() / t.norm() < 1e-9);
    }

    #[test]
    fn matches_reference_values_mild() {
        let p = PhysParams::new(0.3, 0.002, 0.15, 1.0, 1.0).unwrap();
        let (e, [r_l, r_r, t]) = unpack(&REF_MILD);
        let a = amplitudes_closed_form(e, &p).unwrap();
        for (got, want) in [(a.r_left, r_l), (a.r_right, r_r), (a.t, t)] {
            assert!(
                (got - want).norm() / want.norm() < 1e-10,
                "got {got}, want {want}"
            );
        }
    }

    #[test]
    fn transmission_is_reciprocal() {
        let p = PhysParams::default();
        let w = wavenumbers(0.5, &p).unwrap();
        let (_r_l, t_a) = closed_form_side(w.lambda_half, w.omega0, w.omega1).unwrap();
        let (_r_r, t_b) = closed_form_side(
            w.lambda_half.conj(),
            w.omega0.conj(),
            w.omega1.conj(),
        )
        .unwrap();
        assert!((t_a - t_b).norm() / t_a.norm() < 1e-9);
    }

    #[test]
    fn params_validation() {
        assert!(PhysParams::new(0.3, -0.001, 0.5, 1.0, 1.0).is_err());
        assert!(PhysParams::new(0.3, 0.005, 0.0, 1.0, 1.0).is_err());
        assert!(PhysParams::new(0.3, 0.005, 0.5, 0.0, 1.0).is_err());
        assert!(PhysParams::new(0.3, 0.005, 0.5, 1.0, 0.0).is_err());
    }
}
