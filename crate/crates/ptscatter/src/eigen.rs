//! Eigenvalue spectra of the 4×4 scattering matrices, by closed formula and
//! by a quartic root-finder.
//!
//! The closed formulas follow the structural family of the configuration.
//! With λ± = ½((r_R + r_L) ± √((r_R − r_L)² + 4t²)):
//!
//! - bare barrier and the {L1M, MR1, L1MR1} family: {λ₊, λ₋} each with
//!   multiplicity 2 (the transmitted-only flipper F1 moves transmission
//!   entries but the matrix still decomposes into two 2×2 blocks with the
//!   uncoupled spectrum — the table's case-2 label for these configs does
//!   not change their spectrum, which is reported rather than hidden);
//! - two-sided F0/F2 configs (case 2): {±λ₊, ±λ₋};
//! - one-sided shift configs (case 3): {λ₊, λ₋} together with
//!   ½(±(r_R − r_L) ± √((r_R + r_L)² + 4t²)), where the leading sign is "+"
//!   when the left component shifts r_L and "−" when the right component
//!   shifts r_R (mirror-image devices negate this pair; magnitudes are
//!   unaffected).
//!
//! All square roots are on the principal branch. Every returned eigenvalue
//! is an actual eigenvalue of the assembled matrix: |det(S − λI)| stays
//! below 1e−8 · ∏(1 + |λᵢ|) by construction, and tests enforce it.
//!
//! The numeric path expands det(S − λI) by Faddeev–LeVerrier and solves the
//! quartic by simultaneous Durand–Kerner iteration. Durand–Kerner is used
//! instead of the closed-form quartic resolution because the resolvent cubic
//! suffers catastrophic cancellation for clustered roots, while simultaneous
//! iteration degrades gracefully (double roots, which case-1 spectra always
//! have, resolve to ~1e−8 — inside every tolerance used here).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scattering::Amplitudes;
use crate::spinflip::{classify_case, DeviceConfig, SMatrix4};

/// How the four entries of an [`EigenQuartet`] pair up into ± families.
/// Indices (0,1) always form the first family and (2,3) the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// (λ₊, λ₋) repeated twice; both index pairs are the same family.
    DoubledPair,
    /// (λ₊, λ₋, −λ₊, −λ₋); the second pair is the negated first.
    SignSymmetric,
    /// Two genuinely different (sum ± root)/2 families.
    TwoFamilies,
    /// Roots from the quartic solver in canonical order; no family
    /// structure implied.
    Unlabeled,
}

/// Four eigenvalues with their family structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenQuartet {
    /// The eigenvalues; indices (0,1) and (2,3) are the reported pairs.
    pub values: [Complex64; 4],
    /// Family structure of the index pairs.
    pub pairing: Pairing,
    /// Structural case label (1..=3) when derived from a configuration;
    /// `None` for solver output.
    pub case_label: Option<u8>,
}

impl EigenQuartet {
    /// The two index pairs that phase classification examines.
    pub fn pair_indices() -> [(usize, usize); 2] {
        [(0, 1), (2, 3)]
    }
}

/// Closed-form spectrum of `build_smatrix(cfg, a)`.
pub fn eigenvalues_analytic(cfg: DeviceConfig, a: &Amplitudes) -> EigenQuartet {
    let (rl, rr, t) = (a.r_left, a.r_right, a.t);
    let sum = rr + rl;
    let diff = rr - rl;
    let root = (diff * diff + t * t * 4.0).sqrt();
    let lp = (sum + root) * 0.5;
    let lm = (sum - root) * 0.5;
    let case_label = classify_case(cfg);

    let (values, pairing) = match case_label {
        1 => ([lp, lm, lp, lm], Pairing::DoubledPair),
        2 => {
            if cfg.shifts_r_left() && cfg.shifts_r_right() {
                ([lp, lm, -lp, -lm], Pairing::SignSymmetric)
            } else {
                // The F1-only family: entries may move sectors but the
                // spectrum is still the doubled uncoupled one.
                ([lp, lm, lp, lm], Pairing::DoubledPair)
            }
        }
        _ => {
            let root2 = (sum * sum + t * t * 4.0).sqrt();
            let lead = if cfg.shifts_r_left() { diff } else { -diff };
            (
                [lp, lm, (lead + root2) * 0.5, (lead - root2) * 0.5],
                Pairing::TwoFamilies,
            )
        }
    };
    EigenQuartet {
        values,
        pairing,
        case_label: Some(case_label),
    }
}

/// Coefficients of the monic characteristic polynomial
/// λ⁴ + c₃λ³ + c₂λ² + c₁λ + c₀ of a 4×4 matrix, by the Faddeev–LeVerrier
/// recurrence. Returned as [c₀, c₁, c₂, c₃].
pub fn char_poly(s: &SMatrix4) -> [Complex64; 4] {
    let a = s.entries();
    let zero = Complex64::new(0.0, 0.0);
    let trace = |m: &[[Complex64; 4]; 4]| m[0][0] + m[1][1] + m[2][2] + m[3][3];
    let mat_mul = |x: &[[Complex64; 4]; 4], y: &[[Complex64; 4]; 4]| {
        let mut out = [[zero; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| x[i][k] * y[k][j]).sum();
            }
        }
        out
    };
    let add_diag = |m: &[[Complex64; 4]; 4], c: Complex64| {
        let mut out = *m;
        for (i, row) in out.iter_mut().enumerate() {
            row[i] += c;
        }
        out
    };

    let m1 = *a;
    let c3 = -trace(&m1);
    let m2 = mat_mul(a, &add_diag(&m1, c3));
    let c2 = -trace(&m2) / 2.0;
    let m3 = mat_mul(a, &add_diag(&m2, c2));
    let c1 = -trace(&m3) / 3.0;
    let m4 = mat_mul(a, &add_diag(&m3, c1));
    let c0 = -trace(&m4) / 4.0;
    [c0, c1, c2, c3]
}

/// p(z) for the monic quartic with low-to-high coefficients `c`.
fn quartic_eval(c: &[Complex64; 4], z: Complex64) -> Complex64 {
    (((z + c[3]) * z + c[2]) * z + c[1]) * z + c[0]
}

/// p′(z) for the same quartic.
fn quartic_deriv(c: &[Complex64; 4], z: Complex64) -> Complex64 {
    ((z * 4.0 + c[3] * 3.0) * z + c[2] * 2.0) * z + c[1]
}

/// Scale of the rounding noise in a Horner evaluation at z: Σ |cₖ| |z|ᵏ.
fn eval_scale(c: &[Complex64; 4], z: Complex64) -> f64 {
    let az = z.norm();
    (((az + c[3].norm()) * az + c[2].norm()) * az + c[1].norm()) * az + c[0].norm()
}

/// Collapse root clusters that the polynomial cannot resolve at working
/// precision.
///
/// A double root shows up as two iterates split by ~√(ε·scale) — far worse
/// than the ε·scale accuracy everything else here achieves. But a double
/// root of p is a *simple* root of p′, so once a pair is recognized as
/// noise-unresolvable, Newton on p′ recovers it to near machine precision.
/// Recognition: the pair must already be tight (within 1e−5 relative — the
/// widest a noise cluster can be at these coefficient scales) and the
/// polynomial value at the pair midpoint must be at the evaluation noise
/// floor, i.e. indistinguishable from an exact root. Triple and quadruple
/// clusters (never produced by the matrix recipes, but cheap to handle)
/// refine via the explicit roots of p″ and p‴.
fn collapse_clusters(c: &[Complex64; 4], z: &mut [Complex64; 4]) {
    const NOISE: f64 = 1024.0 * f64::EPSILON;
    let mut cluster: [usize; 4] = [0, 1, 2, 3];
    fn find(parent: &mut [usize; 4], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let mid = (z[i] + z[j]) * 0.5;
            if (z[i] - z[j]).norm() > 1e-5 * (1.0 + mid.norm()) {
                continue;
            }
            if quartic_eval(c, mid).norm() <= NOISE * eval_scale(c, mid) {
                let (a, b) = (find(&mut cluster, i), find(&mut cluster, j));
                cluster[a] = b;
            }
        }
    }
    for root in 0..4 {
        let members: Vec<usize> = (0..4).filter(|&i| find(&mut cluster, i) == root).collect();
        if members.len() < 2 || find(&mut cluster, root) != root {
            continue;
        }
        let centroid = members.iter().map(|&i| z[i]).sum::<Complex64>() / members.len() as f64;
        let refined = match members.len() {
            2 => {
                // Newton on p′ from the centroid (simple root of p′ there).
                let mut m = centroid;
                for _ in 0..8 {
                    let d1 = quartic_deriv(c, m);
                    let d2 = (m * 12.0 + c[3] * 6.0) * m + c[2] * 2.0;
                    if d2.norm() == 0.0 {
                        break;
                    }
                    let step = d1 / d2;
                    m -= step;
                    if step.norm() <= 1e-15 * (1.0 + m.norm()) {
                        break;
                    }
                }
                m
            }
            3 => {
                // Roots of the quadratic p″/12 = z² + (c₃/2)z + c₂/6.
                let b = c[3] * 0.5;
                let q = c[2] / 6.0;
                let disc = (b * b - q * 4.0).sqrt();
                let r1 = (-b + disc) * 0.5;
                let r2 = (-b - disc) * 0.5;
                if (r1 - centroid).norm() <= (r2 - centroid).norm() {
                    r1
                } else {
                    r2
                }
            }
            _ => -c[3] * 0.25, // root of p‴
        };
        for &i in &members {
            z[i] = refined;
        }
    }
}

/// All four roots of the monic quartic λ⁴ + c₃λ³ + c₂λ² + c₁λ + c₀ by
/// simultaneous Durand–Kerner iteration with one Newton polish per root.
///
/// Starts on a circle of radius 1 + max|cₖ| (a bound that encloses every
/// root), iterates at most 200 times, and accepts when either every update
/// is below 1e−12 relative or every residual |p(zᵢ)| has reached the
/// evaluation noise floor (the latter is what double roots settle at).
pub fn durand_kerner(c: &[Complex64; 4]) -> Result<[Complex64; 4]> {
    let radius = 1.0 + c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    // Asymmetric phase offset so the start never aligns with root symmetry.
    let mut z: [Complex64; 4] = std::array::from_fn(|k| {
        Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / 4.0)
    });

    const TOL: f64 = 1e-12;
    const MAX_ITERS: usize = 200;
    const NOISE: f64 = 64.0 * f64::EPSILON;

    let mut last_residual = f64::INFINITY;
    for _iteration in 0..MAX_ITERS {
        let mut max_step = 0.0_f64;
        for i in 0..4 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                // Coincident iterates: nudge apart and retry next sweep.
                z[i] += Complex64::new(radius * 1e-6, radius * 1e-6);
                max_step = f64::INFINITY;
                continue;
            }
            let step = quartic_eval(c, z[i]) / den;
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        let residual = z
            .iter()
            .map(|&zi| quartic_eval(c, zi).norm())
            .fold(0.0, f64::max);
        last_residual = residual;
        let noise_floor = z
            .iter()
            .map(|&zi| NOISE * eval_scale(c, zi))
            .fold(0.0, f64::max);
        if max_step <= TOL || residual <= noise_floor {
            for zi in &mut z {
                let dp = quartic_deriv(c, *zi);
                if dp.norm() > 0.0 {
                    let polish = quartic_eval(c, *zi) / dp;
                    if polish.norm() < 1.0 + zi.norm() {
                        *zi -= polish;
                    }
                }
            }
            collapse_clusters(c, &mut z);
            return Ok(z);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERS,
        residual: last_residual,
    })
}

/// Spectrum of a 4×4 scattering matrix via the quartic solver. Values come
/// back in a canonical deterministic order (lexicographic by real then
/// imaginary part); pairing is [`Pairing::Unlabeled`].
pub fn eigenvalues_numeric(s: &SMatrix4) -> Result<EigenQuartet> {
    let coeffs = char_poly(s);
    let mut roots = durand_kerner(&coeffs)?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(EigenQuartet {
        values: roots,
        pairing: Pairing::Unlabeled,
        case_label: None,
    })
}

/// All permutations of {0,1,2,3} in lexicographic order.
fn permutations4() -> [[usize; 4]; 24] {
    let mut out = [[0usize; 4]; 24];
    let mut n = 0;
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let d = 6 - a - b - c;
                out[n] = [a, b, c, d];
                n += 1;
            }
        }
    }
    out
}

/// Smallest possible max-componentwise distance between two quartets over
/// all 4! alignments.
pub fn multiset_distance(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    permutations4()
        .iter()
        .map(|p| {
            (0..4)
                .map(|i| (a[p[i]] - b[i]).norm())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Reorder `roots` to minimize the max distance to `reference` (first
/// minimizing permutation in lexicographic order, so ties break
/// deterministically).
pub fn align_to(reference: &[Complex64; 4], roots: &[Complex64; 4]) -> [Complex64; 4] {
    let mut best = *roots;
    let mut best_d = f64::INFINITY;
    for p in permutations4() {
        let d = (0..4)
            .map(|i| (roots[p[i]] - reference[i]).norm())
            .fold(0.0, f64::max);
        if d < best_d {
            best_d = d;
            best = std::array::from_fn(|i| roots[p[i]]);
        }
    }
    best
}

/// Determinant of a 4×4 complex matrix by cofactor expansion.
pub fn det4(m: &[[Complex64; 4]; 4]) -> Complex64 {
    let det3 = |r: [[Complex64; 3]; 3]| {
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    };
    let minor = |skip_col: usize| {
        let mut r = [[Complex64::new(0.0, 0.0); 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            let mut jj = 0;
            for j in 0..4 {
                if j != skip_col {
                    row[jj] = m[i + 1][j];
                    jj += 1;
                }
            }
        }
        r
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..4 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += m[0][j] * det3(minor(j)) * sign;
    }
    acc
}

/// |det(S − λI)| — zero exactly when λ is an eigenvalue.
pub fn det_residual(s: &SMatrix4, lambda: Complex64) -> f64 {
    let mut m = *s.entries();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    det4(&m).norm()
}

/// The scale ∏(1 + |λᵢ|) against which determinant residuals are judged.
pub fn residual_scale(values: &[Complex64; 4]) -> f64 {
    values.iter().map(|l| 1.0 + l.norm()).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinflip::{all_configs, build_smatrix};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_amplitudes(rng: &mut ChaCha8Rng) -> Amplitudes {
        let mut draw = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        Amplitudes::from_complex(draw(), draw(), draw())
    }

    #[test]
    fn diagonal_matrix_roots_are_the_diagonal() {
        let d = [c(1.5, 0.2), c(-0.3, 1.1), c(0.0, -2.0), c(2.5, 0.0)];
        let mut m = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        let s = SMatrix4::from_entries(m);
        let q = eigenvalues_numeric(&s).unwrap();
        assert!(multiset_distance(&q.values, &d) < 1e-10);
    }

    #[test]
    fn vanishing_reflections_give_plus_minus_t() {
        let theta = 0.7;
        let t = Complex64::from_polar(1.0, theta);
        let a = Amplitudes::from_complex(c(0.0, 0.0), c(0.0, 0.0), t);
        let q = eigenvalues_analytic(DeviceConfig::BARE, &a);
        assert!(multiset_distance(&q.values, &[t, -t, t, -t]) < 1e-14);
    }

    #[test]
    fn analytic_matches_numeric_for_every_config() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for cfg in all_configs() {
            for _ in 0..5 {
                let a = random_amplitudes(&mut rng);
                let s = build_smatrix(cfg, &a);
                let analytic = eigenvalues_analytic(cfg, &a);
                let numeric = eigenvalues_numeric(&s).unwrap();
                let d = multiset_distance(&analytic.values, &numeric.values);
                assert!(d < 1e-8, "config {cfg}: multiset distance {d:e}");
            }
        }
    }

    #[test]
    fn every_analytic_value_is_an_actual_eigenvalue() {
        let a = Amplitudes::from_complex(c(0.4, -0.9), c(-1.3, 0.25), c(0.8, 0.6));
        for cfg in all_configs() {
            let s = build_smatrix(cfg, &a);
            let q = eigenvalues_analytic(cfg, &a);
            let scale = residual_scale(&q.values);
            for &l in &q.values {
                let r = det_residual(&s, l);
                assert!(r <= 1e-8 * scale, "config {cfg}, λ={l}: residual {r:e}");
            }
        }
    }

    #[test]
    fn one_sided_first_pair_magnitudes_match_two_sided_spectrum() {
        // The first family of a one-sided config has the same magnitude set
        // as the full two-sided-config spectrum (which doubles it).
        let a = Amplitudes::from_complex(c(0.4, -0.9), c(-1.3, 0.25), c(0.8, 0.6));
        let one_sided = eigenvalues_analytic("L0M".parse().unwrap(), &a);
        let two_sided = eigenvalues_analytic("L0MR0".parse().unwrap(), &a);
        let mut mags3: Vec<f64> = one_sided.values[..2].iter().map(|l| l.norm()).collect();
        let mut mags2: Vec<f64> = two_sided.values.iter().map(|l| l.norm()).collect();
        mags3.sort_by(f64::total_cmp);
        mags2.sort_by(f64::total_cmp);
        assert!((mags2[0] - mags3[0]).abs() < 1e-14);
        assert!((mags2[1] - mags3[0]).abs() < 1e-14);
        assert!((mags2[2] - mags3[1]).abs() < 1e-14);
        assert!((mags2[3] - mags3[1]).abs() < 1e-14);
    }

    #[test]
    fn mirror_configs_share_magnitudes_not_signs() {
        let a = Amplitudes::from_complex(c(0.4, -0.9), c(-1.3, 0.25), c(0.8, 0.6));
        let left = eigenvalues_analytic("L0M".parse().unwrap(), &a);
        let right = eigenvalues_analytic("MR0".parse().unwrap(), &a);
        // Shared first family; second family negated.
        assert!((left.values[0] - right.values[0]).norm() < 1e-14);
        assert!((left.values[1] - right.values[1]).norm() < 1e-14);
        assert!((left.values[2] + right.values[3]).norm() < 1e-14);
        assert!((left.values[3] + right.values[2]).norm() < 1e-14);
    }

    #[test]
    fn transmitted_only_flippers_keep_the_uncoupled_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_amplitudes(&mut rng);
        let bare = eigenvalues_analytic(DeviceConfig::BARE, &a);
        for name in ["L1M", "MR1", "L1MR1"] {
            let cfg: DeviceConfig = name.parse().unwrap();
            let q = eigenvalues_analytic(cfg, &a);
            assert_eq!(q.pairing, Pairing::DoubledPair);
            assert_eq!(q.case_label, Some(2));
            assert!(multiset_distance(&q.values, &bare.values) < 1e-14);
            // and this is genuinely the matrix spectrum
            let s = build_smatrix(cfg, &a);
            let numeric = eigenvalues_numeric(&s).unwrap();
            assert!(multiset_distance(&q.values, &numeric.values) < 1e-8);
        }
    }

    #[test]
    fn alignment_orders_roots_against_a_reference() {
        let reference = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let shuffled = [c(3.0, 1e-12), c(1.0, 0.0), c(4.0, -1e-12), c(2.0, 0.0)];
        let aligned = align_to(&reference, &shuffled);
        for i in 0..4 {
            assert!((aligned[i] - reference[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn char_poly_reproduces_known_determinant_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_amplitudes(&mut rng);
        let s = build_smatrix("L0M".parse().unwrap(), &a);
        let coeffs = char_poly(&s);
        // c0 = det(S) for even dimension; c3 = −tr(S).
        let tr = (0..4).map(|i| s.get(i, i)).sum::<Complex64>();
        assert!((coeffs[3] + tr).norm() < 1e-12);
        assert!((coeffs[0] - det4(s.entries())).norm() < 1e-12);
    }
}
