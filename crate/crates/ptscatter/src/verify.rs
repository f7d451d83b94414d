//! The runtime verification suite: a machine-readable manifest mapping
//! invariant IDs to executable checks, run by the `verify` subcommand.
//!
//! IDs: S* scattering amplitudes, F* spin-flipper matrices and spectra,
//! P* phase analysis and root-finding, W* sweep engine, C* configuration
//! and dataset plumbing. The manifest is itself checked for completeness
//! against the documented ID list (C2), so an invariant cannot silently
//! drop out of coverage.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{manifold_dataset, sweep_dataset, Dataset};
use crate::eigen::{det_residual, eigenvalues_analytic, multiset_distance, residual_scale};
use crate::error::Error;
use crate::phase::{
    classify_phase, find_atrs, first_critical_energy, mixed_band_scan, trace_ssb_manifold,
    BrokenStructure, OverallPhase, PairLabel,
};
use crate::runconfig::parse_run_config;
use crate::scattering::{amplitudes_closed_form, wavenumbers, Amplitudes, PhysParams};
use crate::spinflip::{all_configs, build_smatrix, classify_case, DeviceConfig, SMatrix4};
use crate::stack::{amplitudes_transfer, bilayer_amplitudes, pt_bilayer};
use crate::sweep::{run_sweep, run_sweep_with_workers, Outputs, PhaseCell, SweepSpec};

/// Pass detail or failure detail.
pub type CheckResult = std::result::Result<String, String>;

/// One manifest entry.
pub struct InvariantCheck {
    pub id: &'static str,
    pub description: &'static str,
    pub check: fn() -> CheckResult,
}

/// The documented invariant list the manifest must cover, module by module.
pub const DOCUMENTED_IDS: [&str; 21] = [
    "S1", "S2", "S3", "S4", "S5", "F1", "F2", "F3", "F4", "F5", "P1", "P2", "P3", "P4", "P5",
    "W1", "W2", "W3", "C1", "C2", "C3",
];

/// Outcome of one check.
pub struct CheckOutcome {
    pub id: &'static str,
    pub description: &'static str,
    pub result: CheckResult,
}

/// Outcomes for the whole manifest, in manifest order.
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.is_ok())
    }

    pub fn failures(&self) -> Vec<&CheckOutcome> {
        self.outcomes.iter().filter(|o| o.result.is_err()).collect()
    }

    /// One line per check: `ID: PASS/FAIL — detail`.
    pub fn render_lines(&self) -> Vec<String> {
        self.outcomes
            .iter()
            .map(|o| match &o.result {
                Ok(d) => format!("{}: PASS — {} ({d})", o.id, o.description),
                Err(d) => format!("{}: FAIL — {} ({d})", o.id, o.description),
            })
            .collect()
    }
}

/// Run every manifest check.
pub fn run_verify() -> VerifyReport {
    VerifyReport {
        outcomes: manifest()
            .iter()
            .map(|c| CheckOutcome {
                id: c.id,
                description: c.description,
                result: (c.check)(),
            })
            .collect(),
    }
}

/// The invariant manifest.
pub fn manifest() -> &'static [InvariantCheck] {
    &MANIFEST
}

static MANIFEST: [InvariantCheck; 21] = [
    InvariantCheck {
        id: "S1",
        description: "pseudo-unitarity | |1-T| - sqrt(R_R R_L) | <= 1e-9*max(1,T) on 1000 draws",
        check: check_s1,
    },
    InvariantCheck {
        id: "S2",
        description: "closed-form, star-product and transfer amplitudes agree (strict in the mild regime, conditioning bound beyond)",
        check: check_s2,
    },
    InvariantCheck {
        id: "S3",
        description: "Hermitian limit: |T+R-1| <= 1e-12 and |R_L-R_R| <= 1e-12 on 200 draws",
        check: check_s3,
    },
    InvariantCheck {
        id: "S4",
        description: "zero potential: reflections vanish and |t| = 1 within 1e-14",
        check: check_s4,
    },
    InvariantCheck {
        id: "S5",
        description: "slab wavenumber is branch-stable along fine energy sweeps",
        check: check_s5,
    },
    InvariantCheck {
        id: "F1",
        description: "spectra collapse within structural families; mirror families share magnitudes",
        check: check_f1,
    },
    InvariantCheck {
        id: "F2",
        description: "recipe places r_R, r_L, t at the documented entries for M, L0MR0, L0M",
        check: check_f2,
    },
    InvariantCheck {
        id: "F3",
        description: "determinant residual <= 1e-8*scale for every eigenvalue of all 16 configs",
        check: check_f3,
    },
    InvariantCheck {
        id: "F4",
        description: "bare device decouples the spin sectors exactly",
        check: check_f4,
    },
    InvariantCheck {
        id: "F5",
        description: "one-sided flipper has a connected channel-coupling graph",
        check: check_f5,
    },
    InvariantCheck {
        id: "P1",
        description: "two-sided-device label agrees with the sign of the breaking measure away from crossings",
        check: check_p1,
    },
    InvariantCheck {
        id: "P2",
        description: "sqrt(R_L*R_R) <= 1e-7 at every transmission resonance",
        check: check_p2,
    },
    InvariantCheck {
        id: "P3",
        description: "broadband mixed window >= 0.1*E0 for the one-sided device (above the crossing)",
        check: check_p3,
    },
    InvariantCheck {
        id: "P4",
        description: "broken pairs of case-1/2 spectra are reciprocal within 1e-6",
        check: check_p4,
    },
    InvariantCheck {
        id: "P5",
        description: "root finders return bit-identical results on repeated runs",
        check: check_p5,
    },
    InvariantCheck {
        id: "W1",
        description: "sweep datasets are byte-identical for 1, 2 and 3 workers",
        check: check_w1,
    },
    InvariantCheck {
        id: "W2",
        description: "records recompute exactly from their own inputs (100 sampled records)",
        check: check_w2,
    },
    InvariantCheck {
        id: "W3",
        description: "gap markers equal the grid points on the degenerate locus",
        check: check_w3,
    },
    InvariantCheck {
        id: "C1",
        description: "run-config serialization round-trips to identity",
        check: check_c1,
    },
    InvariantCheck {
        id: "C2",
        description: "manifest covers the documented invariant list exactly",
        check: check_c2,
    },
    InvariantCheck {
        id: "C3",
        description: "datasets carry bare file names and land under the target directory",
        check: check_c3,
    },
];

fn fail(msg: String) -> CheckResult {
    Err(msg)
}

/// One random physical point from the documented draw ranges
/// (E₀ = 1 eV, m = mₑ): V_R ∈ [0, 0.5], V_I ∈ [0, 0.02], L ∈ [0.1, 1] μm,
/// E ∈ (V_R + 0.01, 2].
fn draw_point(rng: &mut ChaCha8Rng, hermitian: bool) -> (f64, PhysParams) {
    let v_r = rng.gen_range(0.0..0.5);
    let v_i = if hermitian {
        0.0
    } else {
        rng.gen_range(0.0..0.02)
    };
    let l = rng.gen_range(0.1..1.0);
    let e = rng.gen_range((v_r + 0.01)..2.0);
    (
        e,
        PhysParams::new(v_r, v_i, l, 1.0, 1.0).expect("draw ranges are valid"),
    )
}

fn check_s1() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let mut worst: f64 = 0.0;
    let mut rejected = 0usize;
    let mut accepted = 0usize;
    while accepted < 1000 {
        let (e, p) = draw_point(&mut rng, false);
        let a = match bilayer_amplitudes(e, &p) {
            Ok(a) => a,
            Err(Error::EvaluationGuard { .. }) => {
                rejected += 1;
                continue;
            }
            Err(other) => return fail(format!("unexpected evaluation error: {other}")),
        };
        accepted += 1;
        let res = a.pseudo_unitarity_residual();
        let bound = 1e-9 * a.trans.max(1.0);
        if res > bound {
            return fail(format!(
                "residual {res:e} > {bound:e} at E = {e}, V = {} + {}i, L = {}",
                p.v_real, p.v_imag, p.length
            ));
        }
        worst = worst.max(res / bound);
    }
    Ok(format!(
        "1000 draws, worst residual/bound = {worst:.3e}, {rejected} guarded draws redrawn"
    ))
}

/// Componentwise gap, relative where the amplitude is large: one reflection
/// amplitude grows exponentially in the strong gain/loss regime, so an
/// absolute comparison there would only measure that growth.
fn amp_gap(a: &Amplitudes, reference: &Amplitudes) -> f64 {
    let rel = |x: Complex64, y: Complex64| (x - y).norm() / y.norm().max(1.0);
    rel(a.r_left, reference.r_left)
        .max(rel(a.r_right, reference.r_right))
        .max(rel(a.t, reference.t))
}

fn check_s2() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    let eps = f64::EPSILON;
    let mut rejected = 0usize;
    let mut accepted = 0usize;
    let mut mild = 0usize;
    let mut worst_mild: f64 = 0.0;
    while accepted < 1000 {
        let (e, p) = draw_point(&mut rng, false);
        let cf = match amplitudes_closed_form(e, &p) {
            Ok(a) => a,
            Err(Error::EvaluationGuard { .. }) => {
                rejected += 1;
                continue;
            }
            Err(other) => return fail(format!("unexpected closed-form error: {other}")),
        };
        accepted += 1;
        let star = bilayer_amplitudes(e, &p).map_err(|err| err.to_string())?;
        let tr = amplitudes_transfer(e, &pt_bilayer(e, &p).map_err(|err| err.to_string())?)
            .map_err(|err| err.to_string())?;
        let b = wavenumbers(e, &p)
            .map_err(|err| err.to_string())?
            .lambda_half
            .im
            .abs();
        let gap_cf = amp_gap(&cf, &star);
        let gap_tr = amp_gap(&tr, &star);
        // The closed form amplifies roundoff by the attenuation factor; the
        // strict 1e-10 agreement holds in the mild regime and a
        // conditioning-law bound everywhere in range.
        let bound = 64.0 * eps * ((2.0 * b).exp() + 1024.0);
        if gap_cf > bound || gap_tr > bound {
            return fail(format!(
                "gap {:.3e} > conditioning bound {bound:.3e} at |Im lambda| = {b:.2} (E = {e})",
                gap_cf.max(gap_tr)
            ));
        }
        if b <= 5.0 {
            mild += 1;
            if gap_cf > 1e-10 || gap_tr > 1e-10 {
                return fail(format!(
                    "mild-regime gap {:.3e} > 1e-10 at |Im lambda| = {b:.2} (E = {e})",
                    gap_cf.max(gap_tr)
                ));
            }
            worst_mild = worst_mild.max(gap_cf.max(gap_tr));
        }
    }
    Ok(format!(
        "1000 draws ({mild} mild, worst mild gap {worst_mild:.3e}), {rejected} beyond the closed-form guard redrawn"
    ))
}

fn check_s3() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    let mut worst_flux: f64 = 0.0;
    let mut worst_lr: f64 = 0.0;
    for _ in 0..200 {
        let (e, p) = draw_point(&mut rng, true);
        let a = match bilayer_amplitudes(e, &p) {
            Ok(a) => a,
            Err(Error::EvaluationGuard { .. }) | Err(Error::DegenerateEnergy { .. }) => continue,
            Err(other) => return fail(format!("unexpected evaluation error: {other}")),
        };
        let flux = (a.trans + a.refl_left - 1.0).abs();
        let lr = (a.refl_left - a.refl_right).abs();
        if flux > 1e-12 || lr > 1e-12 {
            return fail(format!(
                "V_I = 0 at E = {e}: |T+R-1| = {flux:e}, |R_L-R_R| = {lr:e}"
            ));
        }
        worst_flux = worst_flux.max(flux);
        worst_lr = worst_lr.max(lr);
    }
    Ok(format!(
        "worst |T+R-1| = {worst_flux:.2e}, worst |R_L-R_R| = {worst_lr:.2e}"
    ))
}

fn check_s4() -> CheckResult {
    let p = PhysParams::new(0.0, 0.0, 0.5, 1.0, 1.0).map_err(|err| err.to_string())?;
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let e = 0.2 + 1.8 * i as f64 / 49.0;
        let a = bilayer_amplitudes(e, &p).map_err(|err| err.to_string())?;
        let r = a.r_left.norm().max(a.r_right.norm());
        let t1 = (a.t.norm() - 1.0).abs();
        if r > 1e-14 || t1 > 1e-14 {
            return fail(format!("E = {e}: |r| = {r:e}, ||t|-1| = {t1:e}"));
        }
        worst = worst.max(r.max(t1));
    }
    Ok(format!("50 energies, worst deviation {worst:.2e}"))
}

fn check_s5() -> CheckResult {
    let p = PhysParams::default();
    let n = 20_000;
    let (lo, hi) = (0.32, 2.0);
    let step = (hi - lo) / n as f64;
    let mut prev: Option<Complex64> = None;
    let mut max_slope: f64 = 0.0;
    for i in 0..=n {
        let k1 = wavenumbers(lo + step * i as f64, &p)
            .map_err(|err| err.to_string())?
            .k1;
        if let Some(last) = prev {
            let slope = (k1 - last).norm() / step;
            max_slope = max_slope.max(slope);
            if slope > 100.0 {
                return fail(format!(
                    "|dk1/dE| = {slope:.1} nm^-1/eV at E = {} (branch jump?)",
                    lo + step * i as f64
                ));
            }
        }
        prev = Some(k1);
    }
    Ok(format!(
        "20000-point sweep, max |dk1/dE| = {max_slope:.2} nm^-1/eV"
    ))
}

fn families() -> [Vec<&'static str>; 4] {
    [
        // Two-sided genuine case 2: sign-symmetric quartets.
        vec!["L0MR0", "L2MR2", "L0MR2", "L2MR0"],
        // Transmitted-only family: case-2 label, doubled two-value spectrum.
        vec!["L1MR1", "L1M", "MR1"],
        // Case 3, reflection shift on the left.
        vec!["L0M", "L0MR1", "L2M", "L2MR1"],
        // Case 3, reflection shift on the right (mirror of the previous).
        vec!["MR0", "MR2", "L1MR0", "L1MR2"],
    ]
}

fn seeded_amplitudes(rng: &mut ChaCha8Rng) -> Amplitudes {
    let mut c = |_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    Amplitudes::from_complex(c(0), c(1), c(2))
}

fn check_f1() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF1);
    let tol = 1e-10;
    for draw in 0..3 {
        let a = seeded_amplitudes(&mut rng);
        for family in families() {
            let reference = eigenvalues_analytic(family[0].parse().unwrap(), &a).values;
            for name in &family[1..] {
                let values = eigenvalues_analytic(name.parse().unwrap(), &a).values;
                let d = multiset_distance(&reference, &values);
                if d > tol * residual_scale(&reference) {
                    return fail(format!(
                        "draw {draw}: {name} spectrum differs from {} by {d:e}",
                        family[0]
                    ));
                }
            }
        }
        // Mirror case-3 families: identical magnitude multisets.
        let left = eigenvalues_analytic("L0M".parse().unwrap(), &a).values;
        let right = eigenvalues_analytic("MR0".parse().unwrap(), &a).values;
        let mut ml: Vec<f64> = left.iter().map(|z| z.norm()).collect();
        let mut mr: Vec<f64> = right.iter().map(|z| z.norm()).collect();
        ml.sort_by(f64::total_cmp);
        mr.sort_by(f64::total_cmp);
        for (x, y) in ml.iter().zip(&mr) {
            if (x - y).abs() > tol * (1.0 + x.abs()) {
                return fail(format!(
                    "draw {draw}: mirror families disagree in magnitude: {x} vs {y}"
                ));
            }
        }
    }
    Ok("4 families x 3 draws collapse; mirror families share magnitudes".into())
}

fn placed_at(s: &SMatrix4, v: Complex64, expect: &[(usize, usize)]) -> bool {
    let mut found = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if (s.get(i, j) - v).norm() == 0.0 {
                found.push((i, j));
            }
        }
    }
    found == expect
}

fn check_f2() -> CheckResult {
    type Spots = Vec<(usize, usize)>;
    let rl = Complex64::new(2.0, 0.0);
    let rr = Complex64::new(3.0, 0.0);
    let t = Complex64::new(5.0, 0.0);
    let a = Amplitudes::from_complex(rl, rr, t);
    let cases: [(&str, Spots, Spots, Spots); 3] = [
        (
            "M",
            vec![(0, 0), (2, 2)],
            vec![(1, 1), (3, 3)],
            vec![(0, 1), (1, 0), (2, 3), (3, 2)],
        ),
        (
            "L0MR0",
            vec![(0, 2), (2, 0)],
            vec![(1, 3), (3, 1)],
            vec![(0, 1), (1, 0), (2, 3), (3, 2)],
        ),
        (
            "L0M",
            vec![(0, 0), (2, 2)],
            vec![(1, 3), (3, 1)],
            vec![(0, 3), (1, 2), (2, 1), (3, 0)],
        ),
    ];
    for (name, pos_rr, pos_rl, pos_t) in &cases {
        let s = build_smatrix(name.parse().unwrap(), &a);
        if !(placed_at(&s, rr, pos_rr) && placed_at(&s, rl, pos_rl) && placed_at(&s, t, pos_t)) {
            return fail(format!("{name}: entries not at the documented positions"));
        }
    }
    Ok("templates for M, L0MR0, L0M match entry-for-entry".into())
}

fn check_f3() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF3);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let a = seeded_amplitudes(&mut rng);
        for cfg in all_configs() {
            let s = build_smatrix(cfg, &a);
            let q = eigenvalues_analytic(cfg, &a);
            let scale = 1e-8 * residual_scale(&q.values);
            for &l in &q.values {
                let r = det_residual(&s, l);
                if r > scale {
                    return fail(format!("config {cfg}: det residual {r:e} > {scale:e}"));
                }
                worst = worst.max(r / scale);
            }
        }
    }
    Ok(format!(
        "16 configs x 3 draws x 4 eigenvalues, worst residual/bound = {worst:.3e}"
    ))
}

fn check_f4() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF4);
    let a = seeded_amplitudes(&mut rng);
    let s = build_smatrix(DeviceConfig::BARE, &a);
    if s.spin_sectors_decoupled() {
        Ok("bare matrix has exactly zero cross-sector entries".into())
    } else {
        fail("bare matrix couples the spin sectors".into())
    }
}

fn check_f5() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF5);
    let a = seeded_amplitudes(&mut rng);
    for name in ["L0M", "MR0", "L2M", "MR2"] {
        let s = build_smatrix(name.parse().unwrap(), &a);
        if !s.coupling_graph_connected() || s.spin_sectors_decoupled() {
            return fail(format!("{name}: coupling graph not connected"));
        }
    }
    Ok("all one-sided reflection-shifting devices couple all four channels".into())
}

fn check_p1() -> CheckResult {
    let p = PhysParams::default();
    let cfg: DeviceConfig = "L0MR0".parse().unwrap();
    let crossings: Vec<f64> = crate::phase::find_critical_energy(&p, (0.32, 2.0), 4000)
        .map_err(|err| err.to_string())?
        .iter()
        .map(|r| r.energy)
        .collect();
    if crossings.is_empty() {
        return fail("no breaking crossing found to anchor the check".into());
    }
    let n = 2000;
    let mut checked = 0usize;
    for i in 0..n {
        let e = 0.32 + (2.0 - 0.32) * (i + 1) as f64 / n as f64;
        if crossings.iter().any(|c| (e - c).abs() < 1e-6) {
            continue;
        }
        let a = bilayer_amplitudes(e, &p).map_err(|err| err.to_string())?;
        let label = classify_phase(&eigenvalues_analytic(cfg, &a)).map_err(|err| err.to_string())?;
        if label.overall == OverallPhase::Mixed {
            return fail(format!("two-sided device came out mixed at E = {e}"));
        }
        let by_measure = if a.ssb_measure() > 1.0 {
            OverallPhase::Broken
        } else {
            OverallPhase::Symmetric
        };
        if label.overall != by_measure {
            return fail(format!(
                "label {:?} vs measure side {:?} at E = {e}",
                label.overall, by_measure
            ));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} grid points agree across {} crossing(s)",
        crossings.len()
    ))
}

fn check_p2() -> CheckResult {
    let p = PhysParams::default();
    let events = find_atrs(&p, (0.85, 1.0), 2000).map_err(|err| err.to_string())?;
    if events.is_empty() {
        return fail("no transmission resonances found in (0.85, 1.0)".into());
    }
    let mut worst: f64 = 0.0;
    for ev in &events {
        let a = bilayer_amplitudes(ev.energy, &p).map_err(|err| err.to_string())?;
        let g = (a.refl_left * a.refl_right).sqrt();
        if g > 1e-7 {
            return fail(format!(
                "sqrt(R_L*R_R) = {g:e} > 1e-7 at resonance E = {}",
                ev.energy
            ));
        }
        worst = worst.max(g);
    }
    Ok(format!(
        "{} resonances, worst sqrt(R_L*R_R) = {worst:.2e}",
        events.len()
    ))
}

fn check_p3() -> CheckResult {
    let p = PhysParams::default();
    let ec = first_critical_energy(&p, (0.32, 2.0), 4000)
        .map_err(|err| err.to_string())?
        .ok_or("no breaking crossing at reference parameters")?;
    let cfg: DeviceConfig = "L0M".parse().unwrap();
    let report = mixed_band_scan(&p, cfg, (ec + 0.005, ec + 1.2), 4000)
        .map_err(|err| err.to_string())?;
    if report.width < 0.1 * p.e0 {
        return fail(format!(
            "widest mixed window {:.4} eV < 0.1*E0 (window {:?})",
            report.width, report.window
        ));
    }
    Ok(format!(
        "window {:.4} eV wide at {:?}, {} of {} points qualifying ({} via resonance-dip exemption); sits above the crossing",
        report.width, report.window, report.qualifying, report.grid_points, report.exempted_near_resonance
    ))
}

fn check_p4() -> CheckResult {
    let p = PhysParams::default();
    let mut broken_pairs = 0usize;
    for cfg in all_configs().into_iter().filter(|c| classify_case(*c) != 3) {
        for i in 0..25 {
            let e = 0.4 + 0.8 * i as f64 / 24.0;
            let a = bilayer_amplitudes(e, &p).map_err(|err| err.to_string())?;
            let q = eigenvalues_analytic(cfg, &a);
            let label = classify_phase(&q).map_err(|err| err.to_string())?;
            for (pair_idx, pair) in label.pairs.iter().enumerate() {
                if let PairLabel::Broken(structure) = pair {
                    broken_pairs += 1;
                    let (i0, i1) = if pair_idx == 0 { (0, 1) } else { (2, 3) };
                    let s =
                        (q.values[i0].norm().log10() + q.values[i1].norm().log10()).abs();
                    if *structure != BrokenStructure::Reciprocal || s > 1e-6 {
                        return fail(format!(
                            "config {cfg} at E = {e}: broken pair {pair_idx} not reciprocal (log-modulus sum {s:e})"
                        ));
                    }
                }
            }
        }
    }
    if broken_pairs == 0 {
        return fail("no broken pairs sampled — check is vacuous".into());
    }
    Ok(format!("{broken_pairs} broken pairs, all reciprocal"))
}

fn check_p5() -> CheckResult {
    let p = PhysParams::default();
    let a = first_critical_energy(&p, (0.32, 2.0), 4000).map_err(|err| err.to_string())?;
    let b = first_critical_energy(&p, (0.32, 2.0), 4000).map_err(|err| err.to_string())?;
    match (a, b) {
        (Some(x), Some(y)) if x.to_bits() == y.to_bits() => {}
        other => return fail(format!("crossing search not reproducible: {other:?}")),
    }
    let ev1 = find_atrs(&p, (0.85, 1.0), 1000).map_err(|err| err.to_string())?;
    let ev2 = find_atrs(&p, (0.85, 1.0), 1000).map_err(|err| err.to_string())?;
    if ev1.len() != ev2.len()
        || ev1
            .iter()
            .zip(&ev2)
            .any(|(x, y)| x.energy.to_bits() != y.energy.to_bits())
    {
        return fail("resonance search not bit-reproducible".into());
    }
    Ok(format!(
        "crossing and {} resonance energies bit-identical across reruns",
        ev1.len()
    ))
}

fn verify_sweep_spec() -> SweepSpec {
    SweepSpec {
        params: PhysParams::default(),
        config: "L0M".parse().unwrap(),
        e_min: 0.35,
        e_max: 0.95,
        n_points: 400,
        outputs: Outputs::default(),
    }
}

fn check_w1() -> CheckResult {
    let spec = verify_sweep_spec();
    let mut renders = Vec::new();
    for w in [1usize, 2, 3] {
        let records = run_sweep_with_workers(&spec, w).map_err(|err| err.to_string())?;
        renders.push(sweep_dataset(&records, vec![]).render_csv());
    }
    if renders[0] == renders[1] && renders[0] == renders[2] {
        Ok(format!("{} bytes identical across 1/2/3 workers", renders[0].len()))
    } else {
        fail("renders differ across worker counts".into())
    }
}

fn check_w2() -> CheckResult {
    let spec = verify_sweep_spec();
    let records = run_sweep(&spec).map_err(|err| err.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xB2);
    for _ in 0..100 {
        let idx = rng.gen_range(0..records.len());
        let r = &records[idx];
        let e = r.energy_over_e0 * spec.params.e0;
        let a = bilayer_amplitudes(e, &spec.params).map_err(|err| err.to_string())?;
        let q = eigenvalues_analytic(spec.config, &a);
        let phase = match classify_phase(&q) {
            Ok(l) => PhaseCell::Label(l.overall),
            Err(_) => PhaseCell::Indeterminate,
        };
        let same = r.refl_left.to_bits() == a.refl_left.to_bits()
            && r.refl_right.to_bits() == a.refl_right.to_bits()
            && r.trans.to_bits() == a.trans.to_bits()
            && r.pseudo_residual.to_bits() == a.pseudo_unitarity_residual().to_bits()
            && r.ssb_measure.to_bits() == a.ssb_measure().to_bits()
            && r.eigenvalues
                .iter()
                .zip(&q.values)
                .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
            && r.phase == phase;
        if !same {
            return fail(format!("record {idx} does not recompute from its inputs"));
        }
    }
    Ok("100 sampled records recompute bit-exactly".into())
}

fn check_w3() -> CheckResult {
    let spec = SweepSpec {
        params: PhysParams::new(0.3, 0.0, 0.5, 1.0, 1.0).map_err(|err| err.to_string())?,
        config: DeviceConfig::BARE,
        e_min: 0.29995,
        e_max: 0.30035,
        n_points: 8,
        outputs: Outputs::default(),
    };
    let records = run_sweep(&spec).map_err(|err| err.to_string())?;
    let gaps = records.iter().filter(|r| r.is_gap()).count();
    let locus = spec
        .grid_energies()
        .iter()
        .filter(|e| (*e - 0.3).abs() <= 1e-12)
        .count();
    if gaps == locus && gaps == 1 {
        Ok(format!("{gaps} gap == {locus} locus point on an 8-point straddling grid"))
    } else {
        fail(format!("{gaps} gaps vs {locus} locus points"))
    }
}

fn check_c1() -> CheckResult {
    let texts = [
        r#"{"v_r_ev":0.3,"v_i_ev":0.005,"l_um":0.5,"config":"L0M","e_min":0.31,"e_max":1.0}"#,
        r#"{"v_r_ev":0.2,"v_i_ev":0.0,"l_um":0.25,"mass_ratio":0.5,"e0_ev":2.0,"config":"L1MR2","e_min":0.5,"e_max":1.5,"n_points":100,"out_dir":"data"}"#,
    ];
    for text in texts {
        let cfg = parse_run_config(text).map_err(|err| err.to_string())?;
        let again = parse_run_config(&cfg.to_json()).map_err(|err| err.to_string())?;
        if cfg != again {
            return fail(format!("round trip changed the config parsed from {text}"));
        }
    }
    Ok("2 configs (minimal and fully specified) round-trip to identity".into())
}

fn check_c2() -> CheckResult {
    let ids: Vec<&str> = MANIFEST.iter().map(|c| c.id).collect();
    if ids == DOCUMENTED_IDS {
        Ok(format!("{} checks cover the documented list in order", ids.len()))
    } else {
        fail(format!(
            "manifest ids {ids:?} != documented {DOCUMENTED_IDS:?}"
        ))
    }
}

fn check_c3() -> CheckResult {
    let bare = |name: &str| {
        !name.is_empty() && !name.contains('/') && !name.contains('\\') && !name.contains("..")
    };
    let mut datasets: Vec<Dataset> = Vec::new();
    let spec = verify_sweep_spec();
    let records = run_sweep(&spec).map_err(|err| err.to_string())?;
    datasets.push(sweep_dataset(&records, vec![]));
    let p = PhysParams::default();
    let curves =
        trace_ssb_manifold(&[0.5], p.v_real, &[0.5, 0.9], &p).map_err(|err| err.to_string())?;
    datasets.push(manifold_dataset(&curves, p.e0, vec![]));
    for d in &datasets {
        if !bare(&d.file_name) {
            return fail(format!("dataset file name {:?} is not a bare name", d.file_name));
        }
    }
    let root = std::env::temp_dir().join(format!("ptscatter-verify-{}", std::process::id()));
    std::fs::create_dir_all(&root).map_err(|err| err.to_string())?;
    let mut written = Vec::new();
    for d in &datasets {
        written.push(d.write_to(&root).map_err(|err| err.to_string())?);
    }
    let contained = written.iter().all(|path| path.starts_with(&root));
    let _ = std::fs::remove_dir_all(&root);
    if contained {
        Ok(format!(
            "{} datasets written strictly under the target directory",
            written.len()
        ))
    } else {
        fail("a dataset escaped the target directory".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_matches_documented_ids() {
        assert!(check_c2().is_ok());
    }

    #[test]
    fn quick_checks_pass() {
        // The cheap structural checks (the expensive numerical ones run via
        // the acceptance and CLI suites).
        for id in ["S4", "F2", "F4", "F5", "W3", "C1"] {
            let c = manifest().iter().find(|c| c.id == id).unwrap();
            let r = (c.check)();
            assert!(r.is_ok(), "{id}: {r:?}");
        }
    }

    #[test]
    fn full_suite_passes() {
        let report = run_verify();
        for line in report.render_lines() {
            eprintln!("{line}");
        }
        assert!(report.all_passed());
    }
}
