//! Property-based suite: the documented invariants under random inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use ptscatter::dataset::fmt_float;
use ptscatter::eigen::{
    det_residual, eigenvalues_analytic, multiset_distance, residual_scale,
};
use ptscatter::phase::{classify_phase, find_atrs, BrokenStructure, OverallPhase, PairLabel};
use ptscatter::runconfig::{parse_run_config, RunConfig};
use ptscatter::scattering::{amplitudes_closed_form, wavenumbers, Amplitudes, PhysParams};
use ptscatter::spinflip::{all_configs, build_smatrix, classify_case, DeviceConfig};
use ptscatter::stack::bilayer_amplitudes;
use ptscatter::Error;

/// A random physical evaluation point with the energy above the barrier.
fn point() -> impl Strategy<Value = (f64, PhysParams)> {
    (
        0.0..0.5f64,   // V_R (eV)
        0.0..0.02f64,  // V_I (eV)
        0.1..1.0f64,   // L (um)
        0.01..1.5f64,  // E - V_R (eV)
    )
        .prop_map(|(v_r, v_i, l, de)| {
            (v_r + de, PhysParams::new(v_r, v_i, l, 1.0, 1.0).unwrap())
        })
}

/// A random complex amplitude triple (not necessarily physical).
fn triple() -> impl Strategy<Value = Amplitudes> {
    let c = || (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im));
    (c(), c(), c()).prop_map(|(rl, rr, t)| Amplitudes::from_complex(rl, rr, t))
}

fn configs_of_case(case: u8) -> Vec<DeviceConfig> {
    all_configs()
        .into_iter()
        .filter(|c| classify_case(*c) == case)
        .collect()
}

proptest! {
    /// |1 - T| = sqrt(R_R * R_L) at every evaluable point.
    #[test]
    fn pseudo_unitarity_holds_everywhere((e, p) in point()) {
        let a = match bilayer_amplitudes(e, &p) {
            Ok(a) => a,
            Err(Error::EvaluationGuard { .. }) => return Ok(()),
            Err(other) => panic!("unexpected evaluation error: {other}"),
        };
        prop_assert!(a.pseudo_unitarity_residual() <= 1e-9 * a.trans.max(1.0));
    }

    /// Closed form and star-product oracle agree to 1e-10 wherever the
    /// attenuation is mild.
    #[test]
    fn closed_form_matches_the_oracle_in_the_mild_regime((e, p) in point()) {
        let b = wavenumbers(e, &p).unwrap().lambda_half.im.abs();
        prop_assume!(b <= 5.0);
        let cf = amplitudes_closed_form(e, &p).unwrap();
        let star = bilayer_amplitudes(e, &p).unwrap();
        let rel = |x: Complex64, y: Complex64| (x - y).norm() / y.norm().max(1.0);
        let gap = rel(cf.r_left, star.r_left)
            .max(rel(cf.r_right, star.r_right))
            .max(rel(cf.t, star.t));
        prop_assert!(gap <= 1e-10, "gap = {gap:e} at b = {b:.2}");
    }

    /// With V_I = 0 the run is ordinary Hermitian scattering: flux is
    /// conserved and the two reflectances coincide.
    #[test]
    fn hermitian_scattering_conserves_flux((e, p0) in point()) {
        let p = PhysParams::new(p0.v_real, 0.0, p0.length, 1.0, 1.0).unwrap();
        let a = match bilayer_amplitudes(e, &p) {
            Ok(a) => a,
            Err(Error::DegenerateEnergy { .. }) => return Ok(()),
            Err(other) => panic!("unexpected evaluation error: {other}"),
        };
        prop_assert!((a.trans + a.refl_left - 1.0).abs() <= 1e-12);
        prop_assert!((a.refl_left - a.refl_right).abs() <= 1e-12);
    }

    /// Zero potential is exactly transparent at any energy and length.
    #[test]
    fn free_space_is_transparent(e in 0.05..2.0f64, l in 0.1..1.0f64) {
        let p = PhysParams::new(0.0, 0.0, l, 1.0, 1.0).unwrap();
        let a = bilayer_amplitudes(e, &p).unwrap();
        prop_assert!(a.refl_left.max(a.refl_right) <= 1e-28);
        prop_assert!((a.t.norm() - 1.0).abs() <= 1e-14);
    }

    /// The slab wavenumber never jumps branches between neighboring
    /// energies: its increment stays proportional to the step.
    #[test]
    fn slab_wavenumber_is_branch_stable((e, p) in point(), step in 1e-9..1e-6f64) {
        let k_a = wavenumbers(e, &p).unwrap().k1;
        let k_b = wavenumbers(e + step, &p).unwrap().k1;
        // The slope bound 100 nm^-1/eV holds one barrier-height's width
        // above the edge; a branch jump would violate it by many decades.
        prop_assert!((k_b - k_a).norm() <= 100.0 * step);
    }

    /// Device families share spectra: the sign-symmetric quartets agree,
    /// the transmitted-only family keeps the doubled bare spectrum, the two
    /// one-sided families agree internally and mirror each other's moduli.
    #[test]
    fn spectra_collapse_within_structural_families(a in triple()) {
        let families: [&[&str]; 4] = [
            &["L0MR0", "L2MR2", "L0MR2", "L2MR0"],
            &["L1MR1", "L1M", "MR1", "M"],
            &["L0M", "L0MR1", "L2M", "L2MR1"],
            &["MR0", "MR2", "L1MR0", "L1MR2"],
        ];
        for family in families {
            let reference = eigenvalues_analytic(family[0].parse().unwrap(), &a).values;
            let tol = 1e-10 * residual_scale(&reference);
            for name in &family[1..] {
                let values = eigenvalues_analytic(name.parse().unwrap(), &a).values;
                prop_assert!(
                    multiset_distance(&reference, &values) <= tol,
                    "{name} departs its family"
                );
            }
        }
        let left = eigenvalues_analytic("L0M".parse().unwrap(), &a).values;
        let right = eigenvalues_analytic("MR0".parse().unwrap(), &a).values;
        let mut ml: Vec<f64> = left.iter().map(|z| z.norm()).collect();
        let mut mr: Vec<f64> = right.iter().map(|z| z.norm()).collect();
        ml.sort_by(f64::total_cmp);
        mr.sort_by(f64::total_cmp);
        for (x, y) in ml.iter().zip(&mr) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }

    /// Every analytic eigenvalue annihilates det(S - lambda I), for every
    /// configuration and any amplitude triple.
    #[test]
    fn analytic_eigenvalues_annihilate_the_determinant(a in triple()) {
        for cfg in all_configs() {
            let s = build_smatrix(cfg, &a);
            let q = eigenvalues_analytic(cfg, &a);
            let tol = 1e-8 * residual_scale(&q.values);
            for l in q.values {
                prop_assert!(det_residual(&s, l) <= tol, "residual blown for {cfg}");
            }
        }
    }

    /// For the two-sided device the overall label is decided by the
    /// breaking measure alone (never mixed), whenever the point is clearly
    /// off the crossing.
    #[test]
    fn two_sided_label_tracks_the_breaking_measure(de in 0.02..1.7f64) {
        let p = PhysParams::default();
        let e = p.v_real + de;
        let a = bilayer_amplitudes(e, &p).unwrap();
        let measure = a.ssb_measure();
        prop_assume!((measure - 1.0).abs() > 1e-4);
        let label = classify_phase(&eigenvalues_analytic("L0MR0".parse().unwrap(), &a)).unwrap();
        prop_assert!(label.overall != OverallPhase::Mixed);
        let expected = if measure > 1.0 { OverallPhase::Broken } else { OverallPhase::Symmetric };
        prop_assert!(label.overall == expected, "measure {measure} vs {:?}", label.overall);
    }

    /// Broken pairs of one- and two-flipper-free spectra (cases 1 and 2)
    /// always come as reciprocal moduli.
    #[test]
    fn broken_pairs_of_two_sided_spectra_are_reciprocal(
        de in 0.02..1.7f64,
        which in 0..8usize,
    ) {
        let p = PhysParams::default();
        let e = p.v_real + de;
        let a = bilayer_amplitudes(e, &p).unwrap();
        let mut case12 = configs_of_case(1);
        case12.extend(configs_of_case(2));
        let cfg = case12[which % case12.len()];
        let q = eigenvalues_analytic(cfg, &a);
        let label = match classify_phase(&q) {
            Ok(l) => l,
            // A vanishing eigenvalue (spectral singularity) is the one
            // legitimate refusal.
            Err(Error::Indeterminate { .. }) => return Ok(()),
            Err(other) => panic!("unexpected classification error: {other}"),
        };
        for (idx, pair) in label.pairs.iter().enumerate() {
            if let PairLabel::Broken(structure) = pair {
                prop_assert!(*structure == BrokenStructure::Reciprocal);
                let (i, j) = if idx == 0 { (0, 1) } else { (2, 3) };
                let s = q.values[i].norm().log10() + q.values[j].norm().log10();
                prop_assert!(s.abs() <= 1e-6, "log-moduli sum {s:e} for {cfg}");
            }
        }
    }

    /// The device grammar round-trips: any well-formed label parses back to
    /// itself, case-insensitively.
    #[test]
    fn device_grammar_round_trips(left in 0..4usize, right in 0..4usize, flip in any::<bool>()) {
        let sides = ["", "0", "1", "2"];
        let mut label = String::new();
        if left > 0 {
            label.push('L');
            label.push_str(sides[left]);
        }
        label.push('M');
        if right > 0 {
            label.push('R');
            label.push_str(sides[right]);
        }
        let text = if flip { label.to_lowercase() } else { label.clone() };
        let cfg: DeviceConfig = text.parse().unwrap();
        prop_assert!(cfg.to_string() == label);
    }

    /// Run-configuration JSON round-trips to the identical value.
    #[test]
    fn run_config_round_trips(
        v_r in 0.0..0.5f64,
        v_i in 0.0..0.02f64,
        l in 0.1..1.0f64,
        mass in 0.05..2.0f64,
        n in 2..5000usize,
        left in 0..4usize,
        right in 0..4usize,
    ) {
        let config = format!(
            "{}M{}",
            ["", "L0", "L1", "L2"][left],
            ["", "R0", "R1", "R2"][right]
        );
        let rc = RunConfig {
            v_r_ev: v_r,
            v_i_ev: v_i,
            l_um: l,
            mass_ratio: mass,
            e0_ev: 1.0,
            config,
            e_min: v_r + 0.01,
            e_max: v_r + 1.0,
            n_points: n,
            out_dir: "data".into(),
        };
        let back = parse_run_config(&rc.to_json()).unwrap();
        prop_assert!(back == rc);
    }

    /// Dataset floats are rendered losslessly: parsing the CSV cell
    /// recovers the identical bits.
    #[test]
    fn csv_float_rendering_is_lossless(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let cell = fmt_float(x);
        let back: f64 = cell.parse().unwrap();
        prop_assert!(back.to_bits() == x.to_bits(), "{x} -> {cell} -> {back}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Every transmission resonance found in a random sub-window reflects
    /// nothing in the geometric-mean sense.
    #[test]
    fn resonances_reflect_nothing_geometrically(w in 0.85..0.95f64) {
        let p = PhysParams::default();
        let events = find_atrs(&p, (w, w + 0.05), 300).unwrap();
        for ev in &events {
            let a = bilayer_amplitudes(ev.energy, &p).unwrap();
            let g = (a.refl_left * a.refl_right).sqrt();
            prop_assert!(g <= 1e-7, "sqrt(R_L R_R) = {g:e} at E = {}", ev.energy);
        }
    }
}
