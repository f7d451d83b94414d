//! Critical-gain manifolds: where breaking sets in as V_I grows.
//!
//! For each energy, the symmetric phase survives only up to a critical
//! gain/loss strength V_I^c; past it the eigenvalue pair breaks. Tracing
//! V_I^c against energy for several device lengths maps the breaking
//! manifold. This example traces the three standard lengths on a coarse
//! grid and verifies the phase actually flips across each traced point.

use ptscatter::phase::{manifold_point_flips, trace_ssb_manifold, MANIFOLD_DEFAULT_LENGTHS};
use ptscatter::scattering::PhysParams;

fn main() -> ptscatter::Result<()> {
    let p = PhysParams::default();
    let v_real = p.v_real;
    let e_grid: Vec<f64> = (1..=8).map(|i| v_real + 0.08 * i as f64).collect();

    let curves = trace_ssb_manifold(&MANIFOLD_DEFAULT_LENGTHS, v_real, &e_grid, &p)?;

    println!("critical gain V_I^c(E) at V_R = {v_real} eV:");
    print!("{:>8}", "E (eV)");
    for c in &curves {
        print!("  L = {:>4} um", c.length);
    }
    println!();
    for &e in &e_grid {
        print!("{:>8.3}", e);
        for c in &curves {
            match c.points.iter().find(|pt| pt.energy == e) {
                Some(pt) => print!("  {:>11.6}", pt.v_imag_critical),
                None => print!("  {:>11}", "-"),
            }
        }
        println!();
    }

    let mut flips = 0;
    let mut total = 0;
    let cfg = "L0MR0".parse()?;
    for c in &curves {
        for pt in &c.points {
            total += 1;
            if manifold_point_flips(pt, c.length, v_real, &p, cfg)? {
                flips += 1;
            }
        }
    }
    println!("\nphase flips symmetric -> broken across {flips}/{total} traced points (5% offsets in V_I);");
    println!("longer devices break at weaker gain: the curves order inversely with L.");
    Ok(())
}
