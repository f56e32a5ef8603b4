//! Scratch no-pair-cutoff dense probe (removed before release).

use vbnmr_core::backaction::*;
use vbnmr_core::constants::{gamma_e_from_g, Species};

fn plane_layout(depth: f64, spacing: f64, extent: f64, cutoff: f64) -> DefectLayout {
    let mut layout = DefectLayout::dense_stack(depth, spacing, 1, HBN_INTERLAYER, extent);
    for p in &mut layout.positions {
        p[2] = -depth;
    }
    layout.coupling_cutoff = cutoff;
    layout
}

fn run(layout: &DefectLayout, depth: f64, amp: bool) -> (f64, f64) {
    let ge_vb = gamma_e_from_g(2.001);
    let gn = Species::H1.gamma();
    let opts = LatticeOptions::default();
    let lattice = SampleLattice::build(depth, 64e27, [0.0, 0.0], &opts).unwrap();
    let n = lattice.len();
    let mut shifts = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for idx in 0..n {
        let pos = lattice.position(idx);
        let (s, w) = site_values(layout, 0, pos, ge_vb, gn);
        shifts.push(s);
        weights.push(if amp { w.sqrt() } else { w });
    }
    let spec = spectrum_from_values(&shifts, &weights, 2001).unwrap();
    (spec.fwhm, spec.mean_shift)
}

fn main() {
    let depths = [1e-9f64, 1.3e-9, 1.7e-9, 2.2e-9, 2.8e-9, 4e-9, 5e-9];
    for amp in [true, false] {
        let mut rows = Vec::new();
        for &d in &depths {
            let side = (4.0 * d).max(4e-9);
            let extent = side * 0.5 * 1.415 + 10e-9; // box half-diagonal + detection range
            let layout = plane_layout(d, DENSE_VB_LATERAL_SPACING, extent, f64::INFINITY);
            let (fwhm, mean) = run(&layout, d, amp);
            rows.push((d * 1e9, fwhm.round(), mean.round()));
        }
        let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let fit = vbnmr_core::fit::fit_power_law(&xs, &ys).unwrap();
        println!("plane nocut amp={amp}: exp = {:+.2}  rows = {rows:?}", fit.exponent);
    }
}
