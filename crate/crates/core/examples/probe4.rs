//! Scratch single-plane dense layout probe (removed before release).

use vbnmr_core::backaction::*;
use vbnmr_core::constants::{gamma_e_from_g, Species};

fn plane_layout(depth: f64, spacing: f64, extent: f64) -> DefectLayout {
    // Triangular lattice in one plane at the given depth.
    let mut layout = DefectLayout::dense_stack(depth, spacing, 1, HBN_INTERLAYER, extent);
    for p in &mut layout.positions {
        p[2] = -depth;
    }
    layout
}

fn main() {
    let ge_vb = gamma_e_from_g(2.001);
    let gn = Species::H1.gamma();
    let opts = LatticeOptions::default();

    for depth in [1e-9f64, 2e-9, 5e-9] {
        let side = (4.0 * depth).max(4e-9);
        let extent = side / 2.0 + 10e-9 + 2.8e-9;
        let layout = plane_layout(depth, DENSE_VB_LATERAL_SPACING, extent);
        let lattice = SampleLattice::build(depth, 64e27, [0.0, 0.0], &opts).unwrap();
        let n = lattice.len();
        let mut shifts = Vec::with_capacity(n);
        let mut w_amp = Vec::with_capacity(n);
        let mut w_pow = Vec::with_capacity(n);
        for idx in 0..n {
            let pos = lattice.position(idx);
            let (s, wref) = site_values(&layout, 0, pos, ge_vb, gn);
            shifts.push(s);
            w_amp.push(wref.sqrt());
            w_pow.push(wref);
        }
        let s1 = spectrum_from_values(&shifts, &w_amp, 2001).unwrap();
        let s2 = spectrum_from_values(&shifts, &w_pow, 2001).unwrap();
        println!(
            "plane depth {:.0} nm ({} defects): amp fwhm = {:8.1} Hz mean = {:8.1} | pow fwhm = {:8.1} mean = {:8.1}",
            depth * 1e9,
            layout.positions.len(),
            s1.fwhm,
            s1.mean_shift,
            s2.fwhm,
            s2.mean_shift
        );
    }

    // Depth scan for the flatness check.
    let depths = [1e-9f64, 1.5e-9, 2.2e-9, 3.3e-9, 5e-9];
    let mut rows_amp = Vec::new();
    for &d in &depths {
        let side = (4.0 * d).max(4e-9);
        let extent = side / 2.0 + 10e-9 + 2.8e-9;
        let layout = plane_layout(d, DENSE_VB_LATERAL_SPACING, extent);
        let lattice = SampleLattice::build(d, 64e27, [0.0, 0.0], &opts).unwrap();
        let n = lattice.len();
        let mut shifts = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for idx in 0..n {
            let pos = lattice.position(idx);
            let (s, w) = site_values(&layout, 0, pos, ge_vb, gn);
            shifts.push(s);
            weights.push(w.sqrt());
        }
        let spec = spectrum_from_values(&shifts, &weights, 2001).unwrap();
        rows_amp.push((d * 1e9, spec.fwhm));
    }
    println!("depth scan (amp): {rows_amp:?}");
    let xs: Vec<f64> = rows_amp.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = rows_amp.iter().map(|r| r.1).collect();
    let fit = vbnmr_core::fit::fit_power_law(&xs, &ys).unwrap();
    println!("exponent = {:.2}", fit.exponent);
}
