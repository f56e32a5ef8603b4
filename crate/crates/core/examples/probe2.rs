//! Scratch weighting-convention probe (removed before release).

use vbnmr_core::backaction::*;
use vbnmr_core::constants::{gamma_e_from_g, Species};
use vbnmr_core::geometry::magic_angle;

fn sweep(
    label: &str,
    layout: &DefectLayout,
    depth: f64,
    ge: f64,
    target: u64,
    power: f64,
) {
    let gn = Species::H1.gamma();
    let opts = LatticeOptions {
        target_sites: target,
        ..Default::default()
    };
    let lattice = SampleLattice::build(depth, 64e27, [0.0, 0.0], &opts).unwrap();
    let n = lattice.len();
    let mut shifts = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for idx in 0..n {
        let (s, w) = site_values(layout, 0, lattice.position(idx), ge, gn);
        shifts.push(s);
        weights.push(w.powf(power));
    }
    let spec = spectrum_from_values(&shifts, &weights, 2001).unwrap();
    println!(
        "  {label} (w^{power}): fwhm = {:.1} Hz  mean = {:.1} Hz",
        spec.fwhm, spec.mean_shift
    );
}

fn main() {
    let ge_nv = gamma_e_from_g(2.003);
    let ge_vb = gamma_e_from_g(2.001);
    let ma = magic_angle::<f64>();
    let nv_axis = [ma.sin(), 0.0, ma.cos()];

    for power in [1.0, 0.5] {
        println!("== weighting exponent {power} ==");
        sweep("NV d=1nm", &DefectLayout::single(1e-9, nv_axis), 1e-9, ge_nv, 1_000_000, power);
        sweep("NV d=5nm", &DefectLayout::single(5e-9, nv_axis), 5e-9, ge_nv, 1_000_000, power);
        sweep(
            "VB d=5nm",
            &DefectLayout::single(5e-9, [0.0, 0.0, 1.0]),
            5e-9,
            ge_vb,
            1_000_000,
            power,
        );
        let opts = LatticeOptions::default();
        let tmpl = LayoutTemplate::Dense {
            lateral_spacing: DENSE_VB_LATERAL_SPACING,
            layers: 10,
            interlayer: HBN_INTERLAYER,
        };
        sweep(
            "dense VB top=1nm",
            &tmpl.at_depth(1e-9, &opts),
            1e-9,
            ge_vb,
            1_000_000,
            power,
        );
        sweep(
            "dense VB top=5nm",
            &tmpl.at_depth(5e-9, &opts),
            5e-9,
            ge_vb,
            1_000_000,
            power,
        );
    }
}
