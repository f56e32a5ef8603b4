//! Scratch convergence probe (removed before release).

use vbnmr_core::backaction::*;
use vbnmr_core::constants::{gamma_e_from_g, Species};
use vbnmr_core::geometry::magic_angle;

fn main() {
    let ge_nv = gamma_e_from_g(2.003);
    let ge_vb = gamma_e_from_g(2.001);
    let gn = Species::H1.gamma();
    let density = 64e27;
    let ma = magic_angle::<f64>();
    let nv_axis = [ma.sin(), 0.0, ma.cos()];

    println!("== single NV d=1nm, FWHM vs target sites ==");
    for target in [100_000u64, 400_000, 1_000_000, 4_000_000, 10_000_000] {
        let opts = LatticeOptions {
            target_sites: target,
            jitter_seed: None,
            ..Default::default()
        };
        let layout = DefectLayout::single(1e-9, nv_axis);
        let lattice = SampleLattice::build(1e-9, density, [0.0, 0.0], &opts).unwrap();
        let spec = lineshape(&layout, &lattice, 0, ge_nv, gn, 2001).unwrap();
        println!(
            "  target {:>9} sites {:>9}: fwhm = {:.1} Hz  mean = {:.1} Hz  peak = {:.1}",
            target,
            lattice.len(),
            spec.fwhm,
            spec.mean_shift,
            spec.peak
        );
    }

    println!("== single NV d=5nm ==");
    for target in [400_000u64, 1_000_000, 4_000_000] {
        let opts = LatticeOptions {
            target_sites: target,
            ..Default::default()
        };
        let layout = DefectLayout::single(5e-9, nv_axis);
        let lattice = SampleLattice::build(5e-9, density, [0.0, 0.0], &opts).unwrap();
        let spec = lineshape(&layout, &lattice, 0, ge_nv, gn, 2001).unwrap();
        println!(
            "  target {:>9} sites {:>9}: fwhm = {:.2} Hz  mean = {:.2} Hz",
            target,
            lattice.len(),
            spec.fwhm,
            spec.mean_shift
        );
    }

    println!("== single VB d=5nm ==");
    for target in [1_000_000u64] {
        let opts = LatticeOptions {
            target_sites: target,
            ..Default::default()
        };
        let layout = DefectLayout::single(5e-9, [0.0, 0.0, 1.0]);
        let lattice = SampleLattice::build(5e-9, density, [0.0, 0.0], &opts).unwrap();
        let spec = lineshape(&layout, &lattice, 0, ge_vb, gn, 2001).unwrap();
        println!(
            "  target {:>9} sites {:>9}: fwhm = {:.2} Hz  mean = {:.2} Hz",
            target,
            lattice.len(),
            spec.fwhm,
            spec.mean_shift
        );
    }

    println!("== single VB d=1nm ==");
    let opts = LatticeOptions {
        target_sites: 1_000_000,
        ..Default::default()
    };
    let layout = DefectLayout::single(1e-9, [0.0, 0.0, 1.0]);
    let lattice = SampleLattice::build(1e-9, density, [0.0, 0.0], &opts).unwrap();
    let spec = lineshape(&layout, &lattice, 0, ge_vb, gn, 2001).unwrap();
    println!("  fwhm = {:.1} Hz mean = {:.1}", spec.fwhm, spec.mean_shift);

    println!("== dense VB stack top=1nm ==");
    for target in [400_000u64, 1_000_000] {
        let opts = LatticeOptions {
            target_sites: target,
            ..Default::default()
        };
        let tmpl = LayoutTemplate::Dense {
            lateral_spacing: DENSE_VB_LATERAL_SPACING,
            layers: 10,
            interlayer: HBN_INTERLAYER,
        };
        let layout = tmpl.at_depth(1e-9, &opts);
        let lattice = SampleLattice::build(1e-9, density, [0.0, 0.0], &opts).unwrap();
        let spec = lineshape(&layout, &lattice, 0, ge_vb, gn, 2001).unwrap();
        println!(
            "  target {:>9} defects {:>6}: fwhm = {:.1} Hz  mean = {:.1} Hz",
            target,
            layout.positions.len(),
            spec.fwhm,
            spec.mean_shift
        );
    }

    println!("== depth scans ==");
    let opts = LatticeOptions {
        target_sites: 400_000,
        ..Default::default()
    };
    let depths = [1e-9, 1.5e-9, 2.2e-9, 3.3e-9, 5e-9];
    for (label, tmpl, ge) in [
        ("single NV", LayoutTemplate::Single { axis: nv_axis }, ge_nv),
        ("single VB", LayoutTemplate::Single { axis: [0.0, 0.0, 1.0] }, ge_vb),
        (
            "dense VB",
            LayoutTemplate::Dense {
                lateral_spacing: DENSE_VB_LATERAL_SPACING,
                layers: 10,
                interlayer: HBN_INTERLAYER,
            },
            ge_vb,
        ),
    ] {
        let scan = linewidth_vs_depth(&tmpl, &depths, density, ge, gn, 2001, &opts).unwrap();
        println!(
            "  {label}: exponent = {:.2} r2 = {:.3} rows: {:?}",
            scan.fit.exponent,
            scan.fit.r_squared,
            scan.rows
                .iter()
                .map(|r| (r.0 * 1e9, r.1))
                .collect::<Vec<_>>()
        );
    }
}
