//! Scratch dense construction decision matrix (removed before release).

use vbnmr_core::backaction::*;
use vbnmr_core::constants::{gamma_e_from_g, Species};

fn sublattice_layout(top_depth: f64, a: f64, layers: usize, interlayer: f64, extent: f64) -> DefectLayout {
    let al = a * (layers as f64).sqrt();
    let row_h = al * 3.0f64.sqrt() / 2.0;
    let jmax = (extent / row_h).ceil() as i64 + 1;
    let imax = (extent / al).ceil() as i64 + 1;
    let mut positions = vec![[0.0, 0.0, -top_depth]];
    for l in 0..layers {
        let z = -(top_depth + l as f64 * interlayer);
        let off_x = (l as f64 * 0.618_033_988_75).fract() * al;
        let off_y = (l as f64 * 0.381_966_011_25).fract() * row_h;
        for j in -jmax..=jmax {
            let y = j as f64 * row_h + off_y;
            let x_base = if j.rem_euclid(2) == 1 { 0.5 * al } else { 0.0 };
            for i in -imax..=imax {
                let x = i as f64 * al + x_base + off_x;
                if l == 0 && x == 0.0 && y == 0.0 {
                    continue;
                }
                if x * x + y * y <= extent * extent {
                    positions.push([x, y, z]);
                }
            }
        }
    }
    let n = positions.len();
    DefectLayout {
        positions,
        axes: vec![[0.0, 0.0, 1.0]; n],
        superposition_factor: 0.5,
        coupling_cutoff: 10e-9,
    }
}

fn plane_layout(depth: f64, spacing: f64, extent: f64) -> DefectLayout {
    let mut layout = DefectLayout::dense_stack(depth, spacing, 1, HBN_INTERLAYER, extent);
    for p in &mut layout.positions {
        p[2] = -depth;
    }
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
    let depths = [1e-9f64, 1.3e-9, 1.7e-9, 2.2e-9, 2.8e-9];
    for amp in [true, false] {
        for style in ["plane", "stack"] {
            let mut rows = Vec::new();
            for &d in &depths {
                let side = (4.0 * d).max(4e-9);
                let extent = side / 2.0 + 10e-9 + 2.8e-9;
                let layout = if style == "plane" {
                    plane_layout(d, DENSE_VB_LATERAL_SPACING, extent)
                } else {
                    sublattice_layout(d, DENSE_VB_LATERAL_SPACING, 10, HBN_INTERLAYER, extent)
                };
                let (fwhm, mean) = run(&layout, d, amp);
                rows.push((d * 1e9, fwhm, mean));
            }
            let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let fit = vbnmr_core::fit::fit_power_law(&xs, &ys).unwrap();
            println!(
                "{style} amp={amp}: exponent = {:+.2}  rows = {:?}",
                fit.exponent,
                rows.iter()
                    .map(|r| (r.0, r.1.round(), r.2.round()))
                    .collect::<Vec<_>>()
            );
        }
    }
}
