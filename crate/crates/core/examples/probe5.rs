//! Scratch staggered-sublattice dense layout probe (removed before release).

use vbnmr_core::backaction::*;
use vbnmr_core::constants::{gamma_e_from_g, Species};

/// 10 layers, each a triangular sub-lattice at spacing a*sqrt(layers), with
/// deterministic per-layer lateral stagger. Projected density matches a
/// single triangular lattice at spacing a.
fn sublattice_layout(top_depth: f64, a: f64, layers: usize, interlayer: f64, extent: f64) -> DefectLayout {
    let al = a * (layers as f64).sqrt();
    let row_h = al * 3.0f64.sqrt() / 2.0;
    let jmax = (extent / row_h).ceil() as i64 + 1;
    let imax = (extent / al).ceil() as i64 + 1;
    let mut positions = vec![[0.0, 0.0, -top_depth]];
    for l in 0..layers {
        let z = -(top_depth + l as f64 * interlayer);
        // golden-ratio stagger so layers do not align
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
                if x * x + y * y > extent * extent {
                    continue;
                }
                positions.push([x, y, z]);
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

fn main() {
    let ge_vb = gamma_e_from_g(2.001);
    let gn = Species::H1.gamma();
    let opts = LatticeOptions::default();

    let depths = [1e-9f64, 1.5e-9, 2.2e-9, 3.3e-9, 5e-9];
    for bins in [2001usize, 8001] {
        let mut rows_amp: Vec<(f64, f64)> = Vec::new();
        for &d in &depths {
            let side = (4.0 * d).max(4e-9);
            let extent = side / 2.0 + 10e-9 + 2.8e-9;
            let layout = sublattice_layout(d, DENSE_VB_LATERAL_SPACING, 10, HBN_INTERLAYER, extent);
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
            let spec = spectrum_from_values(&shifts, &weights, bins).unwrap();
            println!(
                "bins {bins} depth {:.1} nm ({} defects): fwhm = {:8.1} Hz  mean = {:8.1} Hz  bin = {:.1} Hz",
                d * 1e9,
                layout.positions.len(),
                spec.fwhm,
                spec.mean_shift,
                spec.bin_width()
            );
            rows_amp.push((d * 1e9, spec.fwhm));
        }
        let xs: Vec<f64> = rows_amp.iter().map(|r| r.0).collect();
        let ys: Vec<f64> = rows_amp.iter().map(|r| r.1).collect();
        let fit = vbnmr_core::fit::fit_power_law(&xs, &ys).unwrap();
        println!("bins {bins}: exponent = {:.2}\n", fit.exponent);
    }
}
