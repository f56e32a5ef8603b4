//! Scratch dense-ensemble detection probe (removed before release).

use vbnmr_core::backaction::*;
use vbnmr_core::constants::{gamma_e_from_g, Species};

fn main() {
    let ge_vb = gamma_e_from_g(2.001);
    let gn = Species::H1.gamma();
    let opts = LatticeOptions::default();
    let tmpl = LayoutTemplate::Dense {
        lateral_spacing: DENSE_VB_LATERAL_SPACING,
        layers: 10,
        interlayer: HBN_INTERLAYER,
    };

    for depth in [1e-9, 2e-9, 5e-9] {
        let layout = tmpl.at_depth(depth, &opts);
        let lattice = SampleLattice::build(depth, 64e27, [0.0, 0.0], &opts).unwrap();
        let n = lattice.len();
        let mut shifts = Vec::with_capacity(n);
        let mut w_ref_amp = Vec::with_capacity(n);
        let mut w_ens_pow = Vec::with_capacity(n);
        let mut w_ens_amp = Vec::with_capacity(n);
        for idx in 0..n {
            let pos = lattice.position(idx);
            let (s, wref) = site_values(&layout, 0, pos, ge_vb, gn);
            shifts.push(s);
            w_ref_amp.push(wref.sqrt());
            let mut total = 0.0;
            for (dp, ax) in layout.positions.iter().zip(&layout.axes) {
                // Only defects within the detection range matter; reuse the
                // cutoff for speed.
                let dx = pos[0] - dp[0];
                let dy = pos[1] - dp[1];
                let dz = pos[2] - dp[2];
                if dx * dx + dy * dy + dz * dz > 100e-18 {
                    continue;
                }
                total += detection_weight(*dp, *ax, pos, gn).unwrap();
            }
            w_ens_pow.push(total);
            w_ens_amp.push(total.sqrt());
        }
        let s1 = spectrum_from_values(&shifts, &w_ref_amp, 2001).unwrap();
        let s2 = spectrum_from_values(&shifts, &w_ens_pow, 2001).unwrap();
        let s3 = spectrum_from_values(&shifts, &w_ens_amp, 2001).unwrap();
        println!("depth {:.0} nm ({} defects):", depth * 1e9, layout.positions.len());
        println!("  ref-amp:  fwhm = {:8.1} Hz  mean = {:8.1} Hz  peak = {:8.1}", s1.fwhm, s1.mean_shift, s1.peak);
        println!("  ens-pow:  fwhm = {:8.1} Hz  mean = {:8.1} Hz  peak = {:8.1}", s2.fwhm, s2.mean_shift, s2.peak);
        println!("  ens-amp:  fwhm = {:8.1} Hz  mean = {:8.1} Hz  peak = {:8.1}", s3.fwhm, s3.mean_shift, s3.peak);
    }
}
