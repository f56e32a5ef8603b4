//! Monte Carlo dipolar back-action lineshapes.
//!
//! A sensor's electronic spin shifts the resonance frequency of every nearby
//! sample nuclear spin through the secular part of the dipolar coupling. The
//! model histograms the per-spin frequency shift over a deterministic sample
//! lattice, weighting each spin by the magnitude of its transverse dipolar
//! coupling to the reference defect (its amplitude in the detected signal).
//! A layout contains every defect within the influence radius of the sampled
//! region, so dense ensembles acquire the collective shift of the whole
//! defect patch. Squared couplings ([`detection_weight`]) summed over a
//! half-space reproduce the analytic B_rms of the statistical-polarization
//! model, which serves as a cross-check of the weighting.
//!
//! All reductions are chunk-ordered so results are bit-identical regardless
//! of thread count.

use rayon::prelude::*;

use crate::constants::{HBAR, MU0_OVER_4PI};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, PowerLawFit};
use crate::params::Host;
use crate::spectrum::Spectrum;

/// Sites per parallel work unit. Fixed so chunk boundaries (and therefore
/// merge order) do not depend on the thread count.
const CHUNK: usize = 1 << 16;

/// Published lateral inter-defect spacing of a dense 10-layer hBN ensemble
/// at 236 ppm (m).
pub const DENSE_VB_LATERAL_SPACING: f64 = 1.4e-9;

/// hBN interlayer spacing (m).
pub const HBN_INTERLAYER: f64 = 0.333e-9;

/// Positions and axes of the defect spins contributing back-action.
#[derive(Debug, Clone)]
pub struct DefectLayout {
    /// Defect positions (m); z <= 0 is below the surface.
    pub positions: Vec<[f64; 3]>,
    /// Unit quantization axes, one per defect.
    pub axes: Vec<[f64; 3]>,
    /// Expectation of S_z in the sensing state; 1/2 for the usual
    /// (|+1> + |0>)/sqrt(2) superposition, 0 for |0>, 1 for |+1>.
    pub superposition_factor: f64,
    /// Influence radius: defects farther than this from the sampled region
    /// contribute negligibly and are not instantiated by the layout
    /// builders. Also the default range cutoff of [`secular_shift`].
    pub coupling_cutoff: f64,
}

impl DefectLayout {
    /// Single defect at depth `d` below the surface with the given axis.
    pub fn single(depth: f64, axis: [f64; 3]) -> DefectLayout {
        DefectLayout {
            positions: vec![[0.0, 0.0, -depth]],
            axes: vec![normalize(axis)],
            superposition_factor: 0.5,
            coupling_cutoff: 10e-9,
        }
    }

    /// Dense ensemble: a triangular lattice of defects in the plane at
    /// `depth`, at the projected lateral spacing of the host's defect-
    /// bearing layer stack, out to `lateral_extent` from the reference
    /// defect (index 0) at the lateral origin.
    pub fn dense_plane(depth: f64, lateral_spacing: f64, lateral_extent: f64) -> DefectLayout {
        let a = lateral_spacing;
        let row_h = a * 3.0f64.sqrt() / 2.0;
        let jmax = (lateral_extent / row_h).ceil() as i64;
        let imax = (lateral_extent / a).ceil() as i64 + 1;
        let z = -depth;
        let mut positions = vec![[0.0, 0.0, z]];
        for j in -jmax..=jmax {
            let y = j as f64 * row_h;
            let x_off = if j.rem_euclid(2) == 1 { 0.5 * a } else { 0.0 };
            for i in -imax..=imax {
                let x = i as f64 * a + x_off;
                if i == 0 && j == 0 && x_off == 0.0 {
                    continue; // reference already placed
                }
                if x * x + y * y > lateral_extent * lateral_extent {
                    continue;
                }
                positions.push([x, y, z]);
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

    pub fn validate(&self) -> Result<()> {
        if self.positions.len() != self.axes.len() || self.positions.is_empty() {
            return Err(Error::validation("layout needs matching, non-empty positions and axes"));
        }
        for p in &self.positions {
            if p[2] > 0.0 {
                return Err(Error::validation("defect positions must satisfy z <= 0"));
            }
        }
        for a in &self.axes {
            let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::validation("defect axes must be unit vectors (1e-12)"));
            }
        }
        if !(0.0..=1.0).contains(&self.superposition_factor) {
            return Err(Error::validation("superposition factor must lie in [0, 1]"));
        }
        if !(self.coupling_cutoff > 0.0) {
            return Err(Error::validation("coupling cutoff must be > 0"));
        }
        Ok(())
    }
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Options controlling lattice construction.
#[derive(Debug, Clone)]
pub struct LatticeOptions {
    /// Region side as a multiple of the defect depth.
    pub side_factor: f64,
    /// Smallest allowed region side (m), so shallow defects still sample
    /// enough spins.
    pub min_side: f64,
    /// The base spacing rho^(-1/3) is refined until at least this many sites
    /// fill the region (fractional spins per site keep the density exact).
    pub target_sites: u64,
    /// Hard cap on the site count.
    pub max_sites: u64,
    /// Seeded uniform jitter of half a spacing per axis; None disables it.
    pub jitter_seed: Option<u64>,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            side_factor: 4.0,
            min_side: 4e-9,
            target_sites: 1_000_000,
            max_sites: 30_000_000,
            jitter_seed: None,
        }
    }
}

/// Deterministic sample lattice: spins on a simple-cubic grid filling a box
/// above the surface, laterally centered on the reference defect.
#[derive(Debug, Clone)]
pub struct SampleLattice {
    nx: usize,
    ny: usize,
    nz: usize,
    spacing: f64,
    half_lx: f64,
    half_ly: f64,
    center: [f64; 2],
    /// Spins represented by one site (cell volume times density).
    site_weight: f64,
    jitter_seed: Option<u64>,
}

impl SampleLattice {
    /// Build the lattice for a sensor at `depth` and sample density
    /// `density` (spins/m³).
    pub fn build(depth: f64, density: f64, center: [f64; 2], opts: &LatticeOptions) -> Result<SampleLattice> {
        if !(depth > 0.0) || !(density > 0.0) {
            return Err(Error::invalid("lattice needs positive depth and density"));
        }
        let side = (opts.side_factor * depth).max(opts.min_side);
        let a0 = density.powf(-1.0 / 3.0);
        let raw = (side / a0).max(1.0).powi(3);
        let mut oversample = (opts.target_sites as f64 / raw).cbrt().max(1.0);
        let cap = (opts.max_sites as f64 / raw).cbrt();
        if cap < 1.0 {
            return Err(Error::invalid(format!(
                "lattice of {} sites exceeds the maximum of {}",
                raw as u64, opts.max_sites
            )));
        }
        oversample = oversample.min(cap);
        let a = a0 / oversample;
        let n_side = (side / a).round().max(1.0) as usize;
        let lattice = SampleLattice {
            nx: n_side,
            ny: n_side,
            nz: n_side,
            spacing: a,
            half_lx: n_side as f64 * a / 2.0,
            half_ly: n_side as f64 * a / 2.0,
            center: [center[0], center[1]],
            site_weight: a * a * a * density,
            jitter_seed: opts.jitter_seed,
        };
        if lattice.len() as u64 > opts.max_sites {
            return Err(Error::invalid("lattice exceeds the configured site maximum"));
        }
        Ok(lattice)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Spins represented by one site.
    pub fn site_weight(&self) -> f64 {
        self.site_weight
    }

    /// Position of site `idx` (m); z > 0 above the surface.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let k = idx % self.nz;
        let j = (idx / self.nz) % self.ny;
        let i = idx / (self.nz * self.ny);
        let mut x = (i as f64 + 0.5) * self.spacing - self.half_lx + self.center[0];
        let mut y = (j as f64 + 0.5) * self.spacing - self.half_ly + self.center[1];
        let mut z = (k as f64 + 0.5) * self.spacing;
        if let Some(seed) = self.jitter_seed {
            let [dx, dy, dz] = jitter3(seed, idx as u64, self.spacing);
            x += dx;
            y += dy;
            // Keep jittered sites above the surface.
            z = (z + dz).abs().max(1e-12);
        }
        [x, y, z]
    }
}

/// Three uniform offsets in (-spacing/2, spacing/2), decided entirely by
/// (seed, site index) so they survive any parallel schedule.
fn jitter3(seed: u64, idx: u64, spacing: f64) -> [f64; 3] {
    let mut state = seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut next = || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z = z ^ (z >> 31);
        ((z >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * spacing
    };
    [next(), next(), next()]
}

/// Secular (z-z) dipolar frequency shift (Hz) of a nuclear spin at
/// `spin_pos` from a defect electronic spin at `defect_pos`:
///
/// `factor * (mu0/4pi) gamma_e gamma_n hbar (1 - 3 cos^2 theta) / (2 pi r^3)`
///
/// with `theta` the angle between the connecting vector and the defect axis.
/// Returns 0 beyond `cutoff` (pass infinity to disable).
pub fn secular_shift(
    defect_pos: [f64; 3],
    defect_axis: [f64; 3],
    spin_pos: [f64; 3],
    gamma_e: f64,
    gamma_n: f64,
    factor: f64,
    cutoff: f64,
) -> Result<f64> {
    let dx = spin_pos[0] - defect_pos[0];
    let dy = spin_pos[1] - defect_pos[1];
    let dz = spin_pos[2] - defect_pos[2];
    let r2 = dx * dx + dy * dy + dz * dz;
    if r2 == 0.0 {
        return Err(Error::invalid("spin coincides with defect"));
    }
    if r2 > cutoff * cutoff {
        return Ok(0.0);
    }
    let r = r2.sqrt();
    let c = (dx * defect_axis[0] + dy * defect_axis[1] + dz * defect_axis[2]) / r;
    let k = MU0_OVER_4PI * gamma_e * gamma_n * HBAR / (2.0 * std::f64::consts::PI * r2 * r);
    Ok(factor * k * (1.0 - 3.0 * c * c))
}

/// Squared transverse dipolar coupling of a spin to the reference defect
/// (T², per statistically polarized spin-1/2): the spin's contribution to
/// the mean-square signal field at the defect. Summing over a half-space at
/// density rho reproduces the closed-form B_rms².
pub fn detection_weight(
    defect_pos: [f64; 3],
    defect_axis: [f64; 3],
    spin_pos: [f64; 3],
    gamma_n: f64,
) -> Result<f64> {
    let dx = spin_pos[0] - defect_pos[0];
    let dy = spin_pos[1] - defect_pos[1];
    let dz = spin_pos[2] - defect_pos[2];
    let r2 = dx * dx + dy * dy + dz * dz;
    if r2 == 0.0 {
        return Err(Error::invalid("spin coincides with defect"));
    }
    let c2 = {
        let c = dx * defect_axis[0] + dy * defect_axis[1] + dz * defect_axis[2];
        c * c / r2
    };
    let dip = MU0_OVER_4PI * HBAR * gamma_n;
    // 9 c^2 (1 - c^2) is the transverse-projection factor; the leading 1/4
    // carries the spin-1/2 statistical moment and time average.
    Ok(dip * dip * 0.25 * 9.0 * c2 * (1.0 - c2) / (r2 * r2 * r2))
}

/// Per-site (total shift, detection amplitude) for a lattice position.
///
/// The shift sums every defect in the layout (the layout itself extends to
/// the influence radius of the sampled region). The detection amplitude is
/// the magnitude of the spin's transverse coupling to the reference defect,
/// the square root of [`detection_weight`].
pub fn site_values(
    layout: &DefectLayout,
    reference: usize,
    spin_pos: [f64; 3],
    gamma_e: f64,
    gamma_n: f64,
) -> (f64, f64) {
    let mut shift = 0.0;
    for (pos, axis) in layout.positions.iter().zip(&layout.axes) {
        shift += secular_shift(
            *pos,
            *axis,
            spin_pos,
            gamma_e,
            gamma_n,
            layout.superposition_factor,
            f64::INFINITY,
        )
        .expect("lattice sites sit above the surface, defects below");
    }
    let weight = detection_weight(
        layout.positions[reference],
        layout.axes[reference],
        spin_pos,
        gamma_n,
    )
    .expect("distinct positions")
    .sqrt();
    (shift, weight)
}

/// Deterministic weighted histogram of shift values.
///
/// The grid spans +-5x the 99th percentile of |shift| with `bins` bins;
/// out-of-range values accumulate in the edge bins.
pub fn spectrum_from_values(shifts: &[f64], weights: &[f64], bins: usize) -> Result<Spectrum> {
    if shifts.is_empty() || shifts.len() != weights.len() {
        return Err(Error::invalid("matching non-empty shifts and weights required"));
    }
    if bins < 3 {
        return Err(Error::invalid("need at least 3 bins"));
    }
    let range = histogram_range(shifts);
    let mut raw = vec![0.0f64; bins];
    for (&s, &w) in shifts.iter().zip(weights) {
        raw[bin_index(s, range, bins)] += w;
    }
    Spectrum::from_bins(bin_centers(range, bins), raw)
}

fn histogram_range(shifts: &[f64]) -> f64 {
    let mut abs: Vec<f64> = shifts.iter().map(|s| s.abs()).collect();
    let idx = ((abs.len() as f64 * 0.99).ceil() as usize).clamp(1, abs.len()) - 1;
    let (_, p99, _) = abs.select_nth_unstable_by(idx, |a, b| a.partial_cmp(b).unwrap());
    let range = 5.0 * *p99;
    if range > 0.0 {
        range
    } else {
        1.0
    }
}

fn bin_index(shift: f64, range: f64, bins: usize) -> usize {
    let width = 2.0 * range / bins as f64;
    let idx = ((shift + range) / width).floor();
    (idx.max(0.0) as usize).min(bins - 1)
}

fn bin_centers(range: f64, bins: usize) -> Vec<f64> {
    let width = 2.0 * range / bins as f64;
    (0..bins)
        .map(|i| -range + (i as f64 + 0.5) * width)
        .collect()
}

/// Detection-weighted back-action spectrum of a defect layout.
///
/// Shift evaluation is data-parallel over fixed-size site chunks; partial
/// histograms merge in chunk order, so the spectrum is bit-identical for
/// any thread count.
pub fn lineshape(
    layout: &DefectLayout,
    lattice: &SampleLattice,
    reference: usize,
    gamma_e: f64,
    gamma_n: f64,
    bins: usize,
) -> Result<Spectrum> {
    layout.validate()?;
    if reference >= layout.positions.len() {
        return Err(Error::invalid("reference defect index out of range"));
    }
    if lattice.is_empty() {
        return Err(Error::invalid("empty lattice"));
    }
    if bins < 3 {
        return Err(Error::invalid("need at least 3 bins"));
    }
    let n = lattice.len();
    let n_chunks = n.div_ceil(CHUNK);

    let shifts: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            (lo..hi).map(move |idx| {
                site_values(layout, reference, lattice.position(idx), gamma_e, gamma_n).0
            })
        })
        .collect();

    let range = histogram_range(&shifts);
    let partials: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            let mut hist = vec![0.0f64; bins];
            for idx in lo..hi {
                let w = detection_weight(
                    layout.positions[reference],
                    layout.axes[reference],
                    lattice.position(idx),
                    gamma_n,
                )
                .expect("distinct positions")
                .sqrt();
                hist[bin_index(shifts[idx], range, bins)] += w;
            }
            hist
        })
        .collect();

    let mut raw = vec![0.0f64; bins];
    for hist in partials {
        for (acc, v) in raw.iter_mut().zip(hist) {
            *acc += v;
        }
    }
    Spectrum::from_bins(bin_centers(range, bins), raw)
}

/// Monte Carlo B_rms (T): square root of the detection-weight sum over the
/// lattice, scaled by the spins each site represents.
pub fn b_rms_monte_carlo(
    defect_pos: [f64; 3],
    defect_axis: [f64; 3],
    lattice: &SampleLattice,
    gamma_n: f64,
) -> f64 {
    let n = lattice.len();
    let n_chunks = n.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            let mut acc = 0.0;
            for idx in lo..hi {
                acc += detection_weight(defect_pos, defect_axis, lattice.position(idx), gamma_n)
                    .expect("distinct positions");
            }
            acc
        })
        .collect();
    (partial.into_iter().sum::<f64>() * lattice.site_weight()).sqrt()
}

/// Layout template for depth scans.
#[derive(Debug, Clone)]
pub enum LayoutTemplate {
    /// One defect with the given quantization axis.
    Single { axis: [f64; 3] },
    /// Dense plane ensemble (see [`DefectLayout::dense_plane`]).
    Dense { lateral_spacing: f64 },
}

impl LayoutTemplate {
    /// Instantiate the template at a given depth, sized so that every defect
    /// within the influence radius of the sampled box is present.
    pub fn at_depth(&self, depth: f64, opts: &LatticeOptions) -> DefectLayout {
        match self {
            LayoutTemplate::Single { axis } => DefectLayout::single(depth, *axis),
            LayoutTemplate::Dense { lateral_spacing } => {
                let side = (opts.side_factor * depth).max(opts.min_side);
                let half_diagonal = side * 0.5 * 2.0f64.sqrt();
                let extent = half_diagonal + 10e-9;
                DefectLayout::dense_plane(depth, *lateral_spacing, extent)
            }
        }
    }
}

/// Result of a linewidth-versus-depth scan.
#[derive(Debug, Clone)]
pub struct DepthScan {
    /// (depth m, FWHM Hz, mean shift Hz) per depth.
    pub rows: Vec<(f64, f64, f64)>,
    /// Power-law fit of FWHM against depth.
    pub fit: PowerLawFit<f64>,
}

/// Sweep the sensor depth, extract each lineshape's FWHM, and fit
/// `FWHM ~ depth^exponent` on a log-log scale.
pub fn linewidth_vs_depth(
    template: &LayoutTemplate,
    depths: &[f64],
    density: f64,
    gamma_e: f64,
    gamma_n: f64,
    bins: usize,
    opts: &LatticeOptions,
) -> Result<DepthScan> {
    if depths.len() < 3 {
        return Err(Error::invalid("depth scan needs at least 3 depths"));
    }
    if depths.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::invalid("depths must be positive"));
    }
    let mut rows = Vec::with_capacity(depths.len());
    for &d in depths {
        let layout = template.at_depth(d, opts);
        let lattice = SampleLattice::build(d, density, [0.0, 0.0], opts)?;
        let spec = lineshape(&layout, &lattice, 0, gamma_e, gamma_n, bins)?;
        rows.push((d, spec.fwhm, spec.mean_shift));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fit = fit_power_law(&xs, &ys)?;
    Ok(DepthScan { rows, fit })
}

/// Layered host geometry for areal-density conversions.
#[derive(Debug, Clone, Copy)]
pub struct LayerGeometry {
    pub host: Host,
    /// Thickness of the defect-bearing layer (m).
    pub thickness: f64,
}

impl LayerGeometry {
    /// A stack of hBN monolayers.
    pub fn hbn_layers(layers: usize) -> LayerGeometry {
        LayerGeometry {
            host: Host::Hbn,
            thickness: layers as f64 * HBN_INTERLAYER,
        }
    }
}

/// Mean lateral spacing between defects implied by the areal density of a
/// layered host: the 2D Poisson mean nearest-neighbor distance
/// `0.5 / sqrt(sigma)` with `sigma = rho_volumetric * thickness`.
pub fn nv_lateral_spacing(density_ppm: f64, geometry: LayerGeometry) -> Result<f64> {
    if !(density_ppm > 0.0) {
        return Err(Error::invalid("density must be positive"));
    }
    let sigma = crate::params::ppm_to_density(density_ppm, geometry.host) * geometry.thickness;
    Ok(0.5 / sigma.sqrt())
}
