//! Statistical-polarization signal amplitude and measurement SNR.
//!
//! A statistically polarized spin bath of density `rho` above the surface
//! produces an rms field at a defect of depth `d`
//!
//! ```text
//! B_rms^2 = rho (mu0 hbar gamma_n / 4 pi)^2 (pi G(alpha) / (128 d^3))
//! ```
//!
//! Setting `B_rms = SNR * eta` gives the half-space SNR; thin-layer and
//! depth-averaged variants replace the `1/d^3` kernel. Negative geometry
//! factors are folded in as `|G|` (the sign is a detection phase, not a
//! sensitivity loss) with a diagnostic flag.

use crate::constants::{HBAR, MU0_OVER_4PI};
use crate::error::{Error, Result};
use crate::geometry::g_statistical;
use crate::params::{DefectSystemParams, SampleGeometry, SampleSpec};
use crate::sensitivity::{sweep_sensitivity, SensitivityPoint};

/// Inputs for one SNR evaluation.
#[derive(Debug, Clone)]
pub struct SnrInput {
    pub sample: SampleSpec,
    /// Sensor depth (m); for bulk averaging this is the shallow edge.
    pub depth: f64,
    /// Defect axis angle from the surface normal (rad).
    pub alpha: f64,
    /// Sensitivity at the target frequency (T Hz^-1/2).
    pub eta: f64,
    /// Averaging time (s).
    pub averaging_time: f64,
}

impl SnrInput {
    pub fn validate(&self) -> Result<()> {
        if !(self.depth > 0.0) {
            return Err(Error::invalid("depth must be > 0"));
        }
        if !(self.eta > 0.0) {
            return Err(Error::invalid("eta must be > 0"));
        }
        if !(self.averaging_time > 0.0) {
            return Err(Error::invalid("averaging_time must be > 0"));
        }
        self.sample.validate()
    }
}

/// Root-mean-square statistical-polarization field at a defect below a
/// half-space sample (T).
pub fn b_rms(sample: &SampleSpec, depth: f64, alpha: f64) -> Result<f64> {
    if !(depth > 0.0) {
        return Err(Error::invalid("depth must be > 0"));
    }
    sample.validate()?;
    let g = g_statistical(alpha).abs();
    let dipole = MU0_OVER_4PI * HBAR * sample.species.gamma();
    let b2 = sample.density * dipole * dipole * std::f64::consts::PI * g / (128.0 * depth.powi(3));
    Ok(b2.sqrt())
}

fn snr_prefactor(input: &SnrInput) -> f64 {
    let gamma_n = input.sample.species.gamma();
    let mu = MU0_OVER_4PI * 4.0 * std::f64::consts::PI; // mu0
    mu * HBAR * gamma_n / (32.0 * input.eta) * (input.averaging_time / 1.0).sqrt()
}

/// Half-space SNR: `(mu0 hbar gamma_n / 32 eta) sqrt(G rho / (2 pi d^3))`,
/// scaled by `sqrt(averaging_time / 1 s)`.
pub fn snr_halfspace(input: &SnrInput) -> Result<f64> {
    input.validate()?;
    let g = g_statistical(input.alpha).abs();
    let kernel = g * input.sample.density / (2.0 * std::f64::consts::PI * input.depth.powi(3));
    Ok(snr_prefactor(input) * kernel.sqrt())
}

/// Thin-layer SNR: the half-space kernel with
/// `1/d^3 -> 1/d^3 - 1/(d + h)^3`.
pub fn snr_flake(input: &SnrInput, h: f64) -> Result<f64> {
    input.validate()?;
    if !(h > 0.0) {
        return Err(Error::invalid("layer thickness must be > 0"));
    }
    let g = g_statistical(input.alpha).abs();
    let d = input.depth;
    let kernel = g * input.sample.density / (2.0 * std::f64::consts::PI)
        * (1.0 / d.powi(3) - 1.0 / (d + h).powi(3));
    Ok(snr_prefactor(input) * kernel.sqrt())
}

/// Depth-averaged SNR over a uniform sensor layer `[d_min, d_max]`:
/// closed form of the average of [`snr_halfspace`] over depth.
pub fn snr_bulk(input: &SnrInput, d_min: f64, d_max: f64) -> Result<f64> {
    input.validate()?;
    if !(d_min > 0.0 && d_min < d_max) {
        return Err(Error::invalid("bulk average requires 0 < d_min < d_max"));
    }
    let g = g_statistical(input.alpha).abs();
    let gamma_n = input.sample.species.gamma();
    let mu = MU0_OVER_4PI * 4.0 * std::f64::consts::PI;
    let num = mu * HBAR * gamma_n * (1.0 / d_min.sqrt() - 1.0 / d_max.sqrt())
        * (input.sample.density * g).sqrt();
    let den = 16.0 * (2.0 * std::f64::consts::PI).sqrt() * input.eta * (d_max - d_min);
    Ok(num / den * (input.averaging_time / 1.0).sqrt())
}

/// Depth-averaged thin-layer SNR: third-order small-thickness expansion of
/// the average of [`snr_flake`] over `[d_min, d_max]`.
///
/// Returns the value and a flag that is set when `h > d_min / 5`, outside
/// the validity of the expansion.
pub fn snr_flake_bulk(input: &SnrInput, d_min: f64, d_max: f64, h: f64) -> Result<(f64, bool)> {
    input.validate()?;
    if !(d_min > 0.0 && d_min < d_max) {
        return Err(Error::invalid("bulk average requires 0 < d_min < d_max"));
    }
    if !(h > 0.0) {
        return Err(Error::invalid("layer thickness must be > 0"));
    }
    let thin_limit_exceeded = h > d_min / 5.0;
    let g = g_statistical(input.alpha).abs();
    let gamma_n = input.sample.species.gamma();
    let mu = MU0_OVER_4PI * 4.0 * std::f64::consts::PI;
    let pre = mu * HBAR * gamma_n * (input.sample.density * g).sqrt()
        / (192.0 * (6.0 * std::f64::consts::PI).sqrt() * input.eta * (d_max - d_min));
    let term = |d: f64, sign: f64| {
        (h / d.powi(4)).sqrt() * (sign * 9.0 * h * d - sign * 18.0 * d * d - sign * 7.0 * h * h) / d
    };
    let value = pre * (term(d_max, 1.0) + term(d_min, -1.0)) * (input.averaging_time / 1.0).sqrt();
    Ok((value, thin_limit_exceeded))
}

/// One row of an SNR-versus-frequency sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrRow {
    pub frequency: f64,
    /// Volume-normalized sensitivity at this frequency.
    pub eta: Option<f64>,
    /// Half-space rms field at the representative depth (T).
    pub b_rms: f64,
    pub snr: Option<f64>,
    pub geometry: &'static str,
    pub depth: f64,
}

/// SNR sweep over a frequency grid.
///
/// The sensitivity module supplies `eta(f)`; the sample geometry selects the
/// SNR kernel. The standoff distance equals the defect depth (the shallow
/// edge of the layer for bulk systems).
pub fn sweep_snr(
    params: &DefectSystemParams,
    sample: &SampleSpec,
    f_grid: &[f64],
) -> Result<Vec<SnrRow>> {
    let sens = sweep_sensitivity(params, f_grid)?;
    sweep_snr_with(params, sample, &sens)
}

/// SNR sweep reusing an existing sensitivity sweep.
pub fn sweep_snr_with(
    params: &DefectSystemParams,
    sample: &SampleSpec,
    sens: &[SensitivityPoint],
) -> Result<Vec<SnrRow>> {
    let depth = params.depth_min;
    let bulk_layer = params.depth_max > params.depth_min;
    let b = b_rms(sample, depth, params.alpha)?;
    sens.iter()
        .map(|pt| {
            let (geometry, snr) = match (pt.eta_vol, &sample.geometry) {
                (None, g) => (geometry_name(g, bulk_layer), None),
                (Some(eta), geom) => {
                    let input = SnrInput {
                        sample: sample.clone(),
                        depth,
                        alpha: params.alpha,
                        eta,
                        averaging_time: 1.0,
                    };
                    let value = match (geom, bulk_layer) {
                        (SampleGeometry::HalfSpace, false) => snr_halfspace(&input)?,
                        (SampleGeometry::HalfSpace, true) => {
                            snr_bulk(&input, params.depth_min, params.depth_max)?
                        }
                        (SampleGeometry::Slab { thickness }, false) => {
                            snr_flake(&input, *thickness)?
                        }
                        (SampleGeometry::Slab { thickness }, true) => {
                            snr_flake_bulk(&input, params.depth_min, params.depth_max, *thickness)?.0
                        }
                        (
                            SampleGeometry::BulkAverage {
                                d_min,
                                d_max,
                                slab_thickness,
                            },
                            _,
                        ) => match slab_thickness {
                            None => snr_bulk(&input, *d_min, *d_max)?,
                            Some(h) => snr_flake_bulk(&input, *d_min, *d_max, *h)?.0,
                        },
                    };
                    (geometry_name(geom, bulk_layer), Some(value))
                }
            };
            Ok(SnrRow {
                frequency: pt.frequency,
                eta: pt.eta_vol,
                b_rms: b,
                snr,
                geometry,
                depth,
            })
        })
        .collect()
}

fn geometry_name(g: &SampleGeometry, bulk_layer: bool) -> &'static str {
    match (g, bulk_layer) {
        (SampleGeometry::HalfSpace, false) => "half_space",
        (SampleGeometry::HalfSpace, true) => "half_space_bulk_avg",
        (SampleGeometry::Slab { .. }, false) => "slab",
        (SampleGeometry::Slab { .. }, true) => "slab_bulk_avg",
        (SampleGeometry::BulkAverage { .. }, _) => "bulk_avg",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::Species;
    use approx::assert_relative_eq;

    fn proton_halfspace() -> SampleSpec {
        SampleSpec {
            species: Species::H1,
            density: 64e27,
            geometry: SampleGeometry::HalfSpace,
            diffusion_coeff: 0.0,
            t2n_intrinsic: f64::INFINITY,
            bias_field: 0.0197,
        }
    }

    fn input(depth: f64, alpha: f64, eta: f64) -> SnrInput {
        SnrInput {
            sample: proton_halfspace(),
            depth,
            alpha,
            eta,
            averaging_time: 1.0,
        }
    }

    #[test]
    fn b_rms_dense_proton_reference_value() {
        // rho = 64 nm^-3, d = 2.5 nm, alpha = 0.
        let b = b_rms(&proton_halfspace(), 2.5e-9, 0.0).unwrap();
        assert_relative_eq!(b, 2.530_060_385_303_4e-6, max_relative = 1e-12);
        // The published rounded value is 2.53 uT.
        assert_relative_eq!(b, 2.53e-6, max_relative = 1e-3);
    }

    #[test]
    fn b_rms_depth_scaling() {
        let s = proton_halfspace();
        let b1 = b_rms(&s, 2.5e-9, 0.0).unwrap();
        let b2 = b_rms(&s, 5.0e-9, 0.0).unwrap();
        assert_relative_eq!(b1 / b2, 2.0f64.powf(1.5), max_relative = 1e-12);
    }

    #[test]
    fn b_rms_vanishes_with_density() {
        let mut s = proton_halfspace();
        s.density = 1e-30;
        let b = b_rms(&s, 2.5e-9, 0.0).unwrap();
        assert!(b < 1e-20);
    }

    #[test]
    fn snr_equals_b_rms_over_eta() {
        // Algebraic identity between the field and SNR closed forms.
        for depth in [1e-9, 2.5e-9, 6e-9, 1e-8, 1e-7] {
            for alpha in [0.0, 0.4, crate::geometry::magic_angle()] {
                for eta in [1e-9, 3.3e-8, 1e-6] {
                    let i = input(depth, alpha, eta);
                    let lhs = snr_halfspace(&i).unwrap();
                    let rhs = b_rms(&i.sample, depth, alpha).unwrap() / eta;
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn snr_inverse_in_eta_and_sqrt_in_time() {
        let a = snr_halfspace(&input(2.5e-9, 0.0, 1e-8)).unwrap();
        let b = snr_halfspace(&input(2.5e-9, 0.0, 2e-8)).unwrap();
        assert_relative_eq!(a / b, 2.0, max_relative = 1e-12);

        let mut i = input(2.5e-9, 0.0, 1e-8);
        i.averaging_time = 9.0;
        let c = snr_halfspace(&i).unwrap();
        assert_relative_eq!(c / a, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn flake_limits() {
        let i = input(2.5e-9, 0.0, 1e-8);
        let half = snr_halfspace(&i).unwrap();
        let thick = snr_flake(&i, 1e-3).unwrap();
        assert_relative_eq!(thick, half, max_relative = 1e-6);
        let thin = snr_flake(&i, 1e-15).unwrap();
        assert!(thin < 1e-2 * half);
    }

    #[test]
    fn flake_ratio_between_depths() {
        // d = 2.5 nm vs 10 nm at h = 1 nm; oracle evaluated from the kernel.
        let h = 1e-9;
        let i1 = input(2.5e-9, 0.0, 1e-8);
        let i2 = input(10e-9, 0.0, 1e-8);
        let ratio = snr_flake(&i1, h).unwrap() / snr_flake(&i2, h).unwrap();
        let oracle = ((1.0 / 2.5f64.powi(3) - 1.0 / 3.5f64.powi(3))
            / (1.0 / 10f64.powi(3) - 1.0 / 11f64.powi(3)))
        .sqrt();
        assert_relative_eq!(ratio, oracle, max_relative = 1e-12);
        assert_relative_eq!(oracle, 12.789_283, max_relative = 1e-6);
    }

    #[test]
    fn flake_below_halfspace_and_monotone_in_h() {
        let i = input(5e-9, 0.0, 1e-8);
        let half = snr_halfspace(&i).unwrap();
        let mut last = 0.0;
        for h in [1e-10, 3e-10, 1e-9, 3e-9, 1e-8, 1e-7] {
            let v = snr_flake(&i, h).unwrap();
            assert!(v > last, "not monotone at h={h}");
            assert!(v < half, "flake above half-space at h={h}");
            last = v;
        }
    }

    /// Midpoint-rule quadrature of a depth-averaged SNR kernel.
    fn quadrature(f: impl Fn(f64) -> f64, d_min: f64, d_max: f64, n: usize) -> f64 {
        let w = (d_max - d_min) / n as f64;
        (0..n)
            .map(|i| f(d_min + (i as f64 + 0.5) * w))
            .sum::<f64>()
            * w
            / (d_max - d_min)
    }

    #[test]
    fn bulk_closed_form_matches_quadrature() {
        let i = input(1e-8, 0.0, 1e-8);
        let closed = snr_bulk(&i, 1e-8, 1e-5).unwrap();
        let quad = quadrature(
            |d| {
                let mut ii = i.clone();
                ii.depth = d;
                snr_halfspace(&ii).unwrap()
            },
            1e-8,
            1e-5,
            400_000,
        );
        assert_relative_eq!(closed, quad, max_relative = 1e-6);
    }

    #[test]
    fn bulk_degenerate_interval_recovers_halfspace() {
        let i = input(1e-8, 0.0, 1e-8);
        let d = 1e-8;
        let delta = d * 1e-6;
        let bulk = snr_bulk(&i, d, d + delta).unwrap();
        let mut ii = i.clone();
        ii.depth = d;
        let half = snr_halfspace(&ii).unwrap();
        assert_relative_eq!(bulk, half, max_relative = 1e-4);
    }

    #[test]
    fn flake_bulk_matches_quadrature_at_thin_layers() {
        let d_min = 1e-8;
        let d_max = 1e-5;
        let h = d_min / 10.0;
        let i = input(d_min, 0.0, 1e-8);
        let (closed, flagged) = snr_flake_bulk(&i, d_min, d_max, h).unwrap();
        assert!(!flagged);
        let quad = quadrature(
            |d| {
                let mut ii = i.clone();
                ii.depth = d;
                snr_flake(&ii, h).unwrap()
            },
            d_min,
            d_max,
            400_000,
        );
        assert_relative_eq!(closed, quad, max_relative = 1e-2);
        assert!(closed > 0.0);
    }

    #[test]
    fn flake_bulk_flags_thick_layers() {
        let i = input(1e-8, 0.0, 1e-8);
        let (v, flagged) = snr_flake_bulk(&i, 1e-8, 1e-5, 5e-9).unwrap();
        assert!(flagged);
        assert!(v.is_finite());
    }

    #[test]
    fn flake_bulk_real_and_positive_for_figure_parameters() {
        let i = input(1e-8, crate::geometry::magic_angle(), 1e-8);
        let (v, flagged) = snr_flake_bulk(&i, 10e-9, 10e-6, 1e-9).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!(!flagged);
    }

    #[test]
    fn sweep_snr_rejects_empty_grid_and_is_deterministic() {
        let p = crate::params::preset("vb_aggregated").unwrap();
        let s = proton_halfspace();
        assert!(sweep_snr(&p, &s, &[]).is_err());
        let grid: Vec<f64> = (0..20).map(|i| 1e5 * 1.5f64.powi(i)).collect();
        let a = sweep_snr(&p, &s, &grid).unwrap();
        let b = sweep_snr(&p, &s, &grid).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), grid.len());
    }
}
