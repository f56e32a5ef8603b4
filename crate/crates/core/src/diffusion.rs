//! Diffusion-limited nuclear dephasing and XY8-k contrast lineshapes.
//!
//! A molecule diffusing with coefficient `D` stays within the sensing volume
//! of a defect at depth `d` for roughly `T_D = d^2 / 6D` (3D random walk).
//! That correlation time caps the nuclear dephasing time `T*_2N`, which sets
//! the width of the statistically polarized NMR line. The measured XY8-k
//! contrast is
//!
//! ```text
//! C(tau) = exp(-<phi^2> / 2),
//! <phi^2> = gamma_e^2 B_rms^2 Integral S(nu) |Y_k(nu, tau)|^2 dnu
//! ```
//!
//! where `S` is the normalized Lorentzian line centered at the nuclear
//! Larmor frequency with HWHM `1/(pi T*_2N)` and `Y_k` is the Fourier
//! transform of the k-pulse CPMG/XY8 toggling function (units of time, so
//! the integral is a plain spectral average).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::Float;
use crate::params::{DefectSystemParams, SampleSpec};
use crate::sensitivity::t2_dd;
use crate::snr::b_rms;

/// Diffusion-limited correlation time `d^2 / (6 D)` (s); infinite for a
/// frozen sample (`D = 0`).
pub fn correlation_time(depth: f64, diffusion_coeff: f64) -> f64 {
    debug_assert!(depth > 0.0 && diffusion_coeff >= 0.0);
    if diffusion_coeff == 0.0 {
        f64::INFINITY
    } else {
        depth * depth / (6.0 * diffusion_coeff)
    }
}

/// Harmonic combination of the intrinsic dephasing time and the diffusion
/// correlation time: `1/T* = 1/T*_intrinsic + 1/T_D`.
pub fn effective_t2n(t2n_intrinsic: f64, t_d: f64) -> f64 {
    debug_assert!(t2n_intrinsic > 0.0 && t_d > 0.0);
    match (t2n_intrinsic.is_infinite(), t_d.is_infinite()) {
        (true, true) => f64::INFINITY,
        (true, false) => t_d,
        (false, true) => t2n_intrinsic,
        (false, false) => 1.0 / (1.0 / t2n_intrinsic + 1.0 / t_d),
    }
}

/// Squared magnitude of the toggling-function Fourier transform for `k`
/// equally spaced pi-pulses with interpulse spacing `tau` (s²):
///
/// `|Y|^2 = 16 sin^4(w tau/4) sin^2(k w tau/2) / (w^2 cos^2(w tau/2))`
///
/// for even `k`, with the removable singularities at the pass bands filled
/// by their limits.
pub fn filter_y2<T: Float>(nu: T, k: u32, tau: T) -> T {
    let w = T::of(2.0) * T::PI() * nu;
    if w == T::zero() {
        return T::zero();
    }
    let kt = T::from_u32(k).unwrap();
    let half = w * tau * T::of(0.5);
    let c = half.cos();
    let s4 = (w * tau * T::of(0.25)).sin().powi(4);
    // sin^2(k phi)/cos^2(phi) -> k^2 at the pass bands (k even).
    let ratio = if c.abs() < T::of(1e-8) {
        kt * kt
    } else {
        let sk = (kt * half).sin();
        sk * sk / (c * c)
    };
    T::of(16.0) * s4 * ratio / (w * w)
}

/// Normalized Lorentzian with center `nu0` and half width at half maximum
/// `hwhm`.
pub fn lorentzian<T: Float>(nu: T, nu0: T, hwhm: T) -> T {
    let d = nu - nu0;
    hwhm / (T::PI() * (d * d + hwhm * hwhm))
}

/// Mean-square phase accumulated by the sensor from a Lorentzian noise line
/// of total power `b_rms^2` centered at `nu_center`.
///
/// The quadrature substitutes `nu = nu_center + hwhm tan(u)`, which turns
/// the Lorentzian measure into a constant so the full tails are covered;
/// the grid is refined until the result changes by less than 1e-4 relative.
pub fn phase_variance(
    gamma_e: f64,
    b_rms_t: f64,
    nu_center: f64,
    hwhm: f64,
    k: u32,
    tau: f64,
) -> f64 {
    let amp = gamma_e * gamma_e * b_rms_t * b_rms_t;
    if hwhm == 0.0 {
        // Dephasing-free line: a delta function at the Larmor frequency.
        return amp * filter_y2(nu_center, k, tau);
    }
    let eps = 1e-7;
    let integrate = |n: usize| -> f64 {
        // Composite Simpson over u in (-pi/2, pi/2).
        let lo = -std::f64::consts::FRAC_PI_2 + eps;
        let hi = std::f64::consts::FRAC_PI_2 - eps;
        let h = (hi - lo) / n as f64;
        let f = |u: f64| filter_y2(nu_center + hwhm * u.tan(), k, tau);
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0 / std::f64::consts::PI
    };
    let mut n = 1 << 12;
    let mut last = integrate(n);
    for _ in 0..6 {
        n *= 2;
        let next = integrate(n);
        let change = (next - last).abs() / next.abs().max(f64::MIN_POSITIVE);
        last = next;
        if change < 1e-4 {
            break;
        }
    }
    amp * last
}

/// Configuration of one contrast-lineshape calculation.
#[derive(Debug, Clone)]
pub struct LineshapeConfig {
    pub defect: DefectSystemParams,
    pub sample: SampleSpec,
    /// Total pi-pulse count (multiple of 8).
    pub k: u32,
    /// Interpulse spacings to evaluate (s), strictly increasing.
    pub tau_grid: Vec<f64>,
    /// Multiply the signal contrast by the sensor's own coherence decay
    /// `exp(-(2 k tau / T2(k))^p)`.
    pub include_sensor_decay: bool,
}

impl LineshapeConfig {
    /// Nuclear Larmor frequency (Hz) of the sample species at the bias
    /// field.
    pub fn larmor(&self) -> f64 {
        self.sample.species.gamma() * self.sample.bias_field / (2.0 * std::f64::consts::PI)
    }

    /// Effective nuclear dephasing time (s) at the sensor depth.
    pub fn t2n_effective(&self) -> f64 {
        let t_d = correlation_time(self.defect.depth_min, self.sample.diffusion_coeff);
        effective_t2n(self.sample.t2n_intrinsic, t_d)
    }

    pub fn validate(&self) -> Result<()> {
        self.defect.validate()?;
        self.sample.validate()?;
        if self.k == 0 || self.k % 8 != 0 {
            return Err(Error::invalid("k must be a positive multiple of 8"));
        }
        if self.tau_grid.is_empty()
            || !(self.tau_grid[0] > 0.0)
            || !self.tau_grid.windows(2).all(|w| w[0] < w[1])
        {
            return Err(Error::invalid("tau grid must be positive and strictly increasing"));
        }
        Ok(())
    }
}

/// One evaluated point of a contrast curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastPoint {
    /// Interpulse spacing (s).
    pub tau: f64,
    /// Measurement contrast C(tau) in (0, 1].
    pub contrast: f64,
    /// Frequency the sequence is tuned to, `1/(2 tau)` (Hz).
    pub equivalent_freq: f64,
}

/// XY8-k contrast curve over the configured tau grid.
pub fn contrast_curve(config: &LineshapeConfig) -> Result<Vec<ContrastPoint>> {
    config.validate()?;
    let gamma_e = config.defect.gamma_e();
    let b = b_rms(&config.sample, config.defect.depth_min, config.defect.alpha)?;
    let nu0 = config.larmor();
    let t2n = config.t2n_effective();
    let hwhm = if t2n.is_infinite() {
        0.0
    } else {
        1.0 / (std::f64::consts::PI * t2n)
    };
    Ok(config
        .tau_grid
        .par_iter()
        .map(|&tau| {
            let phi2 = phase_variance(gamma_e, b, nu0, hwhm, config.k, tau);
            let mut contrast = (-phi2 / 2.0).exp();
            if config.include_sensor_decay {
                let t2k = t2_dd(config.k, &config.defect);
                let arg = (2.0 * config.k as f64 * tau / t2k).powf(config.defect.p_stretch);
                contrast *= (-arg).exp();
            }
            ContrastPoint {
                tau,
                contrast,
                equivalent_freq: 1.0 / (2.0 * tau),
            }
        })
        .collect())
}

/// Peak contrast dip `max(1 - C)` of a curve; the spacing where it occurs.
pub fn peak_dip(curve: &[ContrastPoint]) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    for p in curve {
        let dip = 1.0 - p.contrast;
        if dip > best.1 {
            best = (p.tau, dip);
        }
    }
    (best.0, best.1)
}

/// Ratio of the peak contrast dips of two configurations.
#[derive(Debug, Clone, Copy)]
pub struct ContrastRatio {
    pub ratio: f64,
    pub dip_a: f64,
    pub dip_b: f64,
    /// Set when either dip exceeds 0.3 and the small-signal relation to the
    /// B_rms² ratio no longer holds.
    pub saturated: bool,
}

/// Compare the peak dips of two sensors measuring the same sample. In the
/// small-signal limit this equals their B_rms² ratio.
pub fn vb_nv_contrast_ratio(
    config_a: &LineshapeConfig,
    config_b: &LineshapeConfig,
) -> Result<ContrastRatio> {
    let curve_a = contrast_curve(config_a)?;
    let curve_b = contrast_curve(config_b)?;
    let (_, dip_a) = peak_dip(&curve_a);
    let (_, dip_b) = peak_dip(&curve_b);
    if !(dip_b > 0.0) {
        return Err(Error::invalid("reference contrast curve shows no dip"));
    }
    Ok(ContrastRatio {
        ratio: dip_a / dip_b,
        dip_a,
        dip_b,
        saturated: dip_a >= 0.3 || dip_b >= 0.3,
    })
}
