//! Closed-form geometry scaling factors.
//!
//! The factors quantify how efficiently an NMR signal projects onto the
//! quantization axis of a defect tilted by `alpha` from the surface normal.
//! Transverse and longitudinal forms apply to uniformly polarized samples
//! (XY8/CASR and AERIS-style detection respectively); the statistical form
//! applies to statistically polarized nanoscale samples.

use crate::num::Float;

/// Transverse-signal geometry factor
/// `pi * sin(2 alpha) * (1 + eps^3/2 - 3 eps/2)`.
///
/// `eps` is the ratio of defect depth to maximum sample radius; it is 0 for
/// effectively unbounded samples.
pub fn g_transverse<T: Float>(alpha: T, epsilon: T) -> T {
    let half = T::of(0.5);
    let three_half = T::of(1.5);
    let bracket = T::one() + half * epsilon.powi(3) - three_half * epsilon;
    T::PI() * (alpha + alpha).sin() * bracket
}

/// Longitudinal-signal geometry factor `pi * (cos(2 alpha) + 1/3)`.
///
/// Maximal at alpha = 0 (the boron-vacancy orientation) and zero at the
/// magic angle, where [100]/[110]-cut NV ensembles sit.
pub fn g_longitudinal<T: Float>(alpha: T) -> T {
    T::PI() * ((alpha + alpha).cos() + T::of(1.0 / 3.0))
}

/// Statistical-polarization geometry factor `8 - 3 sin^4(alpha)`.
pub fn g_statistical<T: Float>(alpha: T) -> T {
    let s = alpha.sin();
    T::of(8.0) - T::of(3.0) * s * s * s * s
}

/// Magic angle `arccos(1/sqrt(3))`, where `3 cos^2 - 1 = 0`.
pub fn magic_angle<T: Float>() -> T {
    (T::one() / T::of(3.0).sqrt()).acos()
}
