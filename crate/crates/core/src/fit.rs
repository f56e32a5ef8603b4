//! Least-squares line fit on log-log data, for power-law exponents.

use crate::error::{Error, Result};
use crate::num::Float;

/// Power-law fit `y = a * x^b` via linear regression on `(ln x, ln y)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawFit<T> {
    /// Exponent `b`.
    pub exponent: T,
    /// Prefactor `a`.
    pub prefactor: T,
    /// Coefficient of determination of the log-log fit.
    pub r_squared: T,
}

/// Fit a power law to strictly positive samples.
pub fn fit_power_law<T: Float>(x: &[T], y: &[T]) -> Result<PowerLawFit<T>> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("power-law fit needs at least two (x, y) pairs"));
    }
    if x.iter().chain(y.iter()).any(|v| !(*v > T::zero())) {
        return Err(Error::invalid("power-law fit needs strictly positive data"));
    }
    let n = T::from_usize(x.len()).unwrap();
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (a, b) in lx.iter().zip(ly.iter()) {
        let dx = *a - mx;
        let dy = *b - my;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if !(sxx > T::zero()) {
        return Err(Error::invalid("degenerate abscissa: all x values identical"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > T::zero() {
        (sxy * sxy) / (sxx * syy)
    } else {
        T::one()
    };
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
    })
}
