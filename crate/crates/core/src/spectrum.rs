//! Normalized spectra on uniform frequency grids.

use crate::error::{Error, Result};

/// A normalized amplitude spectrum with derived line metadata.
///
/// Amplitudes are non-negative and sum to 1. The grid stores bin centers of
/// a uniform binning; `fwhm` is measured by linear interpolation at half of
/// the peak amplitude, taking the outermost crossings (ties break toward the
/// wider width).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Bin centers (Hz), uniform spacing.
    pub freq_grid: Vec<f64>,
    /// Normalized amplitude per bin.
    pub amplitude: Vec<f64>,
    /// Full width at half maximum (Hz).
    pub fwhm: f64,
    /// Amplitude-weighted mean frequency (Hz).
    pub mean_shift: f64,
    /// Frequency of the tallest bin (Hz).
    pub peak: f64,
}

impl Spectrum {
    /// Build a spectrum from raw bin amplitudes, normalizing to unit sum.
    pub fn from_bins(freq_grid: Vec<f64>, raw: Vec<f64>) -> Result<Spectrum> {
        if freq_grid.len() != raw.len() || freq_grid.is_empty() {
            return Err(Error::invalid("spectrum grid and amplitudes must match and be non-empty"));
        }
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::invalid("all-zero spectral weights"));
        }
        let amplitude: Vec<f64> = raw.iter().map(|a| a / total).collect();
        let mean_shift = freq_grid
            .iter()
            .zip(&amplitude)
            .map(|(f, a)| f * a)
            .sum::<f64>();
        let peak_idx = peak_index(&amplitude);
        let peak = freq_grid[peak_idx];
        let fwhm = fwhm_interpolated(&freq_grid, &amplitude);
        Ok(Spectrum {
            freq_grid,
            amplitude,
            fwhm,
            mean_shift,
            peak,
        })
    }

    /// Bin width of the uniform grid (Hz).
    pub fn bin_width(&self) -> f64 {
        if self.freq_grid.len() > 1 {
            self.freq_grid[1] - self.freq_grid[0]
        } else {
            0.0
        }
    }

    /// Local maxima above `threshold_frac` of the global maximum.
    pub fn peaks(&self, threshold_frac: f64) -> Vec<(f64, f64)> {
        let max = self
            .amplitude
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let cut = threshold_frac * max;
        let n = self.amplitude.len();
        let mut out = Vec::new();
        for i in 0..n {
            let a = self.amplitude[i];
            if a < cut {
                continue;
            }
            let left = if i > 0 { self.amplitude[i - 1] } else { f64::NEG_INFINITY };
            let right = if i + 1 < n { self.amplitude[i + 1] } else { f64::NEG_INFINITY };
            if a >= left && a > right || (a > left && a >= right) {
                out.push((self.freq_grid[i], a));
            }
        }
        out
    }
}

fn peak_index(amplitude: &[f64]) -> usize {
    let mut best = 0;
    for (i, &a) in amplitude.iter().enumerate() {
        if a > amplitude[best] {
            best = i;
        }
    }
    best
}

/// FWHM by linear interpolation at half maximum, outermost crossings.
fn fwhm_interpolated(freq: &[f64], amplitude: &[f64]) -> f64 {
    let n = amplitude.len();
    if n < 2 {
        return 0.0;
    }
    let half = amplitude[peak_index(amplitude)] / 2.0;
    // First upward crossing from the left.
    let mut left = freq[0];
    for i in 0..n {
        if amplitude[i] >= half {
            left = if i == 0 {
                freq[0]
            } else {
                let (f0, f1) = (freq[i - 1], freq[i]);
                let (a0, a1) = (amplitude[i - 1], amplitude[i]);
                f0 + (half - a0) / (a1 - a0) * (f1 - f0)
            };
            break;
        }
    }
    // First downward crossing from the right.
    let mut right = freq[n - 1];
    for i in (0..n).rev() {
        if amplitude[i] >= half {
            right = if i == n - 1 {
                freq[n - 1]
            } else {
                let (f0, f1) = (freq[i], freq[i + 1]);
                let (a0, a1) = (amplitude[i], amplitude[i + 1]);
                f0 + (a0 - half) / (a0 - a1) * (f1 - f0)
            };
            break;
        }
    }
    (right - left).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize, lo: f64, width: f64) -> Vec<f64> {
        (0..n).map(|i| lo + i as f64 * width).collect()
    }

    #[test]
    fn normalization_and_mean() {
        let f = grid(5, -2.0, 1.0);
        let s = Spectrum::from_bins(f, vec![0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(s.amplitude.iter().sum::<f64>(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.mean_shift, 0.0, epsilon = 1e-15);
        assert_eq!(s.peak, 0.0);
    }

    #[test]
    fn triangle_fwhm() {
        // Triangle peaking at 0 with half-max at +-1.
        let f = grid(5, -2.0, 1.0);
        let s = Spectrum::from_bins(f, vec![0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(s.fwhm, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn plateau_breaks_toward_wider_width() {
        // Two equal maxima; outermost crossings span both.
        let f = grid(7, 0.0, 1.0);
        let s = Spectrum::from_bins(f, vec![0.0, 2.0, 1.5, 1.5, 2.0, 0.0, 0.0]).unwrap();
        assert!(s.fwhm > 3.0, "fwhm = {}", s.fwhm);
    }

    #[test]
    fn all_zero_weights_is_an_error() {
        let f = grid(3, 0.0, 1.0);
        assert!(Spectrum::from_bins(f, vec![0.0; 3]).is_err());
    }

    #[test]
    fn single_spike_has_subbin_width() {
        let f = grid(2001, -1000.0, 1.0);
        let mut a = vec![0.0; 2001];
        a[1000] = 1.0;
        let s = Spectrum::from_bins(f, a).unwrap();
        assert!(s.fwhm <= 1.0, "fwhm = {}", s.fwhm);
        assert_eq!(s.peak, 0.0);
    }

    #[test]
    fn peak_listing_threshold() {
        let f = grid(9, 0.0, 1.0);
        let s = Spectrum::from_bins(
            f,
            vec![0.0, 1.0, 0.0, 0.02, 0.0, 0.8, 0.0, 0.0, 0.0],
        )
        .unwrap();
        let peaks = s.peaks(0.05);
        assert_eq!(peaks.len(), 2);
        assert_eq!(peaks[0].0, 1.0);
        assert_eq!(peaks[1].0, 5.0);
    }
}
