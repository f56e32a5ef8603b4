//! Quantitative models for spin-defect NMR at the nanoscale and micron scale.
//!
//! The crate covers the full modeling chain for optically probed spin defects
//! (boron vacancies in hBN, NV centers in diamond) used as NMR sensors:
//!
//! - [`sensitivity`]: volume-normalized AC magnetic sensitivity with jointly
//!   optimized readout time, pulse count, and finite-pulse overhead.
//! - [`geometry`]: closed-form geometry scaling factors for transverse,
//!   longitudinal, and statistical-polarization detection.
//! - [`snr`]: statistical-polarization signal amplitude and measurement SNR
//!   for half-space, thin-layer, and depth-averaged sensor geometries.
//! - [`backaction`]: Monte Carlo dipolar back-action lineshapes, linewidth
//!   versus depth power laws, and analytic cross-checks.
//! - [`fewspin`]: exact rotating-frame dynamics for one defect manifold plus
//!   up to five nuclear spins, with FFT spectra and shift-versus-distance
//!   scans.
//! - [`diffusion`]: diffusion-limited nuclear dephasing and XY8-k contrast
//!   lineshapes for statistically polarized liquid samples.
//! - [`params`]: physical constants, sensor presets, sample descriptions,
//!   and the flat `key = value` config format.
//!
//! Internal units are strictly SI (m, s, T, Hz, rad). Unit conversions (ppm,
//! nm, µs) happen only at the config/CLI boundary.
//!
//! Scalar-generic kernels (geometry factors, line searches, filter functions,
//! log-log fits) are written over [`num::Float`]; the parameter records and
//! pipelines are fixed to [`Real`] (`f64`).

pub mod backaction;
pub mod config;
pub mod constants;
pub mod diffusion;
pub mod error;
pub mod fewspin;
pub mod fit;
pub mod geometry;
pub mod num;
pub mod params;
pub mod search;
pub mod sensitivity;
pub mod snr;
pub mod spectrum;

/// Default scalar type used by the parameter records and pipelines.
pub type Real = f64;

pub use config::{load_config, write_config, RunOptions};
pub use constants::Species;
pub use error::Error;
pub use params::{preset, DefectSystemParams, Host, SampleGeometry, SampleSpec};
pub use sensitivity::SensitivityPoint;
pub use spectrum::Spectrum;
