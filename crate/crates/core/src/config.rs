//! Flat `key = value` config files.
//!
//! Keys carry their unit as a suffix (`t2_echo_us = 1.1`, `depth_nm = 2.5`).
//! A `system = <preset>` line selects the base sensor preset; any further
//! keys override individual fields. Unknown keys are errors, not warnings,
//! so a typo cannot silently corrupt a sweep. `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::{preset, DefectSystemParams, SampleGeometry, SampleSpec};
use crate::constants::Species;

/// Options shared by the CLI subcommands, resolved from config + flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Frequency grid for sweeps (log-spaced).
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub n_freq: usize,
    /// Total pi-pulse count for contrast-lineshape runs (multiple of 8).
    /// XY8-100 is 100 blocks of 8 pulses, so 800.
    pub k_pulses: u32,
    /// Target number of lattice sites for back-action runs.
    pub spin_target: u64,
    /// Histogram bin count for back-action spectra.
    pub hist_bins: usize,
    /// Lattice jitter seed; None disables jitter.
    pub jitter_seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            f_min_hz: 1e4,
            f_max_hz: 1e8,
            n_freq: 200,
            k_pulses: 800,
            spin_target: 1_000_000,
            hist_bins: 2001,
            jitter_seed: None,
        }
    }
}

struct Line {
    number: usize,
    key: String,
    value: String,
}

fn tokenize(text: &str) -> Result<Vec<Line>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let number = idx + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let stripped = stripped.trim();
        if stripped.is_empty() {
            continue;
        }
        let Some(eq) = stripped.find('=') else {
            return Err(Error::Parse {
                line: number,
                message: format!("expected `key = value`, got `{stripped}`"),
            });
        };
        let key = stripped[..eq].trim().to_string();
        let value = stripped[eq + 1..].trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                line: number,
                message: "empty key or value".to_string(),
            });
        }
        out.push(Line { number, key, value });
    }
    Ok(out)
}

fn parse_f64(line: &Line) -> Result<f64> {
    match line.value.as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        v => v.parse::<f64>().map_err(|_| Error::Parse {
            line: line.number,
            message: format!("`{v}` is not a number (key {})", line.key),
        }),
    }
}

fn parse_u64(line: &Line) -> Result<u64> {
    line.value.parse::<u64>().map_err(|_| Error::Parse {
        line: line.number,
        message: format!("`{}` is not an integer (key {})", line.value, line.key),
    })
}

/// Parse a config file.
pub fn load_config(path: &Path) -> Result<(DefectSystemParams, SampleSpec, RunOptions)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_config_str(&text)
}

/// Parse config text. See [`load_config`].
pub fn load_config_str(text: &str) -> Result<(DefectSystemParams, SampleSpec, RunOptions)> {
    let lines = tokenize(text)?;

    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for line in &lines {
        if let Some(first) = seen.insert(line.key.as_str(), line.number) {
            return Err(Error::Parse {
                line: line.number,
                message: format!("duplicate key `{}` (first set at line {first})", line.key),
            });
        }
    }

    let system = lines
        .iter()
        .find(|l| l.key == "system")
        .ok_or_else(|| Error::validation("missing required key: system"))?;
    let mut defect = preset(&system.value)?;

    let mut sample = SampleSpec::default();
    let mut opts = RunOptions::default();
    // Geometry assembled from parts at the end.
    let mut geometry_kind: Option<String> = None;
    let mut slab_thickness: Option<f64> = None;

    for line in &lines {
        let v = || parse_f64(line);
        match line.key.as_str() {
            "system" => {}
            // Sensor overrides.
            "t2_echo_us" => defect.t2_echo = v()? * 1e-6,
            "t2_echo_s" => defect.t2_echo = v()?,
            "t2_max_us" => defect.t2_max = v()? * 1e-6,
            "t2_max_s" => defect.t2_max = v()?,
            "depth_nm" => {
                let d = v()? * 1e-9;
                defect.depth_min = d;
                defect.depth_max = d;
            }
            "depth_min_nm" => defect.depth_min = v()? * 1e-9,
            "depth_max_nm" => defect.depth_max = v()? * 1e-9,
            "depth_min_m" => defect.depth_min = v()?,
            "depth_max_m" => defect.depth_max = v()?,
            "contrast_frac" => defect.contrast0 = v()?,
            "counts_per_defect_hz" => defect.counts_per_defect = v()?,
            "density_ppm" => defect.density_ppm = v()?,
            "t_init_ns" => defect.t_init = v()? * 1e-9,
            "t_init_s" => defect.t_init = v()?,
            "g_factor" => defect.g_factor = v()?,
            "s_exponent" => defect.s_exponent = v()?,
            "p_stretch" => defect.p_stretch = v()?,
            "alpha_deg" => defect.alpha = v()?.to_radians(),
            "alpha_rad" => defect.alpha = v()?,
            "rabi_hz" => defect.rabi_hz = v()?,
            "rabi_mhz" => defect.rabi_hz = v()? * 1e6,
            // Sample.
            "species" => {
                sample.species = Species::from_name(&line.value).ok_or(Error::Parse {
                    line: line.number,
                    message: format!("unknown species `{}`", line.value),
                })?;
            }
            "sample_density_per_nm3" => sample.density = v()? * 1e27,
            "sample_density_per_m3" => sample.density = v()?,
            "sample_geometry" => geometry_kind = Some(line.value.clone()),
            "slab_thickness_nm" => slab_thickness = Some(v()? * 1e-9),
            "diffusion_nm2_per_s" => sample.diffusion_coeff = v()? * 1e-18,
            "diffusion_m2_per_s" => sample.diffusion_coeff = v()?,
            "t2n_intrinsic_s" => sample.t2n_intrinsic = v()?,
            "bias_field_t" => sample.bias_field = v()?,
            // Run options.
            "f_min_hz" => opts.f_min_hz = v()?,
            "f_max_hz" => opts.f_max_hz = v()?,
            "n_freq" => opts.n_freq = parse_u64(line)? as usize,
            "k_pulses" => opts.k_pulses = parse_u64(line)? as u32,
            "spin_target" => opts.spin_target = parse_u64(line)?,
            "hist_bins" => opts.hist_bins = parse_u64(line)? as usize,
            "jitter_seed" => opts.jitter_seed = Some(parse_u64(line)?),
            other => {
                return Err(Error::Parse {
                    line: line.number,
                    message: format!("unknown key `{other}`"),
                });
            }
        }
    }

    match geometry_kind.as_deref() {
        None | Some("half_space") => {
            if let Some(h) = slab_thickness {
                if geometry_kind.is_none() {
                    sample.geometry = SampleGeometry::Slab { thickness: h };
                } else {
                    return Err(Error::validation(
                        "slab_thickness_nm given but sample_geometry = half_space",
                    ));
                }
            }
        }
        Some("slab") => {
            let h = slab_thickness
                .ok_or_else(|| Error::validation("sample_geometry = slab needs slab_thickness_nm"))?;
            sample.geometry = SampleGeometry::Slab { thickness: h };
        }
        Some("bulk") => {
            sample.geometry = SampleGeometry::BulkAverage {
                d_min: defect.depth_min,
                d_max: defect.depth_max,
                slab_thickness,
            };
        }
        Some(other) => {
            return Err(Error::validation(format!(
                "unknown sample_geometry `{other}` (expected half_space, slab, or bulk)"
            )));
        }
    }

    defect.validate()?;
    sample.validate()?;
    if opts.f_min_hz <= 0.0 || opts.f_max_hz <= opts.f_min_hz {
        return Err(Error::validation("frequency grid must satisfy 0 < f_min < f_max"));
    }
    if opts.n_freq < 2 {
        return Err(Error::validation("n_freq must be >= 2"));
    }
    if opts.k_pulses == 0 || opts.k_pulses % 8 != 0 {
        return Err(Error::validation("k_pulses must be a positive multiple of 8"));
    }
    Ok((defect, sample, opts))
}

/// Print `v / scale` such that parsing the string and multiplying by `scale`
/// reproduces `v` bit-exactly. Falls back to nudging the printed value by a
/// few ulps when the straightforward quotient does not round-trip.
fn exact_scaled(v: f64, scale: f64) -> String {
    let u0 = v / scale;
    let check = |u: f64| {
        let s = format!("{u}");
        let back: f64 = s.parse().unwrap();
        back * scale == v
    };
    if check(u0) {
        return format!("{u0}");
    }
    let mut up = u0;
    let mut down = u0;
    for _ in 0..8 {
        up = next_f64(up, f64::INFINITY);
        down = next_f64(down, f64::NEG_INFINITY);
        if check(up) {
            return format!("{up}");
        }
        if check(down) {
            return format!("{down}");
        }
    }
    // Give up on the pretty unit; the SI fallback key is exact.
    format!("{u0}")
}

fn next_f64(x: f64, toward: f64) -> f64 {
    if x == toward {
        return x;
    }
    let bits = x.to_bits();
    let next = if (x < toward) == (x >= 0.0) {
        bits + 1
    } else {
        bits - 1
    };
    f64::from_bits(next)
}

fn unit_line(out: &mut String, key: &str, si_key: &str, v: f64, scale: f64) {
    let s = exact_scaled(v, scale);
    let parsed: f64 = s.parse().unwrap();
    if parsed * scale == v {
        out.push_str(&format!("{key} = {s}\n"));
    } else {
        out.push_str(&format!("{si_key} = {v}\n"));
    }
}

/// Serialize a resolved configuration. `load_config_str(write_config(..))`
/// reproduces the records bit-exactly.
pub fn write_config(defect: &DefectSystemParams, sample: &SampleSpec, opts: &RunOptions) -> String {
    let mut s = String::new();
    s.push_str(&format!("system = {}\n", defect.name));
    unit_line(&mut s, "t2_echo_us", "t2_echo_s", defect.t2_echo, 1e-6);
    unit_line(&mut s, "t2_max_us", "t2_max_s", defect.t2_max, 1e-6);
    unit_line(&mut s, "depth_min_nm", "depth_min_m", defect.depth_min, 1e-9);
    unit_line(&mut s, "depth_max_nm", "depth_max_m", defect.depth_max, 1e-9);
    s.push_str(&format!("contrast_frac = {}\n", defect.contrast0));
    s.push_str(&format!("counts_per_defect_hz = {}\n", defect.counts_per_defect));
    s.push_str(&format!("density_ppm = {}\n", defect.density_ppm));
    unit_line(&mut s, "t_init_ns", "t_init_s", defect.t_init, 1e-9);
    s.push_str(&format!("g_factor = {}\n", defect.g_factor));
    s.push_str(&format!("s_exponent = {}\n", defect.s_exponent));
    s.push_str(&format!("p_stretch = {}\n", defect.p_stretch));
    s.push_str(&format!("alpha_rad = {}\n", defect.alpha));
    s.push_str(&format!("rabi_hz = {}\n", defect.rabi_hz));

    s.push_str(&format!("species = {}\n", sample.species.name()));
    s.push_str(&format!("sample_density_per_m3 = {}\n", sample.density));
    match sample.geometry {
        SampleGeometry::HalfSpace => s.push_str("sample_geometry = half_space\n"),
        SampleGeometry::Slab { thickness } => {
            s.push_str("sample_geometry = slab\n");
            unit_line(&mut s, "slab_thickness_nm", "slab_thickness_nm", thickness, 1e-9);
        }
        SampleGeometry::BulkAverage { slab_thickness, .. } => {
            s.push_str("sample_geometry = bulk\n");
            if let Some(h) = slab_thickness {
                unit_line(&mut s, "slab_thickness_nm", "slab_thickness_nm", h, 1e-9);
            }
        }
    }
    s.push_str(&format!("diffusion_m2_per_s = {}\n", sample.diffusion_coeff));
    if sample.t2n_intrinsic.is_finite() {
        s.push_str(&format!("t2n_intrinsic_s = {}\n", sample.t2n_intrinsic));
    } else {
        s.push_str("t2n_intrinsic_s = inf\n");
    }
    s.push_str(&format!("bias_field_t = {}\n", sample.bias_field));

    s.push_str(&format!("f_min_hz = {}\n", opts.f_min_hz));
    s.push_str(&format!("f_max_hz = {}\n", opts.f_max_hz));
    s.push_str(&format!("n_freq = {}\n", opts.n_freq));
    s.push_str(&format!("k_pulses = {}\n", opts.k_pulses));
    s.push_str(&format!("spin_target = {}\n", opts.spin_target));
    s.push_str(&format!("hist_bins = {}\n", opts.hist_bins));
    if let Some(seed) = opts.jitter_seed {
        s.push_str(&format!("jitter_seed = {seed}\n"));
    }
    s
}

/// Log-spaced frequency grid from the run options.
pub fn frequency_grid(opts: &RunOptions) -> Vec<f64> {
    let n = opts.n_freq;
    let lmin = opts.f_min_hz.ln();
    let lmax = opts.f_max_hz.ln();
    (0..n)
        .map(|i| (lmin + (lmax - lmin) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PRESET_NAMES;

    #[test]
    fn preset_selection_applies_table_values() {
        let (d, _, _) = load_config_str("system = vb_gao\n").unwrap();
        assert_eq!(d.t2_echo, 1.1e-6);
        assert_eq!(d.density_ppm, 192.0);
        assert_eq!(d.contrast0, 0.0425);
        assert_eq!(d.counts_per_defect, 87.5);
    }

    #[test]
    fn empty_file_reports_missing_system() {
        let err = load_config_str("").unwrap_err();
        assert!(err.to_string().contains("missing required key: system"), "{err}");
    }

    #[test]
    fn inverted_t2_is_a_validation_error() {
        let err = load_config_str("system = vb_gao\nt2_max_us = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("t2_max"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_line_number() {
        let err = load_config_str("system = vb_gao\n\ndensity_ppb = 4\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("density_ppb"));
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = load_config_str("system = vb_gao\ndepth_nm = 2\ndepth_nm = 3\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn comments_and_units_parse() {
        let text = "\
# sensor
system = vb_aggregated
depth_nm = 2.5   # standoff
rabi_mhz = 25
sample_density_per_nm3 = 64
";
        let (d, s, _) = load_config_str(text).unwrap();
        assert_eq!(d.depth_min, 2.5e-9);
        assert_eq!(d.rabi_hz, 25e6);
        assert_eq!(s.density, 64e27);
    }

    #[test]
    fn presets_round_trip_bit_exactly() {
        for name in PRESET_NAMES {
            let defect = preset(name).unwrap();
            let sample = SampleSpec::default();
            let opts = RunOptions::default();
            let text = write_config(&defect, &sample, &opts);
            let (d2, s2, o2) = load_config_str(&text).unwrap();
            assert_eq!(defect, d2, "preset {name} did not round-trip:\n{text}");
            assert_eq!(sample, s2);
            assert_eq!(opts, o2);
        }
    }

    #[test]
    fn infinite_t2n_round_trips() {
        let defect = preset("single_nv").unwrap();
        let mut sample = SampleSpec::default();
        sample.t2n_intrinsic = f64::INFINITY;
        sample.geometry = SampleGeometry::Slab { thickness: 1e-9 };
        let text = write_config(&defect, &sample, &RunOptions::default());
        let (_, s2, _) = load_config_str(&text).unwrap();
        assert_eq!(sample, s2);
    }

    #[test]
    fn frequency_grid_is_log_spaced_and_sized() {
        let opts = RunOptions::default();
        let grid = frequency_grid(&opts);
        assert_eq!(grid.len(), 200);
        assert!((grid[0] - 1e4).abs() / 1e4 < 1e-12);
        assert!((grid[199] - 1e8).abs() / 1e8 < 1e-12);
        let r0 = grid[1] / grid[0];
        let r1 = grid[101] / grid[100];
        assert!((r0 - r1).abs() / r0 < 1e-9);
    }
}
