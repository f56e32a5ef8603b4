//! Physical constants in SI units (CODATA 2018) and nuclear species data.

/// mu0 / 4pi (T·m/A). Exact under the pre-2019 SI definition, and accurate
/// to well below any tolerance used here.
pub const MU0_OVER_4PI: f64 = 1.0e-7;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Bohr magneton (J/T).
pub const BOHR_MAGNETON: f64 = 9.274_010_0783e-24;

/// Nuclear species with non-negligible NMR activity considered by the models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    H1,
    C13,
    H2,
    F19,
    P31,
    N14,
}

impl Species {
    /// Gyromagnetic ratio (rad·s⁻¹·T⁻¹).
    pub fn gamma(self) -> f64 {
        match self {
            Species::H1 => 2.675_221_8744e8,
            Species::C13 => 6.728_284e7,
            Species::H2 => 4.106_627_91e7,
            Species::F19 => 2.518_148e8,
            Species::P31 => 1.083_94e8,
            Species::N14 => 1.933_779_2e7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Species::H1 => "h1",
            Species::C13 => "c13",
            Species::H2 => "h2",
            Species::F19 => "f19",
            Species::P31 => "p31",
            Species::N14 => "n14",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "h1" | "1h" => Some(Species::H1),
            "c13" | "13c" => Some(Species::C13),
            "h2" | "2h" => Some(Species::H2),
            "f19" | "19f" => Some(Species::F19),
            "p31" | "31p" => Some(Species::P31),
            "n14" | "14n" => Some(Species::N14),
            _ => None,
        }
    }

    pub const ALL: [Species; 6] = [
        Species::H1,
        Species::C13,
        Species::H2,
        Species::F19,
        Species::P31,
        Species::N14,
    ];
}

/// Electron gyromagnetic ratio (rad·s⁻¹·T⁻¹) for a given g-factor.
pub fn gamma_e_from_g(g_factor: f64) -> f64 {
    g_factor * BOHR_MAGNETON / HBAR
}

/// Bundle of the constants used across the models, matching the record shape
/// consumed by downstream code.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    pub mu0_over_4pi: f64,
    pub hbar: f64,
    pub bohr_magneton: f64,
}

impl PhysicalConstants {
    pub const fn si() -> Self {
        PhysicalConstants {
            mu0_over_4pi: MU0_OVER_4PI,
            hbar: HBAR,
            bohr_magneton: BOHR_MAGNETON,
        }
    }

    /// Gyromagnetic ratio lookup (rad·s⁻¹·T⁻¹).
    pub fn gamma(&self, species: Species) -> f64 {
        species.gamma()
    }

    pub fn gamma_e_from_g(&self, g_factor: f64) -> f64 {
        gamma_e_from_g(g_factor)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::si()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proton_gamma_over_2pi_is_42_577_mhz_per_tesla() {
        let mhz_per_t = Species::H1.gamma() / (2.0 * std::f64::consts::PI) / 1e6;
        let rel = (mhz_per_t - 42.577).abs() / 42.577;
        assert!(rel < 1e-4, "gamma(1H)/2pi = {mhz_per_t} MHz/T");
    }

    #[test]
    fn all_constants_strictly_positive() {
        let c = PhysicalConstants::si();
        assert!(c.mu0_over_4pi > 0.0);
        assert!(c.hbar > 0.0);
        assert!(c.bohr_magneton > 0.0);
        for s in Species::ALL {
            assert!(s.gamma() > 0.0, "{:?}", s);
        }
    }

    #[test]
    fn electron_gamma_matches_free_electron_scale() {
        // g = 2.002 319 gives the free-electron 1.760 86e11 rad/s/T.
        let ge = gamma_e_from_g(2.002_319);
        assert!((ge - 1.760_86e11).abs() / 1.760_86e11 < 1e-4);
    }

    #[test]
    fn species_names_round_trip() {
        for s in Species::ALL {
            assert_eq!(Species::from_name(s.name()), Some(s));
        }
        assert_eq!(Species::from_name("xe129"), None);
    }
}
