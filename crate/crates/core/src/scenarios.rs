//! Canned configurations: the laboratory rig preset and the satellite
//! gravitomagnetic-delay extension.
//!
//! # Example
//!
//! ```
//! use rotating_hom::scenarios::{revolutions_needed, SatelliteScenario};
//! use rotating_hom::SPEED_OF_LIGHT;
//!
//! let scenario = SatelliteScenario::earth_default();
//! let revs = revolutions_needed(&scenario, 100e-9 / SPEED_OF_LIGHT).unwrap();
//! assert_eq!(revs, 49);
//! ```

use serde::{Deserialize, Serialize};

use crate::config::{
    ClassicalConfig, DetectorConfig, ExperimentConfig, GeometryConfig, OptionsConfig, RunConfig,
    SatelliteConfig, SourceConfig,
};
use crate::error::{Error, Result};
use crate::estimation::{DipSide, ReductionMethod};
use crate::physics::RateConvention;
use crate::SPEED_OF_LIGHT;

/// Order-of-magnitude gravitomagnetic delay quoted in the literature for a
/// single Earth revolution, s. The bare GJ/(Rc⁴) estimate below comes out
/// roughly 15x smaller; the unstated prefactor is reported alongside rather
/// than reconciled.
pub const LITERATURE_GRAVITOMAGNETIC_DELAY_S: f64 = 1e-16;

/// Satellite constellation around a spinning mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteScenario {
    /// Angular momentum J of the central body, kg·m²/s.
    pub earth_angular_momentum: f64,
    /// Orbital radius R from the body center, m.
    pub orbital_radius: f64,
    /// Gravitational constant G, m³/(kg·s²).
    pub gravitational_constant: f64,
    /// Number of full revolutions of the photon paths.
    pub revolutions: u64,
}

impl SatelliteScenario {
    /// Low Earth orbit with standard Earth values.
    pub fn earth_default() -> Self {
        Self {
            earth_angular_momentum: 5.86e33,
            orbital_radius: 7.0e6,
            gravitational_constant: 6.674e-11,
            revolutions: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.orbital_radius <= 0.0 {
            return Err(Error::Domain("orbital radius must be positive".into()));
        }
        if self.revolutions < 1 {
            return Err(Error::Domain("revolutions must be >= 1".into()));
        }
        Ok(())
    }

    /// Gravitomagnetic arrival-time difference per revolution,
    /// Δt = GJ/(Rc⁴), s. Order-of-magnitude estimator: the ∼1 prefactor is
    /// taken as exactly 1.
    pub fn delay_per_revolution(&self) -> f64 {
        self.gravitational_constant * self.earth_angular_momentum
            / (self.orbital_radius * SPEED_OF_LIGHT.powi(4))
    }
}

/// Total gravitomagnetic delay over the scenario's revolutions, s.
pub fn gravitomagnetic_delay(scenario: &SatelliteScenario) -> f64 {
    scenario.revolutions as f64 * scenario.delay_per_revolution()
}

/// Number of revolutions needed to accumulate at least `target_delay`.
pub fn revolutions_needed(scenario: &SatelliteScenario, target_delay: f64) -> Result<u64> {
    if target_delay <= 0.0 {
        return Err(Error::Domain("target delay must be positive".into()));
    }
    let per_rev = scenario.delay_per_revolution();
    if per_rev <= 0.0 {
        return Err(Error::Domain("per-revolution delay is not positive".into()));
    }
    Ok((target_delay / per_rev).ceil() as u64)
}

/// The laboratory rig: 100 m fiber wound 35 times around a 0.908 m loop,
/// n = 1.45, classical calibration at 642 nm, photon pairs at 710 nm from a
/// 355 nm pump, 50 runs per rotation setting.
pub fn lab_preset() -> ExperimentConfig {
    let sigma = 1.0e13; // rad/s; stage-units dip width c/(√2 σ n_g) ≈ 15 µm
    ExperimentConfig {
        geometry: GeometryConfig {
            loop_diameter_m: 0.908,
            turns: 35,
            fiber_length_m: 100.0,
            phase_index: 1.45,
            group_index: 1.45,
            free_space_allowance_s: 0.0,
        },
        source: SourceConfig {
            pair_rate_hz: 5.0e6,
            arm_transmission: [0.1, 0.1],
            center_wavelength_m: 710e-9,
            mode_overlap_visibility: 1.0,
            spectral_width_rad_per_s: sigma,
        },
        detector: DetectorConfig {
            efficiency: [0.5, 0.5],
            dark_rate_hz: 100.0,
            coincidence_window_s: 3.0e-9,
        },
        run: RunConfig {
            rotation_magnitudes: vec![0.5, 1.0, 1.5, 2.0],
            runs_per_setting: 50,
            dwell_time_s: 1.0,
            scan_half_width_m: 6.0e-5,
            scan_points: 41,
            dip_side: DipSide::Negative,
            reduction: ReductionMethod::HalfDifference,
            systematic_even_coefficient_s: 0.0,
            drift_std_s_per_sqrt_s: 0.0,
        },
        classical: ClassicalConfig {
            wavelength_m: 642e-9,
            phase_noise_std_rad: 0.05,
        },
        options: OptionsConfig {
            convention: RateConvention::PaperF,
            master_seed: 1,
            sagnac_enabled: true,
        },
        satellite: SatelliteConfig {
            earth_angular_momentum_kg_m2_per_s: 5.86e33,
            orbital_radius_m: 7.0e6,
            gravitational_constant_m3_per_kg_s2: 6.674e-11,
            revolutions: 1,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn lab_preset_area_matches_published_value() {
        let cfg = lab_preset();
        let area = cfg.platform_geometry().unwrap().enclosed_area();
        assert_abs_diff_eq!(area, 22.66, epsilon = 5e-3);
        assert!((area - 22.7).abs() < 0.05);
    }

    #[test]
    fn earth_scenario_delay_per_revolution() {
        let s = SatelliteScenario::earth_default();
        assert_abs_diff_eq!(s.delay_per_revolution(), 6.9e-18, epsilon = 0.05e-18);
    }

    #[test]
    fn gravitomagnetic_scalings() {
        let s = SatelliteScenario::earth_default();
        let base = gravitomagnetic_delay(&s);

        let far = SatelliteScenario {
            orbital_radius: 10.0 * s.orbital_radius,
            ..s
        };
        assert_relative_eq!(gravitomagnetic_delay(&far), base / 10.0, max_relative = 1e-12);

        let many = SatelliteScenario {
            revolutions: 7,
            ..s
        };
        assert_relative_eq!(gravitomagnetic_delay(&many), 7.0 * base, max_relative = 1e-12);

        let heavy = SatelliteScenario {
            earth_angular_momentum: 3.0 * s.earth_angular_momentum,
            ..s
        };
        assert_relative_eq!(gravitomagnetic_delay(&heavy), 3.0 * base, max_relative = 1e-12);
    }

    #[test]
    fn revolutions_for_target_delay() {
        let s = SatelliteScenario::earth_default();
        let per_rev = s.delay_per_revolution();
        assert_eq!(revolutions_needed(&s, per_rev).unwrap(), 1);
        assert_eq!(revolutions_needed(&s, 10.0 * per_rev).unwrap(), 10);
        // 100 nm of path at c, the resolution target of the bench experiment.
        let target = 100e-9 / SPEED_OF_LIGHT;
        assert_eq!(revolutions_needed(&s, target).unwrap(), 49);
        assert!(revolutions_needed(&s, 0.0).is_err());
    }
}
