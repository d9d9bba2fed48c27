//! Experiment configuration schema.
//!
//! The on-disk format is TOML with typed sections; unknown keys are rejected
//! and every physical value carries its unit in the field name.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{DipSide, ReductionMethod};
use crate::physics::{PlatformGeometry, RateConvention};
use crate::scenarios::SatelliteScenario;
use crate::sim::{DetectorModel, RunPlan, SimPhysics, SourceModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub loop_diameter_m: f64,
    pub turns: u32,
    pub fiber_length_m: f64,
    pub phase_index: f64,
    pub group_index: f64,
    #[serde(default)]
    pub free_space_allowance_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub pair_rate_hz: f64,
    pub arm_transmission: [f64; 2],
    pub center_wavelength_m: f64,
    pub mode_overlap_visibility: f64,
    pub spectral_width_rad_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub efficiency: [f64; 2],
    pub dark_rate_hz: f64,
    pub coincidence_window_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub rotation_magnitudes: Vec<f64>,
    pub runs_per_setting: u32,
    pub dwell_time_s: f64,
    /// Stage scan half-width for dip acquisition, m.
    pub scan_half_width_m: f64,
    pub scan_points: u32,
    #[serde(default)]
    pub dip_side: DipSide,
    #[serde(default)]
    pub reduction: ReductionMethod,
    #[serde(default)]
    pub systematic_even_coefficient_s: f64,
    #[serde(default)]
    pub drift_std_s_per_sqrt_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalConfig {
    pub wavelength_m: f64,
    /// Per-run Gaussian phase readout noise, rad.
    pub phase_noise_std_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsConfig {
    pub convention: RateConvention,
    pub master_seed: u64,
    #[serde(default = "default_true")]
    pub sagnac_enabled: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteConfig {
    pub earth_angular_momentum_kg_m2_per_s: f64,
    pub orbital_radius_m: f64,
    pub gravitational_constant_m3_per_kg_s2: f64,
    pub revolutions: u64,
}

/// Full experiment configuration: geometry, models, run plan, conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub source: SourceConfig,
    pub detector: DetectorConfig,
    pub run: RunConfig,
    pub classical: ClassicalConfig,
    pub options: OptionsConfig,
    pub satellite: SatelliteConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.platform_geometry()?;
        self.source_model().validate()?;
        self.detector_model().validate()?;
        if self.source.spectral_width_rad_per_s <= 0.0 {
            return Err(Error::Domain("spectral width must be positive".into()));
        }
        if self.run.runs_per_setting < 1 {
            return Err(Error::Domain("runs_per_setting must be >= 1".into()));
        }
        if self.run.dwell_time_s <= 0.0 {
            return Err(Error::Domain("dwell time must be positive".into()));
        }
        if self.run.scan_points < 8 {
            return Err(Error::Domain("scan needs at least 8 points".into()));
        }
        if self.run.scan_half_width_m <= 0.0 {
            return Err(Error::Domain("scan half-width must be positive".into()));
        }
        if self.classical.wavelength_m <= 0.0 {
            return Err(Error::Domain("classical wavelength must be positive".into()));
        }
        if self.satellite.orbital_radius_m <= 0.0 {
            return Err(Error::Domain("orbital radius must be positive".into()));
        }
        if self.satellite.revolutions < 1 {
            return Err(Error::Domain("revolutions must be >= 1".into()));
        }
        Ok(())
    }

    pub fn platform_geometry(&self) -> Result<PlatformGeometry> {
        let mut g = PlatformGeometry::new(
            self.geometry.loop_diameter_m,
            self.geometry.turns,
            self.geometry.fiber_length_m,
            self.geometry.phase_index,
            self.geometry.group_index,
        )?;
        g.free_space_allowance = self.geometry.free_space_allowance_s;
        Ok(g)
    }

    pub fn source_model(&self) -> SourceModel {
        SourceModel {
            pair_rate: self.source.pair_rate_hz,
            arm_transmission: self.source.arm_transmission,
            photon_center_wavelength: self.source.center_wavelength_m,
            mode_overlap_visibility: self.source.mode_overlap_visibility,
        }
    }

    pub fn detector_model(&self) -> DetectorModel {
        DetectorModel {
            efficiency: self.detector.efficiency,
            dark_rate: self.detector.dark_rate_hz,
            coincidence_window: self.detector.coincidence_window_s,
        }
    }

    pub fn sim_physics(&self) -> Result<SimPhysics> {
        Ok(SimPhysics {
            geometry: self.platform_geometry()?,
            spectral_width: self.source.spectral_width_rad_per_s,
            convention: self.options.convention,
            sagnac_enabled: self.options.sagnac_enabled,
        })
    }

    /// Symmetric stage positions for the dip-acquisition scan, m.
    pub fn scan_positions(&self) -> Vec<f64> {
        let n = self.run.scan_points as i64;
        let half = self.run.scan_half_width_m;
        (0..n)
            .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn run_plan(&self, stage_position: f64) -> RunPlan {
        RunPlan {
            rotation_magnitudes: self.run.rotation_magnitudes.clone(),
            runs_per_setting: self.run.runs_per_setting,
            dwell_time: self.run.dwell_time_s,
            stage_position,
            systematic_even_coefficient: self.run.systematic_even_coefficient_s,
            drift_std: self.run.drift_std_s_per_sqrt_s,
        }
    }

    pub fn satellite_scenario(&self) -> SatelliteScenario {
        SatelliteScenario {
            earth_angular_momentum: self.satellite.earth_angular_momentum_kg_m2_per_s,
            orbital_radius: self.satellite.orbital_radius_m,
            gravitational_constant: self.satellite.gravitational_constant_m3_per_kg_s2,
            revolutions: self.satellite.revolutions,
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::scenarios::lab_preset;

    #[test]
    fn lab_preset_validates() {
        lab_preset().validate().unwrap();
    }

    #[test]
    fn scan_positions_are_symmetric() {
        let cfg = lab_preset();
        let xs = cfg.scan_positions();
        assert_eq!(xs.len(), cfg.run.scan_points as usize);
        let (first, last) = (xs[0], *xs.last().unwrap());
        assert!((first + last).abs() < 1e-12 * last.abs());
    }
}
