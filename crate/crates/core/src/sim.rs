//! Monte Carlo simulation of the photon-counting experiment.
//!
//! Counts are Poisson-distributed over fixed dwell windows. Every record is
//! generated from its own counter-based RNG stream keyed by
//! `(master seed, setting index, run index)`, so the full record set is
//! deterministic and independent of evaluation order; platform drift uses a
//! dedicated stream and is laid out over the chronological run sequence
//! before any sampling happens.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{
    gaussian_dip, sagnac_delay, stage_position_to_delay, PlatformGeometry, RateConvention,
    RotationRate,
};

/// Photon-pair source model. The daughter wavelength defaults to 710 nm,
/// forced by energy conservation from the 355 nm pump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    /// Generated pair rate at the source, pairs/s.
    pub pair_rate: f64,
    /// Transmission probability of each interferometer arm.
    pub arm_transmission: [f64; 2],
    /// Center wavelength of the down-converted photons, m.
    pub photon_center_wavelength: f64,
    /// Mode-overlap visibility of the interference, in [0, 1].
    pub mode_overlap_visibility: f64,
}

/// Single-photon detector model (efficiency, dark counts, coincidence window).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Detection efficiency of each detector, in [0, 1].
    pub efficiency: [f64; 2],
    /// Dark count rate per detector, counts/s.
    pub dark_rate: f64,
    /// Coincidence window, s.
    pub coincidence_window: f64,
}

impl SourceModel {
    pub fn validate(&self) -> Result<()> {
        if self.pair_rate < 0.0 {
            return Err(Error::Domain("pair rate must be non-negative".into()));
        }
        for t in self.arm_transmission {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Domain(format!("arm transmission {t} not in [0,1]")));
            }
        }
        if !(0.0..=1.0).contains(&self.mode_overlap_visibility) {
            return Err(Error::Domain(format!(
                "mode overlap visibility {} not in [0,1]",
                self.mode_overlap_visibility
            )));
        }
        if self.photon_center_wavelength <= 0.0 {
            return Err(Error::Domain("photon wavelength must be positive".into()));
        }
        Ok(())
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        for e in self.efficiency {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Domain(format!("efficiency {e} not in [0,1]")));
            }
        }
        if self.dark_rate < 0.0 {
            return Err(Error::Domain("dark rate must be non-negative".into()));
        }
        if self.coincidence_window <= 0.0 {
            return Err(Error::Domain("coincidence window must be positive".into()));
        }
        Ok(())
    }
}

/// Rotation sense of the platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "cw")]
    Clockwise,
    #[serde(rename = "acw")]
    Anticlockwise,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Clockwise => 1.0,
            Direction::Anticlockwise => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Clockwise => "cw",
            Direction::Anticlockwise => "acw",
        }
    }
}

/// Plan for a rotation protocol: which magnitudes to visit, how many repeat
/// runs per setting, and which imperfections to inject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    /// Rotation magnitudes to visit (each run CW and ACW), in the configured
    /// rate convention's units.
    pub rotation_magnitudes: Vec<f64>,
    /// Repeat runs per (magnitude, direction) setting.
    pub runs_per_setting: u32,
    /// Counting dwell per run, s.
    pub dwell_time: f64,
    /// Fixed stage position for rotation runs, m.
    pub stage_position: f64,
    /// Sign-even systematic delay coefficient (centrifugal deformation),
    /// s per rate². Contributes identically to CW and ACW.
    pub systematic_even_coefficient: f64,
    /// Random-walk standard deviation of the common-path delay, s per √s.
    pub drift_std: f64,
}

impl RunPlan {
    pub fn validate(&self) -> Result<()> {
        if self.runs_per_setting < 1 {
            return Err(Error::Domain("runs_per_setting must be >= 1".into()));
        }
        if self.dwell_time <= 0.0 {
            return Err(Error::Domain("dwell time must be positive".into()));
        }
        if self.drift_std < 0.0 {
            return Err(Error::Domain("drift std must be non-negative".into()));
        }
        Ok(())
    }
}

/// Physics configuration shared by all simulated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPhysics {
    pub geometry: PlatformGeometry,
    /// Spectral width σ of the separable-Gaussian photon amplitude, rad/s.
    pub spectral_width: f64,
    pub convention: RateConvention,
    /// When false the Sagnac term is suppressed (systematics-only runs).
    pub sagnac_enabled: bool,
}

impl SimPhysics {
    /// Sagnac delay for a signed rate value, honoring the enable flag.
    pub fn sagnac_delta(&self, rate_value: f64) -> f64 {
        if !self.sagnac_enabled {
            return 0.0;
        }
        sagnac_delay(
            self.geometry.enclosed_area(),
            &RotationRate::new(rate_value, self.convention),
        )
    }

    /// Ideal coincidence probability at a stage position, including any extra
    /// injected delay (systematics, drift).
    pub fn probability_at(&self, stage_position: f64, extra_delay: f64, rate_value: f64) -> f64 {
        let total = self.sagnac_delta(rate_value)
            + stage_position_to_delay(stage_position, self.geometry.group_index)
            + extra_delay;
        gaussian_dip(self.spectral_width, total)
    }
}

/// One dwell of simulated detector data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsRecord {
    /// Delay-stage position, m.
    pub stage_position: f64,
    /// Signed rotation rate (configured convention units).
    pub rotation_rate: f64,
    pub direction: Direction,
    /// Dwell time, s.
    pub dwell: f64,
    pub coincidences: u64,
    pub singles: [u64; 2],
    /// RNG stream that produced this record.
    pub stream_id: u64,
}

/// Expected detector rates for a given ideal coincidence probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    /// Coincidence rate including accidentals, counts/s.
    pub coincidences: f64,
    /// Singles rates per detector, counts/s.
    pub singles: [f64; 2],
}

/// Map the ideal coincidence probability `p` to detector rates.
///
/// The ideal dip is rescaled by the mode-overlap visibility V through
/// p_eff = (1 − V(1 − 2p))/2, then scaled by arm transmissions and detector
/// efficiencies; accidental coincidences S₁S₂·τ_w are added on top.
pub fn expected_rates(p: f64, source: &SourceModel, detector: &DetectorModel) -> RatePair {
    let v = source.mode_overlap_visibility;
    let p_eff = 0.5 * (1.0 - v * (1.0 - 2.0 * p));
    let [t1, t2] = source.arm_transmission;
    let [e1, e2] = detector.efficiency;
    let s1 = source.pair_rate * t1 * e1 + detector.dark_rate;
    let s2 = source.pair_rate * t2 * e2 + detector.dark_rate;
    let true_coincidences = source.pair_rate * t1 * t2 * e1 * e2 * p_eff;
    let accidentals = s1 * s2 * detector.coincidence_window;
    RatePair {
        coincidences: true_coincidences + accidentals,
        singles: [s1, s2],
    }
}

/// Stream id for a (master seed, setting, run) triple: two rounds of
/// splitmix64 over the packed key.
pub fn stream_id(master_seed: u64, setting: u64, run: u64) -> u64 {
    let mut z = master_seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(setting)
        .wrapping_mul(0xbf58476d1ce4e5b9)
        .wrapping_add(run);
    for _ in 0..2 {
        z = z.wrapping_add(0x9e3779b97f4a7c15);
        let mut x = z;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = x ^ (x >> 31);
    }
    z
}

/// Setting index reserved for the drift random walk.
const DRIFT_STREAM: u64 = u64::MAX;

fn poisson_sample(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u64
}

/// Draw one counts record from Poisson statistics at the given rates.
pub fn sample_counts(
    rates: &RatePair,
    dwell: f64,
    stream: u64,
    stage_position: f64,
    rotation_rate: f64,
    direction: Direction,
) -> CountsRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let coincidences = poisson_sample(&mut rng, rates.coincidences * dwell);
    let singles = [
        poisson_sample(&mut rng, rates.singles[0] * dwell),
        poisson_sample(&mut rng, rates.singles[1] * dwell),
    ];
    CountsRecord {
        stage_position,
        rotation_rate,
        direction,
        dwell,
        coincidences,
        singles,
        stream_id: stream,
    }
}

/// Scan the delay stage over `positions` at a fixed rotation rate; one record
/// per position.
pub fn run_dip_scan(
    physics: &SimPhysics,
    source: &SourceModel,
    detector: &DetectorModel,
    positions: &[f64],
    rate_value: f64,
    dwell: f64,
    master_seed: u64,
) -> Result<Vec<CountsRecord>> {
    source.validate()?;
    detector.validate()?;
    if dwell <= 0.0 {
        return Err(Error::Domain("dwell time must be positive".into()));
    }
    let direction = if rate_value < 0.0 {
        Direction::Anticlockwise
    } else {
        Direction::Clockwise
    };
    Ok(positions
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = physics.probability_at(x, 0.0, rate_value);
            let rates = expected_rates(p, source, detector);
            sample_counts(
                &rates,
                dwell,
                stream_id(master_seed, i as u64, 0),
                x,
                rate_value,
                direction,
            )
        })
        .collect())
}

/// Run the CW/ACW rotation protocol at a fixed stage position.
///
/// For every magnitude, both directions are visited `runs_per_setting` times.
/// The sign-even systematic and the common drift affect CW and ACW equally;
/// only the Sagnac term flips with direction.
pub fn run_rotation_protocol(
    physics: &SimPhysics,
    source: &SourceModel,
    detector: &DetectorModel,
    plan: &RunPlan,
    master_seed: u64,
) -> Result<Vec<CountsRecord>> {
    source.validate()?;
    detector.validate()?;
    plan.validate()?;

    let runs = plan.runs_per_setting as u64;
    let settings = plan.rotation_magnitudes.len() as u64 * 2;
    let drift = drift_trajectory(
        plan.drift_std,
        plan.dwell_time,
        (settings * runs) as usize,
        master_seed,
    );

    let mut records = Vec::with_capacity((settings * runs) as usize);
    for (m_idx, &magnitude) in plan.rotation_magnitudes.iter().enumerate() {
        for (d_idx, direction) in [Direction::Clockwise, Direction::Anticlockwise]
            .into_iter()
            .enumerate()
        {
            let setting = m_idx as u64 * 2 + d_idx as u64;
            let rate_value = direction.sign() * magnitude;
            let even_delay = plan.systematic_even_coefficient * magnitude * magnitude;
            for run in 0..runs {
                let chrono = (setting * runs + run) as usize;
                let extra = even_delay + drift[chrono];
                let p = physics.probability_at(plan.stage_position, extra, rate_value);
                let rates = expected_rates(p, source, detector);
                records.push(sample_counts(
                    &rates,
                    plan.dwell_time,
                    stream_id(master_seed, setting, run),
                    plan.stage_position,
                    rate_value,
                    direction,
                ));
            }
        }
    }
    Ok(records)
}

/// Common-path delay random walk sampled once per dwell, from its own stream.
fn drift_trajectory(drift_std: f64, dwell: f64, steps: usize, master_seed: u64) -> Vec<f64> {
    if drift_std == 0.0 || steps == 0 {
        return vec![0.0; steps];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(stream_id(master_seed, DRIFT_STREAM, 0));
    let step = Normal::new(0.0, drift_std * dwell.sqrt()).expect("positive std");
    let mut level = 0.0;
    (0..steps)
        .map(|_| {
            level += step.sample(&mut rng);
            level
        })
        .collect()
}
