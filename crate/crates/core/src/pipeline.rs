//! End-to-end compositions of the physics, simulation, and estimation layers.
//!
//! Each pipeline exists in a sampled (Poisson / Gaussian noise) and a
//! noiseless variant. The noiseless variants propagate expected values at
//! full f64 precision through exactly the same estimation code and are used
//! for model-level slope checks.
//!
//! # Example
//!
//! ```
//! use rotating_hom::pipeline::quantum_rotation_pipeline;
//! use rotating_hom::scenarios::lab_preset;
//!
//! let result = quantum_rotation_pipeline(&lab_preset(), true).unwrap();
//! // Dip shift per unit rotation rate, in nm.
//! assert!((result.slope.slope * 1e9 - 208.9).abs() < 0.5);
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::estimation::{
    average_delays, cw_acw_reduce, fit_dip, fit_dip_data, fit_linear, mle_delay,
    mle_delay_from_counts, steepest_point, DelayEstimate, DipFitResult, ShiftEstimate, SlopeFit,
};
use crate::physics::{classical_phase_shift, sagnac_delay, RotationRate};
use crate::sim::{
    expected_rates, run_dip_scan, run_rotation_protocol, stream_id, CountsRecord, Direction,
};

// Seed salts keep the dip acquisition, rotation protocol, and classical
// calibration on disjoint RNG streams for one master seed.
const DIP_SEED_SALT: u64 = 0x11;
const PROTOCOL_SEED_SALT: u64 = 0x22;
const CLASSICAL_SEED_SALT: u64 = 0x33;

/// One reduced classical fringe measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    /// Rotation magnitude (configured convention units).
    pub rate: f64,
    /// CW/ACW absolute-averaged Sagnac phase, rad.
    pub phase: f64,
    /// Standard deviation, rad.
    pub std: f64,
}

/// Output of the full quantum rotation pipeline.
#[derive(Debug, Clone)]
pub struct QuantumRotationResult {
    pub dip_fit: DipFitResult,
    /// Fixed operating stage position used for the rotation runs, m.
    pub operating_point: f64,
    pub shifts: Vec<ShiftEstimate>,
    /// Line fit of shift (m) versus rotation magnitude.
    pub slope: SlopeFit,
}

/// Simulate a stage scan of the dip at zero rotation and fit it.
pub fn simulate_dip_scan(cfg: &ExperimentConfig) -> Result<(Vec<CountsRecord>, DipFitResult)> {
    cfg.validate()?;
    let physics = cfg.sim_physics()?;
    let records = run_dip_scan(
        &physics,
        &cfg.source_model(),
        &cfg.detector_model(),
        &cfg.scan_positions(),
        0.0,
        cfg.run.dwell_time_s,
        stream_id(cfg.options.master_seed, DIP_SEED_SALT, 0),
    )?;
    let fit = fit_dip(&records)?;
    Ok((records, fit))
}

/// Fit the dip to its own expected counts (noiseless acquisition).
pub fn model_dip_fit(cfg: &ExperimentConfig) -> Result<DipFitResult> {
    cfg.validate()?;
    let physics = cfg.sim_physics()?;
    let source = cfg.source_model();
    let detector = cfg.detector_model();
    let data: Vec<(f64, f64, f64)> = cfg
        .scan_positions()
        .iter()
        .map(|&x| {
            let p = physics.probability_at(x, 0.0, 0.0);
            let rates = expected_rates(p, &source, &detector);
            (x, rates.coincidences * cfg.run.dwell_time_s, cfg.run.dwell_time_s)
        })
        .collect();
    fit_dip_data(&data)
}

/// Full quantum pipeline: acquire and fit the dip, park the stage at the
/// steepest point, run the CW/ACW rotation protocol, invert counts to delays,
/// reduce, and fit the shift-versus-rate line.
pub fn quantum_rotation_pipeline(
    cfg: &ExperimentConfig,
    noiseless: bool,
) -> Result<QuantumRotationResult> {
    cfg.validate()?;
    let side = cfg.run.dip_side;
    let dip_fit = if noiseless {
        model_dip_fit(cfg)?
    } else {
        simulate_dip_scan(cfg)?.1
    };
    let operating_point = steepest_point(&dip_fit, side);

    let physics = cfg.sim_physics()?;
    let source = cfg.source_model();
    let detector = cfg.detector_model();

    let mut entries: Vec<(f64, Direction, DelayEstimate)> = Vec::new();
    if noiseless {
        for &magnitude in &cfg.run.rotation_magnitudes {
            for direction in [Direction::Clockwise, Direction::Anticlockwise] {
                let even = cfg.run.systematic_even_coefficient_s * magnitude * magnitude;
                let p = physics.probability_at(operating_point, even, direction.sign() * magnitude);
                let rates = expected_rates(p, &source, &detector);
                let est = mle_delay_from_counts(
                    rates.coincidences * cfg.run.dwell_time_s,
                    cfg.run.dwell_time_s,
                    &dip_fit,
                    side,
                );
                entries.push((magnitude, direction, est));
            }
        }
    } else {
        let plan = cfg.run_plan(operating_point);
        let records = run_rotation_protocol(
            &physics,
            &source,
            &detector,
            &plan,
            stream_id(cfg.options.master_seed, PROTOCOL_SEED_SALT, 0),
        )?;
        for &magnitude in &cfg.run.rotation_magnitudes {
            for direction in [Direction::Clockwise, Direction::Anticlockwise] {
                let estimates: Vec<DelayEstimate> = records
                    .iter()
                    .filter(|r| r.direction == direction && r.rotation_rate.abs() == magnitude)
                    .map(|r| mle_delay(r, &dip_fit, side))
                    .collect();
                entries.push((magnitude, direction, average_delays(&estimates)?));
            }
        }
    }

    let shifts = cw_acw_reduce(&entries, cfg.run.reduction)?;
    let rates: Vec<f64> = shifts.iter().map(|s| s.rate).collect();
    let values: Vec<f64> = shifts.iter().map(|s| s.shift).collect();
    let stds: Vec<f64> = if noiseless {
        vec![0.0; shifts.len()]
    } else {
        shifts.iter().map(|s| s.std).collect()
    };
    let slope = fit_linear(&rates, &values, &stds)?;
    Ok(QuantumRotationResult {
        dip_fit,
        operating_point,
        shifts,
        slope,
    })
}

/// Classical calibration: per magnitude, CW and ACW fringe-phase
/// measurements (Gaussian readout noise), absolute-averaged, then a weighted
/// line fit of phase (rad) versus rotation magnitude.
pub fn classical_calibration(
    cfg: &ExperimentConfig,
    noiseless: bool,
) -> Result<(Vec<PhasePoint>, SlopeFit)> {
    cfg.validate()?;
    let geometry = cfg.platform_geometry()?;
    let area = geometry.enclosed_area();
    let lambda = cfg.classical.wavelength_m;
    let runs = cfg.run.runs_per_setting as usize;

    let model_phase = |signed_rate: f64| -> Result<f64> {
        let dt = if cfg.options.sagnac_enabled {
            sagnac_delay(area, &RotationRate::new(signed_rate, cfg.options.convention))
        } else {
            0.0
        };
        classical_phase_shift(dt, lambda)
    };

    let mut points = Vec::new();
    for (m_idx, &magnitude) in cfg.run.rotation_magnitudes.iter().enumerate() {
        let mut means = [0.0; 2];
        let mut stds = [0.0; 2];
        for (d_idx, direction) in [Direction::Clockwise, Direction::Anticlockwise]
            .into_iter()
            .enumerate()
        {
            let truth = model_phase(direction.sign() * magnitude)?;
            if noiseless || cfg.classical.phase_noise_std_rad == 0.0 {
                means[d_idx] = truth;
                stds[d_idx] = 0.0;
                continue;
            }
            let seed = stream_id(
                cfg.options.master_seed,
                CLASSICAL_SEED_SALT,
                (m_idx * 2 + d_idx) as u64,
            );
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, cfg.classical.phase_noise_std_rad).expect("positive std");
            let samples: Vec<f64> = (0..runs).map(|_| truth + noise.sample(&mut rng)).collect();
            let mean = samples.iter().sum::<f64>() / runs as f64;
            let var = if runs >= 2 {
                samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0)
            } else {
                cfg.classical.phase_noise_std_rad.powi(2)
            };
            means[d_idx] = mean;
            stds[d_idx] = (var / runs as f64).sqrt();
        }
        points.push(PhasePoint {
            rate: magnitude,
            phase: (means[0].abs() + means[1].abs()) / 2.0,
            std: (stds[0] * stds[0] + stds[1] * stds[1]).sqrt() / 2.0,
        });
    }

    let rates: Vec<f64> = points.iter().map(|p| p.rate).collect();
    let phases: Vec<f64> = points.iter().map(|p| p.phase).collect();
    let stds: Vec<f64> = points.iter().map(|p| p.std).collect();
    let slope = fit_linear(&rates, &phases, &stds)?;
    Ok((points, slope))
}
