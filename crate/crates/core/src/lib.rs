//! Hong-Ou-Mandel interference on a rotating platform: physics, synthetic
//! photon-counting experiments, and the estimation chain that turns
//! coincidence counts into delay and phase slopes versus rotation rate.
//!
//! The library is organized around the experiment it models:
//!
//! - [`physics`] — pure, deterministic functions: Sagnac delay, accumulated
//!   phases, and HOM coincidence probabilities (closed form, 2-D quadrature,
//!   and a brute-force discretized mode-operator route).
//! - [`sim`] — Monte Carlo photon counting: source/detector models, dwell-based
//!   Poisson sampling, stage scans, and clockwise/anticlockwise rotation
//!   protocols with drift and sign-even systematics.
//! - [`estimation`] — dip fitting, steepest-point selection, maximum-likelihood
//!   count-to-delay inversion, CW/ACW reduction, weighted slope fits, and the
//!   quantum/classical slope-ratio analysis.
//! - [`scenarios`] — the laboratory rig preset and the satellite
//!   gravitomagnetic-delay calculator.
//! - [`pipeline`] — end-to-end compositions used by the CLI and the
//!   acceptance suite.
//!
//! # Example
//!
//! ```
//! use rotating_hom::physics::{enclosed_area, sagnac_delay, RotationRate, RateConvention};
//!
//! let area = enclosed_area(35, 0.908).unwrap();
//! assert!((area - 22.66).abs() < 0.05);
//!
//! // Delay per unit rotation rate under the paper-f convention.
//! let dt = sagnac_delay(area, &RotationRate::new(1.0, RateConvention::PaperF));
//! assert!(dt > 0.0);
//! ```

pub mod config;
pub mod error;
pub mod estimation;
pub mod physics;
pub mod pipeline;
pub mod scenarios;
pub mod sim;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
