//! Pure, deterministic interferometer physics.
//!
//! Everything in this module is a total or domain-checked function of its
//! inputs; there is no hidden state and all values are immutable after
//! construction, so concurrent evaluation is safe.
//!
//! The Sagnac delay is computed as `Δt = 4AΩ/c²` with `Ω` in rad/s. Two input
//! conventions are supported (see [`RateConvention`]): `physical-hz` maps an
//! input `f` in Hz to `Ω = 2πf`, which makes the delay the textbook
//! `8πAf/c²`; `paper-f` feeds the input straight through as `Ω`, which is
//! the convention that reproduces the published classical (170 deg/Hz) and
//! quantum (~200 nm/Hz) slopes of the reference experiment.
//!
//! # Example
//!
//! The coincidence probability of a separable Gaussian photon pair agrees
//! with the closed-form dip:
//!
//! ```
//! use rotating_hom::physics::{coincidence_probability, gaussian_dip, JointSpectralAmplitude};
//!
//! let sigma = 1e13;
//! let psi = JointSpectralAmplitude::separable_gaussian(2.7e15, sigma).unwrap();
//! let delay = 2.0 / sigma;
//! let quad = coincidence_probability(&psi, delay).unwrap();
//! assert!((quad - gaussian_dip(sigma, delay)).abs() < 1e-9);
//! ```

mod coincidence;
mod jsa;
pub mod quadrature;

pub use coincidence::{
    coincidence_probability, coincidence_probability_discrete_oracle,
    coincidence_probability_gaussian, gaussian_dip,
};
pub use jsa::{JointSpectralAmplitude, TabulatedAmplitude};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// How a user-supplied rotation-rate value maps to an angular rate Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateConvention {
    /// The input value is already the angular rate Ω in rad/s. Reproduces
    /// the reference experiment's measured slopes and is the default.
    #[serde(rename = "paper-f")]
    PaperF,
    /// The input value is a rotational frequency f in Hz; Ω = 2πf.
    #[serde(rename = "physical-hz")]
    PhysicalHz,
}

/// A signed platform rotation rate together with its input convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationRate {
    pub value: f64,
    pub convention: RateConvention,
}

impl RotationRate {
    pub fn new(value: f64, convention: RateConvention) -> Self {
        Self { value, convention }
    }

    /// Effective angular rate Ω in rad/s. Sign follows the input value.
    pub fn angular_rate(&self) -> f64 {
        match self.convention {
            RateConvention::PaperF => self.value,
            RateConvention::PhysicalHz => 2.0 * std::f64::consts::PI * self.value,
        }
    }
}

/// Loop/fiber geometry and medium indices of the interferometer platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformGeometry {
    /// Diameter of the fiber loop, m.
    pub loop_diameter: f64,
    /// Number of fiber turns around the loop.
    pub turns: u32,
    /// Total fiber length, m.
    pub fiber_length: f64,
    /// Phase refractive index of the fiber (carried for completeness; the
    /// classical phase shift uses the vacuum-wavelength relation).
    pub phase_index: f64,
    /// Group refractive index of the fiber; scales time delays into stage
    /// displacements.
    pub group_index: f64,
    /// Extra common-path free-space propagation time, s.
    pub free_space_allowance: f64,
}

impl PlatformGeometry {
    pub fn new(
        loop_diameter: f64,
        turns: u32,
        fiber_length: f64,
        phase_index: f64,
        group_index: f64,
    ) -> Result<Self> {
        if loop_diameter <= 0.0 {
            return Err(Error::Domain(format!(
                "loop diameter must be positive, got {loop_diameter}"
            )));
        }
        if fiber_length <= 0.0 {
            return Err(Error::Domain(format!(
                "fiber length must be positive, got {fiber_length}"
            )));
        }
        if phase_index < 1.0 || group_index < 1.0 {
            return Err(Error::Domain(format!(
                "refractive indices must be >= 1, got phase {phase_index}, group {group_index}"
            )));
        }
        Ok(Self {
            loop_diameter,
            turns,
            fiber_length,
            phase_index,
            group_index,
            free_space_allowance: 0.0,
        })
    }

    /// Effective enclosed area A = N·π·r², m².
    pub fn enclosed_area(&self) -> f64 {
        let r = self.loop_diameter / 2.0;
        self.turns as f64 * std::f64::consts::PI * r * r
    }

    /// Common-path time of flight t₀ = L·n_g/c plus the free-space allowance.
    pub fn common_flight_time(&self) -> f64 {
        self.fiber_length * self.group_index / SPEED_OF_LIGHT + self.free_space_allowance
    }
}

/// Times of flight of the two counter-propagating paths for one rotation rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDelays {
    /// Clockwise (co-rotating) time of flight t⁽⁺⁾, s.
    pub t_plus: f64,
    /// Anticlockwise (counter-rotating) time of flight t⁽⁻⁾, s.
    pub t_minus: f64,
    /// Stage-controlled extra delay δt_p on the clockwise arm, s.
    pub stage_delay: f64,
}

impl PathDelays {
    /// Sagnac delay Δt = t⁽⁺⁾ − t⁽⁻⁾, s.
    pub fn sagnac_delta(&self) -> f64 {
        self.t_plus - self.t_minus
    }

    /// Total interferometer delay T = Δt + δt_p, s.
    pub fn total_delay(&self) -> f64 {
        self.sagnac_delta() + self.stage_delay
    }
}

/// Effective enclosed area of `turns` fiber loops of the given diameter, m².
///
/// ```
/// let a = rotating_hom::physics::enclosed_area(35, 0.908).unwrap();
/// assert!((a - 22.66).abs() < 0.01);
/// ```
pub fn enclosed_area(turns: u32, loop_diameter: f64) -> Result<f64> {
    if loop_diameter <= 0.0 {
        return Err(Error::Domain(format!(
            "loop diameter must be positive, got {loop_diameter}"
        )));
    }
    let r = loop_diameter / 2.0;
    Ok(turns as f64 * std::f64::consts::PI * r * r)
}

/// Rotation-induced arrival-time difference Δt = 4AΩ/c² between the two
/// counter-propagating paths, s.
///
/// Under [`RateConvention::PhysicalHz`] this is the textbook `8πAf/c²`.
pub fn sagnac_delay(area: f64, rate: &RotationRate) -> f64 {
    4.0 * area * rate.angular_rate() / (SPEED_OF_LIGHT * SPEED_OF_LIGHT)
}

/// Classical Sagnac fringe phase Δφ = (2πc/λ)·Δt, rad.
///
/// Uses the vacuum wavelength: the classical fringe phase does not depend on
/// the fiber index.
pub fn classical_phase_shift(delta_t: f64, wavelength: f64) -> Result<f64> {
    if wavelength <= 0.0 {
        return Err(Error::Domain(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / wavelength * delta_t)
}

/// Times of flight from source to beamsplitter for both paths.
///
/// The Sagnac delay is split symmetrically about the common time t₀, so
/// `t_plus - t_minus` equals [`sagnac_delay`] for the geometry's area.
pub fn flight_times(
    geometry: &PlatformGeometry,
    rate: &RotationRate,
    stage_delay: f64,
) -> PathDelays {
    let t0 = geometry.common_flight_time();
    let dt = sagnac_delay(geometry.enclosed_area(), rate);
    PathDelays {
        t_plus: t0 + dt / 2.0,
        t_minus: t0 - dt / 2.0,
        stage_delay,
    }
}

/// Phase accumulated by the two-photon amplitude before the beamsplitter:
/// φ = ω₁(t⁽⁺⁾ + δt_p) + ω₂·t⁽⁻⁾, rad.
pub fn accumulated_phase(omega1: f64, omega2: f64, delays: &PathDelays) -> f64 {
    omega1 * (delays.t_plus + delays.stage_delay) + omega2 * delays.t_minus
}

/// Stage displacement Δx = c·Δt/n_g that recenters the HOM dip after a
/// time delay Δt, m.
pub fn dip_shift_stage(delta_t: f64, group_index: f64) -> Result<f64> {
    if group_index < 1.0 {
        return Err(Error::Domain(format!(
            "group index must be >= 1, got {group_index}"
        )));
    }
    Ok(SPEED_OF_LIGHT * delta_t / group_index)
}

/// Delay δt_p produced by moving the scan stage to position `x`: the stage
/// shortens the clockwise fiber path, so δt_p = −x·n_g/c and the dip minimum
/// sits at `x = ` [`dip_shift_stage`]`(Δt)`.
pub fn stage_position_to_delay(position: f64, group_index: f64) -> f64 {
    -position * group_index / SPEED_OF_LIGHT
}
