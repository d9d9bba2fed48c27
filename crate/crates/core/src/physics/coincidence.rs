//! HOM coincidence probability by three independent routes: closed-form
//! Gaussian dip, deterministic 2-D quadrature of the overlap integral, and a
//! brute-force discretized mode-operator calculation.
//!
//! The overlap integral is
//!
//! p(T) = 1/2 − 1/2 ∫∫ ψ*(ω₂,ω₁) ψ(ω₁,ω₂) e^{i(ω₂−ω₁)T} dω₁ dω₂
//!
//! with T the total interferometer delay (Sagnac plus stage).

use num_complex::Complex64;

use super::jsa::{JointSpectralAmplitude, TabulatedAmplitude, NORM_TOLERANCE};
use super::quadrature::{gauss_legendre, map_to_interval};
use super::{accumulated_phase, sagnac_delay, PathDelays, RotationRate};

/// Relative tolerance requested from the adaptive quadrature.
const QUADRATURE_RTOL: f64 = 1e-8;
/// Largest tensor-product order tried before giving up.
const MAX_QUADRATURE_ORDER: usize = 1024;
/// Largest grid accepted by the discrete mode-operator oracle.
const MAX_ORACLE_BINS: usize = 128;

use crate::error::{Error, Result};

/// Closed-form HOM dip for a separable Gaussian amplitude of width σ:
/// p = (1 − e^{−σ²T²}) / 2.
pub fn gaussian_dip(width: f64, total_delay: f64) -> f64 {
    let st = width * total_delay;
    0.5 * (1.0 - (-st * st).exp())
}

/// Closed-form coincidence probability at stage delay δt_p under rotation:
/// T = Δt(rate) + δt_p with Δt from [`sagnac_delay`].
pub fn coincidence_probability_gaussian(
    stage_delay: f64,
    rate: &RotationRate,
    area: f64,
    width: f64,
) -> Result<f64> {
    if width <= 0.0 {
        return Err(Error::Domain(format!(
            "spectral width must be positive, got {width}"
        )));
    }
    Ok(gaussian_dip(width, sagnac_delay(area, rate) + stage_delay))
}

/// Coincidence probability from the overlap integral.
///
/// Separable Gaussians are integrated by tensor-product Gauss-Legendre on
/// [μ−8σ, μ+8σ]² with the order doubled until the estimated relative error is
/// below 1e-8; tabulated amplitudes are summed on their own grid. The result
/// is clamped to [0, 1] against rounding.
pub fn coincidence_probability(psi: &JointSpectralAmplitude, total_delay: f64) -> Result<f64> {
    let overlap = match psi {
        JointSpectralAmplitude::SeparableGaussian { center, width } => {
            gaussian_overlap_quadrature(*center, *width, total_delay)?
        }
        JointSpectralAmplitude::Tabulated(tab) => tabulated_overlap(tab, total_delay)?,
    };
    Ok((0.5 - 0.5 * overlap.re).clamp(0.0, 1.0))
}

fn gaussian_overlap_quadrature(center: f64, width: f64, total_delay: f64) -> Result<Complex64> {
    // ψ real separable: ψ*(ω₂,ω₁)ψ(ω₁,ω₂) = |g(ω₁)|²|g(ω₂)|².
    let s2 = width * width;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * s2).sqrt();
    let density = |w: f64| norm * (-(w - center).powi(2) / (2.0 * s2)).exp();

    let lo = (center - 8.0 * width).max(0.0);
    let hi = center + 8.0 * width;

    let mut previous: Option<Complex64> = None;
    let mut order = 16;
    while order <= MAX_QUADRATURE_ORDER {
        let (mut x, mut w) = gauss_legendre(order);
        map_to_interval(&mut x, &mut w, lo, hi);
        // Separable integrand: accumulate the 1-D transforms and take the
        // product, which is algebraically identical to the full 2-D tensor
        // sum but O(n) instead of O(n²).
        let mut plus = Complex64::ZERO; // ∫ |g|² e^{+iωT}
        let mut minus = Complex64::ZERO; // ∫ |g|² e^{−iωT}
        for (xi, wi) in x.iter().zip(&w) {
            let d = wi * density(*xi);
            let phase = Complex64::from_polar(1.0, xi * total_delay);
            plus += d * phase;
            minus += d * phase.conj();
        }
        let value = minus * plus;
        if let Some(prev) = previous {
            let err = (value - prev).norm();
            if err <= QUADRATURE_RTOL * value.norm().max(1e-12) {
                return Ok(value);
            }
        }
        previous = Some(value);
        order *= 2;
    }
    Err(Error::Numerical(format!(
        "coincidence quadrature did not converge below rtol {QUADRATURE_RTOL} \
         by order {MAX_QUADRATURE_ORDER} (sigma*T = {:.3})",
        width * total_delay
    )))
}

fn tabulated_overlap(psi: &TabulatedAmplitude, total_delay: f64) -> Result<Complex64> {
    let norm = psi.norm_squared();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Domain(format!(
            "amplitude is not L2-normalized: ||psi||^2 = {norm}"
        )));
    }
    let n = psi.bins();
    let grid = psi.grid();
    let dw = psi.spacing();
    let mut sum = Complex64::ZERO;
    for i in 0..n {
        for j in 0..n {
            let kernel = psi.value(j, i).conj() * psi.value(i, j);
            let phase = Complex64::from_polar(1.0, (grid[j] - grid[i]) * total_delay);
            sum += kernel * phase;
        }
    }
    Ok(sum * dw * dw)
}

/// Brute-force finite-mode route: builds the phased two-photon amplitude
/// tensor, applies the beamsplitter mode transform term by term, and sums the
/// squared coincidence (distinct-port) amplitudes of the post-beamsplitter
/// state. Same-port a†a†/b†b† terms are annihilated by the coincidence
/// projector and are dropped.
pub fn coincidence_probability_discrete_oracle(
    psi: &TabulatedAmplitude,
    delays: &PathDelays,
) -> Result<f64> {
    let n = psi.bins();
    if n > MAX_ORACLE_BINS {
        return Err(Error::Resource(format!(
            "oracle grid has {n} bins per axis, limit is {MAX_ORACLE_BINS}"
        )));
    }
    let norm = psi.norm_squared();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Domain(format!(
            "amplitude is not L2-normalized: ||psi||^2 = {norm}"
        )));
    }
    let grid = psi.grid();
    let dw = psi.spacing();

    // Amplitude of a†(ω_i) b†(ω_j) |0> in the post-beamsplitter state.
    let mut coincidence_amp = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            let phi = accumulated_phase(grid[i], grid[j], delays);
            let c = psi.value(i, j) * Complex64::from_polar(1.0, -phi) * (0.5 * dw);
            // a†(ω_i) b†(ω_j) -> [i a†(ω_i) + b†(ω_i)] [a†(ω_j) + i b†(ω_j)] / 2:
            // the cross-port pieces are −a†(ω_i)b†(ω_j) and +a†(ω_j)b†(ω_i).
            coincidence_amp[i * n + j] -= c;
            coincidence_amp[j * n + i] += c;
        }
    }
    let p: f64 = coincidence_amp.iter().map(|a| a.norm_sqr()).sum();
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{RateConvention, RotationRate};
    use approx::assert_abs_diff_eq;

    const MU: f64 = 2.7e15;
    const SIGMA: f64 = 1e13;

    fn delays_for(total: f64) -> PathDelays {
        PathDelays {
            t_plus: total,
            t_minus: 0.0,
            stage_delay: 0.0,
        }
    }

    #[test]
    fn symmetric_amplitude_bunches_at_zero_delay() {
        let psi = JointSpectralAmplitude::separable_gaussian(MU, SIGMA).unwrap();
        let p = coincidence_probability(&psi, 0.0).unwrap();
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let psi = JointSpectralAmplitude::separable_gaussian(MU, SIGMA).unwrap();
        for st in [0.1, 0.5, 1.0, 2.0, 3.5, 5.0] {
            let t = st / SIGMA;
            let p = coincidence_probability(&psi, t).unwrap();
            let closed = gaussian_dip(SIGMA, t);
            assert!(
                (p - closed).abs() <= 1e-6 * closed.max(1e-9),
                "sigma*T = {st}: quadrature {p} vs closed form {closed}"
            );
        }
    }

    #[test]
    fn far_delay_gives_distinguishable_half() {
        let psi = JointSpectralAmplitude::separable_gaussian(MU, SIGMA).unwrap();
        let p = coincidence_probability(&psi, 8.0 / SIGMA).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn closed_form_dip_limits() {
        // Compensated delay: dip bottom.
        let rate = RotationRate::new(1.0, RateConvention::PaperF);
        let dt = sagnac_delay(22.7, &rate);
        let p = coincidence_probability_gaussian(-dt, &rate, 22.7, SIGMA).unwrap();
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-15);

        let p = coincidence_probability_gaussian(1.0, &rate, 22.7, SIGMA).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);

        assert!(coincidence_probability_gaussian(0.0, &rate, 22.7, -1.0).is_err());
    }

    #[test]
    fn antisymmetric_amplitude_antibunches() {
        let psi = TabulatedAmplitude::antisymmetric_gaussian(MU, SIGMA, 3.0 * SIGMA, 64).unwrap();
        let p = coincidence_probability_discrete_oracle(&psi, &delays_for(0.0)).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-9);
        let p = coincidence_probability(&JointSpectralAmplitude::Tabulated(psi), 0.0).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn two_bin_hand_calculations() {
        // Equal amplitudes: perfect bunching at T = 0.
        let grid = vec![1.0, 2.0];
        let a = 0.5; // 4 a² dω² = 1 with dω = 1
        let amp = vec![Complex64::new(a, 0.0); 4];
        let psi = TabulatedAmplitude::new(grid.clone(), amp).unwrap();
        let p = coincidence_probability_discrete_oracle(&psi, &delays_for(0.0)).unwrap();
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-12);

        // Antisymmetric two-bin state: perfect anti-bunching at T = 0.
        let b = std::f64::consts::FRAC_1_SQRT_2;
        let amp = vec![
            Complex64::ZERO,
            Complex64::new(b, 0.0),
            Complex64::new(-b, 0.0),
            Complex64::ZERO,
        ];
        let psi = TabulatedAmplitude::new(grid, amp).unwrap();
        let p = coincidence_probability_discrete_oracle(&psi, &delays_for(0.0)).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn oracle_matches_overlap_sum_on_shared_grid() {
        let psi = TabulatedAmplitude::gaussian(MU, SIGMA, 96).unwrap();
        for st in [0.0, 0.7, 2.1, 4.9] {
            let t = st / SIGMA;
            let oracle = coincidence_probability_discrete_oracle(&psi, &delays_for(t)).unwrap();
            let overlap =
                coincidence_probability(&JointSpectralAmplitude::Tabulated(psi.clone()), t)
                    .unwrap();
            assert!(
                (oracle - overlap).abs() <= 1e-6 * overlap.max(1e-9),
                "sigma*T = {st}: oracle {oracle} vs overlap {overlap}"
            );
        }
    }

    #[test]
    fn oracle_ignores_common_flight_time() {
        // A global phase from the common path must not move the dip.
        let psi = TabulatedAmplitude::gaussian(MU, SIGMA, 64).unwrap();
        let t = 1.3 / SIGMA;
        let bare = coincidence_probability_discrete_oracle(&psi, &delays_for(t)).unwrap();
        let with_common = coincidence_probability_discrete_oracle(
            &psi,
            &PathDelays {
                t_plus: 4.835e-7 + t,
                t_minus: 4.835e-7,
                stage_delay: 0.0,
            },
        )
        .unwrap();
        // Large common phases cost a few digits of f64 argument reduction.
        assert_abs_diff_eq!(bare, with_common, epsilon = 1e-6);
    }

    #[test]
    fn oracle_grid_limit_enforced() {
        let psi = TabulatedAmplitude::gaussian(MU, SIGMA, 129).unwrap();
        assert!(matches!(
            coincidence_probability_discrete_oracle(&psi, &delays_for(0.0)),
            Err(Error::Resource(_))
        ));
    }
}
