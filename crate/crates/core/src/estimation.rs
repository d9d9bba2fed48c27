//! The analysis chain: dip fitting, steepest-point selection, Poisson
//! maximum-likelihood count-to-delay inversion, CW/ACW reduction, weighted
//! slope fits, and the quantum/classical slope-ratio analysis.
//!
//! All routines are pure transformations over record collections.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{CountsRecord, Direction};

/// Which side of the dip center hosts the operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DipSide {
    #[default]
    #[serde(rename = "negative")]
    Negative,
    #[serde(rename = "positive")]
    Positive,
}

impl DipSide {
    fn sign(self) -> f64 {
        match self {
            DipSide::Negative => -1.0,
            DipSide::Positive => 1.0,
        }
    }
}

/// Result of fitting rate(x) = B(1 − V e^{−(x−x₀)²/(2s²)}) to a stage scan.
#[derive(Debug, Clone)]
pub struct DipFitResult {
    /// Baseline coincidence rate B, counts/s.
    pub baseline_rate: f64,
    /// Dip visibility V, in [0, 1].
    pub visibility: f64,
    /// Dip center x₀, m.
    pub center: f64,
    /// Gaussian width s of the count profile, m.
    pub width: f64,
    /// Fisher-approximation covariance of (B, V, x₀, s).
    pub covariance: Matrix4<f64>,
}

impl DipFitResult {
    /// Model coincidence rate at stage position x, counts/s.
    pub fn rate_at(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        self.baseline_rate * (1.0 - self.visibility * (-0.5 * u * u).exp())
    }

    /// d(rate)/dx at stage position x.
    pub fn rate_derivative(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        self.baseline_rate * self.visibility * (-0.5 * u * u).exp() * u / self.width
    }
}

/// Status of a maximum-likelihood delay estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateStatus {
    Ok,
    /// Observed rate at or below the dip bottom; estimate clipped to x₀.
    ClippedLow,
    /// Observed rate at or above the baseline; estimate clipped far out.
    ClippedHigh,
}

/// A stage-equivalent delay estimate with its Fisher standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayEstimate {
    /// Inferred dip displacement relative to the operating point, m.
    pub delay: f64,
    /// Standard deviation, m.
    pub std: f64,
    /// Coincidence counts the estimate was derived from.
    pub counts: f64,
    pub status: EstimateStatus,
}

/// A per-magnitude CW/ACW-reduced shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftEstimate {
    /// Rotation magnitude (configured convention units).
    pub rate: f64,
    /// Reduced dip shift, m.
    pub shift: f64,
    /// Standard deviation, m.
    pub std: f64,
}

/// Result of a weighted linear fit y = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std: f64,
    pub chi_square: f64,
}

const MAX_FIT_ITERATIONS: usize = 200;
/// Clip distance (in widths) for rates at or above baseline.
const CLIP_WIDTHS: f64 = 5.0;

/// Weighted nonlinear least squares of the Gaussian dip model.
///
/// Weights are Poisson variances taken from the modeled means (floored at one
/// count). Initialization is deterministic: baseline from the scan extremes,
/// center from the minimum-count position, width from the half-depth
/// crossings. Levenberg-Marquardt with bounded iterations; the covariance is
/// the inverse of the undamped normal matrix at the optimum.
pub fn fit_dip(records: &[CountsRecord]) -> Result<DipFitResult> {
    let data: Vec<(f64, f64, f64)> = records
        .iter()
        .map(|r| (r.stage_position, r.coincidences as f64, r.dwell))
        .collect();
    fit_dip_data(&data)
}

/// As [`fit_dip`], over raw `(stage position, counts, dwell)` triples. Counts
/// may be non-integer, which the noiseless pipelines use to carry expected
/// counts at full precision.
pub fn fit_dip_data(data: &[(f64, f64, f64)]) -> Result<DipFitResult> {
    if data.len() < 8 {
        return Err(Error::Domain(format!(
            "dip fit needs at least 8 scan points, got {}",
            data.len()
        )));
    }
    let mut params = initial_guess(data)?;
    let mut lambda = 1e-3;
    let mut chi2 = dip_chi_square(data, &params);

    for _ in 0..MAX_FIT_ITERATIONS {
        let (normal, gradient) = dip_normal_equations(data, &params);
        let mut converged = false;
        // Try increasing damping until a step improves chi-square.
        loop {
            let mut damped = normal;
            for k in 0..4 {
                damped[(k, k)] *= 1.0 + lambda;
            }
            let Some(inv) = damped.try_inverse() else {
                lambda *= 10.0;
                if lambda > 1e12 {
                    return Err(Error::Fit(format!(
                        "singular normal equations at chi2 = {chi2:.6e}"
                    )));
                }
                continue;
            };
            let step = inv * gradient;
            let trial = apply_step(&params, &step);
            let trial_chi2 = dip_chi_square(data, &trial);
            if trial_chi2 <= chi2 {
                let rel_step = (0..4)
                    .map(|k| (step[k] / (params[k].abs() + 1e-300)).abs())
                    .fold(0.0, f64::max);
                let rel_improvement = (chi2 - trial_chi2) / chi2.max(1e-300);
                params = trial;
                chi2 = trial_chi2;
                lambda = (lambda / 10.0).max(1e-12);
                if rel_step < 1e-12 || rel_improvement < 1e-14 {
                    converged = true;
                }
                break;
            }
            // No descent direction left. At the optimum (possibly with the
            // visibility pinned at its bound) the remaining step is tiny;
            // treat that as convergence, otherwise fail.
            let rel_step = (0..4)
                .map(|k| (step[k] / (params[k].abs() + 1e-300)).abs())
                .fold(0.0, f64::max);
            lambda *= 10.0;
            if lambda > 1e12 {
                if rel_step < 1e-6 || (trial_chi2 - chi2) < 1e-9 * chi2.max(1.0) {
                    converged = true;
                    break;
                }
                return Err(Error::Fit(format!(
                    "no descent step found at chi2 = {chi2:.6e}, \
                     params B={} V={} x0={} s={}",
                    params[0], params[1], params[2], params[3]
                )));
            }
        }
        if converged {
            let (normal, _) = dip_normal_equations(data, &params);
            let covariance = normal.try_inverse().ok_or_else(|| {
                Error::Fit("normal matrix is singular at the optimum".into())
            })?;
            return Ok(DipFitResult {
                baseline_rate: params[0],
                visibility: params[1],
                center: params[2],
                width: params[3].abs(),
                covariance,
            });
        }
    }
    Err(Error::Fit(format!(
        "dip fit did not converge within {MAX_FIT_ITERATIONS} iterations, chi2 = {chi2:.6e}"
    )))
}

fn model_counts(x: f64, dwell: f64, p: &Vector4<f64>) -> f64 {
    let u = (x - p[2]) / p[3];
    dwell * p[0] * (1.0 - p[1] * (-0.5 * u * u).exp())
}

fn dip_chi_square(data: &[(f64, f64, f64)], p: &Vector4<f64>) -> f64 {
    data.iter()
        .map(|&(x, n, dwell)| {
            let m = model_counts(x, dwell, p);
            let r = n - m;
            r * r / m.max(1.0)
        })
        .sum()
}

fn dip_normal_equations(
    data: &[(f64, f64, f64)],
    p: &Vector4<f64>,
) -> (Matrix4<f64>, Vector4<f64>) {
    let mut normal = Matrix4::zeros();
    let mut gradient = Vector4::zeros();
    for &(x, n, dwell) in data {
        let u = (x - p[2]) / p[3];
        let e = (-0.5 * u * u).exp();
        let m = dwell * p[0] * (1.0 - p[1] * e);
        let jac = Vector4::new(
            m / p[0],
            -dwell * p[0] * e,
            -dwell * p[0] * p[1] * e * u / p[3],
            -dwell * p[0] * p[1] * e * u * u / p[3],
        );
        let w = 1.0 / m.max(1.0);
        let r = n - m;
        for a in 0..4 {
            gradient[a] += w * jac[a] * r;
            for b in 0..4 {
                normal[(a, b)] += w * jac[a] * jac[b];
            }
        }
    }
    (normal, gradient)
}

fn apply_step(p: &Vector4<f64>, step: &Vector4<f64>) -> Vector4<f64> {
    let mut q = p + step;
    q[0] = q[0].max(1e-12); // baseline > 0
    q[1] = q[1].clamp(1e-9, 1.0); // visibility in (0, 1]
    q[3] = q[3].abs().max(1e-12); // width > 0
    q
}

fn initial_guess(data: &[(f64, f64, f64)]) -> Result<Vector4<f64>> {
    let rate = |&(_, n, dwell): &(f64, f64, f64)| n / dwell;
    let first = rate(data.first().unwrap());
    let last = rate(data.last().unwrap());
    let baseline = 0.5 * (first + last);
    if baseline <= 0.0 {
        return Err(Error::Fit("scan extremes carry no counts".into()));
    }
    let (min_idx, min_rate) = data
        .iter()
        .map(rate)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let center = data[min_idx].0;
    let visibility = (1.0 - min_rate / baseline).clamp(0.05, 1.0);

    // Half-depth crossings on both sides of the minimum.
    let target = min_rate + 0.5 * (baseline - min_rate);
    let left = data[..min_idx]
        .iter()
        .rev()
        .find(|d| rate(d) >= target)
        .map(|d| d.0);
    let right = data[min_idx..]
        .iter()
        .find(|d| rate(d) >= target)
        .map(|d| d.0);
    let span = data.last().unwrap().0 - data.first().unwrap().0;
    let half_width_factor = (2.0 * std::f64::consts::LN_2).sqrt();
    let width = match (left, right) {
        (Some(l), Some(r)) if r > l => (r - l) / (2.0 * half_width_factor),
        _ => span.abs() / 6.0,
    };
    if width <= 0.0 {
        return Err(Error::Fit("could not estimate an initial dip width".into()));
    }
    if span.abs() < 3.0 * width {
        return Err(Error::Domain(format!(
            "scan span {span:.3e} m covers fewer than 3 estimated widths ({width:.3e} m)"
        )));
    }
    Ok(Vector4::new(baseline, visibility, center, width))
}

/// Stage position of maximum |d rate/dx|: x₀ ± s for the Gaussian model.
pub fn steepest_point(fit: &DipFitResult, side: DipSide) -> f64 {
    fit.center + side.sign() * fit.width
}

/// Poisson maximum-likelihood inversion of one counts record against the
/// fitted dip, on the monotonic branch containing the steepest point.
pub fn mle_delay(record: &CountsRecord, fit: &DipFitResult, side: DipSide) -> DelayEstimate {
    mle_delay_from_counts(record.coincidences as f64, record.dwell, fit, side)
}

/// As [`mle_delay`] over a raw (possibly non-integer) count.
///
/// The ML estimate of a single Poisson count against a monotonic rate model
/// is the rate-model inversion λ(x̂)·τ = n; the standard deviation is
/// √λ / (dλ/dx) from the Fisher information.
pub fn mle_delay_from_counts(
    counts: f64,
    dwell: f64,
    fit: &DipFitResult,
    side: DipSide,
) -> DelayEstimate {
    let rate = counts / dwell;
    let bottom = fit.baseline_rate * (1.0 - fit.visibility);
    let operating_point = steepest_point(fit, side);

    let (u, status) = if rate <= bottom {
        (0.0, EstimateStatus::ClippedLow)
    } else if rate >= fit.baseline_rate {
        (CLIP_WIDTHS, EstimateStatus::ClippedHigh)
    } else {
        let q = (1.0 - rate / fit.baseline_rate) / fit.visibility;
        ((-2.0 * q.ln()).sqrt(), EstimateStatus::Ok)
    };
    let inverted = fit.center + side.sign() * u * fit.width;
    // Fisher std from the derivative at the inversion point; keep it finite
    // near the dip bottom where the derivative vanishes.
    let u_for_std = u.max(1e-3);
    let x_for_std = fit.center + side.sign() * u_for_std * fit.width;
    let slope = fit.rate_derivative(x_for_std).abs();
    let std = (counts.max(1.0)).sqrt() / (dwell * slope);
    DelayEstimate {
        delay: operating_point - inverted,
        std,
        counts,
        status,
    }
}

/// Mean of repeated delay estimates with the standard error over runs
/// (sample std / √n); for a single estimate the Fisher std passes through.
pub fn average_delays(estimates: &[DelayEstimate]) -> Result<DelayEstimate> {
    if estimates.is_empty() {
        return Err(Error::Grouping("no estimates to average".into()));
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().map(|e| e.delay).sum::<f64>() / n;
    let counts = estimates.iter().map(|e| e.counts).sum::<f64>();
    let std = if estimates.len() >= 2 {
        let var = estimates
            .iter()
            .map(|e| (e.delay - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt()
    } else {
        estimates[0].std
    };
    let status = if estimates
        .iter()
        .all(|e| e.status == EstimateStatus::Ok)
    {
        EstimateStatus::Ok
    } else if estimates.iter().any(|e| e.status == EstimateStatus::ClippedHigh) {
        EstimateStatus::ClippedHigh
    } else {
        EstimateStatus::ClippedLow
    };
    Ok(DelayEstimate {
        delay: mean,
        std,
        counts,
        status,
    })
}

/// How paired CW/ACW estimates are reduced to a per-magnitude shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReductionMethod {
    /// (CW − ACW)/2: cancels every sign-even systematic. Default.
    #[default]
    #[serde(rename = "half-difference")]
    HalfDifference,
    /// (|CW| + |ACW|)/2: the absolute-average variant used for the classical
    /// fringe data.
    #[serde(rename = "absolute-average")]
    AbsoluteAverage,
}

/// Reduce paired CW/ACW delay estimates to per-magnitude shifts.
///
/// Each magnitude must appear with exactly one clockwise and one
/// anticlockwise (already run-averaged) estimate.
pub fn cw_acw_reduce(
    entries: &[(f64, Direction, DelayEstimate)],
    method: ReductionMethod,
) -> Result<Vec<ShiftEstimate>> {
    let mut groups: Vec<(f64, Option<DelayEstimate>, Option<DelayEstimate>)> = Vec::new();
    for &(magnitude, direction, estimate) in entries {
        let slot = match groups.iter_mut().find(|g| g.0 == magnitude) {
            Some(g) => g,
            None => {
                groups.push((magnitude, None, None));
                groups.last_mut().unwrap()
            }
        };
        let cell = match direction {
            Direction::Clockwise => &mut slot.1,
            Direction::Anticlockwise => &mut slot.2,
        };
        if cell.is_some() {
            return Err(Error::Grouping(format!(
                "duplicate {} estimate for magnitude {magnitude}",
                direction.label()
            )));
        }
        *cell = Some(estimate);
    }
    groups
        .into_iter()
        .map(|(magnitude, cw, acw)| {
            let (cw, acw) = match (cw, acw) {
                (Some(c), Some(a)) => (c, a),
                _ => {
                    return Err(Error::Grouping(format!(
                        "magnitude {magnitude} is missing a CW/ACW partner"
                    )))
                }
            };
            let shift = match method {
                ReductionMethod::HalfDifference => (cw.delay - acw.delay) / 2.0,
                ReductionMethod::AbsoluteAverage => (cw.delay.abs() + acw.delay.abs()) / 2.0,
            };
            Ok(ShiftEstimate {
                rate: magnitude,
                shift,
                std: (cw.std * cw.std + acw.std * acw.std).sqrt() / 2.0,
            })
        })
        .collect()
}

/// Weighted least-squares line fit with the slope uncertainty from the
/// normal-equations covariance.
///
/// When every `y_std` is zero (noiseless model data) unit weights are used
/// and the uncertainty is scaled from the residuals, which vanishes for an
/// exact line.
pub fn fit_linear(x: &[f64], y: &[f64], y_std: &[f64]) -> Result<SlopeFit> {
    if x.len() != y.len() || x.len() != y_std.len() {
        return Err(Error::Domain("mismatched input lengths".into()));
    }
    if x.len() < 2 {
        return Err(Error::Fit("need at least 2 points for a line".into()));
    }
    let unit_weights = y_std.iter().any(|&s| s <= 0.0);
    let weights: Vec<f64> = y_std
        .iter()
        .map(|&s| if unit_weights { 1.0 } else { 1.0 / (s * s) })
        .collect();

    let sw: f64 = weights.iter().sum();
    let swx: f64 = weights.iter().zip(x).map(|(w, x)| w * x).sum();
    let swxx: f64 = weights.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let swy: f64 = weights.iter().zip(y).map(|(w, y)| w * y).sum();
    let swxy: f64 = weights
        .iter()
        .zip(x)
        .zip(y)
        .map(|((w, x), y)| w * x * y)
        .sum();
    let delta = sw * swxx - swx * swx;
    if delta.abs() <= 1e-12 * sw * swxx.max(1e-300) {
        return Err(Error::Fit("degenerate design: all x values coincide".into()));
    }
    let slope = (sw * swxy - swx * swy) / delta;
    let intercept = (swxx * swy - swx * swxy) / delta;
    let chi_square: f64 = weights
        .iter()
        .zip(x)
        .zip(y)
        .map(|((w, x), y)| w * (y - slope * x - intercept).powi(2))
        .sum();
    let mut slope_var = sw / delta;
    if unit_weights {
        // Estimate the data variance from the residuals.
        let dof = (x.len() as f64 - 2.0).max(1.0);
        slope_var *= chi_square / dof;
    }
    Ok(SlopeFit {
        slope,
        intercept,
        slope_std: slope_var.max(0.0).sqrt(),
        chi_square,
    })
}

/// Ratio (λ/2π) / (quantum slope / classical slope).
///
/// For model data this returns the group index exactly; for the published
/// slopes it reproduces the reported ~1.48 factor.
pub fn ratio_analysis(
    quantum_slope: f64,
    classical_slope: f64,
    wavelength: f64,
) -> Result<f64> {
    if classical_slope == 0.0 {
        return Err(Error::Domain("classical slope is zero".into()));
    }
    if wavelength <= 0.0 {
        return Err(Error::Domain(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(wavelength / (2.0 * std::f64::consts::PI) / (quantum_slope / classical_slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Poisson};

    const BASELINE: f64 = 2500.0;
    const CENTER: f64 = 3.0e-6;
    const WIDTH: f64 = 1.5e-5;

    fn truth() -> DipFitResult {
        DipFitResult {
            baseline_rate: BASELINE,
            visibility: 1.0,
            center: CENTER,
            width: WIDTH,
            covariance: Matrix4::zeros(),
        }
    }

    fn scan_positions() -> Vec<f64> {
        (-30..=30).map(|i| CENTER + i as f64 * 2e-6).collect()
    }

    fn noiseless_scan(dwell: f64) -> Vec<(f64, f64, f64)> {
        let t = truth();
        scan_positions()
            .iter()
            .map(|&x| (x, t.rate_at(x) * dwell, dwell))
            .collect()
    }

    #[test]
    fn noiseless_dip_recovered_to_high_precision() {
        let fit = fit_dip_data(&noiseless_scan(1.0)).unwrap();
        assert_relative_eq!(fit.baseline_rate, BASELINE, max_relative = 1e-9);
        assert_relative_eq!(fit.visibility, 1.0, max_relative = 1e-9);
        assert_abs_diff_eq!(fit.center, CENTER, epsilon = 1e-9 * WIDTH);
        assert_relative_eq!(fit.width, WIDTH, max_relative = 1e-9);
    }

    #[test]
    fn poisson_noise_center_within_five_std() {
        let t = truth();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<(f64, f64, f64)> = scan_positions()
                .iter()
                .map(|&x| {
                    let mean = t.rate_at(x) * 4.0;
                    let n = if mean > 0.0 {
                        Poisson::new(mean).unwrap().sample(&mut rng)
                    } else {
                        0.0
                    };
                    (x, n, 4.0)
                })
                .collect();
            let fit = fit_dip_data(&data).unwrap();
            let center_std = fit.covariance[(2, 2)].sqrt();
            assert!(
                (fit.center - CENTER).abs() < 5.0 * center_std,
                "seed {seed}: center off by {:.3e} vs std {:.3e}",
                (fit.center - CENTER).abs(),
                center_std
            );
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let data = noiseless_scan(1.0)[..7].to_vec();
        assert!(matches!(fit_dip_data(&data), Err(Error::Domain(_))));
    }

    #[test]
    fn narrow_scan_rejected() {
        let t = truth();
        let data: Vec<(f64, f64, f64)> = (-5..=5)
            .map(|i| {
                let x = CENTER + i as f64 * 2e-6;
                (x, t.rate_at(x), 1.0)
            })
            .collect();
        assert!(fit_dip_data(&data).is_err());
    }

    #[test]
    fn steepest_point_is_one_width_out() {
        let fit = truth();
        assert_relative_eq!(steepest_point(&fit, DipSide::Negative), CENTER - WIDTH);
        assert_relative_eq!(steepest_point(&fit, DipSide::Positive), CENTER + WIDTH);
        // Grid check: |rate'| is maximal at the returned point.
        let d_star = fit.rate_derivative(steepest_point(&fit, DipSide::Negative)).abs();
        for i in -400..=400 {
            let x = CENTER + i as f64 * 1e-7;
            assert!(fit.rate_derivative(x).abs() <= d_star * (1.0 + 1e-9));
        }
    }

    #[test]
    fn mle_at_operating_point_gives_zero_delay() {
        let fit = truth();
        let x_op = steepest_point(&fit, DipSide::Negative);
        let est = mle_delay_from_counts(fit.rate_at(x_op) * 10.0, 10.0, &fit, DipSide::Negative);
        assert_abs_diff_eq!(est.delay, 0.0, epsilon = 1e-12 * WIDTH);
        assert_eq!(est.status, EstimateStatus::Ok);
        assert!(est.std > 0.0);
    }

    #[test]
    fn mle_recovers_injected_shift() {
        let fit = truth();
        let x_op = steepest_point(&fit, DipSide::Negative);
        // A dip displaced by +100 nm is sampled at the fixed stage position.
        let shift = 100e-9;
        let expected = fit.rate_at(x_op - shift) * 10.0;
        let est = mle_delay_from_counts(expected, 10.0, &fit, DipSide::Negative);
        assert_abs_diff_eq!(est.delay, shift, epsilon = 1e-9 * WIDTH);
    }

    #[test]
    fn mle_clips_out_of_range_counts() {
        let fit = truth();
        let low = mle_delay_from_counts(0.0, 1.0, &fit, DipSide::Negative);
        assert_eq!(low.status, EstimateStatus::ClippedLow);
        let high = mle_delay_from_counts(2.0 * BASELINE, 1.0, &fit, DipSide::Negative);
        assert_eq!(high.status, EstimateStatus::ClippedHigh);
        assert!(low.std.is_finite() && high.std.is_finite());
    }

    #[test]
    fn doubling_dwell_halves_variance() {
        let fit = truth();
        let x_op = steepest_point(&fit, DipSide::Negative);
        let rate = fit.rate_at(x_op);
        let short = mle_delay_from_counts(rate * 10.0, 10.0, &fit, DipSide::Negative);
        let long = mle_delay_from_counts(rate * 20.0, 20.0, &fit, DipSide::Negative);
        assert_relative_eq!(
            short.std * short.std / (long.std * long.std),
            2.0,
            max_relative = 1e-9
        );
    }

    fn estimate(delay: f64) -> DelayEstimate {
        DelayEstimate {
            delay,
            std: 1e-8,
            counts: 1000.0,
            status: EstimateStatus::Ok,
        }
    }

    #[test]
    fn reduce_cancels_even_and_passes_odd() {
        let even = 7e-8;
        let odd = 3e-8;
        let entries = vec![
            (1.0, Direction::Clockwise, estimate(even + odd)),
            (1.0, Direction::Anticlockwise, estimate(even - odd)),
        ];
        let shifts = cw_acw_reduce(&entries, ReductionMethod::HalfDifference).unwrap();
        assert_abs_diff_eq!(shifts[0].shift, odd, epsilon = 1e-20);

        let pure_even = vec![
            (1.0, Direction::Clockwise, estimate(even)),
            (1.0, Direction::Anticlockwise, estimate(even)),
        ];
        let shifts = cw_acw_reduce(&pure_even, ReductionMethod::HalfDifference).unwrap();
        assert_abs_diff_eq!(shifts[0].shift, 0.0, epsilon = 1e-20);
    }

    #[test]
    fn reduce_requires_complete_pairs() {
        let entries = vec![(1.0, Direction::Clockwise, estimate(1e-8))];
        assert!(matches!(
            cw_acw_reduce(&entries, ReductionMethod::HalfDifference),
            Err(Error::Grouping(_))
        ));
    }

    #[test]
    fn absolute_average_variant() {
        let entries = vec![
            (1.0, Direction::Clockwise, estimate(5e-8)),
            (1.0, Direction::Anticlockwise, estimate(-3e-8)),
        ];
        let shifts = cw_acw_reduce(&entries, ReductionMethod::AbsoluteAverage).unwrap();
        assert_abs_diff_eq!(shifts[0].shift, 4e-8, epsilon = 1e-20);
    }

    #[test]
    fn exact_line_recovered_with_vanishing_uncertainty() {
        let x = [0.5, 1.0, 1.5, 2.0];
        let y: Vec<f64> = x.iter().map(|&x| 2.09e-7 * x).collect();
        let fit = fit_linear(&x, &y, &[0.0; 4]).unwrap();
        assert_relative_eq!(fit.slope, 2.09e-7, max_relative = 1e-12);
        assert_abs_diff_eq!(fit.slope_std, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_design_rejected() {
        let x = [1.0, 1.0, 1.0];
        let y = [1.0, 2.0, 3.0];
        assert!(fit_linear(&x, &y, &[0.1; 3]).is_err());
    }

    #[test]
    fn weighted_fit_uncertainty_matches_closed_form() {
        // Equal stds sigma: var(slope) = sigma^2 / sum((x - xbar)^2).
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.1, 1.05, 2.0, 2.9];
        let sigma = 0.1;
        let fit = fit_linear(&x, &y, &[sigma; 4]).unwrap();
        let xbar = 1.5;
        let sxx: f64 = x.iter().map(|&x| (x - xbar) * (x - xbar)).sum();
        assert_relative_eq!(fit.slope_std, sigma / sxx.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn ratio_reproduces_published_factor() {
        let classical = 167.0_f64.to_radians();
        let r = ratio_analysis(200e-9, classical, 642e-9).unwrap();
        assert_abs_diff_eq!(r, 1.49, epsilon = 0.01);
        assert!((r - 1.478).abs() < 0.09);
    }

    #[test]
    fn ratio_of_model_slopes_is_group_index() {
        // Quantum slope c·dt/n_g, classical slope (2πc/λ)·dt.
        let n_g = 1.45;
        let dt = 1.0103e-15;
        let lambda = 642e-9;
        let q = crate::SPEED_OF_LIGHT * dt / n_g;
        let c = 2.0 * std::f64::consts::PI * crate::SPEED_OF_LIGHT / lambda * dt;
        assert_relative_eq!(
            ratio_analysis(q, c, lambda).unwrap(),
            n_g,
            max_relative = 1e-12
        );
        assert!(ratio_analysis(q, 0.0, lambda).is_err());
    }
}
