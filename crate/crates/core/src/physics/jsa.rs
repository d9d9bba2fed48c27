//! Joint spectral amplitude of the two-photon state.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the L² norm of an accepted amplitude.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// ψ(ω₁, ω₂): either a separable Gaussian or a tabulated complex amplitude on
/// a uniform frequency grid. Both variants are L²-normalized on construction.
#[derive(Debug, Clone)]
pub enum JointSpectralAmplitude {
    /// ψ(ω₁,ω₂) = g(ω₁)g(ω₂) with g(ω) = (2πσ²)^{-1/4} e^{-(ω-μ)²/(4σ²)}.
    SeparableGaussian {
        /// Spectral center μ, rad/s.
        center: f64,
        /// Spectral width σ, rad/s.
        width: f64,
    },
    Tabulated(TabulatedAmplitude),
}

impl JointSpectralAmplitude {
    /// Separable Gaussian amplitude; requires σ > 0 and μ ≥ 10σ (the
    /// closed-form dip assumes μ ≫ σ so the ω ≥ 0 truncation is negligible).
    pub fn separable_gaussian(center: f64, width: f64) -> Result<Self> {
        if width <= 0.0 {
            return Err(Error::Domain(format!(
                "spectral width must be positive, got {width}"
            )));
        }
        if center < 10.0 * width {
            return Err(Error::Domain(format!(
                "spectral center {center} must be at least 10 widths ({}) above zero",
                10.0 * width
            )));
        }
        Ok(Self::SeparableGaussian { center, width })
    }

    /// The single-mode Gaussian spectral density |g(ω)|² for the separable
    /// variant, or `None` for tabulated amplitudes.
    pub fn marginal_density(&self, omega: f64) -> Option<f64> {
        match self {
            Self::SeparableGaussian { center, width } => {
                let s2 = width * width;
                let norm = 1.0 / (2.0 * std::f64::consts::PI * s2).sqrt();
                Some(norm * (-(omega - center).powi(2) / (2.0 * s2)).exp())
            }
            Self::Tabulated(_) => None,
        }
    }
}

/// Complex amplitude tabulated on a uniform square frequency grid, row-major
/// in (ω₁, ω₂).
#[derive(Debug, Clone)]
pub struct TabulatedAmplitude {
    grid: Vec<f64>,
    amplitude: Vec<Complex64>,
}

impl TabulatedAmplitude {
    /// Build from a grid and amplitudes; rejects non-uniform grids, shape
    /// mismatches, and amplitudes whose Riemann-sum L² norm deviates from 1
    /// by more than [`NORM_TOLERANCE`].
    pub fn new(grid: Vec<f64>, amplitude: Vec<Complex64>) -> Result<Self> {
        let value = Self::new_unchecked(grid, amplitude)?;
        let norm = value.norm_squared();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain(format!(
                "amplitude is not L2-normalized: ||psi||^2 = {norm}"
            )));
        }
        Ok(value)
    }

    /// As [`new`](Self::new) but rescales the amplitude to unit norm instead
    /// of rejecting it.
    pub fn normalized(grid: Vec<f64>, amplitude: Vec<Complex64>) -> Result<Self> {
        let mut value = Self::new_unchecked(grid, amplitude)?;
        let norm = value.norm_squared();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Domain(format!(
                "amplitude cannot be normalized: ||psi||^2 = {norm}"
            )));
        }
        let scale = 1.0 / norm.sqrt();
        for a in &mut value.amplitude {
            *a *= scale;
        }
        Ok(value)
    }

    fn new_unchecked(grid: Vec<f64>, amplitude: Vec<Complex64>) -> Result<Self> {
        let n = grid.len();
        if n < 2 {
            return Err(Error::Domain("grid needs at least 2 points".into()));
        }
        if amplitude.len() != n * n {
            return Err(Error::Domain(format!(
                "amplitude has {} entries, expected {} for a {n}x{n} grid",
                amplitude.len(),
                n * n
            )));
        }
        let dw = grid[1] - grid[0];
        if dw <= 0.0 {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        for w in grid.windows(2) {
            if ((w[1] - w[0]) - dw).abs() > 1e-9 * dw {
                return Err(Error::Domain("grid spacing must be uniform".into()));
            }
        }
        Ok(Self { grid, amplitude })
    }

    /// Gaussian product amplitude sampled on `bins` points covering
    /// [μ−8σ, μ+8σ], renormalized on the grid.
    pub fn gaussian(center: f64, width: f64, bins: usize) -> Result<Self> {
        let grid = uniform_grid(center - 8.0 * width, center + 8.0 * width, bins);
        let g: Vec<f64> = grid
            .iter()
            .map(|&w| (-(w - center).powi(2) / (4.0 * width * width)).exp())
            .collect();
        let mut amp = Vec::with_capacity(bins * bins);
        for gi in &g {
            for gj in &g {
                amp.push(Complex64::new(gi * gj, 0.0));
            }
        }
        Self::normalized(grid, amp)
    }

    /// Exchange-antisymmetric amplitude built from two displaced Gaussians:
    /// ψ(ω₁,ω₂) ∝ g₊(ω₁)g₋(ω₂) − g₋(ω₁)g₊(ω₂).
    pub fn antisymmetric_gaussian(
        center: f64,
        width: f64,
        separation: f64,
        bins: usize,
    ) -> Result<Self> {
        let grid = uniform_grid(center - 8.0 * width, center + 8.0 * width, bins);
        let lobe = |w: f64, mu: f64| (-(w - mu).powi(2) / (4.0 * width * width)).exp();
        let mu_p = center + separation / 2.0;
        let mu_m = center - separation / 2.0;
        let mut amp = Vec::with_capacity(bins * bins);
        for &w1 in &grid {
            for &w2 in &grid {
                let v = lobe(w1, mu_p) * lobe(w2, mu_m) - lobe(w1, mu_m) * lobe(w2, mu_p);
                amp.push(Complex64::new(v, 0.0));
            }
        }
        Self::normalized(grid, amp)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn bins(&self) -> usize {
        self.grid.len()
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// ψ(ω_i, ω_j).
    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.amplitude[i * self.grid.len() + j]
    }

    /// Riemann-sum estimate of ∫∫|ψ|².
    pub fn norm_squared(&self) -> f64 {
        let dw = self.spacing();
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * dw * dw
    }
}

fn uniform_grid(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let dw = (hi - lo) / bins as f64;
    // Midpoint sampling keeps the Riemann sum spectrally accurate for
    // smooth, decaying integrands.
    (0..bins).map(|i| lo + (i as f64 + 0.5) * dw).collect()
}
