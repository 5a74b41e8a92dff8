//! Fourier-side convention norms of one-dimensional functions on a grid.
//!
//! For d = 1 the convention norm is ⟨f⟩ = ∫ (1 + p²/c²) |Ff(p)|² dp with the
//! unitary transform, and the Laplace-kernel RKHS identity says it equals
//! λ(0)·‖f‖²_H. [`verify_kernel_norm`] checks that identity for fitted
//! interpolants by rendering them on a uniform grid and taking an FFT.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::SampleSet;
use crate::interpolant::{convention_norm, fit_min_norm, Interpolant};
use crate::kernel::KernelConfig;

/// Edge samples must stay below this fraction of the peak magnitude.
pub const EDGE_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_GRID_LOG2: u32 = 18;
pub const MAX_GRID_LOG2: u32 = 24;
/// Grid points per closest pair gap. Near-coincident points give the
/// interpolant a spike of that width, and the discretization error of the
/// Fourier side scales roughly like 0.3·h/gap.
pub const POINTS_PER_GAP: f64 = 32.0;

/// Uniform samples of f on [−L, L) with spacing 2L/m.
#[derive(Debug, Clone)]
pub struct GridFunction1D {
    half_width: f64,
    values: Vec<f64>,
}

impl GridFunction1D {
    pub fn new(half_width: f64, values: Vec<f64>) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::param("half_width", format!("{half_width} is not positive")));
        }
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(Error::param("m", format!("grid size {} is not a power of two", values.len())));
        }
        Ok(GridFunction1D { half_width, values })
    }

    pub fn sample(half_width: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = 2.0 * half_width / m as f64;
        let values = (0..m).map(|j| f(-half_width + j as f64 * h)).collect();
        Self::new(half_width, values)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.values.len() as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.values.len()).map(move |j| -self.half_width + j as f64 * h)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest |value| over the outer 1% of the grid, relative to the peak.
    pub fn edge_magnitude(&self) -> f64 {
        let m = self.values.len();
        let band = (m / 100).max(1);
        let peak = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self.values[..band]
            .iter()
            .chain(&self.values[m - band..])
            .fold(0.0f64, |a, v| a.max(v.abs()));
        edge / peak
    }
}

/// The two Fourier-side terms ∫|Ff|² dp and ∫p²|Ff|² dp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerms {
    pub l2: f64,
    pub h1: f64,
}

impl FourierTerms {
    pub fn convention_norm(&self, c: f64) -> f64 {
        self.l2 + self.h1 / (c * c)
    }
}

pub fn fourier_terms_1d(f: &GridFunction1D) -> Result<FourierTerms> {
    let edge = f.edge_magnitude();
    if edge > EDGE_TOLERANCE {
        return Err(Error::Truncation {
            edge,
            limit: EDGE_TOLERANCE,
        });
    }
    let m = f.len();
    let mut buf: Vec<Complex<f64>> = f.values.iter().map(|v| Complex::new(*v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    // ∫|Ff|² w(p) dp ≈ Σ_k (h²/2L) |F_k|² w(p_k) with p_k = πk/L.
    let h = f.spacing();
    let scale = h * h / (2.0 * f.half_width);
    let dp = std::f64::consts::PI / f.half_width;
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for (k, v) in buf.iter().enumerate() {
        let freq = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 } * dp;
        let power = scale * v.norm_sqr();
        l2 += power;
        h1 += power * freq * freq;
    }
    Ok(FourierTerms { l2, h1 })
}

/// ∫ (1 + p²/c²) |Ff(p)|² dp by discrete transform quadrature.
pub fn fourier_convention_norm_1d(f: &GridFunction1D, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::param("c", format!("{c} is not positive")));
    }
    Ok(fourier_terms_1d(f)?.convention_norm(c))
}

/// Grid used to render a one-dimensional model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub m: usize,
}

impl GridSpec {
    /// L = 1 + 40/c keeps e^{−c(L−1)} below the edge tolerance for data in
    /// [−1, 1]; m = 2^18.
    pub fn for_bandwidth(c: f64) -> Self {
        GridSpec {
            half_width: 1.0 + 40.0 / c,
            m: 1 << DEFAULT_GRID_LOG2,
        }
    }

    /// As [`GridSpec::for_bandwidth`], refined until the spacing resolves the
    /// closest pair of `xs` by [`POINTS_PER_GAP`] points, up to 2^24.
    pub fn for_sample(xs: &[f64], c: f64) -> Self {
        let base = Self::for_bandwidth(c);
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let mut m = base.m;
        while m < 1 << MAX_GRID_LOG2 && 2.0 * base.half_width / m as f64 > gap / POINTS_PER_GAP {
            m *= 2;
        }
        GridSpec { m, ..base }
    }
}

pub fn render(model: &Interpolant, grid: GridSpec) -> Result<GridFunction1D> {
    if model.support().dim() != 1 {
        return Err(Error::InvalidInput("grid rendering needs a one-dimensional model".into()));
    }
    GridFunction1D::sample(grid.half_width, grid.m, |x| model.eval_unchecked(&[x]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormCheckReport {
    pub n: usize,
    pub c: f64,
    pub grid: GridSpec,
    /// Discrete-transform value of ⟨f̂⟩.
    pub fourier_side: f64,
    /// λ(0)·yᵀG⁻¹y from the fitted coefficients.
    pub kernel_side: f64,
    /// fourier_side / kernel_side; `None` when both sides vanish.
    pub ratio: Option<f64>,
    pub edge_magnitude: f64,
    pub jitter_used: f64,
}

/// Fit the minimum-norm interpolant to a one-dimensional sample and compare
/// its Fourier-side convention norm with λ(0)·yᵀG⁻¹y, on the grid chosen by
/// [`GridSpec::for_sample`].
pub fn verify_kernel_norm(sample: &SampleSet, c: f64) -> Result<NormCheckReport> {
    verify_kernel_norm_on(sample, c, GridSpec::for_sample(sample.points.as_slice(), c))
}

pub fn verify_kernel_norm_on(sample: &SampleSet, c: f64, grid: GridSpec) -> Result<NormCheckReport> {
    if sample.dim() != 1 {
        return Err(Error::InvalidInput(format!(
            "the grid oracle is one-dimensional, got d = {}",
            sample.dim()
        )));
    }
    let cfg = KernelConfig::scaled(1, c)?;
    let model = fit_min_norm(&cfg, sample)?;
    let rendered = render(&model, grid)?;
    let edge_magnitude = rendered.edge_magnitude();
    let fourier_side = fourier_convention_norm_1d(&rendered, c)?;
    let kernel_side = convention_norm(&model);
    let ratio = if kernel_side == 0.0 && fourier_side == 0.0 {
        None
    } else {
        Some(fourier_side / kernel_side)
    };
    Ok(NormCheckReport {
        n: sample.len(),
        c,
        grid,
        fourier_side,
        kernel_side,
        ratio,
        edge_magnitude,
        jitter_used: model.diagnostics().jitter_used,
    })
}
