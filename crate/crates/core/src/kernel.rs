//! Laplace kernel K_c(x, x') = c^d exp(−c‖x − x'‖) and its Fourier side.
//!
//! Two amplitude conventions are supported. `Scaled` carries the c^d
//! prefactor, `Unit` drops it. Solvers work in unit scale; the prefactor is
//! kept as a logarithm and applied only where a norm convention needs it.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dimension, distance, Points};
use crate::special::{binomial, gamma_half};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelScale {
    /// c^d e^{−c‖x−y‖}
    Scaled,
    /// e^{−c‖x−y‖}
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    d: usize,
    c: f64,
    scale: KernelScale,
}

impl KernelConfig {
    pub fn new(d: usize, c: f64, scale: KernelScale) -> Result<Self> {
        check_dimension(d)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param("c", format!("bandwidth must be positive and finite, got {c}")));
        }
        Ok(KernelConfig { d, c, scale })
    }

    pub fn scaled(d: usize, c: f64) -> Result<Self> {
        Self::new(d, c, KernelScale::Scaled)
    }

    pub fn unit(d: usize, c: f64) -> Result<Self> {
        Self::new(d, c, KernelScale::Unit)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bandwidth(&self) -> f64 {
        self.c
    }

    pub fn scale(&self) -> KernelScale {
        self.scale
    }

    pub fn with_scale(&self, scale: KernelScale) -> Self {
        KernelConfig { scale, ..*self }
    }

    /// ln of the amplitude prefactor: d·ln c in scaled convention, 0 in unit scale.
    pub fn log_prefactor(&self) -> f64 {
        match self.scale {
            KernelScale::Scaled => self.d as f64 * self.c.ln(),
            KernelScale::Unit => 0.0,
        }
    }

    pub fn prefactor(&self) -> f64 {
        self.log_prefactor().exp()
    }

    /// e^{−c·r}, the unit-scale profile at distance r.
    #[inline]
    pub fn unit_profile(&self, r: f64) -> f64 {
        (-self.c * r).exp()
    }
}

pub fn eval_kernel(cfg: &KernelConfig, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != cfg.d || y.len() != cfg.d {
        return Err(Error::InvalidInput(format!(
            "points of dimension {} and {} for a {}-dimensional kernel",
            x.len(),
            y.len(),
            cfg.d
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    Ok((cfg.log_prefactor() - cfg.c * distance(x, y)).exp())
}

/// Gram matrix G_ij = K(x_i, x_j) in the configuration's scale.
pub fn gram(cfg: &KernelConfig, points: &Points) -> Result<DMatrix<f64>> {
    if points.dim() != cfg.d {
        return Err(Error::InvalidInput(format!(
            "points of dimension {} for a {}-dimensional kernel",
            points.dim(),
            cfg.d
        )));
    }
    if points.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    let n = points.len();
    let amp = cfg.prefactor();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let xj = points.row(j);
        g[(j, j)] = amp;
        for i in j + 1..n {
            let v = amp * cfg.unit_profile(distance(points.row(i), xj));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// λ(0) = 2^d π^{(d−1)/2} Γ((d+1)/2).
pub fn lambda0(d: usize) -> f64 {
    2f64.powi(d as i32) * PI.powf((d as f64 - 1.0) / 2.0) * gamma_half(d as u32 + 1)
}

/// Fourier transform of the kernel at frequency ‖p‖:
/// λ(p) = λ(0) / (1 + ‖p‖²/c²)^{(d+1)/2} in scaled convention.
pub fn lambda_eig(cfg: &KernelConfig, p_norm: f64) -> Result<f64> {
    if !(p_norm >= 0.0) {
        return Err(Error::param("p_norm", format!("{p_norm} is negative")));
    }
    let ratio = p_norm / cfg.c;
    // λ(0) stays outside the exponential so λ(0) itself is exact.
    let log_factor = -(cfg.d as f64 + 1.0) / 2.0 * (ratio * ratio).ln_1p()
        - match cfg.scale {
            KernelScale::Scaled => 0.0,
            KernelScale::Unit => cfg.d as f64 * cfg.c.ln(),
        };
    Ok(lambda0(cfg.d) * log_factor.exp())
}

/// Weights of the Sobolev expansion ⟨f⟩ = Σ_i binom((d+1)/2, i) c^{−2i} ⟨f⟩_i.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevWeights {
    pub weights: Vec<f64>,
    pub lambda0: f64,
}

pub fn sobolev_weights(cfg: &KernelConfig) -> SobolevWeights {
    let half = (cfg.d as u64 + 1) / 2;
    let weights = (0..=half)
        .map(|i| binomial(half, i) as f64 * cfg.c.powi(-2 * i as i32))
        .collect();
    SobolevWeights {
        weights,
        lambda0: lambda0(cfg.d),
    }
}
