//! Minimum-norm and ridge-regularized Laplace-kernel regressors in dual form.
//!
//! A fit stores unit-scale coefficients α with f̂(x) = Σ α_i e^{−c‖x − X_i‖},
//! so predictions do not depend on the amplitude convention. For a
//! scaled configuration the ridge penalty is rescaled by c^{−d} before
//! the solve, which keeps `fit_ridge` the exact minimizer of
//! (1/n)Σ(f(X_i) − Y_i)² + λ‖f‖²_H in that convention.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{distance, Points, SampleSet, DUPLICATE_THRESHOLD};
use crate::kernel::{lambda0, KernelConfig};

const JITTER_START: f64 = 1e-12;
const JITTER_MAX: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverDiagnostics {
    /// Diagonal shift added to the unit-scale system; 0 when the plain
    /// factorization succeeded.
    pub jitter_used: f64,
    /// (max L_ii / min L_ii)² of the Cholesky factor. A monotone red flag,
    /// not an exact condition number.
    pub condition_estimate: f64,
    /// max_i |f̂(X_i) − Y_i|.
    pub residual_max: f64,
}

#[derive(Debug, Clone)]
pub struct Interpolant {
    support: Points,
    coeffs: Vec<f64>,
    cfg: KernelConfig,
    ridge: f64,
    diagnostics: SolverDiagnostics,
    quad_unit: f64,
}

impl Interpolant {
    pub fn support(&self) -> &Points {
        &self.support
    }

    /// Unit-scale dual coefficients.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients for the scaled kernel: α·c^{−d}.
    pub fn scaled_coeffs(&self) -> Vec<f64> {
        let s = (-(self.cfg.dim() as f64) * self.cfg.bandwidth().ln()).exp();
        self.coeffs.iter().map(|a| a * s).collect()
    }

    pub fn config(&self) -> &KernelConfig {
        &self.cfg
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn diagnostics(&self) -> &SolverDiagnostics {
        &self.diagnostics
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.support.dim() {
            return Err(Error::InvalidInput(format!(
                "query of dimension {} for a {}-dimensional model",
                x.len(),
                self.support.dim()
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let c = self.cfg.bandwidth();
        self.support
            .rows()
            .zip(&self.coeffs)
            .map(|(xi, a)| a * (-c * distance(x, xi)).exp())
            .sum()
    }

    /// Predictions at every row of `queries`, parallel over query chunks.
    pub fn predict_batch(&self, queries: &Points) -> Result<Vec<f64>> {
        if queries.dim() != self.support.dim() {
            return Err(Error::InvalidInput(format!(
                "queries of dimension {} for a {}-dimensional model",
                queries.dim(),
                self.support.dim()
            )));
        }
        let d = queries.dim();
        let mut out = vec![0.0; queries.len()];
        out.par_chunks_mut(256)
            .zip(queries.as_slice().par_chunks(256 * d))
            .for_each(|(dst, src)| {
                for (v, x) in dst.iter_mut().zip(src.chunks_exact(d)) {
                    *v = self.eval_unchecked(x);
                }
            });
        Ok(out)
    }
}

/// Unit-scale Gram matrix, failing on coincident points.
fn unit_gram_checked(cfg: &KernelConfig, points: &Points) -> Result<DMatrix<f64>> {
    let n = points.len();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let xj = points.row(j);
        g[(j, j)] = 1.0;
        for i in j + 1..n {
            let r = distance(points.row(i), xj);
            if r < DUPLICATE_THRESHOLD {
                return Err(Error::DuplicatePoints {
                    i: j,
                    j: i,
                    distance: r,
                });
            }
            let v = cfg.unit_profile(r);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

fn diagonal_ratio(chol: &Cholesky<f64, nalgebra::Dyn>) -> f64 {
    let l = chol.l_dirty();
    let (lo, hi) = (0..l.nrows()).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
        let v = l[(i, i)].abs();
        (lo.min(v), hi.max(v))
    });
    (hi / lo).powi(2)
}

fn spectral_condition(g: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(g.clone());
    let hi = eig.eigenvalues.iter().cloned().fold(0.0f64, |a, v| a.max(v.abs()));
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Factor G + shift·I, escalating diagonal jitter ×10 from 1e-12·tr(G)/n up
/// to 1e-6·tr(G)/n when the plain factorization fails.
fn factor_with_jitter(g: &DMatrix<f64>, shift: f64) -> Result<(Cholesky<f64, nalgebra::Dyn>, f64)> {
    let n = g.nrows();
    let mean_diag = g.trace() / n as f64;
    let mut jitter = 0.0;
    loop {
        let mut a = g.clone();
        for i in 0..n {
            a[(i, i)] += shift + jitter;
        }
        if let Some(chol) = Cholesky::new(a) {
            return Ok((chol, jitter));
        }
        jitter = if jitter == 0.0 {
            JITTER_START * mean_diag
        } else {
            jitter * 10.0
        };
        if jitter > JITTER_MAX * mean_diag * (1.0 + 1e-9) {
            return Err(Error::IllConditioned {
                condition: spectral_condition(g),
                jitter: jitter / 10.0,
            });
        }
    }
}

fn solve(cfg: &KernelConfig, sample: &SampleSet, lam: f64) -> Result<Interpolant> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::InvalidInput("cannot fit an empty sample".into()));
    }
    if sample.dim() != cfg.dim() {
        return Err(Error::InvalidInput(format!(
            "sample of dimension {} for a {}-dimensional kernel",
            sample.dim(),
            cfg.dim()
        )));
    }
    if !(lam >= 0.0 && lam.is_finite()) {
        return Err(Error::param("lam", format!("ridge must be finite and non-negative, got {lam}")));
    }
    if sample.targets.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidInput("non-finite target".into()));
    }
    let g = unit_gram_checked(cfg, &sample.points)?;
    // (G_scaled + nλI)α' = y  ⇔  (G_unit + nλc^{−d}I)(c^d α') = y.
    let shift = n as f64 * lam * (-cfg.log_prefactor()).exp();
    let (chol, jitter_used) = factor_with_jitter(&g, shift)?;
    let y = DVector::from_column_slice(&sample.targets);
    let alpha = chol.solve(&y);
    let g_alpha = &g * &alpha;
    let quad_unit = alpha.dot(&g_alpha);
    let residual_max = g_alpha
        .iter()
        .zip(y.iter())
        .map(|(p, y)| (p - y).abs())
        .fold(0.0, f64::max);
    Ok(Interpolant {
        support: sample.points.clone(),
        coeffs: alpha.as_slice().to_vec(),
        cfg: *cfg,
        ridge: lam,
        diagnostics: SolverDiagnostics {
            jitter_used,
            condition_estimate: diagonal_ratio(&chol),
            residual_max,
        },
        quad_unit,
    })
}

/// The minimum-norm interpolant: α solves G α = y.
pub fn fit_min_norm(cfg: &KernelConfig, sample: &SampleSet) -> Result<Interpolant> {
    solve(cfg, sample, 0.0)
}

/// Kernel ridge regression: α solves (G + nλI) α = y in the configuration's
/// scale; λ = 0 reduces to [`fit_min_norm`].
pub fn fit_ridge(cfg: &KernelConfig, sample: &SampleSet, lam: f64) -> Result<Interpolant> {
    solve(cfg, sample, lam)
}

pub fn predict(model: &Interpolant, x: &[f64]) -> Result<f64> {
    model.predict(x)
}

/// αᵀGα in the model's scale convention. For a ridge-0 fit this is
/// ‖f̂‖²_H = yᵀG⁻¹y.
pub fn rkhs_quadratic_form(model: &Interpolant) -> f64 {
    (model.quad_unit.ln() - model.cfg.log_prefactor()).exp()
}

/// The convention norm ⟨f̂⟩ = Σ binom((d+1)/2, i) c^{−2i} ⟨f̂⟩_i, equal to
/// λ(0) times the scaled quadratic form.
pub fn convention_norm(model: &Interpolant) -> f64 {
    let d = model.cfg.dim() as f64;
    if model.quad_unit == 0.0 {
        return 0.0;
    }
    (lambda0(model.cfg.dim()).ln() + model.quad_unit.ln() - d * model.cfg.bandwidth().ln()).exp()
}
