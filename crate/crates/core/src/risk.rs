//! Monte Carlo risk and L² norm estimates, plus the local-residual and
//! Hölder-certificate diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::{witness_convention_norm, WitnessInterpolant};
use crate::error::{Error, Result};
use crate::geometry::{
    sample_ball_with, seeded_rng, Domain, Points, SampleSet, SeparationStats, TargetFunction, STREAM_BALLS,
    STREAM_TEST,
};
use crate::interpolant::{convention_norm, Interpolant};
use crate::special::unit_ball_volume;

const CHUNK: usize = 512;

/// Anything that can be evaluated pointwise.
pub trait Evaluator: Sync {
    fn value(&self, x: &[f64]) -> f64;

    /// Input dimension, when the evaluator knows it.
    fn input_dim(&self) -> Option<usize> {
        None
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Evaluator for F {
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

impl Evaluator for Interpolant {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }

    fn input_dim(&self) -> Option<usize> {
        Some(self.support().dim())
    }
}

impl Evaluator for WitnessInterpolant {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn input_dim(&self) -> Option<usize> {
        Some(self.profile().d)
    }
}

impl Evaluator for TargetFunction {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Expectation under the sampling distribution P.
    Population,
    /// Lebesgue integral over Ω.
    Lebesgue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub mean: f64,
    /// Sample standard deviation over √m.
    pub std_error: f64,
    pub m: usize,
    pub seed: u64,
    pub measure: Measure,
}

fn check_inputs(f: &impl Evaluator, domain: &Domain, m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::param("m", format!("need at least 2 test points, got {m}")));
    }
    match f.input_dim() {
        Some(d) if d != domain.dim() => Err(Error::InvalidInput(format!(
            "{d}-dimensional function on a {}-dimensional domain",
            domain.dim()
        ))),
        _ => Ok(()),
    }
}

/// Evaluate `g` on every row; the chunking is fixed, so the output order
/// (and hence every reduction over it) is independent of thread count.
fn eval_rows(points: &Points, g: impl Fn(&[f64]) -> f64 + Sync) -> Vec<f64> {
    let d = points.dim();
    points
        .as_slice()
        .par_chunks(CHUNK * d)
        .flat_map_iter(|chunk| chunk.chunks_exact(d).map(&g).collect::<Vec<_>>())
        .collect()
}

fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn test_points(domain: &Domain, m: usize, seed: u64) -> Points {
    sample_ball_with(m, domain.dim(), &mut seeded_rng(seed, STREAM_TEST))
}

/// E_{X∼P} (f̂(X) − f₀(X))² from `m` uniform test points.
pub fn mc_l2_risk(
    model: &impl Evaluator,
    f0: TargetFunction,
    domain: &Domain,
    m: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    check_inputs(model, domain, m)?;
    let xs = test_points(domain, m, seed);
    let sq = eval_rows(&xs, |x| (model.value(x) - f0.eval(x)).powi(2));
    let (mean, std_error) = mean_and_error(&sq);
    Ok(RiskEstimate {
        mean,
        std_error,
        m,
        seed,
        measure: Measure::Population,
    })
}

/// ‖f‖²_{L²(Ω)} = vol(Ω)·E_{X∼U(Ω)} f(X)².
pub fn mc_l2_norm_sq(f: &impl Evaluator, domain: &Domain, m: usize, seed: u64) -> Result<RiskEstimate> {
    check_inputs(f, domain, m)?;
    let xs = test_points(domain, m, seed);
    let sq = eval_rows(&xs, |x| f.value(x).powi(2));
    let (mean, std_error) = mean_and_error(&sq);
    let vol = domain.volume();
    Ok(RiskEstimate {
        mean: vol * mean,
        std_error: vol * std_error,
        m,
        seed,
        measure: Measure::Lebesgue,
    })
}

/// [`mc_l2_risk`] and [`mc_l2_norm_sq`] of the same model from one pass over
/// the shared test points; identical to calling both.
pub fn mc_risk_and_norm(
    model: &impl Evaluator,
    f0: TargetFunction,
    domain: &Domain,
    m: usize,
    seed: u64,
) -> Result<(RiskEstimate, RiskEstimate)> {
    check_inputs(model, domain, m)?;
    let xs = test_points(domain, m, seed);
    let d = domain.dim();
    let values = eval_rows(&xs, |x| model.value(x));
    let mut resid = Vec::with_capacity(m);
    let mut sq = Vec::with_capacity(m);
    for (x, v) in xs.as_slice().chunks_exact(d).zip(&values) {
        resid.push((v - f0.eval(x)).powi(2));
        sq.push(v * v);
    }
    let (mean, std_error) = mean_and_error(&resid);
    let (norm_mean, norm_se) = mean_and_error(&sq);
    let vol = domain.volume();
    Ok((
        RiskEstimate {
            mean,
            std_error,
            m,
            seed,
            measure: Measure::Population,
        },
        RiskEstimate {
            mean: vol * norm_mean,
            std_error: vol * norm_se,
            m,
            seed,
            measure: Measure::Lebesgue,
        },
    ))
}

/// Σ_i ∫_{B(X_i, βr_i/2)} (f̂ − f₀)², each ball integral estimated from
/// `quad_per_ball` uniform points. The balls are disjoint and, with
/// boundary-aware radii, inside Ω, so this lower-bounds ‖f̂ − f₀‖²_{L²(Ω)}.
pub fn local_residual_mass(
    model: &impl Evaluator,
    f0: TargetFunction,
    sample: &SampleSet,
    radii: &[f64],
    beta: f64,
    quad_per_ball: usize,
    seed: u64,
) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::param("beta", format!("{beta} is not in (0, 1)")));
    }
    if quad_per_ball == 0 {
        return Err(Error::param("quad_per_ball", "must be positive"));
    }
    if radii.len() != sample.len() {
        return Err(Error::InvalidInput(format!(
            "{} radii for {} points",
            radii.len(),
            sample.len()
        )));
    }
    let d = sample.dim();
    let unit_vol = unit_ball_volume(d);
    // All offsets come from one stream drawn up front, in index order.
    let offsets = sample_ball_with(sample.len() * quad_per_ball, d, &mut seeded_rng(seed, STREAM_BALLS));
    let per_ball: Vec<f64> = (0..sample.len())
        .into_par_iter()
        .map(|i| {
            let center = sample.points.row(i);
            let rho = 0.5 * beta * radii[i];
            let mut x = vec![0.0; d];
            let mut acc = 0.0;
            for q in 0..quad_per_ball {
                let u = offsets.row(i * quad_per_ball + q);
                for k in 0..d {
                    x[k] = center[k] + rho * u[k];
                }
                acc += (model.value(&x) - f0.eval(&x)).powi(2);
            }
            unit_vol * rho.powi(d as i32) * acc / quad_per_ball as f64
        })
        .collect();
    Ok(per_ball.iter().sum())
}

/// Hölder-type lower-bound diagnostic with all unspecified constants set to 1:
///
/// ((min_I r^{−d−1} · S) / (max_I r^{−d−1} + c^{d+1}·f_norm))^d · S,
/// S = Σ_I r_i^d f(X_i)².
pub fn certificate_value(d: usize, c: f64, radii: &[f64], values_sq: &[f64], f_norm: f64) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("certificate needs a nonempty index set".into()));
    }
    if radii.len() != values_sq.len() {
        return Err(Error::InvalidInput("radii and values differ in length".into()));
    }
    let e = -(d as i32) - 1;
    let s: f64 = radii.iter().zip(values_sq).map(|(r, v)| r.powi(d as i32) * v).sum();
    let lo = radii.iter().map(|r| r.powi(e)).fold(f64::INFINITY, f64::min);
    let hi = radii.iter().map(|r| r.powi(e)).fold(0.0, f64::max);
    let ratio = lo * s / (hi + c.powi(d as i32 + 1) * f_norm);
    Ok(ratio.powi(d as i32) * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub value: f64,
    /// Triangle bound 2⟨f̂⟩ + 2⟨g⟩ on ⟨f̂ − f₀⟩, with g the witness proxy for f₀.
    pub f_norm: f64,
    pub weighted_sum: f64,
}

/// Certificate for f = f̂ − f₀ on the index set `indices`. At the design
/// points f(X_i) = ξ_i; ⟨f₀⟩ is replaced by the witness `proxy` built on the
/// noiseless labels f₀(X_i).
pub fn holder_certificate(
    model: &Interpolant,
    sample: &SampleSet,
    stats: &SeparationStats,
    indices: &[usize],
    proxy: &WitnessInterpolant,
) -> Result<Certificate> {
    if model.ridge() != 0.0 {
        return Err(Error::InvalidInput("certificate needs a ridgeless fit".into()));
    }
    if indices.is_empty() {
        return Err(Error::InvalidInput("certificate needs a nonempty index set".into()));
    }
    if stats.radii.len() != sample.len() {
        return Err(Error::InvalidInput("separation stats do not match the sample".into()));
    }
    let cfg = model.config();
    let d = sample.dim();
    let mut radii = Vec::with_capacity(indices.len());
    let mut values_sq = Vec::with_capacity(indices.len());
    for &i in indices {
        if i >= sample.len() {
            return Err(Error::InvalidInput(format!("index {i} out of range")));
        }
        radii.push(stats.radii[i]);
        let x = sample.points.row(i);
        values_sq.push((sample.targets[i] - sample.f0.eval(x)).powi(2));
    }
    let f_norm = 2.0 * convention_norm(model) + 2.0 * witness_convention_norm(proxy, cfg)?;
    let weighted_sum = radii.iter().zip(&values_sq).map(|(r, v)| r.powi(d as i32) * v).sum();
    Ok(Certificate {
        value: certificate_value(d, cfg.bandwidth(), &radii, &values_sq, f_norm)?,
        f_norm,
        weighted_sum,
    })
}
