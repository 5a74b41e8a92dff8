//! Sampling on the closed unit ball and separation-radius statistics.
//!
//! The domain is always Ω = B̄(0, 1) ⊂ ℝ^d with d odd and the uniform density
//! ρ = 1/vol(B_d). Each point `X_i` carries a separation radius
//!
//! ```text
//! r_i = min( min_{j≠i} ‖X_i − X_j‖ , 1 − ‖X_i‖ )
//! ```
//!
//! where the boundary term can be switched off.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_refined;
use crate::special::{unit_ball_volume, unit_sphere_area};

/// Distances below this are treated as coincident points.
pub const DUPLICATE_THRESHOLD: f64 = 1e-12;

const STREAM_POINTS: u64 = 0;
const STREAM_NOISE: u64 = 1;
/// Stream reserved for Monte Carlo test points (see `risk`).
pub(crate) const STREAM_TEST: u64 = 2;
pub(crate) const STREAM_BALLS: u64 = 3;

/// Deterministic generator for `(seed, stream)`. Separate streams keep the
/// design points, noise signs and test points independent under one seed.
pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn check_dimension(d: usize) -> Result<()> {
    if d == 0 || d % 2 == 0 {
        return Err(Error::InvalidDimension(d as i64));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Uniform,
}

/// The closed unit ball in odd dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domain {
    d: usize,
    density: Density,
}

impl Domain {
    pub fn unit_ball(d: usize) -> Result<Self> {
        check_dimension(d)?;
        Ok(Domain {
            d,
            density: Density::Uniform,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> f64 {
        1.0
    }

    pub fn density(&self) -> Density {
        self.density
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.d)
    }

    /// ρ(x) for x ∈ Ω. Uniform density has c_ρ = C_ρ = 1/vol(B_d).
    pub fn density_value(&self) -> f64 {
        1.0 / self.volume()
    }

    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.radius() - norm(x)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Points {
        sample_ball_with(n, self.d, &mut seeded_rng(seed, STREAM_POINTS))
    }
}

/// `n` points in ℝ^d stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    d: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        if d == 0 || data.len() % d != 0 {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into rows of dimension {d}",
                data.len()
            )));
        }
        Ok(Points { d, data })
    }

    pub fn from_rows(d: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} coordinates, expected {d}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Points { d, data })
    }

    pub fn empty(d: usize) -> Self {
        Points { d, data: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Smooth, nonzero regression targets f₀ on Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFunction {
    /// f₀ ≡ 1.
    ConstOne,
    /// f₀(x) = exp(−‖x‖²).
    GaussBump,
    /// f₀(x) = x₁.
    CoordLinear,
}

impl TargetFunction {
    pub fn id(&self) -> &'static str {
        match self {
            TargetFunction::ConstOne => "const_one",
            TargetFunction::GaussBump => "gauss_bump",
            TargetFunction::CoordLinear => "coord_linear",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "const_one" => Some(TargetFunction::ConstOne),
            "gauss_bump" => Some(TargetFunction::GaussBump),
            "coord_linear" => Some(TargetFunction::CoordLinear),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TargetFunction::ConstOne => 1.0,
            TargetFunction::GaussBump => (-x.iter().map(|v| v * v).sum::<f64>()).exp(),
            TargetFunction::CoordLinear => x[0],
        }
    }

    /// ‖f₀‖²_{L²(Ω)} with respect to Lebesgue measure on the unit ball.
    pub fn l2_norm_sq_on_ball(&self, d: usize) -> f64 {
        let vol = unit_ball_volume(d);
        match self {
            TargetFunction::ConstOne => vol,
            // E[x₁²] = 1/(d+2) under the uniform law on B_d.
            TargetFunction::CoordLinear => vol / (d as f64 + 2.0),
            TargetFunction::GaussBump => {
                let (radial, _) = integrate_refined(0.0, 1.0, 1e-14, 1 << 12, |r| {
                    r.powi(d as i32 - 1) * (-2.0 * r * r).exp()
                });
                unit_sphere_area(d) * radial
            }
        }
    }

    pub fn sup_norm_on_ball(&self) -> f64 {
        1.0
    }
}

impl std::fmt::Display for TargetFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Design points with labels `Y_i = f₀(X_i) + ξ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Points,
    pub targets: Vec<f64>,
    /// Rademacher signs ξ_i ∈ {−1, +1}.
    pub noise: Vec<f64>,
    pub f0: TargetFunction,
    pub seed: u64,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Same design points, labels replaced by `values`.
    pub fn with_targets(&self, values: Vec<f64>) -> Result<SampleSet> {
        if values.len() != self.len() {
            return Err(Error::InvalidInput(format!(
                "{} targets for {} points",
                values.len(),
                self.len()
            )));
        }
        Ok(SampleSet {
            targets: values,
            ..self.clone()
        })
    }
}

pub(crate) fn sample_ball_with(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Points {
    let mut data = Vec::with_capacity(n * d);
    let mut dir = vec![0.0; d];
    for _ in 0..n {
        // Gaussian direction; redraw the (measure-zero) all-zero vector.
        let len = loop {
            for v in dir.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let len = norm(&dir);
            if len > 0.0 {
                break len;
            }
        };
        let u: f64 = rng.random();
        let radius = u.powf(1.0 / d as f64);
        data.extend(dir.iter().map(|v| v / len * radius));
    }
    Points { d, data }
}

/// `n` i.i.d. uniform points on the closed unit ball in ℝ^d.
pub fn sample_uniform_ball(n: usize, d: usize, seed: u64) -> Result<Points> {
    Ok(Domain::unit_ball(d)?.sample(n, seed))
}

/// Draw Rademacher noise from `seed` and label `points` with `f₀ + ξ`.
pub fn attach_labels(points: Points, f0: TargetFunction, seed: u64) -> SampleSet {
    let mut rng = seeded_rng(seed, STREAM_NOISE);
    let noise: Vec<f64> = (0..points.len())
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let targets = points
        .rows()
        .zip(&noise)
        .map(|(x, xi)| f0.eval(x) + xi)
        .collect();
    SampleSet {
        points,
        targets,
        noise,
        f0,
        seed,
    }
}

/// Sample and label in one step. Coincident draws (probability zero) are
/// re-drawn from a shifted stream up to three times.
pub fn sample_labeled(n: usize, d: usize, f0: TargetFunction, seed: u64) -> Result<SampleSet> {
    check_dimension(d)?;
    let mut points = sample_uniform_ball(n, d, seed)?;
    for attempt in 1..=3u64 {
        match find_duplicate(&points) {
            None => break,
            Some(_) => {
                let mut rng = seeded_rng(seed, STREAM_POINTS + 16 * attempt);
                points = sample_ball_with(n, d, &mut rng);
            }
        }
    }
    if let Some((i, j, distance)) = find_duplicate(&points) {
        return Err(Error::DuplicatePoints { i, j, distance });
    }
    Ok(attach_labels(points, f0, seed))
}

fn find_duplicate(points: &Points) -> Option<(usize, usize, f64)> {
    let n = points.len();
    for i in 0..n {
        let xi = points.row(i);
        for j in i + 1..n {
            let dist = distance(xi, points.row(j));
            if dist < DUPLICATE_THRESHOLD {
                return Some((i, j, dist));
            }
        }
    }
    None
}

/// Separation radii by exact O(n²) scan.
///
/// With `include_boundary` the distance to the unit sphere enters the
/// minimum; without it a single point has no defined radius.
pub fn separation_radii(points: &Points, include_boundary: bool) -> Result<Vec<f64>> {
    let n = points.len();
    if n == 1 && !include_boundary {
        return Err(Error::InvalidInput(
            "a boundary-exclusive radius needs at least two points".into(),
        ));
    }
    let mut radii: Vec<f64> = if include_boundary {
        points.rows().map(|x| 1.0 - norm(x)).collect()
    } else {
        vec![f64::INFINITY; n]
    };
    for i in 0..n {
        let xi = points.row(i);
        for j in i + 1..n {
            let dist = distance(xi, points.row(j));
            if dist < DUPLICATE_THRESHOLD {
                return Err(Error::DuplicatePoints { i, j, distance: dist });
            }
            if dist < radii[i] {
                radii[i] = dist;
            }
            if dist < radii[j] {
                radii[j] = dist;
            }
        }
    }
    Ok(radii)
}

/// (1/n) Σ r_i^k.
pub fn power_average(radii: &[f64], k: f64) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("power average of no radii".into()));
    }
    if let Some(bad) = radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "radii must be positive and finite, got {bad}"
        )));
    }
    let sum: f64 = if k == 1.0 {
        radii.iter().sum()
    } else if k == k.trunc() && k.abs() < 64.0 {
        radii.iter().map(|r| r.powi(k as i32)).sum()
    } else {
        radii.iter().map(|r| r.powf(k)).sum()
    };
    Ok(sum / radii.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BulkSubset {
    /// Ascending indices into the radii vector.
    pub indices: Vec<usize>,
    pub min_radius: f64,
    pub max_radius: f64,
}

/// Middle quantile band of the radii: drop (1−α)/2 of the mass from each
/// tail of the sorted radii. Ties with the band edges stay in the band, so
/// the band holds at least ⌈αn⌉ indices.
pub fn bulk_subset(radii: &[f64], alpha: f64) -> Result<BulkSubset> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0, 1)")));
    }
    let n = radii.len();
    if n == 0 {
        return Err(Error::InvalidInput("bulk subset of no radii".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]).then(a.cmp(&b)));
    let size = ((alpha * n as f64).ceil() as usize).clamp(1, n);
    let lo = (n - size) / 2;
    let min_radius = radii[order[lo]];
    let max_radius = radii[order[lo + size - 1]];
    let indices = (0..n)
        .filter(|&i| radii[i] >= min_radius && radii[i] <= max_radius)
        .collect();
    Ok(BulkSubset {
        indices,
        min_radius,
        max_radius,
    })
}

/// Radii together with the power averages (1/n)Σ r_i^k for k ∈ {−1, 1, …, d}.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationStats {
    pub radii: Vec<f64>,
    pub include_boundary: bool,
    pub power_averages: Vec<(i32, f64)>,
    pub sum_rd: f64,
}

impl SeparationStats {
    pub fn compute(points: &Points, include_boundary: bool) -> Result<Self> {
        let radii = separation_radii(points, include_boundary)?;
        Self::from_radii(radii, points.dim(), include_boundary)
    }

    pub fn from_radii(radii: Vec<f64>, d: usize, include_boundary: bool) -> Result<Self> {
        let mut power_averages = vec![(-1, power_average(&radii, -1.0)?)];
        for k in 1..=d as i32 {
            power_averages.push((k, power_average(&radii, k as f64)?));
        }
        let sum_rd = radii.iter().map(|r| r.powi(d as i32)).sum();
        Ok(SeparationStats {
            radii,
            include_boundary,
            power_averages,
            sum_rd,
        })
    }

    pub fn power_average(&self, k: i32) -> Option<f64> {
        self.power_averages
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, v)| *v)
    }
}
