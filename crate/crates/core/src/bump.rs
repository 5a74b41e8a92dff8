//! Disjoint-bump witness interpolants and their closed-form norms.
//!
//! A radial bump η equals 1 on ‖x‖ ≤ 1/4 and vanishes on ‖x‖ ≥ 1/2. The
//! witness g_α(x) = Σ Y_i η((x − X_i)/(α r_i)) interpolates the sample with
//! pairwise disjoint supports, so every Sobolev seminorm splits into a sum
//! of rescaled copies of the moments of η:
//!
//! ```text
//! ⟨η((· − X_i)/s)⟩_k = s^{d−2k} ⟨η⟩_k,   ⟨η⟩_k = ∫ |Fη(p)|² ‖p‖^{2k} dp
//! ```
//!
//! with the unitary transform Fη(p) = (2π)^{−d/2} ∫ η(x) e^{−ip·x} dx, so
//! that ⟨η⟩_0 = ‖η‖²_{L²}.
//!
//! Two bump shapes are provided. [`BumpShape::Cutoff`] is the profile
//! e^{1 − 1/(2 − 4‖x‖)} on the annulus; its first derivative jumps at
//! ‖x‖ = 1/4, so ⟨η⟩_k is finite only for k ≤ 1. [`BumpShape::Smooth`] is a
//! C^∞ partition-of-unity transition with the same plateau and support,
//! which keeps every moment finite in d ≥ 3.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dimension, distance, norm, Points, SampleSet};
use crate::kernel::KernelConfig;
use crate::quadrature::{integrate_refined, CompositeRule};
use crate::special::{binomial, unit_ball_volume, unit_sphere_area};

const PLATEAU: f64 = 0.25;
const SUPPORT: f64 = 0.5;
const MAX_DIM: usize = 7;
const MOMENT_TOL: f64 = 1e-8;
/// Frequency cutoffs are 4π·2^level; |Fη|² oscillates with period ≤ 4π in p.
const FIRST_LEVEL: u32 = 5;
const LAST_LEVEL: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpShape {
    /// 1 on the plateau, e^{1 − 1/(2 − 4r)} on the annulus.
    Cutoff,
    /// ψ(1 − s) / (ψ(1 − s) + ψ(s)) with s = 4r − 1 and ψ(t) = e^{−1/t}.
    Smooth,
}

impl BumpShape {
    pub fn id(&self) -> &'static str {
        match self {
            BumpShape::Cutoff => "cutoff",
            BumpShape::Smooth => "smooth",
        }
    }

    /// Radial profile η(r).
    pub fn radial(&self, r: f64) -> f64 {
        if r <= PLATEAU {
            return 1.0;
        }
        if r >= SUPPORT {
            return 0.0;
        }
        match self {
            BumpShape::Cutoff => (1.0 - 1.0 / (2.0 - 4.0 * r)).exp(),
            BumpShape::Smooth => {
                let s = (r - PLATEAU) / (SUPPORT - PLATEAU);
                let outer = transition(1.0 - s);
                let inner = transition(s);
                outer / (outer + inner)
            }
        }
    }

    /// Largest k with ⟨η⟩_k finite.
    pub fn max_finite_moment(&self) -> Option<usize> {
        match self {
            // η ∈ H^s exactly for s < 3/2.
            BumpShape::Cutoff => Some(1),
            BumpShape::Smooth => None,
        }
    }

    /// Decay exponent q of the truncation error A/P^q of the k-th moment,
    /// when it is algebraic.
    fn tail_exponent(&self, k: usize) -> Option<i32> {
        match self {
            // |Fη(p)|² ~ p^{−(d+3)} from the derivative jump.
            BumpShape::Cutoff => Some(3 - 2 * k as i32),
            BumpShape::Smooth => None,
        }
    }
}

fn transition(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// η(x) for the given shape.
pub fn eta(shape: BumpShape, x: &[f64]) -> f64 {
    shape.radial(norm(x))
}

/// Moments of a bump profile in dimension d.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpProfile {
    pub shape: BumpShape,
    pub d: usize,
    /// ‖η‖²_{L²(ℝ^d)} by spatial radial quadrature.
    pub l2_norm_sq: f64,
    /// ⟨η⟩_k for k = 0..=(d+1)/2 by radial Fourier quadrature; index 0 is
    /// the Plancherel value. Infinite where η lacks the regularity.
    pub fourier_moments: Vec<f64>,
}

impl BumpProfile {
    pub fn moment(&self, k: usize) -> f64 {
        self.fourier_moments[k]
    }

    /// ⟨η⟩_k for k = 1..=(d+1)/2.
    pub fn sobolev_moments(&self) -> &[f64] {
        &self.fourier_moments[1..]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        eta(self.shape, x)
    }
}

fn profile_cache() -> &'static Mutex<HashMap<(BumpShape, usize), BumpProfile>> {
    static CACHE: OnceLock<Mutex<HashMap<(BumpShape, usize), BumpProfile>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Norms of η in dimension d (odd, at most 7). Results are cached per
/// (shape, d).
pub fn eta_moments(shape: BumpShape, d: usize) -> Result<BumpProfile> {
    check_dimension(d)?;
    if d > MAX_DIM {
        return Err(Error::param("d", format!("bump moments are tabulated for d ≤ {MAX_DIM}, got {d}")));
    }
    if let Some(p) = profile_cache().lock().unwrap().get(&(shape, d)) {
        return Ok(p.clone());
    }
    let l2_norm_sq = radial_l2_norm_sq(shape, d);
    let fourier_moments = fourier_moments(shape, d)?;
    let profile = BumpProfile {
        shape,
        d,
        l2_norm_sq,
        fourier_moments,
    };
    profile_cache()
        .lock()
        .unwrap()
        .insert((shape, d), profile.clone());
    Ok(profile)
}

fn radial_l2_norm_sq(shape: BumpShape, d: usize) -> f64 {
    let plateau = unit_ball_volume(d) * PLATEAU.powi(d as i32);
    let (annulus, _) = integrate_refined(PLATEAU, SUPPORT, 1e-15, 1 << 14, |r| {
        let v = shape.radial(r);
        v * v * r.powi(d as i32 - 1)
    });
    plateau + unit_sphere_area(d) * annulus
}

/// z^{−m} j_m(z) for m = (d−3)/2, the kernel of the radial transform
/// Fη(p) = √(2/π) ∫ η(r) r^{d−1} g(pr) dr. For d = 1 this is cos z.
fn radial_kernel(d: usize, z: f64) -> f64 {
    match d {
        1 => z.cos(),
        3 => {
            if z < 1e-3 {
                1.0 - z * z / 6.0 + z.powi(4) / 120.0
            } else {
                z.sin() / z
            }
        }
        _ => {
            let m = (d - 3) / 2;
            if z < 1.0 {
                // Σ_k (−z²/2)^k / (k! (2m+2k+1)!!)
                let mut double_fact = 1.0;
                for j in 0..=m {
                    double_fact *= (2 * j + 1) as f64;
                }
                let mut term = 1.0 / double_fact;
                let mut sum = term;
                for k in 1..30 {
                    term *= -z * z / (2.0 * k as f64 * (2 * m + 2 * k + 1) as f64);
                    sum += term;
                    if term.abs() < 1e-18 * sum.abs() {
                        break;
                    }
                }
                sum
            } else {
                let (s, c) = z.sin_cos();
                let mut prev = s / z;
                let mut cur = s / (z * z) - c / z;
                for l in 1..m {
                    let next = (2 * l + 1) as f64 / z * cur - prev;
                    prev = cur;
                    cur = next;
                }
                if m == 0 {
                    cur = prev;
                }
                cur / z.powi(m as i32)
            }
        }
    }
}

/// Raw truncated moments ∫_0^P |Fη|² p^{2k} |S^{d−1}| p^{d−1} dp.
fn truncated_moments(shape: BumpShape, d: usize, cutoff: f64, orders: usize) -> Vec<f64> {
    // Inner rule: split at the plateau edge (the cutoff shape kinks there),
    // about two radians of phase per 12-point panel at the top frequency.
    let inner_panels = ((cutoff * PLATEAU / 2.0).ceil() as usize).max(8);
    let mut r_nodes = Vec::new();
    let mut r_weights = Vec::new();
    for (a, b) in [(0.0, PLATEAU), (PLATEAU, SUPPORT)] {
        let rule = CompositeRule::new(a, b, inner_panels, 12);
        for (r, w) in rule.nodes.iter().zip(&rule.weights) {
            let v = shape.radial(*r);
            if v != 0.0 {
                r_nodes.push(*r);
                r_weights.push(w * v * r.powi(d as i32 - 1));
            }
        }
    }
    let outer = CompositeRule::new(0.0, cutoff, (cutoff / PI).ceil() as usize, 12);
    let norm = (2.0 / PI).sqrt();
    let area = unit_sphere_area(d);
    let mut sums = vec![0.0; orders];
    for (&p, &wp) in outer.nodes.iter().zip(&outer.weights) {
        let f: f64 = norm
            * r_nodes
                .iter()
                .zip(&r_weights)
                .map(|(r, w)| w * radial_kernel(d, p * r))
                .sum::<f64>();
        let mut weight = wp * area * f * f * p.powi(d as i32 - 1);
        for s in sums.iter_mut() {
            *s += weight;
            weight *= p * p;
        }
    }
    sums
}

fn fourier_moments(shape: BumpShape, d: usize) -> Result<Vec<f64>> {
    let top = (d + 1) / 2;
    let finite = shape.max_finite_moment().map_or(top, |m| m.min(top));
    let orders = finite + 1;
    let mut prev_raw: Option<Vec<f64>> = None;
    let mut prev_est: Option<Vec<f64>> = None;
    let mut worst = f64::INFINITY;
    for level in FIRST_LEVEL..=LAST_LEVEL {
        let cutoff = 4.0 * PI * 2f64.powi(level as i32);
        let raw = truncated_moments(shape, d, cutoff, orders);
        let est: Vec<f64> = match &prev_raw {
            Some(prev) => (0..orders)
                .map(|k| match shape.tail_exponent(k) {
                    // Richardson step against the algebraic tail A/P^q.
                    Some(q) => {
                        let f = 2f64.powi(q);
                        (f * raw[k] - prev[k]) / (f - 1.0)
                    }
                    None => raw[k],
                })
                .collect(),
            None => raw.clone(),
        };
        if let Some(pe) = &prev_est {
            worst = est
                .iter()
                .zip(pe)
                .map(|(a, b)| (a - b).abs() / a.abs())
                .fold(0.0, f64::max);
            if worst <= MOMENT_TOL {
                let mut out = est;
                out.resize(top + 1, f64::INFINITY);
                return Ok(out);
            }
        }
        prev_est = Some(est);
        prev_raw = Some(raw);
    }
    Err(Error::Quadrature {
        relative_change: worst,
    })
}

/// g_α(x) = Σ Y_i η((x − X_i)/(α r_i)).
#[derive(Debug, Clone)]
pub struct WitnessInterpolant {
    centers: Points,
    heights: Vec<f64>,
    radii: Vec<f64>,
    alpha: f64,
    profile: BumpProfile,
}

pub fn build_witness(
    sample: &SampleSet,
    radii: &[f64],
    alpha: f64,
    profile: &BumpProfile,
) -> Result<WitnessInterpolant> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0, 1/2)")));
    }
    if radii.len() != sample.len() {
        return Err(Error::InvalidInput(format!(
            "{} radii for {} points",
            radii.len(),
            sample.len()
        )));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidInput("radii must be positive and finite".into()));
    }
    if profile.d != sample.dim() {
        return Err(Error::InvalidInput(format!(
            "bump profile for d = {} used with {}-dimensional points",
            profile.d,
            sample.dim()
        )));
    }
    Ok(WitnessInterpolant {
        centers: sample.points.clone(),
        heights: sample.targets.clone(),
        radii: radii.to_vec(),
        alpha,
        profile: profile.clone(),
    })
}

impl WitnessInterpolant {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Support radius of bump i: α r_i / 2.
    pub fn support_radius(&self, i: usize) -> f64 {
        0.5 * self.alpha * self.radii[i]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, center) in self.centers.rows().enumerate() {
            let scale = self.alpha * self.radii[i];
            let r = distance(x, center);
            if r < SUPPORT * scale {
                total += self.heights[i] * self.profile.shape.radial(r / scale);
            }
        }
        total
    }

    /// Pairwise check that the closed supports B(X_i, α r_i/2) do not meet.
    pub fn supports_disjoint(&self) -> bool {
        let n = self.centers.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                distance(self.centers.row(i), self.centers.row(j))
                    > self.support_radius(i) + self.support_radius(j)
            })
        })
    }

    fn weighted_sum(&self, exponent: i32) -> f64 {
        self.heights
            .iter()
            .zip(&self.radii)
            .filter(|(y, _)| **y != 0.0)
            .map(|(y, r)| y * y * (self.alpha * r).powi(exponent))
            .sum()
    }
}

/// ‖g_α‖²_{L²(ℝ^d)} = α^d ‖η‖² Σ Y_i² r_i^d.
pub fn witness_l2_norm_sq(w: &WitnessInterpolant) -> f64 {
    w.profile.l2_norm_sq * w.weighted_sum(w.profile.d as i32)
}

/// ⟨g_α⟩ = ‖g_α‖² + Σ_{k=1}^{(d+1)/2} binom((d+1)/2, k) c^{−2k} Σ_i Y_i² (α r_i)^{d−2k} ⟨η⟩_k.
pub fn witness_convention_norm(w: &WitnessInterpolant, cfg: &KernelConfig) -> Result<f64> {
    let d = w.profile.d;
    if cfg.dim() != d {
        return Err(Error::InvalidInput(format!(
            "{}-dimensional kernel for a {d}-dimensional witness",
            cfg.dim()
        )));
    }
    let top = (d + 1) / 2;
    let mut total = witness_l2_norm_sq(w);
    for k in 1..=top {
        let s = w.weighted_sum(d as i32 - 2 * k as i32);
        if s == 0.0 {
            continue;
        }
        let coeff = binomial(top as u64, k as u64) as f64 * cfg.bandwidth().powi(-2 * k as i32);
        total += coeff * s * w.profile.moment(k);
    }
    Ok(total)
}

/// Largest α ≤ `start` with ‖g_α‖² ≤ budget. ‖g_α‖² scales as α^d, so the
/// shrink is solved in closed form.
pub fn alpha_for_budget(
    sample: &SampleSet,
    radii: &[f64],
    profile: &BumpProfile,
    start: f64,
    budget: f64,
) -> Result<f64> {
    let w = build_witness(sample, radii, start, profile)?;
    let at_start = witness_l2_norm_sq(&w);
    if at_start <= budget {
        return Ok(start);
    }
    if !(budget > 0.0) {
        return Err(Error::param("budget", "must be positive to admit a nonzero witness"));
    }
    let ratio = (budget / at_start).powf(1.0 / profile.d as f64);
    Ok(start * ratio * (1.0 - 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{attach_labels, sample_labeled, separation_radii, TargetFunction};
    use approx::assert_relative_eq;

    fn spatial_first_moment_1d(shape: BumpShape) -> f64 {
        // ∫_ℝ η'(x)² dx with η' by a centred difference; the plateau adds nothing.
        let h = 1e-6;
        let (v, _) = integrate_refined(PLATEAU, SUPPORT, 1e-13, 1 << 14, |r| {
            let dv = (shape.radial(r + h) - shape.radial(r - h)) / (2.0 * h);
            dv * dv
        });
        2.0 * v
    }

    #[test]
    fn eta_values() {
        for shape in [BumpShape::Cutoff, BumpShape::Smooth] {
            assert_eq!(eta(shape, &[0.0]), 1.0);
            assert_eq!(eta(shape, &[0.0, 0.2, 0.0]), 1.0);
            assert_eq!(eta(shape, &[0.5]), 0.0);
            assert_eq!(eta(shape, &[0.3, 0.4, 0.0]), 0.0);
            for r in [0.26, 0.3, 0.4, 0.49] {
                let v = shape.radial(r);
                assert!(v > 0.0 && v < 1.0, "{shape:?} at {r}: {v}");
            }
            // continuity at both edges
            assert!((shape.radial(PLATEAU + 1e-9) - 1.0).abs() < 1e-6);
            assert!(shape.radial(SUPPORT - 1e-3) < 1e-6);
        }
        assert_relative_eq!(eta(BumpShape::Cutoff, &[0.375]), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(eta(BumpShape::Cutoff, &[0.375]), 0.367_879_441, max_relative = 1e-9);
        assert_relative_eq!(eta(BumpShape::Smooth, &[0.375]), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn radial_kernels_match_closed_forms() {
        for z in [0.3, 0.99, 1.0, 2.5, 17.0, 400.0] {
            let (s, c) = f64::sin_cos(z);
            assert_relative_eq!(radial_kernel(3, z), s / z, max_relative = 1e-13);
            let j1 = s / (z * z) - c / z;
            assert_relative_eq!(radial_kernel(5, z), j1 / z, max_relative = 1e-9, epsilon = 1e-15);
            let j2 = (3.0 / (z * z * z) - 1.0 / z) * s - 3.0 * c / (z * z);
            assert_relative_eq!(radial_kernel(7, z), j2 / (z * z), max_relative = 1e-7, epsilon = 1e-14);
        }
        assert_relative_eq!(radial_kernel(5, 0.0), 1.0 / 3.0);
        assert_relative_eq!(radial_kernel(7, 0.0), 1.0 / 15.0);
    }

    #[test]
    fn cutoff_profile_in_one_dimension() {
        let p = eta_moments(BumpShape::Cutoff, 1).unwrap();
        // plateau alone contributes 1/2
        assert!(p.l2_norm_sq > 0.5 && p.l2_norm_sq < 1.0);
        let simpson = {
            let m = 200_000;
            let h = (SUPPORT - PLATEAU) / m as f64;
            let f = |r: f64| BumpShape::Cutoff.radial(r).powi(2);
            let mut s = f(PLATEAU) + f(SUPPORT);
            for i in 1..m {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(PLATEAU + i as f64 * h);
            }
            0.5 + 2.0 * s * h / 3.0
        };
        assert_relative_eq!(p.l2_norm_sq, simpson, max_relative = 1e-8);
        assert_relative_eq!(p.moment(0), p.l2_norm_sq, max_relative = 1e-6);
        assert_relative_eq!(p.moment(1), spatial_first_moment_1d(BumpShape::Cutoff), max_relative = 1e-6);
        // ∫η'² has the closed form 10 for this profile.
        assert_relative_eq!(p.moment(1), 10.0, max_relative = 1e-6);
    }

    #[test]
    fn cutoff_profile_higher_moments_diverge() {
        let p = eta_moments(BumpShape::Cutoff, 3).unwrap();
        assert!(p.moment(1).is_finite());
        assert_relative_eq!(p.moment(1), 2.5 * PI, max_relative = 1e-6);
        assert!(p.moment(2).is_infinite());
    }

    #[test]
    fn plancherel_pins_the_convention() {
        for d in [1, 3, 5] {
            let p = eta_moments(BumpShape::Smooth, d).unwrap();
            assert_relative_eq!(p.moment(0), p.l2_norm_sq, max_relative = 1e-6);
            assert_eq!(p.fourier_moments.len(), (d + 1) / 2 + 1);
            assert!(p.sobolev_moments().iter().all(|m| *m > 0.0 && m.is_finite()));
        }
        let p = eta_moments(BumpShape::Smooth, 1).unwrap();
        assert_relative_eq!(p.moment(1), spatial_first_moment_1d(BumpShape::Smooth), max_relative = 1e-6);
    }

    #[test]
    fn rejects_unsupported_dimensions() {
        assert!(eta_moments(BumpShape::Smooth, 2).is_err());
        assert!(eta_moments(BumpShape::Smooth, 9).is_err());
    }

    fn two_point_sample() -> SampleSet {
        let pts = Points::from_rows(1, &[vec![-0.5], vec![0.5]]).unwrap();
        attach_labels(pts, TargetFunction::ConstOne, 0)
            .with_targets(vec![2.0, 0.0])
            .unwrap()
    }

    #[test]
    fn witness_hand_example() {
        let s = two_point_sample();
        let profile = eta_moments(BumpShape::Cutoff, 1).unwrap();
        let w = build_witness(&s, &[0.5, 0.5], 0.4, &profile).unwrap();
        assert_eq!(w.eval(&[-0.5]), 2.0);
        assert_eq!(w.eval(&[0.5]), 0.0);
        assert_eq!(w.eval(&[0.0]), 0.0);
        assert_eq!(w.eval(&[-0.5 + 0.1]), 0.0);
        assert!(w.eval(&[-0.5 + 0.07]) > 0.0);
        assert!(w.supports_disjoint());
        assert!(build_witness(&s, &[0.5, 0.5], 0.5, &profile).is_err());
        assert!(build_witness(&s, &[0.5, 0.5], 0.0, &profile).is_err());
    }

    #[test]
    fn single_point_closed_forms() {
        let pts = Points::from_rows(1, &[vec![0.0]]).unwrap();
        let s = attach_labels(pts, TargetFunction::ConstOne, 0).with_targets(vec![1.0]).unwrap();
        let profile = eta_moments(BumpShape::Cutoff, 1).unwrap();
        let w = build_witness(&s, &[1.0], 0.4, &profile).unwrap();
        assert_relative_eq!(witness_l2_norm_sq(&w), 0.4 * profile.l2_norm_sq, max_relative = 1e-15);
        let cfg = KernelConfig::scaled(1, 1.0).unwrap();
        let expect = 0.4 * profile.l2_norm_sq + profile.moment(1) / 0.4;
        assert_relative_eq!(witness_convention_norm(&w, &cfg).unwrap(), expect, max_relative = 1e-14);

        let far = KernelConfig::scaled(1, 1e8).unwrap();
        assert_relative_eq!(
            witness_convention_norm(&w, &far).unwrap(),
            witness_l2_norm_sq(&w),
            max_relative = 1e-12
        );
    }

    #[test]
    fn zero_heights_give_zero_norms() {
        let s = sample_labeled(10, 3, TargetFunction::ConstOne, 1).unwrap();
        let s = s.with_targets(vec![0.0; 10]).unwrap();
        let radii = separation_radii(&s.points, true).unwrap();
        // infinite moments times zero heights must not poison the sum
        let profile = eta_moments(BumpShape::Cutoff, 3).unwrap();
        let w = build_witness(&s, &radii, 0.3, &profile).unwrap();
        assert_eq!(witness_l2_norm_sq(&w), 0.0);
        let cfg = KernelConfig::scaled(3, 2.0).unwrap();
        assert_eq!(witness_convention_norm(&w, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn doubling_radii_scales_each_term() {
        let s = sample_labeled(12, 3, TargetFunction::GaussBump, 4).unwrap();
        let radii = separation_radii(&s.points, true).unwrap();
        let doubled: Vec<f64> = radii.iter().map(|r| 2.0 * r).collect();
        let profile = eta_moments(BumpShape::Smooth, 3).unwrap();
        let a = build_witness(&s, &radii, 0.2, &profile).unwrap();
        let b = build_witness(&s, &doubled, 0.2, &profile).unwrap();
        for k in 0..=2i32 {
            let e = 3 - 2 * k;
            assert_relative_eq!(b.weighted_sum(e), 2f64.powi(e) * a.weighted_sum(e), max_relative = 1e-14);
        }
    }

    #[test]
    fn sampled_witness_has_disjoint_supports_and_interpolates() {
        for (d, shape) in [(1, BumpShape::Cutoff), (3, BumpShape::Smooth)] {
            let s = sample_labeled(200, d, TargetFunction::ConstOne, 12).unwrap();
            let profile = eta_moments(shape, d).unwrap();
            for include_boundary in [true, false] {
                let radii = separation_radii(&s.points, include_boundary).unwrap();
                for alpha in [0.1, 0.25, 0.4, 0.499] {
                    let w = build_witness(&s, &radii, alpha, &profile).unwrap();
                    assert!(w.supports_disjoint());
                    for (x, y) in s.points.rows().zip(&s.targets) {
                        assert_eq!(w.eval(x), *y);
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_budget_is_respected() {
        let s = sample_labeled(50, 1, TargetFunction::ConstOne, 2).unwrap();
        let radii = separation_radii(&s.points, true).unwrap();
        let profile = eta_moments(BumpShape::Cutoff, 1).unwrap();
        let budget = TargetFunction::ConstOne.l2_norm_sq_on_ball(1) / 3.0;
        let alpha = alpha_for_budget(&s, &radii, &profile, 0.4, budget).unwrap();
        assert!(alpha > 0.0 && alpha <= 0.4);
        let w = build_witness(&s, &radii, alpha, &profile).unwrap();
        assert!(witness_l2_norm_sq(&w) <= budget);
        let tiny = alpha_for_budget(&s, &radii, &profile, 0.4, 1e-6).unwrap();
        let w = build_witness(&s, &radii, tiny, &profile).unwrap();
        assert!(witness_l2_norm_sq(&w) <= 1e-6);
        assert_relative_eq!(witness_l2_norm_sq(&w), 1e-6, max_relative = 1e-9);
    }
}
