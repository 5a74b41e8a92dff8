//! Self-checks behind `ridgeless verify`.

use serde::Serialize;

use super::sweep::WITNESS_SHAPE;
use crate::bump::{build_witness, eta_moments, witness_convention_norm};
use crate::error::Result;
use crate::geometry::{power_average, sample_labeled, sample_uniform_ball, separation_radii, SeparationStats, TargetFunction};
use crate::interpolant::{convention_norm, fit_min_norm};
use crate::kernel::KernelConfig;
use crate::sobolev::verify_kernel_norm;

/// Sample sizes of the scaling-slope check.
pub const SLOPE_SIZES: [usize; 5] = [100, 200, 400, 800, 1600];
pub const SLOPE_SEEDS: u64 = 20;
pub const SLOPE_TOLERANCE: f64 = 0.15;
pub const KERNEL_NORM_TOLERANCE: f64 = 0.02;
pub const OPTIMALITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable pass condition on `value`.
    pub limit: String,
    pub passed: bool,
}

/// Least-squares slope of ys on xs.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of log (1/n)Σ r_i^k against log n, pooled over `seeds` seeds per
/// size, with boundary-inclusive radii of uniform samples on the unit ball.
pub fn power_average_slope(d: usize, k: i32, sizes: &[usize], seeds: impl Iterator<Item = u64> + Clone) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in sizes {
        for seed in seeds.clone() {
            let points = sample_uniform_ball(n, d, seed)?;
            let radii = separation_radii(&points, true)?;
            xs.push((n as f64).ln());
            ys.push(power_average(&radii, k as f64)?.ln());
        }
    }
    Ok(ols_slope(&xs, &ys))
}

fn kernel_norm_check(seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for c in [0.5, 2.0, 8.0] {
        for n in [1, 10] {
            let sample = sample_labeled(n, 1, TargetFunction::ConstOne, seed)?;
            let report = verify_kernel_norm(&sample, c)?;
            worst = worst.max(report.ratio.map_or(0.0, |r| (r - 1.0).abs()));
        }
    }
    Ok(Check {
        name: "kernel norm on a grid, d=1: max |ratio - 1|".into(),
        value: worst,
        limit: format!("<= {KERNEL_NORM_TOLERANCE}"),
        passed: worst <= KERNEL_NORM_TOLERANCE,
    })
}

fn optimality_check(seed: u64) -> Result<Check> {
    let mut worst = f64::NEG_INFINITY;
    for d in [1, 3] {
        let profile = eta_moments(WITNESS_SHAPE, d)?;
        for (i, c) in [1.0, 8.0].into_iter().enumerate() {
            let sample = sample_labeled(40, d, TargetFunction::ConstOne, seed + i as u64)?;
            let cfg = KernelConfig::scaled(d, c)?;
            let q = convention_norm(&fit_min_norm(&cfg, &sample)?);
            let radii = separation_radii(&sample.points, true)?;
            for alpha in [0.1, 0.25, 0.4] {
                let w = witness_convention_norm(&build_witness(&sample, &radii, alpha, &profile)?, &cfg)?;
                worst = worst.max((q - w) / w);
            }
        }
    }
    Ok(Check {
        name: "min-norm fit vs witness: max (q - w)/w".into(),
        value: worst,
        limit: format!("<= {OPTIMALITY_SLACK:e}"),
        passed: worst <= OPTIMALITY_SLACK,
    })
}

fn packing_check(seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let d = [1, 3, 5][(i % 3) as usize];
        let n = 2 + (i as usize * 37) % 300;
        let stats = SeparationStats::compute(&sample_uniform_ball(n, d, seed.wrapping_add(i))?, true)?;
        worst = worst.max(stats.sum_rd / 2f64.powi(d as i32));
    }
    Ok(Check {
        name: "packing: max sum r^d / 2^d over 200 samples".into(),
        value: worst,
        limit: "<= 1".into(),
        passed: worst <= 1.0,
    })
}

/// Run every check. `seed` offsets the random instances; the slope check
/// uses seeds `seed..seed + 20`.
pub fn verification_suite(seed: u64) -> Result<Vec<Check>> {
    let mut checks = vec![kernel_norm_check(seed)?, optimality_check(seed)?, packing_check(seed)?];
    for d in [1usize, 3] {
        let mut ks = vec![-1, 1, d as i32];
        ks.dedup();
        for k in ks {
            let slope = power_average_slope(d, k, &SLOPE_SIZES, seed..seed + SLOPE_SEEDS)?;
            let target = -(k as f64) / d as f64;
            checks.push(Check {
                name: format!("power-average slope, d={d} k={k}"),
                value: slope,
                limit: format!("{target:.3} +/- {SLOPE_TOLERANCE}"),
                passed: (slope - target).abs() <= SLOPE_TOLERANCE,
            });
        }
    }
    Ok(checks)
}
