//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness; arguments filter criteria by substring.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ridgeless::bump::{build_witness, eta_moments, witness_convention_norm, witness_l2_norm_sq, BumpShape};
use ridgeless::experiments::{
    emit_csv, emit_json, inconsistency_summary, read_csv, read_json, render_risk_curves, run_sweep, SweepGrid,
    SweepRecord,
};
use ridgeless::geometry::{
    distance, norm, power_average, sample_labeled, sample_uniform_ball, separation_radii, Domain, Points, SampleSet,
    TargetFunction,
};
use ridgeless::interpolant::{convention_norm, fit_min_norm};
use ridgeless::kernel::{lambda_eig, KernelConfig};
use ridgeless::risk::mc_l2_norm_sq;
use ridgeless::sobolev::{verify_kernel_norm, verify_kernel_norm_on, GridSpec};

const RESIDUAL_TOL: f64 = 1e-6;
const EXACT_FRACTION: f64 = 0.95;
const KERNEL_NORM_TOL: f64 = 0.02;
const LAMBDA_TOL: f64 = 1e-6;
const OPTIMALITY_SLACK: f64 = 1e-9;
const MC_SIGMAS: f64 = 3.0;
const SLOPE_TOL: f64 = 0.15;
/// Floor on the minimum excess risk, frozen from a pilot sweep.
const RISK_FLOOR: f64 = 0.05;
const TREND_FLOOR: f64 = -0.5;
const SPIKE_RATIO: f64 = 0.1;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random::<f64>() * (hi.ln() - lo.ln()) + lo.ln()).exp()
}

fn relative(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn default_sweep() -> &'static [SweepRecord] {
    static RECORDS: OnceLock<Vec<SweepRecord>> = OnceLock::new();
    RECORDS.get_or_init(|| {
        let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
        run_sweep(&SweepGrid::default(), jobs).expect("default sweep")
    })
}

fn interpolation_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let targets = [TargetFunction::ConstOne, TargetFunction::GaussBump, TargetFunction::CoordLinear];
    let (mut exact, mut jittered, mut worst) = (0usize, 0usize, 0.0f64);
    let total = 200;
    for i in 0..total {
        let d = if rng.random::<bool>() { 1 } else { 3 };
        let n = log_uniform(&mut rng, 10.0, 500.0).round() as usize;
        let c = log_uniform(&mut rng, 0.5, 32.0);
        let sample = sample_labeled(n, d, targets[i % 3], 1000 + i as u64).unwrap();
        let model = fit_min_norm(&KernelConfig::scaled(d, c).unwrap(), &sample).unwrap();
        let fitted = model.predict_batch(&sample.points).unwrap();
        let residual = fitted.iter().zip(&sample.targets).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(residual);
        let clean = model.diagnostics().jitter_used == 0.0;
        jittered += usize::from(!clean);
        exact += usize::from(clean && residual <= RESIDUAL_TOL);
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        passed: exact as f64 >= EXACT_FRACTION * total as f64 && secs < 60.0,
        detail: format!("{exact}/{total} exact, {jittered} jittered, max residual {worst:.2e}, under 60 s: {}", secs < 60.0),
    }
}

fn kernel_norm_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..30u64 {
        let c = [0.5, 2.0, 8.0][(i % 3) as usize];
        let n = [1, 10, 50][((i / 3) % 3) as usize];
        let sample = sample_labeled(n, 1, TargetFunction::GaussBump, 500 + i).unwrap();
        let ratio = verify_kernel_norm(&sample, c).unwrap().ratio.expect("nonzero labels");
        worst = worst.max((ratio - 1.0).abs());
    }
    // Refinement at fixed width: the worst deviation over the instance set
    // must not grow as m doubles.
    let mut envelope = vec![0.0f64; 7];
    for i in 0..30u64 {
        let c = [0.5, 2.0, 8.0][(i % 3) as usize];
        let n = [1, 10, 50][((i / 3) % 3) as usize];
        let sample = sample_labeled(n, 1, TargetFunction::GaussBump, 500 + i).unwrap();
        let half_width = GridSpec::for_bandwidth(c).half_width;
        for (slot, log2) in envelope.iter_mut().zip(16..=22) {
            let grid = GridSpec { half_width, m: 1 << log2 };
            *slot = slot.max((verify_kernel_norm_on(&sample, c, grid).unwrap().ratio.unwrap() - 1.0).abs());
        }
    }
    let monotone = envelope.windows(2).all(|w| w[1] <= w[0]);
    let envelope: Vec<String> = envelope.iter().map(|e| format!("{e:.1e}")).collect();
    Outcome {
        passed: worst <= KERNEL_NORM_TOL && monotone,
        detail: format!(
            "max |ratio - 1| = {worst:.2e} over 30 instances; worst case for m = 2^16..2^22: [{}], monotone: {monotone}",
            envelope.join(", ")
        ),
    }
}

/// Composite Simpson rule with `m` (even) intervals.
fn simpson(a: f64, b: f64, m: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / m as f64;
    let inner: f64 = (1..m).map(|j| f(a + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn fourier_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for c in [0.5, 2.0, 8.0] {
        let upper = 45.0 / c;
        for ratio in [0.0, 0.5, 1.0, 3.0, 10.0] {
            let p = ratio * c;
            // ∫ c e^{−c|x|} e^{−ipx} dx
            let direct = 2.0 * simpson(0.0, upper, 1 << 20, |x| c * (-c * x).exp() * (p * x).cos());
            worst = worst.max(relative(lambda_eig(&KernelConfig::scaled(1, c).unwrap(), p).unwrap(), direct));
            pairs += 1;
            if p > 0.0 {
                // Radial form in three dimensions: (4π/p) ∫ r sin(pr) c³ e^{−cr} dr.
                let direct = 4.0 * PI / p
                    * simpson(0.0, upper, 1 << 20, |r| r * (p * r).sin() * c.powi(3) * (-c * r).exp());
                worst = worst.max(relative(lambda_eig(&KernelConfig::scaled(3, c).unwrap(), p).unwrap(), direct));
            }
        }
    }
    let mut exact_zero = true;
    for c in [0.3, 1.0, 17.0] {
        exact_zero &= lambda_eig(&KernelConfig::scaled(1, c).unwrap(), 0.0).unwrap() == 2.0;
        exact_zero &= lambda_eig(&KernelConfig::scaled(3, c).unwrap(), 0.0).unwrap() == 8.0 * PI;
    }
    Outcome {
        passed: worst <= LAMBDA_TOL && exact_zero,
        detail: format!("max relative error {worst:.2e} over {pairs} (p, c) pairs in d=1 plus d=3, lambda(0) exact: {exact_zero}"),
    }
}

fn witness_shape(d: usize) -> BumpShape {
    // The kinked cutoff has finite moments only up to k = 1.
    if d == 1 {
        BumpShape::Cutoff
    } else {
        BumpShape::Smooth
    }
}

fn minimum_norm_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for i in 0..100u64 {
        let d = [1, 3][(i % 2) as usize];
        let alpha = [0.1, 0.25, 0.4][(i % 3) as usize];
        let n = rng.random_range(10..=300);
        let c = log_uniform(&mut rng, 0.5, 32.0);
        let sample = sample_labeled(n, d, TargetFunction::ConstOne, 2000 + i).unwrap();
        let cfg = KernelConfig::scaled(d, c).unwrap();
        let q = convention_norm(&fit_min_norm(&cfg, &sample).unwrap());
        let radii = separation_radii(&sample.points, true).unwrap();
        let profile = eta_moments(witness_shape(d), d).unwrap();
        let w = witness_convention_norm(&build_witness(&sample, &radii, alpha, &profile).unwrap(), &cfg).unwrap();
        let gap = (q - w) / w;
        worst = worst.max(gap);
        violations += usize::from(gap > OPTIMALITY_SLACK);
    }
    Outcome {
        passed: violations == 0,
        detail: format!("{violations}/100 violations, max (q - w)/w = {worst:.3}"),
    }
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    let d = center.len();
    let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let len = norm(&dir);
    let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
    center.iter().zip(&dir).map(|(c, u)| c + r * u / len).collect()
}

fn witness_closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let per_ball = 4000;
    let (mut worst_z, mut interpolates, mut disjoint): (f64, bool, bool) = (0.0, true, true);
    for i in 0..30u64 {
        let d = [1, 3][(i % 2) as usize];
        let shape = if i % 4 < 2 { BumpShape::Smooth } else { witness_shape(d) };
        let alpha = [0.1, 0.25, 0.4][(i % 3) as usize];
        let n = rng.random_range(5..=60);
        let sample = sample_labeled(n, d, TargetFunction::GaussBump, 3000 + i).unwrap();
        let radii = separation_radii(&sample.points, true).unwrap();
        let w = build_witness(&sample, &radii, alpha, &eta_moments(shape, d).unwrap()).unwrap();
        disjoint &= w.supports_disjoint();
        interpolates &= sample.points.rows().zip(&sample.targets).all(|(x, y)| w.eval(x) == *y);

        // Monte Carlo ball by ball; the supports are disjoint.
        let unit_volume = if d == 1 { 2.0 } else { 4.0 * PI / 3.0 };
        let (mut estimate, mut variance) = (0.0, 0.0);
        for (j, x) in sample.points.rows().enumerate() {
            let rho = w.support_radius(j);
            let vol = unit_volume * rho.powi(d as i32);
            let vals: Vec<f64> = (0..per_ball).map(|_| w.eval(&uniform_in_ball(&mut rng, x, rho)).powi(2)).collect();
            let mean = vals.iter().sum::<f64>() / per_ball as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (per_ball - 1) as f64;
            estimate += vol * mean;
            variance += vol * vol * var / per_ball as f64;
        }
        worst_z = worst_z.max((estimate - witness_l2_norm_sq(&w)).abs() / variance.sqrt());
    }
    Outcome {
        passed: worst_z <= MC_SIGMAS && interpolates && disjoint,
        detail: format!("max |MC - closed form| = {worst_z:.2} SE over 30 instances, exact interpolation: {interpolates}, disjoint supports: {disjoint}"),
    }
}

fn brute_force_radii(points: &Points) -> Vec<f64> {
    points
        .rows()
        .enumerate()
        .map(|(i, x)| {
            points
                .rows()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, y)| distance(x, y))
                .fold(1.0 - norm(x), f64::min)
        })
        .collect()
}

fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn separation_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let (mut worst_packing, mut radii_match): (f64, bool) = (0.0, true);
    for i in 0..1000u64 {
        let d = [1, 3, 5][(i % 3) as usize];
        let n = rng.random_range(1..=300);
        let points = sample_uniform_ball(n, d, 4000 + i).unwrap();
        let radii = separation_radii(&points, true).unwrap();
        if i < 60 {
            radii_match &= radii.iter().zip(brute_force_radii(&points)).all(|(a, b)| (a - b).abs() <= 1e-12);
        }
        let sum: f64 = radii.iter().map(|r| r.powi(d as i32)).sum();
        worst_packing = worst_packing.max(sum / 2f64.powi(d as i32));
    }
    let sizes = [100usize, 200, 400, 800, 1600];
    let mut slopes = Vec::new();
    let mut slopes_ok = true;
    for (d, ks) in [(1usize, vec![-1, 1]), (3, vec![-1, 1, 3])] {
        let radii: Vec<(f64, Vec<f64>)> = sizes
            .iter()
            .flat_map(|&n| (1..=20u64).map(move |seed| (n, seed)))
            .map(|(n, seed)| {
                let points = sample_uniform_ball(n, d, seed).unwrap();
                ((n as f64).ln(), separation_radii(&points, true).unwrap())
            })
            .collect();
        for k in ks {
            let xs: Vec<f64> = radii.iter().map(|(x, _)| *x).collect();
            let ys: Vec<f64> = radii.iter().map(|(_, r)| power_average(r, k as f64).unwrap().ln()).collect();
            let slope = ols_slope(&xs, &ys);
            let target = -(k as f64) / d as f64;
            slopes_ok &= (slope - target).abs() <= SLOPE_TOL;
            slopes.push(format!("d={d} k={k}: {slope:.3} vs {target:.3}"));
        }
    }
    Outcome {
        passed: worst_packing <= 1.0 && radii_match && slopes_ok,
        detail: format!(
            "max sum r^d / 2^d = {worst_packing:.3}, radii match brute force: {radii_match}; slopes {}",
            slopes.join(", ")
        ),
    }
}

fn inconsistency() -> Outcome {
    let summary = inconsistency_summary(default_sweep()).unwrap();
    let floor_ok = summary.rows.iter().all(|r| r.risk.mean >= RISK_FLOOR);
    let trend_ok = summary.trends.iter().all(|(_, rho)| *rho > TREND_FLOOR);
    let per_d: Vec<String> = summary
        .trends
        .iter()
        .map(|(d, rho)| {
            let mins: Vec<String> = summary
                .rows
                .iter()
                .filter(|r| r.d == *d)
                .map(|r| format!("{:.4}", r.risk.mean))
                .collect();
            format!("d={d} min risk [{}] Spearman {rho:.3}", mins.join(", "))
        })
        .collect();
    Outcome {
        passed: floor_ok && trend_ok && summary.excluded.is_empty(),
        detail: format!(
            "floor >= {RISK_FLOOR}: {floor_ok}, Spearman > {TREND_FLOOR}: {trend_ok}, excluded {}; {}",
            summary.excluded.len(),
            per_d.join("; ")
        ),
    }
}

fn spike_regime() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for r in default_sweep().iter().filter(|r| (r.c_ratio - 32.0).abs() < 1e-12) {
        let (Some(fhat), Some(f0)) = (r.l2_fhat_mean, r.l2_f0) else {
            return Outcome {
                passed: false,
                detail: format!("missing norm at {}", r.coordinates()),
            };
        };
        worst = worst.max(fhat / f0);
        cells += 1;
    }
    // One point at the origin with label 1: f̂ = e^{−c|x|}, ‖f̂‖² = (1 − e^{−2c})/c on [−1, 1].
    let c = 10.0;
    let single = SampleSet {
        points: Points::from_rows(1, &[vec![0.0]]).unwrap(),
        targets: vec![1.0],
        noise: vec![0.0],
        f0: TargetFunction::ConstOne,
        seed: 0,
    };
    let model = fit_min_norm(&KernelConfig::scaled(1, c).unwrap(), &single).unwrap();
    let est = mc_l2_norm_sq(&model, &Domain::unit_ball(1).unwrap(), 200_000, 23).unwrap();
    let exact = (1.0 - (-2.0 * c).exp()) / c;
    let z = (est.mean - exact).abs() / est.std_error;
    Outcome {
        passed: cells > 0 && worst <= SPIKE_RATIO && z <= MC_SIGMAS,
        detail: format!("max ||f_hat||^2/||f0||^2 = {worst:.4} over {cells} records at c = 32 n^(1/d); n=1 check {z:.2} SE"),
    }
}

fn reproducibility() -> Outcome {
    let grid = SweepGrid::parse(
        "d_list = 1, 3\nn_list = 50, 100\nc_rule = n_root_multiple\nc_values = 1, 8\nseeds = 1, 2\nm_test = 2000\n",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (run, jobs) in [1usize, 3, 1].into_iter().enumerate() {
        let records = run_sweep(&grid, jobs).unwrap();
        let csv = dir.path().join(format!("run{run}.csv"));
        let json = dir.path().join(format!("run{run}.json"));
        emit_csv(&records, &csv).unwrap();
        emit_json(&records, &json).unwrap();
        let round_trip = read_csv(&csv).unwrap() == records && read_json(&json).unwrap() == records;
        outputs.push((
            std::fs::read(&csv).unwrap(),
            std::fs::read(&json).unwrap(),
            render_risk_curves(&records).unwrap(),
            round_trip,
        ));
    }
    let identical = outputs.windows(2).all(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1 && w[0].2 == w[1].2);
    let lossless = outputs.iter().all(|o| o.3);
    Outcome {
        passed: identical && lossless,
        detail: format!("CSV/JSON/SVG identical across jobs = 1, 3, 1: {identical}; lossless round trip: {lossless}"),
    }
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, Criterion); 9] = [
        ("1 interpolation exactness", interpolation_exactness),
        ("2 kernel norm identity", kernel_norm_identity),
        ("3 Fourier closed form", fourier_closed_form),
        ("4 minimum-norm optimality", minimum_norm_optimality),
        ("5 witness closed forms", witness_closed_forms),
        ("6 separation scaling", separation_scaling),
        ("7 inconsistency", inconsistency),
        ("8 spike regime", spike_regime),
        ("9 reproducibility", reproducibility),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (name, check) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        ran += 1;
        failed += usize::from(!outcome.passed);
        println!(
            "criterion {name}: {} ({}; {:.1} s)",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
