use proptest::prelude::*;

use ridgeless::geometry::{power_average, sample_labeled, sample_uniform_ball, separation_radii, Points, TargetFunction};
use ridgeless::interpolant::{convention_norm, fit_min_norm, fit_ridge};
use ridgeless::kernel::{eval_kernel, lambda_eig, KernelConfig};

fn odd_dim() -> impl Strategy<Value = usize> {
    prop_oneof![Just(1usize), Just(3), Just(5)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn packing_bound_holds(d in odd_dim(), n in 1usize..200, seed in any::<u64>()) {
        let radii = separation_radii(&sample_uniform_ball(n, d, seed).unwrap(), true).unwrap();
        let sum: f64 = radii.iter().map(|r| r.powi(d as i32)).sum();
        prop_assert!(sum <= 2f64.powi(d as i32));
        prop_assert!(radii.iter().all(|r| *r > 0.0 && *r <= 1.0));
    }

    #[test]
    fn power_average_is_monotone(radii in prop::collection::vec(0.01f64..1.0, 1..20), i in 0usize..20, k in -3i32..4) {
        prop_assume!(k != 0);
        let i = i % radii.len();
        let mut raised = radii.clone();
        raised[i] *= 1.5;
        let (a, b) = (power_average(&radii, k as f64).unwrap(), power_average(&raised, k as f64).unwrap());
        if k > 0 { prop_assert!(b > a) } else { prop_assert!(b < a) }
    }

    #[test]
    fn kernel_is_symmetric_and_bounded(c in 0.1f64..50.0, x in prop::array::uniform3(-1.0f64..1.0), y in prop::array::uniform3(-1.0f64..1.0)) {
        let cfg = KernelConfig::scaled(3, c).unwrap();
        let (a, b) = (eval_kernel(&cfg, &x, &y).unwrap(), eval_kernel(&cfg, &y, &x).unwrap());
        prop_assert_eq!(a, b);
        prop_assert!(a <= eval_kernel(&cfg, &x, &x).unwrap());
    }

    #[test]
    fn fourier_side_decreases(d in odd_dim(), c in 0.1f64..50.0, p in 0.0f64..100.0) {
        let cfg = KernelConfig::scaled(d, c).unwrap();
        prop_assert!(lambda_eig(&cfg, p + 0.5).unwrap() < lambda_eig(&cfg, p).unwrap());
    }

    #[test]
    fn small_fits_interpolate(d in prop_oneof![Just(1usize), Just(3)], n in 1usize..60, c in 0.5f64..30.0, seed in any::<u64>()) {
        let sample = sample_labeled(n, d, TargetFunction::CoordLinear, seed).unwrap();
        let model = fit_min_norm(&KernelConfig::scaled(d, c).unwrap(), &sample).unwrap();
        let fitted = model.predict_batch(&sample.points).unwrap();
        for (f, y) in fitted.iter().zip(&sample.targets) {
            prop_assert!((f - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn ridge_shrinks_the_norm(n in 2usize..40, c in 0.5f64..10.0, lam in 1e-6f64..1.0, seed in any::<u64>()) {
        let sample = sample_labeled(n, 1, TargetFunction::GaussBump, seed).unwrap();
        let cfg = KernelConfig::scaled(1, c).unwrap();
        let exact = convention_norm(&fit_min_norm(&cfg, &sample).unwrap());
        let ridge = convention_norm(&fit_ridge(&cfg, &sample, lam).unwrap());
        prop_assert!(ridge <= exact * (1.0 + 1e-9));
    }
}

#[test]
fn coincident_points_are_rejected() {
    let points = Points::from_rows(1, &[vec![0.2], vec![0.2]]).unwrap();
    assert!(separation_radii(&points, false).is_err());
}
