use adaptscale_core::policy::*;
use proptest::prelude::*;

fn capacity() -> impl Strategy<Value = CapacityModel> {
    (10.0f64..500.0, 1u32..5, 0u32..60).prop_map(|(c, lo, span)| CapacityModel {
        per_replica_rps: c,
        min_replicas: lo,
        max_replicas: lo + span,
    })
}

fn weights() -> impl Strategy<Value = MpcWeights> {
    (0.0f64..200.0, 0.0f64..5.0, 0.0f64..5.0, 1.0f64..2.0).prop_map(|(sla, cost, stability, gamma)| MpcWeights {
        sla,
        cost: cost + 0.01,
        stability,
        gamma,
    })
}

fn case() -> impl Strategy<Value = (f64, u32, Vec<f64>, u32, CapacityModel, MpcWeights)> {
    (capacity(), weights(), 1u32..8).prop_flat_map(|(cap, w, h)| {
        (
            0.0f64..10_000.0,
            cap.min_replicas..=cap.max_replicas,
            prop::collection::vec(0.0f64..10_000.0, h as usize..h as usize + 4),
            Just(h),
            Just(cap),
            Just(w),
        )
    })
}

fn reference_ceil(x: f64) -> u32 {
    x.ceil() as u32
}

proptest! {
    #[test]
    fn hard_floor_and_bounds((rps, n_a, forecast, h, cap, w) in case()) {
        let d = mpc_decide(rps, n_a, &forecast, h, &cap, &w).unwrap();
        let floor = reference_ceil(rps / cap.per_replica_rps).max(1);
        prop_assert!(d.target_replicas >= floor.min(cap.max_replicas));
        prop_assert!((cap.min_replicas..=cap.max_replicas).contains(&d.target_replicas));
        prop_assert_eq!(d.horizon_used, h);
    }

    #[test]
    fn raising_forecast_never_lowers_proactive_target(
        (rps, n_a, forecast, h, cap, w) in case(),
        idx in any::<prop::sample::Index>(),
        bump in 0.0f64..5_000.0,
    ) {
        let before = mpc_decide(rps, n_a, &forecast, h, &cap, &w).unwrap();
        let mut raised = forecast.clone();
        let i = idx.index(h as usize);
        raised[i] += bump;
        let after = mpc_decide(rps, n_a, &raised, h, &cap, &w).unwrap();
        prop_assert!(after.proactive_target >= before.proactive_target);
        prop_assert!(after.target_replicas >= before.target_replicas);
    }

    #[test]
    fn proactive_only_raises_sweep_result((rps, n_a, forecast, h, cap, w) in case()) {
        let d = mpc_decide(rps, n_a, &forecast, h, &cap, &w).unwrap();
        let (argmin, best) = sweep_argmin(rps, n_a, &cap, &w);
        prop_assert!(d.target_replicas >= argmin);
        prop_assert_eq!(d.best_candidate_cost, Some(best));
    }

    #[test]
    fn entries_beyond_horizon_are_never_read((rps, n_a, forecast, h, cap, w) in case(), poison in prop::sample::select(vec![f64::NAN, f64::INFINITY, 1e300])) {
        let clean = mpc_decide(rps, n_a, &forecast[..h as usize], h, &cap, &w).unwrap();
        let mut tripwire = forecast[..h as usize].to_vec();
        tripwire.extend([poison; 5]);
        let poisoned = mpc_decide(rps, n_a, &tripwire, h, &cap, &w).unwrap();
        prop_assert_eq!(clean, poisoned);
    }

    #[test]
    fn hpa_holds_inside_dead_band(n_a in 1u32..50, ratio in 0.9f64..=1.1, c in 10.0f64..500.0) {
        let cap = CapacityModel { per_replica_rps: c, min_replicas: 1, max_replicas: 50 };
        let hpa = HpaParams::default();
        let rps = ratio * hpa.target_utilization * f64::from(n_a) * c;
        // stay a hair inside the band so rounding in rps cannot push it out
        prop_assume!((rps / (f64::from(n_a) * c) / hpa.target_utilization - 1.0).abs() <= hpa.tolerance);
        prop_assert_eq!(hpa_decide(rps, n_a, &cap, &hpa).target_replicas, n_a);
    }

    #[test]
    fn hpa_is_clamped(rps in 0.0f64..1e6, n_a in 1u32..80, cap in capacity(), saturate in any::<bool>()) {
        let hpa = HpaParams { saturate_cpu: saturate, ..HpaParams::default() };
        let d = hpa_decide(rps, n_a, &cap, &hpa);
        prop_assert!((cap.min_replicas..=cap.max_replicas).contains(&d.target_replicas));
        prop_assert_eq!(d.horizon_used, 1);
        prop_assert_eq!(d.proactive_target, d.target_replicas);
    }

    #[test]
    fn saturated_hpa_grows_at_most_one_over_target(rps in 0.0f64..1e6, n_a in 1u32..50) {
        let cap = CapacityModel::default();
        let hpa = HpaParams::default();
        let d = hpa_decide(rps, n_a, &cap, &hpa);
        let bound = (f64::from(n_a) / hpa.target_utilization).ceil() as u32;
        prop_assert!(d.target_replicas <= bound.max(cap.min_replicas));
    }
}

#[test]
fn hard_floor_ten_thousand_random_inputs() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::{Config, TestRunner};
    let mut runner = TestRunner::new_with_rng(Config::default(), proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha));
    let cap = CapacityModel::default();
    let w = MpcWeights::default();
    let strat = (0.0f64..6_000.0, 1u32..=50, prop::collection::vec(0.0f64..6_000.0, 8), 1u32..=8);
    for _ in 0..10_000 {
        let (rps, n_a, forecast, h) = strat.new_tree(&mut runner).unwrap().current();
        let d = mpc_decide(rps, n_a, &forecast, h, &cap, &w).unwrap();
        let floor = reference_ceil(rps / cap.per_replica_rps).max(1).min(cap.max_replicas);
        assert!(d.target_replicas >= floor, "rps {rps}: {} < {floor}", d.target_replicas);
        assert!((1..=50).contains(&d.target_replicas));
    }
}
