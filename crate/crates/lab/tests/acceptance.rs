//! The ten acceptance criteria, each at its stated tolerance and runtime
//! budget. Prints one PASS/FAIL line per criterion, then fails if any did.
//!
//! Runtime budgets are measured on whatever profile the test runs under.

use std::fs;
use std::time::{Duration, Instant};

use adaptscale::suite::{matrix_cells, run_matrix, run_sensitivity, sensitivity_cells, ab_cells, CellSpec};
use adaptscale::ExperimentConfig;
use adaptscale_core::engine::{latency_of, LatencyModel, PolicyKind, Simulation};
use adaptscale_core::estimator::{derive_horizon, ColdStartEstimator, EstimatorConfig, HorizonParams};
use adaptscale_core::forecast::AnyForecaster;
use adaptscale_core::policy::{mpc_decide, CapacityModel, MpcWeights};
use adaptscale_core::rng::JitterStream;
use adaptscale_core::stats::wilcoxon_signed_rank;
use adaptscale_core::trace::generate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 5] = [42, 123, 456, 789, 1337];

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn adapt(prior: f64) -> ColdStartEstimator {
    ColdStartEstimator::new(EstimatorConfig {
        alpha: 0.3,
        prior_seconds: prior,
        ..EstimatorConfig::default()
    })
    .unwrap()
}

fn c1_adapt_convergence() -> Outcome {
    let mut e = adapt(120.0);
    let mut first_within = None;
    for k in 1..=20 {
        e.observe_graduation(180.0).map_err(|x| x.to_string())?;
        let err = 180.0 - e.estimate_seconds();
        let want = 60.0 * 0.7f64.powi(k);
        check((err - want).abs() < 1e-9, || format!("k = {k}: error {err} vs 60·0.7^k = {want}"))?;
        if first_within.is_none() && err.abs() <= 18.0 {
            first_within = Some(k);
        }
    }
    let k10 = first_within.ok_or("never within 10%")?;
    check(k10 <= 5, || format!("first within 10% at k = {k10}"))?;
    // jittered: the same per-event draws the simulator uses
    let mut hits = 0;
    let mut finals = Vec::new();
    for seed in SEEDS {
        let jitter = JitterStream::new(seed, 0.3);
        let mut e = adapt(120.0);
        for i in 0..10 {
            e.observe_graduation(180.0 * jitter.multiplier(i)).map_err(|x| x.to_string())?;
        }
        let est = e.estimate_seconds();
        finals.push(format!("{est:.1}"));
        if (est - 180.0).abs() <= 18.0 {
            hits += 1;
        }
    }
    check(hits >= 4, || {
        format!("exact part holds (within 10% at k = {k10}); jittered: {hits}/5 seeds within 10% after 10 events {finals:?}")
    })?;
    Ok(format!("exact to 1e-9; within 10% at k = {k10}; jittered {hits}/5 seeds {finals:?}"))
}

fn c2_horizon() -> Outcome {
    for (est, tau, eps, want) in [(120.0, 60.0, 1, 3), (30.0, 60.0, 1, 2), (300.0, 60.0, 1, 6), (10.0, 60.0, 0, 1)] {
        let params = HorizonParams::new(tau, eps).map_err(|e| e.to_string())?;
        let got = derive_horizon(est, &params);
        check(got == want, || format!("({est}, {tau}, {eps}) -> {got}, want {want}"))?;
    }
    Ok("(120,60,1)→3 (30,60,1)→2 (300,60,1)→6 (10,60,0)→1".into())
}

fn c3_latency() -> Outcome {
    let model = LatencyModel {
        base_ms: 100.0,
        sla_ms: 500.0,
    };
    let cases = [(0.0, 100.0, false), (0.5, 200.0, false), (0.8, 500.0, false), (1.0, 1500.0, true), (2.0, 1500.0, true)];
    for (u, l, v) in cases {
        let got = latency_of(u, 100.0, 500.0);
        check(got == l, || format!("u = {u}: L = {got}, want {l}"))?;
        check(model.latency(u) == l && model.violates(got) == v, || format!("u = {u}: violation flag"))?;
    }
    Ok("L = {100, 200, 500, 1500, 1500}, flags {F, F, F, T, T}".into())
}

fn c4_welford() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
    for case in 0..1000 {
        let len = rng.random_range(1..=50);
        let xs: Vec<f64> = (0..len).map(|_| rng.random_range(5.0..600.0)).collect();
        let mut e = adapt(120.0);
        for &x in &xs {
            e.observe_graduation(x).map_err(|x| x.to_string())?;
        }
        let n = len as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let s = e.summary();
        check(close(s.mean_seconds, mean), || format!("case {case}: mean {} vs {mean}", s.mean_seconds))?;
        match s.variance {
            Some(v) => {
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
                check(len >= 2 && close(v, var), || format!("case {case}: variance {v} vs {var}"))?;
            }
            None => check(len == 1, || format!("case {case}: variance missing"))?,
        }
    }
    Ok("1000 sequences match two-pass within 1e-9 relative".into())
}

/// All 2^m sign assignments of the untied ranks 1..=m; returns (W, p).
fn enumerate(d: &[f64]) -> (f64, f64) {
    let m = d.len();
    let total = (m * (m + 1) / 2) as f64;
    let plus: f64 = d.iter().filter(|x| **x > 0.0).map(|x| x.abs()).sum();
    let w = plus.min(total - plus);
    let hits = (0u32..1 << m)
        .filter(|mask| {
            let wp: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1) as f64).sum();
            wp.min(total - wp) <= w
        })
        .count();
    (w, hits as f64 / f64::from(1u32 << m))
}

fn c5_wilcoxon() -> Outcome {
    let d = [1.0, 2.0, 3.0, 4.0, 5.0];
    let r = wilcoxon_signed_rank(&d, &[0.0; 5]).map_err(|e| e.to_string())?;
    check(r.statistic_w == 0.0 && r.p_value == 0.0625, || format!("W = {}, p = {}", r.statistic_w, r.p_value))?;
    check(enumerate(&d) == (0.0, 0.0625), || "enumeration disagrees".into())?;
    // every sign pattern on five untied magnitudes, and random real pairs
    let mut min_p = 1.0f64;
    for mask in 0u32..32 {
        let d: Vec<f64> = (0..5).map(|i| if mask >> i & 1 == 1 { (i + 1) as f64 } else { -((i + 1) as f64) }).collect();
        let r = wilcoxon_signed_rank(&d, &[0.0; 5]).map_err(|e| e.to_string())?;
        check(r.p_value == enumerate(&d).1, || format!("{d:?}: p = {}", r.p_value))?;
        min_p = min_p.min(r.p_value);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let a: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..0.3)).collect();
        let b: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..0.3)).collect();
        let r = wilcoxon_signed_rank(&a, &b).map_err(|e| e.to_string())?;
        min_p = min_p.min(r.p_value);
        check(!r.significant_at_005, || format!("{a:?} vs {b:?} significant"))?;
    }
    check(min_p >= 0.05, || format!("n = 5 reached p = {min_p}"))?;
    Ok(format!("W = 0, p = 0.0625 = enumeration; min p over n = 5 is {min_p}"))
}

fn quiet(cfg: &mut ExperimentConfig) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    cfg.out_dir = dir.path().to_path_buf();
    dir
}

fn c6_sensitivity() -> Outcome {
    let mut cfg = ExperimentConfig::default();
    cfg.policies = vec!["hpa".into()];
    cfg.sensitivity.archetypes = vec!["flash_crowd".into()];
    let _dir = quiet(&mut cfg);
    let out = run_sensitivity(&cfg).map_err(|e| e.to_string())?;
    let rates: Vec<f64> = cfg
        .sensitivity
        .levels_seconds
        .iter()
        .map(|l| {
            out.grid
                .iter()
                .find(|r| r.policy == "hpa" && r.workload == "flash_crowd" && r.cold_start_seconds == *l)
                .map(|r| r.sla_violation_rate.mean)
                .ok_or_else(|| format!("missing level {l}"))
        })
        .collect::<Result<_, _>>()?;
    check(rates.iter().all(|r| (0.0..=1.0).contains(r)), || format!("rates out of range: {rates:?}"))?;
    let gap = rates[4] - rates[0];
    check(gap >= 0.05, || format!("300 s − 30 s = {gap:.4} < 0.05 ({rates:?})"))?;
    for w in rates.windows(2) {
        check(w[1] >= w[0] - 0.01, || format!("not non-decreasing within 1 point: {rates:?}"))?;
    }
    Ok(format!("HPA flash_crowd over 30..300 s: {rates:.3?}, gap {:.1} pp", gap * 100.0))
}

fn c7_ordering() -> Outcome {
    let mut cfg = ExperimentConfig::default();
    cfg.policies = vec!["hpa".into(), "mpc_ar_ls".into()];
    cfg.archetypes = vec!["flash_crowd".into(), "diurnal_burst".into()];
    let _dir = quiet(&mut cfg);
    let out = run_matrix(&cfg).map_err(|e| e.to_string())?;
    let rate = |policy: &str, workload: &str, seed: u64| {
        out.cells
            .iter()
            .find(|c| c.policy == policy && c.workload == workload && c.seed == seed)
            .map(|c| c.metrics.sla_violation_rate)
            .ok_or_else(|| format!("missing {policy}_{workload}_{seed}"))
    };
    let mut detail = Vec::new();
    for workload in ["flash_crowd", "diurnal_burst"] {
        let mut wins = 0;
        let mut mpc = Vec::new();
        for seed in SEEDS {
            let m = rate("mpc_ar_ls", workload, seed)?;
            if m < rate("hpa", workload, seed)? {
                wins += 1;
            }
            mpc.push(m);
        }
        let mean = mpc.iter().sum::<f64>() / mpc.len() as f64;
        check(wins >= 4, || format!("{workload}: MPC+ar_ls beats HPA in {wins}/5 seeds"))?;
        check(mean < 0.10, || format!("{workload}: MPC+ar_ls mean rate {mean:.3} >= 0.10"))?;
        detail.push(format!("{workload}: {wins}/5 wins, MPC mean {mean:.3}"));
    }
    let report = fs::read_to_string(out.dir.join("report.md")).map_err(|e| e.to_string())?;
    check(report.contains("relaxed from the published below-5%"), || "report lacks the relaxed-threshold note".into())?;
    Ok(detail.join("; "))
}

fn c8_hard_floor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cap = CapacityModel::default();
    let w = MpcWeights::default();
    for i in 0..10_000 {
        let rps = rng.random_range(0.0..6_000.0);
        let n_a = rng.random_range(cap.min_replicas..=cap.max_replicas);
        let h = rng.random_range(1..=8u32);
        let forecast: Vec<f64> = (0..h).map(|_| rng.random_range(0.0..6_000.0)).collect();
        let d = mpc_decide(rps, n_a, &forecast, h, &cap, &w).map_err(|e| e.to_string())?;
        let floor = ((rps / cap.per_replica_rps).ceil() as u32).clamp(cap.min_replicas, cap.max_replicas);
        check(d.target_replicas >= floor, || format!("input {i}: rps {rps} -> {} < {floor}", d.target_replicas))?;
        check((cap.min_replicas..=cap.max_replicas).contains(&d.target_replicas), || format!("input {i}: out of bounds"))?;
    }
    Ok("10000 inputs: target >= ceil(rps/c), within [n_min, n_max]".into())
}

fn c9_determinism() -> Outcome {
    let mut bytes = Vec::new();
    let mut times = Vec::new();
    for _ in 0..2 {
        let mut cfg = ExperimentConfig::default();
        let _dir = quiet(&mut cfg);
        let start = Instant::now();
        let out = run_matrix(&cfg).map_err(|e| e.to_string())?;
        times.push(start.elapsed());
        check(out.cells.len() == 90, || format!("{} cells, want 90", out.cells.len()))?;
        bytes.push(fs::read(out.dir.join("summary.csv")).map_err(|e| e.to_string())?);
    }
    check(bytes[0] == bytes[1], || "summary.csv differs between runs".into())?;
    let slowest = times.iter().max().unwrap();
    check(*slowest < Duration::from_secs(60), || format!("matrix took {slowest:?}"))?;
    Ok(format!("90 runs twice, {} identical bytes; slowest {slowest:?}", bytes[0].len()))
}

/// Steps a cell by hand and re-derives the replica books after every step,
/// independently of the engine's own assertion.
fn audit(cell: &CellSpec, cfg: &ExperimentConfig) -> Result<usize, String> {
    let e = |x: adaptscale_core::Error| format!("{}: {x}", cell.label());
    let t = generate(cell.archetype, cell.seed, cfg.num_steps, &cfg.trace).map_err(e)?;
    let split = t.split().map_err(e)?;
    let forecaster = match cell.policy.forecaster {
        Some(m) if cell.policy.kind == PolicyKind::Mpc => Some(
            AnyForecaster::prepare(m, &cell.sim.forecast, &t.rps[..split.train_end], &t.rps[split.train_end..split.val_end])
                .map_err(e)?,
        ),
        _ => None,
    };
    let mut sim = Simulation::new(&t, split.val_end, split.test_end, cell.policy.kind, forecaster, &cell.sim, cell.seed).map_err(e)?;
    let mut steps = 0;
    while sim.step().map_err(e)?.is_some() {
        let s = sim.state();
        let l = s.ledger;
        let warming: u64 = s.warming.iter().map(|b| u64::from(b.count)).sum();
        let open = l.ordered as i128 - l.graduated as i128 - l.cancelled as i128;
        let serving = l.initial_active as i128 + l.graduated as i128 - l.scaled_down as i128;
        check(open == i128::from(warming) && serving == i128::from(s.active), || {
            format!("{} step {}: ledger {l:?}, active {}, warming {warming}", cell.label(), s.step, s.active)
        })?;
        check(
            l.ordered as i128 - l.graduated as i128 - l.cancelled as i128 - l.scaled_down as i128
                == i128::from(s.active) + i128::from(warming) - i128::from(l.initial_active) - l.graduated as i128,
            || format!("{} step {}: combined identity", cell.label(), s.step),
        )?;
        steps += 1;
    }
    Ok(steps)
}

fn c10_conservation() -> Outcome {
    let cfg = ExperimentConfig::default();
    let mut cells = matrix_cells(&cfg).map_err(|e| e.to_string())?;
    cells.extend(sensitivity_cells(&cfg).map_err(|e| e.to_string())?);
    cells.extend(ab_cells(&cfg).map_err(|e| e.to_string())?);
    let mut steps = 0;
    for cell in &cells {
        steps += audit(cell, &cfg)?;
    }
    Ok(format!("{} runs, {steps} audited steps balance exactly", cells.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("1 ADAPT convergence", Duration::from_secs(1), c1_adapt_convergence),
        ("2 FH-OPT arithmetic", Duration::from_secs(1), c2_horizon),
        ("3 latency model", Duration::from_secs(1), c3_latency),
        ("4 Welford oracle", Duration::from_secs(1), c4_welford),
        ("5 Wilcoxon exact oracle", Duration::from_secs(1), c5_wilcoxon),
        ("6 cold-start sensitivity", Duration::from_secs(10), c6_sensitivity),
        ("7 policy ordering", Duration::from_secs(10), c7_ordering),
        ("8 hard floor", Duration::from_secs(1), c8_hard_floor),
        ("9 determinism", Duration::from_secs(120), c9_determinism),
        ("10 conservation audit", Duration::from_secs(120), c10_conservation),
    ];
    let mut failed = Vec::new();
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if took <= budget {
                Ok(d)
            } else {
                Err(format!("{d}; took {took:?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(d) => println!("PASS  {name}: {d} [{took:.2?}]"),
            Err(d) => {
                println!("FAIL  {name}: {d} [{took:.2?}]");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
