//! Discrete-time scaling simulator.
//!
//! Each step runs a fixed phase order:
//!
//! 1. read demand `λ(t)`;
//! 2. graduate every warming batch with `ready_step <= t` and report its
//!    realized cold start to the estimator;
//! 3. compute capacity, utilization, latency, violation and cost;
//! 4. feed `λ(t)` to the forecaster;
//! 5. pick a horizon and ask the policy for a target;
//! 6. apply the target: scale-down is immediate (warming batches are cancelled
//!    newest-first before active replicas are removed), scale-up enqueues one
//!    batch whose boot time is the nominal cold start times a per-event jitter.
//!
//! Capacity counts active replicas only; cost counts active and warming.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::estimator::{derive_horizon, steps_for, ColdStartEstimator, EstimatorConfig, EstimatorSummary, HorizonParams};
use crate::forecast::{AnyForecaster, ForecastSettings, Forecaster, Method};
use crate::policy::{hpa_decide, mpc_decide, objective_step_cost, CapacityModel, HpaParams, MpcWeights, PolicyDecision};
use crate::rng::JitterStream;
use crate::trace::{SplitIndices, WorkloadTrace};

/// Largest admissible jitter half-width.
pub const MAX_JITTER_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct LatencyModel {
    pub base_ms: f64,
    /// SLA threshold `L*`; a step violates when latency strictly exceeds it.
    pub sla_ms: f64,
}

impl Default for LatencyModel {
    fn default() -> Self {
        Self {
            base_ms: 100.0,
            sla_ms: 500.0,
        }
    }
}

impl LatencyModel {
    pub fn latency(&self, utilization: f64) -> f64 {
        latency_of(utilization, self.base_ms, self.sla_ms)
    }

    pub fn violates(&self, latency_ms: f64) -> bool {
        latency_ms > self.sla_ms
    }

    /// Largest utilization whose latency stays within the SLA, `1 − base/sla`
    /// (1 when even an idle replica misses the SLA).
    pub fn safe_utilization(&self) -> f64 {
        let u = 1.0 - self.base_ms / self.sla_ms;
        if u > 0.0 {
            u
        } else {
            1.0
        }
    }
}

/// M/M/1 latency `base / (1 − u)`, capped at `3·sla` (and pinned there for `u >= 1`).
///
/// Reported at nanosecond resolution, so that utilizations sitting exactly on
/// the SLA boundary do not flip on a last-bit rounding error.
pub fn latency_of(utilization: f64, base_latency_ms: f64, sla_ms: f64) -> f64 {
    let cap = 3.0 * sla_ms;
    if utilization >= 1.0 {
        return cap;
    }
    let raw = (base_latency_ms / (1.0 - utilization)).min(cap);
    libm::round(raw * 1e6) / 1e6
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ColdStartConfig {
    /// Nominal boot time `Δ`, fixed for a run.
    pub nominal_seconds: f64,
    pub jitter_fraction: f64,
    pub jitter_enabled: bool,
}

impl Default for ColdStartConfig {
    fn default() -> Self {
        Self {
            nominal_seconds: 120.0,
            jitter_fraction: 0.3,
            jitter_enabled: true,
        }
    }
}

impl ColdStartConfig {
    pub fn effective_jitter(&self) -> f64 {
        if self.jitter_enabled {
            self.jitter_fraction
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HorizonMode {
    /// Horizon derived from the live cold-start estimate.
    Adaptive,
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PolicyKind {
    Hpa,
    Mpc,
}

/// A policy together with the forecaster it consumes, e.g. `mpc_ar_ls`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub forecaster: Option<Method>,
}

impl PolicySpec {
    pub const HPA: PolicySpec = PolicySpec {
        kind: PolicyKind::Hpa,
        forecaster: None,
    };

    pub fn mpc(method: Method) -> Self {
        Self {
            kind: PolicyKind::Mpc,
            forecaster: Some(method),
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.forecaster) {
            (PolicyKind::Hpa, _) => f.write_str("hpa"),
            (PolicyKind::Mpc, Some(m)) => write!(f, "mpc_{m}"),
            (PolicyKind::Mpc, None) => f.write_str("mpc"),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "hpa" {
            return Ok(PolicySpec::HPA);
        }
        match s.strip_prefix("mpc_") {
            Some(m) => Ok(PolicySpec::mpc(m.parse()?)),
            None => Err(Error::config(format!("policies: unknown policy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    pub step_seconds: f64,
    pub capacity: CapacityModel,
    pub hpa: HpaParams,
    pub weights: MpcWeights,
    pub latency: LatencyModel,
    /// Cost of holding one replica for one step (`ρ`).
    pub cost_per_replica_step: f64,
    pub cold_start: ColdStartConfig,
    pub estimator: EstimatorConfig,
    pub buffer_steps: u32,
    pub horizon_mode: HorizonMode,
    pub forecast: ForecastSettings,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            step_seconds: 60.0,
            capacity: CapacityModel::default(),
            hpa: HpaParams::default(),
            weights: MpcWeights::default(),
            latency: LatencyModel::default(),
            cost_per_replica_step: 1.0,
            cold_start: ColdStartConfig::default(),
            estimator: EstimatorConfig::default(),
            buffer_steps: 1,
            horizon_mode: HorizonMode::Adaptive,
            forecast: ForecastSettings::default(),
        }
    }
}

impl SimConfig {
    pub fn horizon_params(&self) -> HorizonParams {
        HorizonParams {
            step_seconds: self.step_seconds,
            buffer_steps: self.buffer_steps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.horizon_params().validate()?;
        self.capacity.validate()?;
        self.hpa.validate()?;
        self.weights.validate()?;
        self.estimator.validate()?;
        self.forecast.validate()?;
        let l = &self.latency;
        if !(l.base_ms.is_finite() && l.base_ms > 0.0 && l.sla_ms.is_finite() && l.sla_ms > 0.0) {
            return Err(Error::config("latency: base_ms and sla_ms must be positive"));
        }
        if !(self.cost_per_replica_step.is_finite() && self.cost_per_replica_step >= 0.0) {
            return Err(Error::config("cost_per_replica_step: must be >= 0"));
        }
        let cs = &self.cold_start;
        if !self.estimator.contains(cs.nominal_seconds) {
            return Err(Error::config(format!(
                "cold_start.nominal_seconds: {} lies outside the estimator clip bounds [{}, {}]",
                cs.nominal_seconds, self.estimator.clip_min_seconds, self.estimator.clip_max_seconds
            )));
        }
        if !(cs.jitter_fraction.is_finite() && (0.0..=MAX_JITTER_FRACTION).contains(&cs.jitter_fraction)) {
            return Err(Error::config("cold_start.jitter_fraction: must lie in [0, 0.9]"));
        }
        if let HorizonMode::Fixed(0) = self.horizon_mode {
            return Err(Error::config("horizon_mode: fixed horizon must be >= 1"));
        }
        Ok(())
    }
}

/// An in-flight scale-up order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarmingBatch {
    pub count: u32,
    pub ordered_step: usize,
    pub realized_duration_seconds: f64,
    pub ready_step: usize,
}

/// Running replica bookkeeping, audited after every step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReplicaLedger {
    pub initial_active: u64,
    pub ordered: u64,
    pub graduated: u64,
    pub cancelled: u64,
    pub scaled_down: u64,
}

impl ReplicaLedger {
    /// True when `warming = ordered − graduated − cancelled` and
    /// `active = initial + graduated − scaled_down`.
    pub fn balances(&self, active: u32, warming: u32) -> bool {
        let warming_ok = self.ordered.checked_sub(self.graduated + self.cancelled) == Some(u64::from(warming));
        let active_ok = (self.initial_active + self.graduated).checked_sub(self.scaled_down) == Some(u64::from(active));
        warming_ok && active_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub step: usize,
    pub active: u32,
    /// Sorted by `ready_step`; batches with equal ready steps keep order of issue.
    pub warming: VecDeque<WarmingBatch>,
    pub ledger: ReplicaLedger,
    /// Number of scale-up orders issued so far; indexes the jitter stream.
    pub order_events: u64,
    prev_total: u32,
}

impl SimState {
    pub fn warming_replicas(&self) -> u32 {
        self.warming.iter().map(|b| b.count).sum()
    }

    pub fn total_replicas(&self) -> u32 {
        self.active + self.warming_replicas()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub rps: f64,
    pub active: u32,
    pub warming: u32,
    pub capacity_rps: f64,
    pub utilization: f64,
    pub latency_ms: f64,
    pub violated: bool,
    pub violation_fraction: f64,
    pub cost: f64,
    pub n_reactive: u32,
    pub n_pro: u32,
    pub target: u32,
    pub horizon: u32,
    pub best_candidate_cost: Option<f64>,
    pub adapt_estimate: f64,
    pub adapt_variance: Option<f64>,
    /// Weighted objective value of this step (diagnostic only).
    pub objective: f64,
}

/// A graduation observed by the estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Graduation {
    pub step: usize,
    pub count: u32,
    pub ordered_step: usize,
    pub observed_seconds: f64,
}

pub struct Simulation<'a, F> {
    trace: &'a WorkloadTrace,
    end: usize,
    policy: PolicyKind,
    forecaster: Option<F>,
    estimator: ColdStartEstimator,
    config: SimConfig,
    jitter: JitterStream,
    state: SimState,
    graduations: Vec<Graduation>,
}

impl<'a, F: Forecaster> Simulation<'a, F> {
    /// Simulates `trace[start..end]`. The forecaster, if any, must already be
    /// fitted on data before `start`; MPC requires one.
    pub fn new(
        trace: &'a WorkloadTrace,
        start: usize,
        end: usize,
        policy: PolicyKind,
        forecaster: Option<F>,
        config: &SimConfig,
        seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        if start >= end || end > trace.len() {
            return Err(Error::config(format!(
                "simulation window [{start}, {end}) does not fit a trace of length {}",
                trace.len()
            )));
        }
        if policy == PolicyKind::Mpc && forecaster.is_none() {
            return Err(Error::config("policies: mpc requires a forecaster"));
        }
        if let Some(f) = &forecaster {
            if !f.is_fitted() {
                return Err(Error::protocol("forecaster must be fitted before the run starts"));
            }
        }
        // start at the SLA-safe replica count for the first demand sample
        let safe_rps = trace.rps[start] / config.latency.safe_utilization();
        let active = config.capacity.clamp(config.capacity.replicas_for(safe_rps));
        Ok(Self {
            trace,
            end,
            policy,
            forecaster,
            estimator: ColdStartEstimator::new(config.estimator.clone())?,
            jitter: JitterStream::new(seed, config.cold_start.effective_jitter()),
            config: config.clone(),
            state: SimState {
                step: start,
                active,
                warming: VecDeque::new(),
                ledger: ReplicaLedger {
                    initial_active: u64::from(active),
                    ..ReplicaLedger::default()
                },
                order_events: 0,
                prev_total: active,
            },
            graduations: Vec::new(),
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn estimator(&self) -> &ColdStartEstimator {
        &self.estimator
    }

    pub fn graduations(&self) -> &[Graduation] {
        &self.graduations
    }

    /// Advances one step; `Ok(None)` once the window is exhausted.
    pub fn step(&mut self) -> Result<Option<StepRecord>> {
        let t = self.state.step;
        if t >= self.end {
            return Ok(None);
        }
        let cfg = &self.config;
        let cap = cfg.capacity;

        // (1)
        let rps = self.trace.rps[t];

        // (2)
        self.estimator.tick();
        while self.state.warming.front().is_some_and(|b| b.ready_step <= t) {
            let batch = self.state.warming.pop_front().expect("front checked");
            self.state.active += batch.count;
            self.state.ledger.graduated += u64::from(batch.count);
            // realized durations are always positive and finite
            self.estimator.observe_graduation(batch.realized_duration_seconds)?;
            self.graduations.push(Graduation {
                step: t,
                count: batch.count,
                ordered_step: batch.ordered_step,
                observed_seconds: batch.realized_duration_seconds,
            });
        }

        // (3)
        let active = self.state.active;
        let warming = self.state.warming_replicas();
        let capacity_rps = f64::from(active) * cap.per_replica_rps;
        let utilization = rps / capacity_rps;
        let latency_ms = cfg.latency.latency(utilization);
        let violated = cfg.latency.violates(latency_ms);
        let violation_fraction = if rps > 0.0 {
            ((rps - capacity_rps) / rps).max(0.0)
        } else {
            0.0
        };
        let total = active + warming;
        let cost = f64::from(total) * cfg.cost_per_replica_step;
        let objective = objective_step_cost(violation_fraction, total, self.state.prev_total, cap.max_replicas, &cfg.weights);

        // (4)
        if let Some(f) = self.forecaster.as_mut() {
            f.update(rps)?;
        }

        // (5)
        let decision = match self.policy {
            PolicyKind::Hpa => hpa_decide(rps, active, &cap, &cfg.hpa),
            PolicyKind::Mpc => {
                let horizon = match cfg.horizon_mode {
                    HorizonMode::Adaptive => derive_horizon(self.estimator.estimate_seconds(), &cfg.horizon_params()),
                    HorizonMode::Fixed(h) => h,
                };
                let forecaster = self.forecaster.as_ref().expect("checked in new");
                let forecast = forecaster.forecast(horizon as usize)?;
                mpc_decide(rps, active, &forecast.values, horizon, &cap, &cfg.weights)?
            }
        };

        let record = StepRecord {
            step: t,
            rps,
            active,
            warming,
            capacity_rps,
            utilization,
            latency_ms,
            violated,
            violation_fraction,
            cost,
            n_reactive: decision.reactive_floor,
            n_pro: decision.proactive_target,
            target: decision.target_replicas,
            horizon: decision.horizon_used,
            best_candidate_cost: decision.best_candidate_cost,
            adapt_estimate: self.estimator.estimate_seconds(),
            adapt_variance: self.estimator.variance(),
            objective,
        };

        // (6)
        self.apply(t, &decision);
        self.state.prev_total = total;
        self.state.step += 1;

        assert!(
            self.state.ledger.balances(self.state.active, self.state.warming_replicas()),
            "replica accounting out of balance at step {t}: {:?}",
            self.state
        );
        Ok(Some(record))
    }

    fn apply(&mut self, t: usize, decision: &PolicyDecision) {
        let cap = self.config.capacity;
        let target = cap.clamp(decision.target_replicas);
        let total = self.state.total_replicas();
        if target > total {
            let count = target - total;
            let multiplier = self.jitter.multiplier(self.state.order_events);
            self.state.order_events += 1;
            let realized = self.config.cold_start.nominal_seconds * multiplier;
            let delay = steps_for(realized, self.config.step_seconds).max(1) as usize;
            let batch = WarmingBatch {
                count,
                ordered_step: t,
                realized_duration_seconds: realized,
                ready_step: t + delay,
            };
            let at = self.state.warming.partition_point(|b| b.ready_step <= batch.ready_step);
            self.state.warming.insert(at, batch);
            self.state.ledger.ordered += u64::from(count);
        } else if target < total {
            let mut excess = total - target;
            while excess > 0 {
                // newest order first; among equal order steps the later insert
                let Some(idx) = self
                    .state
                    .warming
                    .iter()
                    .enumerate()
                    .max_by_key(|(i, b)| (b.ordered_step, *i))
                    .map(|(i, _)| i)
                else {
                    break;
                };
                let batch = &mut self.state.warming[idx];
                let take = batch.count.min(excess);
                batch.count -= take;
                excess -= take;
                self.state.ledger.cancelled += u64::from(take);
                if batch.count == 0 {
                    self.state.warming.remove(idx);
                }
            }
            self.state.active -= excess;
            self.state.ledger.scaled_down += u64::from(excess);
        }
    }

    pub fn finish(self) -> (SimState, ColdStartEstimator, Vec<Graduation>) {
        (self.state, self.estimator, self.graduations)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub policy: PolicySpec,
    pub seed: u64,
    pub split: SplitIndices,
    /// One record per test-split step.
    pub records: Vec<StepRecord>,
    pub estimator: EstimatorSummary,
    pub ledger: ReplicaLedger,
    pub graduations: Vec<Graduation>,
    /// AR order kept after validation, when the forecaster is AR.
    pub ar_order: Option<usize>,
}

/// Full evaluation protocol for one cell: fit the forecaster on the train
/// split, walk it through validation, then simulate the test split.
pub fn run(trace: &WorkloadTrace, policy: PolicySpec, config: &SimConfig, seed: u64) -> Result<RunOutput> {
    config.validate()?;
    let split = trace.split()?;
    let forecaster = match (policy.kind, policy.forecaster) {
        (PolicyKind::Mpc, None) => return Err(Error::config("policies: mpc requires a forecaster")),
        (PolicyKind::Mpc, Some(method)) => Some(AnyForecaster::prepare(
            method,
            &config.forecast,
            &trace.rps[..split.train_end],
            &trace.rps[split.train_end..split.val_end],
        )?),
        (PolicyKind::Hpa, _) => None,
    };
    let ar_order = match &forecaster {
        Some(AnyForecaster::ArLs(m)) => Some(m.order()),
        _ => None,
    };
    let mut sim = Simulation::new(trace, split.val_end, split.test_end, policy.kind, forecaster, config, seed)?;
    let mut records = Vec::with_capacity(split.test_len());
    while let Some(r) = sim.step()? {
        records.push(r);
    }
    let (state, estimator, graduations) = sim.finish();
    Ok(RunOutput {
        policy,
        seed,
        split,
        records,
        estimator: estimator.summary(),
        ledger: state.ledger,
        graduations,
        ar_order,
    })
}
