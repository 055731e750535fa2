//! Scaling policies: a reactive proportional baseline and the model
//! predictive candidate sweep.

use alloc::format;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CapacityModel {
    /// Requests per second one active replica serves.
    pub per_replica_rps: f64,
    pub min_replicas: u32,
    pub max_replicas: u32,
}

impl Default for CapacityModel {
    fn default() -> Self {
        Self {
            per_replica_rps: 100.0,
            min_replicas: 1,
            max_replicas: 50,
        }
    }
}

impl CapacityModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.per_replica_rps.is_finite() && self.per_replica_rps > 0.0) {
            return Err(Error::config("capacity.per_replica_rps: must be positive"));
        }
        if self.min_replicas < 1 {
            return Err(Error::config("capacity.min_replicas: must be >= 1"));
        }
        if self.max_replicas < self.min_replicas {
            return Err(Error::config("capacity.max_replicas: must be >= min_replicas"));
        }
        Ok(())
    }

    pub fn clamp(&self, replicas: u32) -> u32 {
        replicas.clamp(self.min_replicas, self.max_replicas)
    }

    /// `⌈rps / c⌉`, at least one replica.
    pub fn replicas_for(&self, rps: f64) -> u32 {
        ceil_count(rps / self.per_replica_rps).max(1)
    }
}

/// Ceiling for replica counts that ignores last-bit rounding noise, so that
/// e.g. `2 · 1.5000000000000002` counts as 3 rather than 4.
pub fn ceil_count(x: f64) -> u32 {
    let slack = 1e-9 * x.abs().max(1.0);
    libm::ceil(x - slack) as u32
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct MpcWeights {
    pub sla: f64,
    pub cost: f64,
    pub stability: f64,
    /// Multiplicative margin applied to the forecast peak. The default is a
    /// 1.1 forecast-bias margin divided by the SLA-safe utilization
    /// `1 − L_base/L* = 0.8`, because `n_pro` sizes against saturation
    /// capacity `c` while latency crosses the SLA at `u = 0.8`.
    pub gamma: f64,
}

impl Default for MpcWeights {
    fn default() -> Self {
        Self {
            sla: 100.0,
            cost: 1.0,
            stability: 1.0,
            gamma: 1.375,
        }
    }
}

impl MpcWeights {
    pub fn validate(&self) -> Result<()> {
        let ok = |w: f64| w.is_finite() && w >= 0.0;
        if !(ok(self.sla) && ok(self.cost) && ok(self.stability)) {
            return Err(Error::config("weights: must be finite and non-negative"));
        }
        if self.sla + self.cost + self.stability <= 0.0 {
            return Err(Error::config("weights: at least one weight must be positive"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return Err(Error::config("weights.gamma: must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct HpaParams {
    pub target_utilization: f64,
    /// Dead-band half-width around a utilization ratio of 1.
    pub tolerance: f64,
    /// Read the utilization signal as CPU, which cannot exceed 100% of a
    /// replica: `min(u, 1)`. With `false` the raw demand ratio is used.
    pub saturate_cpu: bool,
}

impl Default for HpaParams {
    fn default() -> Self {
        Self {
            target_utilization: 0.7,
            tolerance: 0.1,
            saturate_cpu: true,
        }
    }
}

impl HpaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_utilization.is_finite() && self.target_utilization > 0.0) {
            return Err(Error::config("hpa.target_utilization: must be positive"));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::config("hpa.tolerance: must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyDecision {
    /// Desired total replicas (active plus warming), within `[n_min, n_max]`.
    pub target_replicas: u32,
    /// `⌈λ/c⌉`; the target honors it up to `n_max`.
    pub reactive_floor: u32,
    pub proactive_target: u32,
    /// Lowest sweep cost; `None` for policies without a sweep.
    pub best_candidate_cost: Option<f64>,
    pub horizon_used: u32,
}

/// Kubernetes-style proportional rule on utilization `u = λ / (n_a·c)`:
/// `desired = ⌈n_a · u / target⌉`, held at `n_a` inside the dead-band.
///
/// An overloaded replica reports 100% CPU however deep the backlog, so by
/// default `u` saturates at 1 and one step can scale up by at most
/// `1 / target`.
pub fn hpa_decide(current_rps: f64, active_replicas: u32, capacity: &CapacityModel, hpa: &HpaParams) -> PolicyDecision {
    let active = active_replicas.max(1);
    let mut utilization = current_rps / (f64::from(active) * capacity.per_replica_rps);
    if hpa.saturate_cpu {
        utilization = utilization.min(1.0);
    }
    let ratio = utilization / hpa.target_utilization;
    let desired = if libm::fabs(ratio - 1.0) <= hpa.tolerance {
        active
    } else {
        ceil_count(f64::from(active) * ratio)
    };
    let target = capacity.clamp(desired);
    PolicyDecision {
        target_replicas: target,
        reactive_floor: capacity.replicas_for(current_rps),
        proactive_target: target,
        best_candidate_cost: None,
        horizon_used: 1,
    }
}

/// Per-candidate penalty:
/// `w_sla·max(0, u_r − 1)² + w_cost·r/n_max + w_stab·|r − n_a|/n_max`.
pub fn candidate_cost(
    current_rps: f64,
    active_replicas: u32,
    candidate: u32,
    capacity: &CapacityModel,
    weights: &MpcWeights,
) -> f64 {
    let n_max = f64::from(capacity.max_replicas);
    let u = current_rps / (f64::from(candidate) * capacity.per_replica_rps);
    let overload = (u - 1.0).max(0.0);
    weights.sla * overload * overload
        + weights.cost * f64::from(candidate) / n_max
        + weights.stability * f64::from(candidate.abs_diff(active_replicas)) / n_max
}

/// Plain argmin of [`candidate_cost`] over `[n_min, n_max]`; the smallest
/// candidate wins ties.
pub fn sweep_argmin(current_rps: f64, active_replicas: u32, capacity: &CapacityModel, weights: &MpcWeights) -> (u32, f64) {
    let mut best = (capacity.min_replicas, f64::INFINITY);
    for r in capacity.min_replicas..=capacity.max_replicas {
        let j = candidate_cost(current_rps, active_replicas, r, capacity, weights);
        if j < best.1 {
            best = (r, j);
        }
    }
    best
}

/// One MPC decision.
///
/// `forecast[k - 1]` is the predicted demand `k` steps ahead; only the first
/// `horizon` entries are read. The target starts at `max(n_reactive, n_pro)`
/// and every strictly improving candidate of the sweep can only raise it.
pub fn mpc_decide(
    current_rps: f64,
    active_replicas: u32,
    forecast: &[f64],
    horizon: u32,
    capacity: &CapacityModel,
    weights: &MpcWeights,
) -> Result<PolicyDecision> {
    let h = horizon as usize;
    if h == 0 {
        return Err(Error::Argument("mpc horizon must be >= 1".into()));
    }
    if forecast.len() < h {
        return Err(Error::protocol(format!(
            "forecast covers {} steps but the horizon is {h}",
            forecast.len()
        )));
    }
    let reactive = capacity.replicas_for(current_rps);
    let peak = forecast[..h].iter().copied().fold(0.0, f64::max);
    let proactive = capacity.replicas_for(weights.gamma * peak);

    let mut target = reactive.max(proactive);
    let mut best = f64::INFINITY;
    for r in capacity.min_replicas..=capacity.max_replicas {
        let j = candidate_cost(current_rps, active_replicas, r, capacity, weights);
        if j < best {
            best = j;
            target = target.max(r);
        }
    }
    Ok(PolicyDecision {
        target_replicas: capacity.clamp(target),
        reactive_floor: reactive,
        proactive_target: proactive,
        best_candidate_cost: Some(best),
        horizon_used: horizon,
    })
}

/// Per-step diagnostic objective:
/// `w_sla·v + w_cost·n/n_max + w_stab·|n − n_prev|`.
pub fn objective_step_cost(violation_fraction: f64, replicas: u32, prev_replicas: u32, n_max: u32, weights: &MpcWeights) -> f64 {
    weights.sla * violation_fraction
        + weights.cost * f64::from(replicas) / f64::from(n_max)
        + weights.stability * f64::from(replicas.abs_diff(prev_replicas))
}
