//! Online cold-start estimation and planning-horizon derivation.
//!
//! [`ColdStartEstimator`] tracks the provisioning delay as an exponentially
//! weighted moving average over graduation observations. Each observation is
//! clipped to `[clip_min, clip_max]` before it touches either the EWMA or the
//! Welford accumulators that run alongside it.

use alloc::format;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EstimatorConfig {
    pub alpha: f64,
    pub prior_seconds: f64,
    pub clip_min_seconds: f64,
    pub clip_max_seconds: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            prior_seconds: 120.0,
            clip_min_seconds: 5.0,
            clip_max_seconds: 600.0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("estimator.alpha: must lie in (0, 1)"));
        }
        if !(self.clip_min_seconds.is_finite() && self.clip_min_seconds > 0.0) {
            return Err(Error::config("estimator.clip_min_seconds: must be positive"));
        }
        if !(self.clip_max_seconds.is_finite() && self.clip_max_seconds > self.clip_min_seconds) {
            return Err(Error::config("estimator.clip_max_seconds: must exceed clip_min_seconds"));
        }
        if !(self.clip_min_seconds..=self.clip_max_seconds).contains(&self.prior_seconds) {
            return Err(Error::config(format!(
                "estimator.prior_seconds: {} lies outside the clip bounds [{}, {}]",
                self.prior_seconds, self.clip_min_seconds, self.clip_max_seconds
            )));
        }
        Ok(())
    }

    pub fn contains(&self, seconds: f64) -> bool {
        (self.clip_min_seconds..=self.clip_max_seconds).contains(&seconds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColdStartEstimator {
    config: EstimatorConfig,
    estimate_seconds: f64,
    count: u64,
    mean: f64,
    m2: f64,
    rejected: u64,
    steps_since_observation: Option<u64>,
}

/// Read-only snapshot returned by [`ColdStartEstimator::summary`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorSummary {
    pub estimate_seconds: f64,
    pub count: u64,
    pub mean_seconds: f64,
    /// Sample variance in seconds², `None` until two observations exist.
    pub variance: Option<f64>,
    pub clip_min_seconds: f64,
    pub clip_max_seconds: f64,
    pub alpha: f64,
    pub rejected: u64,
    /// Simulation steps since the last accepted observation; `None` before the first.
    pub steps_since_observation: Option<u64>,
}

impl ColdStartEstimator {
    pub fn new(config: EstimatorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            estimate_seconds: config.prior_seconds,
            config,
            count: 0,
            mean: 0.0,
            m2: 0.0,
            rejected: 0,
            steps_since_observation: None,
        })
    }

    pub fn estimate_seconds(&self) -> f64 {
        self.estimate_seconds
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    /// Feeds one graduation measurement. Rejected inputs leave the estimate
    /// untouched and only bump the rejection counter.
    pub fn observe_graduation(&mut self, observed_seconds: f64) -> Result<()> {
        if !(observed_seconds.is_finite() && observed_seconds > 0.0) {
            self.rejected += 1;
            return Err(Error::Measurement(format!(
                "cold-start observation {observed_seconds} must be finite and positive"
            )));
        }
        let obs = observed_seconds.clamp(self.config.clip_min_seconds, self.config.clip_max_seconds);
        let alpha = self.config.alpha;
        self.estimate_seconds = alpha * obs + (1.0 - alpha) * self.estimate_seconds;

        self.count += 1;
        let delta = obs - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (obs - self.mean);

        self.steps_since_observation = Some(0);
        Ok(())
    }

    /// Marks the passage of one simulation step.
    pub fn tick(&mut self) {
        if let Some(s) = self.steps_since_observation.as_mut() {
            *s += 1;
        }
    }

    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }

    pub fn summary(&self) -> EstimatorSummary {
        EstimatorSummary {
            estimate_seconds: self.estimate_seconds,
            count: self.count,
            mean_seconds: self.mean,
            variance: self.variance(),
            clip_min_seconds: self.config.clip_min_seconds,
            clip_max_seconds: self.config.clip_max_seconds,
            alpha: self.config.alpha,
            rejected: self.rejected,
            steps_since_observation: self.steps_since_observation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct HorizonParams {
    pub step_seconds: f64,
    /// Extra look-ahead steps on top of the estimated cold-start window.
    pub buffer_steps: u32,
}

impl Default for HorizonParams {
    fn default() -> Self {
        Self {
            step_seconds: 60.0,
            buffer_steps: 1,
        }
    }
}

impl HorizonParams {
    pub fn new(step_seconds: f64, buffer_steps: u32) -> Result<Self> {
        let p = Self {
            step_seconds,
            buffer_steps,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.step_seconds.is_finite() && self.step_seconds > 0.0 {
            Ok(())
        } else {
            Err(Error::config("step_seconds: must be positive"))
        }
    }
}

/// Steps needed to cover a delay of `seconds`: `⌈seconds / τ⌉`.
pub fn steps_for(seconds: f64, step_seconds: f64) -> u32 {
    libm::ceil(seconds / step_seconds) as u32
}

/// `h* = max(1, ⌈estimate / τ⌉ + ε)`.
pub fn derive_horizon(estimate_seconds: f64, params: &HorizonParams) -> u32 {
    (steps_for(estimate_seconds, params.step_seconds) + params.buffer_steps).max(1)
}

/// `δ = h_f − h`: negative when capacity lands after the forecast window.
pub fn horizon_slack(fixed_horizon: u32, realized_horizon_steps: u32) -> i64 {
    i64::from(fixed_horizon) - i64::from(realized_horizon_steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arrival {
    Late,
    OnTime,
    Early,
}

pub fn classify_slack(slack: i64) -> Arrival {
    match slack.cmp(&0) {
        core::cmp::Ordering::Less => Arrival::Late,
        core::cmp::Ordering::Equal => Arrival::OnTime,
        core::cmp::Ordering::Greater => Arrival::Early,
    }
}
