//! Holt's double exponential smoothing.
//!
//! ```text
//! level'  = a·x + (1 - a)·(level + trend)
//! trend'  = b·(level' - level) + (1 - b)·trend
//! x̂(t+k) = level + k·trend
//! ```

use super::{check_horizon, check_observation, check_series, clamp_non_negative, not_fitted, Forecast, Forecaster, Method};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleExponential {
    level_smoothing: f64,
    trend_smoothing: f64,
    state: Option<(f64, f64)>,
    seen: usize,
}

impl DoubleExponential {
    pub fn new(level_smoothing: f64, trend_smoothing: f64) -> Result<Self> {
        let unit = |x: f64| x.is_finite() && x > 0.0 && x < 1.0;
        if !unit(level_smoothing) || !unit(trend_smoothing) {
            return Err(Error::config("des smoothing factors must lie in (0, 1)"));
        }
        Ok(Self {
            level_smoothing,
            trend_smoothing,
            state: None,
            seen: 0,
        })
    }

    /// A fitted smoother positioned at an explicit `(level, trend)`.
    pub fn with_state(level_smoothing: f64, trend_smoothing: f64, level: f64, trend: f64) -> Result<Self> {
        let mut s = Self::new(level_smoothing, trend_smoothing)?;
        s.state = Some((level, trend));
        s.seen = 1;
        Ok(s)
    }

    pub fn level(&self) -> Option<f64> {
        self.state.map(|(l, _)| l)
    }

    pub fn trend(&self) -> Option<f64> {
        self.state.map(|(_, t)| t)
    }

    fn step(&self, (level, trend): (f64, f64), x: f64) -> (f64, f64) {
        let a = self.level_smoothing;
        let b = self.trend_smoothing;
        let next = a * x + (1.0 - a) * (level + trend);
        (next, b * (next - level) + (1.0 - b) * trend)
    }
}

impl Forecaster for DoubleExponential {
    fn method(&self) -> Method {
        Method::Des
    }

    fn is_fitted(&self) -> bool {
        self.state.is_some()
    }

    fn fit(&mut self, train: &[f64]) -> Result<()> {
        check_series("des", train, 2)?;
        let mut state = (train[0], train[1] - train[0]);
        for &x in &train[1..] {
            state = self.step(state, x);
        }
        self.state = Some(state);
        self.seen = train.len();
        Ok(())
    }

    fn update(&mut self, observation: f64) -> Result<()> {
        let state = self.state.ok_or_else(|| not_fitted(self.method()))?;
        check_observation(observation)?;
        self.state = Some(self.step(state, observation));
        self.seen += 1;
        Ok(())
    }

    fn forecast(&self, horizon: usize) -> Result<Forecast> {
        let (level, trend) = self.state.ok_or_else(|| not_fitted(self.method()))?;
        check_horizon(horizon)?;
        Ok(Forecast {
            values: clamp_non_negative((1..=horizon).map(|k| level + k as f64 * trend)),
            issued_at: self.seen - 1,
        })
    }
}
