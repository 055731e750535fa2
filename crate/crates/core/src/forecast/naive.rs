use alloc::collections::VecDeque;

use super::{check_horizon, check_observation, check_series, clamp_non_negative, not_fitted, Forecast, Forecaster, Method};
use crate::error::{Error, Result};

/// Repeats the last observation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Persistence {
    last: Option<f64>,
    seen: usize,
}

impl Persistence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last(&self) -> Option<f64> {
        self.last
    }
}

impl Forecaster for Persistence {
    fn method(&self) -> Method {
        Method::Persistence
    }

    fn is_fitted(&self) -> bool {
        self.last.is_some()
    }

    fn fit(&mut self, train: &[f64]) -> Result<()> {
        check_series("persistence", train, 1)?;
        self.last = train.last().copied();
        self.seen = train.len();
        Ok(())
    }

    fn update(&mut self, observation: f64) -> Result<()> {
        if self.last.is_none() {
            return Err(not_fitted(self.method()));
        }
        check_observation(observation)?;
        self.last = Some(observation);
        self.seen += 1;
        Ok(())
    }

    fn forecast(&self, horizon: usize) -> Result<Forecast> {
        let last = self.last.ok_or_else(|| not_fitted(self.method()))?;
        check_horizon(horizon)?;
        Ok(Forecast {
            values: clamp_non_negative(core::iter::repeat_n(last, horizon)),
            issued_at: self.seen - 1,
        })
    }
}

/// Predicts the value observed one season earlier.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonalNaive {
    period: usize,
    window: VecDeque<f64>,
    seen: usize,
    fitted: bool,
}

impl SeasonalNaive {
    pub fn new(period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::config("forecast.seasonal_period: must be >= 1"));
        }
        Ok(Self {
            period,
            window: VecDeque::with_capacity(period),
            seen: 0,
            fitted: false,
        })
    }

    pub fn period(&self) -> usize {
        self.period
    }
}

impl Forecaster for SeasonalNaive {
    fn method(&self) -> Method {
        Method::SeasonalNaive
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn fit(&mut self, train: &[f64]) -> Result<()> {
        check_series("seasonal_naive", train, self.period)?;
        self.window = train[train.len() - self.period..].iter().copied().collect();
        self.seen = train.len();
        self.fitted = true;
        Ok(())
    }

    fn update(&mut self, observation: f64) -> Result<()> {
        if !self.fitted {
            return Err(not_fitted(self.method()));
        }
        check_observation(observation)?;
        self.window.pop_front();
        self.window.push_back(observation);
        self.seen += 1;
        Ok(())
    }

    fn forecast(&self, horizon: usize) -> Result<Forecast> {
        if !self.fitted {
            return Err(not_fitted(self.method()));
        }
        check_horizon(horizon)?;
        // window[0] is one full period before the next step
        let values = (0..horizon).map(|k| self.window[k % self.period]);
        Ok(Forecast {
            values: clamp_non_negative(values),
            issued_at: self.seen - 1,
        })
    }
}
