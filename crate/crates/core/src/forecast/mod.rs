//! Pluggable demand forecasters.
//!
//! Every method follows the same protocol: [`Forecaster::fit`] once on the
//! training window, then [`Forecaster::update`] with each new observation. No
//! method refits over its history after `fit`.

mod ar;
mod naive;
mod smoothing;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use ar::ArLeastSquares;
pub use naive::{Persistence, SeasonalNaive};
pub use smoothing::DoubleExponential;

use crate::error::{Error, Result};

/// Predicted demand for steps `issued_at + 1 ..= issued_at + h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    pub values: Vec<f64>,
    /// Index of the last observation the forecaster had seen.
    pub issued_at: usize,
}

impl Forecast {
    pub fn horizon(&self) -> usize {
        self.values.len()
    }
}

pub trait Forecaster {
    fn method(&self) -> Method;

    fn is_fitted(&self) -> bool;

    /// Estimates parameters from `train` only and marks the forecaster fitted.
    fn fit(&mut self, train: &[f64]) -> Result<()>;

    /// Advances the state by one observation without refitting.
    fn update(&mut self, observation: f64) -> Result<()>;

    /// Side-effect free; values are clamped at zero.
    fn forecast(&self, horizon: usize) -> Result<Forecast>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    Persistence,
    SeasonalNaive,
    Des,
    ArLs,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Persistence, Method::SeasonalNaive, Method::Des, Method::ArLs];

    pub fn name(self) -> &'static str {
        match self {
            Method::Persistence => "persistence",
            Method::SeasonalNaive => "seasonal_naive",
            Method::Des => "des",
            Method::ArLs => "ar_ls",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::config(format!("forecaster: unknown method `{s}`")))
    }
}

/// Hyperparameters for all methods; each method reads its own fields.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ForecastSettings {
    pub seasonal_period: usize,
    pub des_level_smoothing: f64,
    pub des_trend_smoothing: f64,
    /// Largest AR order tried; the order with the lowest one-step MAE on the
    /// validation window is kept.
    pub ar_max_order: usize,
}

impl Default for ForecastSettings {
    fn default() -> Self {
        Self {
            seasonal_period: 50,
            des_level_smoothing: 0.5,
            des_trend_smoothing: 0.2,
            ar_max_order: 3,
        }
    }
}

impl ForecastSettings {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x.is_finite() && x > 0.0 && x < 1.0;
        if self.seasonal_period == 0 {
            return Err(Error::config("forecast.seasonal_period: must be >= 1"));
        }
        if !unit(self.des_level_smoothing) {
            return Err(Error::config("forecast.des_level_smoothing: must lie in (0, 1)"));
        }
        if !unit(self.des_trend_smoothing) {
            return Err(Error::config("forecast.des_trend_smoothing: must lie in (0, 1)"));
        }
        if self.ar_max_order == 0 {
            return Err(Error::config("forecast.ar_max_order: must be >= 1"));
        }
        Ok(())
    }
}

/// Static dispatch over the shipped methods.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyForecaster {
    Persistence(Persistence),
    SeasonalNaive(SeasonalNaive),
    Des(DoubleExponential),
    ArLs(ArLeastSquares),
}

impl AnyForecaster {
    /// An unfitted forecaster for `method`. AR uses `ar_max_order` as its order.
    pub fn new(method: Method, settings: &ForecastSettings) -> Result<Self> {
        settings.validate()?;
        Ok(match method {
            Method::Persistence => AnyForecaster::Persistence(Persistence::new()),
            Method::SeasonalNaive => AnyForecaster::SeasonalNaive(SeasonalNaive::new(settings.seasonal_period)?),
            Method::Des => AnyForecaster::Des(DoubleExponential::new(
                settings.des_level_smoothing,
                settings.des_trend_smoothing,
            )?),
            Method::ArLs => AnyForecaster::ArLs(ArLeastSquares::new(settings.ar_max_order)?),
        })
    }

    /// Fits on `train`, then feeds `validation` through `update`.
    ///
    /// For AR every order up to `ar_max_order` whose minimum training length is
    /// met is fitted, walked through the validation window, and scored by
    /// one-step-ahead MAE; the best (lowest order on ties) is returned.
    pub fn prepare(method: Method, settings: &ForecastSettings, train: &[f64], validation: &[f64]) -> Result<Self> {
        if method == Method::ArLs {
            return ar::select_order(train, validation, settings.ar_max_order).map(|(f, _)| AnyForecaster::ArLs(f));
        }
        let mut f = AnyForecaster::new(method, settings)?;
        f.fit(train)?;
        for &v in validation {
            f.update(v)?;
        }
        Ok(f)
    }

    fn inner(&self) -> &dyn Forecaster {
        match self {
            AnyForecaster::Persistence(f) => f,
            AnyForecaster::SeasonalNaive(f) => f,
            AnyForecaster::Des(f) => f,
            AnyForecaster::ArLs(f) => f,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Forecaster {
        match self {
            AnyForecaster::Persistence(f) => f,
            AnyForecaster::SeasonalNaive(f) => f,
            AnyForecaster::Des(f) => f,
            AnyForecaster::ArLs(f) => f,
        }
    }
}

impl Forecaster for AnyForecaster {
    fn method(&self) -> Method {
        self.inner().method()
    }

    fn is_fitted(&self) -> bool {
        self.inner().is_fitted()
    }

    fn fit(&mut self, train: &[f64]) -> Result<()> {
        self.inner_mut().fit(train)
    }

    fn update(&mut self, observation: f64) -> Result<()> {
        self.inner_mut().update(observation)
    }

    fn forecast(&self, horizon: usize) -> Result<Forecast> {
        self.inner().forecast(horizon)
    }
}

pub(crate) fn check_observation(x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("observation {x} must be finite and non-negative")))
    }
}

pub(crate) fn check_series(method: &'static str, series: &[f64], minimum: usize) -> Result<()> {
    if series.len() < minimum {
        return Err(Error::SeriesTooShort {
            method,
            minimum,
            got: series.len(),
        });
    }
    series.iter().try_for_each(|x| check_observation(*x))
}

pub(crate) fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        Err(Error::Argument("forecast horizon must be >= 1".into()))
    } else {
        Ok(())
    }
}

pub(crate) fn not_fitted(method: Method) -> Error {
    Error::protocol(format!("{method} forecaster used before fit"))
}

pub(crate) fn clamp_non_negative(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    values.into_iter().map(|v| if v > 0.0 { v } else { 0.0 }).collect()
}
