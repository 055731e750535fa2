//! Autoregressive model fitted by ordinary least squares through the origin:
//! `x(t) = a_1·x(t-1) + … + a_p·x(t-p)`.
//!
//! Full-rank designs are solved by Householder QR. When the lagged design is
//! rank deficient (for instance on a constant series, where every lag column
//! is identical) the minimum-norm solution comes from an eigendecomposition of
//! the Gram matrix instead.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{check_horizon, check_observation, check_series, clamp_non_negative, not_fitted, Forecast, Forecaster, Method};
use crate::error::{Error, Result};

/// Eigenvalues of the Gram matrix below this fraction of the largest are
/// treated as zero (a 1e-6 cut on the singular values of the design).
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ArLeastSquares {
    order: usize,
    /// `coefficients[i]` multiplies the observation `i + 1` steps back.
    coefficients: Vec<f64>,
    /// The last `order` observations, most recent at the back.
    recent: VecDeque<f64>,
    seen: usize,
    fitted: bool,
}

impl ArLeastSquares {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::config("ar order must be >= 1"));
        }
        Ok(Self {
            order,
            coefficients: Vec::new(),
            recent: VecDeque::with_capacity(order),
            seen: 0,
            fitted: false,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn minimum_len(order: usize) -> usize {
        2 * order + 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn predict_next(&self, history: &[f64]) -> f64 {
        let n = history.len();
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| a * history[n - 1 - i])
            .sum()
    }
}

impl Forecaster for ArLeastSquares {
    fn method(&self) -> Method {
        Method::ArLs
    }

    fn is_fitted(&self) -> bool {
        self.fitted
    }

    fn fit(&mut self, train: &[f64]) -> Result<()> {
        let p = self.order;
        check_series("ar_ls", train, Self::minimum_len(p))?;
        let rows = train.len() - p;
        let design = DMatrix::from_fn(rows, p, |r, i| train[p + r - 1 - i]);
        let target = DVector::from_iterator(rows, train[p..].iter().copied());

        let gram = design.transpose() * &design;
        let eig = SymmetricEigen::new(gram);
        let largest = eig.eigenvalues.max();
        let cut = largest * RANK_TOLERANCE;
        let coef = if largest <= 0.0 {
            DVector::zeros(p)
        } else if eig.eigenvalues.min() > cut {
            let qr = design.qr();
            let rhs = qr.q().transpose() * &target;
            qr.r()
                .solve_upper_triangular(&rhs)
                .ok_or_else(|| Error::protocol("ar_ls: singular triangular factor"))?
        } else {
            let moment = design.transpose() * &target;
            let mut coef = DVector::zeros(p);
            for (k, &value) in eig.eigenvalues.iter().enumerate() {
                if value > cut {
                    let v = eig.eigenvectors.column(k);
                    coef += v * (v.dot(&moment) / value);
                }
            }
            coef
        };
        self.coefficients = coef.iter().copied().collect();
        self.recent = train[train.len() - p..].iter().copied().collect();
        self.seen = train.len();
        self.fitted = true;
        Ok(())
    }

    fn update(&mut self, observation: f64) -> Result<()> {
        if !self.fitted {
            return Err(not_fitted(self.method()));
        }
        check_observation(observation)?;
        self.recent.pop_front();
        self.recent.push_back(observation);
        self.seen += 1;
        Ok(())
    }

    fn forecast(&self, horizon: usize) -> Result<Forecast> {
        if !self.fitted {
            return Err(not_fitted(self.method()));
        }
        check_horizon(horizon)?;
        let mut history: Vec<f64> = self.recent.iter().copied().collect();
        for _ in 0..horizon {
            let next = self.predict_next(&history);
            history.push(next);
        }
        Ok(Forecast {
            values: clamp_non_negative(history[self.order..].iter().copied()),
            issued_at: self.seen - 1,
        })
    }
}

/// Fits orders `1..=max_order` on `train`, scores each by one-step MAE while
/// walking `validation`, and returns the best model (already advanced through
/// `validation`) together with its MAE.
pub(super) fn select_order(train: &[f64], validation: &[f64], max_order: usize) -> Result<(ArLeastSquares, f64)> {
    let mut best: Option<(ArLeastSquares, f64)> = None;
    for order in 1..=max_order.max(1) {
        if order > 1 && train.len() < ArLeastSquares::minimum_len(order) {
            break;
        }
        let mut model = ArLeastSquares::new(order)?;
        model.fit(train)?;
        let mut abs_err = 0.0;
        for &v in validation {
            abs_err += libm::fabs(model.forecast(1)?.values[0] - v);
            model.update(v)?;
        }
        let mae = if validation.is_empty() {
            0.0
        } else {
            abs_err / validation.len() as f64
        };
        if best.as_ref().is_none_or(|(_, m)| mae < *m) {
            best = Some((model, mae));
        }
    }
    best.ok_or_else(|| Error::protocol("no AR order could be fitted"))
}
