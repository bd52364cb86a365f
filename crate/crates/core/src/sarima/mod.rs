//! Seasonal ARIMA models
//!
//! `phi(B) Phi(B^s) (1-B)^d (1-B^s)^D y_t = theta(B) Theta(B^s) e_t` with
//! `phi(B) = 1 - phi_1 B - ...` and `theta(B) = 1 + theta_1 B + ...`
//! (seasonal factors alike). Estimation is exact Gaussian maximum
//! likelihood via the Kalman filter on the differenced series.

mod estimate;
mod forecast;
mod poly;
mod state_space;

pub use estimate::{fit, grid_search, loglik, GridReport};
pub use forecast::{fitted_values, forecast, psi_weights};
pub use poly::{constrain_stationary, differencing_polynomial, expand, is_stationary, poly_mul};
pub use state_space::{solve_lyapunov, to_state_space};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SarimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub period: usize,
}

impl SarimaOrder {
    pub fn new(
        (p, d, q): (usize, usize, usize),
        (seasonal_p, seasonal_d, seasonal_q): (usize, usize, usize),
        period: usize,
    ) -> Result<Self> {
        if period < 2 {
            return Err(Error::input(format!("seasonal period {period} must be at least 2")));
        }
        if d + seasonal_d > 2 {
            return Err(Error::input(format!(
                "total differencing d + D = {} exceeds 2",
                d + seasonal_d
            )));
        }
        Ok(SarimaOrder {
            p,
            d,
            q,
            seasonal_p,
            seasonal_d,
            seasonal_q,
            period,
        })
    }

    /// Number of ARMA coefficients.
    pub fn n_coefficients(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Values lost to differencing.
    pub fn lost(&self) -> usize {
        self.d + self.seasonal_d * self.period
    }
}

impl std::fmt::Display for SarimaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({},{},{})x({},{},{})_{}",
            self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q, self.period
        )
    }
}

/// Coefficients of the four lag polynomials and the innovation variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarimaParams {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub seasonal_phi: Vec<f64>,
    pub seasonal_theta: Vec<f64>,
    pub sigma2: f64,
}

impl SarimaParams {
    pub fn zeros(order: &SarimaOrder, sigma2: f64) -> Self {
        SarimaParams {
            phi: vec![0.0; order.p],
            theta: vec![0.0; order.q],
            seasonal_phi: vec![0.0; order.seasonal_p],
            seasonal_theta: vec![0.0; order.seasonal_q],
            sigma2,
        }
    }

    pub(crate) fn check_lengths(&self, order: &SarimaOrder) -> Result<()> {
        if self.phi.len() != order.p
            || self.theta.len() != order.q
            || self.seasonal_phi.len() != order.seasonal_p
            || self.seasonal_theta.len() != order.seasonal_q
        {
            return Err(Error::input(format!("coefficient lengths do not match order {order}")));
        }
        Ok(())
    }

    /// Full AR and MA polynomials over `B`, constant term excluded.
    pub fn expanded(&self, order: &SarimaOrder) -> (Vec<f64>, Vec<f64>) {
        expand(order, &self.phi, &self.theta, &self.seasonal_phi, &self.seasonal_theta)
    }

    /// Whether the AR part is stationary and the MA part invertible.
    pub fn is_admissible(&self, order: &SarimaOrder) -> bool {
        let (ar, ma) = self.expanded(order);
        let ma_neg: Vec<f64> = ma.iter().map(|v| -v).collect();
        self.sigma2 > 0.0 && is_stationary(&ar) && is_stationary(&ma_neg)
    }
}

/// A fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarimaModel {
    pub order: SarimaOrder,
    pub params: SarimaParams,
    pub loglik: f64,
    pub aic: f64,
    /// Observations entering the likelihood (after differencing).
    pub n_used: usize,
}

impl SarimaModel {
    /// Estimated parameters counted by the AIC: coefficients plus variance.
    pub fn n_params(&self) -> usize {
        self.order.n_coefficients() + 1
    }
}

/// `-2 loglik + 2k`.
pub fn aic(loglik: f64, k: usize) -> f64 {
    -2.0 * loglik + 2.0 * k as f64
}
