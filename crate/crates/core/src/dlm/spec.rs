use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constant system matrices and the Gaussian prior on `theta_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlmSpec {
    /// Observation row `F` (stored as a column vector).
    pub f: DVector<f64>,
    pub g: DMatrix<f64>,
    /// Observation variance.
    pub v: f64,
    pub w: DMatrix<f64>,
    pub m0: DVector<f64>,
    pub c0: DMatrix<f64>,
}

fn check_psd(name: &str, m: &DMatrix<f64>) -> Result<()> {
    let asym = (m - m.transpose()).abs().max();
    let scale = m.abs().max().max(1.0);
    if asym > 1e-10 * scale {
        return Err(Error::input(format!("{name} is not symmetric")));
    }
    let min = m.clone().symmetric_eigenvalues().min();
    if min < -1e-10 * scale {
        return Err(Error::input(format!(
            "{name} is not positive semidefinite (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

impl DlmSpec {
    pub fn new(
        f: DVector<f64>,
        g: DMatrix<f64>,
        v: f64,
        w: DMatrix<f64>,
        m0: DVector<f64>,
        c0: DMatrix<f64>,
    ) -> Result<Self> {
        let p = f.len();
        if p == 0 {
            return Err(Error::input("state dimension must be positive"));
        }
        let square = |m: &DMatrix<f64>| m.nrows() == p && m.ncols() == p;
        if !square(&g) || !square(&w) || !square(&c0) || m0.len() != p {
            return Err(Error::input(format!("DLM matrices must be {p}x{p}, m0 of length {p}")));
        }
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::input(format!("observation variance {v} must be finite and >= 0")));
        }
        check_psd("W", &w)?;
        check_psd("C0", &c0)?;
        Ok(DlmSpec { f, g, v, w, m0, c0 })
    }

    pub fn state_dim(&self) -> usize {
        self.f.len()
    }
}

/// Local linear trend block plus a sum-to-zero quarterly seasonal block,
/// acting on `(mu_t, beta_t, gamma_t, gamma_{t-1}, gamma_{t-2})`.
pub fn trend_seasonal_g() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        5,
        5,
        &[
            1.0, 1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, -1.0, -1.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, 0.0,
        ],
    )
}

/// Trend plus quarterly seasonal DLM with `F = [1, 0, 1, 0, 0]` and
/// `W = diag(w_diag)`. Only the level, slope and current seasonal carry
/// noise, so the last two entries of `w_diag` must be zero.
pub fn build_trend_seasonal(
    m0: DVector<f64>,
    c0: DMatrix<f64>,
    v: f64,
    w_diag: [f64; 5],
) -> Result<DlmSpec> {
    if w_diag[3] != 0.0 || w_diag[4] != 0.0 {
        return Err(Error::input(
            "lagged seasonal states are deterministic: W entries 4 and 5 must be zero",
        ));
    }
    if w_diag.iter().any(|x| *x < 0.0) {
        return Err(Error::input("state variances must be non-negative"));
    }
    DlmSpec::new(
        DVector::from_row_slice(&[1.0, 0.0, 1.0, 0.0, 0.0]),
        trend_seasonal_g(),
        v,
        DMatrix::from_diagonal(&DVector::from_row_slice(&w_diag)),
        m0,
        c0,
    )
}

/// Prior on `theta_0` for the trend plus seasonal model; the variances are
/// filled in per draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSeasonalTemplate {
    pub m0: DVector<f64>,
    pub c0: DMatrix<f64>,
}

impl TrendSeasonalTemplate {
    /// `m0 = (y_1, 0, 0, 0, 0)` and `C0 = 1e7 I`.
    pub fn diffuse(first_observation: f64) -> Self {
        let mut m0 = DVector::zeros(5);
        m0[0] = first_observation;
        TrendSeasonalTemplate {
            m0,
            c0: DMatrix::identity(5, 5) * 1e7,
        }
    }

    /// Spec for `(obs, level, slope, seasonal)` variances.
    pub fn build(&self, variances: [f64; 4]) -> Result<DlmSpec> {
        let [v, mu, beta, gamma] = variances;
        build_trend_seasonal(self.m0.clone(), self.c0.clone(), v, [mu, beta, gamma, 0.0, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evolution_matrix_rows() {
        let g = trend_seasonal_g();
        assert_eq!(g.row(2).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, -1.0, -1.0, -1.0]);
        assert_eq!(g.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn seasonal_block_has_period_four() {
        let g = trend_seasonal_g();
        let state = DVector::from_row_slice(&[0.0, 0.0, 1.5, -0.5, 2.0]);
        let g4 = &g * &g * &g * &g;
        assert_eq!(&g4 * &state, state);
    }

    #[test]
    fn rejects_noise_on_lagged_seasonals() {
        let err = build_trend_seasonal(DVector::zeros(5), DMatrix::identity(5, 5), 1.0, [1.0, 1.0, 1.0, 0.5, 0.0]);
        assert!(err.unwrap_err().is_input());
    }

    #[test]
    fn spec_validation() {
        let f = DVector::from_element(2, 1.0);
        let bad_w = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(DlmSpec::new(f.clone(), DMatrix::identity(2, 2), 1.0, bad_w, DVector::zeros(2), DMatrix::identity(2, 2)).is_err());
        assert!(DlmSpec::new(f.clone(), DMatrix::identity(3, 3), 1.0, DMatrix::identity(2, 2), DVector::zeros(2), DMatrix::identity(2, 2)).is_err());
        assert!(DlmSpec::new(f, DMatrix::identity(2, 2), -1.0, DMatrix::identity(2, 2), DVector::zeros(2), DMatrix::identity(2, 2)).is_err());
    }
}
