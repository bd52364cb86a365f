use nalgebra::{DMatrix, DVector};

use super::{SarimaOrder, SarimaParams};
use crate::dlm::DlmSpec;
use crate::error::{Error, Result};

/// Solve `C = G C G^T + W` by vectorization.
pub fn solve_lyapunov(g: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let r = g.nrows();
    let lhs = DMatrix::identity(r * r, r * r) - g.kronecker(g);
    let rhs = DVector::from_column_slice(w.as_slice());
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Model("Lyapunov equation is singular (non-stationary AR part)".into()))?;
    let mut c = DMatrix::from_column_slice(r, r, sol.as_slice());
    c = (&c + c.transpose()) * 0.5;
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Model("Lyapunov solution is not finite".into()));
    }
    Ok(c)
}

/// Companion-form matrices of the ARMA part with unit innovation variance.
pub(crate) fn companion(ar: &[f64], ma: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let r = ar.len().max(ma.len() + 1);
    let mut g = DMatrix::zeros(r, r);
    for (i, c) in ar.iter().enumerate() {
        g[(i, 0)] = *c;
    }
    for i in 0..r - 1 {
        g[(i, i + 1)] = 1.0;
    }
    let mut loading = DVector::zeros(r);
    loading[0] = 1.0;
    for (i, c) in ma.iter().enumerate() {
        loading[i + 1] = *c;
    }
    (g, loading)
}

/// Unchecked construction shared with the likelihood hot path.
pub(crate) fn state_space_unchecked(order: &SarimaOrder, params: &SarimaParams) -> Result<DlmSpec> {
    let (ar, ma) = params.expanded(order);
    let (g, loading) = companion(&ar, &ma);
    let r = g.nrows();
    let w = &loading * loading.transpose() * params.sigma2;
    let c0 = solve_lyapunov(&g, &w)?;
    let mut f = DVector::zeros(r);
    f[0] = 1.0;
    Ok(DlmSpec {
        f,
        g,
        v: 0.0,
        w,
        m0: DVector::zeros(r),
        c0,
    })
}

/// Harvey companion form for the fully differenced series: state
/// dimension `max(p + sP, q + sQ + 1)`, `F = e_1`, `V = 0`, and the
/// stationary covariance as prior.
pub fn to_state_space(order: &SarimaOrder, params: &SarimaParams) -> Result<DlmSpec> {
    params.check_lengths(order)?;
    if !params.is_admissible(order) {
        return Err(Error::Model(format!(
            "parameters of {order} are not stationary and invertible"
        )));
    }
    state_space_unchecked(order, params)
}
