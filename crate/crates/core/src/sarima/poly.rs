use super::SarimaOrder;

/// Product of two polynomials given by coefficient vectors, constant first.
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `1 + sign * (c_1 B^step + c_2 B^{2 step} + ...)` as dense coefficients.
fn lag_polynomial(coeffs: &[f64], step: usize, sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len() * step + 1];
    out[0] = 1.0;
    for (i, c) in coeffs.iter().enumerate() {
        out[(i + 1) * step] = sign * c;
    }
    out
}

/// Expand `phi(B) Phi(B^s)` and `theta(B) Theta(B^s)`.
///
/// Returns `(ar, ma)` without the constant term, in the same sign
/// conventions as the inputs: the AR product is `1 - sum ar_k B^k` and the
/// MA product is `1 + sum ma_k B^k`.
pub fn expand(
    order: &SarimaOrder,
    phi: &[f64],
    theta: &[f64],
    seasonal_phi: &[f64],
    seasonal_theta: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let s = order.period;
    let ar = poly_mul(&lag_polynomial(phi, 1, -1.0), &lag_polynomial(seasonal_phi, s, -1.0));
    let ma = poly_mul(&lag_polynomial(theta, 1, 1.0), &lag_polynomial(seasonal_theta, s, 1.0));
    (
        ar[1..].iter().map(|c| -c).collect(),
        ma[1..].to_vec(),
    )
}

/// `(1 - B)^d (1 - B^s)^D`, constant term included.
pub fn differencing_polynomial(order: &SarimaOrder) -> Vec<f64> {
    let mut poly = vec![1.0];
    for _ in 0..order.d {
        poly = poly_mul(&poly, &[1.0, -1.0]);
    }
    for _ in 0..order.seasonal_d {
        poly = poly_mul(&poly, &lag_polynomial(&[1.0], order.period, -1.0));
    }
    poly
}

/// Roots must lie this far outside the unit circle.
const ROOT_MARGIN: f64 = 1e-6;

/// Whether `1 - sum c_k B^k` has all roots outside the unit circle
/// (by at least the margin), via the step-down recursion to partial
/// autocorrelations: the polynomial is stationary iff every one of them
/// has modulus below one.
pub fn is_stationary(coeffs: &[f64]) -> bool {
    stationary_beyond(coeffs, 1.0 + ROOT_MARGIN)
}

/// Whether all roots of `1 - sum c_k B^k` have modulus above `rho`.
fn stationary_beyond(coeffs: &[f64], rho: f64) -> bool {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return false;
    }
    // Roots beyond radius rho iff c_k rho^k has roots beyond 1.
    let mut a: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * rho.powi(k as i32 + 1))
        .collect();
    while let Some(&kappa) = a.last() {
        if kappa.abs() >= 1.0 {
            return false;
        }
        let p = a.len();
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..p - 1).map(|j| (a[j] + kappa * a[p - 2 - j]) / denom).collect();
        a = prev;
    }
    true
}

/// Map unconstrained reals to the coefficients of a stationary
/// `1 - sum c_k B^k`, via partial autocorrelations `u / sqrt(1 + u^2)`.
pub fn constrain_stationary(unconstrained: &[f64]) -> Vec<f64> {
    let mut coeffs: Vec<f64> = Vec::with_capacity(unconstrained.len());
    for u in unconstrained {
        let r = u / (1.0 + u * u).sqrt();
        let prev = coeffs.clone();
        for j in 0..prev.len() {
            coeffs[j] = prev[j] - r * prev[prev.len() - 1 - j];
        }
        coeffs.push(r);
    }
    coeffs
}
