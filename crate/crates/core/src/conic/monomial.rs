//! Best local monomial approximation of a positive differentiable function.
//!
//! Near a positive point `v0`, `f` is approximated by
//! `f_hat(v) = f(v0) * prod_l (v_l / v0_l)^beta_l` with
//! `beta_l = v0_l * (df/dv_l)(v0) / f(v0)`, i.e. the first-order match of
//! `ln f` in `ln v`. Monomials are fixed points of the map.

use super::ConicError;

/// A fitted monomial surrogate: exact at the expansion point, with the same
/// log-gradient there.
#[derive(Debug, Clone)]
pub struct MonomialApprox {
    /// `f(v0)`.
    pub coeff: f64,
    /// Exponents `beta_l`, one per variable.
    pub exponents: Vec<f64>,
    /// Expansion point `v0` (all strictly positive).
    pub point: Vec<f64>,
}

impl MonomialApprox {
    pub fn eval(&self, v: &[f64]) -> f64 {
        self.coeff
            * v.iter()
                .zip(self.point.iter())
                .zip(self.exponents.iter())
                .map(|((&vi, &v0), &b)| (vi / v0).powf(b))
                .product::<f64>()
    }
}

/// Fit by central finite differences of `ln f` in log space.
pub fn monomial_approx<F>(f: F, point: &[f64]) -> Result<MonomialApprox, ConicError>
where
    F: Fn(&[f64]) -> f64,
{
    let f0 = f(point);
    if !(f0 > 0.0) {
        return Err(ConicError::NonPositiveValue(f0));
    }
    if point.iter().any(|&v| !(v > 0.0)) {
        return Err(ConicError::BadProgram("expansion point must be positive".into()));
    }
    let h = 1e-6f64;
    let mut exponents = Vec::with_capacity(point.len());
    let mut work = point.to_vec();
    for l in 0..point.len() {
        let v0 = point[l];
        work[l] = v0 * h.exp();
        let fp = f(&work);
        work[l] = v0 * (-h).exp();
        let fm = f(&work);
        work[l] = v0;
        if !(fp > 0.0 && fm > 0.0) {
            return Err(ConicError::NonPositiveValue(fp.min(fm)));
        }
        exponents.push((fp.ln() - fm.ln()) / (2.0 * h));
    }
    Ok(MonomialApprox { coeff: f0, exponents, point: point.to_vec() })
}

/// Fit from an analytic gradient: `beta_l = v0_l * grad_l / f(v0)`.
pub fn monomial_approx_with_grad(
    f0: f64,
    grad: &[f64],
    point: &[f64],
) -> Result<MonomialApprox, ConicError> {
    if !(f0 > 0.0) {
        return Err(ConicError::NonPositiveValue(f0));
    }
    let exponents = point
        .iter()
        .zip(grad.iter())
        .map(|(&v0, &g)| v0 * g / f0)
        .collect();
    Ok(MonomialApprox { coeff: f0, exponents, point: point.to_vec() })
}
