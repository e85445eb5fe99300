use thiserror::Error;

use super::GaussLegendre;
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("adaptive quadrature did not reach tolerance on [{a}, {b}] within depth {depth}")]
    NoConvergence { a: f64, b: f64, depth: u32 },
}

/// Adaptive bisection with a fixed Gauss–Legendre rule.
///
/// A panel is accepted when the one-panel estimate and the two-half-panel
/// estimate agree to `tol`; otherwise both halves are refined with `tol / 2`.
pub fn adaptive_gauss<T, F>(
    rule: &GaussLegendre<T>,
    f: &F,
    a: T,
    b: T,
    tol: T,
    max_depth: u32,
) -> Result<T, QuadratureError>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let whole = rule.integrate(a, b, f);
    refine(rule, f, a, b, whole, tol, max_depth)
}

fn refine<T, F>(
    rule: &GaussLegendre<T>,
    f: &F,
    a: T,
    b: T,
    whole: T,
    tol: T,
    depth: u32,
) -> Result<T, QuadratureError>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mid = (a + b) * T::lit(0.5);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    if (left + right - whole).abs() <= tol {
        return Ok(left + right);
    }
    if depth == 0 {
        return Err(QuadratureError::NoConvergence {
            a: a.to_f64().unwrap_or(f64::NAN),
            b: b.to_f64().unwrap_or(f64::NAN),
            depth,
        });
    }
    let half_tol = tol * T::lit(0.5);
    Ok(refine(rule, f, a, mid, left, half_tol, depth - 1)?
        + refine(rule, f, mid, b, right, half_tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_log_singular_free_function() {
        let rule = GaussLegendre::<f64>::new(10);
        let got = adaptive_gauss(&rule, &|t: f64| 1.0 / t, 1.0, 100.0, 1e-12, 40).unwrap();
        assert!((got - 100f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn reports_failure_at_zero_depth() {
        let rule = GaussLegendre::<f64>::new(2);
        let err = adaptive_gauss(&rule, &|t: f64| (40.0 * t).sin(), 0.0, 10.0, 1e-14, 0);
        assert!(err.is_err());
    }
}
