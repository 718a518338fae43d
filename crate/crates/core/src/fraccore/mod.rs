//! Special functions and the two Jumarie operators.
//!
//! Everything here uses the lower terminal `a` of the working interval as
//! the base point, both for the derivative (which subtracts `f(a)`) and for
//! the `(dt)^α` integral. Order `α = 1` reduces to the classical derivative
//! and integral without a separate code path.

mod gamma;
mod quadrature;
mod sampled;

pub use gamma::{alpha_factorial, gamma};
pub use quadrature::{frac_integral, try_frac_integral, GaussLegendre, QuadratureConfig};
pub use sampled::{classical_derivative_sampled, frac_derivative_sampled, SampledFunction};

use crate::error::{Error, Result};
use crate::trajectory::FracPowerSeries;

/// Power rule for `(t-a)^γ`: returns `(Γ(γ+1)/Γ(γ+1-α), γ-α)`.
///
/// `γ = 0` is a constant and maps to `(0, 0)`.
pub fn frac_derivative_power(gamma_exp: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(gamma_exp >= 0.0) || !gamma_exp.is_finite() {
        return Err(Error::invalid(format!("exponent must be finite and >= 0, got {gamma_exp}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("order must lie in (0, 1], got {alpha}")));
    }
    if gamma_exp == 0.0 {
        return Ok((0.0, 0.0));
    }
    let coefficient = gamma(gamma_exp + 1.0)? / gamma(gamma_exp + 1.0 - alpha)?;
    Ok((coefficient, gamma_exp - alpha))
}

/// Defect of the integration-by-parts formula
///
/// ```text
/// ∫ u^(α) v (dt)^α + ∫ u v^(α) (dt)^α - α! [u v]_a^b
/// ```
///
/// on `[a, b]`. Purely diagnostic: the defect is zero when one factor is
/// constant but not for general smooth pairs (for `u = v = t`, `α = 1/2` it
/// equals `Γ(3/2)/2`). Nothing else in the crate relies on the formula.
pub fn check_integration_by_parts(
    u: &FracPowerSeries,
    v: &FracPowerSeries,
    alpha: f64,
    a: f64,
    b: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    for (name, s) in [("u", u), ("v", v)] {
        if s.base() != a {
            return Err(Error::invalid(format!(
                "{name} has base point {} but the interval starts at {a}",
                s.base()
            )));
        }
    }
    let du = u.frac_derivative(alpha)?;
    let dv = v.frac_derivative(alpha)?;
    let first = try_frac_integral(|t| Ok(du.eval(t)? * v.eval(t)?), a, b, alpha, q)?;
    let second = try_frac_integral(|t| Ok(u.eval(t)? * dv.eval(t)?), a, b, alpha, q)?;
    let boundary = u.eval(b)? * v.eval(b)? - u.eval(a)? * v.eval(a)?;
    Ok(first + second - alpha_factorial(alpha)? * boundary)
}
