//! Rewrites an integrand expression evaluated along a power-series
//! trajectory into a power series, when the expression's shape allows it.

use crate::expr::{Expr, Func};
use crate::trajectory::FracPowerSeries;

/// Largest integer power expanded by repeated multiplication.
const MAX_EXPANDED_POWER: u32 = 16;

pub(crate) struct Substitution<'a> {
    pub a: f64,
    pub y: &'a FracPowerSeries,
    pub v: &'a FracPowerSeries,
}

/// `expr(t, y(t), v(t))` as a series in `(t-a)`, or `None` when the tree
/// leaves the class (transcendental calls on non-constants, non-integer
/// powers of multi-term series, division by non-constants, ...).
pub(crate) fn to_series(expr: &Expr, sub: &Substitution<'_>) -> Option<FracPowerSeries> {
    let a = sub.a;
    let constant = |c: f64| FracPowerSeries::new(a, [(c, 0.0)]).ok();
    match expr {
        Expr::Const(c) => constant(*c),
        Expr::Var(name) => match name.as_str() {
            "t" => FracPowerSeries::new(a, [(a, 0.0), (1.0, 1.0)]).ok(),
            "y" => Some(sub.y.clone()),
            "v" => Some(sub.v.clone()),
            _ => None,
        },
        Expr::Add(l, r) => to_series(l, sub)?.try_add(&to_series(r, sub)?).ok(),
        Expr::Sub(l, r) => to_series(l, sub)?.try_add(&to_series(r, sub)?.scale(-1.0)).ok(),
        Expr::Neg(inner) => Some(to_series(inner, sub)?.scale(-1.0)),
        Expr::Mul(l, r) => to_series(l, sub)?.product(&to_series(r, sub)?).ok(),
        Expr::Div(l, r) => {
            let den = constant_value(&to_series(r, sub)?)?;
            if den == 0.0 {
                return None;
            }
            Some(to_series(l, sub)?.scale(1.0 / den))
        }
        Expr::Pow(base, exponent) => {
            let p = constant_value(&to_series(exponent, sub)?)?;
            power(&to_series(base, sub)?, p)
        }
        Expr::Call(func, arg) => {
            let inner = to_series(arg, sub)?;
            if let Some(c) = constant_value(&inner) {
                let value = match func {
                    Func::Sqrt if c >= 0.0 => c.sqrt(),
                    Func::Exp => c.exp(),
                    Func::Ln if c > 0.0 => c.ln(),
                    Func::Sin => c.sin(),
                    Func::Cos => c.cos(),
                    Func::Gamma => crate::fraccore::gamma(c).ok()?,
                    _ => return None,
                };
                return constant(value);
            }
            match func {
                Func::Sqrt => power(&inner, 0.5),
                _ => None,
            }
        }
    }
}

fn constant_value(s: &FracPowerSeries) -> Option<f64> {
    match s.terms() {
        [] => Some(0.0),
        [only] if only.exponent == 0.0 => Some(only.coefficient),
        _ => None,
    }
}

fn power(base: &FracPowerSeries, p: f64) -> Option<FracPowerSeries> {
    if p == 0.0 {
        return FracPowerSeries::new(base.base(), [(1.0, 0.0)]).ok();
    }
    if p.fract() == 0.0 && p > 0.0 && p <= MAX_EXPANDED_POWER as f64 {
        let mut acc = base.clone();
        for _ in 1..p as u32 {
            acc = acc.product(base).ok()?;
        }
        return Some(acc);
    }
    match base.terms() {
        [only] if only.coefficient > 0.0 => {
            FracPowerSeries::new(base.base(), [(only.coefficient.powf(p), only.exponent * p)]).ok()
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn check_pointwise(src: &str, a: f64, y: &FracPowerSeries, v: &FracPowerSeries) {
        let e = parse_expression(src, &["t", "y", "v"]).unwrap();
        let s = to_series(&e, &Substitution { a, y, v }).unwrap_or_else(|| panic!("{src} not converted"));
        for k in 1..=10 {
            let t = a + 0.1 * k as f64;
            let (yt, vt) = (y.eval(t).unwrap(), v.eval(t).unwrap());
            let direct = crate::functional::eval_tyv(&e, t, yt, vt).unwrap();
            let via = s.eval(t).unwrap();
            assert!((direct - via).abs() <= 1e-12 * (1.0 + direct.abs()), "{src} at {t}: {direct} vs {via}");
        }
    }

    #[test]
    fn polynomial_integrands_convert() {
        let y = FracPowerSeries::new(0.0, [(0.2, 0.0), (1.5, 0.5), (-0.5, 1.0)]).unwrap();
        let v = y.frac_derivative(0.5).unwrap();
        for src in ["2*v", "t^(1/2)", "y^2*v - 3*t*v", "(y+v)^3/4", "-v + sqrt(4)*t^1.5", "sqrt(t)*v"] {
            check_pointwise(src, 0.0, &y, &v);
        }
    }

    #[test]
    fn shifted_base_keeps_integer_powers_of_t() {
        let y = FracPowerSeries::new(1.0, [(1.0, 1.0)]).unwrap();
        let v = y.frac_derivative(1.0).unwrap();
        check_pointwise("t^2*v", 1.0, &y, &v);
        let e = parse_expression("t^(1/2)", &["t", "y", "v"]).unwrap();
        assert!(to_series(&e, &Substitution { a: 1.0, y: &y, v: &v }).is_none());
    }

    #[test]
    fn transcendental_calls_fall_out_of_class() {
        let y = FracPowerSeries::new(0.0, [(1.0, 1.0)]).unwrap();
        let v = y.frac_derivative(0.5).unwrap();
        for src in ["exp(v)", "v/y", "sin(t)", "y^v"] {
            let e = parse_expression(src, &["t", "y", "v"]).unwrap();
            assert!(to_series(&e, &Substitution { a: 0.0, y: &y, v: &v }).is_none(), "{src}");
        }
    }
}
