use super::{Expr, Func};
use crate::error::{Error, Result};

/// Exact partial derivative of `expr` with respect to `variable`.
///
/// The result is lightly simplified: literal 0/1 identities and
/// constant-only arithmetic are folded, nothing else. The only failure is
/// `gamma(u)` with `u` depending on `variable`, since the language has no
/// polygamma function to express the result.
pub fn differentiate(expr: &Expr, variable: &str) -> Result<Expr> {
    if !expr.depends_on(variable) {
        return Ok(Expr::Const(0.0));
    }
    let d = |e: &Expr| differentiate(e, variable);
    Ok(match expr {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var(name) => Expr::Const(if name == variable { 1.0 } else { 0.0 }),
        Expr::Add(a, b) => add(d(a)?, d(b)?),
        Expr::Sub(a, b) => sub(d(a)?, d(b)?),
        Expr::Neg(a) => neg(d(a)?),
        Expr::Mul(a, b) => {
            if !b.depends_on(variable) {
                mul(d(a)?, (**b).clone())
            } else if !a.depends_on(variable) {
                mul((**a).clone(), d(b)?)
            } else {
                add(mul(d(a)?, (**b).clone()), mul((**a).clone(), d(b)?))
            }
        }
        Expr::Div(a, b) => {
            if !b.depends_on(variable) {
                div(d(a)?, (**b).clone())
            } else {
                let b_sq = pow((**b).clone(), Expr::Const(2.0));
                if !a.depends_on(variable) {
                    neg(div(mul((**a).clone(), d(b)?), b_sq))
                } else {
                    div(sub(mul(d(a)?, (**b).clone()), mul((**a).clone(), d(b)?)), b_sq)
                }
            }
        }
        Expr::Pow(base, exponent) => {
            let (u, e) = ((**base).clone(), (**exponent).clone());
            if !exponent.depends_on(variable) {
                // e * u^(e-1) * u'
                let lowered = pow(u, sub(e.clone(), Expr::Const(1.0)));
                mul(mul(e, lowered), d(base)?)
            } else if !base.depends_on(variable) {
                mul(mul(pow(u.clone(), e), call(Func::Ln, u)), d(exponent)?)
            } else {
                // u^e * (e' ln u + e u'/u)
                let inner = add(
                    mul(d(exponent)?, call(Func::Ln, u.clone())),
                    div(mul(e.clone(), d(base)?), u.clone()),
                );
                mul(pow(u, e), inner)
            }
        }
        Expr::Call(func, arg) => {
            let u = (**arg).clone();
            let du = d(arg)?;
            match func {
                Func::Sqrt => div(du, mul(Expr::Const(2.0), call(Func::Sqrt, u))),
                Func::Exp => mul(call(Func::Exp, u), du),
                Func::Ln => div(du, u),
                Func::Sin => mul(call(Func::Cos, u), du),
                Func::Cos => neg(mul(call(Func::Sin, u), du)),
                Func::Gamma => {
                    return Err(Error::invalid(format!(
                        "cannot differentiate gamma({u}) with respect to {variable}"
                    )))
                }
            }
        }
    })
}

fn fold(value: f64, fallback: impl FnOnce() -> Expr) -> Expr {
    if value.is_finite() {
        Expr::Const(value)
    } else {
        fallback()
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => fold(x + y, || Expr::Add(Box::new(a), Box::new(b))),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => fold(x - y, || Expr::Sub(Box::new(a), Box::new(b))),
        (_, Some(0.0)) => a,
        (Some(0.0), _) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => fold(x * y, || Expr::Mul(Box::new(a), Box::new(b))),
        (Some(0.0), _) => Expr::Const(0.0),
        (_, Some(0.0)) => Expr::Const(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != 0.0 => fold(x / y, || Expr::Div(Box::new(a), Box::new(b))),
        (_, Some(1.0)) => a,
        (Some(0.0), _) => Expr::Const(0.0),
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (_, Some(0.0)) => Expr::Const(1.0),
        (_, Some(1.0)) => a,
        (Some(1.0), _) => Expr::Const(1.0),
        (Some(x), Some(y)) => match super::real_pow(x, y) {
            Ok(v) if v.is_finite() => Expr::Const(v),
            _ => Expr::Pow(Box::new(a), Box::new(b)),
        },
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn call(func: Func, arg: Expr) -> Expr {
    Expr::Call(func, Box::new(arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn deriv(src: &str, vars: &[&str], wrt: &str) -> String {
        let e = parse_expression(src, vars).unwrap();
        differentiate(&e, wrt).unwrap().to_string()
    }

    #[test]
    fn power_rule_folds_to_two_v() {
        assert_eq!(deriv("v^2", &["t", "y", "v"], "v"), "2*v");
    }

    #[test]
    fn product_and_quotient_gradients() {
        let z = ["z1", "z2"];
        assert_eq!(deriv("z1*z2", &z, "z1"), "z2");
        assert_eq!(deriv("z1*z2", &z, "z2"), "z1");
        assert_eq!(deriv("z1/z2", &z, "z1"), "1/z2");
        assert_eq!(deriv("z1/z2", &z, "z2"), "-(z1/z2^2)");
    }

    #[test]
    fn variable_free_tree_differentiates_to_zero() {
        let e = parse_expression("3*sqrt(2)+t^2", &["t", "v"]).unwrap();
        assert_eq!(differentiate(&e, "v").unwrap(), Expr::Const(0.0));
    }

    #[test]
    fn weighted_integrand_partials() {
        let tyv = ["t", "y", "v"];
        assert_eq!(deriv("t^(1/2)*v", &tyv, "v"), "t^(1/2)");
        assert_eq!(deriv("t^(1/2)*v", &tyv, "y"), "0");
    }

    #[test]
    fn gamma_of_variable_is_rejected() {
        let e = parse_expression("gamma(v)", &["v"]).unwrap();
        assert!(differentiate(&e, "v").is_err());
        let e = parse_expression("gamma(2)*v", &["v"]).unwrap();
        assert!(differentiate(&e, "v").is_ok());
    }
}
