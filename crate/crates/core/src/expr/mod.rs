//! A small arithmetic expression language for integrands `f(t, y, v)` and
//! outer functions `H(z1, ..., zn)`.
//!
//! Expressions are parsed against a declared variable set, can be evaluated
//! on real bindings, and can be differentiated symbolically. Printing an
//! expression produces text that parses back to the same tree.

mod derivative;
mod parser;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

pub use derivative::differentiate;
pub use parser::parse_expression;

/// Built-in functions callable as `name(arg)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Gamma,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Gamma => "gamma",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "gamma" => Func::Gamma,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> Result<f64> {
        match self {
            Func::Sqrt if x < 0.0 => Err(Error::domain(format!("sqrt of negative value {x}"))),
            Func::Sqrt => Ok(x.sqrt()),
            Func::Exp => Ok(x.exp()),
            Func::Ln if x <= 0.0 => Err(Error::domain(format!("ln of non-positive value {x}"))),
            Func::Ln => Ok(x.ln()),
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
            Func::Gamma => crate::fraccore::gamma(x)
                .map_err(|_| Error::domain(format!("gamma of non-positive value {x}"))),
        }
    }
}

/// Parsed expression tree. Values are immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_const(&self, value: f64) -> bool {
        matches!(self, Expr::Const(c) if *c == value)
    }

    /// True when `name` occurs anywhere in the tree.
    pub fn depends_on(&self, name: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => v == name,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on(name) || b.depends_on(name)
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(name),
        }
    }

    /// Names of all variables occurring in the tree.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_variables(out),
        }
    }

    pub fn evaluate(&self, bindings: &HashMap<String, f64>) -> Result<f64> {
        self.eval_with(&|name| bindings.get(name).copied())
    }

    /// Evaluates with an arbitrary variable lookup. Used on hot paths where
    /// building a map per point would dominate.
    pub fn eval_with<F>(&self, lookup: &F) -> Result<f64>
    where
        F: Fn(&str) -> Option<f64>,
    {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(name) => {
                lookup(name).ok_or_else(|| Error::UnknownIdentifier(name.clone()))?
            }
            Expr::Add(a, b) => a.eval_with(lookup)? + b.eval_with(lookup)?,
            Expr::Sub(a, b) => a.eval_with(lookup)? - b.eval_with(lookup)?,
            Expr::Mul(a, b) => a.eval_with(lookup)? * b.eval_with(lookup)?,
            Expr::Div(a, b) => {
                let num = a.eval_with(lookup)?;
                let den = b.eval_with(lookup)?;
                if den == 0.0 {
                    return Err(Error::domain("division by zero"));
                }
                num / den
            }
            Expr::Pow(a, b) => real_pow(a.eval_with(lookup)?, b.eval_with(lookup)?)?,
            Expr::Neg(a) => -a.eval_with(lookup)?,
            Expr::Call(func, a) => func.apply(a.eval_with(lookup)?)?,
        };
        if value.is_nan() {
            return Err(Error::domain(format!("undefined value in {self}")));
        }
        Ok(value)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

/// Real power. Negative bases need an integer exponent.
pub(crate) fn real_pow(base: f64, exponent: f64) -> Result<f64> {
    if base == 0.0 && exponent < 0.0 {
        return Err(Error::domain("zero raised to a negative power"));
    }
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        return Ok(base.powi(exponent as i32));
    }
    if base < 0.0 {
        return Err(Error::domain(format!(
            "negative base {base} with non-integer exponent {exponent}"
        )));
    }
    Ok(base.powf(exponent))
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Parenthesize so that re-parsing rebuilds the same tree, not just an
        // equal value. Folded negative constants come back as Neg(Const).
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "({c})"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, prec) = match self {
                    Expr::Add(..) => ("+", 1),
                    Expr::Sub(..) => ("-", 1),
                    Expr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                write_child(f, a, a.precedence() < prec)?;
                f.write_str(op)?;
                write_child(f, b, b.precedence() <= prec)
            }
            Expr::Pow(a, b) => {
                write_child(f, a, a.precedence() <= 4)?;
                f.write_str("^")?;
                let simple = matches!(**b, Expr::Var(_) | Expr::Call(..) | Expr::Const(_));
                write_child(f, b, !simple)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, a.precedence() < 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
