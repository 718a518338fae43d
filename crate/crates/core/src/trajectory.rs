//! Candidate trajectories as finite fractional power series
//! `x(t) = Σ c_k (t-a)^(e_k)`.
//!
//! The class is closed under the Jumarie derivative (power rule applied
//! termwise), which is what makes exact residuals possible.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fraccore::frac_derivative_power;

/// Exponents closer than this are merged.
pub const EXPONENT_MERGE_TOL: f64 = 1e-12;

/// Default number of samples used by [`FracPowerSeries::norm`].
pub const NORM_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

/// `Σ c_k (t-a)^(e_k)` with strictly increasing exponents and no zero
/// coefficients. Negative exponents only arise from differentiating terms
/// with `0 < e < α`; such series are flagged by [`is_singular`].
///
/// [`is_singular`]: FracPowerSeries::is_singular
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct FracPowerSeries {
    base: f64,
    terms: Vec<PowerTerm>,
}

/// On-disk form: `{"base": a, "terms": [[c, e], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesRepr {
    base: f64,
    terms: Vec<(f64, f64)>,
}

impl TryFrom<SeriesRepr> for FracPowerSeries {
    type Error = Error;

    fn try_from(repr: SeriesRepr) -> Result<Self> {
        FracPowerSeries::new(repr.base, repr.terms)
    }
}

impl From<FracPowerSeries> for SeriesRepr {
    fn from(series: FracPowerSeries) -> Self {
        let terms = series.terms.iter().map(|t| (t.coefficient, t.exponent)).collect();
        SeriesRepr { base: series.base, terms }
    }
}

impl FracPowerSeries {
    pub fn new<I>(base: f64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        if !base.is_finite() {
            return Err(Error::invalid(format!("base point must be finite, got {base}")));
        }
        let mut raw = Vec::new();
        for (coefficient, exponent) in terms {
            if !coefficient.is_finite() || !exponent.is_finite() {
                return Err(Error::invalid(format!(
                    "term ({coefficient}, {exponent}) is not finite"
                )));
            }
            raw.push(PowerTerm { coefficient, exponent });
        }
        Ok(Self::normalized(base, raw))
    }

    pub fn zero(base: f64) -> Self {
        Self { base, terms: Vec::new() }
    }

    fn normalized(base: f64, mut raw: Vec<PowerTerm>) -> Self {
        raw.sort_by(|x, y| x.exponent.total_cmp(&y.exponent));
        let mut terms: Vec<PowerTerm> = Vec::with_capacity(raw.len());
        for term in raw {
            match terms.last_mut() {
                Some(last) if (term.exponent - last.exponent).abs() <= EXPONENT_MERGE_TOL => {
                    last.coefficient += term.coefficient;
                }
                _ => terms.push(term),
            }
        }
        terms.retain(|t| t.coefficient != 0.0);
        Self { base, terms }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when some term has a negative exponent, i.e. the series blows
    /// up at the base point.
    pub fn is_singular(&self) -> bool {
        self.terms.iter().any(|t| t.exponent < 0.0)
    }

    /// Value at `t ≥ a`, with `0^0 = 1`. Singular series evaluate to an
    /// infinity at `t = a`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < self.base {
            return Err(Error::invalid(format!(
                "t = {t} lies left of the base point {}",
                self.base
            )));
        }
        let d = t - self.base;
        Ok(self
            .terms
            .iter()
            .map(|term| term.coefficient * power(d, term.exponent))
            .sum())
    }

    /// Exact Jumarie derivative of order `α` by the termwise power rule.
    ///
    /// Terms with `0 < e < α` produce negative exponents; the result is then
    /// singular at `a` (see [`is_singular`](Self::is_singular)). Differentiating
    /// an already singular series is an error since `x(a)` is not finite.
    pub fn frac_derivative(&self, alpha: f64) -> Result<FracPowerSeries> {
        if self.is_singular() {
            return Err(Error::Singular(
                "cannot differentiate a series that is infinite at its base point".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let (factor, exponent) = frac_derivative_power(term.exponent, alpha)?;
            if factor != 0.0 {
                out.push(PowerTerm { coefficient: term.coefficient * factor, exponent });
            }
        }
        Ok(Self::normalized(self.base, out))
    }

    /// Product of two series with the same base point.
    pub fn product(&self, other: &FracPowerSeries) -> Result<FracPowerSeries> {
        self.check_base(other)?;
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                out.push(PowerTerm {
                    coefficient: x.coefficient * y.coefficient,
                    exponent: x.exponent + y.exponent,
                });
            }
        }
        Ok(Self::normalized(self.base, out))
    }

    pub fn scale(&self, factor: f64) -> FracPowerSeries {
        let terms = self
            .terms
            .iter()
            .map(|t| PowerTerm { coefficient: t.coefficient * factor, ..*t })
            .collect();
        Self::normalized(self.base, terms)
    }

    pub fn try_add(&self, other: &FracPowerSeries) -> Result<FracPowerSeries> {
        self.check_base(other)?;
        let terms = self.terms.iter().chain(&other.terms).copied().collect();
        Ok(Self::normalized(self.base, terms))
    }

    fn check_base(&self, other: &FracPowerSeries) -> Result<()> {
        if self.base != other.base {
            return Err(Error::invalid(format!(
                "base points differ: {} vs {}",
                self.base, other.base
            )));
        }
        Ok(())
    }

    /// The norm `max|x| + Σ_i max|x^(α_i)|` over `[a, b]`.
    ///
    /// Each maximum is located on a dense grid of `NORM_SAMPLES` points and
    /// refined by golden-section search on the bracketing cell. A derivative
    /// with a singular term makes the norm infinite.
    pub fn norm(&self, orders: &[f64], a: f64, b: f64) -> Result<f64> {
        if !(b > a) || a < self.base {
            return Err(Error::invalid(format!("bad interval [{a}, {b}] for base {}", self.base)));
        }
        let mut total = max_abs_on(self, a, b)?;
        for &alpha in orders {
            let d = self.frac_derivative(alpha)?;
            if d.is_singular() && a == self.base {
                return Ok(f64::INFINITY);
            }
            total += max_abs_on(&d, a, b)?;
        }
        Ok(total)
    }
}

fn power(d: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else if exponent == 1.0 {
        d
    } else {
        d.powf(exponent)
    }
}

fn max_abs_on(x: &FracPowerSeries, a: f64, b: f64) -> Result<f64> {
    if x.is_empty() {
        return Ok(0.0);
    }
    let f = |t: f64| x.eval(t).map(f64::abs);
    let n = NORM_SAMPLES;
    let h = (b - a) / (n - 1) as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for j in 0..n {
        let t = if j == n - 1 { b } else { a + h * j as f64 };
        let v = f(t)?;
        if v > best.1 {
            best = (j, v);
        }
    }
    let lo = a + h * best.0.saturating_sub(1) as f64;
    let hi = (a + h * (best.0 + 1) as f64).min(b);
    Ok(best.1.max(golden_section_max(f, lo, hi)?))
}

fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..80 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(f1.max(f2).max(f(lo)?).max(f(hi)?))
}

/// Builds a series from a basis of exponents, honoring whichever endpoint
/// values are given.
///
/// Layout of `free`: the constant term first when `left` is absent, then
/// the basis coefficients in order, minus the last one when `right` is
/// given (it is solved from `x(b) = right`). A given `left` becomes the
/// constant term.
pub fn constrain_endpoints(
    free: &[f64],
    exponents: &[f64],
    a: f64,
    b: f64,
    left: Option<f64>,
    right: Option<f64>,
) -> Result<FracPowerSeries> {
    if !(b > a) {
        return Err(Error::invalid(format!("need a < b, got [{a}, {b}]")));
    }
    for (i, e) in exponents.iter().enumerate() {
        if !(*e > 0.0) || !e.is_finite() {
            return Err(Error::invalid(format!("basis exponent {e} must be positive")));
        }
        if exponents[..i].iter().any(|o| (o - e).abs() <= EXPONENT_MERGE_TOL) {
            return Err(Error::invalid(format!("basis exponent {e} repeated")));
        }
    }
    let expected = free_dimension(exponents.len(), left.is_some(), right.is_some())?;
    if free.len() != expected {
        return Err(Error::invalid(format!(
            "expected {expected} free coefficient(s) for {} basis exponent(s), got {}",
            exponents.len(),
            free.len()
        )));
    }
    let (constant, rest) = match left {
        Some(value) => (value, free),
        None => (free[0], &free[1..]),
    };
    let mut coefficients = rest.to_vec();
    if let Some(target) = right {
        let span = b - a;
        let last = exponents.len() - 1;
        let partial: f64 = coefficients
            .iter()
            .zip(exponents)
            .map(|(c, e)| c * span.powf(*e))
            .sum();
        coefficients.push((target - constant - partial) / span.powf(exponents[last]));
    }
    let terms = std::iter::once((constant, 0.0)).chain(coefficients.into_iter().zip(exponents.iter().copied()));
    FracPowerSeries::new(a, terms)
}

/// Number of free coefficients [`constrain_endpoints`] expects.
pub fn free_dimension(basis_len: usize, left_fixed: bool, right_fixed: bool) -> Result<usize> {
    let dof = basis_len + usize::from(!left_fixed);
    if right_fixed && basis_len == 0 {
        return Err(Error::invalid("a fixed right endpoint needs at least one basis exponent"));
    }
    Ok(dof - usize::from(right_fixed))
}

impl fmt::Display for FracPowerSeries {
    /// `0.3 + 1.2*t^0.5 - 0.7*t^1.5`, with `(t-a)` in place of `t` when `a != 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let var = if self.base == 0.0 { "t".to_string() } else { format!("(t-{})", self.base) };
        for (i, term) in self.terms.iter().enumerate() {
            let c = term.coefficient;
            match (i, c < 0.0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if term.exponent == 0.0 {
                write!(f, "{}", c.abs())?;
            } else {
                write!(f, "{}*{var}^{}", c.abs(), term.exponent)?;
            }
        }
        Ok(())
    }
}

impl Add for &FracPowerSeries {
    type Output = FracPowerSeries;

    /// Panics when the base points differ; use `try_add` otherwise.
    fn add(self, rhs: &FracPowerSeries) -> FracPowerSeries {
        self.try_add(rhs).expect("series base points differ")
    }
}

impl Neg for &FracPowerSeries {
    type Output = FracPowerSeries;

    fn neg(self) -> FracPowerSeries {
        self.scale(-1.0)
    }
}

impl Sub for &FracPowerSeries {
    type Output = FracPowerSeries;

    fn sub(self, rhs: &FracPowerSeries) -> FracPowerSeries {
        self + &(-rhs)
    }
}

impl Mul<f64> for &FracPowerSeries {
    type Output = FracPowerSeries;

    fn mul(self, rhs: f64) -> FracPowerSeries {
        self.scale(rhs)
    }
}
