//! Necessary-condition residuals for composition problems.
//!
//! Along a candidate `x` the Euler–Lagrange residual is
//!
//! ```text
//! R(t) = Σ_i α_i H'_i(F) (b-t)^(α_i-1) (f_iy⟨x⟩_i(t) - D^(α_i)[f_iv⟨x⟩_i](t))
//! ```
//!
//! and a free endpoint `c ∈ {a, b}` carries the defect
//! `Σ_i α_i! H'_i(F) f_iv⟨x⟩_i(c)`. Both vanish at a stationary candidate.
//! The product and quotient forms are computed from their own explicit
//! formulas so they can be cross-checked against the generic route.

mod structural;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fraccore::{alpha_factorial, frac_derivative_sampled, QuadratureConfig, SampledFunction};
use crate::functional::{eval_term_functional, eval_tyv, Boundary, CompositionProblem, LagrangianTerm};
use crate::trajectory::FracPowerSeries;

use structural::{to_series, Substitution};

pub const DEFAULT_GRID_SIZE: usize = 1000;
pub const DEFAULT_EPS_FRACTION: f64 = 1e-3;
pub const DEFAULT_SAMPLED_INTERVALS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualOptions {
    pub grid_size: usize,
    /// Distance kept from `b`; `None` means `(b-a)·1e-3`.
    pub eps: Option<f64>,
    pub quadrature: QuadratureConfig,
    /// Fine-grid intervals for the L1 fallback.
    pub sampled_intervals: usize,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID_SIZE,
            eps: None,
            quadrature: QuadratureConfig::default(),
            sampled_intervals: DEFAULT_SAMPLED_INTERVALS,
        }
    }
}

impl ResidualOptions {
    fn resolve_eps(&self, a: f64, b: f64) -> Result<f64> {
        let eps = self.eps.unwrap_or((b - a) * DEFAULT_EPS_FRACTION);
        if !(eps > 0.0 && eps < b - a) {
            return Err(Error::invalid(format!("eps must lie in (0, b-a), got {eps}")));
        }
        if self.grid_size < 2 {
            return Err(Error::invalid("residual grid needs at least 2 points"));
        }
        Ok(eps)
    }
}

/// How `D^α[f_v⟨x⟩]` was obtained for a term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DerivativeScheme {
    /// `f_v⟨x⟩` reduced to a power series; power rule applied termwise.
    Exact,
    /// L1 scheme on a uniform grid of the given step.
    Sampled { step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub grid: Vec<f64>,
    /// `R(t)` on `grid`.
    pub residual: Vec<f64>,
    pub sup_norm: f64,
    /// Trapezoidal `∫|R| dt` over the grid.
    pub l1_norm: f64,
    /// `f_iy - D^(α_i) f_iv` per term, unweighted.
    pub term_defects: Vec<Vec<f64>>,
    /// The same defects multiplied by their weight in `R`.
    pub weighted_term_defects: Vec<Vec<f64>>,
    pub natural_left: Option<f64>,
    pub natural_right: Option<f64>,
    pub functionals: Vec<f64>,
    /// Multipliers in front of each term's `(b-t)^(α_i-1)` defect (`H'_i` on the generic route).
    pub multipliers: Vec<f64>,
    pub eps: f64,
    pub grid_size: usize,
    pub schemes: Vec<DerivativeScheme>,
}

impl ResidualReport {
    /// Largest absolute free-endpoint defect, 0 if both ends are fixed.
    pub fn natural_sup(&self) -> f64 {
        [self.natural_left, self.natural_right]
            .into_iter()
            .flatten()
            .fold(0.0, |acc, d| acc.max(d.abs()))
    }
}

/// Per-term data shared by all residual routes.
struct TermProfile {
    alpha: f64,
    defects: Vec<f64>,
    scheme: DerivativeScheme,
}

fn check_base(x: &FracPowerSeries, a: f64) -> Result<()> {
    if x.base() != a {
        return Err(Error::invalid(format!(
            "trajectory base point {} differs from the interval start {a}",
            x.base()
        )));
    }
    Ok(())
}

fn uniform_grid(a: f64, end: f64, n: usize) -> Vec<f64> {
    let h = (end - a) / (n - 1) as f64;
    (0..n).map(|j| if j == n - 1 { end } else { a + h * j as f64 }).collect()
}

fn term_profile(
    term: &LagrangianTerm,
    x: &FracPowerSeries,
    a: f64,
    b: f64,
    grid: &[f64],
    sampled_intervals: usize,
) -> Result<TermProfile> {
    let alpha = term.alpha();
    let velocity = x.frac_derivative(alpha)?;
    let substitution = Substitution { a, y: x, v: &velocity };

    let exact = to_series(term.partial_v(), &substitution)
        .filter(|g| !g.is_singular())
        .map(|g| g.frac_derivative(alpha))
        .transpose()?;

    let (scheme, derivative): (DerivativeScheme, Box<dyn Fn(f64) -> Result<f64>>) = match exact {
        Some(series) => (DerivativeScheme::Exact, Box::new(move |t| series.eval(t))),
        None => {
            let sampled = SampledFunction::try_from_fn(
                |t| {
                    let value = eval_tyv(term.partial_v(), t, x.eval(t)?, velocity.eval(t)?)?;
                    if value.is_finite() {
                        Ok(value)
                    } else {
                        Err(Error::Singular(format!(
                            "f_v is not finite at t = {t}; sampled differentiation needs a bounded x^({alpha})"
                        )))
                    }
                },
                a,
                b,
                sampled_intervals,
            )?;
            let step = sampled.step();
            let d = frac_derivative_sampled(&sampled, alpha)?;
            (DerivativeScheme::Sampled { step }, Box::new(move |t| Ok(d.value_at(t))))
        }
    };

    let mut defects = Vec::with_capacity(grid.len());
    for &t in grid {
        let f_y = eval_tyv(term.partial_y(), t, x.eval(t)?, velocity.eval(t)?)?;
        let value = f_y - derivative(t)?;
        if !value.is_finite() {
            return Err(Error::Singular(format!("Euler–Lagrange defect is not finite at t = {t}")));
        }
        defects.push(value);
    }
    Ok(TermProfile { alpha, defects, scheme })
}

fn assemble(
    grid: Vec<f64>,
    b: f64,
    profiles: Vec<TermProfile>,
    multipliers: Vec<f64>,
    functionals: Vec<f64>,
    natural: (Option<f64>, Option<f64>),
    eps: f64,
) -> ResidualReport {
    let weighted: Vec<Vec<f64>> = profiles
        .iter()
        .zip(&multipliers)
        .map(|(p, m)| {
            grid.iter()
                .zip(&p.defects)
                .map(|(t, d)| p.alpha * m * (b - t).powf(p.alpha - 1.0) * d)
                .collect()
        })
        .collect();
    let residual: Vec<f64> = (0..grid.len()).map(|j| weighted.iter().map(|w| w[j]).sum()).collect();
    let sup_norm = residual.iter().fold(0.0_f64, |acc, r| acc.max(r.abs()));
    let l1_norm = grid
        .windows(2)
        .zip(residual.windows(2))
        .map(|(t, r)| 0.5 * (t[1] - t[0]) * (r[0].abs() + r[1].abs()))
        .sum();
    ResidualReport {
        grid_size: grid.len(),
        grid,
        residual,
        sup_norm,
        l1_norm,
        term_defects: profiles.iter().map(|p| p.defects.clone()).collect(),
        weighted_term_defects: weighted,
        natural_left: natural.0,
        natural_right: natural.1,
        functionals,
        multipliers,
        eps,
        schemes: profiles.iter().map(|p| p.scheme).collect(),
    }
}

fn velocity_partial_at(term: &LagrangianTerm, x: &FracPowerSeries, t: f64) -> Result<f64> {
    let velocity = x.frac_derivative(term.alpha())?;
    let v = velocity.eval(t)?;
    let value = eval_tyv(term.partial_v(), t, x.eval(t)?, v)?;
    if !value.is_finite() {
        return Err(Error::Singular(format!("f_v is not finite at the endpoint t = {t}")));
    }
    Ok(value)
}

/// Free-endpoint defects `Σ_i α_i! · m_i · f_iv⟨x⟩_i(c)` for given multipliers.
fn endpoint_defects(
    terms: &[&LagrangianTerm],
    multipliers: &[f64],
    x: &FracPowerSeries,
    (a, b): (f64, f64),
    boundary: Boundary,
) -> Result<(Option<f64>, Option<f64>)> {
    let at = |t: f64| -> Result<f64> {
        let mut sum = 0.0;
        for (term, m) in terms.iter().zip(multipliers) {
            sum += alpha_factorial(term.alpha())? * m * velocity_partial_at(term, x, t)?;
        }
        Ok(sum)
    };
    let left = if boundary.left.is_none() { Some(at(a)?) } else { None };
    let right = if boundary.right.is_none() { Some(at(b)?) } else { None };
    Ok((left, right))
}

fn functionals_of(
    terms: &[&LagrangianTerm],
    x: &FracPowerSeries,
    (a, b): (f64, f64),
    q: &QuadratureConfig,
) -> Result<Vec<f64>> {
    terms.iter().map(|term| eval_term_functional(term, x, a, b, q)).collect()
}

/// Euler–Lagrange residual of `p` along `x` on a uniform grid over
/// `[a, b-ε]`, plus the natural-boundary defects for free endpoints.
pub fn el_residual(p: &CompositionProblem, x: &FracPowerSeries, opts: &ResidualOptions) -> Result<ResidualReport> {
    let (a, b) = p.interval();
    check_base(x, a)?;
    let eps = opts.resolve_eps(a, b)?;
    let terms: Vec<&LagrangianTerm> = p.terms().iter().collect();
    let functionals = functionals_of(&terms, x, (a, b), &opts.quadrature)?;
    let gradient = p.outer_gradient_at(&functionals)?;
    let grid = uniform_grid(a, b - eps, opts.grid_size);
    let profiles = terms
        .iter()
        .map(|term| term_profile(term, x, a, b, &grid, opts.sampled_intervals))
        .collect::<Result<Vec<_>>>()?;
    let natural = endpoint_defects(&terms, &gradient, x, (a, b), p.boundary())?;
    Ok(assemble(grid, b, profiles, gradient, functionals, natural, eps))
}

/// Natural-boundary defects only; `None` for endpoints the problem fixes.
pub fn natural_bc_defects(
    p: &CompositionProblem,
    x: &FracPowerSeries,
    q: &QuadratureConfig,
) -> Result<(Option<f64>, Option<f64>)> {
    let (a, b) = p.interval();
    check_base(x, a)?;
    let boundary = p.boundary();
    if boundary.left.is_some() && boundary.right.is_some() {
        return Ok((None, None));
    }
    let terms: Vec<&LagrangianTerm> = p.terms().iter().collect();
    let functionals = functionals_of(&terms, x, (a, b), q)?;
    let gradient = p.outer_gradient_at(&functionals)?;
    endpoint_defects(&terms, &gradient, x, (a, b), boundary)
}

/// Residual of `F_1·F_2` from the product formula
/// `α_1 F_2 (b-t)^(α_1-1) d_1 + α_2 F_1 (b-t)^(α_2-1) d_2`, with natural
/// defects `α_1! F_2 f_1v + α_2! F_1 f_2v`.
pub fn corollary_residual_product(
    first: &LagrangianTerm,
    second: &LagrangianTerm,
    x: &FracPowerSeries,
    interval: (f64, f64),
    boundary: Boundary,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    two_term_residual(first, second, x, interval, boundary, opts, |f| Ok(vec![f[1], f[0]]))
}

/// Residual of `F_1/F_2` from the quotient formula with `Q = F_1/F_2`:
/// `α_1 (b-t)^(α_1-1) d_1 - α_2 Q (b-t)^(α_2-1) d_2`, and natural defects
/// `α_1! f_1v - α_2! Q f_2v`.
///
/// Both are divided by `F_2` so that samples coincide with the generic
/// residual of `H = z1/z2`; the zero set is the same either way.
pub fn corollary_residual_quotient(
    first: &LagrangianTerm,
    second: &LagrangianTerm,
    x: &FracPowerSeries,
    interval: (f64, f64),
    boundary: Boundary,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    two_term_residual(first, second, x, interval, boundary, opts, |f| {
        if f[1] == 0.0 {
            return Err(Error::domain("quotient functional with F_2 = 0"));
        }
        let q = f[0] / f[1];
        Ok(vec![1.0 / f[1], -q / f[1]])
    })
}

fn two_term_residual<M>(
    first: &LagrangianTerm,
    second: &LagrangianTerm,
    x: &FracPowerSeries,
    (a, b): (f64, f64),
    boundary: Boundary,
    opts: &ResidualOptions,
    multipliers: M,
) -> Result<ResidualReport>
where
    M: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if !(a < b) {
        return Err(Error::invalid(format!("need a < b, got [{a}, {b}]")));
    }
    check_base(x, a)?;
    let eps = opts.resolve_eps(a, b)?;
    let terms = [first, second];
    let functionals = functionals_of(&terms, x, (a, b), &opts.quadrature)?;
    let m = multipliers(&functionals)?;
    let grid = uniform_grid(a, b - eps, opts.grid_size);
    let profiles = terms
        .iter()
        .map(|term| term_profile(term, x, a, b, &grid, opts.sampled_intervals))
        .collect::<Result<Vec<_>>>()?;
    let natural = endpoint_defects(&terms, &m, x, (a, b), boundary)?;
    Ok(assemble(grid, b, profiles, m, functionals, natural, eps))
}
