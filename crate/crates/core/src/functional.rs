//! Inner functionals `F_i[x] = ∫_a^b f_i(t, x, x^(α_i)) (dt)^(α_i)` and the
//! composition `L[x] = H(F_1, ..., F_n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{differentiate, parse_expression, Expr};
use crate::fraccore::{try_frac_integral, QuadratureConfig};
use crate::trajectory::FracPowerSeries;

/// Variables available inside an integrand: time, state, fractional velocity.
pub const TERM_VARIABLES: [&str; 3] = ["t", "y", "v"];

/// One integrand `f(t, y, v)` with its order and symbolic partials.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianTerm {
    alpha: f64,
    f: Expr,
    f_y: Expr,
    f_v: Expr,
}

impl LagrangianTerm {
    pub fn new(alpha: f64, source: &str) -> Result<Self> {
        Self::from_expr(alpha, parse_expression(source, &TERM_VARIABLES)?)
    }

    pub fn from_expr(alpha: f64, f: Expr) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("term order must lie in (0, 1], got {alpha}")));
        }
        if let Some(bad) = f.variables().into_iter().find(|v| !TERM_VARIABLES.contains(&v.as_str())) {
            return Err(Error::UnknownIdentifier(bad));
        }
        let f_y = differentiate(&f, "y")?;
        let f_v = differentiate(&f, "v")?;
        Ok(Self { alpha, f, f_y, f_v })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn integrand(&self) -> &Expr {
        &self.f
    }

    pub fn partial_y(&self) -> &Expr {
        &self.f_y
    }

    pub fn partial_v(&self) -> &Expr {
        &self.f_v
    }
}

/// Evaluates an integrand-style expression at `(t, y, v)`.
pub(crate) fn eval_tyv(expr: &Expr, t: f64, y: f64, v: f64) -> Result<f64> {
    expr.eval_with(&|name| match name {
        "t" => Some(t),
        "y" => Some(y),
        "v" => Some(v),
        _ => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    Minimize,
    Maximize,
}

/// Endpoint values; `None` leaves that end free.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<f64>,
}

impl Boundary {
    pub fn fixed(left: f64, right: f64) -> Self {
        Self { left: Some(left), right: Some(right) }
    }

    pub fn free() -> Self {
        Self::default()
    }
}

/// `H(∫f_1 (dt)^α_1, ..., ∫f_n (dt)^α_n)` on `[a, b]` with optional
/// endpoint values.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionProblem {
    a: f64,
    b: f64,
    terms: Vec<LagrangianTerm>,
    outer: Expr,
    outer_grad: Vec<Expr>,
    boundary: Boundary,
    sense: Sense,
}

/// `z1, ..., zn`.
pub fn outer_variables(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("z{i}")).collect()
}

impl CompositionProblem {
    pub fn new(
        interval: (f64, f64),
        terms: Vec<LagrangianTerm>,
        outer: Expr,
        boundary: Boundary,
        sense: Sense,
    ) -> Result<Self> {
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("need a < b, got [{a}, {b}]")));
        }
        if terms.is_empty() {
            return Err(Error::invalid("a problem needs at least one term"));
        }
        let names = outer_variables(terms.len());
        for used in outer.variables() {
            if !names.contains(&used) {
                return Err(arity_error(&used, terms.len()).unwrap_or(Error::UnknownIdentifier(used)));
            }
        }
        let outer_grad = names
            .iter()
            .map(|z| differentiate(&outer, z))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { a, b, terms, outer, outer_grad, boundary, sense })
    }

    /// Parses `H` over `z1..zn` where `n = terms.len()`.
    pub fn parse(
        interval: (f64, f64),
        terms: Vec<LagrangianTerm>,
        outer: &str,
        boundary: Boundary,
        sense: Sense,
    ) -> Result<Self> {
        let names = outer_variables(terms.len());
        let h = parse_expression(outer, &names).map_err(|err| match err {
            Error::UnknownIdentifier(name) => arity_error(&name, terms.len()).unwrap_or(Error::UnknownIdentifier(name)),
            other => other,
        })?;
        Self::new(interval, terms, h, boundary, sense)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn terms(&self) -> &[LagrangianTerm] {
        &self.terms
    }

    pub fn outer(&self) -> &Expr {
        &self.outer
    }

    pub fn outer_gradient(&self) -> &[Expr] {
        &self.outer_grad
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn orders(&self) -> Vec<f64> {
        self.terms.iter().map(LagrangianTerm::alpha).collect()
    }

    /// Same problem with a different outer function.
    pub fn with_outer(&self, outer: Expr) -> Result<Self> {
        Self::new((self.a, self.b), self.terms.clone(), outer, self.boundary, self.sense)
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        Self { boundary, ..self.clone() }
    }

    pub fn outer_value(&self, functionals: &[f64]) -> Result<f64> {
        self.outer.eval_with(&|name| z_lookup(name, functionals))
    }

    /// `H'_i(F)` for every term.
    pub fn outer_gradient_at(&self, functionals: &[f64]) -> Result<Vec<f64>> {
        self.outer_grad
            .iter()
            .map(|g| g.eval_with(&|name| z_lookup(name, functionals)))
            .collect()
    }
}

fn z_lookup(name: &str, values: &[f64]) -> Option<f64> {
    let index: usize = name.strip_prefix('z')?.parse().ok()?;
    values.get(index.checked_sub(1)?).copied()
}

fn arity_error(name: &str, terms: usize) -> Option<Error> {
    let used: usize = name.strip_prefix('z')?.parse().ok()?;
    (used > terms).then_some(Error::ArityMismatch { terms, used })
}

/// `F_i[x]` for one term.
pub fn eval_term_functional(
    term: &LagrangianTerm,
    x: &FracPowerSeries,
    a: f64,
    b: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    if x.base() != a {
        return Err(Error::invalid(format!(
            "trajectory base point {} differs from the interval start {a}",
            x.base()
        )));
    }
    let velocity = x.frac_derivative(term.alpha)?;
    try_frac_integral(
        |t| eval_tyv(&term.f, t, x.eval(t)?, velocity.eval(t)?),
        a,
        b,
        term.alpha,
        q,
    )
}

/// Value of the composition together with the inner functionals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub objective: f64,
    pub functionals: Vec<f64>,
}

pub fn eval_composition(p: &CompositionProblem, x: &FracPowerSeries, q: &QuadratureConfig) -> Result<Evaluation> {
    let functionals = p
        .terms
        .iter()
        .map(|term| eval_term_functional(term, x, p.a, p.b, q))
        .collect::<Result<Vec<_>>>()?;
    let objective = p.outer_value(&functionals)?;
    Ok(Evaluation { objective, functionals })
}

/// `L = F_1 · F_2`.
pub fn make_product(
    first: LagrangianTerm,
    second: LagrangianTerm,
    interval: (f64, f64),
    boundary: Boundary,
    sense: Sense,
) -> Result<CompositionProblem> {
    CompositionProblem::parse(interval, vec![first, second], "z1*z2", boundary, sense)
}

/// `L = F_1 / F_2`.
pub fn make_quotient(
    first: LagrangianTerm,
    second: LagrangianTerm,
    interval: (f64, f64),
    boundary: Boundary,
    sense: Sense,
) -> Result<CompositionProblem> {
    CompositionProblem::parse(interval, vec![first, second], "z1/z2", boundary, sense)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn root() -> FracPowerSeries {
        FracPowerSeries::new(0.0, [(1.0, 0.5)]).unwrap()
    }

    fn product_problem() -> CompositionProblem {
        make_product(
            LagrangianTerm::new(0.5, "v^2").unwrap(),
            LagrangianTerm::new(0.5, "t^(1/2)*v").unwrap(),
            (0.0, 1.0),
            Boundary::fixed(0.0, 1.0),
            Sense::Minimize,
        )
        .unwrap()
    }

    #[test]
    fn term_functional_examples() {
        let q = QuadratureConfig::default();
        let sq = LagrangianTerm::new(0.5, "v^2").unwrap();
        let f1 = eval_term_functional(&sq, &root(), 0.0, 1.0, &q).unwrap();
        assert!((f1 - PI / 4.0).abs() <= 1e-12, "{f1}");

        let weighted = LagrangianTerm::new(0.5, "t^(1/2)*v").unwrap();
        let f2 = eval_term_functional(&weighted, &root(), 0.0, 1.0, &q).unwrap();
        assert!((f2 - PI.powf(1.5) / 8.0).abs() <= 1e-12, "{f2}");

        let constant = FracPowerSeries::new(0.0, [(4.0, 0.0)]).unwrap();
        assert_eq!(eval_term_functional(&sq, &constant, 0.0, 1.0, &q).unwrap(), 0.0);
    }

    #[test]
    fn composition_at_square_root() {
        let q = QuadratureConfig::default();
        let e = eval_composition(&product_problem(), &root(), &q).unwrap();
        assert!((e.objective - PI.powf(2.5) / 32.0).abs() <= 1e-12);
        assert_eq!(e.functionals.len(), 2);
    }

    #[test]
    fn identity_outer_equals_term_functional() {
        let q = QuadratureConfig::default();
        let term = LagrangianTerm::new(0.5, "v^2").unwrap();
        let p = CompositionProblem::parse((0.0, 1.0), vec![term.clone()], "z1", Boundary::free(), Sense::Minimize)
            .unwrap();
        let e = eval_composition(&p, &root(), &q).unwrap();
        assert_eq!(e.objective, eval_term_functional(&term, &root(), 0.0, 1.0, &q).unwrap());
    }

    #[test]
    fn quotient_of_identical_terms_is_one() {
        let q = QuadratureConfig::default();
        let term = LagrangianTerm::new(0.5, "t*v+y^2").unwrap();
        let p = make_quotient(term.clone(), term, (0.0, 1.0), Boundary::free(), Sense::Minimize).unwrap();
        let x = FracPowerSeries::new(0.0, [(0.3, 0.0), (1.2, 1.0), (-0.4, 1.5)]).unwrap();
        assert_eq!(eval_composition(&p, &x, &q).unwrap().objective, 1.0);
    }

    #[test]
    fn quotient_domain_error_when_denominator_vanishes() {
        let q = QuadratureConfig::default();
        let p = make_quotient(
            LagrangianTerm::new(0.5, "v^2").unwrap(),
            LagrangianTerm::new(0.5, "v").unwrap(),
            (0.0, 1.0),
            Boundary::free(),
            Sense::Minimize,
        )
        .unwrap();
        let constant = FracPowerSeries::new(0.0, [(1.0, 0.0)]).unwrap();
        assert!(matches!(eval_composition(&p, &constant, &q), Err(Error::Domain(_))));
    }

    #[test]
    fn product_and_quotient_gradients() {
        let p = product_problem();
        let g = p.outer_gradient_at(&[2.0, 3.0]).unwrap();
        assert_eq!(g, vec![3.0, 2.0]);
        let quotient = p.with_outer(parse_expression("z1/z2", &["z1", "z2"]).unwrap()).unwrap();
        let g = quotient.outer_gradient_at(&[2.0, 4.0]).unwrap();
        assert_eq!(g, vec![0.25, -0.125]);
    }

    #[test]
    fn arity_mismatch() {
        let terms = vec![
            LagrangianTerm::new(0.5, "v^2").unwrap(),
            LagrangianTerm::new(0.5, "v").unwrap(),
        ];
        let err = CompositionProblem::parse((0.0, 1.0), terms, "z1*z2*z3", Boundary::free(), Sense::Minimize);
        assert_eq!(err.unwrap_err(), Error::ArityMismatch { terms: 2, used: 3 });
    }

    #[test]
    fn term_validation() {
        assert!(LagrangianTerm::new(0.0, "v").is_err());
        assert!(LagrangianTerm::new(1.1, "v").is_err());
        assert_eq!(LagrangianTerm::new(0.5, "w*v").unwrap_err(), Error::UnknownIdentifier("w".into()));
        let t = LagrangianTerm::new(0.5, "y^2*v").unwrap();
        assert_eq!(t.partial_y().to_string(), "2*y*v");
        assert_eq!(t.partial_v().to_string(), "y^2");
    }

    #[test]
    fn quadrature_refinement_is_stable() {
        let p = product_problem();
        let x = FracPowerSeries::new(0.0, [(1.2, 0.5), (-0.7, 1.0), (0.5, 2.0)]).unwrap();
        let coarse = eval_composition(&p, &x, &QuadratureConfig::default()).unwrap();
        let fine = eval_composition(&p, &x, &QuadratureConfig::default().with_panels(16)).unwrap();
        for (c, f) in coarse.functionals.iter().zip(&fine.functionals) {
            assert!((c - f).abs() <= 1e-9);
        }
    }

    #[test]
    fn rough_candidate_is_integrable() {
        // x = t^(1/4) has x^(1/2) ~ t^(-1/4); ∫ v^2 (dt)^(1/2) is still finite
        let q = QuadratureConfig::default();
        let term = LagrangianTerm::new(0.5, "v^2").unwrap();
        let x = FracPowerSeries::new(0.0, [(1.0, 0.25)]).unwrap();
        let got = eval_term_functional(&term, &x, 0.0, 1.0, &q).unwrap();
        // c^2 · (1/2) B(1/2, 1/2) with c = Γ(5/4)/Γ(3/4)
        let c = 0.906_402_477_055_477 / 1.225_416_702_465_178;
        let exact = c * c * 0.5 * PI;
        // the innermost graded panel limits the default layout
        assert!((got - exact).abs() <= 1e-4 * exact, "{got} vs {exact}");
        let deep = QuadratureConfig { graded_levels: 48, ..q };
        let got = eval_term_functional(&term, &x, 0.0, 1.0, &deep).unwrap();
        assert!((got - exact).abs() <= 1e-7 * exact, "{got} vs {exact}");
    }
}
