//! The acceptance suite as data: one row per check, each with the measured
//! value and the bound it is held to.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fraccore::{
    check_integration_by_parts, frac_derivative_power, frac_derivative_sampled, frac_integral,
    QuadratureConfig, SampledFunction,
};
use crate::functional::{eval_term_functional, make_product, make_quotient, Boundary, CompositionProblem, LagrangianTerm, Sense};
use crate::io::sig9;
use crate::solver::{build_q_system, q_algebraic_residual, q_closed_form, q_trajectory, solve_ritz, solve_self_consistent, RitzConfig};
use crate::trajectory::FracPowerSeries;
use crate::variational::{
    corollary_residual_product, corollary_residual_quotient, el_residual, natural_bc_defects, ResidualOptions,
};

/// Seed for the randomized rows (3 and 8).
pub const SELFTEST_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub id: u32,
    pub name: &'static str,
    pub measured: String,
    pub bound: String,
    pub pass: bool,
}

impl std::fmt::Display for Row {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<34} {}  ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.bound
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SelftestOptions {
    /// Replace the default graded layout with this many uniform panels.
    pub panels: Option<usize>,
}

impl SelftestOptions {
    pub fn quadrature(&self) -> QuadratureConfig {
        match self.panels {
            Some(n) => QuadratureConfig::uniform(QuadratureConfig::default().nodes, n),
            None => QuadratureConfig::default(),
        }
    }
}

type Check = fn(&QuadratureConfig) -> Result<(String, String, bool)>;

const CHECKS: [(u32, &str, Check); 12] = [
    (1, "power rule", power_rule),
    (2, "(dt)^alpha integral", frac_integral_values),
    (3, "fundamental theorem", fundamental_theorem),
    (4, "F1 at t^(1/2)", functional_at_root),
    (5, "Q-system Newton", q_system),
    (6, "Ritz on product problem", ritz_product),
    (7, "stationarity of closed form", stationarity),
    (8, "corollary equivalence", corollary_equivalence),
    (9, "classical limit", classical_limit),
    (10, "L1 convergence, f = t", l1_convergence),
    (11, "integration-by-parts defect", integration_by_parts),
    (12, "natural boundary defects", natural_defects),
];

/// Runs every check; errors become failing rows.
pub fn run(opts: &SelftestOptions) -> Vec<Row> {
    let q = opts.quadrature();
    CHECKS.iter().map(|&(id, name, check)| run_one(id, name, check, &q)).collect()
}

/// Runs a single check by number (1-12).
pub fn run_check(id: u32, opts: &SelftestOptions) -> Option<Row> {
    let q = opts.quadrature();
    CHECKS.iter().find(|c| c.0 == id).map(|&(id, name, check)| run_one(id, name, check, &q))
}

fn run_one(id: u32, name: &'static str, check: Check, q: &QuadratureConfig) -> Row {
    match check(q) {
        Ok((measured, bound, pass)) => Row { id, name, measured, bound, pass },
        Err(e) => Row { id, name, measured: format!("error: {e}"), bound: String::new(), pass: false },
    }
}

fn gamma_1_5() -> f64 {
    PI.sqrt() / 2.0
}

fn product_problem(boundary: Boundary) -> Result<CompositionProblem> {
    make_product(
        LagrangianTerm::new(0.5, "v^2")?,
        LagrangianTerm::new(0.5, "t^(1/2)*v")?,
        (0.0, 1.0),
        boundary,
        Sense::Minimize,
    )
}

fn closed_form_candidate() -> Result<FracPowerSeries> {
    let (q1, q2) = q_closed_form();
    q_trajectory(q1, q2)
}

fn random_series(rng: &mut ChaCha8Rng, exponents: &[f64]) -> Result<FracPowerSeries> {
    let n = rng.gen_range(1..=exponents.len());
    let mut terms = vec![(rng.gen_range(-2.0..2.0), 0.0)];
    for _ in 0..n {
        terms.push((rng.gen_range(-2.0..2.0), exponents[rng.gen_range(0..exponents.len())]));
    }
    FracPowerSeries::new(0.0, terms)
}

fn power_rule(_: &QuadratureConfig) -> Result<(String, String, bool)> {
    let (c, e) = frac_derivative_power(0.5, 0.5)?;
    let err = (c - gamma_1_5()).abs();
    Ok((format!("({}, {}) err {:.1e}", sig9(c), sig9(e), err), "1e-7 abs".into(), err <= 1e-7 && e == 0.0))
}

fn frac_integral_values(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let one = frac_integral(|_| 1.0, 0.0, 1.0, 0.5, q)?;
    let four = frac_integral(|_| 1.0, 0.0, 4.0, 0.5, q)?;
    let root = frac_integral(f64::sqrt, 0.0, 1.0, 0.5, q)?;
    let (e1, e4, er) = ((one - 1.0).abs(), (four - 2.0).abs(), (root - PI / 4.0).abs());
    Ok((
        format!("errs {e1:.1e}, {e4:.1e}, {er:.1e}"),
        "1e-10, 1e-10, 1e-8".into(),
        e1 <= 1e-10 && e4 <= 1e-10 && er <= 1e-8,
    ))
}

fn fundamental_theorem(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SELFTEST_SEED);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let x = random_series(&mut rng, &[0.5, 1.0, 1.5, 2.0])?;
        let d = x.frac_derivative(0.5)?;
        let lhs = frac_integral(|t| d.eval(t).unwrap_or(f64::NAN), 0.0, 1.0, 0.5, q)?;
        let rhs = gamma_1_5() * (x.eval(1.0)? - x.eval(0.0)?);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok((format!("max err {worst:.1e} over 20"), "1e-8".into(), worst <= 1e-8))
}

fn functional_at_root(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let x = FracPowerSeries::new(0.0, [(1.0, 0.5)])?;
    let f1 = eval_term_functional(&LagrangianTerm::new(0.5, "v^2")?, &x, 0.0, 1.0, q)?;
    let err = (f1 - PI / 4.0).abs();
    Ok((format!("{} err {err:.1e}", sig9(f1)), "1e-8".into(), err <= 1e-8))
}

fn q_system(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let p = product_problem(Boundary::fixed(0.0, 1.0))?;
    let map = build_q_system(&p, *q)?;
    let root = solve_self_consistent(&map, &[1.0, 1.0], 1e-12, 50)?;
    let (q1, q2) = q_closed_form();
    let err = (root[0] - q1).abs().max((root[1] - q2).abs());
    let algebraic = q_algebraic_residual(q1, q2)?;
    let quadrature = map(&[q1, q2])?;
    let closure = algebraic.iter().chain(&quadrature).fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok((
        format!("({}, {}) err {err:.1e}; closed-form residual {closure:.1e}", sig9(root[0]), sig9(root[1])),
        "1e-6; 1e-9".into(),
        err <= 1e-6 && closure <= 1e-9,
    ))
}

fn ritz_product(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let p = product_problem(Boundary::fixed(0.0, 1.0))?;
    let r = solve_ritz(&p, &RitzConfig { basis: vec![0.5, 1.0], ..Default::default() }, q)?;
    let coefficient = |e: f64| {
        r.trajectory.terms().iter().find(|t| t.exponent == e).map_or(0.0, |t| t.coefficient)
    };
    let (c1, c2) = (coefficient(0.5), coefficient(1.0));
    let err_c = (c1 - 1.534_628_0).abs().max((c2 + 0.534_628_0).abs());
    let err_l = (r.objective - 0.535_143_8).abs();
    let at_root = PI.powf(2.5) / 32.0;
    Ok((
        format!("c = ({}, {}), L = {} < {}", sig9(c1), sig9(c2), sig9(r.objective), sig9(at_root)),
        "coeffs 1e-3, L 1e-4 of (1.5346280, -0.5346280), 0.5351438".into(),
        err_c <= 1e-3 && err_l <= 1e-4 && r.objective < at_root,
    ))
}

fn stationarity(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let p = product_problem(Boundary::fixed(0.0, 1.0))?;
    let x = closed_form_candidate()?;
    let r = el_residual(&p, &x, &ResidualOptions { quadrature: *q, ..Default::default() })?;
    let ends = x.eval(0.0)?.abs().max((x.eval(1.0)? - 1.0).abs());
    Ok((
        format!("sup|R| {:.1e}, endpoint err {ends:.1e}", r.sup_norm),
        "1e-6, 1e-9".into(),
        r.sup_norm <= 1e-6 && ends <= 1e-9,
    ))
}

fn corollary_equivalence(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SELFTEST_SEED + 1);
    let first = LagrangianTerm::new(0.5, "v^2 + t*y")?;
    let second = LagrangianTerm::new(0.75, "1 + y^2 + v^2")?;
    let opts = ResidualOptions { quadrature: *q, ..Default::default() };
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        // exponents >= 2α keep D^α of f_v bounded at a
        let x = random_series(&mut rng, &[1.5, 2.0, 2.5, 3.0])?;
        for quotient in [false, true] {
            let (generic_problem, corollary) = if quotient {
                let p = make_quotient(first.clone(), second.clone(), (0.0, 1.0), Boundary::free(), Sense::Minimize)?;
                (p, corollary_residual_quotient(&first, &second, &x, (0.0, 1.0), Boundary::free(), &opts)?)
            } else {
                let p = make_product(first.clone(), second.clone(), (0.0, 1.0), Boundary::free(), Sense::Minimize)?;
                (p, corollary_residual_product(&first, &second, &x, (0.0, 1.0), Boundary::free(), &opts)?)
            };
            let generic = el_residual(&generic_problem, &x, &opts)?;
            let pointwise = generic.residual.iter().zip(&corollary.residual).map(|(g, c)| (g - c).abs());
            let natural = [
                (generic.natural_left, corollary.natural_left),
                (generic.natural_right, corollary.natural_right),
            ]
            .into_iter()
            .map(|(g, c)| (g.unwrap_or(f64::NAN) - c.unwrap_or(f64::NAN)).abs());
            worst = pointwise.chain(natural).fold(worst, |m, d| if d.is_nan() { f64::INFINITY } else { m.max(d) });
        }
    }
    Ok((format!("max pointwise diff {worst:.1e} over 20 x 2"), "1e-10".into(), worst <= 1e-10))
}

fn classical_limit(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let p = CompositionProblem::parse(
        (0.0, 1.0),
        vec![LagrangianTerm::new(1.0, "v^2")?],
        "z1",
        Boundary::fixed(0.0, 1.0),
        Sense::Minimize,
    )?;
    let r = solve_ritz(&p, &RitzConfig { basis: vec![1.0, 2.0, 3.0], ..Default::default() }, q)?;
    let coefficient_err = r
        .trajectory
        .terms()
        .iter()
        .map(|t| if t.exponent == 1.0 { (t.coefficient - 1.0).abs() } else { t.coefficient.abs() })
        .fold(0.0_f64, f64::max)
        .max(if r.trajectory.terms().iter().any(|t| t.exponent == 1.0) { 0.0 } else { 1.0 });

    // f_y - d/dt f_v = -2 x'' by central differences of f_v = 2 x'
    let x = &r.trajectory;
    let dx = x.frac_derivative(1.0)?;
    let h = 1e-4;
    let mut oracle_gap = 0.0_f64;
    for (t, value) in r.residual.grid.iter().zip(&r.residual.residual) {
        let (lo, hi) = ((t - h).max(0.0), t + h);
        let fd = -(2.0 * dx.eval(hi)? - 2.0 * dx.eval(lo)?) / (hi - lo);
        oracle_gap = oracle_gap.max((fd - value).abs());
    }
    Ok((
        format!(
            "coeff err {coefficient_err:.1e}, sup|R| {:.1e}, oracle gap {oracle_gap:.1e}",
            r.residual.sup_norm
        ),
        "1e-6, 1e-8, 1e-6".into(),
        coefficient_err <= 1e-6 && r.residual.sup_norm <= 1e-8 && oracle_gap <= 1e-6,
    ))
}

/// Max error of the L1 derivative of `f` over grid nodes in `[0.1, 1]`.
pub fn l1_grid_error(f: fn(f64) -> f64, exact: fn(f64) -> f64, alpha: f64, h: f64) -> Result<f64> {
    let intervals = (1.0 / h).round() as usize;
    let sampled = SampledFunction::from_fn(f, 0.0, 1.0, intervals)?;
    let d = frac_derivative_sampled(&sampled, alpha)?;
    Ok(d
        .grid()
        .zip(d.samples())
        .filter(|(t, _)| *t >= 0.1 - 1e-12)
        .map(|(t, v)| (v - exact(t)).abs())
        .fold(0.0, f64::max))
}

fn l1_convergence(_: &QuadratureConfig) -> Result<(String, String, bool)> {
    // D^(1/2) t = t^(1/2) / Γ(3/2)
    let exact: fn(f64) -> f64 = |t| t.sqrt() / (PI.sqrt() / 2.0);
    let coarse = l1_grid_error(|t| t, exact, 0.5, 1e-2)?;
    let fine = l1_grid_error(|t| t, exact, 0.5, 5e-3)?;
    let ratio = coarse / fine;
    Ok((
        format!("errs {coarse:.1e} -> {fine:.1e}, ratio {ratio:.2}"),
        format!("ratio >= 2^1.3 = {:.2}", 2f64.powf(1.3)),
        ratio >= 2f64.powf(1.3),
    ))
}

fn integration_by_parts(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let constant = FracPowerSeries::new(0.0, [(3.0, 0.0)])?;
    let t = FracPowerSeries::new(0.0, [(1.0, 1.0)])?;
    let smooth = FracPowerSeries::new(0.0, [(1.0, 0.5), (-2.0, 1.5), (0.5, 2.0)])?;
    let with_constant = check_integration_by_parts(&constant, &smooth, 0.5, 0.0, 1.0, q)?
        .abs()
        .max(check_integration_by_parts(&smooth, &constant, 0.5, 0.0, 1.0, q)?.abs());
    let linear = check_integration_by_parts(&t, &t, 0.5, 0.0, 1.0, q)?;
    let err = (linear - gamma_1_5() / 2.0).abs();
    Ok((
        format!("constant factor {with_constant:.1e}; u = v = t: {}", sig9(linear)),
        "1e-9; 0.4431127 +- 1e-6".into(),
        with_constant <= 1e-9 && err <= 1e-6,
    ))
}

fn natural_defects(q: &QuadratureConfig) -> Result<(String, String, bool)> {
    let free_right = Boundary { left: Some(0.0), right: None };
    let p = product_problem(free_right)?;
    let root = FracPowerSeries::new(0.0, [(1.0, 0.5)])?;
    let (_, right) = natural_bc_defects(&p, &root, q)?;
    let right = right.unwrap_or(f64::NAN);
    let single = CompositionProblem::parse((0.0, 1.0), vec![LagrangianTerm::new(0.5, "v^2")?], "z1", free_right, Sense::Minimize)?;
    let (_, zero) = natural_bc_defects(&single, &FracPowerSeries::zero(0.0), q)?;
    let zero = zero.unwrap_or(f64::NAN).abs();
    Ok((
        format!("right defect {}; zero trajectory {zero:.1e}", sig9(right)),
        "1.789380 +- 1e-5; 1e-12".into(),
        (right - 1.789_380).abs() <= 1e-5 && zero <= 1e-12,
    ))
}
