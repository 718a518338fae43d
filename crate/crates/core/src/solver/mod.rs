//! Candidate extremizers: a direct (Ritz) search over fractional power
//! bases and a Newton path for self-consistency systems.

mod newton;
mod qsystem;
mod simplex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fraccore::QuadratureConfig;
use crate::functional::{eval_composition, CompositionProblem, Sense};
use crate::trajectory::{constrain_endpoints, free_dimension, FracPowerSeries};
use crate::variational::{el_residual, ResidualOptions, ResidualReport};

pub use newton::{newton_solve, solve_self_consistent, NewtonReport, DAMPING, MAX_HALVINGS};
pub use qsystem::{
    build_q_system, coarse_grid, multistart_roots, q_algebraic_residual, q_closed_form, q_trajectory,
    solve_q_system, QSolution, Q_INITIAL,
};
pub use simplex::{minimize, SimplexOptions, SimplexOutcome};

/// Sup of the weighted residual and natural defects below which a Ritz
/// result counts as stationary.
pub const STATIONARITY_TOL: f64 = 1e-4;

const POLISH_STEP: f64 = 1e-5;
const POLISH_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct RitzConfig {
    /// Positive exponents `e_k` of the basis `(t-a)^(e_k)`.
    pub basis: Vec<f64>,
    pub max_evals: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Refine the simplex result with Newton on a finite-difference gradient.
    pub polish: bool,
}

impl Default for RitzConfig {
    fn default() -> Self {
        let simplex = SimplexOptions::default();
        Self {
            basis: vec![0.5, 1.0],
            max_evals: simplex.max_evals,
            tol: simplex.tol,
            restarts: simplex.restarts,
            seed: simplex.seed,
            polish: true,
        }
    }
}

impl RitzConfig {
    /// Default settings with basis `{β, 2β}`, `β` the smallest order of `p`.
    pub fn for_problem(p: &CompositionProblem) -> Self {
        let beta = p.orders().into_iter().fold(f64::INFINITY, f64::min);
        Self { basis: vec![beta, 2.0 * beta], ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.basis.is_empty() {
            return Err(Error::invalid("Ritz basis needs at least one exponent"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!("simplex tolerance must be positive, got {}", self.tol)));
        }
        if self.max_evals == 0 {
            return Err(Error::invalid("max_evals must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxEvals,
    StationarityFailed,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxEvals => "max-evals",
            SolveStatus::StationarityFailed => "stationarity-failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub trajectory: FracPowerSeries,
    pub free_coefficients: Vec<f64>,
    /// `L = H(F)` at the trajectory.
    pub objective: f64,
    pub functionals: Vec<f64>,
    pub residual: ResidualReport,
    pub status: SolveStatus,
    /// Only necessary conditions are checked.
    pub label: &'static str,
    pub evaluations: usize,
    pub polished: bool,
    /// Best `L` after each simplex iteration.
    pub trace: Vec<f64>,
}

/// Direct method: simplex search for the free coefficients of
/// `Σ c_k (t-a)^(e_k)` (plus a constant), endpoint values imposed through
/// [`constrain_endpoints`]. The search starts at all free coefficients zero.
pub fn solve_ritz(p: &CompositionProblem, cfg: &RitzConfig, q: &QuadratureConfig) -> Result<SolveResult> {
    cfg.validate()?;
    q.validate()?;
    let (a, b) = p.interval();
    let boundary = p.boundary();
    let dim = free_dimension(cfg.basis.len(), boundary.left.is_some(), boundary.right.is_some())?;
    if dim == 0 {
        return Err(Error::invalid("basis leaves no free coefficient once the endpoints are imposed"));
    }
    let sign = match p.sense() {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let build = |free: &[f64]| constrain_endpoints(free, &cfg.basis, a, b, boundary.left, boundary.right);
    let objective = |free: &[f64]| -> Result<f64> { Ok(sign * eval_composition(p, &build(free)?, q)?.objective) };

    let options = SimplexOptions {
        scale: SimplexOptions::default().scale,
        max_evals: cfg.max_evals,
        tol: cfg.tol,
        restarts: cfg.restarts,
        seed: cfg.seed,
    };
    let outcome = minimize(&objective, &vec![0.0; dim], &options)?;
    let mut free = outcome.x.clone();
    let mut polished = false;
    if cfg.polish {
        if let Some(better) = polish(&objective, &free, outcome.value) {
            free = better;
            polished = true;
        }
    }

    let trajectory = build(&free)?;
    let evaluation = eval_composition(p, &trajectory, q)?;
    let residual = el_residual(p, &trajectory, &ResidualOptions { quadrature: *q, ..Default::default() })?;
    let stationary = residual.sup_norm <= STATIONARITY_TOL && residual.natural_sup() <= STATIONARITY_TOL;
    let status = if !outcome.converged {
        SolveStatus::MaxEvals
    } else if stationary {
        SolveStatus::Converged
    } else {
        SolveStatus::StationarityFailed
    };
    Ok(SolveResult {
        trajectory,
        free_coefficients: free,
        objective: evaluation.objective,
        functionals: evaluation.functionals,
        residual,
        status,
        label: "candidate",
        evaluations: outcome.evaluations,
        polished,
        trace: outcome.trace.iter().map(|v| sign * v).collect(),
    })
}

/// Newton on the central-difference gradient. The simplex pins the
/// coefficients only to about the square root of the objective's rounding
/// level; this recovers the rest when the objective is smooth.
fn polish<F>(objective: &F, start: &[f64], start_value: f64) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let gradient = |c: &[f64]| -> Result<Vec<f64>> {
        (0..c.len())
            .map(|j| {
                let h = POLISH_STEP * c[j].abs().max(1.0);
                let mut up = c.to_vec();
                let mut down = c.to_vec();
                up[j] += h;
                down[j] -= h;
                Ok((objective(&up)? - objective(&down)?) / (2.0 * h))
            })
            .collect()
    };
    let scale = start_value.abs().max(1.0);
    // stalling at the gradient's noise floor is the expected exit
    let (report, _) = newton::newton_iterate(&gradient, start, POLISH_TOL * scale, 30).ok()?;
    let value = objective(&report.solution).ok()?;
    (value <= start_value + 1e-15 * scale).then_some(report.solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{make_product, Boundary, LagrangianTerm};

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

    fn single(alpha: f64, boundary: Boundary) -> CompositionProblem {
        CompositionProblem::parse((0.0, 1.0), vec![LagrangianTerm::new(alpha, "v^2").unwrap()], "z1", boundary, Sense::Minimize)
            .unwrap()
    }

    #[test]
    fn product_problem_ritz_matches_closed_form() {
        let r = solve_ritz(&product_problem(), &RitzConfig::default(), &QuadratureConfig::default()).unwrap();
        let (q1, q2) = q_closed_form();
        let c2 = -q1 * std::f64::consts::PI.sqrt() / (4.0 * q2);
        let terms = r.trajectory.terms();
        assert!((terms[0].coefficient - (1.0 - c2)).abs() < 1e-6, "{terms:?}");
        assert!((terms[1].coefficient - c2).abs() < 1e-6);
        assert!((r.objective - q1 * q2).abs() < 1e-9);
        assert_eq!(r.status, SolveStatus::Converged);
        assert_eq!(r.label, "candidate");
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn classical_line() {
        let cfg = RitzConfig { basis: vec![1.0, 2.0, 3.0], ..Default::default() };
        let r = solve_ritz(&single(1.0, Boundary::fixed(0.0, 1.0)), &cfg, &QuadratureConfig::default()).unwrap();
        let x = &r.trajectory;
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            assert!((x.eval(t).unwrap() - t).abs() < 1e-6);
        }
        assert!((r.objective - 1.0).abs() < 1e-8);
        assert!(r.residual.sup_norm <= 1e-8, "{} {} {:?}", r.residual.sup_norm, r.polished, r.free_coefficients);
    }

    #[test]
    fn free_right_end_goes_to_zero() {
        let r = solve_ritz(&single(0.5, Boundary { left: Some(0.0), right: None }), &RitzConfig::default(), &QuadratureConfig::default())
            .unwrap();
        let sup = r.trajectory.terms().iter().map(|t| t.coefficient.abs()).sum::<f64>();
        assert!(sup <= 1e-4);
        assert!(r.objective <= 1e-8);
    }

    #[test]
    fn maximize_flips_sign() {
        // L = -F with F = ∫ v^2: maximizing -F is minimizing F
        let p = CompositionProblem::parse(
            (0.0, 1.0),
            vec![LagrangianTerm::new(1.0, "v^2").unwrap()],
            "-z1",
            Boundary::fixed(0.0, 1.0),
            Sense::Maximize,
        )
        .unwrap();
        let cfg = RitzConfig { basis: vec![1.0, 2.0], ..Default::default() };
        let r = solve_ritz(&p, &cfg, &QuadratureConfig::default()).unwrap();
        assert!((r.objective + 1.0).abs() < 1e-8);
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn deterministic() {
        let cfg = RitzConfig { seed: 11, ..Default::default() };
        let a = solve_ritz(&product_problem(), &cfg, &QuadratureConfig::default()).unwrap();
        let b = solve_ritz(&product_problem(), &cfg, &QuadratureConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_basis_follows_orders() {
        assert_eq!(RitzConfig::for_problem(&single(0.3, Boundary::free())).basis, vec![0.3, 0.6]);
    }

    #[test]
    fn rejects_empty_basis() {
        let cfg = RitzConfig { basis: vec![], ..Default::default() };
        assert!(solve_ritz(&product_problem(), &cfg, &QuadratureConfig::default()).is_err());
    }
}
