//! Self-consistency system for the product problem
//! `(∫(x^(1/2))² (dt)^(1/2)) · (∫ t^(1/2) x^(1/2) (dt)^(1/2))` on `[0, 1]`
//! with `x(0) = 0`, `x(1) = 1`.
//!
//! Writing `Q1 = F_1`, `Q2 = F_2`, the Euler–Lagrange equation integrates to
//! `x(t) = (2A/√π) t^(1/2) - (B√π/2) t` with `A = (Q1π + 4√πQ2)/(8Q2)` and
//! `B = Q1/(2Q2)`, so stationary points are the zeros of
//! `(Q1, Q2) ↦ (F_1[x] - Q1, F_2[x] - Q2)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fraccore::QuadratureConfig;
use crate::functional::{eval_term_functional, CompositionProblem};
use crate::trajectory::FracPowerSeries;

use super::newton::newton_solve;

/// Starting point used by [`solve_q_system`].
pub const Q_INITIAL: [f64; 2] = [1.0, 1.0];

/// `(Q1, Q2)` in closed form.
pub fn q_closed_form() -> (f64, f64) {
    let root = (PI.powi(3) - 8.0 * PI).sqrt();
    let q2 = (PI.powf(1.5) + root) / 12.0;
    let q1 = 4.0 / 3.0 * PI * (PI.sqrt() * (0.25 * PI.powf(1.5) + 0.25 * root) - 4.0) / (3.0 * PI * PI - 32.0);
    (q1, q2)
}

/// The system after the Beta integrals have been done by hand, as
/// `lhs - Q` per equation.
pub fn q_algebraic_residual(q1: f64, q2: f64) -> Result<[f64; 2]> {
    if q2 == 0.0 {
        return Err(Error::domain("Q2 = 0"));
    }
    let pi2 = PI * PI;
    let first = -(-32.0 * q1 * q1 - 48.0 * PI * q2 * q2 + 3.0 * q1 * q1 * pi2) / (192.0 * q2 * q2);
    let second = (-32.0 * q1 + 3.0 * q1 * pi2 + 12.0 * PI.powf(1.5) * q2) / (96.0 * q2);
    Ok([first - q1, second - q2])
}

/// Trajectory determined by `(Q1, Q2)`; satisfies `x(0) = 0`, `x(1) = 1`
/// identically.
pub fn q_trajectory(q1: f64, q2: f64) -> Result<FracPowerSeries> {
    if q2 == 0.0 {
        return Err(Error::domain("Q2 = 0 leaves the trajectory undefined"));
    }
    let sqrt_pi = PI.sqrt();
    let a = (q1 * PI + 4.0 * sqrt_pi * q2) / (8.0 * q2);
    let b = q1 / (2.0 * q2);
    FracPowerSeries::new(0.0, [(2.0 * a / sqrt_pi, 0.5), (-b * PI / (2.0 * sqrt_pi), 1.0)])
}

fn check_shape(p: &CompositionProblem) -> Result<()> {
    let orders = p.orders();
    let boundary = p.boundary();
    if p.interval() != (0.0, 1.0)
        || orders != [0.5, 0.5]
        || boundary.left != Some(0.0)
        || boundary.right != Some(1.0)
    {
        return Err(Error::invalid(
            "the Q-system needs two order-1/2 terms on [0, 1] with x(0) = 0 and x(1) = 1",
        ));
    }
    Ok(())
}

/// `(Q1, Q2) ↦ (F_1[x(·; Q)] - Q1, F_2[x(·; Q)] - Q2)` with the functionals
/// of `p` evaluated by quadrature.
pub fn build_q_system(p: &CompositionProblem, q: QuadratureConfig) -> Result<impl Fn(&[f64]) -> Result<Vec<f64>> + '_> {
    check_shape(p)?;
    q.validate()?;
    Ok(move |point: &[f64]| {
        let [q1, q2] = point else {
            return Err(Error::invalid("the Q-system has two unknowns"));
        };
        let x = q_trajectory(*q1, *q2)?;
        let f1 = eval_term_functional(&p.terms()[0], &x, 0.0, 1.0, &q)?;
        let f2 = eval_term_functional(&p.terms()[1], &x, 0.0, 1.0, &q)?;
        Ok(vec![f1 - q1, f2 - q2])
    })
}

/// Distinct zeros reached by Newton from each start.
pub fn multistart_roots<F>(map: F, starts: &[Vec<f64>], tol: f64, max_iter: usize) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut roots: Vec<Vec<f64>> = Vec::new();
    for start in starts {
        let Ok(report) = newton_solve(&map, start, tol, max_iter) else {
            continue;
        };
        let fresh = roots.iter().all(|r| {
            r.iter().zip(&report.solution).any(|(a, b)| (a - b).abs() > 1e-6 * a.abs().max(1.0))
        });
        if fresh {
            roots.push(report.solution);
        }
    }
    roots
}

/// Starts `(0.25, 0.25), (0.25, 0.5), ..., (2, 2)`.
pub fn coarse_grid() -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (1..=8).map(|k| 0.25 * k as f64).collect();
    axis.iter().flat_map(|&u| axis.iter().map(move |&w| vec![u, w])).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSolution {
    pub q: [f64; 2],
    pub trajectory: FracPowerSeries,
    pub iterations: usize,
    pub residual_norm: f64,
    /// Other zeros found from [`coarse_grid`].
    pub alternatives: Vec<[f64; 2]>,
}

/// Root reached from [`Q_INITIAL`], plus any other roots the coarse scan finds.
pub fn solve_q_system(p: &CompositionProblem, q: QuadratureConfig, tol: f64) -> Result<QSolution> {
    let map = build_q_system(p, q)?;
    let report = newton_solve(&map, &Q_INITIAL, tol, 50)?;
    let root = [report.solution[0], report.solution[1]];
    let alternatives = multistart_roots(&map, &coarse_grid(), tol, 50)
        .into_iter()
        .map(|r| [r[0], r[1]])
        .filter(|r| (r[0] - root[0]).abs() > 1e-6 * root[0].abs().max(1.0) || (r[1] - root[1]).abs() > 1e-6 * root[1].abs().max(1.0))
        .collect();
    Ok(QSolution {
        trajectory: q_trajectory(root[0], root[1])?,
        q: root,
        iterations: report.iterations,
        residual_norm: report.residual_norm,
        alternatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{make_product, Boundary, LagrangianTerm, Sense};

    fn problem() -> CompositionProblem {
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
    fn closed_form_values() {
        let (q1, q2) = q_closed_form();
        assert!((q1 - 0.803_527_411_686_625).abs() < 1e-13);
        assert!((q2 - 0.665_988_816_119_871).abs() < 1e-13);
        let r = q_algebraic_residual(q1, q2).unwrap();
        assert!(r[0].abs() <= 1e-12 && r[1].abs() <= 1e-12, "{r:?}");
    }

    #[test]
    fn quadrature_map_vanishes_at_closed_form() {
        let p = problem();
        let map = build_q_system(&p, QuadratureConfig::default()).unwrap();
        let (q1, q2) = q_closed_form();
        let r = map(&[q1, q2]).unwrap();
        assert!(r[0].abs() <= 1e-9 && r[1].abs() <= 1e-9, "{r:?}");
    }

    #[test]
    fn trajectory_meets_endpoints_for_any_q() {
        for (q1, q2) in [(PI / 4.0, PI.powf(1.5) / 8.0), q_closed_form(), (3.0, -0.4)] {
            let x = q_trajectory(q1, q2).unwrap();
            assert_eq!(x.eval(0.0).unwrap(), 0.0);
            assert!((x.eval(1.0).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn newton_from_one_one() {
        let sol = solve_q_system(&problem(), QuadratureConfig::default(), 1e-12).unwrap();
        let (q1, q2) = q_closed_form();
        assert!((sol.q[0] - q1).abs() <= 1e-9 && (sol.q[1] - q2).abs() <= 1e-9, "{:?}", sol.q);
        // the other branch of the square root in Q2
        let other_q2 = (PI.powf(1.5) - (PI.powi(3) - 8.0 * PI).sqrt()) / 12.0;
        assert!(sol.alternatives.iter().any(|r| (r[1] - other_q2).abs() < 1e-8), "{:?}", sol.alternatives);
    }

    #[test]
    fn zero_q2_is_guarded() {
        let p = problem();
        let map = build_q_system(&p, QuadratureConfig::default()).unwrap();
        assert!(matches!(map(&[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn other_shapes_are_rejected() {
        let p = problem().with_boundary(Boundary::free());
        assert!(build_q_system(&p, QuadratureConfig::default()).is_err());
    }
}
