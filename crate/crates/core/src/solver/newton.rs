//! Damped Newton for square nonlinear systems with a forward-difference
//! Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Halvings tried before a step is given up.
pub const MAX_HALVINGS: usize = 60;
pub const DAMPING: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn sup(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn evaluate<F>(map: &F, q: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let r = map(q)?;
    if r.len() != q.len() {
        return Err(Error::invalid(format!("map returned {} components for {} unknowns", r.len(), q.len())));
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("map is not finite at {q:?}")));
    }
    Ok(r)
}

/// Finds `q` with `‖map(q)‖_∞ ≤ tol`, returning iteration details.
pub fn newton_solve<F>(map: F, initial: &[f64], tol: f64, max_iter: usize) -> Result<NewtonReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let (report, stop) = newton_iterate(&map, initial, tol, max_iter)?;
    match stop {
        None => Ok(report),
        Some(err) => Err(err),
    }
}

/// Newton iterations until `tol`, a failed line search or `max_iter`.
/// Returns the last accepted iterate together with the reason it stopped
/// short of `tol`, if it did.
pub(crate) fn newton_iterate<F>(map: &F, initial: &[f64], tol: f64, max_iter: usize) -> Result<(NewtonReport, Option<Error>)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if initial.is_empty() {
        return Err(Error::invalid("empty initial point"));
    }
    let n = initial.len();
    let mut q = initial.to_vec();
    let mut r = evaluate(map, &q)?;
    let mut norm = sup(&r);

    for iteration in 0..max_iter {
        if norm <= tol {
            return Ok((NewtonReport { solution: q, iterations: iteration, residual_norm: norm }, None));
        }
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let h = f64::EPSILON.sqrt() * q[j].abs().max(1.0);
            let mut shifted = q.clone();
            shifted[j] += h;
            let rj = evaluate(map, &shifted)?;
            for i in 0..n {
                jac[(i, j)] = (rj[i] - r[i]) / h;
            }
        }
        let step = jac
            .lu()
            .solve(&DVector::from_iterator(n, r.iter().map(|v| -v)))
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .ok_or(Error::SingularJacobian(iteration));
        let step = match step {
            Ok(step) => step,
            Err(err) => return Ok((NewtonReport { solution: q, iterations: iteration, residual_norm: norm }, Some(err))),
        };

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = q.iter().zip(step.iter()).map(|(x, s)| x + lambda * s).collect();
            // an undefined trial point is treated like a non-decrease
            if let Ok(rt) = evaluate(map, &trial) {
                if sup(&rt) < norm {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            lambda *= DAMPING;
        }
        match accepted {
            Some((trial, rt)) => {
                q = trial;
                norm = sup(&rt);
                r = rt;
            }
            None => {
                let err = Error::NoConvergence { iterations: iteration + 1, residual: norm };
                return Ok((NewtonReport { solution: q, iterations: iteration, residual_norm: norm }, Some(err)));
            }
        }
    }
    let stop = (norm > tol).then_some(Error::NoConvergence { iterations: max_iter, residual: norm });
    Ok((NewtonReport { solution: q, iterations: max_iter, residual_norm: norm }, stop))
}

/// Zero of `residual_map` near `initial`; see [`newton_solve`].
pub fn solve_self_consistent<F>(residual_map: F, initial: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    newton_solve(residual_map, initial, tol, max_iter).map(|r| r.solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_map_in_one_step() {
        let q0 = [0.3, -1.7, 4.0];
        let report = newton_solve(|q| Ok(q.iter().zip(&q0).map(|(a, b)| a - b).collect()), &[1.0; 3], 1e-12, 10).unwrap();
        assert_eq!(report.iterations, 1);
        for (a, b) in report.solution.iter().zip(&q0) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_and_line() {
        let map = |q: &[f64]| Ok(vec![q[0] * q[0] + q[1] * q[1] - 1.0, q[0] - q[1]]);
        let q = solve_self_consistent(map, &[1.0, 0.5], 1e-13, 50).unwrap();
        assert!((q[0] - 0.5f64.sqrt()).abs() < 1e-12 && (q[1] - q[0]).abs() < 1e-12);
    }

    #[test]
    fn damping_handles_overshoot() {
        // plain Newton on atan diverges from 3
        let q = solve_self_consistent(|q| Ok(vec![q[0].atan()]), &[3.0], 1e-12, 100).unwrap();
        assert!(q[0].abs() < 1e-12);
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let err = solve_self_consistent(|q| Ok(vec![q[0] + q[1] - 1.0, 2.0 * (q[0] + q[1])]), &[0.0, 0.0], 1e-10, 10)
            .unwrap_err();
        assert!(matches!(err, Error::SingularJacobian(0)), "{err:?}");
    }

    #[test]
    fn no_root_is_reported() {
        let err = solve_self_consistent(|q| Ok(vec![q[0] * q[0] + 1.0]), &[1.0], 1e-10, 30).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. } | Error::SingularJacobian(_)), "{err:?}");
    }
}
