//! Euler–Lagrange residual of the product problem: the closed-form candidate
//! annihilates it, t^(1/2) does not.

use fracvar::functional::{make_product, Boundary, LagrangianTerm, Sense};
use fracvar::solver::{q_closed_form, q_trajectory};
use fracvar::trajectory::FracPowerSeries;
use fracvar::variational::{corollary_residual_product, el_residual, ResidualOptions};

fn main() -> fracvar::Result<()> {
    let f1 = LagrangianTerm::new(0.5, "v^2")?;
    let f2 = LagrangianTerm::new(0.5, "t^(1/2)*v")?;
    let p = make_product(f1.clone(), f2.clone(), (0.0, 1.0), Boundary::fixed(0.0, 1.0), Sense::Minimize)?;
    let opts = ResidualOptions::default();

    let (q1, q2) = q_closed_form();
    for (name, x) in [("closed form", q_trajectory(q1, q2)?), ("t^(1/2)", FracPowerSeries::new(0.0, [(1.0, 0.5)])?)] {
        let r = el_residual(&p, &x, &opts)?;
        let c = corollary_residual_product(&f1, &f2, &x, (0.0, 1.0), p.boundary(), &opts)?;
        let gap = r.residual.iter().zip(&c.residual).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("{name:<12} sup|R| = {:.3e}  L1 = {:.3e}  schemes {:?}  corollary gap {gap:.1e}", r.sup_norm, r.l1_norm, r.schemes);
    }

    // a term outside the series class goes through the L1 scheme
    let g = LagrangianTerm::new(0.5, "v^2 + exp(-t)*v")?;
    let p = make_product(g, f2, (0.0, 1.0), Boundary::fixed(0.0, 1.0), Sense::Minimize)?;
    let r = el_residual(&p, &q_trajectory(q1, q2)?, &opts)?;
    println!("perturbed    sup|R| = {:.3e}  schemes {:?}", r.sup_norm, r.schemes);
    Ok(())
}
