//! Order 1: the machinery reduces to the classical calculus of variations.

use fracvar::fraccore::QuadratureConfig;
use fracvar::functional::{Boundary, CompositionProblem, LagrangianTerm, Sense};
use fracvar::solver::{solve_ritz, RitzConfig};

fn main() -> fracvar::Result<()> {
    let q = QuadratureConfig::default();
    let problems = [
        ("∫ x'^2, x(0)=0, x(1)=1", "v^2", Boundary::fixed(0.0, 1.0)),
        ("∫ x'^2 + x^2, x(0)=0, x(1)=1", "v^2 + y^2", Boundary::fixed(0.0, 1.0)),
    ];
    for (name, f, boundary) in problems {
        let p = CompositionProblem::parse((0.0, 1.0), vec![LagrangianTerm::new(1.0, f)?], "z1", boundary, Sense::Minimize)?;
        let cfg = RitzConfig { basis: vec![1.0, 2.0, 3.0, 4.0, 5.0], ..Default::default() };
        let r = solve_ritz(&p, &cfg, &q)?;
        println!("{name}: L = {:.9}  sup|R| = {:.2e}", r.objective, r.residual.sup_norm);
        println!("  x = {}", r.trajectory);
    }
    // exact minimum of the second: coth(1)
    println!("coth(1) = {:.9}", 1.0 / 1f64.tanh());
    Ok(())
}
