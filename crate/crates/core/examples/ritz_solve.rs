//! Direct (Ritz) search on the product problem with growing bases.

use fracvar::fraccore::QuadratureConfig;
use fracvar::functional::{make_product, Boundary, LagrangianTerm, Sense};
use fracvar::solver::{solve_ritz, RitzConfig};

fn main() -> fracvar::Result<()> {
    let p = make_product(
        LagrangianTerm::new(0.5, "v^2")?,
        LagrangianTerm::new(0.5, "t^(1/2)*v")?,
        (0.0, 1.0),
        Boundary::fixed(0.0, 1.0),
        Sense::Minimize,
    )?;
    let q = QuadratureConfig::default();
    for basis in [vec![0.5, 1.0], vec![0.5, 1.0, 1.5], vec![1.0, 2.0]] {
        let cfg = RitzConfig { basis: basis.clone(), ..Default::default() };
        let r = solve_ritz(&p, &cfg, &q)?;
        println!(
            "basis {basis:?}: L = {:.9}  x = {}  sup|R| = {:.2e}  {} ({} evals)",
            r.objective, r.trajectory, r.residual.sup_norm, r.status, r.evaluations
        );
    }
    Ok(())
}
