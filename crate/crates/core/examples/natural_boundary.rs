//! Free endpoints: natural-condition defects, and a Ritz solve with a free
//! right end.

use fracvar::fraccore::QuadratureConfig;
use fracvar::functional::{make_product, Boundary, CompositionProblem, LagrangianTerm, Sense};
use fracvar::solver::{solve_ritz, RitzConfig};
use fracvar::trajectory::FracPowerSeries;
use fracvar::variational::natural_bc_defects;

fn main() -> fracvar::Result<()> {
    let q = QuadratureConfig::default();
    let free_right = Boundary { left: Some(0.0), right: None };

    let p = make_product(
        LagrangianTerm::new(0.5, "v^2")?,
        LagrangianTerm::new(0.5, "t^(1/2)*v")?,
        (0.0, 1.0),
        free_right,
        Sense::Minimize,
    )?;
    let root = FracPowerSeries::new(0.0, [(1.0, 0.5)])?;
    println!("product, x = t^(1/2): defects {:?}", natural_bc_defects(&p, &root, &q)?);

    let single = CompositionProblem::parse((0.0, 1.0), vec![LagrangianTerm::new(0.5, "v^2")?], "z1", free_right, Sense::Minimize)?;
    println!("single term, x = 0:   defects {:?}", natural_bc_defects(&single, &FracPowerSeries::zero(0.0), &q)?);

    let r = solve_ritz(&single, &RitzConfig::default(), &q)?;
    println!("Ritz, free right end: x = {}  L = {:.3e}  right defect {:?}", r.trajectory, r.objective, r.residual.natural_right);
    Ok(())
}
