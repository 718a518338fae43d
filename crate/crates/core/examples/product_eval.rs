//! Evaluates the product functional
//! L[x] = (∫ (x^(1/2))² (dt)^(1/2)) · (∫ t^(1/2) x^(1/2) (dt)^(1/2))
//! on a few candidates.

use fracvar::fraccore::QuadratureConfig;
use fracvar::functional::{eval_composition, make_product, Boundary, LagrangianTerm, Sense};
use fracvar::solver::{q_closed_form, q_trajectory};
use fracvar::trajectory::FracPowerSeries;

fn main() -> fracvar::Result<()> {
    let p = make_product(
        LagrangianTerm::new(0.5, "v^2")?,
        LagrangianTerm::new(0.5, "t^(1/2)*v")?,
        (0.0, 1.0),
        Boundary::fixed(0.0, 1.0),
        Sense::Minimize,
    )?;
    let q = QuadratureConfig::default();
    let (q1, q2) = q_closed_form();
    let candidates = [
        ("t^(1/2)", FracPowerSeries::new(0.0, [(1.0, 0.5)])?),
        ("t", FracPowerSeries::new(0.0, [(1.0, 1.0)])?),
        ("closed form", q_trajectory(q1, q2)?),
    ];
    for (name, x) in candidates {
        let e = eval_composition(&p, &x, &q)?;
        println!("{name:<12} L = {:.9}  F = {:?}", e.objective, e.functionals);
    }
    Ok(())
}
