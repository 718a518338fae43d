//! ∫ u^(α) v (dt)^α + ∫ u v^(α) (dt)^α - α! [u v] is zero when a factor is
//! constant, but not in general.

use fracvar::fraccore::{check_integration_by_parts, gamma, QuadratureConfig};
use fracvar::trajectory::FracPowerSeries;

fn main() -> fracvar::Result<()> {
    let q = QuadratureConfig::default();
    let constant = FracPowerSeries::new(0.0, [(3.0, 0.0)])?;
    let t = FracPowerSeries::new(0.0, [(1.0, 1.0)])?;
    let root = FracPowerSeries::new(0.0, [(1.0, 0.5)])?;
    for (name, u, v) in [("3, t", &constant, &t), ("t, t", &t, &t), ("t^(1/2), t", &root, &t), ("t^(1/2), t^(1/2)", &root, &root)] {
        println!("u, v = {name:<18} defect {:+.9}", check_integration_by_parts(u, v, 0.5, 0.0, 1.0, &q)?);
    }
    println!("Γ(3/2)/2 = {:.9}", gamma(1.5)? / 2.0);
    Ok(())
}
