//! Power rule, the (dt)^α integral and the fundamental theorem on a series.

use std::f64::consts::PI;

use fracvar::fraccore::{frac_derivative_power, frac_integral, gamma, QuadratureConfig};
use fracvar::trajectory::FracPowerSeries;

fn main() -> fracvar::Result<()> {
    let q = QuadratureConfig::default();

    for g in [0.5, 1.0, 1.5, 2.0] {
        let (c, e) = frac_derivative_power(g, 0.5)?;
        println!("D^(1/2) t^{g} = {c:.9} t^{e}");
    }

    println!("∫_0^1 (dτ)^(1/2)        = {:.12}", frac_integral(|_| 1.0, 0.0, 1.0, 0.5, &q)?);
    println!("∫_0^4 (dτ)^(1/2)        = {:.12}", frac_integral(|_| 1.0, 0.0, 4.0, 0.5, &q)?);
    println!("∫_0^1 τ^(1/2) (dτ)^(1/2) = {:.12}  (π/4 = {:.12})", frac_integral(f64::sqrt, 0.0, 1.0, 0.5, &q)?, PI / 4.0);

    // ∫ x^(α) (dt)^α = α! (x(b) - x(a))
    let x = FracPowerSeries::new(0.0, [(0.3, 0.0), (1.2, 0.5), (-0.7, 1.5), (2.0, 2.0)])?;
    let d = x.frac_derivative(0.5)?;
    let lhs = frac_integral(|t| d.eval(t).unwrap(), 0.0, 1.0, 0.5, &q)?;
    let rhs = gamma(1.5)? * (x.eval(1.0)? - x.eval(0.0)?);
    println!("x = {x}");
    println!("D^(1/2) x = {d}");
    println!("fundamental theorem: {lhs:.12} vs {rhs:.12}");
    Ok(())
}
