//! Sampled Jumarie derivative by the L1 scheme: observed rates on t^2 and
//! exactness on t.

use fracvar::fraccore::{frac_derivative_sampled, gamma, SampledFunction};

fn max_error(f: fn(f64) -> f64, exact: &dyn Fn(f64) -> f64, h: f64) -> fracvar::Result<f64> {
    let s = SampledFunction::from_fn(f, 0.0, 1.0, (1.0 / h).round() as usize)?;
    let d = frac_derivative_sampled(&s, 0.5)?;
    Ok(d.grid().zip(d.samples()).filter(|(t, _)| *t >= 0.1 - 1e-12).map(|(t, v)| (v - exact(t)).abs()).fold(0.0, f64::max))
}

fn main() -> fracvar::Result<()> {
    let g15 = gamma(1.5)?;
    let g25 = gamma(2.5)?;
    let square = move |t: f64| 2.0 * t.powf(1.5) / g25;
    let line = move |t: f64| t.sqrt() / g15;
    let mut previous = None;
    for h in [4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3] {
        let e2 = max_error(|t| t * t, &square, h)?;
        let e1 = max_error(|t| t, &line, h)?;
        let rate = previous.map(|p: f64| (p / e2).log2());
        println!("h = {h:<7} err(t^2) = {e2:.3e}  rate {}  err(t) = {e1:.1e}", rate.map_or("-".into(), |r| format!("{r:.3}")));
        previous = Some(e2);
    }
    println!("expected rate 2 - α = 1.5");
    Ok(())
}
