//! Problem and trajectory files as the command-line tool reads them.

use fracvar::functional::eval_composition;
use fracvar::io::{parse_problem, parse_trajectory_csv, sig9, write_trajectory_csv};
use fracvar::trajectory::FracPowerSeries;

fn main() -> fracvar::Result<()> {
    let text = include_str!("../data/product.json");
    let setup = parse_problem(text)?;
    println!("H = {}, terms = {}, boundary = {:?}", setup.problem.outer(), setup.problem.terms().len(), setup.problem.boundary());

    let x = FracPowerSeries::new(0.0, [(1.0, 0.5)])?;
    let mut csv = Vec::new();
    write_trajectory_csv(&x, &mut csv)?;
    let csv = String::from_utf8(csv).expect("utf-8");
    print!("{csv}");
    let back = parse_trajectory_csv(&csv)?;
    println!("L = {}", sig9(eval_composition(&setup.problem, &back, &setup.quadrature)?.objective));

    for broken in [r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v^2"}],"H":"z1*z2"}"#, r#"{"interval":[0,1],"terms":[{"alpha":2,"f":"v"}],"H":"z1"}"#] {
        println!("{}", parse_problem(broken).unwrap_err());
    }
    Ok(())
}
