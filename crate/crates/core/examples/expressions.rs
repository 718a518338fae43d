//! Parsing, printing and symbolic partials of integrands.

use std::collections::HashMap;

use fracvar::expr::{differentiate, parse_expression};

fn main() -> fracvar::Result<()> {
    let vars = ["t", "y", "v"];
    for src in ["v^2", "t^(1/2)*v", "y^2*v - 3*t*v", "exp(-t)*sqrt(1 + v^2)", "sin(y)/(1 + t)"] {
        let e = parse_expression(src, &vars)?;
        let fy = differentiate(&e, "y")?;
        let fv = differentiate(&e, "v")?;
        println!("f = {e:<28} f_y = {fy:<24} f_v = {fv}");
    }

    let e = parse_expression("t^(1/2)*v + y^2", &vars)?;
    let env = HashMap::from([("t".to_string(), 0.25), ("y".to_string(), 2.0), ("v".to_string(), 3.0)]);
    println!("f(0.25, 2, 3) = {}", e.evaluate(&env)?);

    for bad in ["v +", "w^2", "foo(v)", ""] {
        match parse_expression(bad, &vars) {
            Ok(e) => println!("{bad:?} parsed as {e}"),
            Err(err) => println!("{bad:?}: {err}"),
        }
    }
    Ok(())
}
