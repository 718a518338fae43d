//! The (Q1, Q2) self-consistency system: Newton from (1, 1), the closed
//! form, and the other root found by a coarse multistart.

use fracvar::fraccore::QuadratureConfig;
use fracvar::functional::{make_product, Boundary, LagrangianTerm, Sense};
use fracvar::solver::{q_algebraic_residual, q_closed_form, solve_q_system};

fn main() -> fracvar::Result<()> {
    let p = make_product(
        LagrangianTerm::new(0.5, "v^2")?,
        LagrangianTerm::new(0.5, "t^(1/2)*v")?,
        (0.0, 1.0),
        Boundary::fixed(0.0, 1.0),
        Sense::Minimize,
    )?;
    let sol = solve_q_system(&p, QuadratureConfig::default(), 1e-12)?;
    let (q1, q2) = q_closed_form();
    println!("Newton:      Q = ({:.12}, {:.12}) in {} iterations", sol.q[0], sol.q[1], sol.iterations);
    println!("closed form: Q = ({q1:.12}, {q2:.12}), algebraic residual {:?}", q_algebraic_residual(q1, q2)?);
    println!("trajectory:  {}", sol.trajectory);
    println!("L = Q1*Q2 = {:.12}", sol.q[0] * sol.q[1]);
    for alt in &sol.alternatives {
        println!("other root:  ({:.9}, {:.9})", alt[0], alt[1]);
    }
    Ok(())
}
