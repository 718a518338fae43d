//! Jumarie fractional calculus of variations for composition functionals
//!
//! ```text
//! L[x] = H(F_1[x], ..., F_n[x]),   F_i[x] = ∫_a^b f_i(t, x(t), x^(α_i)(t)) (dt)^α_i
//! ```
//!
//! with optional endpoint values. Modules, bottom up:
//!
//! - [`expr`]: expressions in `t, y, v` (integrands) and `z1..zn` (the outer
//!   `H`), with a parser and symbolic partial derivatives.
//! - [`fraccore`]: gamma, the Jumarie derivative (power rule and L1 scheme)
//!   and the `(dt)^α` integral by graded Gauss–Legendre quadrature.
//! - [`trajectory`]: candidates as fractional power series `Σ c_k (t-a)^(e_k)`.
//! - [`functional`]: problems and their values.
//! - [`variational`]: Euler–Lagrange residual and natural-boundary defects.
//! - [`solver`]: Ritz search and a damped Newton solver.
//! - [`io`], [`selftest`]: files for the `fracvar` binary and its checks.
//!
//! ```
//! use fracvar::fraccore::QuadratureConfig;
//! use fracvar::functional::{eval_composition, make_product, Boundary, LagrangianTerm, Sense};
//! use fracvar::trajectory::FracPowerSeries;
//!
//! let p = make_product(
//!     LagrangianTerm::new(0.5, "v^2")?,
//!     LagrangianTerm::new(0.5, "t^(1/2)*v")?,
//!     (0.0, 1.0),
//!     Boundary::fixed(0.0, 1.0),
//!     Sense::Minimize,
//! )?;
//! let x = FracPowerSeries::new(0.0, [(1.0, 0.5)])?;
//! let e = eval_composition(&p, &x, &QuadratureConfig::default())?;
//! assert!((e.functionals[0] - std::f64::consts::PI / 4.0).abs() < 1e-12);
//! # Ok::<(), fracvar::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod expr;
pub mod fraccore;
pub mod functional;
pub mod io;
pub mod selftest;
pub mod solver;
pub mod trajectory;
pub mod variational;

pub use error::{Error, Result};
