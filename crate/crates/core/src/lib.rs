//! Exact jet-space calculus for conservation laws of PDE systems.
//!
//! Expressions are canonical sums of monomials in jet coordinates with
//! rational (or parametric) coefficients and affine exponents. On top of that:
//!
//! - [`pde_system`]: systems in solved form, restriction to solutions,
//!   differential identities, TOML loading.
//! - [`varcalc`]: Frechet derivatives and adjoints, Euler and higher Euler
//!   operators, homotopy integrals, Helmholtz conditions, scaling identities.
//! - [`detsys`]: determining equations for multipliers, symmetries and
//!   adjoint-symmetries, linear-ansatz solving, gauge multipliers.
//! - [`current_builder`]: currents from multipliers (homotopy, scaling,
//!   dimensional, direct) and back, equivalence of currents.
//! - [`corpus`]: batch verification of system files; [`cli`] drives it all.
//!
//! Runnable examples (`cargo run --example NAME`): `expressions`,
//! `variational_operators`, `solution_space`, `helmholtz`,
//! `solve_multipliers`, `gauge`, `homotopy_current`, `scaling_current`,
//! `dimensional_scaling`, `direct_current`, `equivalence`, `noether`,
//! `corpus_run`.

pub mod cli;
pub mod coeff;
pub mod corpus;
pub mod current_builder;
pub mod detsys;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod oracle;
pub mod space;
pub mod varcalc;
pub mod pde_system;

pub use coeff::{Coeff, Exponent, Q};
pub use error::{Error, Result};
pub use expr::{Base, Expr, JetVar, Point, ZeroTest};
pub use space::JetSpace;
