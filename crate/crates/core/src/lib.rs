//! Symbolic calculus of variations on jet spaces: Euler–Lagrange operators,
//! conserved currents from symmetries, Noether identities, triviality of
//! conservation laws and first integrals of discrete variational problems.

pub mod cli;
pub mod discrete;
pub mod error;
pub mod expr;
pub mod jet;
mod linsolve;
pub mod noether;
pub mod problem;
pub mod variational;
pub mod verify;

pub use error::{Error, ParseError, Result};
pub use expr::{Expr, JetSpace, MultiIndex, Scope, Tree, Var};
