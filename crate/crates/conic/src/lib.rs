//! Dense conic optimization for small LP/SOCP/SDP programs.
//!
//! [`ConicProgram`] is the user-facing model: scalar, second-order-cone and
//! complex Hermitian PSD variable blocks, trace-linear expressions, and a
//! maximization objective. [`solve`] compiles it to the standard form of
//! [`ipm`] and maps the result back to per-block values.

pub mod cone;
pub mod embed;
pub mod ipm;
pub mod program;

pub use ipm::{Settings, Status};
pub use program::{
    solve, validate, BlockKind, BlockValue, ConicProgram, ConicSolution, Constraint, LinExpr, Term,
    VarBlock,
};

/// Errors that prevent a solve from starting.
#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SolveError {
    #[error("ill-posed program: {0}")]
    IllPosed(String),
}
