//! Optimization substrate: linear, second-order-cone, and geometric
//! programs, plus local monomial approximation.
//!
//! The program types here are the only shapes the planners need; they are
//! transcribed to a conic interior-point backend for the actual solve. The
//! monomial machinery (best local monomial approximation of a positive
//! function, and the closed-form surrogate coefficients used by the
//! deployment optimizers) lives in [`monomial`] and [`surrogates`].

mod backend;
mod gp;
mod lp;
mod monomial;
mod socp;
pub mod surrogates;

pub use gp::{solve_gp, GeometricProgram, Monomial, Posynomial};
pub use lp::{solve_lp, LinearProgram};
pub use monomial::{monomial_approx, monomial_approx_with_grad, MonomialApprox};
pub use socp::{solve_socp, SecondOrderProgram, SocCone};

use thiserror::Error;

/// Sparse coefficient vector as (variable index, value) pairs.
pub type SparseVec = Vec<(usize, f64)>;

/// Optimization direction of a program's linear objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// A solved program: optimal value (in the program's own sense), the
/// variable vector, and backend iteration count.
#[derive(Debug, Clone)]
pub struct Solution {
    pub value: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// Tri-valued solve status. `Infeasible` and `Unbounded` are certified by
/// the backend; numerical failures are reported separately as errors.
#[derive(Debug, Clone)]
pub enum Outcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

impl Outcome {
    /// The solution, if optimal.
    pub fn optimal(&self) -> Option<&Solution> {
        match self {
            Outcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Outcome::Infeasible)
    }
}

#[derive(Debug, Error)]
pub enum ConicError {
    #[error("malformed program: {0}")]
    BadProgram(String),
    #[error("solver numerical failure: {0}")]
    Numerical(String),
    #[error("function must be positive at the expansion point, got {0}")]
    NonPositiveValue(f64),
}

/// Evaluate a sparse row against a dense vector.
pub(crate) fn sparse_dot(row: &SparseVec, x: &[f64]) -> f64 {
    row.iter().map(|&(i, v)| v * x[i]).sum()
}
