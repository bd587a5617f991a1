//! Linear programs over sparse rows with per-variable bounds.

use super::backend::RowBuilder;
use super::{sparse_dot, ConicError, Outcome, Sense, SparseVec};

/// `optimize c . x  s.t.  A_le x <= b_le, A_eq x = b_eq, lo <= x <= hi`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub sense: Sense,
    /// Dense objective coefficients, length `num_vars`.
    pub objective: Vec<f64>,
    /// Inequality rows `a . x <= b`.
    pub lin_le: Vec<(SparseVec, f64)>,
    /// Equality rows `a . x = b`.
    pub lin_eq: Vec<(SparseVec, f64)>,
    /// Per-variable bounds; use `f64::NEG_INFINITY` / `f64::INFINITY` for free.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A program with free variables and no constraints yet.
    pub fn new(num_vars: usize, sense: Sense, objective: Vec<f64>) -> Self {
        Self {
            num_vars,
            sense,
            objective,
            lin_le: Vec::new(),
            lin_eq: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); num_vars],
        }
    }

    fn check(&self) -> Result<(), ConicError> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(ConicError::BadProgram(
                "objective/bounds length does not match num_vars".into(),
            ));
        }
        for (row, _) in self.lin_le.iter().chain(self.lin_eq.iter()) {
            if row.iter().any(|&(i, _)| i >= self.num_vars) {
                return Err(ConicError::BadProgram("row index out of range".into()));
            }
        }
        Ok(())
    }
}

/// Solve an LP to the given tolerance. Returns `Optimal`, `Infeasible`, or
/// `Unbounded`; backend breakdowns surface as errors, distinct from
/// infeasibility.
pub fn solve_lp(p: &LinearProgram, tol: f64) -> Result<Outcome, ConicError> {
    p.check()?;
    let mut rb = RowBuilder::new();
    rb.push_eq_block(p.lin_eq.clone());
    let mut le = p.lin_le.clone();
    for (i, &(lo, hi)) in p.bounds.iter().enumerate() {
        if lo.is_finite() {
            le.push((vec![(i, -1.0)], -lo));
        }
        if hi.is_finite() {
            le.push((vec![(i, 1.0)], hi));
        }
    }
    rb.push_le_block(le);
    let q: Vec<f64> = match p.sense {
        Sense::Minimize => p.objective.clone(),
        Sense::Maximize => p.objective.iter().map(|c| -c).collect(),
    };
    let raw = rb.solve(p.num_vars, &q, tol)?;
    Ok(raw.into_outcome(|x| {
        let obj: f64 = sparse_dot(
            &p.objective.iter().cloned().enumerate().collect::<Vec<_>>(),
            x,
        );
        obj
    }))
}
