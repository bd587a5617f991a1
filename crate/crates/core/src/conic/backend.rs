//! Transcription of program rows to the conic interior-point backend.
//!
//! Everything is expressed in the backend's standard form
//! `min q'x  s.t.  A x + s = b, s in K` with K a product of zero,
//! nonnegative, second-order, and exponential cones.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::{ConicError, Outcome, Solution, SparseVec};

/// Row-oriented builder for the backend's constraint matrix.
#[derive(Default)]
pub(crate) struct RowBuilder {
    rows: Vec<SparseVec>,
    b: Vec<f64>,
    cones: Vec<SupportedConeT<f64>>,
}

impl RowBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push_row(&mut self, row: SparseVec, b: f64) {
        self.rows.push(row);
        self.b.push(b);
    }

    /// `a . x = b` rows (zero cone), appended as one block.
    pub fn push_eq_block(&mut self, rows: Vec<(SparseVec, f64)>) {
        if rows.is_empty() {
            return;
        }
        let n = rows.len();
        for (a, b) in rows {
            self.push_row(a, b);
        }
        self.cones.push(SupportedConeT::ZeroConeT(n));
    }

    /// `a . x <= b` rows (nonnegative slack), appended as one block.
    pub fn push_le_block(&mut self, rows: Vec<(SparseVec, f64)>) {
        if rows.is_empty() {
            return;
        }
        let n = rows.len();
        for (a, b) in rows {
            self.push_row(a, b);
        }
        self.cones.push(SupportedConeT::NonnegativeConeT(n));
    }

    /// Second-order cone `||A x + b|| <= c . x + d`.
    ///
    /// The slack block is `(c.x + d, A x + b)`, which must lie in the SOC.
    pub fn push_soc(&mut self, a_rows: Vec<(SparseVec, f64)>, c: SparseVec, d: f64) {
        let dim = a_rows.len() + 1;
        self.push_row(negate(&c), d);
        for (a, off) in a_rows {
            self.push_row(negate(&a), off);
        }
        self.cones.push(SupportedConeT::SecondOrderConeT(dim));
    }

    /// Exponential-cone row `u_var >= exp(a . x + off)` for a dedicated
    /// variable `u_var`.
    pub fn push_exp(&mut self, a: SparseVec, off: f64, u_var: usize) {
        // cone triple (p, q, r) with r >= q * exp(p / q), q = 1:
        self.push_row(negate(&a), off); // p = a.x + off
        self.push_row(Vec::new(), 1.0); // q = 1
        self.push_row(vec![(u_var, -1.0)], 0.0); // r = u
        self.cones.push(SupportedConeT::ExponentialConeT());
    }

    /// Solve `min q . x` over the accumulated rows.
    pub fn solve(self, num_vars: usize, q: &[f64], tol: f64) -> Result<RawSolution, ConicError> {
        let m = self.rows.len();
        let a = csc_from_rows(m, num_vars, &self.rows);
        let p = CscMatrix::<f64>::zeros((num_vars, num_vars));
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(200)
            .tol_gap_abs(tol)
            .tol_gap_rel(tol)
            .tol_feas(tol.max(1e-12))
            .build()
            .map_err(|e| ConicError::BadProgram(format!("settings: {e}")))?;
        let mut solver = DefaultSolver::new(&p, q, &a, &self.b, &self.cones, settings)
            .map_err(|e| ConicError::BadProgram(format!("{e:?}")))?;
        solver.solve();
        let sol = &solver.solution;
        let status = match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => RawStatus::Solved,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                RawStatus::Infeasible
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
                RawStatus::Unbounded
            }
            other => return Err(ConicError::Numerical(format!("{other:?}"))),
        };
        Ok(RawSolution {
            status,
            x: sol.x.clone(),
            iterations: sol.iterations as usize,
        })
    }
}

pub(crate) enum RawStatus {
    Solved,
    Infeasible,
    Unbounded,
}

pub(crate) struct RawSolution {
    pub status: RawStatus,
    pub x: Vec<f64>,
    pub iterations: usize,
}

impl RawSolution {
    /// Map to an [`Outcome`], computing the reported value with `value_of`.
    pub fn into_outcome(self, value_of: impl Fn(&[f64]) -> f64) -> Outcome {
        match self.status {
            RawStatus::Solved => {
                let value = value_of(&self.x);
                Outcome::Optimal(Solution {
                    value,
                    x: self.x,
                    iterations: self.iterations,
                })
            }
            RawStatus::Infeasible => Outcome::Infeasible,
            RawStatus::Unbounded => Outcome::Unbounded,
        }
    }
}

fn negate(v: &SparseVec) -> SparseVec {
    v.iter().map(|&(i, c)| (i, -c)).collect()
}

fn csc_from_rows(m: usize, n: usize, rows: &[SparseVec]) -> CscMatrix<f64> {
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            if v != 0.0 {
                cols[c].push((r, v));
            }
        }
    }
    let mut colptr = Vec::with_capacity(n + 1);
    let mut rowval = Vec::new();
    let mut nzval = Vec::new();
    colptr.push(0);
    for col in cols.iter_mut() {
        col.sort_by_key(|e| e.0);
        // merge duplicate entries within a column
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
        for &(r, v) in col.iter() {
            if let Some(last) = merged.last_mut() {
                if last.0 == r {
                    last.1 += v;
                    continue;
                }
            }
            merged.push((r, v));
        }
        for (r, v) in merged {
            rowval.push(r);
            nzval.push(v);
        }
        colptr.push(rowval.len());
    }
    CscMatrix::new(m, n, colptr, rowval, nzval)
}
