//! Geometric programs in standard form, solved through the log transform.
//!
//! Variables are strictly positive. Substituting `y = ln v` turns every
//! monomial into an affine form `a . y + ln c` and every posynomial
//! constraint `sum_k c_k prod v^a_k <= monomial` into
//! `logsumexp_k(a_k . y + b_k) <= 0`, a convex constraint the backend
//! expresses with one exponential cone per term.

use super::backend::RowBuilder;
use super::{ConicError, Outcome, Solution, SparseVec};

/// `coeff * prod_l v_l^exponents_l` with `coeff > 0`.
#[derive(Debug, Clone)]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: SparseVec,
}

impl Monomial {
    pub fn new(coeff: f64, exponents: SparseVec) -> Self {
        Self { coeff, exponents }
    }

    /// The constant monomial.
    pub fn constant(coeff: f64) -> Self {
        Self { coeff, exponents: Vec::new() }
    }

    /// A single variable.
    pub fn var(index: usize) -> Self {
        Self { coeff: 1.0, exponents: vec![(index, 1.0)] }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        self.coeff
            * self
                .exponents
                .iter()
                .map(|&(i, e)| v[i].powf(e))
                .product::<f64>()
    }
}

/// Sum of monomials with positive coefficients.
#[derive(Debug, Clone)]
pub struct Posynomial {
    pub terms: Vec<Monomial>,
}

impl Posynomial {
    pub fn eval(&self, v: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(v)).sum()
    }
}

impl From<Monomial> for Posynomial {
    fn from(m: Monomial) -> Self {
        Posynomial { terms: vec![m] }
    }
}

/// A geometric program: maximize one variable subject to
/// `posynomial <= monomial` inequalities, monomial equalities, and positive
/// box bounds per variable (the trust region of the iterated schemes).
#[derive(Debug, Clone)]
pub struct GeometricProgram {
    pub num_vars: usize,
    /// Index of the variable to maximize.
    pub maximize_var: usize,
    /// `posynomial <= monomial` constraints.
    pub le: Vec<(Posynomial, Monomial)>,
    /// `monomial == monomial` constraints.
    pub eq: Vec<(Monomial, Monomial)>,
    /// Per-variable `(lo, hi)` with `0 <= lo`; `lo = 0` or `hi = inf`
    /// disables that side.
    pub bounds: Vec<(f64, f64)>,
}

impl GeometricProgram {
    pub fn new(num_vars: usize, maximize_var: usize) -> Self {
        Self {
            num_vars,
            maximize_var,
            le: Vec::new(),
            eq: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); num_vars],
        }
    }

    fn check(&self) -> Result<(), ConicError> {
        if self.maximize_var >= self.num_vars {
            return Err(ConicError::BadProgram("objective variable out of range".into()));
        }
        for (posy, mono) in &self.le {
            if mono.coeff <= 0.0 || posy.terms.iter().any(|t| t.coeff <= 0.0) {
                return Err(ConicError::BadProgram(
                    "posynomial/monomial coefficients must be positive".into(),
                ));
            }
            if posy.terms.is_empty() {
                return Err(ConicError::BadProgram("empty posynomial".into()));
            }
        }
        for (a, b) in &self.eq {
            if a.coeff <= 0.0 || b.coeff <= 0.0 {
                return Err(ConicError::BadProgram(
                    "equality monomial coefficients must be positive".into(),
                ));
            }
        }
        for &(lo, hi) in &self.bounds {
            if lo < 0.0 || hi <= 0.0 || (lo > 0.0 && hi < lo) {
                return Err(ConicError::BadProgram("invalid variable bounds".into()));
            }
        }
        Ok(())
    }
}

/// Affine form of `ln(lhs / rhs)` in log space.
fn log_quotient(lhs: &Monomial, rhs: &Monomial) -> (SparseVec, f64) {
    let mut coefs: Vec<(usize, f64)> = lhs.exponents.clone();
    for &(i, e) in &rhs.exponents {
        coefs.push((i, -e));
    }
    coefs.sort_by_key(|&(i, _)| i);
    let mut merged: SparseVec = Vec::with_capacity(coefs.len());
    for (i, e) in coefs {
        if let Some(last) = merged.last_mut() {
            if last.0 == i {
                last.1 += e;
                continue;
            }
        }
        merged.push((i, e));
    }
    merged.retain(|&(_, e)| e != 0.0);
    (merged, lhs.coeff.ln() - rhs.coeff.ln())
}

/// Log-space presolve: variables with pinched bounds (`lo == hi`) become
/// constants, and every monomial equality with a variable exclusive to it
/// is eliminated by substitution. Exclusive-variable elimination keeps the
/// remaining system sparse and removes otherwise ghost-like variables whose
/// only footprint is one equality (a structure interior-point backends
/// handle poorly).
struct Presolve {
    /// `Some(ln v)` for pinned variables.
    fixed: Vec<Option<f64>>,
    /// `y_pivot = rhs - row . y_free`, rows over original indices of free vars.
    subs: Vec<(usize, SparseVec, f64)>,
    /// Residual equalities over free variables.
    residual_eq: Vec<(SparseVec, f64)>,
    /// Original index -> compact free index.
    compact: Vec<Option<usize>>,
    num_free: usize,
}

impl Presolve {
    fn is_free(&self, i: usize) -> bool {
        self.compact[i].is_some()
    }

    /// Rewrite a row over original indices into free space, folding
    /// constants into the offset.
    fn map_row(&self, row: &SparseVec, mut off: f64) -> (SparseVec, f64) {
        let mut out: SparseVec = Vec::with_capacity(row.len());
        for &(i, a) in row {
            if let Some(v) = self.fixed[i] {
                off += a * v;
            } else if self.is_free(i) {
                out.push((self.compact[i].unwrap(), a));
            } else {
                // substitution rows are already in free (compact) space
                let (_, sub_row, sub_rhs) =
                    self.subs.iter().find(|(p, _, _)| *p == i).expect("pivot substitution");
                off += a * sub_rhs;
                for &(j, c) in sub_row {
                    out.push((j, -a * c));
                }
            }
        }
        out.sort_by_key(|&(i, _)| i);
        let mut merged: SparseVec = Vec::with_capacity(out.len());
        for (i, a) in out {
            if let Some(last) = merged.last_mut() {
                if last.0 == i {
                    last.1 += a;
                    continue;
                }
            }
            merged.push((i, a));
        }
        merged.retain(|&(_, a)| a != 0.0);
        (merged, off)
    }
}

fn build_presolve(p: &GeometricProgram) -> Result<Presolve, ConicError> {
    let n = p.num_vars;
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for (i, &(lo, hi)) in p.bounds.iter().enumerate() {
        if lo > 0.0 && lo == hi {
            if i == p.maximize_var {
                return Err(ConicError::BadProgram("objective variable is pinned".into()));
            }
            fixed[i] = Some(lo.ln());
        }
    }

    // equality rows in log space over non-fixed variables
    let mut rows: Vec<(SparseVec, f64)> = Vec::new();
    for (a, b) in &p.eq {
        let (raw, off) = log_quotient(a, b);
        let mut row: SparseVec = Vec::new();
        let mut rhs = -off;
        for &(i, c) in &raw {
            match fixed[i] {
                Some(v) => rhs -= c * v,
                None => row.push((i, c)),
            }
        }
        rows.push((row, rhs));
    }

    // variables that appear in any multi-variable inequality row are not
    // elimination candidates: substituting them would splatter the
    // equality across the rest of the problem and can cascade through
    // chained equalities with unbounded coefficient growth
    let mut in_multivar_ineq = vec![false; n];
    for (posy, mono) in &p.le {
        for term in &posy.terms {
            let (raw, _) = log_quotient(term, mono);
            let vars: Vec<usize> = raw
                .iter()
                .filter(|&&(i, _)| fixed[i].is_none())
                .map(|&(i, _)| i)
                .collect();
            if vars.len() >= 2 {
                for i in vars {
                    in_multivar_ineq[i] = true;
                }
            }
        }
    }

    // choose pivots: a pivot variable appears in exactly one (live)
    // equality row and nowhere else except single-variable rows, so its
    // elimination cannot cascade
    let mut pivot_of: Vec<Option<usize>> = vec![None; n]; // var -> row
    let mut is_pivot = vec![false; n];
    let mut eliminated = vec![false; rows.len()];
    loop {
        let mut occur = vec![0usize; n];
        for (r, (row, _)) in rows.iter().enumerate() {
            if eliminated[r] {
                continue;
            }
            for &(i, _) in row {
                if !is_pivot[i] {
                    occur[i] += 1;
                }
            }
        }
        let mut progress = false;
        for r in 0..rows.len() {
            if eliminated[r] {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for &(i, c) in &rows[r].0 {
                if i == p.maximize_var
                    || is_pivot[i]
                    || fixed[i].is_some()
                    || in_multivar_ineq[i]
                    || c == 0.0
                {
                    continue;
                }
                if occur[i] == 1 && best.map_or(true, |(_, bc)| c.abs() > bc) {
                    best = Some((i, c.abs()));
                }
            }
            if let Some((pivot, _)) = best {
                is_pivot[pivot] = true;
                pivot_of[pivot] = Some(r);
                eliminated[r] = true;
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }

    let mut compact = vec![None; n];
    let mut num_free = 0;
    for i in 0..n {
        if fixed[i].is_none() && !is_pivot[i] {
            compact[i] = Some(num_free);
            num_free += 1;
        }
    }

    // express each pivot as y_pv = rhs - row . y_free; pivot rows may
    // reference other pivots, so resolve in dependency order
    let mut subs: Vec<(usize, SparseVec, f64)> = Vec::new();
    let mut resolved: Vec<Option<(SparseVec, f64)>> = vec![None; n];
    let mut remaining: Vec<usize> = (0..n).filter(|&i| is_pivot[i]).collect();
    while !remaining.is_empty() {
        let mut next_remaining = Vec::new();
        let mut progress = false;
        for &pv in &remaining {
            let r = pivot_of[pv].unwrap();
            let (row, rhs) = &rows[r];
            let coef = row.iter().find(|&&(i, _)| i == pv).map(|&(_, c)| c).unwrap();
            // y_pv = rhs/coef - sum_{i != pv} (c_i/coef) y_i
            let mut ok = true;
            let mut out: SparseVec = Vec::new();
            let mut out_rhs = rhs / coef;
            for &(i, c) in row {
                if i == pv {
                    continue;
                }
                let scale = c / coef;
                if let Some(free_idx) = compact[i] {
                    out.push((free_idx, scale));
                } else if let Some(v) = fixed[i] {
                    out_rhs -= scale * v;
                } else if let Some((sub_row, sub_rhs)) = &resolved[i] {
                    // y_i = sub_rhs - sub_row . y_free
                    out_rhs -= scale * sub_rhs;
                    for &(j, sc) in sub_row {
                        out.push((j, -scale * sc));
                    }
                } else {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.sort_by_key(|&(i, _)| i);
                let mut merged: SparseVec = Vec::new();
                for (i, a) in out {
                    if let Some(last) = merged.last_mut() {
                        if last.0 == i {
                            last.1 += a;
                            continue;
                        }
                    }
                    merged.push((i, a));
                }
                merged.retain(|&(_, a)| a != 0.0);
                resolved[pv] = Some((merged, out_rhs));
                progress = true;
            } else {
                next_remaining.push(pv);
            }
        }
        if !progress {
            return Err(ConicError::BadProgram("cyclic equality substitutions".into()));
        }
        remaining = next_remaining;
    }
    for i in 0..n {
        if is_pivot[i] {
            let (row, rhs) = resolved[i].clone().unwrap();
            subs.push((i, row, rhs));
        }
    }

    // residual equalities (no exclusive pivot): keep as rows over free vars
    let presolve = Presolve { fixed, subs, residual_eq: Vec::new(), compact, num_free };
    let mut residual_eq = Vec::new();
    for (r, (row, rhs)) in rows.iter().enumerate() {
        if eliminated[r] {
            continue;
        }
        let (free_row, off) = presolve.map_row(row, 0.0);
        let rhs = rhs - off;
        if free_row.is_empty() {
            if rhs.abs() > 1e-9 {
                return Err(ConicError::BadProgram(format!(
                    "inconsistent monomial equality (residual {rhs})"
                )));
            }
            continue;
        }
        residual_eq.push((free_row, rhs));
    }
    Ok(Presolve { residual_eq, ..presolve })
}

/// Solve a GP to relative tolerance `tol` on the log-transformed convex
/// program. Returns strictly positive variables on success.
pub fn solve_gp(p: &GeometricProgram, tol: f64) -> Result<Outcome, ConicError> {
    p.check()?;
    let n = p.num_vars;
    let pre = build_presolve(p)?;
    let nf = pre.num_free;

    // extra variables: one per posynomial term of every multi-term constraint
    let mut num_extra = 0;
    for (posy, _) in &p.le {
        if posy.terms.len() > 1 {
            num_extra += posy.terms.len();
        }
    }
    let total = nf + num_extra;
    let mut rb = RowBuilder::new();

    rb.push_eq_block(pre.residual_eq.clone());

    // single-term constraints and box bounds are linear in log space
    let mut le_rows: Vec<(SparseVec, f64)> = Vec::new();
    for (posy, mono) in &p.le {
        if posy.terms.len() == 1 {
            let (row, off) = log_quotient(&posy.terms[0], mono);
            let (row, off) = pre.map_row(&row, off);
            le_rows.push((row, -off));
        }
    }
    for (i, &(lo, hi)) in p.bounds.iter().enumerate() {
        if pre.fixed[i].is_some() {
            continue;
        }
        if lo > 0.0 {
            let (row, off) = pre.map_row(&vec![(i, -1.0)], 0.0);
            le_rows.push((row, -lo.ln() - off));
        }
        if hi.is_finite() {
            let (row, off) = pre.map_row(&vec![(i, 1.0)], 0.0);
            le_rows.push((row, hi.ln() - off));
        }
    }

    // multi-term constraints: u_k >= exp(log term_k / rhs), sum_k u_k <= 1
    let mut next_u = nf;
    let mut exp_rows: Vec<(SparseVec, f64, usize)> = Vec::new();
    for (posy, mono) in &p.le {
        if posy.terms.len() > 1 {
            let mut sum_row: SparseVec = Vec::with_capacity(posy.terms.len());
            for term in &posy.terms {
                let (row, off) = log_quotient(term, mono);
                let (row, off) = pre.map_row(&row, off);
                exp_rows.push((row, off, next_u));
                sum_row.push((next_u, 1.0));
                next_u += 1;
            }
            le_rows.push((sum_row, 1.0));
        }
    }
    rb.push_le_block(le_rows);
    for (row, off, u) in exp_rows {
        rb.push_exp(row, off, u);
    }

    let obj_free = pre.compact[p.maximize_var]
        .ok_or_else(|| ConicError::BadProgram("objective variable eliminated".into()))?;
    let mut q = vec![0.0; total];
    q[obj_free] = -1.0;
    let raw = rb.solve(total, &q, tol)?;
    Ok(match raw.into_outcome(|_| 0.0) {
        Outcome::Optimal(sol) => {
            // reconstruct the full variable vector
            let mut y = vec![0.0; n];
            for i in 0..n {
                if let Some(f) = pre.compact[i] {
                    y[i] = sol.x[f];
                } else if let Some(v) = pre.fixed[i] {
                    y[i] = v;
                }
            }
            for (pv, row, rhs) in &pre.subs {
                let mut v = *rhs;
                for &(j, c) in row {
                    v -= c * sol.x[j];
                }
                y[*pv] = v;
            }
            let v: Vec<f64> = y.iter().map(|y| y.exp()).collect();
            let value = v[p.maximize_var];
            Outcome::Optimal(Solution { value, x: v, iterations: sol.iterations })
        }
        other => other,
    })
}
