//! Second-order cone programs.

use super::backend::RowBuilder;
use super::{sparse_dot, ConicError, Outcome, Sense, SparseVec};

/// One cone constraint `||A x + b|| <= c . x + d`, rows of `A` sparse.
#[derive(Debug, Clone)]
pub struct SocCone {
    pub a_rows: Vec<SparseVec>,
    pub a_offsets: Vec<f64>,
    pub c: SparseVec,
    pub d: f64,
}

impl SocCone {
    /// `||x_sel - target|| <= rhs_var + rhs_off`, a common special case.
    pub fn dist_le(sel: &[usize], target: &[f64], rhs: SparseVec, rhs_off: f64) -> Self {
        let a_rows = sel.iter().map(|&i| vec![(i, 1.0)]).collect();
        let a_offsets = target.iter().map(|t| -t).collect();
        Self { a_rows, a_offsets, c: rhs, d: rhs_off }
    }
}

/// `optimize c . x` subject to second-order cones, linear rows, and bounds.
#[derive(Debug, Clone)]
pub struct SecondOrderProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub cones: Vec<SocCone>,
    pub lin_le: Vec<(SparseVec, f64)>,
    pub lin_eq: Vec<(SparseVec, f64)>,
    pub bounds: Vec<(f64, f64)>,
}

impl SecondOrderProgram {
    pub fn new(num_vars: usize, sense: Sense, objective: Vec<f64>) -> Self {
        Self {
            num_vars,
            sense,
            objective,
            cones: Vec::new(),
            lin_le: Vec::new(),
            lin_eq: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); num_vars],
        }
    }
}

/// Solve an SOCP to the given tolerance; statuses as in [`super::solve_lp`].
pub fn solve_socp(p: &SecondOrderProgram, tol: f64) -> Result<Outcome, ConicError> {
    if p.objective.len() != p.num_vars || p.bounds.len() != p.num_vars {
        return Err(ConicError::BadProgram(
            "objective/bounds length does not match num_vars".into(),
        ));
    }
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
    for cone in &p.cones {
        if cone.a_rows.len() != cone.a_offsets.len() {
            return Err(ConicError::BadProgram("cone rows/offsets mismatch".into()));
        }
        let rows: Vec<(SparseVec, f64)> = cone
            .a_rows
            .iter()
            .cloned()
            .zip(cone.a_offsets.iter().cloned())
            .collect();
        rb.push_soc(rows, cone.c.clone(), cone.d);
    }
    let q: Vec<f64> = match p.sense {
        Sense::Minimize => p.objective.clone(),
        Sense::Maximize => p.objective.iter().map(|c| -c).collect(),
    };
    let raw = rb.solve(p.num_vars, &q, tol)?;
    Ok(raw.into_outcome(|x| {
        sparse_dot(
            &p.objective.iter().cloned().enumerate().collect::<Vec<_>>(),
            x,
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_center_of_two_points() {
        // min d s.t. d >= ||s - (0,0)||, d >= ||s - (2,0)||  ->  d* = 1 at (1, 0)
        let mut p = SecondOrderProgram::new(3, Sense::Minimize, vec![1.0, 0.0, 0.0]);
        p.cones.push(SocCone::dist_le(&[1, 2], &[0.0, 0.0], vec![(0, 1.0)], 0.0));
        p.cones.push(SocCone::dist_le(&[1, 2], &[2.0, 0.0], vec![(0, 1.0)], 0.0));
        let out = solve_socp(&p, 1e-9).unwrap();
        let sol = out.optimal().unwrap();
        assert!((sol.value - 1.0).abs() < 1e-7);
        assert!((sol.x[1] - 1.0).abs() < 1e-6);
        assert!(sol.x[2].abs() < 1e-6);
    }

    #[test]
    fn one_center_of_single_point() {
        let mut p = SecondOrderProgram::new(3, Sense::Minimize, vec![1.0, 0.0, 0.0]);
        p.cones.push(SocCone::dist_le(&[1, 2], &[0.7, -0.3], vec![(0, 1.0)], 0.0));
        let out = solve_socp(&p, 1e-9).unwrap();
        let sol = out.optimal().unwrap();
        assert!(sol.value.abs() < 1e-6);
        assert!((sol.x[1] - 0.7).abs() < 1e-5);
        assert!((sol.x[2] + 0.3).abs() < 1e-5);
    }

    #[test]
    fn unit_triangle_circumradius() {
        // smallest enclosing circle of an equilateral triangle with side 1:
        // radius 1/sqrt(3); brute-force grid search is the oracle.
        let pts = [
            [0.0, 0.0],
            [1.0, 0.0],
            [0.5, 3.0f64.sqrt() / 2.0],
        ];
        let mut p = SecondOrderProgram::new(3, Sense::Minimize, vec![1.0, 0.0, 0.0]);
        for pt in &pts {
            p.cones.push(SocCone::dist_le(&[1, 2], pt, vec![(0, 1.0)], 0.0));
        }
        let out = solve_socp(&p, 1e-10).unwrap();
        let sol = out.optimal().unwrap();
        assert!((sol.value - 1.0 / 3.0f64.sqrt()).abs() < 1e-7, "{}", sol.value);

        // independent oracle: coarse-to-fine grid search over centers
        let mut best = f64::INFINITY;
        let (mut cx, mut cy, mut half) = (0.5, 0.3, 0.6);
        for _ in 0..12 {
            let steps = 20;
            let mut arg = (cx, cy);
            for ix in 0..=steps {
                for iy in 0..=steps {
                    let x = cx - half + 2.0 * half * ix as f64 / steps as f64;
                    let y = cy - half + 2.0 * half * iy as f64 / steps as f64;
                    let r = pts
                        .iter()
                        .map(|p| ((p[0] - x).powi(2) + (p[1] - y).powi(2)).sqrt())
                        .fold(0.0f64, f64::max);
                    if r < best {
                        best = r;
                        arg = (x, y);
                    }
                }
            }
            cx = arg.0;
            cy = arg.1;
            half /= 4.0;
        }
        assert!((sol.value - best).abs() < 1e-3, "socp {} grid {}", sol.value, best);
    }

    #[test]
    fn infeasible_cone_detected() {
        // ||x|| <= -1 is empty
        let mut p = SecondOrderProgram::new(1, Sense::Minimize, vec![0.0]);
        p.cones.push(SocCone {
            a_rows: vec![vec![(0, 1.0)]],
            a_offsets: vec![0.0],
            c: vec![],
            d: -1.0,
        });
        let out = solve_socp(&p, 1e-9).unwrap();
        assert!(out.is_infeasible());
    }
}
