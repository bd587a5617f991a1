//! Hotspot-to-stripe clustering and cluster head placement.
//!
//! The planning metric is the penalized path loss
//! `Delta = eta * ||s - c||^(b+2) / e^b` between a candidate head `s` and a
//! hotspot (center `c`, elevation offset `e` to the ceiling, density
//! `eta`). Two procedures produce a [`ClusterSolution`]:
//!
//! - [`fac_ao`]: alternating optimization that interleaves min-max head
//!   placement (bisection over the objective with SOCP feasibility
//!   subproblems) with an LP relaxation of the assignment, then projects to
//!   a binary assignment.
//! - [`chebyshev_cluster`]: Lloyd-style baseline that assigns by Chebyshev
//!   distance and recenters heads at the bounding-box midpoint of their
//!   cluster; also the default initializer for [`fac_ao`].

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conic::{solve_lp, solve_socp, ConicError, LinearProgram, SecondOrderProgram, Sense, SocCone};
use crate::scenario::{Hotspot, Point3};

/// Relative bisection tolerance for head placement.
pub const HEAD_BISECTION_TOL: f64 = 1e-9;

/// Weights below this are treated as "not served" during head placement.
const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("hotspot {index} is not below the ceiling (e = {e} m)")]
    HotspotNotBelowCeiling { index: usize, e: f64 },
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("more stripes ({u}) than hotspots ({k})")]
    TooManyStripes { u: usize, k: usize },
    #[error("assignment matrix shape mismatch")]
    ShapeMismatch,
    #[error(transparent)]
    Solver(#[from] ConicError),
    #[error("solution invariant violated: {0}")]
    Invariant(String),
}

/// Binary hotspot-to-stripe assignment with head positions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterSolution {
    /// `assignment[u][i] = 1` iff stripe `u` serves hotspot `i`; each
    /// hotspot is served by exactly one stripe.
    pub assignment: Vec<Vec<u8>>,
    /// Cluster head positions, one per stripe, at ceiling height.
    pub heads: Vec<Point3>,
    /// `max_{u,i} assignment[u][i] * Delta(head_u, hotspot_i)`.
    pub objective: f64,
}

impl ClusterSolution {
    /// Index of the stripe serving hotspot `i`.
    pub fn stripe_of(&self, i: usize) -> usize {
        self.assignment.iter().position(|row| row[i] == 1).expect("hotspot unassigned")
    }

    /// Hotspot indices served by stripe `u`.
    pub fn members(&self, u: usize) -> Vec<usize> {
        self.assignment[u]
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v == 1).then_some(i))
            .collect()
    }

    pub fn num_stripes(&self) -> usize {
        self.assignment.len()
    }

    /// Check the solution invariants against the hotspot list.
    pub fn validate(&self, hotspots: &[Hotspot], b: f64, ceiling_h: f64) -> Result<(), ClusterError> {
        let u = self.assignment.len();
        if self.heads.len() != u {
            return Err(ClusterError::ShapeMismatch);
        }
        let k = hotspots.len();
        for row in &self.assignment {
            if row.len() != k {
                return Err(ClusterError::ShapeMismatch);
            }
            if row.iter().any(|&v| v > 1) {
                return Err(ClusterError::Invariant("assignment entries must be 0/1".into()));
            }
        }
        for i in 0..k {
            let col: u32 = self.assignment.iter().map(|row| row[i] as u32).sum();
            if col != 1 {
                return Err(ClusterError::Invariant(format!(
                    "hotspot {i} assigned to {col} stripes"
                )));
            }
        }
        let recomputed = assignment_objective(&self.assignment, &self.heads, hotspots, b, ceiling_h)?;
        let scale = recomputed.abs().max(1e-300);
        if (recomputed - self.objective).abs() / scale > 1e-9 {
            return Err(ClusterError::Invariant(format!(
                "objective {} does not match recomputed {recomputed}",
                self.objective
            )));
        }
        Ok(())
    }
}

/// One clustering run: the solution plus the per-iteration objective trace.
#[derive(Debug, Clone)]
pub struct ClusterRun {
    pub solution: ClusterSolution,
    /// Objective after each iteration (relaxed objective for [`fac_ao`],
    /// Chebyshev radius for [`chebyshev_cluster`]).
    pub trace: Vec<f64>,
}

/// Penalized path loss `Delta = eta * ||s - c||^(b+2) / e^b`.
pub fn loss_metric(head: &Point3, hotspot: &Hotspot, b: f64, ceiling_h: f64) -> Result<f64, ClusterError> {
    let e = hotspot.elevation_offset(ceiling_h);
    if e <= 0.0 {
        return Err(ClusterError::HotspotNotBelowCeiling { index: 0, e });
    }
    let d = head.dist(&hotspot.center);
    Ok(hotspot.density * d.powf(b + 2.0) / e.powf(b))
}

fn assignment_objective(
    assignment: &[Vec<u8>],
    heads: &[Point3],
    hotspots: &[Hotspot],
    b: f64,
    ceiling_h: f64,
) -> Result<f64, ClusterError> {
    let mut worst = 0.0f64;
    for (u, row) in assignment.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            if v == 1 {
                worst = worst.max(loss_metric(&heads[u], &hotspots[i], b, ceiling_h)?);
            }
        }
    }
    Ok(worst)
}

/// Max of `w_i * Delta_i(s)` over weighted hotspots, for a head at `(x, y)`
/// on the ceiling.
fn weighted_max_loss(
    xy: (f64, f64),
    weights: &[(usize, f64)],
    hotspots: &[Hotspot],
    b: f64,
    ceiling_h: f64,
) -> f64 {
    let head = Point3::new(xy.0, xy.1, ceiling_h);
    weights
        .iter()
        .map(|&(i, w)| {
            let h = &hotspots[i];
            let d = head.dist(&h.center);
            w * d.powf(b + 2.0) / h.elevation_offset(ceiling_h).powf(b)
        })
        .fold(0.0f64, f64::max)
}

/// SOCP feasibility of `||s - c_i||_xy <= rho_i` for all i: minimizes the
/// common slack and returns it with its minimizer. The discs intersect iff
/// the slack is nonpositive.
fn disc_intersection(
    centers: &[(f64, f64)],
    rhos: &[f64],
    tol: f64,
) -> Result<(f64, (f64, f64)), ClusterError> {
    // vars: [tau, sx, sy]; min tau s.t. ||s - c_i|| <= rho_i + tau
    let mut p = SecondOrderProgram::new(3, Sense::Minimize, vec![1.0, 0.0, 0.0]);
    for (c, &rho) in centers.iter().zip(rhos.iter()) {
        p.cones.push(SocCone::dist_le(&[1, 2], &[c.0, c.1], vec![(0, 1.0)], rho));
    }
    match solve_socp(&p, tol)? {
        crate::conic::Outcome::Optimal(sol) => Ok((sol.value, (sol.x[1], sol.x[2]))),
        // the slack formulation is always feasible; anything else is a failure
        other => Err(ClusterError::Invariant(format!(
            "disc feasibility subproblem returned {other:?}"
        ))),
    }
}

/// Weighted min-max head placement for one stripe: minimize over `s` (on
/// the ceiling) of `max_i w_i ||s - c_i||^(b+2) / e_i^b`, by bisection on
/// the objective with SOCP feasibility subproblems.
///
/// `warm` optionally provides an incumbent head whose value tightens the
/// bisection's upper bound.
fn place_head(
    weights: &[(usize, f64)],
    hotspots: &[Hotspot],
    b: f64,
    ceiling_h: f64,
    tol: f64,
    warm: Option<(f64, f64)>,
) -> Result<(Point3, f64), ClusterError> {
    assert!(!weights.is_empty());
    for &(i, _) in weights {
        let e = hotspots[i].elevation_offset(ceiling_h);
        if e <= 0.0 {
            return Err(ClusterError::HotspotNotBelowCeiling { index: i, e });
        }
    }
    if weights.len() == 1 {
        // only feasible minimizer of distance sits directly above
        let c = hotspots[weights[0].0].center;
        let e = ceiling_h - c.z;
        let value = weights[0].1 * e * e;
        return Ok((Point3::new(c.x, c.y, ceiling_h), value));
    }

    // bounds: each Delta_i is at least w_i e_i^2 (head no closer than e_i);
    // the weighted centroid and the incumbent provide achievable values
    let mut lo = 0.0f64;
    for &(i, w) in weights {
        let e = hotspots[i].elevation_offset(ceiling_h);
        lo = lo.max(w * e * e);
    }
    let wsum: f64 = weights.iter().map(|&(_, w)| w).sum();
    let centroid = weights.iter().fold((0.0, 0.0), |acc, &(i, w)| {
        (
            acc.0 + w * hotspots[i].center.x / wsum,
            acc.1 + w * hotspots[i].center.y / wsum,
        )
    });
    let mut hi = weighted_max_loss(centroid, weights, hotspots, b, ceiling_h);
    let mut best = centroid;
    if let Some(warm_xy) = warm {
        let warm_val = weighted_max_loss(warm_xy, weights, hotspots, b, ceiling_h);
        if warm_val < hi {
            hi = warm_val;
            best = warm_xy;
        }
    }

    // hotspots that cannot reach the objective level anywhere within the
    // candidate region (the hull of active centers) are dropped outright
    let diam_sq = {
        let mut d: f64 = 0.0;
        for &(i, _) in weights {
            for &(j, _) in weights {
                d = d.max(hotspots[i].center.dist_xy(&hotspots[j].center));
            }
        }
        d * d
    };
    let active: Vec<(usize, f64)> = weights
        .iter()
        .cloned()
        .filter(|&(i, w)| {
            let h = &hotspots[i];
            let e = h.elevation_offset(ceiling_h);
            let max_delta = w * (diam_sq + e * e).powf((b + 2.0) / 2.0) / e.powf(b);
            max_delta >= 1e-12 * hi
        })
        .collect();

    let centers: Vec<(f64, f64)> = active
        .iter()
        .map(|&(i, _)| (hotspots[i].center.x, hotspots[i].center.y))
        .collect();
    // slack of the disc intersection at objective level t; positive means
    // infeasible, and the slack decreases monotonically in t
    let mut rhos = vec![0.0f64; active.len()];
    let mut slack_at = |t: f64| -> Result<(f64, Option<(f64, f64)>), ClusterError> {
        for (slot, &(i, w)) in rhos.iter_mut().zip(active.iter()) {
            let e = hotspots[i].elevation_offset(ceiling_h);
            let r = (t * e.powf(b) / w).powf(1.0 / (b + 2.0));
            let rho_sq = r * r - e * e;
            if rho_sq < 0.0 {
                return Ok((f64::INFINITY, None));
            }
            *slot = rho_sq.sqrt();
        }
        // a disc that wholly contains another disc is redundant
        let mut keep = vec![true; centers.len()];
        for i in 0..centers.len() {
            for j in 0..centers.len() {
                if i == j || !keep[j] {
                    continue;
                }
                let dx = centers[i].0 - centers[j].0;
                let dy = centers[i].1 - centers[j].1;
                if (dx * dx + dy * dy).sqrt() + rhos[j] <= rhos[i] {
                    keep[i] = false;
                    break;
                }
            }
        }
        let kept_centers: Vec<(f64, f64)> = centers
            .iter()
            .zip(keep.iter())
            .filter_map(|(c, &k)| k.then_some(*c))
            .collect();
        let kept_rhos: Vec<f64> = rhos
            .iter()
            .zip(keep.iter())
            .filter_map(|(r, &k)| k.then_some(*r))
            .collect();
        let (tau, s) = disc_intersection(&kept_centers, &kept_rhos, 1e-7)?;
        Ok((tau, Some(s)))
    };

    // bisection on the sign of the slack, to relative tolerance tol
    for _ in 0..200 {
        if hi - lo <= tol * hi.max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (tau, s) = slack_at(mid)?;
        if tau <= 0.0 {
            if let Some(s) = s {
                best = s;
            }
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let value = weighted_max_loss(best, weights, hotspots, b, ceiling_h);
    Ok((Point3::new(best.0, best.1, ceiling_h), value))
}

/// Optimal head positions for a fixed binary assignment; returns the heads
/// and the resulting max penalized loss.
pub fn optimize_heads(
    assignment: &[Vec<u8>],
    hotspots: &[Hotspot],
    b: f64,
    ceiling_h: f64,
    tol: f64,
) -> Result<(Vec<Point3>, f64), ClusterError> {
    let mut heads = Vec::with_capacity(assignment.len());
    let mut worst = 0.0f64;
    for (u, row) in assignment.iter().enumerate() {
        let weights: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (v == 1).then(|| (i, hotspots[i].density)))
            .collect();
        if weights.is_empty() {
            return Err(ClusterError::EmptyCluster(u));
        }
        let (head, value) = place_head(&weights, hotspots, b, ceiling_h, tol, None)?;
        worst = worst.max(value);
        heads.push(head);
    }
    Ok((heads, worst))
}

/// LP relaxation of the assignment for fixed heads. Returns the fractional
/// assignment `[u][i]` and the relaxed objective.
pub fn relax_assign(
    heads: &[Point3],
    hotspots: &[Hotspot],
    b: f64,
    ceiling_h: f64,
) -> Result<(Vec<Vec<f64>>, f64), ClusterError> {
    let u_count = heads.len();
    let k = hotspots.len();
    let mut delta = vec![vec![0.0; k]; u_count];
    for (u, head) in heads.iter().enumerate() {
        for (i, h) in hotspots.iter().enumerate() {
            delta[u][i] = loss_metric(head, h, b, ceiling_h)?;
        }
    }
    // vars: [t, v_{0,0} .. v_{U-1,K-1}] row-major by stripe
    let var = |u: usize, i: usize| 1 + u * k + i;
    let n = 1 + u_count * k;
    let mut obj = vec![0.0; n];
    obj[0] = 1.0;
    let mut p = LinearProgram::new(n, Sense::Minimize, obj);
    p.bounds[0] = (0.0, f64::INFINITY);
    for u in 0..u_count {
        for i in 0..k {
            p.bounds[var(u, i)] = (0.0, 1.0);
            p.lin_le.push((vec![(var(u, i), delta[u][i]), (0, -1.0)], 0.0));
        }
    }
    for i in 0..k {
        let row: Vec<(usize, f64)> = (0..u_count).map(|u| (var(u, i), 1.0)).collect();
        p.lin_eq.push((row, 1.0));
    }
    let sol = match solve_lp(&p, 1e-10)? {
        crate::conic::Outcome::Optimal(sol) => sol,
        other => panic!("assignment LP cannot be {other:?} for valid inputs"),
    };
    let mut v = vec![vec![0.0; k]; u_count];
    for u in 0..u_count {
        for i in 0..k {
            v[u][i] = sol.x[var(u, i)].clamp(0.0, 1.0);
        }
    }
    // report the max constraint value at the optimum
    let t = v
        .iter()
        .zip(delta.iter())
        .flat_map(|(vr, dr)| vr.iter().zip(dr.iter()).map(|(&v, &d)| v * d))
        .fold(0.0f64, f64::max);
    Ok((v, t))
}

/// Project a fractional assignment to one-hot per hotspot at the
/// per-column argmax; ties break toward the lowest stripe index.
pub fn project_assignment(v: &[Vec<f64>]) -> Vec<Vec<u8>> {
    let u_count = v.len();
    let k = v.first().map_or(0, |row| row.len());
    let mut out = vec![vec![0u8; k]; u_count];
    for i in 0..k {
        let mut best = 0usize;
        for u in 1..u_count {
            if v[u][i] > v[best][i] {
                best = u;
            }
        }
        out[best][i] = 1;
    }
    out
}

fn fractional_max_loss(
    v: &[Vec<f64>],
    heads: &[Point3],
    hotspots: &[Hotspot],
    b: f64,
    ceiling_h: f64,
) -> Result<f64, ClusterError> {
    let mut worst = 0.0f64;
    for (u, row) in v.iter().enumerate() {
        for (i, &vi) in row.iter().enumerate() {
            if vi > 0.0 {
                worst = worst.max(vi * loss_metric(&heads[u], &hotspots[i], b, ceiling_h)?);
            }
        }
    }
    Ok(worst)
}

/// Fairness-aware clustering via alternating optimization.
///
/// Alternates weighted min-max head placement with the LP assignment
/// relaxation until the relaxed objective settles (`|1 - t/t'| < eps`),
/// then projects to a binary assignment, repairs empty clusters, and
/// re-optimizes heads once for the final assignment.
pub fn fac_ao(
    hotspots: &[Hotspot],
    init: &ClusterSolution,
    b: f64,
    ceiling_h: f64,
    eps: f64,
) -> Result<ClusterRun, ClusterError> {
    let u_count = init.assignment.len();
    let k = hotspots.len();
    if u_count > k {
        return Err(ClusterError::TooManyStripes { u: u_count, k });
    }
    let mut v: Vec<Vec<f64>> = init
        .assignment
        .iter()
        .map(|row| row.iter().map(|&x| x as f64).collect())
        .collect();
    let mut heads = init.heads.clone();
    let mut solved_weights: Vec<Option<Vec<(usize, f64)>>> = vec![None; u_count];
    let mut trace = Vec::new();
    let mut t_prev = f64::INFINITY;

    for _ in 0..200 {
        // head update: per-stripe weighted min-max, guarded so the
        // objective under the current v never increases; a head whose
        // weight column is unchanged since its last solve keeps its
        // cached position
        for u in 0..u_count {
            let weights: Vec<(usize, f64)> = (0..k)
                .filter_map(|i| {
                    let w = hotspots[i].density * v[u][i];
                    (w > WEIGHT_FLOOR).then_some((i, w))
                })
                .collect();
            if weights.is_empty() {
                continue; // stripe momentarily unused by the relaxation
            }
            if solved_weights[u].as_ref() == Some(&weights) {
                continue;
            }
            let (cand, _) = place_head(
                &weights,
                hotspots,
                b,
                ceiling_h,
                HEAD_BISECTION_TOL,
                Some((heads[u].x, heads[u].y)),
            )?;
            let old = weighted_max_loss((heads[u].x, heads[u].y), &weights, hotspots, b, ceiling_h);
            let new = weighted_max_loss((cand.x, cand.y), &weights, hotspots, b, ceiling_h);
            if new <= old {
                heads[u] = cand;
            }
            solved_weights[u] = Some(weights);
        }

        // assignment update via the LP relaxation, guarded the same way
        let (v_new, _) = relax_assign(&heads, hotspots, b, ceiling_h)?;
        let t_new = fractional_max_loss(&v_new, &heads, hotspots, b, ceiling_h)?;
        let t_keep = fractional_max_loss(&v, &heads, hotspots, b, ceiling_h)?;
        let t = if t_new <= t_keep {
            v = v_new;
            t_new
        } else {
            t_keep
        };
        trace.push(t);
        if t_prev.is_finite() && (1.0 - t / t_prev).abs() < eps {
            break;
        }
        t_prev = t;
    }

    // projection and empty-cluster repair
    let mut assignment = project_assignment(&v);
    loop {
        let empty: Vec<usize> = (0..u_count)
            .filter(|&u| assignment[u].iter().all(|&x| x == 0))
            .collect();
        if empty.is_empty() {
            break;
        }
        // move the worst-served hotspot out of a cluster with >= 2 members
        let mut worst: Option<(usize, usize, f64)> = None; // (u, i, delta)
        for u in 0..u_count {
            let members: Vec<usize> = (0..k).filter(|&i| assignment[u][i] == 1).collect();
            if members.len() < 2 {
                continue;
            }
            for &i in &members {
                let d = loss_metric(&heads[u], &hotspots[i], b, ceiling_h)?;
                if worst.map_or(true, |(_, _, w)| d > w) {
                    worst = Some((u, i, d));
                }
            }
        }
        let (u_from, i_move, _) = worst.expect("repair requires a donor cluster (U <= K)");
        assignment[u_from][i_move] = 0;
        assignment[empty[0]][i_move] = 1;
    }

    let (heads, objective) = optimize_heads(&assignment, hotspots, b, ceiling_h, HEAD_BISECTION_TOL)?;
    let solution = ClusterSolution { assignment, heads, objective };
    solution.validate(hotspots, b, ceiling_h)?;
    Ok(ClusterRun { solution, trace })
}

/// 2-D Chebyshev distance in the horizontal plane.
pub fn chebyshev_xy(a: &Point3, b: &Point3) -> f64 {
    (a.x - b.x).abs().max((a.y - b.y).abs())
}

/// K-means-style clustering with Chebyshev distances: assign each hotspot
/// to the nearest head, recenter each head at the midpoint of its
/// cluster's horizontal bounding box. Stops when the assignment is stable
/// or after `max_iter` rounds.
pub fn chebyshev_cluster(
    hotspots: &[Hotspot],
    u_count: usize,
    b: f64,
    ceiling_h: f64,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterRun, ClusterError> {
    let k = hotspots.len();
    if u_count > k {
        return Err(ClusterError::TooManyStripes { u: u_count, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, k, u_count);
    let mut heads: Vec<Point3> = picks
        .iter()
        .map(|i| {
            let c = hotspots[i].center;
            Point3::new(c.x, c.y, ceiling_h)
        })
        .collect();

    let mut assign = vec![usize::MAX; k];
    let mut trace = Vec::new();
    for _ in 0..max_iter {
        // assignment step
        let mut next = vec![0usize; k];
        for (i, h) in hotspots.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = chebyshev_xy(&heads[0], &h.center);
            for (u, head) in heads.iter().enumerate().skip(1) {
                let d = chebyshev_xy(head, &h.center);
                if d < best_d {
                    best = u;
                    best_d = d;
                }
            }
            next[i] = best;
        }
        // empty-cluster repair: move the farthest-assigned hotspot in
        for u in 0..u_count {
            if next.iter().any(|&a| a == u) {
                continue;
            }
            let donor = (0..k)
                .filter(|&i| {
                    let owner = next[i];
                    next.iter().filter(|&&a| a == owner).count() >= 2
                })
                .max_by(|&i, &j| {
                    let di = chebyshev_xy(&heads[next[i]], &hotspots[i].center);
                    let dj = chebyshev_xy(&heads[next[j]], &hotspots[j].center);
                    di.partial_cmp(&dj).unwrap()
                })
                .expect("U <= K guarantees a donor");
            next[donor] = u;
        }
        let stable = next == assign;
        assign = next;
        // update step: Chebyshev 1-center of each cluster
        for (u, head) in heads.iter_mut().enumerate() {
            let xs: Vec<f64> = (0..k).filter(|&i| assign[i] == u).map(|i| hotspots[i].center.x).collect();
            let ys: Vec<f64> = (0..k).filter(|&i| assign[i] == u).map(|i| hotspots[i].center.y).collect();
            let x = 0.5
                * (xs.iter().cloned().fold(f64::INFINITY, f64::min)
                    + xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            let y = 0.5
                * (ys.iter().cloned().fold(f64::INFINITY, f64::min)
                    + ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            *head = Point3::new(x, y, ceiling_h);
        }
        let radius = (0..k)
            .map(|i| chebyshev_xy(&heads[assign[i]], &hotspots[i].center))
            .fold(0.0f64, f64::max);
        trace.push(radius);
        if stable {
            break;
        }
    }

    let mut assignment = vec![vec![0u8; k]; u_count];
    for (i, &u) in assign.iter().enumerate() {
        assignment[u][i] = 1;
    }
    let objective = assignment_objective(&assignment, &heads, hotspots, b, ceiling_h)?;
    let solution = ClusterSolution { assignment, heads, objective };
    solution.validate(hotspots, b, ceiling_h)?;
    Ok(ClusterRun { solution, trace })
}

/// [`chebyshev_cluster`] followed by [`fac_ao`] with that result as the
/// initial point, the default pipeline.
pub fn fac_ao_default(
    hotspots: &[Hotspot],
    u_count: usize,
    b: f64,
    ceiling_h: f64,
    eps: f64,
    seed: u64,
) -> Result<ClusterRun, ClusterError> {
    let init = chebyshev_cluster(hotspots, u_count, b, ceiling_h, seed, 100)?;
    fac_ao(hotspots, &init.solution, b, ceiling_h, eps)
}
