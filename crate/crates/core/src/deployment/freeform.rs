//! Free-form deployment by iterated GP condensation of the full signomial
//! program.
//!
//! The placement problem keeps every element coordinate free and carries
//! explicit distance variables `d_{j,i}` (element to hotspot) and
//! `alpha_{j,n}` (element pairs). The non-monomial sides of the squared
//! distance identities are replaced with local monomial surrogates around
//! the current expansion point and the resulting GP is solved inside a box
//! trust region; the solution becomes the next expansion point. When the
//! pair-distance equality makes the GP infeasible, it is relaxed to a
//! two-sided band `h_bar / rho <= h_prime <= rho h_bar` for one retry, and
//! the trust region shrinks on repeated failure.

use crate::conic::surrogates::{
    appendix_coefficients, CrossSurrogate, FreeformExpansion, GainSurrogate, PairSurrogate,
    PairTable,
};
use crate::conic::{solve_gp, GeometricProgram, Monomial, Outcome, Posynomial};
use crate::scenario::Point3;

use super::{
    finish_result, map_to_feasible, shifted_centers, unshift_point, DeployError,
    DeploymentProblem, DeploymentResult, MappingParams, Method, TrustRegionState, COORD_SHIFT,
};

struct VarMap {
    k: usize,
    n: usize,
    pairs: PairTable,
}

impl VarMap {
    fn new(n: usize, k: usize) -> Self {
        Self { k, n, pairs: PairTable::new(n) }
    }
    fn t(&self) -> usize {
        0
    }
    fn p(&self, i: usize) -> usize {
        1 + i
    }
    fn d(&self, j: usize, i: usize) -> usize {
        1 + self.k + j * self.k + i
    }
    fn alpha(&self, j: usize, m: usize) -> usize {
        1 + self.k + self.n * self.k + self.pairs.index(j, m)
    }
    fn g(&self, j: usize, axis: usize) -> usize {
        1 + self.k + self.n * self.k + self.pairs.count() + 2 * j + axis
    }
    fn total(&self) -> usize {
        1 + self.k + self.n * self.k + self.pairs.count() + 2 * self.n
    }
}

fn gain_mono(surr: &GainSurrogate, vars: &[usize]) -> Monomial {
    let mut coeff = surr.value;
    let mut exps = Vec::with_capacity(vars.len());
    for (idx, (&v, &b)) in vars.iter().zip(surr.beta.iter()).enumerate() {
        coeff *= surr.d0[idx].powf(-b);
        exps.push((v, b));
    }
    Monomial::new(coeff, exps)
}

fn cross_mono(surr: &CrossSurrogate, d_var: usize, gx: usize, gy: usize) -> Monomial {
    let coeff = surr.value
        * surr.d0.powf(-surr.beta_d)
        * surr.g0[0].powf(-surr.beta_g[0])
        * surr.g0[1].powf(-surr.beta_g[1]);
    Monomial::new(
        coeff,
        vec![(d_var, surr.beta_d), (gx, surr.beta_g[0]), (gy, surr.beta_g[1])],
    )
}

fn pair_mono(surr: &PairSurrogate, a_var: usize, gj: [usize; 2], gn: [usize; 2]) -> Monomial {
    let coeff = surr.value
        * surr.alpha0.powf(-surr.beta_alpha)
        * surr.gj0[0].powf(-surr.beta_gj[0])
        * surr.gj0[1].powf(-surr.beta_gj[1])
        * surr.gn0[0].powf(-surr.beta_gn[0])
        * surr.gn0[1].powf(-surr.beta_gn[1]);
    Monomial::new(
        coeff,
        vec![
            (a_var, surr.beta_alpha),
            (gj[0], surr.beta_gj[0]),
            (gj[1], surr.beta_gj[1]),
            (gn[0], surr.beta_gn[0]),
            (gn[1], surr.beta_gn[1]),
        ],
    )
}

fn scaled(m: &Monomial, factor: f64) -> Monomial {
    Monomial::new(m.coeff * factor, m.exponents.clone())
}

/// Re-anchor the expansion state on the true geometry of new element
/// positions. Using the solver's d/alpha outputs instead would let the
/// distance variables drift away from the actual layout across
/// iterations, inflating the surrogate objective beyond achievable values.
fn update_expansion(
    state: &mut FreeformExpansion,
    g_new: &[[f64; 2]],
    centers: &[[f64; 3]],
    ceiling_h: f64,
    vm: &VarMap,
) {
    state.g0 = g_new.to_vec();
    for (j, g) in g_new.iter().enumerate() {
        for (i, c) in centers.iter().enumerate() {
            state.d0[j][i] =
                ((g[0] - c[0]).powi(2) + (g[1] - c[1]).powi(2) + (ceiling_h - c[2]).powi(2)).sqrt();
        }
    }
    for (j, m) in vm.pairs.iter() {
        let dx = g_new[j][0] - g_new[m][0];
        let dy = g_new[j][1] - g_new[m][1];
        state.alpha0[vm.pairs.index(j, m)] = (dx * dx + dy * dy).sqrt().max(1e-12);
    }
}

fn build_gp(
    problem: &DeploymentProblem,
    centers: &[[f64; 3]],
    state: &FreeformExpansion,
    omega: f64,
    rho_relax: Option<f64>,
) -> Result<GeometricProgram, DeployError> {
    let n = problem.n_elements;
    let k = problem.hotspots.len();
    let b = problem.boresight_b;
    let hc = problem.ceiling_h;
    let vm = VarMap::new(n, k);
    let coef = appendix_coefficients(state, centers, b, hc)?;

    let mut gp = GeometricProgram::new(vm.total(), vm.t());
    gp.bounds[vm.t()] = (1e-30, 1e30);
    for i in 0..k {
        gp.bounds[vm.p(i)] = (0.0, f64::INFINITY);
    }
    for j in 0..n {
        for i in 0..k {
            let x0 = state.d0[j][i];
            gp.bounds[vm.d(j, i)] = (x0 / omega, x0 * omega);
        }
        for axis in 0..2 {
            let x0 = state.g0[j][axis];
            gp.bounds[vm.g(j, axis)] = (x0 / omega, x0 * omega);
        }
    }
    for (j, m) in vm.pairs.iter() {
        if m == j + 1 {
            // the cable-length cap (sum of consecutive distances at most
            // (N-1) kappa) and the pairwise floor together pin every
            // consecutive distance to exactly kappa; presolve that vertex
            // by pinching the variable rather than leaving the backend to
            // detect the empty interior
            gp.bounds[vm.alpha(j, m)] = (problem.kappa, problem.kappa);
            continue;
        }
        let x0 = state.alpha0[vm.pairs.index(j, m)];
        gp.bounds[vm.alpha(j, m)] = (x0 / omega, x0 * omega);
    }

    // min-gain constraints per hotspot
    for i in 0..k {
        let e = problem.hotspots[i].elevation_offset(hc);
        let eta = problem.hotspots[i].density;
        let d_vars: Vec<usize> = (0..n).map(|j| vm.d(j, i)).collect();
        let rhs = gain_mono(&coef.h_hat[i], &d_vars);
        let lhs = Monomial::new(eta * e.powf(-b), vec![(vm.t(), 1.0), (vm.p(i), -1.0)]);
        gp.le.push((lhs.into(), rhs));
    }

    // squared element-hotspot distance constraints
    for j in 0..n {
        for i in 0..k {
            let c = centers[i];
            let rhs = cross_mono(&coef.h_tilde[j][i], vm.d(j, i), vm.g(j, 0), vm.g(j, 1));
            let const_term = hc * hc + c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
            let lhs = Posynomial {
                terms: vec![
                    Monomial::new(1.0, vec![(vm.d(j, i), -2.0), (vm.g(j, 0), 2.0)]),
                    Monomial::new(1.0, vec![(vm.d(j, i), -2.0), (vm.g(j, 1), 2.0)]),
                    Monomial::new(const_term, vec![(vm.d(j, i), -2.0)]),
                ],
            };
            gp.le.push((lhs, rhs));
        }
    }

    // pair-distance identities, exact or rho-relaxed
    for (j, m) in vm.pairs.iter() {
        let idx = vm.pairs.index(j, m);
        let gj = [vm.g(j, 0), vm.g(j, 1)];
        let gn = [vm.g(m, 0), vm.g(m, 1)];
        let prime = pair_mono(&coef.h_prime[idx], vm.alpha(j, m), gj, gn);
        let bar = pair_mono(&coef.h_bar[idx], vm.alpha(j, m), gj, gn);
        match rho_relax {
            None => gp.eq.push((prime, bar)),
            Some(rho) => {
                gp.le.push((scaled(&bar, 1.0 / rho).into(), prime.clone()));
                gp.le.push((prime.into(), scaled(&bar, rho)));
            }
        }
        if m != j + 1 {
            // minimum pairwise spacing: kappa / alpha <= 1 (consecutive
            // pairs satisfy it exactly through their pinched bounds)
            gp.le.push((
                Monomial::new(problem.kappa, vec![(vm.alpha(j, m), -1.0)]).into(),
                Monomial::constant(1.0),
            ));
        }
    }

    // power budget
    let power = Posynomial { terms: (0..k).map(|i| Monomial::var(vm.p(i))).collect() };
    gp.le.push((power, Monomial::constant(problem.power_budget)));

    Ok(gp)
}

/// Free-form radio stripe deployment by iterated GP condensation.
///
/// Starts from `init` (any layout with `N` elements), iterates the trust
/// region GP until `|1 - t/t'| <= eps`, maps the result onto the feasible
/// cable set, and re-optimizes powers on the mapped geometry.
pub fn sgp_deploy(
    problem: &DeploymentProblem,
    init: &crate::channel::StripeLayout,
    trust: &TrustRegionState,
    eps: f64,
) -> Result<DeploymentResult, DeployError> {
    problem.validate()?;
    let n = problem.n_elements;
    let k = problem.hotspots.len();
    if init.len() != n {
        return Err(DeployError::Invariant(format!(
            "init layout has {} elements, problem expects {n}",
            init.len()
        )));
    }
    let centers = shifted_centers(problem);
    let vm = VarMap::new(n, k);

    // expansion point from the initial layout (shifted, true distances)
    let g0: Vec<[f64; 2]> = init
        .elements
        .iter()
        .map(|p| [p.x + COORD_SHIFT, p.y + COORD_SHIFT])
        .collect();
    let d0: Vec<Vec<f64>> = g0
        .iter()
        .map(|g| {
            centers
                .iter()
                .map(|c| {
                    ((g[0] - c[0]).powi(2) + (g[1] - c[1]).powi(2)
                        + (problem.ceiling_h - c[2]).powi(2))
                    .sqrt()
                })
                .collect()
        })
        .collect();
    let mut alpha0 = vec![0.0; vm.pairs.count()];
    for (j, m) in vm.pairs.iter() {
        let dx = g0[j][0] - g0[m][0];
        let dy = g0[j][1] - g0[m][1];
        alpha0[vm.pairs.index(j, m)] = (dx * dx + dy * dy).sqrt();
    }
    let mut state = FreeformExpansion { g0, d0, alpha0 };

    let mut trace: Vec<f64> = Vec::new();
    let mut t_prev = f64::INFINITY;
    let mut iterations = 0usize;
    let mut converged = false;
    let max_outer = 100usize;
    // Once the exact pair equality proves unsolvable at solver precision
    // (its feasible manifold is razor thin in log space), stay on the
    // rho-relaxed band for the remaining iterations.
    let mut use_relaxed = false;

    // objective of a candidate iterate, re-anchored on its true geometry:
    // the GP keeps d_{j,i} >= ||g_j - c_i|| (surrogates under-estimate
    // their posynomials), so this value is achievable and non-decreasing
    let anchored = |g: &[[f64; 2]], powers: &[f64]| -> f64 {
        let mut worst = f64::INFINITY;
        for (i, c) in centers.iter().enumerate() {
            let h = &problem.hotspots[i];
            let e = h.elevation_offset(problem.ceiling_h);
            let sum: f64 = g
                .iter()
                .map(|gj| {
                    ((gj[0] - c[0]).powi(2) + (gj[1] - c[1]).powi(2)
                        + (problem.ceiling_h - c[2]).powi(2))
                    .sqrt()
                    .powf(-(problem.boresight_b + 2.0))
                })
                .sum();
            worst = worst.min(powers[i] * e.powf(problem.boresight_b) * sum / h.density);
        }
        worst
    };

    // one GP solve at the given trust box: the exact pair equality first,
    // the rho-band on failure
    let solve_once = |state: &FreeformExpansion,
                          omega_cur: f64,
                          use_relaxed: &mut bool|
     -> Result<Option<crate::conic::Solution>, DeployError> {
        if !*use_relaxed {
            let gp = build_gp(problem, &centers, state, omega_cur, None)?;
            match solve_gp(&gp, 1e-8) {
                Ok(Outcome::Optimal(sol)) => return Ok(Some(sol)),
                Ok(Outcome::Unbounded) => {
                    return Err(DeployError::Stalled("free-form GP unbounded".into()))
                }
                Ok(Outcome::Infeasible) | Err(crate::conic::ConicError::Numerical(_)) => {
                    *use_relaxed = true;
                }
                Err(e) => return Err(e.into()),
            }
        }
        let gp = build_gp(problem, &centers, state, omega_cur, Some(trust.rho))?;
        match solve_gp(&gp, 1e-8) {
            Ok(Outcome::Optimal(sol)) => Ok(Some(sol)),
            Ok(Outcome::Unbounded) => Err(DeployError::Stalled("free-form GP unbounded".into())),
            Ok(Outcome::Infeasible) | Err(crate::conic::ConicError::Numerical(_)) => Ok(None),
            Err(e) => Err(e.into()),
        }
    };

    // Every iterate is snapped onto the feasible cable set before it
    // becomes the next expansion point. The pair-distance surrogates are
    // only point-accurate, so raw GP outputs drift off the cable
    // constraints a little more each round; mapping keeps every expansion
    // exactly feasible (no relaxation needed from a feasible point) and,
    // because mapping is idempotent, gives the iteration a fixed point at
    // which the stopping rule can actually fire.
    let map_candidate = |g: &[[f64; 2]]| -> Result<Vec<[f64; 2]>, DeployError> {
        let raw: Vec<Point3> = g
            .iter()
            .map(|q| Point3::new(q[0], q[1], problem.ceiling_h))
            .collect();
        let layout = map_to_feasible(&raw, problem.kappa, &MappingParams::default())?;
        Ok(layout.elements.iter().map(|p| [p.x, p.y]).collect())
    };

    'outer: for _ in 0..max_outer {
        let mut omega_cur = trust.omega;
        let mut accepted: Option<(Vec<[f64; 2]>, f64)> = None;
        for _attempt in 0..16 {
            let sol = match solve_once(&state, omega_cur, &mut use_relaxed)? {
                Some(sol) => sol,
                None => {
                    // infeasible or stalled at this trust box
                    omega_cur = 1.0 + 0.5 * (omega_cur - 1.0);
                    continue;
                }
            };
            let g_raw: Vec<[f64; 2]> =
                (0..n).map(|j| [sol.x[vm.g(j, 0)], sol.x[vm.g(j, 1)]]).collect();
            let g_new = map_candidate(&g_raw)?;
            let p_new: Vec<f64> = (0..k).map(|i| sol.x[vm.p(i)]).collect();
            let t = anchored(&g_new, &p_new);
            if t_prev.is_finite() && t < t_prev {
                let rel = (1.0 - t / t_prev).abs();
                if rel <= eps {
                    converged = true;
                    break 'outer; // the stopping rule fired
                }
                // mapped step lost ground; shrink the trust region and retry
                omega_cur = 1.0 + 0.5 * (omega_cur - 1.0);
                continue;
            }
            accepted = Some((g_new, t));
            break;
        }
        let Some((g_new, t)) = accepted else {
            if trace.is_empty() {
                return Err(DeployError::Stalled(
                    "free-form GP infeasible from the initial layout".into(),
                ));
            }
            break; // keep the last accepted iterate
        };
        iterations += 1;
        trace.push(t);
        update_expansion(&mut state, &g_new, &centers, problem.ceiling_h, &vm);
        if t_prev.is_finite() && (1.0 - t / t_prev).abs() <= eps {
            converged = true;
            break;
        }
        t_prev = t;
    }

    // the last accepted iterate is already mapped; re-map for safety and
    // re-optimize powers on the final geometry
    let raw: Vec<Point3> = state
        .g0
        .iter()
        .map(|g| unshift_point(g[0], g[1], problem.ceiling_h))
        .collect();
    let layout = map_to_feasible(&raw, problem.kappa, &MappingParams::default())?;
    finish_result(Method::Sgp, layout, problem, trace, iterations, converged)
}
