//! Free-form deployment by successive convex approximation with
//! alternating power allocation.
//!
//! The outer loop alternates two steps. With powers fixed, the location
//! step maximizes the minimum weighted gain using first-order surrogates:
//! each `d^-(b+2)` is replaced by its tangent and each pair-spacing
//! constraint `||g_j - g_n||^2 >= kappa^2` by the tangent of its left side,
//! inside a step ball `||g_j - g0_j|| <= sigma`. The inner loop repeats the
//! location step until the iterate moves less than `chi`. With locations
//! fixed, the power step is the budget LP. Both surrogates are exact at the
//! expansion point, so each accepted step cannot decrease the true
//! objective.

use crate::beamforming::allocate_powers_lp;
use crate::channel::StripeLayout;
use crate::conic::{solve_socp, Outcome, SecondOrderProgram, Sense, SocCone, SparseVec};
use crate::scenario::Point3;

use super::{
    finish_result, map_to_feasible, min_weighted_gain, DeployError, DeploymentProblem,
    DeploymentResult, MappingParams, Method,
};

fn layout_from(positions: &[[f64; 2]], kappa: f64, ceiling_h: f64) -> StripeLayout {
    StripeLayout::new(
        positions
            .iter()
            .map(|g| Point3::new(g[0], g[1], ceiling_h))
            .collect(),
        kappa,
    )
}

/// One convex location step around `g0` with fixed powers. Returns the new
/// positions and the surrogate objective.
fn location_step(
    problem: &DeploymentProblem,
    g0: &[[f64; 2]],
    powers: &[f64],
    sigma: f64,
) -> Result<Option<(Vec<[f64; 2]>, f64)>, DeployError> {
    let n = problem.n_elements;
    let k = problem.hotspots.len();
    let b = problem.boresight_b;
    let hc = problem.ceiling_h;

    // vars: g (2N), d (N*K), t, beta (N-1 chain lengths)
    let var_g = |j: usize, axis: usize| 2 * j + axis;
    let var_d = |j: usize, i: usize| 2 * n + j * k + i;
    let var_t = 2 * n + n * k;
    let var_beta = |j: usize| var_t + 1 + j;
    let num_vars = var_t + n;

    let mut objective = vec![0.0; num_vars];
    objective[var_t] = 1.0;
    let mut p = SecondOrderProgram::new(num_vars, Sense::Maximize, objective);
    p.bounds[var_t] = (0.0, f64::INFINITY);

    let d0 = |j: usize, i: usize| -> f64 {
        let c = problem.hotspots[i].center;
        ((g0[j][0] - c.x).powi(2) + (g0[j][1] - c.y).powi(2) + (hc - c.z).powi(2)).sqrt()
    };

    // gain surrogates: eta e^-b / P_i * t + (b+2) sum_j d0^-(b+3) d_{j,i}
    //                  <= (b+3) sum_j d0^-(b+2)
    for i in 0..k {
        let h = &problem.hotspots[i];
        let e = h.elevation_offset(hc);
        let mut row: SparseVec = vec![(var_t, h.density * e.powf(-b) / powers[i])];
        let mut rhs = 0.0;
        for j in 0..n {
            let d = d0(j, i);
            row.push((var_d(j, i), (b + 2.0) * d.powf(-(b + 3.0))));
            rhs += (b + 3.0) * d.powf(-(b + 2.0));
        }
        p.lin_le.push((row, rhs));
    }

    // linearized pair spacing: 2 (g0_j - g0_n) . (g_j - g_n) >= ||g0_j - g0_n||^2 + kappa^2
    for j in 0..n {
        for m in (j + 1)..n {
            let dx = g0[j][0] - g0[m][0];
            let dy = g0[j][1] - g0[m][1];
            let norm_sq = dx * dx + dy * dy;
            let row: SparseVec = vec![
                (var_g(j, 0), -2.0 * dx),
                (var_g(j, 1), -2.0 * dy),
                (var_g(m, 0), 2.0 * dx),
                (var_g(m, 1), 2.0 * dy),
            ];
            p.lin_le.push((row, -norm_sq - problem.kappa * problem.kappa));
        }
    }

    // distance cones, step-ball cones, and chain-length cones
    for j in 0..n {
        for i in 0..k {
            let c = problem.hotspots[i].center;
            p.cones.push(SocCone {
                a_rows: vec![vec![(var_g(j, 0), 1.0)], vec![(var_g(j, 1), 1.0)], vec![]],
                a_offsets: vec![-c.x, -c.y, hc - c.z],
                c: vec![(var_d(j, i), 1.0)],
                d: 0.0,
            });
        }
        p.cones.push(SocCone {
            a_rows: vec![vec![(var_g(j, 0), 1.0)], vec![(var_g(j, 1), 1.0)]],
            a_offsets: vec![-g0[j][0], -g0[j][1]],
            c: vec![],
            d: sigma,
        });
    }
    for j in 0..n - 1 {
        p.cones.push(SocCone {
            a_rows: vec![
                vec![(var_g(j, 0), 1.0), (var_g(j + 1, 0), -1.0)],
                vec![(var_g(j, 1), 1.0), (var_g(j + 1, 1), -1.0)],
            ],
            a_offsets: vec![0.0, 0.0],
            c: vec![(var_beta(j), 1.0)],
            d: 0.0,
        });
        p.bounds[var_beta(j)] = (0.0, f64::INFINITY);
    }
    let chain: SparseVec = (0..n - 1).map(|j| (var_beta(j), 1.0)).collect();
    p.lin_le.push((chain, (n - 1) as f64 * problem.kappa));

    match solve_socp(&p, 1e-9)? {
        Outcome::Optimal(sol) => {
            let g: Vec<[f64; 2]> = (0..n)
                .map(|j| [sol.x[var_g(j, 0)], sol.x[var_g(j, 1)]])
                .collect();
            Ok(Some((g, sol.value)))
        }
        Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => Err(DeployError::Stalled("location step unbounded".into())),
    }
}

/// Free-form deployment by SCA with alternating power allocation.
pub fn sca_deploy(
    problem: &DeploymentProblem,
    init: &StripeLayout,
    sigma: f64,
    chi: f64,
    eps: f64,
) -> Result<DeploymentResult, DeployError> {
    problem.validate()?;
    let n = problem.n_elements;
    if init.len() != n {
        return Err(DeployError::Invariant(format!(
            "init layout has {} elements, problem expects {n}",
            init.len()
        )));
    }
    let b = problem.boresight_b;
    let hc = problem.ceiling_h;
    let etas: Vec<f64> = problem.hotspots.iter().map(|h| h.density).collect();

    let mut g0: Vec<[f64; 2]> = init.elements.iter().map(|p| [p.x, p.y]).collect();
    let gains_of = |g: &[[f64; 2]]| -> Vec<f64> {
        let layout = layout_from(g, problem.kappa, hc);
        problem
            .hotspots
            .iter()
            .map(|h| super::gain_factor(&layout, h, b, hc))
            .collect()
    };

    let alloc = allocate_powers_lp(&gains_of(&g0), &etas, problem.power_budget)?;
    let mut powers = alloc.powers;
    let mut t_prev = alloc.objective;
    let mut trace = vec![t_prev];
    let mut iterations = 1usize;
    let mut converged = false;

    let true_value = |g: &[[f64; 2]], powers: &[f64]| -> f64 {
        min_weighted_gain(&layout_from(g, problem.kappa, hc), &problem.hotspots, powers, b, hc)
    };

    'outer: for _ in 0..60 {
        // inner SCA location loop with fixed powers
        for _ in 0..50 {
            let step = location_step(problem, &g0, &powers, sigma)?;
            let (g_new, _) = match step {
                Some(s) => s,
                None => break, // surrogate infeasible around this point; keep iterate
            };
            // exact surrogate at the center: accepted steps cannot lower
            // the true fixed-power objective
            if true_value(&g_new, &powers) < true_value(&g0, &powers) {
                break;
            }
            let move_max = g0
                .iter()
                .zip(g_new.iter())
                .map(|(a, c)| ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt())
                .fold(0.0f64, f64::max);
            g0 = g_new;
            if move_max <= chi {
                break;
            }
        }

        // power step on the updated geometry
        let alloc = allocate_powers_lp(&gains_of(&g0), &etas, problem.power_budget)?;
        let t = alloc.objective;
        let rel = (1.0 - t / t_prev).abs();
        iterations += 1;
        if t < t_prev {
            converged = rel < eps;
            break 'outer; // keep previous powers either way
        }
        powers = alloc.powers;
        trace.push(t);
        if rel < eps {
            converged = true;
            break 'outer;
        }
        t_prev = t;
    }

    let raw: Vec<Point3> = g0.iter().map(|g| Point3::new(g[0], g[1], hc)).collect();
    let layout = map_to_feasible(&raw, problem.kappa, &MappingParams::default())?;
    finish_result(Method::Sca, layout, problem, trace, iterations, converged)
}
