//! Shape-constrained deployments: regular polygon and straight line.
//!
//! With the elements pinned to a rigid shape, only the shape's center
//! remains free (the line additionally searches its orientation over a
//! fixed angle grid). Each element then sees the center through a constant
//! offset, so the per-element distances become distances from the center
//! to offset hotspot copies and the same GP condensation as the free-form
//! scheme applies, with far fewer variables.

use crate::channel::StripeLayout;
use crate::conic::surrogates::{cross_surrogate_generic, gain_surrogate_generic};
use crate::conic::{solve_gp, GeometricProgram, Monomial, Outcome, Posynomial};
use crate::scenario::Point3;

use super::{
    finish_result, gain_factor, shifted_centers, unshift_point, DeployError, DeploymentProblem,
    DeploymentResult, Method, COORD_SHIFT,
};

/// Vertices of the regular N-gon with chord spacing `kappa`:
/// circumradius `r0 = kappa / (2 sin(pi/N))`, vertex angles `j * 2 pi / N`.
pub fn polygon_layout(center: &Point3, n: usize, kappa: f64) -> Result<StripeLayout, DeployError> {
    if n < 3 {
        return Err(DeployError::PolygonTooSmall(n));
    }
    let r0 = kappa / (2.0 * (std::f64::consts::PI / n as f64).sin());
    let elements = (0..n)
        .map(|j| {
            let a = j as f64 * std::f64::consts::TAU / n as f64;
            Point3::new(center.x + r0 * a.cos(), center.y + r0 * a.sin(), center.z)
        })
        .collect();
    Ok(StripeLayout::new(elements, kappa))
}

/// Straight line through `center` at horizontal angle `varphi`:
/// `g_j = center - (floor(N/2) - j) kappa (cos varphi, sin varphi, 0)` with
/// `j` counted from 1.
pub fn line_layout(center: &Point3, n: usize, kappa: f64, varphi: f64) -> StripeLayout {
    let half = (n / 2) as f64;
    let (dx, dy) = (varphi.cos(), varphi.sin());
    let elements = (0..n)
        .map(|j| {
            let off = (half - (j + 1) as f64) * kappa;
            Point3::new(center.x - off * dx, center.y - off * dy, center.z)
        })
        .collect();
    StripeLayout::new(elements, kappa)
}

/// Element offsets from the center for the polygon shape.
fn polygon_offsets(n: usize, kappa: f64) -> Vec<[f64; 2]> {
    let r0 = kappa / (2.0 * (std::f64::consts::PI / n as f64).sin());
    (0..n)
        .map(|j| {
            let a = j as f64 * std::f64::consts::TAU / n as f64;
            [r0 * a.cos(), r0 * a.sin()]
        })
        .collect()
}

/// Element offsets from the center for the line shape at angle `varphi`.
fn line_offsets(n: usize, kappa: f64, varphi: f64) -> Vec<[f64; 2]> {
    let half = (n / 2) as f64;
    let (dx, dy) = (varphi.cos(), varphi.sin());
    (0..n)
        .map(|j| {
            let off = (half - (j + 1) as f64) * kappa;
            [-off * dx, -off * dy]
        })
        .collect()
}

/// Outcome of the center-only GP loop, in shifted coordinates.
struct CenterRun {
    center: [f64; 2],
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Iterated GP over the shape center: variables are the objective, the
/// per-hotspot powers, the center coordinates, and one distance variable
/// per (element, hotspot) pair against the offset hotspot copies.
fn center_gp_loop(
    problem: &DeploymentProblem,
    offsets: &[[f64; 2]],
    init_center_shifted: [f64; 2],
    omega: f64,
    eps: f64,
    max_outer: usize,
) -> Result<CenterRun, DeployError> {
    let n = problem.n_elements;
    let k = problem.hotspots.len();
    let b = problem.boresight_b;
    let hc = problem.ceiling_h;
    let centers = shifted_centers(problem);
    // offset hotspot copies: c_hat[j][i] = c_i - offset_j
    let c_hat: Vec<Vec<[f64; 3]>> = (0..n)
        .map(|j| {
            centers
                .iter()
                .map(|c| [c[0] - offsets[j][0], c[1] - offsets[j][1], c[2]])
                .collect()
        })
        .collect();
    let etas: Vec<f64> = problem.hotspots.iter().map(|h| h.density).collect();
    let es: Vec<f64> = problem.hotspots.iter().map(|h| h.elevation_offset(hc)).collect();

    // variable layout
    let var_t = 0usize;
    let var_p = |i: usize| 1 + i;
    let var_d = |j: usize, i: usize| 1 + k + j * k + i;
    let var_gx = 1 + k + n * k;
    let var_gy = var_gx + 1;
    let num_vars = var_gy + 1;

    let dist = |g: [f64; 2], c: &[f64; 3]| -> f64 {
        ((g[0] - c[0]).powi(2) + (g[1] - c[1]).powi(2) + (hc - c[2]).powi(2)).sqrt()
    };

    let mut g0 = init_center_shifted;
    let mut d0: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..k).map(|i| dist(g0, &c_hat[j][i])).collect())
        .collect();

    // candidate objective re-anchored on the true center geometry; the GP
    // keeps each d at least the true distance, so this is achievable and
    // non-decreasing across accepted iterates
    let anchored = |g: [f64; 2], powers: &[f64]| -> f64 {
        let mut worst = f64::INFINITY;
        for i in 0..k {
            let sum: f64 = (0..n)
                .map(|j| dist(g, &c_hat[j][i]).powf(-(b + 2.0)))
                .sum();
            worst = worst.min(powers[i] * es[i].powf(b) * sum / etas[i]);
        }
        worst
    };

    let mut trace: Vec<f64> = Vec::new();
    let mut t_prev = f64::INFINITY;
    let mut iterations = 0usize;
    let mut converged = false;

    'outer: for _ in 0..max_outer {
        let mut omega_cur = omega;
        let mut accepted: Option<([f64; 2], Vec<f64>, f64)> = None;
        for _ in 0..8 {
            let mut gp = GeometricProgram::new(num_vars, var_t);
            gp.bounds[var_t] = (1e-30, 1e30);
            for i in 0..k {
                gp.bounds[var_p(i)] = (0.0, f64::INFINITY);
            }
            for j in 0..n {
                for i in 0..k {
                    let x0 = d0[j][i];
                    gp.bounds[var_d(j, i)] = (x0 / omega_cur, x0 * omega_cur);
                }
            }
            gp.bounds[var_gx] = (g0[0] / omega_cur, g0[0] * omega_cur);
            gp.bounds[var_gy] = (g0[1] / omega_cur, g0[1] * omega_cur);

            // min-gain constraints: eta e^-b t P^-1 <= gain surrogate
            for i in 0..k {
                let col: Vec<f64> = (0..n).map(|j| d0[j][i]).collect();
                let surr = gain_surrogate_generic(&col, b);
                let mut coeff = surr.value;
                let mut exps = Vec::with_capacity(n);
                for j in 0..n {
                    coeff *= col[j].powf(-surr.beta[j]);
                    exps.push((var_d(j, i), surr.beta[j]));
                }
                let lhs = Monomial::new(
                    etas[i] * es[i].powf(-b),
                    vec![(var_t, 1.0), (var_p(i), -1.0)],
                );
                gp.le.push((lhs.into(), Monomial::new(coeff, exps)));
            }

            // squared-distance constraints tying d to the center
            for j in 0..n {
                for i in 0..k {
                    let c = c_hat[j][i];
                    let surr = cross_surrogate_generic(d0[j][i], g0, hc, c);
                    let coeff = surr.value
                        * d0[j][i].powf(-surr.beta_d)
                        * g0[0].powf(-surr.beta_g[0])
                        * g0[1].powf(-surr.beta_g[1]);
                    let rhs = Monomial::new(
                        coeff,
                        vec![
                            (var_d(j, i), surr.beta_d),
                            (var_gx, surr.beta_g[0]),
                            (var_gy, surr.beta_g[1]),
                        ],
                    );
                    let const_term = hc * hc + c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
                    let lhs = Posynomial {
                        terms: vec![
                            Monomial::new(1.0, vec![(var_d(j, i), -2.0), (var_gx, 2.0)]),
                            Monomial::new(1.0, vec![(var_d(j, i), -2.0), (var_gy, 2.0)]),
                            Monomial::new(const_term, vec![(var_d(j, i), -2.0)]),
                        ],
                    };
                    gp.le.push((lhs, rhs));
                }
            }

            // power budget
            let power = Posynomial { terms: (0..k).map(|i| Monomial::var(var_p(i))).collect() };
            gp.le.push((power, Monomial::constant(problem.power_budget)));

            let sol = match solve_gp(&gp, 1e-8) {
                Ok(Outcome::Optimal(sol)) => sol,
                Ok(Outcome::Infeasible) | Err(crate::conic::ConicError::Numerical(_)) => {
                    omega_cur = 1.0 + 0.5 * (omega_cur - 1.0);
                    continue;
                }
                Ok(Outcome::Unbounded) => {
                    return Err(DeployError::Stalled("center GP unbounded".into()));
                }
                Err(e) => return Err(e.into()),
            };
            let g_new = [sol.x[var_gx], sol.x[var_gy]];
            let p_new: Vec<f64> = (0..k).map(|i| sol.x[var_p(i)]).collect();
            let t = anchored(g_new, &p_new);
            if t_prev.is_finite() && t < t_prev {
                let rel = (1.0 - t / t_prev).abs();
                if rel <= eps {
                    converged = true;
                    break 'outer; // the stopping rule fired
                }
                // surrogate overshot; shrink the trust region and retry
                omega_cur = 1.0 + 0.5 * (omega_cur - 1.0);
                continue;
            }
            accepted = Some((g_new, p_new, t));
            break;
        }
        let Some((g_new, _p_new, t)) = accepted else {
            if trace.is_empty() {
                return Err(DeployError::Stalled(
                    "center GP infeasible after trust-region shrinks".into(),
                ));
            }
            break; // keep the last accepted center
        };
        iterations += 1;
        trace.push(t);
        g0 = g_new;
        for (j, row) in d0.iter_mut().enumerate() {
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = dist(g_new, &c_hat[j][i]);
            }
        }
        if t_prev.is_finite() && (1.0 - t / t_prev).abs() <= eps {
            converged = true;
            break;
        }
        t_prev = t;
    }

    Ok(CenterRun { center: g0, trace, iterations, converged })
}

/// Polygon-shaped deployment: optimize the N-gon center by iterated GP,
/// then realize the vertices. The rotation angle is fixed at zero.
pub fn polygon_deploy(
    problem: &DeploymentProblem,
    init_center: &Point3,
    omega: f64,
    eps: f64,
) -> Result<DeploymentResult, DeployError> {
    problem.validate()?;
    if problem.n_elements < 3 {
        return Err(DeployError::PolygonTooSmall(problem.n_elements));
    }
    let offsets = polygon_offsets(problem.n_elements, problem.kappa);
    let init = [init_center.x + COORD_SHIFT, init_center.y + COORD_SHIFT];
    let run = center_gp_loop(problem, &offsets, init, omega, eps, 100)?;
    let center = unshift_point(run.center[0], run.center[1], problem.ceiling_h);
    let layout = polygon_layout(&center, problem.n_elements, problem.kappa)?;
    finish_result(Method::Polygon, layout, problem, run.trace, run.iterations, run.converged)
}

/// Line-shaped deployment: for each angle `phi = k pi / zeta`, optimize the
/// line center by iterated GP, realize the line, and keep the orientation
/// with the best minimum channel gain across the cluster's hotspots.
pub fn line_deploy(
    problem: &DeploymentProblem,
    init_center: &Point3,
    omega: f64,
    eps: f64,
    zeta: usize,
) -> Result<DeploymentResult, DeployError> {
    problem.validate()?;
    if zeta < 1 {
        return Err(DeployError::BadParameter("zeta must be >= 1"));
    }
    let init = [init_center.x + COORD_SHIFT, init_center.y + COORD_SHIFT];
    let mut best: Option<(f64, StripeLayout, Vec<f64>)> = None;
    let mut worst_iterations = 0usize;
    let mut all_converged = true;
    for step in 1..=zeta {
        let varphi = step as f64 * std::f64::consts::PI / zeta as f64;
        let offsets = line_offsets(problem.n_elements, problem.kappa, varphi);
        let run = center_gp_loop(problem, &offsets, init, omega, eps, 100)?;
        worst_iterations = worst_iterations.max(run.iterations);
        all_converged &= run.converged;
        let center = unshift_point(run.center[0], run.center[1], problem.ceiling_h);
        let layout = line_layout(&center, problem.n_elements, problem.kappa, varphi);
        // selection metric: minimum aggregate channel gain over hotspots
        let metric = problem
            .hotspots
            .iter()
            .map(|h| gain_factor(&layout, h, problem.boresight_b, problem.ceiling_h))
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().map_or(true, |(m, _, _)| metric >= *m) {
            best = Some((metric, layout, run.trace));
        }
    }
    let (_, layout, trace) = best.expect("zeta >= 1 evaluated at least one angle");
    finish_result(Method::Line, layout, problem, trace, worst_iterations, all_converged)
}
