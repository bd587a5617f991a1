//! End-to-end acceptance suite.
//!
//! Each test exercises one release gate at its stated tolerance and prints
//! a single PASS line on success; a failing gate panics with the measured
//! numbers. Heavy gates also enforce their wall-clock budgets.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stripeplan::beamforming::{
    allocate_powers_lp, evaluate_min_power, evaluate_min_power_perturbed, mrt_precoders,
    received_power, received_power_lower_bound, sdp_precoders, PrecoderKind, RfParams, StripeTx,
};
use stripeplan::channel::{channel_coefficient, channel_gain_sq, channel_vector, ChannelVector, StripeLayout};
use stripeplan::clustering::{chebyshev_cluster, fac_ao, fac_ao_default, loss_metric, relax_assign};
use stripeplan::conic::surrogates::{
    appendix_coefficients, cross_source, dot_pair_source, gain_source, norm_pair_source,
    FreeformExpansion, PairTable,
};
use stripeplan::conic::{
    monomial_approx, solve_gp, solve_lp, solve_socp, GeometricProgram, LinearProgram, Monomial,
    SecondOrderProgram, Sense, SocCone,
};
use stripeplan::deployment::{
    baseline_layout, default_init_layout, gain_factor, line_deploy, map_to_feasible,
    polygon_deploy, sca_deploy, sgp_deploy, BaselineKind, DeploymentProblem, DeploymentResult,
    MappingParams, Method, TrustRegionState,
};
use stripeplan::scenario::{generate_hotspots, Hotspot, Point3, Scenario};

use stripeplan_cli::config::{ExperimentConfig, SweepAxis, SweepSpec};
use stripeplan_cli::experiment::run_experiment;

const KAPPA_10GHZ: f64 = 0.015;

fn scenario_with(hotspots: Vec<Hotspot>, frequency_hz: f64, stripes: usize, n_elements: usize) -> Scenario {
    let lambda = stripeplan::scenario::SPEED_OF_LIGHT / frequency_hz;
    let kappa = 0.5 * lambda;
    Scenario {
        area_x: 25.0,
        area_y: 25.0,
        ceiling_h: 5.0,
        hotspots,
        frequency_hz,
        boresight_b: 2.0,
        element_spacing_kappa: kappa,
        power_budgets: vec![1.0 / stripes as f64; stripes],
        stripe_length: (n_elements as f64 - 0.5) * kappa,
    }
}

/// Criterion 1: closed-form aggregate gain vs per-element summation,
/// 1000 random instances, relative error at most 1e-12, under 10 s.
#[test]
fn criterion_01_physics_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let hc = 5.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=16);
        let b = rng.gen_range(0.0..4.0);
        let lambda = rng.gen_range(0.005..0.15);
        let elements: Vec<Point3> = (0..n)
            .map(|_| Point3::new(rng.gen_range(0.0..25.0), rng.gen_range(0.0..25.0), hc))
            .collect();
        let layout = StripeLayout::new(elements, KAPPA_10GHZ);
        let c = Point3::new(
            rng.gen_range(0.0..25.0),
            rng.gen_range(0.0..25.0),
            rng.gen_range(0.2..3.0),
        );
        let closed = channel_gain_sq(&layout, &c, b, hc, lambda).unwrap();
        let brute: f64 = layout
            .elements
            .iter()
            .map(|g| channel_coefficient(g, &c, lambda, b, hc).unwrap().norm_sqr())
            .sum();
        let rel = (closed - brute).abs() / brute.max(1e-300);
        assert!(rel <= 1e-12, "gain mismatch: rel {rel}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "physics oracle took {elapsed:?}");
    println!("PASS criterion 1: channel gain closed form matches brute force on 1000 instances ({elapsed:?})");
}

fn rand_expansion(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (FreeformExpansion, Vec<[f64; 3]>, f64) {
    let hc = 5.0;
    let g0: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.gen_range(1.0..26.0), rng.gen_range(1.0..26.0)])
        .collect();
    let centers: Vec<[f64; 3]> = (0..k)
        .map(|_| [rng.gen_range(1.0..26.0), rng.gen_range(1.0..26.0), rng.gen_range(0.5..2.0)])
        .collect();
    let d0: Vec<Vec<f64>> = g0
        .iter()
        .map(|g| {
            centers
                .iter()
                .map(|c| ((g[0] - c[0]).powi(2) + (g[1] - c[1]).powi(2) + (hc - c[2]).powi(2)).sqrt())
                .collect()
        })
        .collect();
    let pairs = PairTable::new(n);
    let mut alpha0 = vec![0.0; pairs.count()];
    for (j, m) in pairs.iter() {
        alpha0[pairs.index(j, m)] =
            ((g0[j][0] - g0[m][0]).powi(2) + (g0[j][1] - g0[m][1]).powi(2)).sqrt().max(1e-3);
    }
    (FreeformExpansion { g0, d0, alpha0 }, centers, hc)
}

/// Criterion 2: monomial surrogates match their sources in value (1e-10)
/// and log-gradient (1e-6 vs finite differences) at 100 random expansion
/// points; printed-vs-derived exponent discrepancies are logged.
#[test]
fn criterion_02_monomial_approximation() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let n = 4;
    let k = 3;
    let mut max_value_rel = 0.0f64;
    let mut max_grad_err = 0.0f64;
    for _ in 0..100 {
        let b = rng.gen_range(0.0..4.0);
        let (state, centers, hc) = rand_expansion(&mut rng, n, k);
        let coef = appendix_coefficients(&state, &centers, b, hc).unwrap();
        let pairs = PairTable::new(n);

        // generic rule on a random posynomial
        let point: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..3.0)).collect();
        let c0 = rng.gen_range(0.1..2.0);
        let f = |v: &[f64]| c0 + v[0] * v[1] + v[2].powf(1.5);
        let approx = monomial_approx(f, &point).unwrap();
        let rel = (approx.eval(&point) - f(&point)).abs() / f(&point);
        max_value_rel = max_value_rel.max(rel);

        for i in 0..k {
            let d_col: Vec<f64> = (0..n).map(|j| state.d0[j][i]).collect();
            let src = gain_source(&d_col, b);
            for surr in [&coef.h_hat[i], &coef.h_hat_printed[i]] {
                let rel = (surr.eval(&d_col) - src).abs() / src;
                max_value_rel = max_value_rel.max(rel);
            }
            let fd = monomial_approx(|v| gain_source(v, b), &d_col).unwrap();
            for (a, e) in coef.h_hat[i].beta.iter().zip(fd.exponents.iter()) {
                max_grad_err = max_grad_err.max((a - e).abs() / (1.0 + e.abs()));
            }
        }
        for j in 0..n {
            for i in 0..k {
                let src = cross_source(state.d0[j][i], state.g0[j], hc, centers[i]);
                for surr in [&coef.h_tilde[j][i], &coef.h_tilde_printed[j][i]] {
                    let rel = (surr.eval(state.d0[j][i], state.g0[j]) - src).abs() / src;
                    max_value_rel = max_value_rel.max(rel);
                }
                let point = [state.d0[j][i], state.g0[j][0], state.g0[j][1]];
                let fd = monomial_approx(|v| cross_source(v[0], [v[1], v[2]], hc, centers[i]), &point)
                    .unwrap();
                let got = [coef.h_tilde[j][i].beta_d, coef.h_tilde[j][i].beta_g[0], coef.h_tilde[j][i].beta_g[1]];
                for (a, e) in got.iter().zip(fd.exponents.iter()) {
                    max_grad_err = max_grad_err.max((a - e).abs() / (1.0 + e.abs()));
                }
            }
        }
        for (j, m) in pairs.iter() {
            let idx = pairs.index(j, m);
            let a0 = state.alpha0[idx];
            let src_p = norm_pair_source(a0, state.g0[j], state.g0[m], hc);
            let v_p = coef.h_prime[idx].eval(a0, state.g0[j], state.g0[m]);
            max_value_rel = max_value_rel.max((v_p - src_p).abs() / src_p);
            let src_b = dot_pair_source(a0, state.g0[j], state.g0[m], hc);
            let v_b = coef.h_bar[idx].eval(a0, state.g0[j], state.g0[m]);
            max_value_rel = max_value_rel.max((v_b - src_b).abs() / src_b);

            let point = [a0, state.g0[j][0], state.g0[j][1], state.g0[m][0], state.g0[m][1]];
            let fd = monomial_approx(
                |v| norm_pair_source(v[0], [v[1], v[2]], [v[3], v[4]], hc),
                &point,
            )
            .unwrap();
            let surr = &coef.h_prime[idx];
            let got = [surr.beta_alpha, surr.beta_gj[0], surr.beta_gj[1], surr.beta_gn[0], surr.beta_gn[1]];
            for (a, e) in got.iter().zip(fd.exponents.iter()) {
                max_grad_err = max_grad_err.max((a - e).abs() / (1.0 + e.abs()));
            }
            let fd = monomial_approx(
                |v| dot_pair_source(v[0], [v[1], v[2]], [v[3], v[4]], hc),
                &point,
            )
            .unwrap();
            let surr = &coef.h_bar[idx];
            let got = [surr.beta_alpha, surr.beta_gj[0], surr.beta_gj[1], surr.beta_gn[0], surr.beta_gn[1]];
            for (a, e) in got.iter().zip(fd.exponents.iter()) {
                max_grad_err = max_grad_err.max((a - e).abs() / (1.0 + e.abs()));
            }
        }
    }
    assert!(max_value_rel <= 1e-10, "value mismatch {max_value_rel}");
    assert!(max_grad_err <= 1e-6, "log-gradient mismatch {max_grad_err}");

    // discrepancy log: printed closed forms vs the derived exponents
    let b = 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    let (state, centers, hc) = rand_expansion(&mut rng, 3, 2);
    let coef = appendix_coefficients(&state, &centers, b, hc).unwrap();
    let ratio = coef.h_hat_printed[0].beta[0] / coef.h_hat[0].beta[0];
    let g_ratio = coef.h_tilde_printed[0][0].beta_g[0] / coef.h_tilde[0][0].beta_g[0];
    let d_diff = (coef.h_tilde_printed[0][0].beta_d - coef.h_tilde[0][0].beta_d).abs();
    assert!((ratio - (b + 3.0) / (b + 2.0)).abs() < 1e-12);
    assert!((g_ratio - 0.5).abs() < 1e-12);
    assert!(d_diff < 1e-15);
    println!(
        "PASS criterion 2: surrogate values <=1e-10, log-gradients <=1e-6 ({} printed/derived discrepancies logged: gain exponent ratio {:.4} [(b+3)/(b+2)], cross g-exponent ratio {:.1}, cross d-exponent identical)",
        2, ratio, g_ratio
    );
}

/// Criterion 3: hand-solvable LP / SOCP / GP instances within 1e-6
/// relative of their analytic optima.
#[test]
fn criterion_03_solver_kernel() {
    // LP: max t s.t. t <= 2x, t <= 2(1-x), 0 <= x <= 1 -> 1 at x = 0.5
    let mut lp = LinearProgram::new(2, Sense::Maximize, vec![1.0, 0.0]);
    lp.lin_le.push((vec![(0, 1.0), (1, -2.0)], 0.0));
    lp.lin_le.push((vec![(0, 1.0), (1, 2.0)], 2.0));
    lp.bounds[1] = (0.0, 1.0);
    let sol = solve_lp(&lp, 1e-9).unwrap();
    let sol = sol.optimal().expect("lp optimal");
    assert!((sol.value - 1.0).abs() <= 1e-6);

    // LP: max t s.t. t <= -1 -> -1
    let mut lp = LinearProgram::new(1, Sense::Maximize, vec![1.0]);
    lp.lin_le.push((vec![(0, 1.0)], -1.0));
    let sol = solve_lp(&lp, 1e-9).unwrap();
    assert!((sol.optimal().unwrap().value + 1.0).abs() <= 1e-6);

    // LP: contradictory bounds -> infeasible
    let mut lp = LinearProgram::new(1, Sense::Maximize, vec![0.0]);
    lp.bounds[0] = (1.0, f64::INFINITY);
    lp.lin_le.push((vec![(0, 1.0)], 0.0));
    assert!(solve_lp(&lp, 1e-9).unwrap().is_infeasible());

    // SOCP: two-point one-center -> d* = 1
    let mut socp = SecondOrderProgram::new(3, Sense::Minimize, vec![1.0, 0.0, 0.0]);
    socp.cones.push(SocCone::dist_le(&[1, 2], &[0.0, 0.0], vec![(0, 1.0)], 0.0));
    socp.cones.push(SocCone::dist_le(&[1, 2], &[2.0, 0.0], vec![(0, 1.0)], 0.0));
    let sol = solve_socp(&socp, 1e-9).unwrap();
    assert!((sol.optimal().unwrap().value - 1.0).abs() <= 1e-6);

    // SOCP: single point -> 0
    let mut socp = SecondOrderProgram::new(3, Sense::Minimize, vec![1.0, 0.0, 0.0]);
    socp.cones.push(SocCone::dist_le(&[1, 2], &[0.3, -0.7], vec![(0, 1.0)], 0.0));
    let sol = solve_socp(&socp, 1e-9).unwrap();
    assert!(sol.optimal().unwrap().value.abs() <= 1e-6);

    // SOCP: unit equilateral triangle -> circumradius 1/sqrt(3)
    let mut socp = SecondOrderProgram::new(3, Sense::Minimize, vec![1.0, 0.0, 0.0]);
    for pt in [[0.0, 0.0], [1.0, 0.0], [0.5, 3.0f64.sqrt() / 2.0]] {
        socp.cones.push(SocCone::dist_le(&[1, 2], &pt, vec![(0, 1.0)], 0.0));
    }
    let sol = solve_socp(&socp, 1e-10).unwrap();
    let want = 1.0 / 3.0f64.sqrt();
    assert!((sol.optimal().unwrap().value - want).abs() / want <= 1e-6);

    // GP: max t s.t. t/x <= 1, x <= 2 -> 2
    let mut gp = GeometricProgram::new(2, 0);
    gp.bounds = vec![(1e-12, 1e12); 2];
    gp.le.push((Monomial::new(1.0, vec![(0, 1.0), (1, -1.0)]).into(), Monomial::constant(1.0)));
    gp.le.push((Monomial::var(1).into(), Monomial::constant(2.0)));
    let sol = solve_gp(&gp, 1e-9).unwrap();
    assert!((sol.optimal().unwrap().value - 2.0).abs() / 2.0 <= 1e-6);

    // GP: max t s.t. t <= 1 -> 1
    let mut gp = GeometricProgram::new(1, 0);
    gp.bounds = vec![(1e-12, 1e12)];
    gp.le.push((Monomial::var(0).into(), Monomial::constant(1.0)));
    let sol = solve_gp(&gp, 1e-9).unwrap();
    assert!((sol.optimal().unwrap().value - 1.0).abs() <= 1e-6);

    // GP: max t s.t. t x <= 1, t / x <= 1 -> 1 at x = 1
    let mut gp = GeometricProgram::new(2, 0);
    gp.bounds = vec![(1e-12, 1e12); 2];
    gp.le.push((Monomial::new(1.0, vec![(0, 1.0), (1, 1.0)]).into(), Monomial::constant(1.0)));
    gp.le.push((Monomial::new(1.0, vec![(0, 1.0), (1, -1.0)]).into(), Monomial::constant(1.0)));
    let sol = solve_gp(&gp, 1e-9).unwrap();
    let sol = sol.optimal().unwrap();
    assert!((sol.value - 1.0).abs() <= 1e-6);
    assert!((sol.x[1] - 1.0).abs() <= 1e-5);

    println!("PASS criterion 3: LP/SOCP/GP reference instances within 1e-6 of analytic optima");
}

/// Criterion 4: clustering trends over 50 random scenarios and
/// U in 2..=6: monotone relaxed traces, FAC-AO at least as good as the
/// Chebyshev baseline on average (strictly better in at least half the
/// runs), and average max loss non-increasing in U. Under 15 minutes.
#[test]
fn criterion_04_clustering_trends() {
    let start = Instant::now();
    let scenarios = 50;
    let us: Vec<usize> = (2..=6).collect();
    let mut fac_means = vec![0.0f64; us.len()];
    let mut cheb_means = vec![0.0f64; us.len()];
    let mut strictly_better = 0usize;
    let mut total_runs = 0usize;
    for s in 0..scenarios {
        let hotspots = generate_hotspots(25.0, 25.0, 5.0, 25, (0.8, 1.2), 40_000 + s).unwrap();
        for (ui, &u) in us.iter().enumerate() {
            let cheb = chebyshev_cluster(&hotspots, u, 2.0, 5.0, 40_000 + s, 100).unwrap();
            let fac = fac_ao(&hotspots, &cheb.solution, 2.0, 5.0, 1e-6).unwrap();
            // (a) relaxed objective monotone non-increasing
            for w in fac.trace.windows(2) {
                assert!(
                    w[1] <= w[0] + 1e-9,
                    "scenario {s} U={u}: trace increased {} -> {}",
                    w[0],
                    w[1]
                );
            }
            fac.solution.validate(&hotspots, 2.0, 5.0).unwrap();
            fac_means[ui] += fac.solution.objective / scenarios as f64;
            cheb_means[ui] += cheb.solution.objective / scenarios as f64;
            if fac.solution.objective < cheb.solution.objective {
                strictly_better += 1;
            }
            total_runs += 1;
        }
    }
    // (b) average dominance at every U and majority strict improvement
    for (ui, &u) in us.iter().enumerate() {
        assert!(
            fac_means[ui] <= cheb_means[ui],
            "U={u}: FAC-AO mean {} above Chebyshev mean {}",
            fac_means[ui],
            cheb_means[ui]
        );
    }
    let frac = strictly_better as f64 / total_runs as f64;
    assert!(frac >= 0.5, "strictly better in only {frac:.2} of runs");
    // (c) average max loss non-increasing in U
    for w in fac_means.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-9), "mean max loss increased with U: {w:?}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 15.0 * 60.0, "clustering trends took {elapsed:?}");
    println!(
        "PASS criterion 4: FAC-AO monotone in 250/250 runs, mean below Chebyshev at every U (strictly better in {:.0}% of runs), mean max loss decreasing in U ({elapsed:?})",
        frac * 100.0
    );
}

/// Criterion 5: for fixed heads, the LP relaxation lower-bounds the best
/// binary assignment over the same heads, exhaustively enumerated on 20
/// random K=6, U=2 instances.
#[test]
fn criterion_05_clustering_brute_force() {
    for s in 0..20u64 {
        let hotspots = generate_hotspots(25.0, 25.0, 5.0, 6, (0.8, 1.2), 50_000 + s).unwrap();
        let run = fac_ao_default(&hotspots, 2, 2.0, 5.0, 1e-6, 50_000 + s).unwrap();
        let heads = run.solution.heads.clone();
        let (_, relaxed) = relax_assign(&heads, &hotspots, 2.0, 5.0).unwrap();

        let delta: Vec<Vec<f64>> = heads
            .iter()
            .map(|head| {
                hotspots
                    .iter()
                    .map(|h| loss_metric(head, h, 2.0, 5.0).unwrap())
                    .collect()
            })
            .collect();
        let mut best = f64::INFINITY;
        for mask in 0..(1u32 << 6) {
            let mut worst = 0.0f64;
            for i in 0..6 {
                let u = ((mask >> i) & 1) as usize;
                worst = worst.max(delta[u][i]);
            }
            best = best.min(worst);
        }
        assert!(
            relaxed <= best + 1e-9,
            "instance {s}: relaxed {relaxed} above binary optimum {best} for the same heads"
        );
    }
    println!("PASS criterion 5: relaxed optimum lower-bounds the exhaustive binary optimum (same heads) on 20/20 instances");
}

/// Criterion 6: the feasibility mapping restores exact spacing on 100
/// random tight clouds (N=20, radius kappa/4).
#[test]
fn criterion_06_mapping_feasibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for trial in 0..100 {
        let pts: Vec<Point3> = (0..20)
            .map(|_| {
                let rho = KAPPA_10GHZ / 4.0 * rng.gen::<f64>().sqrt();
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                Point3::new(10.0 + rho * a.cos(), 10.0 + rho * a.sin(), 5.0)
            })
            .collect();
        let layout = map_to_feasible(&pts, KAPPA_10GHZ, &MappingParams::default())
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        for w in layout.elements.windows(2) {
            let d = w[0].dist(&w[1]);
            assert!((d - KAPPA_10GHZ).abs() <= 1e-9, "trial {trial}: consecutive {d}");
        }
        for i in 0..20 {
            for j in (i + 1)..20 {
                let d = layout.elements[i].dist(&layout.elements[j]);
                assert!(d >= KAPPA_10GHZ - 1e-9, "trial {trial}: pair ({i},{j}) at {d}");
            }
        }
    }
    println!("PASS criterion 6: mapping feasible on 100/100 random tight clouds");
}

/// Criterion 7: all four deployment methods converge (stopping rule at
/// 1e-6 within 50 outer iterations) on a 5-hotspot cluster with N=24 at
/// 10 GHz in at least 95% of 20 seeds, within 20 minutes.
#[test]
fn criterion_07_deployment_convergence() {
    let start = Instant::now();
    let trust = TrustRegionState::defaults(KAPPA_10GHZ);
    let mut converged = [0usize; 4];
    let seeds = 20u64;
    for seed in 0..seeds {
        let hotspots = generate_hotspots(25.0, 25.0, 5.0, 5, (0.8, 1.2), 70_000 + seed).unwrap();
        let problem = DeploymentProblem {
            hotspots: hotspots.clone(),
            n_elements: 24,
            kappa: KAPPA_10GHZ,
            boresight_b: 2.0,
            power_budget: 0.2,
            ceiling_h: 5.0,
        };
        let cx = hotspots.iter().map(|h| h.center.x).sum::<f64>() / 5.0;
        let cy = hotspots.iter().map(|h| h.center.y).sum::<f64>() / 5.0;
        let head = Point3::new(cx, cy, 5.0);
        let init = default_init_layout(&head, 24, KAPPA_10GHZ, 5.0);

        let ok = |r: &DeploymentResult| r.converged && r.iterations <= 50;
        if sgp_deploy(&problem, &init, &trust, 1e-6).map(|r| ok(&r)).unwrap_or(false) {
            converged[0] += 1;
        }
        if sca_deploy(&problem, &init, trust.sigma, KAPPA_10GHZ / 10.0, 1e-6)
            .map(|r| ok(&r))
            .unwrap_or(false)
        {
            converged[1] += 1;
        }
        if polygon_deploy(&problem, &head, 1.1, 1e-6).map(|r| ok(&r)).unwrap_or(false) {
            converged[2] += 1;
        }
        if line_deploy(&problem, &head, 1.1, 1e-6, 50).map(|r| ok(&r)).unwrap_or(false) {
            converged[3] += 1;
        }
    }
    let elapsed = start.elapsed();
    let need = (0.95 * seeds as f64).ceil() as usize;
    for (name, got) in ["sgp", "sca", "polygon", "line"].iter().zip(converged.iter()) {
        assert!(
            *got >= need,
            "{name} converged in only {got}/{seeds} seeds (need {need})"
        );
    }
    assert!(elapsed.as_secs_f64() < 20.0 * 60.0, "convergence suite took {elapsed:?}");
    println!(
        "PASS criterion 7: convergence within 50 iterations at 1e-6 in {:?}/20 seeds per method (sgp/sca/polygon/line), {elapsed:?}",
        converged
    );
}

struct DeployedScenario {
    scenario: Scenario,
    cluster: stripeplan::clustering::ClusterSolution,
    by_method: Vec<(Method, Vec<DeploymentResult>)>,
}

fn deploy_methods(
    scenario: &Scenario,
    stripes: usize,
    methods: &[Method],
    seed: u64,
    zeta: usize,
) -> DeployedScenario {
    let cluster = fac_ao_default(
        &scenario.hotspots,
        stripes,
        scenario.boresight_b,
        scenario.ceiling_h,
        1e-6,
        seed,
    )
    .unwrap()
    .solution;
    let n = scenario.elements_per_stripe();
    let kappa = scenario.element_spacing_kappa;
    let trust = TrustRegionState::defaults(kappa);
    let budgets = stripeplan::beamforming::resolve_budgets(scenario, stripes);
    let mut by_method = Vec::new();
    for &method in methods {
        let mut deps = Vec::new();
        for u in 0..stripes {
            let members = cluster.members(u);
            let hotspots: Vec<_> = members.iter().map(|&i| scenario.hotspots[i]).collect();
            let problem = DeploymentProblem {
                hotspots,
                n_elements: n,
                kappa,
                boresight_b: scenario.boresight_b,
                power_budget: budgets[u],
                ceiling_h: scenario.ceiling_h,
            };
            let head = cluster.heads[u];
            let result = match method {
                Method::Sgp => {
                    let init = default_init_layout(&head, n, kappa, scenario.ceiling_h);
                    sgp_deploy(&problem, &init, &trust, 1e-6).unwrap()
                }
                Method::Sca => {
                    let init = default_init_layout(&head, n, kappa, scenario.ceiling_h);
                    sca_deploy(&problem, &init, trust.sigma, kappa / 10.0, 1e-6).unwrap()
                }
                Method::Polygon => polygon_deploy(&problem, &head, 1.1, 1e-6).unwrap(),
                Method::Line => line_deploy(&problem, &head, 1.1, 1e-6, zeta).unwrap(),
                Method::CenterUpa | Method::CenterRectangle => {
                    let kind = if method == Method::CenterUpa {
                        BaselineKind::CenterUpa
                    } else {
                        BaselineKind::CenterRectangle
                    };
                    let layout =
                        baseline_layout(kind, &problem.hotspots, n, kappa, scenario.ceiling_h).unwrap();
                    let gains: Vec<f64> = problem
                        .hotspots
                        .iter()
                        .map(|h| gain_factor(&layout, h, problem.boresight_b, problem.ceiling_h))
                        .collect();
                    let etas: Vec<f64> = problem.hotspots.iter().map(|h| h.density).collect();
                    let alloc = allocate_powers_lp(&gains, &etas, problem.power_budget).unwrap();
                    let objective = stripeplan::deployment::min_weighted_gain(
                        &layout,
                        &problem.hotspots,
                        &alloc.powers,
                        problem.boresight_b,
                        problem.ceiling_h,
                    );
                    DeploymentResult {
                        method,
                        layout,
                        powers: alloc.powers,
                        objective,
                        trace: vec![objective],
                        iterations: 1,
                        converged: true,
                    }
                }
            };
            deps.push(result);
        }
        by_method.push((method, deps));
    }
    DeployedScenario { scenario: scenario.clone(), cluster, by_method }
}

fn mean_min_power(ds: &DeployedScenario, method: Method, precoder: PrecoderKind, draws: usize, seed: u64) -> f64 {
    let deps = &ds.by_method.iter().find(|(m, _)| *m == method).unwrap().1;
    evaluate_min_power(&ds.cluster, deps, &ds.scenario, precoder, draws, 0.5, seed)
        .unwrap()
        .mean()
}

/// Criterion 8: every optimized method beats both baselines in mean
/// minimum received power under MRT and SDP precoders at 2, 6, and
/// 10 GHz; the polygon stays within 1% above the line at b = 2.
#[test]
fn criterion_08_baseline_dominance() {
    let start = Instant::now();
    let hotspots = generate_hotspots(25.0, 25.0, 5.0, 25, (0.8, 1.2), 88).unwrap();
    let methods = [
        Method::Sgp,
        Method::Sca,
        Method::Polygon,
        Method::Line,
        Method::CenterUpa,
        Method::CenterRectangle,
    ];
    for (fi, &freq) in [2.0e9, 6.0e9, 1.0e10].iter().enumerate() {
        let scenario = scenario_with(hotspots.clone(), freq, 5, 24);
        assert_eq!(scenario.elements_per_stripe(), 24);
        let ds = deploy_methods(&scenario, 5, &methods, 88, 16);
        for precoder in [PrecoderKind::Mrt, PrecoderKind::Sdp] {
            let mean_of =
                |m: Method| mean_min_power(&ds, m, precoder, 20, 800 + fi as u64);
            let upa = mean_of(Method::CenterUpa);
            let rect = mean_of(Method::CenterRectangle);
            let baseline = upa.max(rect);
            for m in [Method::Sgp, Method::Sca, Method::Polygon, Method::Line] {
                let val = mean_of(m);
                assert!(
                    val >= upa && val >= rect,
                    "{} at {freq} Hz under {:?}: {val:.3e} below baselines (upa {upa:.3e}, rect {rect:.3e})",
                    m.name(),
                    precoder
                );
                let _ = baseline;
            }
            let poly = mean_of(Method::Polygon);
            let line = mean_of(Method::Line);
            assert!(
                line <= poly * 1.01,
                "line {line:.3e} above polygon {poly:.3e} by more than 1% at {freq} Hz {:?}",
                precoder
            );
        }
    }
    let elapsed = start.elapsed();
    println!("PASS criterion 8: optimized methods dominate both baselines at 2/6/10 GHz under MRT and SDP; polygon >= line within 1% ({elapsed:?})");
}

/// Criterion 9: seed-averaged monotone trends for the polygon method:
/// mean min power rises with stripe length, falls with frequency, and does
/// not increase with hotspot perturbation.
#[test]
fn criterion_09_monotone_trends() {
    let start = Instant::now();
    let hotspots = generate_hotspots(25.0, 25.0, 5.0, 25, (0.8, 1.2), 99).unwrap();

    // stripe length sweep at 10 GHz
    let mut by_length = Vec::new();
    for &length in &[0.5, 1.0, 1.5] {
        let mut scenario = scenario_with(hotspots.clone(), 1.0e10, 5, 2);
        scenario.stripe_length = length;
        let ds = deploy_methods(&scenario, 5, &[Method::Polygon], 99, 1);
        by_length.push(mean_min_power(&ds, Method::Polygon, PrecoderKind::Mrt, 20, 900));
    }
    assert!(
        by_length[0] < by_length[1] && by_length[1] < by_length[2],
        "length trend violated: {by_length:?}"
    );

    // frequency sweep at 1.5 m stripe length
    let mut by_freq = Vec::new();
    for &freq in &[2.0e9, 6.0e9, 1.0e10] {
        let mut scenario = scenario_with(hotspots.clone(), freq, 5, 2);
        scenario.stripe_length = 1.5;
        let ds = deploy_methods(&scenario, 5, &[Method::Polygon], 99, 1);
        by_freq.push(mean_min_power(&ds, Method::Polygon, PrecoderKind::Mrt, 20, 901));
    }
    assert!(
        by_freq[0] > by_freq[1] && by_freq[1] > by_freq[2],
        "frequency trend violated: {by_freq:?}"
    );

    // hotspot perturbation on a single 7-hotspot cluster, fixed deployment
    let cluster_spots = generate_hotspots(25.0, 25.0, 5.0, 7, (0.8, 1.2), 77).unwrap();
    let mut scenario = scenario_with(cluster_spots, 1.0e10, 1, 2);
    scenario.stripe_length = 1.5;
    let ds = deploy_methods(&scenario, 1, &[Method::Polygon], 77, 1);
    let deps = &ds.by_method[0].1;
    let mut by_delta = Vec::new();
    for &delta in &[0.0, 0.5, 1.0] {
        let result = evaluate_min_power_perturbed(
            &ds.cluster,
            deps,
            &ds.scenario,
            PrecoderKind::Mrt,
            40,
            0.5,
            902,
            delta,
        )
        .unwrap();
        by_delta.push(result.mean());
    }
    assert!(
        by_delta[1] <= by_delta[0] && by_delta[2] <= by_delta[1],
        "perturbation trend violated: {by_delta:?}"
    );

    let elapsed = start.elapsed();
    println!(
        "PASS criterion 9: polygon trends hold (length {:?} W rising, frequency {:?} W falling, perturbation {:?} W non-increasing) ({elapsed:?})",
        by_length, by_freq, by_delta
    );
}

/// Criterion 10: the dedicated-beam bound never exceeds the full received
/// power under MRT, on 500 random multi-hotspot instances.
#[test]
fn criterion_10_bound_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let rf = RfParams { wavelength: 0.03, boresight_b: 2.0, ceiling_h: 5.0 };
    for trial in 0..500 {
        let stripes = rng.gen_range(1..=3);
        let spots = rng.gen_range(2..=5);
        let layouts: Vec<StripeLayout> = (0..stripes)
            .map(|_| {
                let x = rng.gen_range(0.0..20.0);
                let y = rng.gen_range(0.0..20.0);
                StripeLayout::new(
                    (0..6).map(|j| Point3::new(x + j as f64 * 0.015, y, 5.0)).collect(),
                    0.015,
                )
            })
            .collect();
        let users: Vec<Point3> = (0..spots)
            .map(|_| Point3::new(rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0), rng.gen_range(0.5..2.0)))
            .collect();
        // each hotspot served by a random stripe with a random power
        let mut assignment = vec![vec![0u8; spots]; stripes];
        let mut powers = vec![vec![0.0f64; spots]; stripes];
        for i in 0..spots {
            let u = rng.gen_range(0..stripes);
            assignment[u][i] = 1;
            powers[u][i] = rng.gen_range(0.01..0.5);
        }
        let mut precoder_sets = Vec::new();
        for u in 0..stripes {
            let served: Vec<usize> = (0..spots).filter(|&i| assignment[u][i] == 1).collect();
            let chans: Vec<ChannelVector> = served
                .iter()
                .map(|&i| channel_vector(&layouts[u], &users[i], rf.wavelength, rf.boresight_b, rf.ceiling_h).unwrap())
                .collect();
            let p: Vec<f64> = served.iter().map(|&i| powers[u][i]).collect();
            precoder_sets.push(if served.is_empty() {
                stripeplan::beamforming::PrecoderSet { beams: vec![] }
            } else {
                mrt_precoders(&chans, &p).unwrap()
            });
        }
        let txs: Vec<StripeTx> = (0..stripes)
            .map(|u| StripeTx { layout: &layouts[u], precoders: &precoder_sets[u] })
            .collect();
        for (i, user) in users.iter().enumerate() {
            let exact = received_power(user, &txs, &rf).unwrap();
            let bound =
                received_power_lower_bound(i, user, &assignment, &layouts, &powers, &rf).unwrap();
            assert!(
                bound <= exact * (1.0 + 1e-12),
                "trial {trial} hotspot {i}: bound {bound} above exact {exact}"
            );
        }
    }
    println!("PASS criterion 10: dedicated-beam bound below full received power on 500/500 instances");
}

/// Criterion 11: single-channel SDP equals the MRT value to 1e-6
/// relative; SDP min power at least MRT-with-LP-powers on 50 random
/// instances with K <= 4, N <= 16.
#[test]
fn criterion_11_sdp_sanity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let rand_channels = |rng: &mut ChaCha8Rng, k: usize, n: usize| -> Vec<ChannelVector> {
        (0..k)
            .map(|_| ChannelVector {
                coefficients: (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 1e-3)
                    .collect(),
            })
            .collect()
    };
    // single channel matches MRT
    for trial in 0..10 {
        let n = rng.gen_range(2..=16);
        let h = rand_channels(&mut rng, 1, n);
        let out = sdp_precoders(&h, &[1.0], 1.0, 50, trial).unwrap();
        let expect = h[0].norm_sq();
        assert!(
            (out.sdp_value - expect).abs() / expect <= 1e-6,
            "trial {trial}: sdp {} vs mrt {expect}",
            out.sdp_value
        );
    }
    // dominance over MRT with LP powers
    for trial in 0..50 {
        let k = rng.gen_range(1..=4);
        let n = rng.gen_range(2..=16).max(k);
        let channels = rand_channels(&mut rng, k, n);
        let gains: Vec<f64> = channels.iter().map(|h| h.norm_sq()).collect();
        let alloc = allocate_powers_lp(&gains, &vec![1.0; k], 1.0).unwrap();
        let mrt = mrt_precoders(&channels, &alloc.powers).unwrap();
        let mrt_min = channels
            .iter()
            .map(|h| mrt.beams.iter().map(|w| h.inner(w).norm_sqr()).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let out = sdp_precoders(&channels, &vec![1.0; k], 1.0, 100, 5000 + trial).unwrap();
        assert!(
            out.sdp_value >= mrt_min * (1.0 - 1e-6),
            "trial {trial}: sdp {} below mrt {mrt_min}",
            out.sdp_value
        );
        assert!(out.shortfall <= 0.05, "trial {trial}: extraction shortfall {}", out.shortfall);
    }
    println!("PASS criterion 11: single-channel SDP equals MRT (1e-6); SDP dominates MRT-with-LP-powers on 50/50 instances");
}

/// Criterion 12: identical config and seed reproduce a byte-identical raw
/// CSV across two full pipeline runs.
#[test]
fn criterion_12_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let scenario_path = dir.path().join("scenario.json");
    let hotspots = generate_hotspots(25.0, 25.0, 5.0, 6, (0.8, 1.2), 3).unwrap();
    let scenario = scenario_with(hotspots, 1.0e10, 2, 8);
    std::fs::write(&scenario_path, serde_json::to_string_pretty(&scenario).unwrap()).unwrap();

    let config = |out: std::path::PathBuf| ExperimentConfig {
        scenario: scenario_path.clone(),
        stripes: 2,
        clustering: stripeplan_cli::config::ClusteringMethod::FacAo,
        methods: vec!["polygon".into(), "center_upa".into()],
        precoders: vec!["mrt".into()],
        sweep: Some(SweepSpec { axis: SweepAxis::StripeLength, values: vec![0.12, 0.24] }),
        draws: 3,
        user_radius_m: 0.5,
        seed: 42,
        workers: 1,
        out_dir: out,
        eps: 1e-6,
        omega: 1.1,
        zeta: 4,
    };
    let out_a = dir.path().join("run_a");
    let out_b = dir.path().join("run_b");
    std::fs::create_dir_all(&out_a).unwrap();
    std::fs::create_dir_all(&out_b).unwrap();
    let ra = run_experiment(&config(out_a.clone())).unwrap();
    let rb = run_experiment(&config(out_b.clone())).unwrap();
    assert!(!ra.any_failed && !rb.any_failed);
    let a = std::fs::read(out_a.join("raw.csv")).unwrap();
    let b = std::fs::read(out_b.join("raw.csv")).unwrap();
    assert_eq!(a, b, "raw CSVs differ between identical runs");
    assert!(!a.is_empty());
    println!("PASS criterion 12: identical config and seed reproduce byte-identical raw CSV ({} bytes)", a.len());
}
