//! Pipeline orchestration: cluster, deploy per grid cell, evaluate, and
//! write deterministic artifacts.
//!
//! Grid cells (sweep value x method) are independent and run on a worker
//! pool; results are assembled in cell order so every emitted byte is a
//! pure function of the config and seeds. Wall-clock timings are
//! nondeterministic and therefore go to `timing.log` only; the raw CSV
//! keeps its `runtime_s` column at a deterministic placeholder value.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;

use stripeplan::beamforming::evaluate_min_power_perturbed;
use stripeplan::clustering::{chebyshev_cluster, fac_ao_default, ClusterRun};
use stripeplan::deployment::{
    baseline_layout, default_init_layout, line_deploy, polygon_deploy, sca_deploy, sgp_deploy,
    BaselineKind, DeploymentProblem, DeploymentResult, Method, TrustRegionState,
};
use stripeplan::scenario::{load_scenario, Scenario};

use crate::config::{ClusteringMethod, ExperimentConfig, SweepAxis};

/// One row of the raw result table.
#[derive(Debug, Clone)]
pub struct Row {
    pub sweep_axis: String,
    pub sweep_value: f64,
    pub method: String,
    pub precoder: String,
    pub draw: usize,
    pub min_power_w: f64,
    pub runtime_s: f64,
    pub iterations: usize,
    pub status: String,
}

/// Everything a run produces besides the files on disk.
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub cluster: ClusterRun,
    /// Any cell failed (its rows carry the error status).
    pub any_failed: bool,
}

fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Scenario variant for one grid point.
fn scenario_at(base: &Scenario, axis: Option<SweepAxis>, value: f64) -> Scenario {
    let mut s = base.clone();
    match axis {
        Some(SweepAxis::Frequency) => {
            s.frequency_hz = value;
            // keep the array critically spaced as the carrier moves
            s.element_spacing_kappa = 0.5 * s.wavelength();
        }
        Some(SweepAxis::StripeLength) => s.stripe_length = value,
        Some(SweepAxis::BoresightB) => s.boresight_b = value,
        Some(SweepAxis::HotspotPerturbation) | None => {}
    }
    s
}

/// Run the configured clustering on the base scenario.
pub fn run_clustering(config: &ExperimentConfig, scenario: &Scenario) -> anyhow::Result<ClusterRun> {
    let run = match config.clustering {
        ClusteringMethod::FacAo => fac_ao_default(
            &scenario.hotspots,
            config.stripes,
            scenario.boresight_b,
            scenario.ceiling_h,
            config.eps,
            config.seed,
        )?,
        ClusteringMethod::Chebyshev => chebyshev_cluster(
            &scenario.hotspots,
            config.stripes,
            scenario.boresight_b,
            scenario.ceiling_h,
            config.seed,
            100,
        )?,
    };
    Ok(run)
}

/// Deploy one method for every cluster of the solution under a scenario
/// variant. Returns one result per stripe, in cluster order.
pub fn deploy_all_clusters(
    config: &ExperimentConfig,
    scenario: &Scenario,
    cluster: &stripeplan::clustering::ClusterSolution,
    method: Method,
) -> anyhow::Result<Vec<DeploymentResult>> {
    let n = scenario.elements_per_stripe();
    let kappa = scenario.element_spacing_kappa;
    let budgets = stripeplan::beamforming::resolve_budgets(scenario, cluster.num_stripes());
    let trust = TrustRegionState { omega: config.omega, ..TrustRegionState::defaults(kappa) };
    let mut out = Vec::with_capacity(cluster.num_stripes());
    for u in 0..cluster.num_stripes() {
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
                sgp_deploy(&problem, &init, &trust, config.eps)?
            }
            Method::Sca => {
                let init = default_init_layout(&head, n, kappa, scenario.ceiling_h);
                sca_deploy(&problem, &init, trust.sigma, kappa / 10.0, config.eps)?
            }
            Method::Polygon => polygon_deploy(&problem, &head, config.omega, config.eps)?,
            Method::Line => line_deploy(&problem, &head, config.omega, config.eps, config.zeta)?,
            Method::CenterUpa | Method::CenterRectangle => {
                let kind = if method == Method::CenterUpa {
                    BaselineKind::CenterUpa
                } else {
                    BaselineKind::CenterRectangle
                };
                let layout = baseline_layout(kind, &problem.hotspots, n, kappa, scenario.ceiling_h)?;
                baseline_result(method, layout, &problem)?
            }
        };
        result.validate(&problem)?;
        out.push(result);
    }
    Ok(out)
}

fn baseline_result(
    method: Method,
    layout: stripeplan::channel::StripeLayout,
    problem: &DeploymentProblem,
) -> anyhow::Result<DeploymentResult> {
    let gains: Vec<f64> = problem
        .hotspots
        .iter()
        .map(|h| stripeplan::deployment::gain_factor(&layout, h, problem.boresight_b, problem.ceiling_h))
        .collect();
    let etas: Vec<f64> = problem.hotspots.iter().map(|h| h.density).collect();
    let alloc = stripeplan::beamforming::allocate_powers_lp(&gains, &etas, problem.power_budget)?;
    let objective = stripeplan::deployment::min_weighted_gain(
        &layout,
        &problem.hotspots,
        &alloc.powers,
        problem.boresight_b,
        problem.ceiling_h,
    );
    Ok(DeploymentResult {
        method,
        layout,
        powers: alloc.powers,
        objective,
        trace: vec![objective],
        iterations: 1,
        converged: true,
    })
}

struct CellOutput {
    rows: Vec<Row>,
    deployments: Option<(String, Vec<DeploymentResult>)>,
    wall_s: f64,
    failed: bool,
}

/// Execute the full pipeline: cluster once, then deploy and evaluate every
/// (sweep value, method) cell, in parallel up to the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<RunOutput> {
    let scenario = load_scenario(&config.scenario)
        .with_context(|| format!("loading scenario {}", config.scenario.display()))?;
    let out_dir = &config.out_dir;
    std::fs::create_dir_all(out_dir.join("deployments"))?;

    let cluster_run = run_clustering(config, &scenario)?;
    write_json(&out_dir.join("cluster.json"), &cluster_run.solution)?;
    write_json(&out_dir.join("cluster_trace.json"), &cluster_run.trace)?;

    let (axis, grid): (Option<SweepAxis>, Vec<f64>) = match &config.sweep {
        Some(s) => (Some(s.axis), s.values.clone()),
        None => (None, vec![0.0]),
    };
    let axis_name = axis.map_or("none", |a| a.name()).to_string();
    let methods = config.parsed_methods();
    let precoders = config.parsed_precoders();

    // for the perturbation sweep the deployment is fixed at the nominal
    // centers; compute it once per method
    let perturbation_base: Option<Vec<(Method, anyhow::Result<Vec<DeploymentResult>>)>> =
        if axis == Some(SweepAxis::HotspotPerturbation) {
            Some(
                methods
                    .iter()
                    .map(|&m| (m, deploy_all_clusters(config, &scenario, &cluster_run.solution, m)))
                    .collect(),
            )
        } else {
            None
        };

    let cells: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..methods.len()).map(move |m| (g, m)))
        .collect();

    let workers = if config.workers == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        config.workers
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;

    let run_cell = |&(gi, mi): &(usize, usize)| -> CellOutput {
        let t0 = std::time::Instant::now();
        let value = grid[gi];
        let method = methods[mi];
        let variant = scenario_at(&scenario, axis, value);
        let delta_c = if axis == Some(SweepAxis::HotspotPerturbation) { value } else { 0.0 };

        let deployments: anyhow::Result<Vec<DeploymentResult>> = match &perturbation_base {
            Some(base) => match &base[mi].1 {
                Ok(d) => Ok(d.clone()),
                Err(e) => Err(anyhow::anyhow!("{e}")),
            },
            None => deploy_all_clusters(config, &variant, &cluster_run.solution, method),
        };

        let mut rows = Vec::new();
        let mut failed = false;
        let mut artifact = None;
        match deployments {
            Ok(deps) => {
                let iterations = deps.iter().map(|d| d.iterations).max().unwrap_or(0);
                for &precoder in &precoders {
                    let eval_seed = mix_seed(config.seed, gi as u64, mi as u64);
                    let eval = evaluate_min_power_perturbed(
                        &cluster_run.solution,
                        &deps,
                        &variant,
                        precoder,
                        config.draws,
                        config.user_radius_m,
                        eval_seed,
                        delta_c,
                    );
                    match eval {
                        Ok(result) => {
                            for (draw, &sample) in result.samples.iter().enumerate() {
                                rows.push(Row {
                                    sweep_axis: axis_name.clone(),
                                    sweep_value: value,
                                    method: method.name().into(),
                                    precoder: precoder.name().into(),
                                    draw,
                                    min_power_w: sample,
                                    runtime_s: 0.0,
                                    iterations,
                                    status: "ok".into(),
                                });
                            }
                        }
                        Err(e) => {
                            failed = true;
                            for draw in 0..config.draws {
                                rows.push(Row {
                                    sweep_axis: axis_name.clone(),
                                    sweep_value: value,
                                    method: method.name().into(),
                                    precoder: precoder.name().into(),
                                    draw,
                                    min_power_w: f64::NAN,
                                    runtime_s: 0.0,
                                    iterations,
                                    status: format!("error: {e}"),
                                });
                            }
                        }
                    }
                }
                artifact = Some((format!("{axis_name}_{gi}_{}", method.name()), deps));
            }
            Err(e) => {
                failed = true;
                for &precoder in &precoders {
                    for draw in 0..config.draws {
                        rows.push(Row {
                            sweep_axis: axis_name.clone(),
                            sweep_value: value,
                            method: method.name().into(),
                            precoder: precoder.name().into(),
                            draw,
                            min_power_w: f64::NAN,
                            runtime_s: 0.0,
                            iterations: 0,
                            status: format!("error: {e}"),
                        });
                    }
                }
            }
        }
        CellOutput { rows, deployments: artifact, wall_s: t0.elapsed().as_secs_f64(), failed }
    };

    let outputs: Vec<CellOutput> = pool.install(|| cells.par_iter().map(run_cell).collect());

    // single-writer merge in cell order keeps all artifacts deterministic
    let mut rows = Vec::new();
    let mut any_failed = false;
    let mut timing = String::new();
    for (cell, output) in cells.iter().zip(outputs) {
        any_failed |= output.failed;
        timing.push_str(&format!(
            "cell grid={} method={} wall_s={:.3}\n",
            grid[cell.0],
            methods[cell.1].name(),
            output.wall_s
        ));
        if let Some((name, deps)) = output.deployments {
            write_json(&out_dir.join("deployments").join(format!("{name}.json")), &deps)?;
        }
        rows.extend(output.rows);
    }
    std::fs::write(out_dir.join("timing.log"), timing)?;
    write_raw_csv(&out_dir.join("raw.csv"), &rows)?;
    Ok(RunOutput { rows, cluster: cluster_run, any_failed })
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Format a float deterministically for CSV emission.
fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

pub fn write_raw_csv(path: &Path, rows: &[Row]) -> anyhow::Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        file,
        "sweep_axis,sweep_value,method,precoder,draw,min_power_w,runtime_s,iterations,status"
    )?;
    for r in rows {
        writeln!(
            file,
            "{},{},{},{},{},{},{},{},{}",
            r.sweep_axis,
            fmt_f64(r.sweep_value),
            r.method,
            r.precoder,
            r.draw,
            fmt_f64(r.min_power_w),
            fmt_f64(r.runtime_s),
            r.iterations,
            r.status
        )?;
    }
    file.flush()?;
    Ok(())
}
