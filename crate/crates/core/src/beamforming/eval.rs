//! Monte Carlo evaluation of the minimum received power.
//!
//! Each draw places one user inside a disc around every hotspot center,
//! rebuilds channels at the sampled positions, forms per-stripe precoders
//! for the served users (runtime channel knowledge), and records the
//! minimum over all users of the full received power, including
//! cross-stripe and non-dedicated beam contributions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beamforming::{
    mrt_precoders, received_power, sdp_precoders, BeamformError, PrecoderSet, RfParams, StripeTx,
};
use crate::channel::channel_vector;
use crate::clustering::ClusterSolution;
use crate::deployment::DeploymentResult;
use crate::scenario::{sample_users_with_rng, Hotspot, Scenario};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Precoder family used at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecoderKind {
    Mrt,
    Sdp,
}

impl PrecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            PrecoderKind::Mrt => "mrt",
            PrecoderKind::Sdp => "sdp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mrt" => Some(PrecoderKind::Mrt),
            "sdp" => Some(PrecoderKind::Sdp),
            _ => None,
        }
    }
}

/// Per-sweep-point evaluation samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalResult {
    /// Value of the swept parameter this evaluation belongs to.
    pub sweep_value: f64,
    /// Minimum received power per draw [W].
    pub samples: Vec<f64>,
    pub precoder: PrecoderKind,
    pub method: String,
    pub seed: u64,
}

impl EvalResult {
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len().max(1) as f64
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("need one deployed stripe per cluster ({stripes} stripes for {clusters} clusters)")]
    StripeCountMismatch { stripes: usize, clusters: usize },
    #[error("stripe {0} power vector does not match its cluster size")]
    PowerShapeMismatch(usize),
    #[error(transparent)]
    Beamform(#[from] BeamformError),
}

/// Deterministic per-draw seed derivation.
fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Resolve per-stripe power budgets: the scenario list when it matches the
/// stripe count, otherwise the total split equally.
pub fn resolve_budgets(scenario: &Scenario, stripes: usize) -> Vec<f64> {
    if scenario.power_budgets.len() == stripes {
        scenario.power_budgets.clone()
    } else {
        let total: f64 = scenario.power_budgets.iter().sum();
        vec![total / stripes as f64; stripes]
    }
}

/// Evaluate the minimum received power over `draws` Monte Carlo user
/// placements. Pure function of its inputs and `seed`.
pub fn evaluate_min_power(
    cluster: &ClusterSolution,
    stripes: &[DeploymentResult],
    scenario: &Scenario,
    precoder: PrecoderKind,
    draws: usize,
    radius: f64,
    seed: u64,
) -> Result<EvalResult, EvalError> {
    evaluate_min_power_perturbed(cluster, stripes, scenario, precoder, draws, radius, seed, 0.0)
}

/// As [`evaluate_min_power`], additionally displacing every hotspot center
/// by `delta_c` meters in a per-draw random direction before sampling the
/// user, to probe robustness against hotspot location uncertainty.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_min_power_perturbed(
    cluster: &ClusterSolution,
    stripes: &[DeploymentResult],
    scenario: &Scenario,
    precoder: PrecoderKind,
    draws: usize,
    radius: f64,
    seed: u64,
    delta_c: f64,
) -> Result<EvalResult, EvalError> {
    let u_count = cluster.num_stripes();
    if stripes.len() != u_count {
        return Err(EvalError::StripeCountMismatch { stripes: stripes.len(), clusters: u_count });
    }
    let members: Vec<Vec<usize>> = (0..u_count).map(|u| cluster.members(u)).collect();
    for (u, m) in members.iter().enumerate() {
        if stripes[u].powers.len() != m.len() {
            return Err(EvalError::PowerShapeMismatch(u));
        }
    }
    let rf = RfParams::of_scenario(scenario);
    let budgets = resolve_budgets(scenario, u_count);
    let hotspots = &scenario.hotspots;

    let mut samples = Vec::with_capacity(draws);
    for draw in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, draw as u64, 0x5eed));
        // one user per hotspot, around a possibly displaced center
        let users: Vec<_> = hotspots
            .iter()
            .map(|h| {
                let mut center = h.center;
                if delta_c > 0.0 {
                    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
                    center.x = (center.x + delta_c * angle.cos()).clamp(0.0, scenario.area_x);
                    center.y = (center.y + delta_c * angle.sin()).clamp(0.0, scenario.area_y);
                }
                let moved = Hotspot::new(center, h.density);
                sample_users_with_rng(&moved, radius, 1, &mut rng)[0]
            })
            .collect();

        // per-stripe precoders toward the sampled users of served hotspots
        let mut precoder_sets: Vec<PrecoderSet> = Vec::with_capacity(u_count);
        for u in 0..u_count {
            let layout = &stripes[u].layout;
            let chans: Vec<_> = members[u]
                .iter()
                .map(|&i| {
                    channel_vector(layout, &users[i], rf.wavelength, rf.boresight_b, rf.ceiling_h)
                        .map_err(BeamformError::from)
                })
                .collect::<Result<_, _>>()?;
            let set = match precoder {
                PrecoderKind::Mrt => mrt_precoders(&chans, &stripes[u].powers)?,
                PrecoderKind::Sdp => {
                    let etas: Vec<f64> = members[u].iter().map(|&i| hotspots[i].density).collect();
                    let sdp_seed = mix_seed(seed, draw as u64, u as u64 + 1);
                    let out = sdp_precoders(&chans, &etas, budgets[u], 100, sdp_seed)?;
                    PrecoderSet { beams: out.beams }
                }
            };
            precoder_sets.push(set);
        }
        let txs: Vec<StripeTx> = (0..u_count)
            .map(|u| StripeTx { layout: &stripes[u].layout, precoders: &precoder_sets[u] })
            .collect();

        // full received power at every user; keep the minimum
        let mut min_power = f64::INFINITY;
        for user in &users {
            let p = received_power(user, &txs, &rf)?;
            min_power = min_power.min(p);
        }
        samples.push(min_power);
    }
    let method = stripes.first().map_or("unknown".to_string(), |s| s.method.name().to_string());
    Ok(EvalResult { sweep_value: f64::NAN, samples, precoder, method, seed })
}
