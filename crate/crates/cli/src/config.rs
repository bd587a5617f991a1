//! Experiment configuration.
//!
//! A JSON config names the scenario file, the pipeline stages to run, and
//! the sweep grid. Command-line flags can override the output directory,
//! seed, worker count, and the method/precoder lists.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use stripeplan::beamforming::PrecoderKind;
use stripeplan::deployment::Method;

/// Parameter axis swept by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Carrier frequency [Hz]; element spacing follows as `lambda/2` and
    /// the element count per stripe is re-derived from the stripe length.
    Frequency,
    /// Physical stripe length [m]; element count re-derived.
    StripeLength,
    /// Boresight gain exponent of the radiation profile.
    BoresightB,
    /// Hotspot center displacement magnitude [m] applied per draw at
    /// evaluation time; deployments stay fixed at the nominal centers.
    HotspotPerturbation,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Frequency => "frequency",
            SweepAxis::StripeLength => "stripe_length",
            SweepAxis::BoresightB => "boresight_b",
            SweepAxis::HotspotPerturbation => "hotspot_perturbation",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// How hotspots are grouped into clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringMethod {
    /// Alternating optimization initialized from the Chebyshev baseline.
    FacAo,
    /// The Chebyshev baseline alone.
    Chebyshev,
}

fn default_draws() -> usize {
    100
}
fn default_radius() -> f64 {
    0.5
}
fn default_eps() -> f64 {
    1e-6
}
fn default_omega() -> f64 {
    1.1
}
fn default_zeta() -> usize {
    50
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_clustering() -> ClusteringMethod {
    ClusteringMethod::FacAo
}
fn default_methods() -> Vec<String> {
    vec![
        "sgp".into(),
        "sca".into(),
        "polygon".into(),
        "line".into(),
        "center_upa".into(),
        "center_rectangle".into(),
    ]
}
fn default_precoders() -> Vec<String> {
    vec!["mrt".into()]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Path to the scenario JSON file.
    pub scenario: PathBuf,
    /// Number of radio stripes (clusters).
    pub stripes: usize,
    #[serde(default = "default_clustering")]
    pub clustering: ClusteringMethod,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_precoders")]
    pub precoders: Vec<String>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default = "default_radius")]
    pub user_radius_m: f64,
    #[serde(default)]
    pub seed: u64,
    /// Parallel workers over grid cells; 0 picks the available parallelism.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Stopping tolerance of the iterative optimizers.
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// GP trust-region box factor.
    #[serde(default = "default_omega")]
    pub omega: f64,
    /// Angle grid size of the line deployment.
    #[serde(default = "default_zeta")]
    pub zeta: usize,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("cannot parse config {}: {e}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.stripes == 0 {
            anyhow::bail!("stripes must be >= 1");
        }
        if self.methods.is_empty() {
            anyhow::bail!("methods list is empty");
        }
        for m in &self.methods {
            if Method::parse(m).is_none() {
                anyhow::bail!("unknown method {m:?} (expected sgp, sca, polygon, line, center_upa, center_rectangle)");
            }
        }
        if self.precoders.is_empty() {
            anyhow::bail!("precoders list is empty");
        }
        for p in &self.precoders {
            if PrecoderKind::parse(p).is_none() {
                anyhow::bail!("unknown precoder {p:?} (expected mrt or sdp)");
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                anyhow::bail!("sweep values list is empty");
            }
            let needs_positive = !matches!(sweep.axis, SweepAxis::HotspotPerturbation | SweepAxis::BoresightB);
            for &v in &sweep.values {
                if needs_positive && v <= 0.0 {
                    anyhow::bail!("sweep value {v} must be positive for axis {}", sweep.axis.name());
                }
                if v < 0.0 {
                    anyhow::bail!("sweep value {v} must be nonnegative");
                }
            }
        }
        if self.draws == 0 {
            anyhow::bail!("draws must be >= 1");
        }
        if self.user_radius_m < 0.0 {
            anyhow::bail!("user_radius_m must be >= 0");
        }
        Ok(())
    }

    pub fn parsed_methods(&self) -> Vec<Method> {
        self.methods.iter().filter_map(|m| Method::parse(m)).collect()
    }

    pub fn parsed_precoders(&self) -> Vec<PrecoderKind> {
        self.precoders.iter().filter_map(|p| PrecoderKind::parse(p)).collect()
    }
}
