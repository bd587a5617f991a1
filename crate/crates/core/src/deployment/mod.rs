//! Per-cluster radio stripe element placement.
//!
//! Given one cluster of hotspots and a stripe of `N` elements at spacing
//! `kappa`, four optimizers maximize the minimum power-weighted channel
//! gain across the cluster's hotspots:
//!
//! - [`sgp_deploy`]: free-form placement by iterated GP condensation of the
//!   signomial program (distances and pair spacings as explicit variables).
//! - [`sca_deploy`]: free-form placement alternating a linearized convex
//!   location step with a power-allocation LP.
//! - [`polygon_deploy`]: elements fixed on a regular N-gon, center
//!   optimized by the same GP condensation.
//! - [`line_deploy`]: elements fixed on a straight line, center optimized
//!   per orientation over a grid of angles, best angle kept.
//!
//! Free-form outputs pass through [`map_to_feasible`] to restore the exact
//! cable spacing constraints, after which transmit powers are re-optimized
//! on the final geometry. Two fixed baselines ([`baseline_layout`]) serve
//! as benchmarks.
//!
//! All optimizers work in a translated frame with the area moved to
//! `[1, 1 + extent]` so that every GP variable is strictly positive.

mod baseline;
mod freeform;
mod mapping;
mod sca;
mod shaped;

pub use baseline::{baseline_layout, BaselineKind};
pub use freeform::sgp_deploy;
pub use mapping::{map_to_feasible, MappingParams};
pub use sca::sca_deploy;
pub use shaped::{line_deploy, line_layout, polygon_deploy, polygon_layout};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beamforming::BeamformError;
use crate::channel::{ChannelError, StripeLayout};
use crate::conic::ConicError;
use crate::scenario::{Hotspot, Point3};

/// Offset applied to x and y when moving the area into the strictly
/// positive orthant for GP solves.
pub const COORD_SHIFT: f64 = 1.0;

/// One stripe's placement problem: the hotspots of its cluster plus the
/// stripe hardware parameters.
#[derive(Debug, Clone)]
pub struct DeploymentProblem {
    pub hotspots: Vec<Hotspot>,
    pub n_elements: usize,
    pub kappa: f64,
    pub boresight_b: f64,
    pub power_budget: f64,
    pub ceiling_h: f64,
}

impl DeploymentProblem {
    pub fn validate(&self) -> Result<(), DeployError> {
        if self.n_elements < 2 {
            return Err(DeployError::TooFewElements(self.n_elements));
        }
        if self.hotspots.is_empty() {
            return Err(DeployError::EmptyCluster);
        }
        for (i, h) in self.hotspots.iter().enumerate() {
            if h.elevation_offset(self.ceiling_h) <= 0.0 {
                return Err(DeployError::HotspotNotBelowCeiling(i));
            }
        }
        Ok(())
    }
}

/// Trust-region parameters of the iterated schemes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrustRegionState {
    /// GP box factor per variable, `> 1`.
    pub omega: f64,
    /// SCA location-step ball radius [m], `> 0`.
    pub sigma: f64,
    /// Pair-equality relaxation factor used on GP infeasibility, `>= 1`.
    pub rho: f64,
}

impl TrustRegionState {
    /// Defaults: `omega = 1.1`, `rho = 1.05`, `sigma = 5 kappa`.
    pub fn defaults(kappa: f64) -> Self {
        Self { omega: 1.1, sigma: 5.0 * kappa, rho: 1.05 }
    }
}

/// Which deployment produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sgp,
    Sca,
    Polygon,
    Line,
    CenterUpa,
    CenterRectangle,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Sgp => "sgp",
            Method::Sca => "sca",
            Method::Polygon => "polygon",
            Method::Line => "line",
            Method::CenterUpa => "center_upa",
            Method::CenterRectangle => "center_rectangle",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Some(match s {
            "sgp" => Method::Sgp,
            "sca" => Method::Sca,
            "polygon" => Method::Polygon,
            "line" => Method::Line,
            "center_upa" => Method::CenterUpa,
            "center_rectangle" => Method::CenterRectangle,
            _ => return None,
        })
    }

    /// Whether the layout is produced by an optimizer (and must satisfy the
    /// stripe spacing invariants) rather than a fixed benchmark shape.
    pub fn is_optimized(&self) -> bool {
        !matches!(self, Method::CenterUpa | Method::CenterRectangle)
    }
}

/// A deployed stripe: final element layout, per-hotspot transmit powers,
/// the recomputed objective, and the per-iteration surrogate trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeploymentResult {
    pub method: Method,
    pub layout: StripeLayout,
    /// Power per hotspot of the cluster, in cluster order [W].
    pub powers: Vec<f64>,
    /// `min_i P_i e_i^b sum_j ||g_j - c_i||^-(b+2) / eta_i` on the final
    /// geometry (wavelength-free gain-power product).
    pub objective: f64,
    /// Surrogate objective after each outer iteration.
    pub trace: Vec<f64>,
    /// Outer iterations until the stopping rule fired (for the line
    /// method, the worst count over its angle grid).
    pub iterations: usize,
    /// Whether the `|1 - t/t'| <= eps` stopping rule fired (for the line
    /// method, on every angle of its grid).
    pub converged: bool,
}

impl DeploymentResult {
    /// Check result invariants against its problem.
    pub fn validate(&self, problem: &DeploymentProblem) -> Result<(), DeployError> {
        let total: f64 = self.powers.iter().sum();
        if total > problem.power_budget + 1e-9 {
            return Err(DeployError::Invariant(format!(
                "power {total} exceeds budget {}",
                problem.power_budget
            )));
        }
        if self.method.is_optimized() {
            self.layout.validate_spacing()?;
        }
        let recomputed = min_weighted_gain(
            &self.layout,
            &problem.hotspots,
            &self.powers,
            problem.boresight_b,
            problem.ceiling_h,
        );
        let scale = recomputed.abs().max(1e-300);
        if (recomputed - self.objective).abs() / scale > 1e-9 {
            return Err(DeployError::Invariant(format!(
                "objective {} does not match recomputed {recomputed}",
                self.objective
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DeployError {
    #[error("deployment needs at least 2 elements, got {0}")]
    TooFewElements(usize),
    #[error("polygon layout needs at least 3 elements, got {0}")]
    PolygonTooSmall(usize),
    #[error("rectangle baseline needs at least 4 elements, got {0}")]
    RectangleTooSmall(usize),
    #[error("cluster has no hotspots")]
    EmptyCluster,
    #[error("hotspot {0} is not below the ceiling")]
    HotspotNotBelowCeiling(usize),
    #[error("feasibility mapping did not converge within {sweeps} sweeps ({detail})")]
    MappingFailed { sweeps: usize, detail: String },
    #[error("GP iteration stalled: {0}")]
    Stalled(String),
    #[error("search parameter out of range: {0}")]
    BadParameter(&'static str),
    #[error(transparent)]
    Solver(#[from] ConicError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Power(#[from] BeamformError),
    #[error("result invariant violated: {0}")]
    Invariant(String),
}

/// Wavelength-free gain core `e^b * sum_j ||g_j - c||^-(b+2)` of a layout
/// at one hotspot. The full squared channel gain is this value times
/// `2 (b+1) (lambda / 4 pi)^2`.
pub fn gain_factor(layout: &StripeLayout, hotspot: &Hotspot, b: f64, ceiling_h: f64) -> f64 {
    let e = hotspot.elevation_offset(ceiling_h);
    let sum: f64 = layout
        .elements
        .iter()
        .map(|g| g.dist(&hotspot.center).powf(-(b + 2.0)))
        .sum();
    e.powf(b) * sum
}

/// `min_i P_i * gain_factor_i / eta_i`, the objective every deployment
/// reports on its final geometry.
pub fn min_weighted_gain(
    layout: &StripeLayout,
    hotspots: &[Hotspot],
    powers: &[f64],
    b: f64,
    ceiling_h: f64,
) -> f64 {
    hotspots
        .iter()
        .zip(powers.iter())
        .map(|(h, &p)| p * gain_factor(layout, h, b, ceiling_h) / h.density)
        .fold(f64::INFINITY, f64::min)
}

/// Allocate the power budget over the cluster on the final geometry and
/// assemble a [`DeploymentResult`].
pub(crate) fn finish_result(
    method: Method,
    layout: StripeLayout,
    problem: &DeploymentProblem,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
) -> Result<DeploymentResult, DeployError> {
    let gains: Vec<f64> = problem
        .hotspots
        .iter()
        .map(|h| gain_factor(&layout, h, problem.boresight_b, problem.ceiling_h))
        .collect();
    let etas: Vec<f64> = problem.hotspots.iter().map(|h| h.density).collect();
    let alloc = crate::beamforming::allocate_powers_lp(&gains, &etas, problem.power_budget)?;
    let objective = min_weighted_gain(
        &layout,
        &problem.hotspots,
        &alloc.powers,
        problem.boresight_b,
        problem.ceiling_h,
    );
    Ok(DeploymentResult { method, layout, powers: alloc.powers, objective, trace, iterations, converged })
}

/// Hotspot centers in the shifted frame, as flat arrays.
pub(crate) fn shifted_centers(problem: &DeploymentProblem) -> Vec<[f64; 3]> {
    problem
        .hotspots
        .iter()
        .map(|h| [h.center.x + COORD_SHIFT, h.center.y + COORD_SHIFT, h.center.z])
        .collect()
}

pub(crate) fn unshift_point(x: f64, y: f64, z: f64) -> Point3 {
    Point3::new(x - COORD_SHIFT, y - COORD_SHIFT, z)
}

/// Default free-form initial layout: a regular ring with exact chord
/// spacing `kappa` centered at the cluster head (a straight line for
/// `N = 2`). Feasible for the cable constraints by construction.
pub fn default_init_layout(head: &Point3, n: usize, kappa: f64, ceiling_h: f64) -> StripeLayout {
    if n >= 3 {
        polygon_layout(&Point3::new(head.x, head.y, ceiling_h), n, kappa)
            .expect("n >= 3 always yields a polygon")
    } else {
        let elements = (0..n)
            .map(|j| Point3::new(head.x + j as f64 * kappa, head.y, ceiling_h))
            .collect();
        StripeLayout::new(elements, kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain_factor_matches_channel_model() {
        // gain_factor * 2(b+1)(lambda/4pi)^2 equals the closed-form gain
        let layout = default_init_layout(&Point3::new(5.0, 5.0, 5.0), 6, 0.015, 5.0);
        let h = Hotspot::new(Point3::new(4.5, 5.2, 1.0), 1.0);
        let b = 2.0;
        let lambda = 0.03;
        let gf = gain_factor(&layout, &h, b, 5.0);
        let full = crate::channel::channel_gain_sq(&layout, &h.center, b, 5.0, lambda).unwrap();
        let scale = 2.0 * (b + 1.0) * (lambda / (4.0 * std::f64::consts::PI)).powi(2);
        assert!((gf * scale - full).abs() / full < 1e-12);
    }

    #[test]
    fn default_init_layout_is_feasible() {
        for n in [2usize, 3, 5, 12, 24] {
            let l = default_init_layout(&Point3::new(3.0, 4.0, 5.0), n, 0.015, 5.0);
            assert_eq!(l.len(), n);
            l.validate_spacing().unwrap();
        }
    }
}
