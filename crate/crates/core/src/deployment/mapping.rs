//! Heuristic mapping of a raw element cloud onto the feasible cable set.
//!
//! Sweeps repeatedly over the elements: any pair closer than `kappa` is
//! pushed apart to exactly `kappa` along the line connecting the two, then
//! every consecutive pair is re-spaced to exactly `kappa` at the angle of
//! its current segment. Keeping the same angles can lock the sweep into a
//! repeating pattern, so every `i_s`-th sweep adds a small angular offset
//! `phi_offset` to the re-spacing direction.

use crate::channel::{StripeLayout, SPACING_TOL};
use crate::scenario::Point3;

use super::DeployError;

/// Mapping controls; defaults are `i_s = 5`, `phi_offset = pi / 36`, and a
/// sweep cap of `10 N`.
#[derive(Debug, Clone, Copy)]
pub struct MappingParams {
    pub i_s: usize,
    pub phi_offset: f64,
    pub sweep_cap_factor: usize,
}

impl Default for MappingParams {
    fn default() -> Self {
        Self { i_s: 5, phi_offset: std::f64::consts::PI / 36.0, sweep_cap_factor: 10 }
    }
}

/// Deterministic direction for a coincident pair.
fn fallback_angle(j: usize, n: usize) -> f64 {
    ((j * 31 + n * 17) as f64 * 0.618_033_988_749_895).fract() * std::f64::consts::TAU
}

/// Map raw element positions to a feasible stripe layout: consecutive
/// spacing exactly `kappa`, pairwise spacing at least `kappa`. Fails with a
/// diagnostic if the sweep cap is exceeded.
pub fn map_to_feasible(
    points: &[Point3],
    kappa: f64,
    params: &MappingParams,
) -> Result<StripeLayout, DeployError> {
    let n = points.len();
    if n < 2 {
        return Err(DeployError::TooFewElements(n));
    }
    let mut g: Vec<Point3> = points.to_vec();
    let as_layout = StripeLayout::new(g.clone(), kappa);
    if as_layout.validate_spacing().is_ok() {
        return Ok(as_layout);
    }
    let cap = params.sweep_cap_factor * n;
    for sweep in 1..=cap {
        for j in 0..n - 1 {
            // push apart any too-close pair, preserving its direction
            for m in (j + 1)..n {
                let d = g[j].dist_xy(&g[m]);
                if d < kappa - SPACING_TOL {
                    let (ux, uy) = if d > 0.0 {
                        ((g[m].x - g[j].x) / d, (g[m].y - g[j].y) / d)
                    } else {
                        let a = fallback_angle(j, m);
                        (a.cos(), a.sin())
                    };
                    g[m] = Point3::new(g[j].x + kappa * ux, g[j].y + kappa * uy, g[m].z);
                }
            }
            // re-space the consecutive pair at its current angle; on every
            // i_s-th sweep the angle is additionally offset by phi_offset
            // toward the preceding segment's direction, so chain turns decay
            // and looped configurations open up (a sign-fixed offset would
            // only rotate the chain rigidly and repeat the same collisions)
            let d = g[j].dist_xy(&g[j + 1]);
            let offset_sweep = sweep % params.i_s == 0;
            if (d - kappa).abs() > SPACING_TOL || offset_sweep {
                let mut phi = if d > 0.0 {
                    (g[j + 1].y - g[j].y).atan2(g[j + 1].x - g[j].x)
                } else {
                    fallback_angle(j, j + 1)
                };
                if offset_sweep && j > 0 {
                    // the offset grows by phi_offset at each i_s-th sweep,
                    // so stubborn loops eventually straighten fully
                    let amount = (sweep / params.i_s) as f64 * params.phi_offset;
                    let prev = (g[j].y - g[j - 1].y).atan2(g[j].x - g[j - 1].x);
                    let mut turn = phi - prev;
                    while turn > std::f64::consts::PI {
                        turn -= std::f64::consts::TAU;
                    }
                    while turn <= -std::f64::consts::PI {
                        turn += std::f64::consts::TAU;
                    }
                    let damped = turn.signum() * (turn.abs() - amount).max(0.0);
                    phi = prev + damped;
                }
                g[j + 1] = Point3::new(g[j].x + kappa * phi.cos(), g[j].y + kappa * phi.sin(), g[j + 1].z);
            }
        }
        let layout = StripeLayout::new(g.clone(), kappa);
        if layout.validate_spacing().is_ok() {
            return Ok(layout);
        }
    }
    let layout = StripeLayout::new(g, kappa);
    let detail = match layout.validate_spacing() {
        Err(e) => e.to_string(),
        Ok(()) => "unknown".into(),
    };
    Err(DeployError::MappingFailed { sweeps: cap, detail })
}
