//! Fixed benchmark layouts placed at the mean hotspot coordinates.

use crate::channel::StripeLayout;
use crate::scenario::{Hotspot, Point3};

use super::DeployError;

/// Benchmark layout families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// Square uniform planar array with the nearest square number of
    /// elements, traversed in serpentine order.
    CenterUpa,
    /// Rectangular loop with 1:1 aspect and perimeter `N kappa`, elements
    /// at cable-length spacing `kappa` along the loop.
    CenterRectangle,
}

fn mean_xy(hotspots: &[Hotspot]) -> (f64, f64) {
    let n = hotspots.len() as f64;
    let x = hotspots.iter().map(|h| h.center.x).sum::<f64>() / n;
    let y = hotspots.iter().map(|h| h.center.y).sum::<f64>() / n;
    (x, y)
}

/// Build a benchmark layout for a cluster: a UPA or a rectangular loop
/// centered at the mean hotspot position, at ceiling height.
pub fn baseline_layout(
    kind: BaselineKind,
    hotspots: &[Hotspot],
    n: usize,
    kappa: f64,
    ceiling_h: f64,
) -> Result<StripeLayout, DeployError> {
    if hotspots.is_empty() {
        return Err(DeployError::EmptyCluster);
    }
    let (cx, cy) = mean_xy(hotspots);
    match kind {
        BaselineKind::CenterUpa => {
            if n < 1 {
                return Err(DeployError::TooFewElements(n));
            }
            let side = (n as f64).sqrt().round().max(1.0) as usize;
            let half = (side as f64 - 1.0) / 2.0;
            let mut elements = Vec::with_capacity(side * side);
            for row in 0..side {
                let y = cy + (row as f64 - half) * kappa;
                // serpentine order keeps consecutive grid neighbors at
                // spacing kappa along the cable
                let cols: Vec<usize> = if row % 2 == 0 {
                    (0..side).collect()
                } else {
                    (0..side).rev().collect()
                };
                for col in cols {
                    let x = cx + (col as f64 - half) * kappa;
                    elements.push(Point3::new(x, y, ceiling_h));
                }
            }
            Ok(StripeLayout::new(elements, kappa))
        }
        BaselineKind::CenterRectangle => {
            if n < 4 {
                return Err(DeployError::RectangleTooSmall(n));
            }
            let side = n as f64 * kappa / 4.0;
            let half = side / 2.0;
            // walk the loop counterclockwise from the lower-left corner,
            // placing elements at arc length j * kappa
            let corner = [
                (cx - half, cy - half),
                (cx + half, cy - half),
                (cx + half, cy + half),
                (cx - half, cy + half),
            ];
            let dirs = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
            let mut elements = Vec::with_capacity(n);
            for j in 0..n {
                let s = j as f64 * kappa;
                let seg = ((s / side).floor() as usize).min(3);
                let along = s - seg as f64 * side;
                let x = corner[seg].0 + dirs[seg].0 * along;
                let y = corner[seg].1 + dirs[seg].1 * along;
                elements.push(Point3::new(x, y, ceiling_h));
            }
            Ok(StripeLayout::new(elements, kappa))
        }
    }
}
