//! Scenario definition, file ingestion, and stochastic generation of
//! hotspots and user positions.
//!
//! A scenario is a rectangular indoor area with a ceiling at height `h_c`,
//! a list of energy hotspots below the ceiling, and the RF/hardware
//! parameters shared by all radio stripes (carrier frequency, boresight
//! gain, element spacing, stripe length, per-stripe power budgets).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A point in 3-D Cartesian space [m].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Euclidean distance to another point.
    pub fn dist(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Horizontal (x, y) distance, ignoring z.
    pub fn dist_xy(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// A spatial region of concentrated energy demand.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Hotspot {
    /// Center of the hotspot region [m].
    pub center: Point3,
    /// Expected number of devices in the region (dimensionless, > 0).
    pub density: f64,
}

impl Hotspot {
    pub fn new(center: Point3, density: f64) -> Self {
        Self { center, density }
    }

    /// Elevation offset to the ceiling, `e = h_c - c_z` [m].
    pub fn elevation_offset(&self, ceiling_h: f64) -> f64 {
        ceiling_h - self.center.z
    }
}

/// Full planning scenario. Lengths in meters, frequency in Hz, powers in
/// watts. The JSON scenario file mirrors these fields exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    /// Area extent along x [m].
    pub area_x: f64,
    /// Area extent along y [m].
    pub area_y: f64,
    /// Ceiling height `h_c` [m]; all antenna elements sit at this height.
    pub ceiling_h: f64,
    /// Energy hotspots, all inside the area and below the ceiling.
    pub hotspots: Vec<Hotspot>,
    /// Carrier frequency `f` [Hz].
    pub frequency_hz: f64,
    /// Boresight gain exponent `b` of the element radiation profile (>= 0).
    pub boresight_b: f64,
    /// Inter-element spacing `kappa` [m]; must satisfy `kappa >= lambda/2`.
    pub element_spacing_kappa: f64,
    /// Transmit power budget per stripe [W].
    pub power_budgets: Vec<f64>,
    /// Physical cable length of one stripe [m].
    pub stripe_length: f64,
}

/// Errors raised by scenario ingestion and generation.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse scenario file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("element spacing below half-wavelength: kappa = {kappa} m < lambda/2 = {half_lambda} m")]
    SpacingBelowHalfWavelength { kappa: f64, half_lambda: f64 },
    #[error("hotspot outside area: hotspot {index} at ({x}, {y}) not in [0, {area_x}] x [0, {area_y}]")]
    HotspotOutsideArea { index: usize, x: f64, y: f64, area_x: f64, area_y: f64 },
    #[error("hotspot {index} at or above ceiling: z = {z} m >= h_c = {ceiling_h} m")]
    HotspotAboveCeiling { index: usize, z: f64, ceiling_h: f64 },
    #[error("hotspot {index} has non-positive density {density}")]
    NonPositiveDensity { index: usize, density: f64 },
    #[error("stripe too short: {n} element(s) for length {length} m at spacing {kappa} m (need >= 2)")]
    StripeTooShort { n: usize, length: f64, kappa: f64 },
    #[error("non-finite or non-positive field: {0}")]
    BadField(&'static str),
    #[error("empty z range: [{lo}, {hi}] is not a non-empty subset of (0, {ceiling_h})")]
    EmptyZRange { lo: f64, hi: f64, ceiling_h: f64 },
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error("hotspot count must be >= 1")]
    NoHotspots,
}

impl Scenario {
    /// Carrier wavelength `lambda = c0 / f` [m].
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    /// Elements per stripe, `N = floor(L / kappa) + 1`.
    pub fn elements_per_stripe(&self) -> usize {
        (self.stripe_length / self.element_spacing_kappa).floor() as usize + 1
    }

    /// Check every scenario invariant, reporting the violated field and bound.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.area_x > 0.0 && self.area_x.is_finite()) {
            return Err(ScenarioError::BadField("area_x"));
        }
        if !(self.area_y > 0.0 && self.area_y.is_finite()) {
            return Err(ScenarioError::BadField("area_y"));
        }
        if !(self.ceiling_h > 0.0 && self.ceiling_h.is_finite()) {
            return Err(ScenarioError::BadField("ceiling_h"));
        }
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(ScenarioError::BadField("frequency_hz"));
        }
        if !(self.boresight_b >= 0.0 && self.boresight_b.is_finite()) {
            return Err(ScenarioError::BadField("boresight_b"));
        }
        if !(self.stripe_length > 0.0 && self.stripe_length.is_finite()) {
            return Err(ScenarioError::BadField("stripe_length"));
        }
        if self.power_budgets.is_empty() || self.power_budgets.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(ScenarioError::BadField("power_budgets"));
        }
        let half_lambda = 0.5 * self.wavelength();
        if self.element_spacing_kappa < half_lambda {
            return Err(ScenarioError::SpacingBelowHalfWavelength {
                kappa: self.element_spacing_kappa,
                half_lambda,
            });
        }
        if self.hotspots.is_empty() {
            return Err(ScenarioError::NoHotspots);
        }
        for (index, h) in self.hotspots.iter().enumerate() {
            if !h.center.is_finite() {
                return Err(ScenarioError::BadField("hotspot center"));
            }
            if h.center.x < 0.0 || h.center.x > self.area_x || h.center.y < 0.0 || h.center.y > self.area_y {
                return Err(ScenarioError::HotspotOutsideArea {
                    index,
                    x: h.center.x,
                    y: h.center.y,
                    area_x: self.area_x,
                    area_y: self.area_y,
                });
            }
            if h.center.z >= self.ceiling_h {
                return Err(ScenarioError::HotspotAboveCeiling {
                    index,
                    z: h.center.z,
                    ceiling_h: self.ceiling_h,
                });
            }
            if !(h.density > 0.0 && h.density.is_finite()) {
                return Err(ScenarioError::NonPositiveDensity { index, density: h.density });
            }
        }
        let n = self.elements_per_stripe();
        if n < 2 {
            return Err(ScenarioError::StripeTooShort {
                n,
                length: self.stripe_length,
                kappa: self.element_spacing_kappa,
            });
        }
        Ok(())
    }
}

/// Load and validate a scenario from a JSON file.
pub fn load_scenario<P: AsRef<Path>>(path: P) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    let scenario: Scenario = serde_json::from_str(&text)?;
    scenario.validate()?;
    Ok(scenario)
}

/// Draw `k` hotspots uniformly over the area, with z uniform in `z_range`
/// and unit density. Deterministic under `seed`.
pub fn generate_hotspots(
    area_x: f64,
    area_y: f64,
    ceiling_h: f64,
    k: usize,
    z_range: (f64, f64),
    seed: u64,
) -> Result<Vec<Hotspot>, ScenarioError> {
    if k == 0 {
        return Err(ScenarioError::NoHotspots);
    }
    let (lo, hi) = z_range;
    if !(lo > 0.0 && hi < ceiling_h && lo <= hi) {
        return Err(ScenarioError::EmptyZRange { lo, hi, ceiling_h });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let x = rng.gen_range(0.0..area_x);
        let y = rng.gen_range(0.0..area_y);
        let z = if lo == hi { lo } else { rng.gen_range(lo..hi) };
        out.push(Hotspot::new(Point3::new(x, y, z), 1.0));
    }
    Ok(out)
}

/// Sample `count` user positions uniformly over the horizontal disc of the
/// given radius around the hotspot center, at the center's height.
///
/// Uses the polar inverse CDF (`r = R * sqrt(u)`), which is uniform in area.
pub fn sample_users(
    hotspot: &Hotspot,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Point3>, ScenarioError> {
    if radius < 0.0 {
        return Err(ScenarioError::NegativeRadius(radius));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_users_with_rng(hotspot, radius, count, &mut rng))
}

/// As [`sample_users`], drawing from a caller-provided RNG.
pub fn sample_users_with_rng<R: Rng>(
    hotspot: &Hotspot,
    radius: f64,
    count: usize,
    rng: &mut R,
) -> Vec<Point3> {
    let c = hotspot.center;
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = radius * u.sqrt();
            Point3::new(c.x + r * theta.cos(), c.y + r * theta.sin(), c.z)
        })
        .collect()
}
