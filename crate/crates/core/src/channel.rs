//! Near-field line-of-sight channel model.
//!
//! Elements sit on the ceiling and radiate downward with a `cos^b` profile.
//! The channel to a point below carries a spherical-wavefront phase
//! `exp(-i 2 pi d / lambda)` and an amplitude `sqrt(F(theta)) * lambda /
//! (4 pi d)`, so the aggregate gain of a stripe depends on every element's
//! distance individually rather than on a single array steering direction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::Point3;

/// Spacing tolerance for stripe feasibility checks [m].
pub const SPACING_TOL: f64 = 1e-9;

/// Ordered element positions of one radio stripe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StripeLayout {
    /// Element coordinates in cable order.
    pub elements: Vec<Point3>,
    /// Inter-element spacing `kappa` [m].
    pub kappa: f64,
}

/// Channel coefficients from the elements of one stripe to one point.
#[derive(Debug, Clone)]
pub struct ChannelVector {
    pub coefficients: Vec<Complex64>,
}

impl ChannelVector {
    /// Squared Euclidean norm, `sum_j |h_j|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|h| h.norm_sqr()).sum()
    }

    /// Inner product `h^H w`.
    pub fn inner(&self, w: &[Complex64]) -> Complex64 {
        self.coefficients
            .iter()
            .zip(w.iter())
            .map(|(h, w)| h.conj() * w)
            .sum()
    }
}

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("layout has no elements")]
    EmptyLayout,
    #[error("element {0} coincides with the evaluation point")]
    CoincidentPoint(usize),
    #[error("wavelength must be positive, got {0}")]
    NonPositiveWavelength(f64),
    #[error("consecutive spacing violated at segment {index}: {actual} m vs kappa {kappa} m")]
    ConsecutiveSpacing { index: usize, actual: f64, kappa: f64 },
    #[error("pairwise spacing violated for elements ({i}, {j}): {actual} m < kappa {kappa} m")]
    PairwiseSpacing { i: usize, j: usize, actual: f64, kappa: f64 },
    #[error("total cable length exceeded: {actual} m > {max} m")]
    TotalLength { actual: f64, max: f64 },
}

impl StripeLayout {
    pub fn new(elements: Vec<Point3>, kappa: f64) -> Self {
        Self { elements, kappa }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Check the radio stripe feasibility invariants: consecutive spacing
    /// equal to `kappa`, pairwise spacing at least `kappa`, and total cable
    /// length at most `(N-1) * kappa`, all within [`SPACING_TOL`].
    pub fn validate_spacing(&self) -> Result<(), ChannelError> {
        let n = self.elements.len();
        let mut total = 0.0;
        for j in 0..n.saturating_sub(1) {
            let d = self.elements[j].dist(&self.elements[j + 1]);
            total += d;
            if (d - self.kappa).abs() > SPACING_TOL {
                return Err(ChannelError::ConsecutiveSpacing { index: j, actual: d, kappa: self.kappa });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.elements[i].dist(&self.elements[j]);
                if d < self.kappa - SPACING_TOL {
                    return Err(ChannelError::PairwiseSpacing { i, j, actual: d, kappa: self.kappa });
                }
            }
        }
        let max = (n.saturating_sub(1)) as f64 * self.kappa;
        if total > max + SPACING_TOL {
            return Err(ChannelError::TotalLength { actual: total, max });
        }
        Ok(())
    }
}

/// Fresnel and Fraunhofer distances for an aperture of diameter `d` [m]:
/// `r_fs = (d^4 / (8 lambda))^(1/3)` and `r_fr = 2 d^2 / lambda`.
/// The radiative near field lies between the two.
pub fn fresnel_fraunhofer(d: f64, lambda: f64) -> Result<(f64, f64), ChannelError> {
    if lambda <= 0.0 {
        return Err(ChannelError::NonPositiveWavelength(lambda));
    }
    let r_fs = (d.powi(4) / (8.0 * lambda)).cbrt();
    let r_fr = 2.0 * d * d / lambda;
    Ok((r_fs, r_fr))
}

/// Maximum Euclidean distance between any two elements of the layout.
pub fn array_diameter(layout: &StripeLayout) -> Result<f64, ChannelError> {
    if layout.elements.is_empty() {
        return Err(ChannelError::EmptyLayout);
    }
    let mut best = 0.0f64;
    for i in 0..layout.elements.len() {
        for j in (i + 1)..layout.elements.len() {
            best = best.max(layout.elements[i].dist(&layout.elements[j]));
        }
    }
    Ok(best)
}

/// Element radiation profile `F(theta) = 2 (b+1) cos^b(theta)` for
/// `theta` in `[0, pi/2]`, zero elsewhere. Total on all real `theta`.
pub fn radiation_profile(theta: f64, b: f64) -> f64 {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return 0.0;
    }
    2.0 * (b + 1.0) * theta.cos().powf(b)
}

/// As [`radiation_profile`] but parameterized by `cos(theta) in [0, 1]`,
/// which is how the geometry produces it.
fn radiation_profile_from_cos(cos_theta: f64, b: f64) -> f64 {
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&cos_theta));
    2.0 * (b + 1.0) * cos_theta.max(0.0).powf(b)
}

/// Near-field LoS channel coefficient from element `g` (on the ceiling) to
/// point `c` below it: `A * exp(-i 2 pi d / lambda)` with
/// `A = sqrt(F(theta)) * lambda / (4 pi d)` and `cos(theta) = (h_c - c_z)/d`.
pub fn channel_coefficient(
    g: &Point3,
    c: &Point3,
    lambda: f64,
    b: f64,
    ceiling_h: f64,
) -> Result<Complex64, ChannelError> {
    if lambda <= 0.0 {
        return Err(ChannelError::NonPositiveWavelength(lambda));
    }
    let d = g.dist(c);
    if d == 0.0 {
        return Err(ChannelError::CoincidentPoint(0));
    }
    debug_assert!((g.z - ceiling_h).abs() < 1e-9, "elements live on the ceiling");
    let cos_theta = ((ceiling_h - c.z) / d).clamp(0.0, 1.0);
    let amp = radiation_profile_from_cos(cos_theta, b).sqrt() * lambda / (4.0 * std::f64::consts::PI * d);
    let phase = -std::f64::consts::TAU * d / lambda;
    Ok(Complex64::from_polar(amp, phase))
}

/// Channel vector from every element of a stripe to one point.
pub fn channel_vector(
    layout: &StripeLayout,
    c: &Point3,
    lambda: f64,
    b: f64,
    ceiling_h: f64,
) -> Result<ChannelVector, ChannelError> {
    if layout.elements.is_empty() {
        return Err(ChannelError::EmptyLayout);
    }
    let mut coefficients = Vec::with_capacity(layout.elements.len());
    for (j, g) in layout.elements.iter().enumerate() {
        let h = channel_coefficient(g, c, lambda, b, ceiling_h)
            .map_err(|_| ChannelError::CoincidentPoint(j))?;
        coefficients.push(h);
    }
    Ok(ChannelVector { coefficients })
}

/// Aggregate squared channel gain of a stripe at a point, in closed form:
/// `||h||^2 = 2 (b+1) (h_c - c_z)^b (lambda / 4 pi)^2 * sum_j d_j^-(b+2)`.
pub fn channel_gain_sq(
    layout: &StripeLayout,
    c: &Point3,
    b: f64,
    ceiling_h: f64,
    lambda: f64,
) -> Result<f64, ChannelError> {
    if layout.elements.is_empty() {
        return Err(ChannelError::EmptyLayout);
    }
    if lambda <= 0.0 {
        return Err(ChannelError::NonPositiveWavelength(lambda));
    }
    let e = ceiling_h - c.z;
    let scale = lambda / (4.0 * std::f64::consts::PI);
    let mut sum = 0.0;
    for (j, g) in layout.elements.iter().enumerate() {
        let d = g.dist(c);
        if d == 0.0 {
            return Err(ChannelError::CoincidentPoint(j));
        }
        sum += d.powf(-(b + 2.0));
    }
    Ok(2.0 * (b + 1.0) * e.powf(b) * scale * scale * sum)
}
