//! Precoders, received power, and per-hotspot power allocation.
//!
//! Each stripe transmits one energy beam per served hotspot. The received
//! RF power at a point is the sum of `|h^H w|^2` over every stripe and
//! beam in the system; RF energy adds, so there is no interference term to
//! subtract. The planning bound keeps only each hotspot's dedicated beam,
//! which under aligned beams never exceeds the full sum.

mod eval;
mod sdp;

pub use eval::{evaluate_min_power, evaluate_min_power_perturbed, resolve_budgets, EvalResult, PrecoderKind};
pub use sdp::{sdp_precoders, SdpOutcome};

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::{channel_vector, ChannelError, ChannelVector, StripeLayout};
use crate::conic::{solve_lp, ConicError, LinearProgram, Outcome, Sense};
use crate::scenario::Point3;

#[derive(Debug, Error)]
pub enum BeamformError {
    #[error("channel vector {0} is zero")]
    ZeroChannel(usize),
    #[error("gain {index} is not positive ({gain})")]
    ZeroGain { index: usize, gain: f64 },
    #[error("power budget must be positive, got {0}")]
    BadBudget(f64),
    #[error("powers/channels length mismatch")]
    ShapeMismatch,
    #[error("evaluation point must lie below the ceiling")]
    PointAboveCeiling,
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Solver(#[from] ConicError),
    #[error("power allocation LP returned {0}")]
    AllocationFailed(String),
}

/// RF parameters needed to rebuild channels from geometry.
#[derive(Debug, Clone, Copy)]
pub struct RfParams {
    pub wavelength: f64,
    pub boresight_b: f64,
    pub ceiling_h: f64,
}

impl RfParams {
    pub fn of_scenario(s: &crate::scenario::Scenario) -> Self {
        Self {
            wavelength: s.wavelength(),
            boresight_b: s.boresight_b,
            ceiling_h: s.ceiling_h,
        }
    }
}

/// The digital precoders of one stripe, one beam per served hotspot. Beam
/// norms carry the transmit powers: `||w_m||^2 = P_m`.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub beams: Vec<Vec<Complex64>>,
}

impl PrecoderSet {
    /// Total transmit power `sum_m ||w_m||^2` [W].
    pub fn total_power(&self) -> f64 {
        self.beams
            .iter()
            .map(|w| w.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Check the power budget invariant.
    pub fn validate(&self, budget: f64) -> Result<(), BeamformError> {
        let total = self.total_power();
        if total > budget + 1e-9 {
            return Err(BeamformError::AllocationFailed(format!(
                "beam power {total} exceeds budget {budget}"
            )));
        }
        Ok(())
    }
}

/// Maximum ratio transmission: beam `m` is the unit channel of its target
/// scaled by `sqrt(P_m)`, so `||w_m||^2 = P_m` exactly.
pub fn mrt_precoders(channels: &[ChannelVector], powers: &[f64]) -> Result<PrecoderSet, BeamformError> {
    if channels.len() != powers.len() {
        return Err(BeamformError::ShapeMismatch);
    }
    let mut beams = Vec::with_capacity(channels.len());
    for (m, (h, &p)) in channels.iter().zip(powers.iter()).enumerate() {
        let norm = h.norm_sq().sqrt();
        if norm == 0.0 {
            return Err(BeamformError::ZeroChannel(m));
        }
        let scale = p.max(0.0).sqrt() / norm;
        beams.push(h.coefficients.iter().map(|c| c * scale).collect());
    }
    Ok(PrecoderSet { beams })
}

/// One transmitting stripe: its element layout and its beams.
#[derive(Debug, Clone, Copy)]
pub struct StripeTx<'a> {
    pub layout: &'a StripeLayout,
    pub precoders: &'a PrecoderSet,
}

/// Received RF power at a point: `sum_u sum_m |h_u(point)^H w_{u,m}|^2`,
/// with channels rebuilt from geometry.
pub fn received_power(point: &Point3, stripes: &[StripeTx], rf: &RfParams) -> Result<f64, BeamformError> {
    if point.z >= rf.ceiling_h {
        return Err(BeamformError::PointAboveCeiling);
    }
    let mut total = 0.0;
    for tx in stripes {
        let h = channel_vector(tx.layout, point, rf.wavelength, rf.boresight_b, rf.ceiling_h)?;
        for w in &tx.precoders.beams {
            total += h.inner(w).norm_sqr();
        }
    }
    Ok(total)
}

/// Dedicated-beam lower bound on the received power of one hotspot:
/// `sum_u v_{u,i} P_{u,i} ||h_u(point)||^2`. `powers[u][i]` carries the
/// dedicated power of stripe `u` for hotspot `i` (zero when unserved).
pub fn received_power_lower_bound(
    hotspot_index: usize,
    point: &Point3,
    assignment: &[Vec<u8>],
    layouts: &[StripeLayout],
    powers: &[Vec<f64>],
    rf: &RfParams,
) -> Result<f64, BeamformError> {
    let mut bound = 0.0;
    for (u, layout) in layouts.iter().enumerate() {
        if assignment[u][hotspot_index] == 1 {
            let h = channel_vector(layout, point, rf.wavelength, rf.boresight_b, rf.ceiling_h)?;
            bound += powers[u][hotspot_index] * h.norm_sq();
        }
    }
    Ok(bound)
}

/// Result of the per-hotspot power allocation LP.
#[derive(Debug, Clone)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
    /// `min_i P_i G_i / eta_i` at the optimum.
    pub objective: f64,
}

/// Max-min power allocation across one stripe's hotspots:
/// `max t  s.t.  eta_i t <= P_i G_i, sum_i P_i <= budget, P >= 0`.
///
/// At the optimum every `P_i G_i / eta_i` is equal, matching the closed
/// form `P_i` proportional to `eta_i / G_i`.
pub fn allocate_powers_lp(gains: &[f64], etas: &[f64], budget: f64) -> Result<PowerAllocation, BeamformError> {
    if gains.len() != etas.len() {
        return Err(BeamformError::ShapeMismatch);
    }
    if budget <= 0.0 {
        return Err(BeamformError::BadBudget(budget));
    }
    for (index, &g) in gains.iter().enumerate() {
        if !(g > 0.0) {
            return Err(BeamformError::ZeroGain { index, gain: g });
        }
    }
    let k = gains.len();
    // normalize the RF gains (often ~1e-6 W) so the LP rows are well scaled
    let scale = gains.iter().cloned().fold(f64::INFINITY, f64::min);
    let scaled: Vec<f64> = gains.iter().map(|g| g / scale).collect();
    // vars: [t / scale, P_0..P_{k-1}]
    let mut obj = vec![0.0; k + 1];
    obj[0] = 1.0;
    let mut p = LinearProgram::new(k + 1, Sense::Maximize, obj);
    p.bounds[0] = (0.0, f64::INFINITY);
    for i in 0..k {
        p.bounds[1 + i] = (0.0, budget);
        p.lin_le.push((vec![(0, etas[i]), (1 + i, -scaled[i])], 0.0));
    }
    p.lin_le.push(((1..=k).map(|i| (i, 1.0)).collect(), budget));
    match solve_lp(&p, 1e-11)? {
        Outcome::Optimal(sol) => {
            let powers: Vec<f64> = sol.x[1..].iter().map(|&p| p.max(0.0)).collect();
            let objective = powers
                .iter()
                .zip(gains.iter())
                .zip(etas.iter())
                .map(|((&p, &g), &eta)| p * g / eta)
                .fold(f64::INFINITY, f64::min);
            Ok(PowerAllocation { powers, objective })
        }
        other => Err(BeamformError::AllocationFailed(format!("{other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::StripeLayout;
    use crate::scenario::Point3;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_channel(rng: &mut ChaCha8Rng, n: usize) -> ChannelVector {
        ChannelVector {
            coefficients: (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 1e-3)
                .collect(),
        }
    }

    #[test]
    fn mrt_beam_norm_carries_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = rand_channel(&mut rng, 8);
        let set = mrt_precoders(&[h.clone()], &[1.0]).unwrap();
        let p: f64 = set.beams[0].iter().map(|c| c.norm_sqr()).sum();
        assert!((p - 1.0).abs() < 1e-12);
        set.validate(1.0).unwrap();

        // beam applied to its own channel delivers P ||h||^2
        let got = h.inner(&set.beams[0]).norm_sqr();
        assert!((got - h.norm_sq()).abs() / h.norm_sq() < 1e-12);
    }

    #[test]
    fn mrt_orthogonal_channels_have_no_cross_terms() {
        let h1 = ChannelVector {
            coefficients: vec![Complex64::new(1e-3, 0.0), Complex64::new(0.0, 0.0)],
        };
        let h2 = ChannelVector {
            coefficients: vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 2e-3)],
        };
        let set = mrt_precoders(&[h1.clone(), h2.clone()], &[0.6, 0.4]).unwrap();
        assert!(h1.inner(&set.beams[1]).norm_sqr() < 1e-30);
        assert!(h2.inner(&set.beams[0]).norm_sqr() < 1e-30);
    }

    #[test]
    fn mrt_rejects_zero_channel() {
        let h = ChannelVector { coefficients: vec![Complex64::new(0.0, 0.0)] };
        assert!(matches!(
            mrt_precoders(&[h], &[1.0]),
            Err(BeamformError::ZeroChannel(0))
        ));
    }

    fn line_layout_at(x: f64, y: f64, n: usize) -> StripeLayout {
        StripeLayout::new(
            (0..n).map(|j| Point3::new(x + j as f64 * 0.015, y, 5.0)).collect(),
            0.015,
        )
    }

    #[test]
    fn received_power_single_beam_reference() {
        let rf = RfParams { wavelength: 0.03, boresight_b: 2.0, ceiling_h: 5.0 };
        let layout = line_layout_at(2.0, 3.0, 8);
        let user = Point3::new(2.05, 3.0, 1.0);
        let h = channel_vector(&layout, &user, rf.wavelength, rf.boresight_b, rf.ceiling_h).unwrap();
        let set = mrt_precoders(&[h.clone()], &[0.7]).unwrap();
        let got = received_power(&user, &[StripeTx { layout: &layout, precoders: &set }], &rf).unwrap();
        let expect = 0.7 * h.norm_sq();
        assert!((got - expect).abs() / expect < 1e-12);

        // zero-power beams deliver nothing
        let zero = mrt_precoders(&[h], &[0.0]).unwrap();
        let got = received_power(&user, &[StripeTx { layout: &layout, precoders: &zero }], &rf).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn received_power_matches_term_by_term_expansion() {
        // independent summation oracle over a random 2-beam instance
        let rf = RfParams { wavelength: 0.03, boresight_b: 2.0, ceiling_h: 5.0 };
        let layout = line_layout_at(1.0, 1.0, 6);
        let u1 = Point3::new(1.02, 1.1, 1.0);
        let u2 = Point3::new(1.3, 0.9, 1.2);
        let h1 = channel_vector(&layout, &u1, 0.03, 2.0, 5.0).unwrap();
        let h2 = channel_vector(&layout, &u2, 0.03, 2.0, 5.0).unwrap();
        let set = mrt_precoders(&[h1.clone(), h2.clone()], &[0.5, 0.5]).unwrap();
        let probe = Point3::new(1.1, 1.0, 1.1);
        let got = received_power(&probe, &[StripeTx { layout: &layout, precoders: &set }], &rf).unwrap();
        let hp = channel_vector(&layout, &probe, 0.03, 2.0, 5.0).unwrap();
        let manual: f64 = set.beams.iter().map(|w| hp.inner(w).norm_sqr()).sum();
        assert!((got - manual).abs() <= 1e-12 * manual);
    }

    #[test]
    fn lower_bound_never_exceeds_received_power() {
        let rf = RfParams { wavelength: 0.03, boresight_b: 2.0, ceiling_h: 5.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let l1 = line_layout_at(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0), 5);
            let l2 = line_layout_at(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0), 5);
            let users: Vec<Point3> = (0..3)
                .map(|_| Point3::new(rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0), 1.0))
                .collect();
            // stripe 0 serves hotspots 0 and 1; stripe 1 serves hotspot 2
            let assignment = vec![vec![1u8, 1, 0], vec![0u8, 0, 1]];
            let p0 = vec![0.3, 0.45, 0.0];
            let p1 = vec![0.0, 0.0, 0.9];
            let h0: Vec<_> = users[..2]
                .iter()
                .map(|u| channel_vector(&l1, u, 0.03, 2.0, 5.0).unwrap())
                .collect();
            let h1: Vec<_> = users[2..]
                .iter()
                .map(|u| channel_vector(&l2, u, 0.03, 2.0, 5.0).unwrap())
                .collect();
            let s0 = mrt_precoders(&h0, &[0.3, 0.45]).unwrap();
            let s1 = mrt_precoders(&h1, &[0.9]).unwrap();
            let stripes = [
                StripeTx { layout: &l1, precoders: &s0 },
                StripeTx { layout: &l2, precoders: &s1 },
            ];
            let layouts = [l1.clone(), l2.clone()];
            let powers = [p0.clone(), p1.clone()];
            for (i, u) in users.iter().enumerate() {
                let exact = received_power(u, &stripes, &rf).unwrap();
                let bound =
                    received_power_lower_bound(i, u, &assignment, &layouts, &powers, &rf).unwrap();
                assert!(bound <= exact * (1.0 + 1e-12), "bound {bound} exact {exact}");
            }
        }
    }

    #[test]
    fn power_allocation_reference_cases() {
        // two equal gains: split evenly, t = 0.5 G
        let g = 4.2e-6;
        let alloc = allocate_powers_lp(&[g, g], &[1.0, 1.0], 1.0).unwrap();
        assert!((alloc.powers[0] - 0.5).abs() < 1e-9);
        assert!((alloc.powers[1] - 0.5).abs() < 1e-9);
        assert!((alloc.objective - 0.5 * g).abs() < 1e-9 * g);

        // gains (G, G, 2G): t = 0.4 G at P = (0.4, 0.4, 0.2)
        let alloc = allocate_powers_lp(&[g, g, 2.0 * g], &[1.0; 3], 1.0).unwrap();
        assert!((alloc.objective - 0.4 * g).abs() < 1e-9 * g);
        for (p, want) in alloc.powers.iter().zip([0.4, 0.4, 0.2]) {
            assert!((p - want).abs() < 1e-8, "powers {:?}", alloc.powers);
        }

        // single hotspot takes the whole budget
        let alloc = allocate_powers_lp(&[g], &[1.0], 0.7).unwrap();
        assert!((alloc.powers[0] - 0.7).abs() < 1e-9);

        assert!(allocate_powers_lp(&[0.0], &[1.0], 1.0).is_err());
    }

    #[test]
    fn power_allocation_matches_closed_form() {
        // P_i proportional to eta_i / G_i, t = budget / sum(eta/G)
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let k = rng.gen_range(1..=6);
            let gains: Vec<f64> = (0..k).map(|_| rng.gen_range(1e-8..1e-4)).collect();
            let etas: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..3.0)).collect();
            let budget = rng.gen_range(0.1..2.0);
            let alloc = allocate_powers_lp(&gains, &etas, budget).unwrap();
            let denom: f64 = gains.iter().zip(etas.iter()).map(|(&g, &e)| e / g).sum();
            let t_closed = budget / denom;
            assert!(
                (alloc.objective - t_closed).abs() <= 1e-9 * t_closed.max(1e-300),
                "lp {} closed {t_closed}",
                alloc.objective
            );
            for i in 0..k {
                let p_closed = t_closed * etas[i] / gains[i];
                assert!((alloc.powers[i] - p_closed).abs() <= 1e-7 * p_closed.max(1e-12));
                // equalization at the optimum
                let ratio = alloc.powers[i] * gains[i] / etas[i];
                assert!((ratio - alloc.objective).abs() <= 1e-9 * alloc.objective);
            }
        }
    }
}
