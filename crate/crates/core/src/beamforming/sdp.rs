//! Max-min fair precoding benchmark via semidefinite programming.
//!
//! For one stripe with channels `h_1..h_K` and budget `P`, the covariance
//! problem is
//!
//! ```text
//! max t  s.t.  h_i^H W h_i >= eta_i t,  tr(W) <= P,  W >= 0.
//! ```
//!
//! Any part of `W` orthogonal to `span{h_i}` spends trace without touching
//! a constraint, so `W = Q S Q^H` for an orthonormal basis `Q` of the span
//! and the solve happens over the small Hermitian `S` (dimension = number
//! of channels at most). A primal log-det barrier with damped Newton steps
//! follows the central path; beams are then extracted from the
//! eigendecomposition of `W` (which delivers `h^H W h` exactly, since
//! received powers add over beams) alongside randomized rank-one
//! candidates, keeping the best delivered minimum.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::BeamformError;
use crate::channel::ChannelVector;

type C64 = Complex<f64>;

/// Output of the SDP precoder construction.
#[derive(Debug, Clone)]
pub struct SdpOutcome {
    /// Extracted beams in the original `N`-dimensional space.
    pub beams: Vec<Vec<num_complex::Complex64>>,
    /// Optimal SDP value `t*` (min weighted power of the covariance).
    pub sdp_value: f64,
    /// Min weighted power actually delivered by the extracted beams.
    pub delivered: f64,
    /// `max(0, 1 - delivered / sdp_value)`.
    pub shortfall: f64,
}

/// Hermitian basis bookkeeping: index 0..r are diagonal entries, then
/// (re, im) pairs for each upper off-diagonal entry.
struct HermBasis {
    r: usize,
    /// (a, b) with a < b for each off-diagonal slot.
    offs: Vec<(usize, usize)>,
}

impl HermBasis {
    fn new(r: usize) -> Self {
        let mut offs = Vec::new();
        for a in 0..r {
            for b in (a + 1)..r {
                offs.push((a, b));
            }
        }
        Self { r, offs }
    }

    fn dim(&self) -> usize {
        self.r + 2 * self.offs.len()
    }

    fn matrix(&self, x: &[f64]) -> DMatrix<C64> {
        let mut s = DMatrix::<C64>::zeros(self.r, self.r);
        for a in 0..self.r {
            s[(a, a)] = C64::new(x[a], 0.0);
        }
        for (slot, &(a, b)) in self.offs.iter().enumerate() {
            let re = x[self.r + 2 * slot];
            let im = x[self.r + 2 * slot + 1];
            s[(a, b)] = C64::new(re, im);
            s[(b, a)] = C64::new(re, -im);
        }
        s
    }

    /// `q^H E_k q` for every basis element, all real.
    fn quad_form(&self, q: &DVector<C64>) -> Vec<f64> {
        let mut u = Vec::with_capacity(self.dim());
        for a in 0..self.r {
            u.push(q[a].norm_sqr());
        }
        for &(a, b) in &self.offs {
            let z = q[a].conj() * q[b];
            u.push(2.0 * z.re);
            u.push(-2.0 * z.im);
        }
        u
    }

    /// `tr(E_k)` per basis element.
    fn trace_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        for a in 0..self.r {
            v[a] = 1.0;
        }
        v
    }

    /// `-tr(M E_k)` per basis element (gradient of `-ln det S` at `M = S^-1`).
    fn neg_trace_products(&self, m: &DMatrix<C64>) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.dim());
        for a in 0..self.r {
            g.push(-m[(a, a)].re);
        }
        for &(a, b) in &self.offs {
            let z = m[(a, b)];
            g.push(-2.0 * z.re);
            g.push(2.0 * z.im);
        }
        g
    }

    /// Sparse list of (row, col, coeff) entries of `E_k`.
    fn entries(&self, k: usize) -> [(usize, usize, C64); 2] {
        if k < self.r {
            [(k, k, C64::new(1.0, 0.0)), (k, k, C64::new(0.0, 0.0))]
        } else {
            let slot = (k - self.r) / 2;
            let (a, b) = self.offs[slot];
            if (k - self.r) % 2 == 0 {
                [(a, b, C64::new(1.0, 0.0)), (b, a, C64::new(1.0, 0.0))]
            } else {
                [(a, b, C64::new(0.0, 1.0)), (b, a, C64::new(0.0, -1.0))]
            }
        }
    }
}

/// `tr(M E_k M E_l)` via the entry expansion, real for Hermitian `M`.
fn logdet_hess_entry(basis: &HermBasis, m: &DMatrix<C64>, k: usize, l: usize) -> f64 {
    let ek = basis.entries(k);
    let el = basis.entries(l);
    let mut acc = C64::new(0.0, 0.0);
    for &(p, q, alpha) in ek.iter() {
        if alpha == C64::new(0.0, 0.0) {
            continue;
        }
        for &(s, t, beta) in el.iter() {
            if beta == C64::new(0.0, 0.0) {
                continue;
            }
            acc += alpha * beta * m[(q, s)] * m[(t, p)];
        }
    }
    acc.re
}

/// Strict Hermitian positive-definiteness check via a hand-rolled
/// Cholesky; returns `ln det` on success. (A library Cholesky over complex
/// scalars cannot be used as a PD test: complex square roots never fail.)
fn pd_logdet(s: &DMatrix<C64>) -> Option<f64> {
    let r = s.nrows();
    let mut l = s.clone();
    let mut logdet = 0.0;
    for j in 0..r {
        let mut pivot = l[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0 && pivot.is_finite()) {
            return None;
        }
        logdet += pivot.ln();
        let d = pivot.sqrt();
        for i in (j + 1)..r {
            let mut v = l[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / C64::new(d, 0.0);
        }
        l[(j, j)] = C64::new(d, 0.0);
    }
    Some(logdet)
}

struct SmallSdp {
    basis: HermBasis,
    /// Linear forms `u_i[k] = q_i^H E_k q_i`.
    u: Vec<Vec<f64>>,
    etas: Vec<f64>,
    budget: f64,
    trace_vec: Vec<f64>,
}

impl SmallSdp {
    /// Returns (slacks f_i, trace slack g, S, ln det S), or None outside
    /// the domain. All comparisons are NaN-rejecting.
    fn domain(&self, x: &[f64], t: f64) -> Option<(Vec<f64>, f64, DMatrix<C64>, f64)> {
        if x.iter().any(|v| !v.is_finite()) || !t.is_finite() {
            return None;
        }
        let s = self.basis.matrix(x);
        let logdet = pd_logdet(&s)?;
        let mut slacks = Vec::with_capacity(self.u.len());
        for (ui, &eta) in self.u.iter().zip(self.etas.iter()) {
            let val: f64 = ui.iter().zip(x.iter()).map(|(&a, &b)| a * b).sum();
            let f = val - eta * t;
            if !(f > 0.0) {
                return None;
            }
            slacks.push(f);
        }
        let trace: f64 = (0..self.basis.r).map(|a| x[a]).sum();
        let g = self.budget - trace;
        if !(g > 0.0) {
            return None;
        }
        Some((slacks, g, s, logdet))
    }

    fn barrier_value(&self, x: &[f64], t: f64, tau: f64) -> Option<f64> {
        let (slacks, g, _, logdet) = self.domain(x, t)?;
        let mut phi = -tau * t - logdet - g.ln();
        for f in slacks {
            phi -= f.ln();
        }
        Some(phi)
    }

    /// One centering solve at barrier weight `tau`; updates (x, t) in place.
    fn center(&self, x: &mut Vec<f64>, t: &mut f64, tau: f64) {
        let dim = self.basis.dim();
        let n_all = dim + 1; // plus t
        for _ in 0..60 {
            let (slacks, g, s, _) = match self.domain(x, *t) {
                Some(d) => d,
                None => return,
            };
            let m = match s.clone().try_inverse() {
                Some(m) => m,
                None => return,
            };
            // gradient
            let mut grad = vec![0.0; n_all];
            grad[dim] = -tau;
            let logdet_grad = self.basis.neg_trace_products(&m);
            for k in 0..dim {
                grad[k] += logdet_grad[k];
            }
            for (i, f) in slacks.iter().enumerate() {
                let inv = 1.0 / f;
                for k in 0..dim {
                    grad[k] -= self.u[i][k] * inv;
                }
                grad[dim] += self.etas[i] * inv;
            }
            let ginv = 1.0 / g;
            for k in 0..dim {
                grad[k] += self.trace_vec[k] * ginv;
            }
            // Hessian
            let mut hess = DMatrix::<f64>::zeros(n_all, n_all);
            for k in 0..dim {
                for l in k..dim {
                    let v = logdet_hess_entry(&self.basis, &m, k, l);
                    hess[(k, l)] += v;
                    hess[(l, k)] = hess[(k, l)];
                }
            }
            for (i, f) in slacks.iter().enumerate() {
                let inv2 = 1.0 / (f * f);
                let mut v = self.u[i].clone();
                v.push(-self.etas[i]);
                for k in 0..n_all {
                    for l in k..n_all {
                        hess[(k, l)] += v[k] * v[l] * inv2;
                        if l != k {
                            hess[(l, k)] = hess[(k, l)];
                        }
                    }
                }
            }
            let ginv2 = ginv * ginv;
            for k in 0..dim {
                for l in k..dim {
                    hess[(k, l)] += self.trace_vec[k] * self.trace_vec[l] * ginv2;
                    hess[(l, k)] = hess[(k, l)];
                }
            }
            for k in 0..n_all {
                hess[(k, k)] += 1e-13 * (1.0 + hess[(k, k)].abs());
            }
            let rhs = DVector::from_iterator(n_all, grad.iter().map(|&v| -v));
            let step = match hess.clone().cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => match hess.lu().solve(&rhs) {
                    Some(sol) => sol,
                    None => return,
                },
            };
            let decrement: f64 = step.iter().zip(rhs.iter()).map(|(a, b)| a * b).sum();
            if !decrement.is_finite() || step.iter().any(|v| !v.is_finite()) {
                return;
            }
            // damped backtracking on the barrier value
            let phi0 = match self.barrier_value(x, *t, tau) {
                Some(p) => p,
                None => return,
            };
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let mut x_new = x.clone();
                for k in 0..dim {
                    x_new[k] += alpha * step[k];
                }
                let t_new = *t + alpha * step[dim];
                if let Some(phi) = self.barrier_value(&x_new, t_new, tau) {
                    if phi <= phi0 - 1e-4 * alpha * decrement.max(0.0) {
                        *x = x_new;
                        *t = t_new;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted || decrement.abs() < 1e-11 {
                return;
            }
        }
    }

    /// Follow the central path, maximizing `t`.
    fn solve(&self, tol: f64) -> (Vec<f64>, f64) {
        let dim = self.basis.dim();
        let r = self.basis.r;
        let mut x = vec![0.0; dim];
        for a in 0..r {
            x[a] = self.budget / (2.0 * r as f64);
        }
        let mut t = 0.5
            * self
                .u
                .iter()
                .zip(self.etas.iter())
                .map(|(u, &eta)| {
                    let val: f64 = u.iter().zip(x.iter()).map(|(&a, &b)| a * b).sum();
                    val / eta
                })
                .fold(f64::INFINITY, f64::min);
        let nu = (self.u.len() + 1 + r) as f64;
        let mut tau = 1.0_f64.max(nu / t.abs().max(1e-30));
        loop {
            self.center(&mut x, &mut t, tau);
            if nu / tau <= tol * t.abs().max(1e-30) {
                break;
            }
            tau *= 10.0;
            if tau > 1e18 {
                break;
            }
        }
        (x, t)
    }
}

/// Build max-min fair SDP precoders for one stripe.
///
/// `candidates` randomized rank-one extractions are tried in addition to
/// the exact eigen-decomposition of the optimal covariance; the best
/// delivered minimum is kept and the shortfall versus the SDP optimum is
/// reported.
pub fn sdp_precoders(
    channels: &[ChannelVector],
    etas: &[f64],
    budget: f64,
    candidates: usize,
    seed: u64,
) -> Result<SdpOutcome, BeamformError> {
    if channels.is_empty() || channels.len() != etas.len() {
        return Err(BeamformError::ShapeMismatch);
    }
    if budget <= 0.0 {
        return Err(BeamformError::BadBudget(budget));
    }
    let n = channels[0].coefficients.len();
    for (i, h) in channels.iter().enumerate() {
        if h.norm_sq() == 0.0 {
            return Err(BeamformError::ZeroChannel(i));
        }
        if h.coefficients.len() != n {
            return Err(BeamformError::ShapeMismatch);
        }
    }

    // orthonormal basis of the channel span (modified Gram-Schmidt, two passes)
    let mut basis_cols: Vec<DVector<C64>> = Vec::new();
    for h in channels {
        let mut v = DVector::from_iterator(n, h.coefficients.iter().map(|&c| C64::new(c.re, c.im)));
        let scale = v.norm();
        v /= C64::new(scale, 0.0);
        for _ in 0..2 {
            for q in &basis_cols {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-9 {
            v /= C64::new(norm, 0.0);
            basis_cols.push(v);
        }
    }
    let r = basis_cols.len();
    let mut q_mat = DMatrix::<C64>::zeros(n, r);
    for (c, col) in basis_cols.iter().enumerate() {
        q_mat.set_column(c, col);
    }

    // channels in the reduced space
    let reduced: Vec<DVector<C64>> = channels
        .iter()
        .map(|h| {
            let v = DVector::from_iterator(n, h.coefficients.iter().map(|&c| C64::new(c.re, c.im)));
            q_mat.adjoint() * v
        })
        .collect();

    let basis = HermBasis::new(r);
    let u: Vec<Vec<f64>> = reduced.iter().map(|q| basis.quad_form(q)).collect();
    let trace_vec = basis.trace_vec();
    let sdp = SmallSdp { basis, u, etas: etas.to_vec(), budget, trace_vec };
    let (x, t_star) = sdp.solve(1e-9);
    let s = sdp.basis.matrix(&x);

    // eigen-decomposition extraction: delivers h^H W h exactly
    let eig = s.clone().symmetric_eigen();
    let mut eigen_beams: Vec<DVector<C64>> = Vec::new();
    for k in 0..r {
        let lam = eig.eigenvalues[k].max(0.0);
        if lam > 1e-15 * budget {
            let col = eig.eigenvectors.column(k).into_owned();
            eigen_beams.push(&q_mat * col * C64::new(lam.sqrt(), 0.0));
        }
    }
    let delivered_of = |beams: &[DVector<C64>]| -> f64 {
        channels
            .iter()
            .zip(etas.iter())
            .map(|(h, &eta)| {
                let hv = DVector::from_iterator(n, h.coefficients.iter().map(|&c| C64::new(c.re, c.im)));
                beams.iter().map(|w| hv.dotc(w).norm_sqr()).sum::<f64>() / eta
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut best_beams = eigen_beams;
    let mut best_delivered = delivered_of(&best_beams);

    // randomized rank-one candidates from the covariance
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sqrt_s = {
        let mut m = DMatrix::<C64>::zeros(r, r);
        for k in 0..r {
            let lam = eig.eigenvalues[k].max(0.0).sqrt();
            let col = eig.eigenvectors.column(k);
            for a in 0..r {
                for b in 0..r {
                    m[(a, b)] += col[a] * col[b].conj() * C64::new(lam, 0.0);
                }
            }
        }
        m
    };
    for _ in 0..candidates {
        let gvec = DVector::from_iterator(r, (0..r).map(|_| complex_gaussian(&mut rng)));
        let z = &sqrt_s * gvec;
        let norm = z.norm();
        if norm == 0.0 {
            continue;
        }
        let w = &q_mat * z * C64::new(budget.sqrt() / norm, 0.0);
        let cand = vec![w];
        let delivered = delivered_of(&cand);
        if delivered > best_delivered {
            best_delivered = delivered;
            best_beams = cand;
        }
    }

    let beams: Vec<Vec<num_complex::Complex64>> = best_beams
        .iter()
        .map(|w| w.iter().map(|c| num_complex::Complex64::new(c.re, c.im)).collect())
        .collect();
    let shortfall = (1.0 - best_delivered / t_star).max(0.0);
    Ok(SdpOutcome { beams, sdp_value: t_star, delivered: best_delivered, shortfall })
}

/// Circularly symmetric complex Gaussian sample via Box-Muller.
fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mag = (-2.0 * u1.ln()).sqrt();
    C64::new(mag * u2.cos(), mag * u2.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::{allocate_powers_lp, mrt_precoders};
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;

    fn rand_channels(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Vec<ChannelVector> {
        (0..k)
            .map(|_| ChannelVector {
                coefficients: (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 1e-3)
                    .collect(),
            })
            .collect()
    }

    #[test]
    fn single_channel_matches_mrt_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let h = rand_channels(&mut rng, 1, 8);
            let budget = 0.8;
            let out = sdp_precoders(&h, &[1.0], budget, 20, 1).unwrap();
            let expect = budget * h[0].norm_sq();
            assert!(
                (out.sdp_value - expect).abs() / expect < 1e-6,
                "sdp {} vs {expect}",
                out.sdp_value
            );
            assert!(out.shortfall <= 1e-6, "shortfall {}", out.shortfall);
            // MRT with the full budget delivers the same value
            let mrt = mrt_precoders(&h, &[budget]).unwrap();
            let mrt_val = h[0].inner(&mrt.beams[0]).norm_sqr();
            assert!((out.delivered - mrt_val).abs() / mrt_val < 1e-6);
        }
    }

    #[test]
    fn orthogonal_equal_norm_channels_split_budget() {
        let a = 1e-3;
        let h1 = ChannelVector {
            coefficients: vec![Complex64::new(a, 0.0), Complex64::new(0.0, 0.0)],
        };
        let h2 = ChannelVector {
            coefficients: vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, a)],
        };
        let out = sdp_precoders(&[h1, h2], &[1.0, 1.0], 1.0, 50, 2).unwrap();
        let expect = 0.5 * a * a;
        assert!(
            (out.sdp_value - expect).abs() / expect < 1e-6,
            "sdp {} vs {expect}",
            out.sdp_value
        );
        assert!(out.shortfall <= 1e-6);
    }

    #[test]
    fn sdp_dominates_mrt_with_lp_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..50 {
            let k = rng.gen_range(1..=4);
            let n = rng.gen_range(2..=16).max(k);
            let channels = rand_channels(&mut rng, k, n);
            let etas = vec![1.0; k];
            let budget = 1.0;
            let gains: Vec<f64> = channels.iter().map(|h| h.norm_sq()).collect();
            let alloc = allocate_powers_lp(&gains, &etas, budget).unwrap();
            let mrt = mrt_precoders(&channels, &alloc.powers).unwrap();
            let mrt_min = channels
                .iter()
                .map(|h| mrt.beams.iter().map(|w| h.inner(w).norm_sqr()).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            let out = sdp_precoders(&channels, &etas, budget, 100, trial).unwrap();
            assert!(
                out.sdp_value >= mrt_min * (1.0 - 1e-6),
                "trial {trial}: sdp {} < mrt {mrt_min}",
                out.sdp_value
            );
            assert!(out.shortfall <= 0.05, "trial {trial}: shortfall {}", out.shortfall);
            assert!(out.delivered >= (1.0 - 0.05) * out.sdp_value);
            // extracted beams respect the budget
            let total: f64 = out
                .beams
                .iter()
                .map(|w| w.iter().map(|c| c.norm_sqr()).sum::<f64>())
                .sum();
            assert!(total <= budget + 1e-9, "total beam power {total}");
        }
    }
}
