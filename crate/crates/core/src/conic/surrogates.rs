//! Closed-form monomial surrogates for the deployment optimizers.
//!
//! The iterated GP schemes replace four recurring expressions with their
//! best local monomial approximations around the current expansion point:
//!
//! - the aggregate gain posynomial `sum_j d_j^-(b+2)`,
//! - the squared-distance cross term `1 + 2 d^-2 (g . c)` tying an element
//!   to a hotspot,
//! - the pair norm `alpha^-2 (||g_j||^2 + ||g_n||^2)` and the pair cross
//!   term `1 + 2 alpha^-2 (g_j . g_n)` tying two elements together.
//!
//! Each surrogate is available with exponents derived from the generic
//! local-approximation rule (the authoritative path used by the
//! optimizers) and, where a published closed form prescribes different
//! exponents, also in that printed variant so the two can be compared. Both
//! variants agree with the source function in value at the expansion point;
//! only the generic-rule exponents also match its log-gradient.

use super::ConicError;

/// Surrogate of `sum_l d_l^-(b+2)`: `value * prod_l (d_l / d0_l)^beta_l`.
#[derive(Debug, Clone)]
pub struct GainSurrogate {
    pub value: f64,
    pub beta: Vec<f64>,
    pub d0: Vec<f64>,
}

impl GainSurrogate {
    pub fn eval(&self, d: &[f64]) -> f64 {
        self.value
            * d.iter()
                .zip(self.d0.iter())
                .zip(self.beta.iter())
                .map(|((&d, &d0), &b)| (d / d0).powf(b))
                .product::<f64>()
    }
}

/// Source posynomial for [`GainSurrogate`].
pub fn gain_source(d: &[f64], b: f64) -> f64 {
    d.iter().map(|&x| x.powf(-(b + 2.0))).sum()
}

fn gain_surrogate(d0: &[f64], b: f64, prefactor: f64) -> GainSurrogate {
    let terms: Vec<f64> = d0.iter().map(|&x| x.powf(-(b + 2.0))).collect();
    let value: f64 = terms.iter().sum();
    let beta = terms.iter().map(|t| -prefactor * t / value).collect();
    GainSurrogate { value, beta, d0: d0.to_vec() }
}

/// Generic-rule exponents: `beta_l = -(b+2) d0_l^-(b+2) / sum_j d0_j^-(b+2)`.
pub fn gain_surrogate_generic(d0: &[f64], b: f64) -> GainSurrogate {
    gain_surrogate(d0, b, b + 2.0)
}

/// Printed closed-form exponents, with `-(b+3)` in place of `-(b+2)`.
pub fn gain_surrogate_printed(d0: &[f64], b: f64) -> GainSurrogate {
    gain_surrogate(d0, b, b + 3.0)
}

/// Surrogate of `1 + 2 d^-2 (g . c)` over `(d, g_x, g_y)`, where the dot
/// product runs over all three coordinates with `g_z` fixed.
#[derive(Debug, Clone)]
pub struct CrossSurrogate {
    pub value: f64,
    pub beta_d: f64,
    pub beta_g: [f64; 2],
    pub d0: f64,
    pub g0: [f64; 2],
}

impl CrossSurrogate {
    pub fn eval(&self, d: f64, g: [f64; 2]) -> f64 {
        self.value
            * (d / self.d0).powf(self.beta_d)
            * (g[0] / self.g0[0]).powf(self.beta_g[0])
            * (g[1] / self.g0[1]).powf(self.beta_g[1])
    }
}

/// Source function for [`CrossSurrogate`].
pub fn cross_source(d: f64, g: [f64; 2], g_z: f64, c: [f64; 3]) -> f64 {
    1.0 + 2.0 * d.powi(-2) * (g[0] * c[0] + g[1] * c[1] + g_z * c[2])
}

fn cross_surrogate(d0: f64, g0: [f64; 2], g_z: f64, c: [f64; 3], g_factor: f64) -> CrossSurrogate {
    let s = g0[0] * c[0] + g0[1] * c[1] + g_z * c[2];
    let value = 1.0 + 2.0 * d0.powi(-2) * s;
    let beta_d = -4.0 * d0.powi(-2) * s / value;
    let beta_g = [
        g_factor * d0.powi(-2) * g0[0] * c[0] / value,
        g_factor * d0.powi(-2) * g0[1] * c[1] / value,
    ];
    CrossSurrogate { value, beta_d, beta_g, d0, g0 }
}

/// Generic-rule exponents (`beta_g` carries the factor 2 from the chain rule).
pub fn cross_surrogate_generic(d0: f64, g0: [f64; 2], g_z: f64, c: [f64; 3]) -> CrossSurrogate {
    cross_surrogate(d0, g0, g_z, c, 2.0)
}

/// Printed closed-form exponents, with the factor 2 absent from `beta_g`.
pub fn cross_surrogate_printed(d0: f64, g0: [f64; 2], g_z: f64, c: [f64; 3]) -> CrossSurrogate {
    cross_surrogate(d0, g0, g_z, c, 1.0)
}

/// Surrogate over `(alpha, g_j, g_n)` of either pair expression; which one
/// depends on the constructor.
#[derive(Debug, Clone)]
pub struct PairSurrogate {
    pub value: f64,
    pub beta_alpha: f64,
    pub beta_gj: [f64; 2],
    pub beta_gn: [f64; 2],
    pub alpha0: f64,
    pub gj0: [f64; 2],
    pub gn0: [f64; 2],
}

impl PairSurrogate {
    pub fn eval(&self, alpha: f64, gj: [f64; 2], gn: [f64; 2]) -> f64 {
        self.value
            * (alpha / self.alpha0).powf(self.beta_alpha)
            * (gj[0] / self.gj0[0]).powf(self.beta_gj[0])
            * (gj[1] / self.gj0[1]).powf(self.beta_gj[1])
            * (gn[0] / self.gn0[0]).powf(self.beta_gn[0])
            * (gn[1] / self.gn0[1]).powf(self.beta_gn[1])
    }
}

/// Source of the pair norm expression `alpha^-2 (||g_j||^2 + ||g_n||^2)`,
/// both elements at height `g_z`.
pub fn norm_pair_source(alpha: f64, gj: [f64; 2], gn: [f64; 2], g_z: f64) -> f64 {
    let s = gj[0] * gj[0] + gj[1] * gj[1] + gn[0] * gn[0] + gn[1] * gn[1] + 2.0 * g_z * g_z;
    alpha.powi(-2) * s
}

/// Surrogate of the pair norm expression. `beta_alpha = -2` always.
pub fn norm_pair_surrogate(alpha0: f64, gj0: [f64; 2], gn0: [f64; 2], g_z: f64) -> PairSurrogate {
    let s = gj0[0] * gj0[0] + gj0[1] * gj0[1] + gn0[0] * gn0[0] + gn0[1] * gn0[1] + 2.0 * g_z * g_z;
    let value = alpha0.powi(-2) * s;
    PairSurrogate {
        value,
        beta_alpha: -2.0,
        beta_gj: [2.0 * gj0[0] * gj0[0] / s, 2.0 * gj0[1] * gj0[1] / s],
        beta_gn: [2.0 * gn0[0] * gn0[0] / s, 2.0 * gn0[1] * gn0[1] / s],
        alpha0,
        gj0,
        gn0,
    }
}

/// Source of the pair cross expression `1 + 2 alpha^-2 (g_j . g_n)`.
pub fn dot_pair_source(alpha: f64, gj: [f64; 2], gn: [f64; 2], g_z: f64) -> f64 {
    1.0 + 2.0 * alpha.powi(-2) * (gj[0] * gn[0] + gj[1] * gn[1] + g_z * g_z)
}

/// Surrogate of the pair cross expression.
pub fn dot_pair_surrogate(alpha0: f64, gj0: [f64; 2], gn0: [f64; 2], g_z: f64) -> PairSurrogate {
    let s = gj0[0] * gn0[0] + gj0[1] * gn0[1] + g_z * g_z;
    let value = 1.0 + 2.0 * alpha0.powi(-2) * s;
    let a2 = alpha0.powi(-2);
    PairSurrogate {
        value,
        beta_alpha: -4.0 * a2 * s / value,
        beta_gj: [2.0 * a2 * gj0[0] * gn0[0] / value, 2.0 * a2 * gj0[1] * gn0[1] / value],
        beta_gn: [2.0 * a2 * gn0[0] * gj0[0] / value, 2.0 * a2 * gn0[1] * gj0[1] / value],
        alpha0,
        gj0,
        gn0,
    }
}

/// Flat index table for unordered element pairs `(j, n)` with `j < n`.
#[derive(Debug, Clone, Copy)]
pub struct PairTable {
    pub n: usize,
}

impl PairTable {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn index(&self, j: usize, n: usize) -> usize {
        debug_assert!(j < n && n < self.n);
        j * (2 * self.n - j - 1) / 2 + (n - j - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |j| ((j + 1)..self.n).map(move |n| (j, n)))
    }
}

/// Expansion point of the free-form deployment GP: element xy positions (at
/// ceiling height, already shifted positive), element-to-hotspot distances,
/// and pair distances in [`PairTable`] order.
#[derive(Debug, Clone)]
pub struct FreeformExpansion {
    pub g0: Vec<[f64; 2]>,
    /// `d0[j][i]`: element j to hotspot i.
    pub d0: Vec<Vec<f64>>,
    /// `alpha0[pair]`: distance between elements of each `j < n` pair.
    pub alpha0: Vec<f64>,
}

/// All surrogates for one expansion state of the free-form GP, in both the
/// generic-rule (authoritative) and printed closed-form variants.
#[derive(Debug)]
pub struct AppendixCoefficients {
    /// Aggregate gain surrogate per hotspot, generic exponents.
    pub h_hat: Vec<GainSurrogate>,
    /// Aggregate gain surrogate per hotspot, printed `-(b+3)` exponents.
    pub h_hat_printed: Vec<GainSurrogate>,
    /// Element-hotspot cross surrogate, `[j][i]`, generic exponents.
    pub h_tilde: Vec<Vec<CrossSurrogate>>,
    /// Element-hotspot cross surrogate, `[j][i]`, printed exponents.
    pub h_tilde_printed: Vec<Vec<CrossSurrogate>>,
    /// Pair norm surrogate per `j < n` pair.
    pub h_prime: Vec<PairSurrogate>,
    /// Pair cross surrogate per `j < n` pair.
    pub h_bar: Vec<PairSurrogate>,
}

/// Build every surrogate around `state` for hotspot centers `c` (shifted
/// coordinates) and boresight gain `b`, elements at height `ceiling_h`.
pub fn appendix_coefficients(
    state: &FreeformExpansion,
    centers: &[[f64; 3]],
    b: f64,
    ceiling_h: f64,
) -> Result<AppendixCoefficients, ConicError> {
    let n = state.g0.len();
    let k = centers.len();
    let pairs = PairTable::new(n);
    if state.d0.len() != n || state.alpha0.len() != pairs.count() {
        return Err(ConicError::BadProgram("expansion state shape mismatch".into()));
    }
    for g in &state.g0 {
        if !(g[0] > 0.0 && g[1] > 0.0) {
            return Err(ConicError::BadProgram(format!(
                "non-positive element coordinate at expansion point: ({}, {})",
                g[0], g[1]
            )));
        }
    }
    if state.d0.iter().flatten().any(|&d| !(d > 0.0)) || state.alpha0.iter().any(|&a| !(a > 0.0)) {
        return Err(ConicError::BadProgram(
            "non-positive distance at expansion point".into(),
        ));
    }

    let mut h_hat = Vec::with_capacity(k);
    let mut h_hat_printed = Vec::with_capacity(k);
    for i in 0..k {
        let d0_col: Vec<f64> = (0..n).map(|j| state.d0[j][i]).collect();
        h_hat.push(gain_surrogate_generic(&d0_col, b));
        h_hat_printed.push(gain_surrogate_printed(&d0_col, b));
    }

    let mut h_tilde = Vec::with_capacity(n);
    let mut h_tilde_printed = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(k);
        let mut row_printed = Vec::with_capacity(k);
        for (i, c) in centers.iter().enumerate() {
            row.push(cross_surrogate_generic(state.d0[j][i], state.g0[j], ceiling_h, *c));
            row_printed.push(cross_surrogate_printed(state.d0[j][i], state.g0[j], ceiling_h, *c));
        }
        h_tilde.push(row);
        h_tilde_printed.push(row_printed);
    }

    let mut h_prime = Vec::with_capacity(pairs.count());
    let mut h_bar = Vec::with_capacity(pairs.count());
    for (j, m) in pairs.iter() {
        let a0 = state.alpha0[pairs.index(j, m)];
        h_prime.push(norm_pair_surrogate(a0, state.g0[j], state.g0[m], ceiling_h));
        h_bar.push(dot_pair_surrogate(a0, state.g0[j], state.g0[m], ceiling_h));
    }

    Ok(AppendixCoefficients {
        h_hat,
        h_hat_printed,
        h_tilde,
        h_tilde_printed,
        h_prime,
        h_bar,
    })
}
