//! Limit quantities and limit-law draws computed from simulated ground truth.
//!
//! Everything here works from the true jumps and the true spot covariance, never
//! from the estimators, so it can serve as a reference for them. Roots of the
//! spot matrices are lower Cholesky factors rather than the symmetric roots
//! used by the resampler; both give the same laws.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::Sym2;
use crate::simulator::PathTruth;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitQuantities {
    /// `Σ (ΔX¹ΔX²)²`.
    pub b: f64,
    /// `Σ (ΔX¹)⁴`.
    pub b11: f64,
    /// `Σ (ΔX²)⁴`.
    pub b22: f64,
    /// `∫ (c¹¹c²² + 2(c¹²)²) dt`.
    pub c: f64,
    pub f: f64,
    pub fprime: f64,
}

impl LimitQuantities {
    /// `B / √(B¹¹B²²)`, the limit of `Φ⁽ᵈ⁾`.
    pub fn phi_disjoint_limit(&self) -> f64 {
        self.b / (self.b11 * self.b22).sqrt()
    }

    /// `(D̃ + C) / √(B¹¹B²²)`.
    pub fn phi_prime(&self, d_tilde: f64) -> f64 {
        (d_tilde + self.c) / (self.b11 * self.b22).sqrt()
    }

    /// `Ẽ(Φ̃′|F) = (F + C) / √(B¹¹B²²)`.
    pub fn phi_prime_mean(&self) -> f64 {
        self.phi_prime(self.f)
    }
}

fn c_integrand(c: &Sym2<f64>) -> f64 {
    c.xx * c.yy + 2.0 * c.xy * c.xy
}

/// `B`, `B¹¹`, `B²²`, `C`, `F`, `F′` on `[0, horizon]`.
pub fn limit_quantities(truth: &PathTruth, horizon: f64) -> LimitQuantities {
    let mut q = LimitQuantities { b: 0.0, b11: 0.0, b22: 0.0, c: 0.0, f: 0.0, fprime: 0.0 };
    for e in truth.jump_events.iter().filter(|e| e.time <= horizon) {
        let [a, b] = e.jump;
        let (l, r) = (&e.cov_left, &e.cov_right);
        q.b += (a * b).powi(2);
        q.b11 += a.powi(4);
        q.b22 += b.powi(4);
        q.f += 0.5 * (a * a * (l.yy + r.yy) + b * b * (l.xx + r.xx));
        q.fprime += 2.0
            * (a * a * b.powi(4) * (l.xx + r.xx)
                + a.powi(4) * b * b * (l.yy + r.yy)
                + 2.0 * (a * b).powi(3) * (l.xy + r.xy));
    }
    q.c = integrate_c(truth, horizon);
    q
}

/// Trapezoid rule over the fine grid with the jump times as extra breakpoints.
fn integrate_c(truth: &PathTruth, horizon: f64) -> f64 {
    // (time, value from the left, value from the right)
    let mut knots: Vec<(f64, f64, f64)> = truth
        .fine_times
        .iter()
        .zip(&truth.spot_cov_path)
        .filter(|(t, _)| **t <= horizon)
        .map(|(&t, c)| {
            let v = c_integrand(c);
            (t, v, v)
        })
        .collect();
    knots.extend(
        truth
            .jump_events
            .iter()
            .filter(|e| e.time <= horizon)
            .map(|e| (e.time, c_integrand(&e.cov_left), c_integrand(&e.cov_right))),
    );
    knots.sort_by(|a, b| a.0.total_cmp(&b.0));
    knots.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].2 + w[1].1)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLawSample {
    pub phi_tilde: f64,
    pub g_tilde: f64,
    pub d_tilde: f64,
    pub d_tilde_pp: f64,
}

/// Lower Cholesky factor of a PSD 2×2 matrix, as `[[l11, 0], [l21, l22]]`.
fn cholesky(c: &Sym2<f64>) -> [f64; 3] {
    let l11 = c.xx.max(0.0).sqrt();
    if l11 == 0.0 {
        return [0.0, 0.0, c.yy.max(0.0).sqrt()];
    }
    let l21 = c.xy / l11;
    [l11, l21, (c.yy - l21 * l21).max(0.0).sqrt()]
}

fn apply(l: &[f64; 3], u: [f64; 2]) -> [f64; 2] {
    [l[0] * u[0], l[1] * u[0] + l[2] * u[1]]
}

#[derive(Debug, Clone)]
struct LawJump {
    x: [f64; 2],
    left: [f64; 3],
    right: [f64; 3],
}

/// Precomputed ingredients for repeated limit-law draws on one path.
#[derive(Debug, Clone)]
pub struct LimitLaw {
    k: usize,
    quantities: LimitQuantities,
    jumps: Vec<LawJump>,
}

impl LimitLaw {
    pub fn new(truth: &PathTruth, horizon: f64, k: usize) -> Self {
        assert!(k >= 2, "k must be at least 2");
        let jumps = truth
            .jump_events
            .iter()
            .filter(|e| e.time <= horizon)
            .map(|e| LawJump { x: e.jump, left: cholesky(&e.cov_left), right: cholesky(&e.cov_right) })
            .collect();
        Self { k, quantities: limit_quantities(truth, horizon), jumps }
    }

    pub fn quantities(&self) -> &LimitQuantities {
        &self.quantities
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LimitLawSample {
        let normal = |rng: &mut R| -> [f64; 2] { [rng.sample(StandardNormal), rng.sample(StandardNormal)] };
        let (mut d, mut dpp, mut g) = (0.0, 0.0, 0.0);
        for j in &self.jumps {
            let u = normal(rng);
            let u1 = normal(rng);
            let ub = normal(rng);
            let ub1 = normal(rng);
            let kappa: f64 = rng.random();
            let l = rng.random_range(0..self.k) as f64;
            let rest = (self.k - 1) as f64 - l;
            let (a1, a2) = (apply(&j.left, u), apply(&j.right, u1));
            let r = [kappa.sqrt() * a1[0] + (1.0 - kappa).sqrt() * a2[0], kappa.sqrt() * a1[1] + (1.0 - kappa).sqrt() * a2[1]];
            let (b1, b2) = (apply(&j.left, ub), apply(&j.right, ub1));
            let rp = [l.sqrt() * b1[0] + rest.sqrt() * b2[0], l.sqrt() * b1[1] + rest.sqrt() * b2[1]];
            let rpp = [r[0] + rp[0], r[1] + rp[1]];
            let [a, b] = j.x;
            d += (a * r[1]).powi(2) + (b * r[0]).powi(2);
            dpp += (a * rpp[1]).powi(2) + (b * rpp[0]).powi(2);
            g += 2.0 * (a * a * b * rp[1] + b * b * a * rp[0]);
        }
        let c = self.quantities.c;
        let den = d + c;
        let phi_tilde = if den > 0.0 { (dpp + self.k as f64 * c) / den } else { self.k as f64 };
        LimitLawSample { phi_tilde, g_tilde: g, d_tilde: d, d_tilde_pp: dpp }
    }
}

/// One draw of `(Φ̃, G̃, D̃, D̃″)`.
pub fn sample_limit_law<R: Rng + ?Sized>(truth: &PathTruth, horizon: f64, k: usize, rng: &mut R) -> LimitLawSample {
    LimitLaw::new(truth, horizon, k).sample(rng)
}
