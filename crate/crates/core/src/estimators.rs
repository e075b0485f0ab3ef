//! Consistent estimators behind the standardized statistics.
//!
//! * `multipower_c` and `truncated_c` both estimate
//!   `C_T = ∫ (c¹¹c²² + 2 (c¹²)²) ds`; the truncated one is only consistent
//!   when no common jumps are present.
//! * `spot_cov` gives truncated local covariance estimates on the windows
//!   `{i−k_n, …, i−1}` (left) and `{i+2, …, i+k_n+1}` (right); index `i+1`
//!   is skipped.
//! * `f_hat` and `fprime_hat` are the jump-weighted variances built from
//!   big increments and the spot estimates around them.
//!
//! Positions passed to the window helpers are one-based (`1..=n`).

use serde::{Deserialize, Serialize};

use crate::error::{CojumpError, Result};
use crate::linalg::Sym2;
use crate::num::Scalar;
use crate::series::IncrementSeries;
use crate::stats::{realized_functional, TestFunction};

/// How increments are classified as small (diffusive) or big (jump).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TruncationMode<T> {
    /// `‖x‖ ≤ α Δ^ϖ`
    JointNorm { alpha: T },
    /// `|x₁| ≤ α₁ Δ^ϖ` and `|x₂| ≤ α₂ Δ^ϖ`
    PerComponent { alpha1: T, alpha2: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec<T> {
    pub mode: TruncationMode<T>,
    pub varpi: T,
}

impl<T: Scalar> TruncationSpec<T> {
    pub fn joint(alpha: T, varpi: T) -> Result<Self> {
        Self { mode: TruncationMode::JointNorm { alpha }, varpi }.validated()
    }

    pub fn per_component(alpha1: T, alpha2: T, varpi: T) -> Result<Self> {
        Self { mode: TruncationMode::PerComponent { alpha1, alpha2 }, varpi }.validated()
    }

    /// `α Δ^ϖ = 0.03 Δ^0.49`, the level used on simulated paths.
    pub fn simulation_default() -> Self {
        Self { mode: TruncationMode::JointNorm { alpha: T::lit(0.03) }, varpi: T::lit(0.49) }
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.varpi > T::zero() && self.varpi < T::lit(0.5)) {
            return Err(CojumpError::InvalidParameter(format!("varpi must lie in (0, 1/2), got {}", self.varpi)));
        }
        let ok = match self.mode {
            TruncationMode::JointNorm { alpha } => alpha > T::zero(),
            TruncationMode::PerComponent { alpha1, alpha2 } => alpha1 > T::zero() && alpha2 > T::zero(),
        };
        if !ok {
            return Err(CojumpError::InvalidParameter("truncation levels must be positive".into()));
        }
        Ok(self)
    }

    /// Thresholds resolved for step size `delta`.
    pub fn at(&self, delta: T) -> Threshold<T> {
        let scale = delta.powf(self.varpi);
        match self.mode {
            TruncationMode::JointNorm { alpha } => Threshold::Norm(alpha * scale),
            TruncationMode::PerComponent { alpha1, alpha2 } => Threshold::Box([alpha1 * scale, alpha2 * scale]),
        }
    }
}

/// A truncation level resolved at a concrete step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold<T> {
    Norm(T),
    Box([T; 2]),
}

impl<T: Scalar> Threshold<T> {
    /// Small iff at or below the threshold; big is the strict complement.
    #[inline]
    pub fn is_small(&self, x: &[T; 2]) -> bool {
        match *self {
            Threshold::Norm(r) => x[0].hypot(x[1]) <= r,
            Threshold::Box(b) => x[0].abs() <= b[0] && x[1].abs() <= b[1],
        }
    }

    #[inline]
    pub fn is_big(&self, x: &[T; 2]) -> bool {
        !self.is_small(x)
    }
}

/// Local window length `k_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub k_n: usize,
}

impl WindowSpec {
    pub fn new(k_n: usize) -> Result<Self> {
        if k_n == 0 {
            return Err(CojumpError::InvalidParameter("window length k_n must be >= 1".into()));
        }
        Ok(Self { k_n })
    }

    /// `k_n = round(1/√Δ)`, at least 1.
    pub fn default_for<T: Scalar>(delta: T) -> Self {
        let k = (T::one() / delta.sqrt()).round().to_usize().unwrap_or(1);
        Self { k_n: k.max(1) }
    }

    /// Smallest series length on which at least one position has both windows.
    pub fn min_count(&self) -> usize {
        2 * self.k_n + 2
    }

    pub fn check<T: Scalar>(&self, series: &IncrementSeries<T>) -> Result<()> {
        if series.len() < self.min_count() {
            return Err(CojumpError::InsufficientData { needed: self.min_count(), have: series.len() });
        }
        Ok(())
    }

    /// One-based positions `1+k_n ..= n−k_n−1` whose windows fit.
    pub fn positions(&self, count: usize) -> std::ops::RangeInclusive<usize> {
        let lo = 1 + self.k_n;
        let hi = count.saturating_sub(self.k_n + 1);
        lo..=hi
    }
}

/// Spot covariance estimates just before (`left`) and after (`right`) a position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotCovPair<T> {
    pub left: Sym2<T>,
    pub right: Sym2<T>,
}

impl<T: Scalar> SpotCovPair<T> {
    /// `½ (left + right)`.
    pub fn average(&self) -> Sym2<T> {
        (self.left + self.right).scale(T::lit(0.5))
    }
}

/// Multipower estimator of `C_T`.
pub fn multipower_c<T: Scalar>(series: &IncrementSeries<T>) -> Result<T> {
    let x = series.increments();
    if x.len() < 4 {
        return Err(CojumpError::InsufficientData { needed: 4, have: x.len() });
    }
    let eighth = T::lit(0.125);
    let quarter = T::lit(0.25);
    let sum: T = x
        .windows(4)
        .map(|w| {
            let p = |m: usize| w[m][0] + w[m][1];
            let q = |m: usize| w[m][0] - w[m][1];
            (w[0][0] * w[1][0] * w[2][1] * w[3][1]).abs() + eighth * (p(0) * p(1) * p(2) * p(3)).abs()
                + eighth * (q(0) * q(1) * q(2) * q(3)).abs()
                - quarter * (p(0) * p(1) * q(2) * q(3)).abs()
        })
        .sum();
    let pi = T::PI();
    Ok(pi * pi / (T::lit(4.0) * series.delta()) * sum)
}

/// Truncated estimator `(1/Δ) Σ (Δx¹Δx²)² 1{small}`.
pub fn truncated_c<T: Scalar>(series: &IncrementSeries<T>, trunc: &TruncationSpec<T>) -> T {
    let thr = trunc.at(series.delta());
    let sum: T = series
        .increments()
        .iter()
        .filter(|x| thr.is_small(x))
        .map(|x| TestFunction::ProdSq.eval(*x))
        .sum();
    sum / series.delta()
}

fn window_cov<T: Scalar>(incs: &[[T; 2]], thr: &Threshold<T>, norm: T) -> Sym2<T> {
    incs.iter().filter(|x| thr.is_small(x)).fold(Sym2::zero(), |acc, x| acc + Sym2::outer(*x)).scale(norm)
}

/// Left/right truncated spot covariance at one-based position `i`.
pub fn spot_cov<T: Scalar>(
    series: &IncrementSeries<T>,
    i: usize,
    window: &WindowSpec,
    trunc: &TruncationSpec<T>,
) -> Result<SpotCovPair<T>> {
    let range = window.positions(series.len());
    if !range.contains(&i) {
        return Err(CojumpError::IndexOutOfWindow { index: i, lo: *range.start(), hi: *range.end() });
    }
    Ok(spot_cov_unchecked(series, i, window.k_n, &trunc.at(series.delta())))
}

fn spot_cov_unchecked<T: Scalar>(series: &IncrementSeries<T>, i: usize, k_n: usize, thr: &Threshold<T>) -> SpotCovPair<T> {
    let x = series.increments();
    let norm = T::one() / (T::from_count(k_n) * series.delta());
    // one-based {i−k_n..i−1} is zero-based [i−k_n−1, i−1); {i+2..i+k_n+1} is [i+1, i+k_n+1)
    SpotCovPair {
        left: window_cov(&x[i - k_n - 1..i - 1], thr, norm),
        right: window_cov(&x[i + 1..i + k_n + 1], thr, norm),
    }
}

/// A big increment at a position where both windows fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSite<T> {
    /// One-based position.
    pub index: usize,
    pub increment: [T; 2],
    pub spot: SpotCovPair<T>,
}

/// All big increments within the admissible range, in index order.
pub fn jump_sites<T: Scalar>(
    series: &IncrementSeries<T>,
    window: &WindowSpec,
    trunc: &TruncationSpec<T>,
) -> Result<Vec<JumpSite<T>>> {
    window.check(series)?;
    let thr = trunc.at(series.delta());
    let x = series.increments();
    Ok(window
        .positions(series.len())
        .filter(|&i| thr.is_big(&x[i - 1]))
        .map(|i| JumpSite { index: i, increment: x[i - 1], spot: spot_cov_unchecked(series, i, window.k_n, &thr) })
        .collect())
}

/// Per-site contribution to `f_hat`: `½ (a² (ĉ₋²² + ĉ₊²²) + b² (ĉ₋¹¹ + ĉ₊¹¹))`.
pub(crate) fn f_term<T: Scalar>(site: &JumpSite<T>) -> T {
    let [a, b] = site.increment;
    let avg = site.spot.average();
    a * a * avg.yy + b * b * avg.xx
}

/// Per-site contribution to `fprime_hat`: `4 a² b² · (b, a) ½(ĉ₋ + ĉ₊) (b, a)ᵀ`.
pub(crate) fn fprime_term<T: Scalar>(site: &JumpSite<T>) -> T {
    let [a, b] = site.increment;
    let avg = site.spot.average();
    T::lit(4.0) * a * a * b * b * avg.quad_form([b, a])
}

/// Estimator of `F_T`.
pub fn f_hat<T: Scalar>(series: &IncrementSeries<T>, window: &WindowSpec, trunc: &TruncationSpec<T>) -> Result<T> {
    Ok(jump_sites(series, window, trunc)?.iter().map(f_term).sum())
}

/// Estimator of `F′_T`.
pub fn fprime_hat<T: Scalar>(series: &IncrementSeries<T>, window: &WindowSpec, trunc: &TruncationSpec<T>) -> Result<T> {
    Ok(jump_sites(series, window, trunc)?.iter().map(fprime_term).sum())
}

/// Estimator values and the three standardizers derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardizerReport<T> {
    /// Multipower estimate of `C_T`, unclamped.
    pub a_hat: T,
    /// Truncated estimate of `C_T`.
    pub a_hat_trunc: T,
    pub f_hat: T,
    pub fprime_hat: T,
    pub v_joint: T,
    pub v_disjoint: T,
    pub v_disjoint_trunc: T,
}

/// Raw ingredients shared by the standardizers and the test layer.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorInputs<T> {
    pub delta: T,
    pub v_f: T,
    pub v_f_coarse: T,
    pub v_g1: T,
    pub v_g2: T,
    pub a_hat: T,
    pub a_hat_trunc: T,
    pub f_hat: T,
    pub fprime_hat: T,
    pub sites: Vec<JumpSite<T>>,
}

impl<T: Scalar> EstimatorInputs<T> {
    pub fn compute(
        series: &IncrementSeries<T>,
        k: usize,
        window: &WindowSpec,
        trunc: &TruncationSpec<T>,
    ) -> Result<Self> {
        if k < 2 {
            return Err(CojumpError::InvalidParameter(format!("coarsening factor k must be >= 2, got {k}")));
        }
        let sites = jump_sites(series, window, trunc)?;
        Ok(Self {
            delta: series.delta(),
            v_f: realized_functional(series, TestFunction::ProdSq, 1),
            v_f_coarse: realized_functional(series, TestFunction::ProdSq, k),
            v_g1: realized_functional(series, TestFunction::G1Quartic, 1),
            v_g2: realized_functional(series, TestFunction::G2Quartic, 1),
            a_hat: multipower_c(series)?,
            a_hat_trunc: truncated_c(series, trunc),
            f_hat: sites.iter().map(f_term).sum(),
            fprime_hat: sites.iter().map(fprime_term).sum(),
            sites,
        })
    }

    pub fn quartic_norm(&self) -> T {
        (self.v_g1 * self.v_g2).sqrt()
    }

    /// `√(Δ (k−1) F̂′) / V(f, Δ)`.
    pub fn v_joint(&self, k: usize) -> Result<T> {
        if self.v_f == T::zero() {
            return Err(CojumpError::DenominatorZero("V(f, Δ) = 0"));
        }
        Ok((self.delta * T::from_count(k - 1) * self.fprime_hat).sqrt() / self.v_f)
    }

    /// `Δ (F̂ + Â) / √(V(g₁) V(g₂))`; `Â` is clamped at zero.
    pub fn v_disjoint(&self, a: T) -> Result<T> {
        let norm = self.quartic_norm();
        if norm == T::zero() {
            return Err(CojumpError::DenominatorZero("V(g1, Δ) V(g2, Δ) = 0"));
        }
        Ok(self.delta * (self.f_hat + a.max(T::zero())) / norm)
    }

    pub fn report(&self, k: usize) -> Result<StandardizerReport<T>> {
        Ok(StandardizerReport {
            a_hat: self.a_hat,
            a_hat_trunc: self.a_hat_trunc,
            f_hat: self.f_hat,
            fprime_hat: self.fprime_hat,
            v_joint: self.v_joint(k)?,
            v_disjoint: self.v_disjoint(self.a_hat)?,
            v_disjoint_trunc: self.v_disjoint(self.a_hat_trunc)?,
        })
    }
}

/// Estimators and standardizers for one series.
pub fn standardizers<T: Scalar>(
    series: &IncrementSeries<T>,
    k: usize,
    window: &WindowSpec,
    trunc: &TruncationSpec<T>,
) -> Result<StandardizerReport<T>> {
    EstimatorInputs::compute(series, k, window, trunc)?.report(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series_with_delta(delta: f64, incs: Vec<[f64; 2]>) -> IncrementSeries<f64> {
        let n = incs.len();
        IncrementSeries::from_increments(delta * n as f64, incs).unwrap()
    }

    /// Direct double sum over (big i, small j ∈ windows), written from the definitions.
    fn naive_f_and_fprime(s: &IncrementSeries<f64>, k_n: usize, thr: f64) -> (f64, f64) {
        let x = s.increments();
        let n = x.len();
        let d = s.delta();
        let big = |v: &[f64; 2]| v[0].hypot(v[1]) > thr;
        let (mut f, mut fp) = (0.0, 0.0);
        for i in (1 + k_n)..=(n - k_n - 1) {
            let xi = x[i - 1];
            if !big(&xi) {
                continue;
            }
            let window: Vec<usize> = ((i - k_n)..=(i - 1)).chain((i + 2)..=(i + k_n + 1)).collect();
            for j in window {
                let xj = x[j - 1];
                if big(&xj) {
                    continue;
                }
                f += (xi[0].powi(2) * xj[1].powi(2) + xi[1].powi(2) * xj[0].powi(2)) / (2.0 * k_n as f64 * d);
                fp += 2.0 / (k_n as f64 * d)
                    * xi[0].powi(2)
                    * xi[1].powi(2)
                    * (xi[0] * xj[1] + xi[1] * xj[0]).powi(2);
            }
        }
        (f, fp)
    }

    #[test]
    fn multipower_zero_path_and_short_input() {
        let s = series_with_delta(0.01, vec![[0.0, 0.0]; 10]);
        assert_eq!(multipower_c(&s).unwrap(), 0.0);
        let s = series_with_delta(0.01, vec![[0.0, 0.0]; 3]);
        assert!(matches!(multipower_c(&s), Err(CojumpError::InsufficientData { .. })));
    }

    #[test]
    fn truncated_c_examples() {
        let trunc = TruncationSpec::joint(0.1, 0.49).unwrap();
        let s = series_with_delta(0.01, vec![[5.0, 5.0]; 8]);
        assert_eq!(truncated_c(&s, &trunc), 0.0);

        let mut incs = vec![[1e-3, 2e-3]; 9];
        incs[4] = [10.0, 10.0];
        let s = series_with_delta(0.01, incs);
        let expected = 8.0 * (1e-3_f64 * 2e-3).powi(2) / 0.01;
        assert!((truncated_c(&s, &trunc) - expected).abs() < 1e-18);
    }

    #[test]
    fn spot_cov_arithmetic() {
        // k_n = 2, Δ = 0.01, left window increments (0.01, 0.02)
        let mut incs = vec![[0.0, 0.0]; 8];
        incs[1] = [0.01, 0.02];
        incs[2] = [0.01, 0.02];
        let s = series_with_delta(0.01, incs);
        let trunc = TruncationSpec::joint(10.0, 0.49).unwrap();
        let w = WindowSpec::new(2).unwrap();
        let sp = spot_cov(&s, 4, &w, &trunc).unwrap();
        assert!((sp.left.xx - 0.01).abs() < 1e-15);
        assert!((sp.left.yy - 0.04).abs() < 1e-15);
        assert!((sp.left.xy - 0.02).abs() < 1e-15);
        assert_eq!(sp.right, Sym2::zero());
    }

    #[test]
    fn spot_cov_bounds_and_full_truncation() {
        let s = series_with_delta(0.01, vec![[1.0, 1.0]; 8]);
        let trunc = TruncationSpec::joint(0.01, 0.49).unwrap();
        let w = WindowSpec::new(2).unwrap();
        assert_eq!(spot_cov(&s, 3, &w, &trunc).unwrap(), SpotCovPair { left: Sym2::zero(), right: Sym2::zero() });
        assert!(matches!(spot_cov(&s, 2, &w, &trunc), Err(CojumpError::IndexOutOfWindow { lo: 3, hi: 5, .. })));
        assert!(spot_cov(&s, 6, &w, &trunc).is_err());
        assert!(spot_cov(&s, 5, &w, &trunc).is_ok());
    }

    #[test]
    fn f_hat_single_big_increment() {
        let (k_n, d, sv) = (3usize, 0.001, 1e-4);
        let mut incs = vec![[sv, sv]; 2 * k_n + 4];
        incs[k_n + 1] = [1.0, 0.0]; // one-based position k_n + 2
        let s = series_with_delta(d, incs);
        let trunc = TruncationSpec::joint(0.5, 0.1).unwrap();
        let w = WindowSpec::new(k_n).unwrap();
        let got = f_hat(&s, &w, &trunc).unwrap();
        assert!((got - sv * sv / d).abs() < 1e-15);
        assert_eq!(fprime_hat(&s, &w, &trunc).unwrap(), 0.0);
    }

    #[test]
    fn fprime_hat_single_neighbor() {
        let (k_n, d, sv) = (2usize, 0.01, 1e-3);
        let mut incs = vec![[0.0, 0.0]; 8];
        incs[3] = [1.0, 1.0]; // big at one-based 4
        incs[1] = [sv, sv]; // one-based 2, inside the left window
        let s = series_with_delta(d, incs);
        let trunc = TruncationSpec::joint(0.5, 0.1).unwrap();
        let w = WindowSpec::new(k_n).unwrap();
        let got = fprime_hat(&s, &w, &trunc).unwrap();
        let expected = 8.0 * sv * sv / (k_n as f64 * d);
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn no_big_increment_gives_zero() {
        let s = series_with_delta(0.01, vec![[1e-4, -1e-4]; 20]);
        let trunc = TruncationSpec::joint(1.0, 0.49).unwrap();
        let w = WindowSpec::new(3).unwrap();
        assert_eq!(f_hat(&s, &w, &trunc).unwrap(), 0.0);
        assert_eq!(fprime_hat(&s, &w, &trunc).unwrap(), 0.0);
        let short = series_with_delta(0.01, vec![[0.0, 0.0]; 7]);
        assert!(matches!(f_hat(&short, &w, &trunc), Err(CojumpError::InsufficientData { needed: 8, .. })));
    }

    #[test]
    fn standardizers_degenerate_values() {
        let mut incs = vec![[1e-4, 2e-4]; 30];
        incs[12] = [1.0, 0.0];
        let s = series_with_delta(0.01, incs);
        let trunc = TruncationSpec::joint(0.5, 0.1).unwrap();
        let w = WindowSpec::new(3).unwrap();
        let r = standardizers(&s, 2, &w, &trunc).unwrap();
        // big increment has b = 0, so F̂′ = 0 and V_joint = 0
        assert_eq!(r.fprime_hat, 0.0);
        assert_eq!(r.v_joint, 0.0);

        let zero = series_with_delta(0.01, vec![[1.0, 0.0]; 30]);
        assert!(matches!(standardizers(&zero, 2, &w, &trunc), Err(CojumpError::DenominatorZero(_))));
    }

    #[test]
    fn default_window() {
        assert_eq!(WindowSpec::default_for(1.0 / 1600.0).k_n, 40);
        assert_eq!(WindowSpec::default_for(1.0 / 100.0).k_n, 10);
        assert_eq!(WindowSpec::default_for(1.0 / 288.0).k_n, 17);
    }

    #[test]
    fn multipower_decreases_on_refined_linear_path() {
        // X_t = (t, 2t): every increment is (Δ, 2Δ)
        let vals: Vec<f64> = [100usize, 1000, 10000]
            .iter()
            .map(|&n| {
                let d = 1.0 / n as f64;
                multipower_c(&series_with_delta(d, vec![[d, 2.0 * d]; n])).unwrap()
            })
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
        assert!(vals[2] < 1e-3);
    }

    fn small_incs() -> impl Strategy<Value = Vec<[f64; 2]>> {
        prop::collection::vec(
            prop_oneof![
                4 => [-0.02..0.02_f64, -0.02..0.02_f64],
                1 => [-1.0..1.0_f64, -1.0..1.0_f64],
            ],
            12..80,
        )
    }

    proptest! {
        #[test]
        fn window_estimators_match_naive_double_sum(v in small_incs(), k_n in 1usize..5) {
            let s = series_with_delta(0.001, v);
            prop_assume!(s.len() >= 2 * k_n + 2);
            let alpha = 0.1;
            let varpi = 0.3;
            let trunc = TruncationSpec::joint(alpha, varpi).unwrap();
            let w = WindowSpec::new(k_n).unwrap();
            let (nf, nfp) = naive_f_and_fprime(&s, k_n, alpha * 0.001_f64.powf(varpi));
            let f = f_hat(&s, &w, &trunc).unwrap();
            let fp = fprime_hat(&s, &w, &trunc).unwrap();
            prop_assert!(f >= 0.0 && fp >= 0.0);
            prop_assert!((f - nf).abs() <= 1e-10 * nf.max(1e-300));
            prop_assert!((fp - nfp).abs() <= 1e-10 * nfp.max(1e-300));
        }

        #[test]
        fn truncated_c_monotone_in_alpha(v in small_incs(), a in 0.01..1.0_f64, extra in 0.0..1.0_f64) {
            let s = series_with_delta(0.001, v);
            let lo = truncated_c(&s, &TruncationSpec::joint(a, 0.3).unwrap());
            let hi = truncated_c(&s, &TruncationSpec::joint(a + extra, 0.3).unwrap());
            prop_assert!(hi >= lo);
        }

        #[test]
        fn spot_cov_symmetric_nonneg_diag(v in small_incs(), k_n in 1usize..4) {
            let s = series_with_delta(0.001, v);
            prop_assume!(s.len() >= 2 * k_n + 2);
            let trunc = TruncationSpec::joint(0.1, 0.3).unwrap();
            let w = WindowSpec::new(k_n).unwrap();
            for i in w.positions(s.len()) {
                let sp = spot_cov(&s, i, &w, &trunc).unwrap();
                for m in [sp.left, sp.right] {
                    prop_assert!(m.xx >= 0.0 && m.yy >= 0.0);
                    prop_assert!(m.xy * m.xy <= m.xx * m.yy * (1.0 + 1e-12) + 1e-300);
                }
            }
        }

        #[test]
        fn per_component_truncation_follows_rescaling(
            v in small_incs(), l1 in 0.1..10.0_f64, l2 in 0.1..10.0_f64, k_n in 1usize..4
        ) {
            let s = series_with_delta(0.001, v);
            prop_assume!(s.len() >= 2 * k_n + 2);
            let w = WindowSpec::new(k_n).unwrap();
            let base = TruncationSpec::per_component(0.1, 0.2, 0.3).unwrap();
            let scaled = TruncationSpec::per_component(0.1 * l1, 0.2 * l2, 0.3).unwrap();
            let r = s.rescaled([l1, l2]);
            let sites_a: Vec<usize> = jump_sites(&s, &w, &base).unwrap().iter().map(|x| x.index).collect();
            let sites_b: Vec<usize> = jump_sites(&r, &w, &scaled).unwrap().iter().map(|x| x.index).collect();
            prop_assert_eq!(sites_a, sites_b);
            // every term of f̂ carries a factor λ₁²λ₂²
            let fa = f_hat(&s, &w, &base).unwrap();
            let fb = f_hat(&r, &w, &scaled).unwrap();
            let factor = l1 * l1 * l2 * l2;
            prop_assert!((fb - factor * fa).abs() <= 1e-9 * (factor * fa).max(1e-300));
        }
    }
}
