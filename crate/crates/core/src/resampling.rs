//! Monte-Carlo copies of the limit variables and their order-statistic quantiles.
//!
//! For every big increment the spot estimates on both sides are turned into
//! symmetric PSD roots once; each copy then redraws the auxiliary variables
//! and evaluates `D̂` and `Ĝ`. Draws for copy `c` at position `i` come from the
//! stream cell `(c, i)`, so a copy set is the same whatever the thread count.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CojumpError, Result};
use crate::estimators::{jump_sites, JumpSite, SpotCovPair, TruncationSpec, WindowSpec};
use crate::linalg::Sym2;
use crate::num::Scalar;
use crate::rng::RngStream;
use crate::series::IncrementSeries;

/// Auxiliary variables for one position of one copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleDraw<T> {
    /// Uniform on `[0, 1]`.
    pub kappa: T,
    /// Uniform on `{0, …, k−1}`.
    pub l: usize,
    pub u: [T; 2],
    pub u_prime: [T; 2],
    pub u_bar: [T; 2],
    pub u_bar_prime: [T; 2],
}

impl<T: Scalar> ResampleDraw<T> {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Self {
        let mut normal = || -> [T; 2] {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            [T::lit(a), T::lit(b)]
        };
        let u = normal();
        let u_prime = normal();
        let u_bar = normal();
        let u_bar_prime = normal();
        let kappa = T::lit(rng.random::<f64>());
        let l = rng.random_range(0..k);
        Self { kappa, l, u, u_prime, u_bar, u_bar_prime }
    }
}

fn axpy<T: Scalar>(a: T, m: &Sym2<T>, v: [T; 2], b: T, n: &Sym2<T>, w: [T; 2]) -> [T; 2] {
    let x = m.mul_vec(v);
    let y = n.mul_vec(w);
    [a * x[0] + b * y[0], a * x[1] + b * y[1]]
}

/// PSD roots of a spot pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotRoots<T> {
    pub left: Sym2<T>,
    pub right: Sym2<T>,
}

impl<T: Scalar> SpotRoots<T> {
    pub fn of(spot: &SpotCovPair<T>) -> Self {
        Self { left: spot.left.psd_sqrt(), right: spot.right.psd_sqrt() }
    }

    /// `(R, R′)` for one draw.
    pub fn draw(&self, d: &ResampleDraw<T>, k: usize) -> ([T; 2], [T; 2]) {
        let r = axpy(d.kappa.sqrt(), &self.left, d.u, (T::one() - d.kappa).sqrt(), &self.right, d.u_prime);
        let l = T::from_count(d.l);
        let rest = T::from_count(k - 1 - d.l);
        let r_prime = axpy(l.sqrt(), &self.left, d.u_bar, rest.sqrt(), &self.right, d.u_bar_prime);
        (r, r_prime)
    }
}

/// `R = √κ σ̂₋ U + √(1−κ) σ̂₊ U′` and `R′ = √L σ̂₋ Ū + √(k−1−L) σ̂₊ Ū′`.
pub fn draw_r<T: Scalar>(spot: &SpotCovPair<T>, draw: &ResampleDraw<T>, k: usize) -> ([T; 2], [T; 2]) {
    assert!(k >= 1 && draw.l < k, "L must lie in 0..k");
    SpotRoots::of(spot).draw(draw, k)
}

/// One copy of `(D̂, Ĝ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopyValue<T> {
    pub d_hat: T,
    pub g_hat: T,
}

#[derive(Debug, Clone)]
struct PlanSite<T> {
    index: usize,
    x: [T; 2],
    roots: SpotRoots<T>,
}

/// Precomputed big-increment sites of one series, ready for copy generation.
#[derive(Debug, Clone)]
pub struct ResamplingPlan<T> {
    k: usize,
    sites: Vec<PlanSite<T>>,
}

impl<T: Scalar> ResamplingPlan<T> {
    pub fn new(series: &IncrementSeries<T>, window: &WindowSpec, trunc: &TruncationSpec<T>, k: usize) -> Result<Self> {
        Ok(Self::from_sites(&jump_sites(series, window, trunc)?, k))
    }

    pub fn from_sites(sites: &[JumpSite<T>], k: usize) -> Self {
        assert!(k >= 2, "coarsening factor k must be >= 2");
        let sites = sites
            .iter()
            .map(|s| PlanSite { index: s.index, x: s.increment, roots: SpotRoots::of(&s.spot) })
            .collect();
        Self { k, sites }
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Copy number `copy`, drawn from cells `(copy, i)` of `stream`.
    pub fn copy(&self, stream: &RngStream, copy: u64) -> CopyValue<T> {
        let two = T::lit(2.0);
        let mut d_hat = T::zero();
        let mut g_hat = T::zero();
        for site in &self.sites {
            let mut rng = stream.rng(copy, site.index as u64);
            let draw = ResampleDraw::<T>::sample(&mut rng, self.k);
            let (r, rp) = site.roots.draw(&draw, self.k);
            let [a, b] = site.x;
            let t1 = a * r[1];
            let t2 = b * r[0];
            d_hat = d_hat + t1 * t1 + t2 * t2;
            g_hat = g_hat + two * a * b * (a * rp[1] + b * rp[0]);
        }
        CopyValue { d_hat, g_hat }
    }

    /// Copies `0..n` in parallel, returned in copy order.
    pub fn copies(&self, stream: &RngStream, n: usize) -> Vec<CopyValue<T>> {
        (0..n as u64).into_par_iter().map(|c| self.copy(stream, c)).collect()
    }

    pub fn copy_set(&self, stream: &RngStream, n: usize) -> CopySet<T> {
        CopySet::from_copies(&self.copies(stream, n))
    }
}

/// One copy of `D̂ⁿ` for a series.
pub fn simulate_d_hat<T: Scalar>(
    series: &IncrementSeries<T>,
    window: &WindowSpec,
    trunc: &TruncationSpec<T>,
    k: usize,
    stream: &RngStream,
    copy: u64,
) -> Result<T> {
    Ok(ResamplingPlan::new(series, window, trunc, k)?.copy(stream, copy).d_hat)
}

/// One copy of `Ĝⁿ` for a series.
pub fn simulate_g_hat<T: Scalar>(
    series: &IncrementSeries<T>,
    window: &WindowSpec,
    trunc: &TruncationSpec<T>,
    k: usize,
    stream: &RngStream,
    copy: u64,
) -> Result<T> {
    Ok(ResamplingPlan::new(series, window, trunc, k)?.copy(stream, copy).g_hat)
}

/// Position (1-based, from the largest) of the order statistic used at `level`.
pub fn order_index(level: f64, n_draws: usize) -> usize {
    ((level * n_draws as f64).floor() as usize).clamp(1, n_draws.max(1))
}

pub fn check_draws(level: f64, n_draws: usize) -> Result<()> {
    if !(level > 0.0 && level < 1.0) || (n_draws as f64) * level < 1.0 {
        return Err(CojumpError::InsufficientDraws { n_draws, level });
    }
    Ok(())
}

/// Empirical upper quantile from a copy set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileEstimate<T> {
    pub level: f64,
    pub value: T,
    pub n_draws: usize,
    /// Copy values sorted in decreasing order, when retained.
    pub copies: Option<Vec<T>>,
}

/// `D̂` copies and `|Ĝ|` copies, each sorted in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct CopySet<T> {
    d_desc: Vec<T>,
    g_abs_desc: Vec<T>,
}

fn sort_desc<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| b.partial_cmp(a).expect("copy values are finite"));
    v
}

fn count_above<T: Scalar>(desc: &[T], x: T) -> usize {
    desc.partition_point(|&v| v > x)
}

impl<T: Scalar> CopySet<T> {
    pub fn from_copies(copies: &[CopyValue<T>]) -> Self {
        Self {
            d_desc: sort_desc(copies.iter().map(|c| c.d_hat).collect()),
            g_abs_desc: sort_desc(copies.iter().map(|c| c.g_hat.abs()).collect()),
        }
    }

    pub fn len(&self) -> usize {
        self.d_desc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_desc.is_empty()
    }

    /// `⌊αN⌋`-th largest `D̂`.
    pub fn quantile_d(&self, level: f64) -> Result<T> {
        check_draws(level, self.len())?;
        Ok(self.d_desc[order_index(level, self.len()) - 1])
    }

    /// `⌊αN⌋`-th largest `|Ĝ|`.
    pub fn quantile_g(&self, level: f64) -> Result<T> {
        check_draws(level, self.len())?;
        Ok(self.g_abs_desc[order_index(level, self.len()) - 1])
    }

    /// Number of copies with `D̂ > x`.
    pub fn d_exceeding(&self, x: T) -> usize {
        count_above(&self.d_desc, x)
    }

    /// Number of copies with `|Ĝ| > x`.
    pub fn g_exceeding(&self, x: T) -> usize {
        count_above(&self.g_abs_desc, x)
    }

    pub fn d_sorted(&self) -> &[T] {
        &self.d_desc
    }

    pub fn g_abs_sorted(&self) -> &[T] {
        &self.g_abs_desc
    }
}

fn quantile_from<T: Scalar>(desc: Vec<T>, level: f64) -> QuantileEstimate<T> {
    let n = desc.len();
    QuantileEstimate { level, value: desc[order_index(level, n) - 1], n_draws: n, copies: Some(desc) }
}

/// Absolute `α`-quantile of `N` copies of `Ĝⁿ`.
pub fn quantile_g<T: Scalar>(
    series: &IncrementSeries<T>,
    window: &WindowSpec,
    trunc: &TruncationSpec<T>,
    k: usize,
    level: f64,
    n_draws: usize,
    stream: &RngStream,
) -> Result<QuantileEstimate<T>> {
    check_draws(level, n_draws)?;
    let plan = ResamplingPlan::new(series, window, trunc, k)?;
    let g = plan.copies(stream, n_draws).into_iter().map(|c| c.g_hat.abs()).collect();
    Ok(quantile_from(sort_desc(g), level))
}

/// `α`-quantile of `N` copies of `D̂ⁿ`.
pub fn quantile_d<T: Scalar>(
    series: &IncrementSeries<T>,
    window: &WindowSpec,
    trunc: &TruncationSpec<T>,
    level: f64,
    n_draws: usize,
    stream: &RngStream,
) -> Result<QuantileEstimate<T>> {
    check_draws(level, n_draws)?;
    // D̂ does not involve L, so any k >= 2 gives the same copies
    let plan = ResamplingPlan::new(series, window, trunc, 2)?;
    let d = plan.copies(stream, n_draws).into_iter().map(|c| c.d_hat).collect();
    Ok(quantile_from(sort_desc(d), level))
}

/// `⌈1000/α⌉` copies.
pub fn default_draws(level: f64) -> usize {
    (1000.0 / level).ceil() as usize
}
