//! Univariate jump screening used to select days on which both components jump,
//! plus the bipower-calibrated truncation used on real data.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{CojumpError, Result};
use crate::estimators::TruncationSpec;
use crate::num::Scalar;
use crate::series::IncrementSeries;

/// `(π/2) Σ_{i≥2} |Δ_i x| |Δ_{i−1} x|` for component `1` or `2`.
pub fn bipower_variation<T: Scalar>(series: &IncrementSeries<T>, component: usize) -> Result<T> {
    let m = component_index(component)?;
    let x = series.increments();
    if x.len() < 2 {
        return Err(CojumpError::InsufficientData { needed: 2, have: x.len() });
    }
    let s: T = x.windows(2).map(|w| w[0][m].abs() * w[1][m].abs()).sum();
    Ok(T::FRAC_PI_2() * s)
}

fn component_index(component: usize) -> Result<usize> {
    match component {
        1 | 2 => Ok(component - 1),
        _ => Err(CojumpError::InvalidParameter(format!("component must be 1 or 2, got {component}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpScreen {
    Jump,
    NoJump,
}

/// Log-ratio of realized variance to bipower variation, studentized with
/// quad-power quarticity. `None` when the component has no variation.
pub fn log_ratio_statistic<T: Scalar>(series: &IncrementSeries<T>, component: usize) -> Result<Option<f64>> {
    let m = component_index(component)?;
    let x: Vec<f64> = series.increments().iter().map(|v| v[m].as_f64()).collect();
    let n = x.len();
    if n < 4 {
        return Err(CojumpError::InsufficientData { needed: 4, have: n });
    }
    let delta = series.delta().as_f64();
    let horizon = delta * n as f64;
    let rv: f64 = x.iter().map(|v| v * v).sum();
    let bv = bipower_variation(series, component)?.as_f64();
    if rv == 0.0 || bv == 0.0 {
        return Ok(None);
    }
    let mu1_inv4 = (std::f64::consts::PI / 2.0).powi(2);
    let qp_sum: f64 = x.windows(4).map(|w| (w[0] * w[1] * w[2] * w[3]).abs()).sum();
    let qp = mu1_inv4 * qp_sum * n as f64 / ((n - 3) as f64 * delta);
    // asymptotic variance constant of the bipower/realized-variance ratio: π²/4 + π − 5
    let theta = std::f64::consts::PI.powi(2) / 4.0 + std::f64::consts::PI - 5.0;
    let var = theta * delta * (1.0 / horizon).max(qp / (bv * bv));
    Ok(Some((rv.ln() - bv.ln()) / var.sqrt()))
}

/// One-sided test of "no jump in this component" at `level`.
pub fn univariate_jump_prefilter<T: Scalar>(series: &IncrementSeries<T>, component: usize, level: f64) -> Result<JumpScreen> {
    if !(level > 0.0 && level < 1.0) {
        return Err(CojumpError::InvalidParameter(format!("level must lie in (0,1), got {level}")));
    }
    let Some(z) = log_ratio_statistic(series, component)? else {
        return Ok(JumpScreen::NoJump);
    };
    let crit = Normal::standard().inverse_cdf(1.0 - level);
    Ok(if z > crit { JumpScreen::Jump } else { JumpScreen::NoJump })
}

/// Per-component truncation `mult · √(BV_j / T) · Δ^ϖ`.
pub fn bipower_truncation<T: Scalar>(series: &IncrementSeries<T>, mult: T, varpi: T) -> Result<TruncationSpec<T>> {
    let horizon = series.grid().horizon();
    let bv1 = bipower_variation(series, 1)?;
    let bv2 = bipower_variation(series, 2)?;
    if bv1 == T::zero() || bv2 == T::zero() {
        return Err(CojumpError::DenominatorZero("bipower variation vanishes for a component"));
    }
    TruncationSpec::per_component(mult * (bv1 / horizon).sqrt(), mult * (bv2 / horizon).sqrt(), varpi)
}
