//! Power variations and the two raw ratio statistics.
//!
//! `V(h, kΔ)` sums a test function over block increments of `k` consecutive
//! fine increments; a trailing partial block is dropped. The joint-jump
//! statistic compares the product-square variation at two scales, the
//! disjoint-jump statistic normalizes it by the two quartic variations.

use serde::{Deserialize, Serialize};

use crate::error::{CojumpError, Result};
use crate::num::Scalar;
use crate::series::IncrementSeries;

/// The three test functions on `R²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestFunction {
    /// `x ↦ (x₁x₂)²`
    ProdSq,
    /// `x ↦ x₁⁴`
    G1Quartic,
    /// `x ↦ x₂⁴`
    G2Quartic,
}

impl TestFunction {
    #[inline]
    pub fn eval<T: Scalar>(self, x: [T; 2]) -> T {
        match self {
            TestFunction::ProdSq => {
                let p = x[0] * x[1];
                p * p
            }
            TestFunction::G1Quartic => x[0].powi(4),
            TestFunction::G2Quartic => x[1].powi(4),
        }
    }
}

/// `V(h, kΔ)_T`: sum of `h` over the `⌊n/k⌋` complete blocks of `k` increments.
pub fn realized_functional<T: Scalar>(series: &IncrementSeries<T>, f: TestFunction, k: usize) -> T {
    assert!(k >= 1, "block size must be at least 1");
    series
        .increments()
        .chunks_exact(k)
        .map(|block| {
            let sum = block.iter().fold([T::zero(); 2], |acc, x| [acc[0] + x[0], acc[1] + x[1]]);
            f.eval(sum)
        })
        .sum()
}

/// `Φ⁽ʲ⁾ = V(f, kΔ) / V(f, Δ)`; tends to 1 under common jumps.
pub fn phi_joint<T: Scalar>(series: &IncrementSeries<T>, k: usize) -> Result<T> {
    if k < 2 {
        return Err(CojumpError::InvalidParameter(format!("coarsening factor k must be >= 2, got {k}")));
    }
    let fine = realized_functional(series, TestFunction::ProdSq, 1);
    if fine == T::zero() {
        return Err(CojumpError::DenominatorZero("V(f, Δ) = 0: no product-square variation at the fine scale"));
    }
    Ok(realized_functional(series, TestFunction::ProdSq, k) / fine)
}

/// `Φ⁽ᵈ⁾ = V(f, Δ) / √(V(g₁, Δ) V(g₂, Δ))`; lies in `[0, 1]` and tends to 0 under disjoint jumps.
pub fn phi_disjoint<T: Scalar>(series: &IncrementSeries<T>) -> Result<T> {
    let g1 = realized_functional(series, TestFunction::G1Quartic, 1);
    let g2 = realized_functional(series, TestFunction::G2Quartic, 1);
    let denom = (g1 * g2).sqrt();
    if denom == T::zero() {
        return Err(CojumpError::DenominatorZero("V(g1, Δ) V(g2, Δ) = 0: a component has no variation"));
    }
    Ok(realized_functional(series, TestFunction::ProdSq, 1) / denom)
}
