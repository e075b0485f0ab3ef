//! Closed-form algebra on symmetric 2×2 matrices.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::num::Scalar;

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

/// Eigenpairs of a [`Sym2`], largest eigenvalue first. Eigenvectors are unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2<T> {
    pub values: [T; 2],
    pub vectors: [[T; 2]; 2],
}

impl<T: Scalar> Sym2<T> {
    pub fn new(xx: T, xy: T, yy: T) -> Self {
        Self { xx, xy, yy }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::one())
    }

    pub fn diag(a: T, b: T) -> Self {
        Self::new(a, T::zero(), b)
    }

    /// `x xᵀ`.
    pub fn outer(x: [T; 2]) -> Self {
        Self::new(x[0] * x[0], x[0] * x[1], x[1] * x[1])
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.xx * s, self.xy * s, self.yy * s)
    }

    pub fn mul_vec(&self, v: [T; 2]) -> [T; 2] {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    /// `S Sᵀ` (equals `S²` for symmetric `S`).
    pub fn gram(&self) -> Self {
        Self::new(
            self.xx * self.xx + self.xy * self.xy,
            self.xy * (self.xx + self.yy),
            self.xy * self.xy + self.yy * self.yy,
        )
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: [T; 2]) -> T {
        self.xx * v[0] * v[0] + (self.xy + self.xy) * v[0] * v[1] + self.yy * v[1] * v[1]
    }

    pub fn trace(&self) -> T {
        self.xx + self.yy
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.xx - other.xx).abs().max((self.xy - other.xy).abs()).max((self.yy - other.yy).abs())
    }

    pub fn eigen(&self) -> Eigen2<T> {
        let two = T::lit(2.0);
        let mean = (self.xx + self.yy) / two;
        let half_gap = (self.xx - self.yy) / two;
        let radius = half_gap.hypot(self.xy);
        if radius == T::zero() {
            return Eigen2 { values: [mean, mean], vectors: [[T::one(), T::zero()], [T::zero(), T::one()]] };
        }
        let theta = (self.xy + self.xy).atan2(self.xx - self.yy) / two;
        let (s, c) = theta.sin_cos();
        Eigen2 { values: [mean + radius, mean - radius], vectors: [[c, s], [-s, c]] }
    }

    fn spectral_map(&self, map: impl Fn(T) -> T) -> Self {
        let e = self.eigen();
        let mut out = Self::zero();
        for (lambda, v) in e.values.iter().zip(e.vectors.iter()) {
            let w = map(*lambda);
            out.xx = out.xx + w * v[0] * v[0];
            out.xy = out.xy + w * v[0] * v[1];
            out.yy = out.yy + w * v[1] * v[1];
        }
        out
    }

    /// Projection onto the PSD cone: negative eigenvalues clamped to zero.
    pub fn psd_project(&self) -> Self {
        self.spectral_map(|l| l.max(T::zero()))
    }

    /// Symmetric PSD square root of [`Self::psd_project`].
    pub fn psd_sqrt(&self) -> Self {
        self.spectral_map(|l| l.max(T::zero()).sqrt())
    }
}

impl<T: Scalar> Add for Sym2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl<T: Scalar> Mul<T> for Sym2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// Symmetric PSD square root, the root used by the resampler.
pub fn psd_sqrt<T: Scalar>(c: &Sym2<T>) -> Sym2<T> {
    c.psd_sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sqrt_examples() {
        assert_eq!(psd_sqrt(&Sym2::<f64>::identity()), Sym2::identity());
        let s = psd_sqrt(&Sym2::diag(4.0_f64, 9.0));
        assert!(s.max_abs_diff(&Sym2::diag(2.0, 3.0)) < 1e-15);
    }

    #[test]
    fn indefinite_input_is_projected() {
        // eigenvalues 2.2 and -0.2 along (1,1)/√2 and (1,-1)/√2; projection keeps 2.2 · ½[[1,1],[1,1]]
        let c = Sym2::new(1.0_f64, 1.2, 1.0);
        let expected = Sym2::new(1.1, 1.1, 1.1);
        assert!(c.psd_project().max_abs_diff(&expected) < 1e-14);
        assert!(psd_sqrt(&c).gram().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn zero_matrix_root_is_zero() {
        assert_eq!(psd_sqrt(&Sym2::<f64>::zero()), Sym2::zero());
    }

    /// Eigenvalues from the characteristic polynomial, independent of `eigen()`.
    fn char_poly_eigs(c: &Sym2<f64>) -> (f64, f64) {
        let tr = c.xx + c.yy;
        let det = c.xx * c.yy - c.xy * c.xy;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        (tr / 2.0 + disc, tr / 2.0 - disc)
    }

    proptest! {
        #[test]
        fn sqrt_squares_to_projection(a in -5.0..5.0_f64, b in -5.0..5.0_f64, d in -5.0..5.0_f64) {
            let c = Sym2::new(a, b, d);
            let s = psd_sqrt(&c);
            prop_assert!(s.gram().max_abs_diff(&c.psd_project()) <= 1e-10);
            // projection spectrum is the clamped spectrum
            let (l1, l2) = char_poly_eigs(&c);
            let (p1, p2) = char_poly_eigs(&c.psd_project());
            prop_assert!((p1 - l1.max(0.0)).abs() < 1e-7);
            prop_assert!((p2 - l2.max(0.0)).abs() < 1e-7);
        }

        #[test]
        fn psd_input_is_fixed_by_projection(x in -3.0..3.0_f64, y in -3.0..3.0_f64, z in -3.0..3.0_f64, w in -3.0..3.0_f64) {
            let c = Sym2::outer([x, y]) + Sym2::outer([z, w]);
            prop_assert!(c.psd_project().max_abs_diff(&c) <= 1e-12 * (1.0 + c.trace()));
        }
    }
}
