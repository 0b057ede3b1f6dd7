//! Scalar abstractions.
//!
//! The Lie-algebra layer only needs field arithmetic and works over exact
//! rationals as well as floats; everything that integrates or takes
//! exponentials needs a real field with transcendental functions.

use std::fmt::Debug;
use std::ops::Neg;

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, Num};

/// Coefficient field of a Lie algebra: `f32`, `f64`, or an exact rational.
pub trait LieScalar:
    Clone + Num + Neg<Output = Self> + FromPrimitive + PartialOrd + Debug + Send + Sync + 'static
{
}

impl<T> LieScalar for T where
    T: Clone + Num + Neg<Output = Self> + FromPrimitive + PartialOrd + Debug + Send + Sync + 'static
{
}

/// Floating-point scalar used by every quadrature-based module.
pub trait Real: RealField + LieScalar + Copy {}

impl<T> Real for T where T: RealField + LieScalar + Copy {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Lossy conversion back to `f64`, for reports and serialization.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

/// `(2π)^{-n}`, the normalization carried by every integral over the dual space.
#[inline]
pub fn dual_factor<T: Real>(n: usize) -> T {
    let two_pi = T::two_pi();
    let mut f = T::one();
    for _ in 0..n {
        f /= two_pi;
    }
    f
}

/// Euclidean dot product of two coordinate slices.
#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Pairwise (cascade) summation. Reduction order is fixed by the slice
/// layout, which keeps every quadrature deterministic.
pub fn pairwise_sum<T: Real>(v: &[Complex<T>]) -> Complex<T> {
    const BLOCK: usize = 16;
    if v.len() <= BLOCK {
        return v.iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Real-valued variant of [`pairwise_sum`].
pub fn pairwise_sum_real<T: Real>(v: &[T]) -> T {
    const BLOCK: usize = 16;
    if v.len() <= BLOCK {
        return v.iter().fold(T::zero(), |a, b| a + *b);
    }
    let mid = v.len() / 2;
    pairwise_sum_real(&v[..mid]) + pairwise_sum_real(&v[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_sum() {
        let v: Vec<Complex<f64>> = (0..1000)
            .map(|k| Complex::new(k as f64 * 0.5, -(k as f64)))
            .collect();
        let s = pairwise_sum(&v);
        assert!((s.re - 249_750.0).abs() < 1e-9);
        assert!((s.im + 499_500.0).abs() < 1e-9);
    }

    #[test]
    fn dual_factor_is_inverse_two_pi_power() {
        let f: f64 = dual_factor(2);
        assert!((f - 1.0 / (4.0 * std::f64::consts::PI.powi(2))).abs() < 1e-16);
    }
}
