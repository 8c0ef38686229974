//! Floating-point abstraction for the estimation code.
//!
//! Everything numeric in this crate is generic over [`Scalar`], which is
//! `f32` or `f64` in practice. Special functions are evaluated in `f64`
//! internally (the `f32` instance rounds the result), so both instances
//! agree to `f32` precision.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Scalar type the estimators are generic over.
pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal or intermediate.
    fn real(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to Scalar")
    }

    /// Lossy conversion to `f64`.
    fn to_real(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }

    /// Error function.
    fn erf(self) -> Self {
        Self::real(statrs::function::erf::erf(self.to_real()))
    }

    /// Standard normal cumulative distribution function.
    fn norm_cdf(self) -> Self {
        let z = self.to_real();
        Self::real(0.5 * (1.0 + statrs::function::erf::erf(z / std::f64::consts::SQRT_2)))
    }

    /// Natural log of the gamma function.
    fn ln_gamma(self) -> Self {
        Self::real(statrs::function::gamma::ln_gamma(self.to_real()))
    }

    /// Digamma function (derivative of `ln_gamma`).
    fn digamma(self) -> Self {
        Self::real(statrs::function::gamma::digamma(self.to_real()))
    }

    /// Trigamma function (second derivative of `ln_gamma`).
    fn trigamma(self) -> Self {
        Self::real(trigamma(self.to_real()))
    }

    /// Regularized incomplete beta function I_x(a, b).
    fn beta_reg(a: Self, b: Self, x: Self) -> Self {
        Self::real(statrs::function::beta::beta_reg(
            a.to_real(),
            b.to_real(),
            x.to_real(),
        ))
    }

    /// Logistic function exp(x)/(1+exp(x)), computed without overflow.
    fn expit(self) -> Self {
        let half = Self::real(0.5);
        if self >= Self::zero() {
            Self::one() / (Self::one() + (-self).exp())
        } else {
            let e = self.exp();
            e / (Self::one() + e)
        }
        .min(Self::one() - Self::epsilon() * half)
        .max(Self::epsilon() * half)
    }
}

impl Scalar for f64 {}
impl Scalar for f32 {}

/// Shorthand for `F::real` that reads well at call sites.
pub fn real<F: Scalar>(v: f64) -> F {
    F::real(v)
}

/// Trigamma via the shift recurrence and the asymptotic series.
fn trigamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "trigamma domain is x > 0");
    let mut x = x;
    let mut acc = 0.0;
    while x < 6.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv
        * (1.0
            + inv
                * (0.5
                    + inv
                        * (1.0 / 6.0
                            - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_cdf_reference_points() {
        assert!((0.5f64.norm_cdf() - 0.691462461274013).abs() < 1e-12);
        assert!((0.0f64.norm_cdf() - 0.5).abs() < 1e-15);
        assert!(((-1.0f64).norm_cdf() - 0.158655253931457).abs() < 1e-12);
    }

    #[test]
    fn trigamma_reference_points() {
        // pi^2/6 at 1, pi^2/2 - 4 at 1/2 would need reflection; stick to x >= 1.
        assert!((trigamma(1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
        assert!((trigamma(2.0) - (std::f64::consts::PI.powi(2) / 6.0 - 1.0)).abs() < 1e-10);
        assert!((trigamma(10.0) - 0.105166335681686).abs() < 1e-10);
    }

    #[test]
    fn expit_is_bounded_and_monotone() {
        assert!(1000.0f64.expit() < 1.0);
        assert!((-1000.0f64).expit() > 0.0);
        assert!((0.0f64.expit() - 0.5).abs() < 1e-15);
        assert!(1.0f64.expit() > 0.5f64.expit());
    }

    #[test]
    fn f32_instance_tracks_f64() {
        let a: f32 = 0.7f32.norm_cdf();
        let b = 0.7f64.norm_cdf();
        assert!((a as f64 - b).abs() < 1e-6);
    }
}
