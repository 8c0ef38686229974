//! Piecewise-linear smoothing of integer-supported survival functions
//! and the quantiles it induces.
//!
//! A step survival function on support v_1 < ... < v_l is interpolated
//! linearly between adjacent support points, anchored at 1 on v_0 = v_1 - 1
//! and at 0 on v_l. This makes the survival continuous in q and the
//! quantile continuous in the level, which is what the search driver and
//! the discrete estimators rely on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// A survival function with all mass on integers.
///
/// `survival[k] = P(Y > support[k])`; the last entry must be 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSurvival<F> {
    support: Vec<i64>,
    survival: Vec<F>,
}

impl<F: Scalar> DiscreteSurvival<F> {
    pub fn new(support: Vec<i64>, survival: Vec<F>) -> Result<Self> {
        if support.is_empty() || support.len() != survival.len() {
            return Err(Error::InvalidArgument(
                "support and survival must be nonempty and equal-length".to_string(),
            ));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "support must be strictly increasing".to_string(),
            ));
        }
        let mut survival = survival;
        let last = *survival.last().expect("nonempty");
        if last.abs() > real(1e-12) {
            return Err(Error::InvalidArgument(format!(
                "survival at the top of the support must be 0, got {last}"
            )));
        }
        *survival.last_mut().expect("nonempty") = F::zero();
        let mut prev = F::one();
        for &s in &survival {
            if !(F::zero() <= s && s <= prev) {
                return Err(Error::InvalidArgument(
                    "survival values must be nonincreasing within [0, 1]".to_string(),
                ));
            }
            prev = s;
        }
        Ok(Self { support, survival })
    }

    /// Empirical survival of an integer sample.
    pub fn from_sample(values: &[i64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("empty sample".to_string()));
        }
        let mut support = values.to_vec();
        support.sort_unstable();
        support.dedup();
        let n = real::<F>(values.len() as f64);
        let survival = support
            .iter()
            .map(|&v| real::<F>(values.iter().filter(|&&y| y > v).count() as f64) / n)
            .collect();
        Self::new(support, survival)
    }

    /// Distribution from point masses (need not sum exactly to one;
    /// they are normalized).
    pub fn from_masses(support: Vec<i64>, masses: Vec<F>) -> Result<Self> {
        if masses.iter().any(|&m| m < F::zero()) {
            return Err(Error::InvalidArgument("masses must be nonnegative".to_string()));
        }
        let total: F = masses.iter().copied().sum();
        if !(total > F::zero()) {
            return Err(Error::InvalidArgument("total mass must be positive".to_string()));
        }
        let mut tail = F::zero();
        let mut survival = vec![F::zero(); masses.len()];
        for k in (0..masses.len()).rev() {
            survival[k] = tail / total;
            tail += masses[k];
        }
        Self::new(support, survival)
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn survival(&self) -> &[F] {
        &self.survival
    }

    /// v_0 = v_1 - 1, the anchor point where the smoothed survival is 1.
    pub fn v0(&self) -> i64 {
        self.support[0] - 1
    }

    /// Point masses implied by the survival values.
    pub fn masses(&self) -> Vec<F> {
        let mut prev = F::one();
        self.survival
            .iter()
            .map(|&s| {
                let m = prev - s;
                prev = s;
                m
            })
            .collect()
    }

    pub fn mean(&self) -> F {
        self.support
            .iter()
            .zip(self.masses())
            .map(|(&v, m)| real::<F>(v as f64) * m)
            .sum()
    }

    /// The original step survival: right-continuous, jumps at support points.
    pub fn hard_eval(&self, q: F) -> F {
        let mut value = F::one();
        for (&v, &s) in self.support.iter().zip(&self.survival) {
            if q >= real(v as f64) {
                value = s;
            } else {
                break;
            }
        }
        value
    }

    /// The smoothed survival: 1 below v_0, 0 above v_l, the step values at
    /// support points, linear in between.
    pub fn smoothed_eval(&self, q: F) -> F {
        let v0 = real::<F>(self.v0() as f64);
        if q <= v0 {
            return F::one();
        }
        let top = real::<F>(*self.support.last().expect("nonempty") as f64);
        if q >= top {
            return F::zero();
        }
        // First support point at or above q; q < top keeps it in range.
        let idx = self.support.partition_point(|&v| real::<F>(v as f64) < q);
        let right_knot = real::<F>(self.support[idx] as f64);
        let right_val = self.survival[idx];
        if q == right_knot {
            return right_val;
        }
        let (left_knot, left_val) = if idx == 0 {
            (v0, F::one())
        } else {
            (real(self.support[idx - 1] as f64), self.survival[idx - 1])
        };
        let lambda = (right_knot - q) / (right_knot - left_knot);
        lambda * left_val + (F::one() - lambda) * right_val
    }

    /// Quantile of the smoothed survival at level tau in (0, 1).
    ///
    /// Computed by inverting the crossing segment. A segment flat at
    /// exactly 1 - tau resolves to its right endpoint.
    pub fn smoothed_quantile(&self, tau: F) -> Result<F> {
        check_tau(tau)?;
        let level = F::one() - tau;
        // Knots: (v0, 1), (v_1, s_1), ..., (v_l, 0).
        let knot = |j: usize| -> (F, F) {
            if j == 0 {
                (real(self.v0() as f64), F::one())
            } else {
                (real(self.support[j - 1] as f64), self.survival[j - 1])
            }
        };
        for j in 1..=self.support.len() {
            let (qr, wr) = knot(j);
            if wr < level {
                let (ql, wl) = knot(j - 1);
                if wl <= level {
                    return Ok(ql);
                }
                return Ok(ql + (wl - level) / (wl - wr) * (qr - ql));
            }
        }
        // level <= 0 cannot happen for tau < 1; the top knot has value 0 < level.
        unreachable!("smoothed survival reaches 0 at the top of the support")
    }

    /// Quantile of the original step survival: sup{q : S(q) > 1 - tau},
    /// always a support value.
    pub fn hard_quantile(&self, tau: F) -> Result<i64> {
        check_tau(tau)?;
        let level = F::one() - tau;
        for (&v, &s) in self.support.iter().zip(&self.survival) {
            if s <= level {
                return Ok(v);
            }
        }
        unreachable!("survival reaches 0 at the top of the support")
    }
}

fn check_tau<F: Scalar>(tau: F) -> Result<()> {
    if !(F::zero() < tau && tau < F::one()) {
        return Err(Error::InvalidArgument(format!(
            "quantile level must be in (0, 1), got {tau}"
        )));
    }
    Ok(())
}
