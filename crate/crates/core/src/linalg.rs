//! Minimal dense linear algebra for the low-dimensional fitters.
//!
//! The nuisance regressions solve normal equations of size at most
//! `2d + 2`, so a pivoted Gaussian elimination is all we need.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `a x = b` in place via Gaussian elimination with partial pivoting.
///
/// `a` is row-major and consumed. Fails on (numerically) singular systems.
pub(crate) fn solve<F: Scalar>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Result<Vec<F>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("pivot comparison on finite values")
            })
            .expect("nonempty pivot range");
        if a[pivot][col].abs() < F::real(1e-300) {
            return Err(Error::Degenerate(
                "singular linear system in fitter".to_string(),
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == F::zero() {
                continue;
            }
            for k in col..n {
                let upd = a[col][k] * factor;
                a[row][k] = a[row][k] - upd;
            }
            let upd = b[col] * factor;
            b[row] = b[row] - upd;
        }
    }
    let mut x = vec![F::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Symmetric rank-one accumulation `m += w * u u^T` on a row-major matrix.
pub(crate) fn add_outer<F: Scalar>(m: &mut [Vec<F>], u: &[F], w: F) {
    for (i, &ui) in u.iter().enumerate() {
        let wi = w * ui;
        for (j, &uj) in u.iter().enumerate() {
            m[i][j] += wi * uj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(a, vec![5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular_system() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(a, vec![1.0, 2.0]).is_err());
    }
}
