//! Dense linear-algebra helpers for known-parameter (plug-in) computations.
//!
//! These paths allocate `p × p` matrices and are guarded by [`DENSE_LIMIT`].

use ndarray::{Array2, ArrayView2};

use crate::error::{check_dim, Error, Result};
use crate::weight::WeightSpec;

/// Largest dimension accepted by dense plug-in computations.
pub const DENSE_LIMIT: usize = 2000;

pub(crate) fn guard(p: usize) -> Result<()> {
    if p > DENSE_LIMIT {
        Err(Error::GuardExceeded {
            what: "dense covariance computation",
            size: p,
            limit: DENSE_LIMIT,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn check_square(m: ArrayView2<f64>, p: usize) -> Result<()> {
    check_dim(p, m.nrows())?;
    check_dim(p, m.ncols())
}

/// Lower-triangular `L` with `L Lᵀ = a`.
pub fn cholesky(a: ArrayView2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    check_dim(n, a.ncols())?;
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = a[[j, j]];
        for m in 0..j {
            d -= l[[j, m]] * l[[j, m]];
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[[j, j]] = d;
        for i in j + 1..n {
            let mut v = a[[i, j]];
            for m in 0..j {
                v -= l[[i, m]] * l[[j, m]];
            }
            l[[i, j]] = v / d;
        }
    }
    Ok(l)
}

/// `tr(A B) = Σ_{ab} A[a,b] B[b,a]` in O(p²).
pub fn trace_of_product(a: ArrayView2<f64>, b: ArrayView2<f64>) -> f64 {
    a.iter().zip(b.t().iter()).map(|(x, y)| x * y).sum()
}

/// `W Σ_i` for each covariance, after validating shapes and the dense guard.
pub(crate) fn weighted_covariances(covs: &[Array2<f64>], w: &WeightSpec) -> Result<Vec<Array2<f64>>> {
    let p = w.dim();
    guard(p)?;
    covs.iter()
        .map(|c| {
            check_square(c.view(), p)?;
            w.apply_matrix(c.view())
        })
        .collect()
}

/// `0.5^{|i-j|}`-type first-order autoregressive correlation matrix.
pub fn ar1_matrix(p: usize, phi: f64) -> Array2<f64> {
    Array2::from_shape_fn((p, p), |(i, j)| phi.powi(i.abs_diff(j) as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn cholesky_two_by_two() {
        let l = cholesky(array![[1.0, 0.5], [0.5, 1.0]].view()).unwrap();
        assert_eq!(l[[0, 0]], 1.0);
        assert_eq!(l[[0, 1]], 0.0);
        assert!((l[[1, 0]] - 0.5).abs() < 1e-15);
        assert!((l[[1, 1]] - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let err = cholesky(array![[1.0, 2.0], [2.0, 1.0]].view()).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { pivot: 1, .. }));
    }

    #[test]
    fn trace_of_product_matches_dot() {
        let a = array![[1.0, 2.0], [3.0, 4.0]];
        let b = array![[0.5, -1.0], [2.0, 1.0]];
        let direct = a.dot(&b).diag().sum();
        assert!((trace_of_product(a.view(), b.view()) - direct).abs() < 1e-14);
    }
}
