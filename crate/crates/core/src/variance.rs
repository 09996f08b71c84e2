//! Ratio-consistent estimation of `σ²_{n,k} = Var(T_n)` under the null.
//!
//! ```text
//! σ̂²_{n,k} = Σ_i 2(k−1)²/(n_i(n_i−1)) tr̂(WΣ_i)² + Σ_{i<l} 4/(n_i n_l) tr̂(WΣ_iWΣ_l)
//! ```
//!
//! The trace estimators are unbiased U-statistics. The `*_raw` functions
//! evaluate their permutation sums literally and exist as oracles; the
//! production path uses the equivalent centered forms, which only need the
//! W-Gram matrices of the centered observations.

use ndarray::{Array2, ArrayView2};
use serde::Serialize;

use crate::dense;
use crate::error::{check_dim, Error, Result};
use crate::pairs::PairMap;
use crate::sample::{self, GroupSummary, GroupedSample, MIN_GROUP_SIZE};
use crate::statistic;
use crate::weight::WeightSpec;

/// Largest group accepted by [`within_trace_raw`] (O(n⁴) enumeration).
pub const WITHIN_RAW_LIMIT: usize = 12;
/// Largest `n_i · n_l` accepted by [`cross_trace_raw`] (O(n_i² n_l²) enumeration).
pub const CROSS_RAW_LIMIT: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub sigma_hat_sq: f64,
    /// `tr̂(WΣ_i)²` per group.
    pub within_traces: Vec<f64>,
    /// `tr̂(WΣ_iWΣ_l)` per pair of groups.
    pub cross_traces: PairMap<f64>,
}

/// Unbiased estimate of `tr(WΣ_i)²` from centered rows `y_j = x_ij − x̄_i`:
///
/// ```text
/// − Σ_j Q_j² / ((n−2)(n−3)) + (Σ_j Q_j)² / (n(n−1)(n−2)(n−3)) + Σ_{j,m} (y_jᵀ W y_m)² / (n(n−3))
/// ```
///
/// with `Q_j = y_jᵀ W y_j` and the last sum over all index pairs.
pub fn within_trace_simplified(group: &GroupSummary, w: &WeightSpec) -> Result<f64> {
    let n = group.count();
    check_group_size(n)?;
    let f = w.factor_rows(group.centered.view())?;
    Ok(within_from_gram(f.gram(&f).view()))
}

pub(crate) fn within_from_gram(g: ArrayView2<f64>) -> f64 {
    let n = g.nrows() as f64;
    let diag = g.diag();
    let sum_q = diag.sum();
    let sum_q_sq = diag.dot(&diag);
    let sum_all_sq: f64 = g.iter().map(|v| v * v).sum();
    -sum_q_sq / ((n - 2.0) * (n - 3.0))
        + sum_q * sum_q / (n * (n - 1.0) * (n - 2.0) * (n - 3.0))
        + sum_all_sq / (n * (n - 3.0))
}

/// Unbiased estimate of `tr(WΣ_iWΣ_l)`, equal to `tr(W S_i W S_l)` with the
/// unbiased sample covariances `S_i = Σ_j y_ij y_ijᵀ / (n_i − 1)`:
///
/// ```text
/// Σ_j Σ_m (y_ijᵀ W y_lm)² / ((n_i−1)(n_l−1))
/// ```
pub fn cross_trace_simplified(g_i: &GroupSummary, g_l: &GroupSummary, w: &WeightSpec) -> Result<f64> {
    check_dim(g_i.centered.ncols(), g_l.centered.ncols())?;
    let fi = w.factor_rows(g_i.centered.view())?;
    let fl = w.factor_rows(g_l.centered.view())?;
    Ok(cross_from_gram(fi.gram(&fl).view()))
}

pub(crate) fn cross_from_gram(g: ArrayView2<f64>) -> f64 {
    let ni = g.nrows() as f64;
    let nl = g.ncols() as f64;
    let sum_sq: f64 = g.iter().map(|v| v * v).sum();
    sum_sq / ((ni - 1.0) * (nl - 1.0))
}

fn check_group_size(n: usize) -> Result<()> {
    if n < MIN_GROUP_SIZE {
        Err(Error::GroupTooSmall {
            group: 0,
            count: n,
            min: MIN_GROUP_SIZE,
        })
    } else {
        Ok(())
    }
}

/// `σ̂²_{n,k}` with its component traces. A non-positive result is reported
/// as [`Error::DegenerateVariance`], never clamped.
pub fn sigma_hat_sq(s: &GroupedSample, w: &WeightSpec) -> Result<VarianceEstimate> {
    let summaries = sample::summarize(s, w)?;
    sigma_hat_sq_from_summaries(&summaries, w)
}

pub fn sigma_hat_sq_from_summaries(summaries: &[GroupSummary], w: &WeightSpec) -> Result<VarianceEstimate> {
    let est = estimate_from_summaries(summaries, w)?;
    if est.sigma_hat_sq > 0.0 && est.sigma_hat_sq.is_finite() {
        Ok(est)
    } else {
        Err(Error::DegenerateVariance(est.sigma_hat_sq))
    }
}

/// Assembles the estimate without the positivity check.
pub(crate) fn estimate_from_summaries(summaries: &[GroupSummary], w: &WeightSpec) -> Result<VarianceEstimate> {
    let k = summaries.len();
    if k < 2 {
        return Err(Error::TooFewGroups { min: 2, found: k });
    }
    let factored = summaries
        .iter()
        .map(|g| {
            check_group_size(g.count())?;
            w.factor_rows(g.centered.view())
        })
        .collect::<Result<Vec<_>>>()?;
    let within_traces: Vec<f64> = factored.iter().map(|f| within_from_gram(f.gram(f).view())).collect();
    let cross_traces = PairMap::from_fn(k, |i, l| cross_from_gram(factored[i].gram(&factored[l]).view()));
    let counts: Vec<usize> = summaries.iter().map(GroupSummary::count).collect();
    let sigma_hat_sq = assemble(&within_traces, &cross_traces, &counts);
    Ok(VarianceEstimate {
        sigma_hat_sq,
        within_traces,
        cross_traces,
    })
}

pub(crate) fn assemble(within: &[f64], cross: &PairMap<f64>, counts: &[usize]) -> f64 {
    let km1 = within.len() as f64 - 1.0;
    let w: f64 = within
        .iter()
        .zip(counts)
        .map(|(t, &n)| {
            let n = n as f64;
            2.0 * km1 * km1 / (n * (n - 1.0)) * t
        })
        .sum();
    let c: f64 = cross
        .iter()
        .map(|(i, l, t)| 4.0 / (counts[i] * counts[l]) as f64 * t)
        .sum();
    w + c
}

/// `σ²_{n,k}` from known covariances (dense, guarded by [`dense::DENSE_LIMIT`]).
pub fn sigma_sq_plugin(covs: &[Array2<f64>], counts: &[usize], w: &WeightSpec) -> Result<f64> {
    check_dim(covs.len(), counts.len())?;
    if let Some(i) = counts.iter().position(|&n| n < 2) {
        return Err(Error::GroupTooSmall {
            group: i + 1,
            count: counts[i],
            min: 2,
        });
    }
    let wc = dense::weighted_covariances(covs, w)?;
    Ok(statistic::null_variance(&wc, counts))
}

fn raw_gram(a: ArrayView2<f64>, b: ArrayView2<f64>, w: &WeightSpec) -> Array2<f64> {
    Array2::from_shape_fn((a.nrows(), b.nrows()), |(j, m)| {
        w.quad_form_unchecked(a.row(j), b.row(m))
    })
}

fn falling(n: usize, r: usize) -> f64 {
    (0..r).map(|i| (n - i) as f64).product()
}

/// Literal permutation-sum estimator of `tr(WΣ_i)²` over raw (uncentered) rows:
///
/// ```text
/// 1/P²_n Σ_{j1≠j2} a_{12} a_{21} − 2/P³_n Σ_{j1≠j2≠j3} a_{12} a_{31} + 1/P⁴_n Σ_{j1≠j2≠j3≠j4} a_{12} a_{34}
/// ```
///
/// with `a_{jm} = x_jᵀ W x_m` and all indices in a tuple pairwise distinct.
pub fn within_trace_raw(data: ArrayView2<f64>, w: &WeightSpec) -> Result<f64> {
    check_dim(w.dim(), data.ncols())?;
    let n = data.nrows();
    check_group_size(n)?;
    if n > WITHIN_RAW_LIMIT {
        return Err(Error::GuardExceeded {
            what: "raw within-group trace sample",
            size: n,
            limit: WITHIN_RAW_LIMIT,
        });
    }
    let a = raw_gram(data, data, w);
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for j1 in 0..n {
        for j2 in (0..n).filter(|&j| j != j1) {
            s2 += a[[j1, j2]] * a[[j2, j1]];
            for j3 in (0..n).filter(|&j| j != j1 && j != j2) {
                s3 += a[[j1, j2]] * a[[j3, j1]];
                for j4 in (0..n).filter(|&j| j != j1 && j != j2 && j != j3) {
                    s4 += a[[j1, j2]] * a[[j3, j4]];
                }
            }
        }
    }
    Ok(s2 / falling(n, 2) - 2.0 * s3 / falling(n, 3) + s4 / falling(n, 4))
}

/// Literal estimator of `tr(WΣ_iWΣ_l)` over raw rows, with `a_{jm} = x_ijᵀ W x_lm`:
///
/// ```text
/// Σ a_{j1 j2}² / (n_i n_l)
///  − Σ_{j1≠j3} Σ_{j2} a_{j3 j2} a_{j1 j2} / (n_i n_l (n_i−1))
///  − Σ_{j2≠j4} Σ_{j1} a_{j1 j4} a_{j1 j2} / (n_i n_l (n_l−1))
///  + Σ_{j1≠j3} Σ_{j2≠j4} a_{j1 j2} a_{j3 j4} / (n_i n_l (n_i−1)(n_l−1))
/// ```
pub fn cross_trace_raw(data_i: ArrayView2<f64>, data_l: ArrayView2<f64>, w: &WeightSpec) -> Result<f64> {
    check_dim(w.dim(), data_i.ncols())?;
    check_dim(w.dim(), data_l.ncols())?;
    let (ni, nl) = (data_i.nrows(), data_l.nrows());
    if ni < 2 || nl < 2 {
        return Err(Error::GroupTooSmall {
            group: if ni < 2 { 1 } else { 2 },
            count: ni.min(nl),
            min: 2,
        });
    }
    if ni * nl > CROSS_RAW_LIMIT {
        return Err(Error::GuardExceeded {
            what: "raw cross-group trace sample",
            size: ni * nl,
            limit: CROSS_RAW_LIMIT,
        });
    }
    let a = raw_gram(data_i, data_l, w);
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    for j1 in 0..ni {
        for j2 in 0..nl {
            s1 += a[[j1, j2]] * a[[j1, j2]];
            for j3 in (0..ni).filter(|&j| j != j1) {
                s2 += a[[j3, j2]] * a[[j1, j2]];
                for j4 in (0..nl).filter(|&j| j != j2) {
                    s4 += a[[j1, j2]] * a[[j3, j4]];
                }
            }
            for j4 in (0..nl).filter(|&j| j != j2) {
                s3 += a[[j1, j4]] * a[[j1, j2]];
            }
        }
    }
    let (fi, fl) = (ni as f64, nl as f64);
    Ok(
        s1 / (fi * fl) - s2 / (fi * fl * (fi - 1.0)) - s3 / (fi * fl * (fl - 1.0))
            + s4 / (fi * fl * (fi - 1.0) * (fl - 1.0)),
    )
}
