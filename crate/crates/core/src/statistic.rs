//! The weighted L2-norm statistic `T_n`.
//!
//! `T_n` is the pure U-statistic
//!
//! ```text
//! T_n = (k−1) Σ_i 1/(n_i(n_i−1)) Σ_{j≠m} x_ijᵀ W x_im
//!       − Σ_{i<l} 2/(n_i n_l) Σ_j Σ_m x_ijᵀ W x_lm
//! ```
//!
//! whose expectation is `Σ_{i<l} (μ_i − μ_l)ᵀ W (μ_i − μ_l)`.

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::dense::{self, trace_of_product};
use crate::error::{check_dim, Error, Result};
use crate::pairs::PairMap;
use crate::sample::{self, GroupSummary, GroupedSample};
use crate::weight::WeightSpec;

/// Largest total sample size accepted by [`compute_tn_naive`].
pub const NAIVE_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatisticValue {
    pub t_n: f64,
    /// `1/(n_i(n_i−1)) Σ_{j≠m} x_ijᵀ W x_im` per group.
    pub per_group_within: Vec<f64>,
    /// `2/(n_i n_l) Σ_j Σ_m x_ijᵀ W x_lm` per pair of groups.
    pub cross_terms: PairMap<f64>,
}

/// `T_n` from group totals in O(Σ n_i p + k² p).
pub fn compute_tn(s: &GroupedSample, w: &WeightSpec) -> Result<StatisticValue> {
    let summaries = sample::summarize(s, w)?;
    compute_tn_from_summaries(&summaries, w)
}

pub fn compute_tn_from_summaries(summaries: &[GroupSummary], w: &WeightSpec) -> Result<StatisticValue> {
    let k = summaries.len();
    if k < 2 {
        return Err(Error::TooFewGroups { min: 2, found: k });
    }
    for g in summaries {
        check_dim(w.dim(), g.total.len())?;
    }
    // Σ_{j≠m} x_jᵀ W x_m = Tᵀ W T − Σ_j x_jᵀ W x_j
    let per_group_within: Vec<f64> = summaries
        .iter()
        .map(|g| {
            let n = g.count() as f64;
            let tt = w.quad_form_unchecked(g.total.view(), g.total.view());
            (tt - g.self_w.sum()) / (n * (n - 1.0))
        })
        .collect();
    let cross_terms = PairMap::from_fn(k, |i, l| {
        let (gi, gl) = (&summaries[i], &summaries[l]);
        let ni = gi.count() as f64;
        let nl = gl.count() as f64;
        2.0 * w.quad_form_unchecked(gi.total.view(), gl.total.view()) / (ni * nl)
    });
    let t_n = (k as f64 - 1.0) * per_group_within.iter().sum::<f64>() - cross_terms.values().iter().sum::<f64>();
    Ok(StatisticValue {
        t_n,
        per_group_within,
        cross_terms,
    })
}

/// `T_n` by literal evaluation of its double sums, O(n² p).
pub fn compute_tn_naive(s: &GroupedSample, w: &WeightSpec) -> Result<f64> {
    s.check_weights(w)?;
    let n_total = s.total_count();
    if n_total > NAIVE_LIMIT {
        return Err(Error::GuardExceeded {
            what: "naive statistic sample",
            size: n_total,
            limit: NAIVE_LIMIT,
        });
    }
    let k = s.k();
    let mut within = 0.0;
    for g in s.groups() {
        let n = g.nrows();
        let mut acc = 0.0;
        for j1 in 0..n {
            for j2 in 0..n {
                if j1 != j2 {
                    acc += w.quad_form_unchecked(g.row(j1), g.row(j2));
                }
            }
        }
        within += acc / (n * (n - 1)) as f64;
    }
    let mut cross = 0.0;
    for i in 0..k {
        for l in i + 1..k {
            let (gi, gl) = (s.group(i), s.group(l));
            let mut acc = 0.0;
            for xi in gi.rows() {
                for xl in gl.rows() {
                    acc += w.quad_form_unchecked(xi, xl);
                }
            }
            cross += 2.0 * acc / (gi.nrows() * gl.nrows()) as f64;
        }
    }
    Ok((k as f64 - 1.0) * within - cross)
}

/// `E(T_n) = Σ_{i<l} (μ_i − μ_l)ᵀ W (μ_i − μ_l)`.
pub fn expected_tn(means: &[Array1<f64>], w: &WeightSpec) -> Result<f64> {
    for m in means {
        check_dim(w.dim(), m.len())?;
    }
    let mut total = 0.0;
    for i in 0..means.len() {
        for l in i + 1..means.len() {
            let d = &means[i] - &means[l];
            total += w.quad_form_unchecked(d.view(), d.view());
        }
    }
    Ok(total)
}

/// Exact `Var(T_n)` for known covariances and means:
///
/// ```text
/// Σ_i 2(k−1)²/(n_i(n_i−1)) tr(WΣ_i)² + Σ_{i<l} 4/(n_i n_l) tr(WΣ_iWΣ_l)
///   + 4 Σ_i (1/n_i) m_iᵀ W Σ_i W m_i,        m_i = Σ_l μ_l − k μ_i
/// ```
pub fn true_variance_tn(covs: &[Array2<f64>], means: &[Array1<f64>], counts: &[usize], w: &WeightSpec) -> Result<f64> {
    let k = covs.len();
    check_dim(k, means.len())?;
    check_dim(k, counts.len())?;
    if let Some(i) = counts.iter().position(|&n| n < 2) {
        return Err(Error::GroupTooSmall {
            group: i + 1,
            count: counts[i],
            min: 2,
        });
    }
    for m in means {
        check_dim(w.dim(), m.len())?;
    }
    let wc = dense::weighted_covariances(covs, w)?;
    let mut var = null_variance(&wc, counts);

    let kf = k as f64;
    let mean_sum = means.iter().fold(Array1::<f64>::zeros(w.dim()), |acc, m| acc + m);
    for i in 0..k {
        let m_i = &mean_sum - &(&means[i] * kf);
        let wm = w.apply(m_i.view())?;
        var += 4.0 / counts[i] as f64 * wm.dot(&covs[i].dot(&wm));
    }
    Ok(var)
}

/// `σ²_{n,k}` from the products `WΣ_i`.
pub(crate) fn null_variance(weighted_covs: &[Array2<f64>], counts: &[usize]) -> f64 {
    let k = weighted_covs.len();
    let km1 = k as f64 - 1.0;
    let mut var = 0.0;
    for i in 0..k {
        let n = counts[i] as f64;
        let a = weighted_covs[i].view();
        var += 2.0 * km1 * km1 / (n * (n - 1.0)) * trace_of_product(a, a);
    }
    for i in 0..k {
        for l in i + 1..k {
            let tr = trace_of_product(weighted_covs[i].view(), weighted_covs[l].view());
            var += 4.0 / (counts[i] * counts[l]) as f64 * tr;
        }
    }
    var
}
