//! Grouped observations and per-group sufficient statistics.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{check_dim, Error, Result};
use crate::weight::WeightSpec;

/// Smallest group size accepted. The within-group trace estimator divides by
/// `n_i − 3`.
pub const MIN_GROUP_SIZE: usize = 4;

/// `k ≥ 2` groups of `p`-dimensional observations, one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSample {
    groups: Vec<Array2<f64>>,
    p: usize,
}

impl GroupedSample {
    pub fn new(groups: Vec<Array2<f64>>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::TooFewGroups {
                min: 2,
                found: groups.len(),
            });
        }
        let p = groups[0].ncols();
        if p == 0 {
            return Err(Error::invalid("observations must have at least one coordinate"));
        }
        for (i, g) in groups.iter().enumerate() {
            check_dim(p, g.ncols())?;
            if g.nrows() < MIN_GROUP_SIZE {
                return Err(Error::GroupTooSmall {
                    group: i + 1,
                    count: g.nrows(),
                    min: MIN_GROUP_SIZE,
                });
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("group {} contains a non-finite value", i + 1)));
            }
        }
        Ok(Self { groups, p })
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn counts(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.nrows()).collect()
    }

    pub fn total_count(&self) -> usize {
        self.groups.iter().map(|g| g.nrows()).sum()
    }

    pub fn group(&self, i: usize) -> ArrayView2<'_, f64> {
        self.groups[i].view()
    }

    pub fn groups(&self) -> &[Array2<f64>] {
        &self.groups
    }

    pub fn into_groups(self) -> Vec<Array2<f64>> {
        self.groups
    }

    /// Applies `f` to every observation vector, keeping the grouping.
    pub fn map_rows(&self, mut f: impl FnMut(&mut ndarray::ArrayViewMut1<f64>)) -> Result<Self> {
        let mut groups = self.groups.clone();
        for g in &mut groups {
            for mut row in g.axis_iter_mut(Axis(0)) {
                f(&mut row);
            }
        }
        Self::new(groups)
    }

    pub(crate) fn check_weights(&self, w: &WeightSpec) -> Result<()> {
        check_dim(self.p, w.dim())
    }
}

/// Sufficient statistics of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    /// `Σ_j x_ij`.
    pub total: Array1<f64>,
    /// `x̄_i = total / n_i`.
    pub mean: Array1<f64>,
    /// Rows `x_ij − x̄_i`.
    pub centered: Array2<f64>,
    /// `x_ijᵀ W x_ij` for each observation.
    pub self_w: Array1<f64>,
}

impl GroupSummary {
    pub fn count(&self) -> usize {
        self.centered.nrows()
    }
}

/// One summary per group; O(Σ n_i · p).
pub fn summarize(s: &GroupedSample, w: &WeightSpec) -> Result<Vec<GroupSummary>> {
    s.check_weights(w)?;
    s.groups.iter().map(|g| summarize_group(g.view(), w)).collect()
}

pub(crate) fn summarize_group(g: ArrayView2<f64>, w: &WeightSpec) -> Result<GroupSummary> {
    let n = g.nrows() as f64;
    let total = g.sum_axis(Axis(0));
    let mean = &total / n;
    let centered = &g - &mean;
    let self_w = w.factor_rows(g)?.self_products();
    Ok(GroupSummary {
        total,
        mean,
        centered,
        self_w,
    })
}
