//! Diagonal-plus-rank-one weight matrix `W = diag(ω²) + ααᵀ`.
//!
//! The matrix is never stored densely on production paths. The diagonal is
//! kept as the squared weights `ω_q²`, since every formula consumes squares.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{check_dim, Error, Result};

/// Largest dimension [`WeightSpec::materialize`] will allocate.
pub const MATERIALIZE_LIMIT: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    /// Squared diagonal weights `ω_q²`, all strictly positive.
    omega_sq: Array1<f64>,
    /// Rank-one direction `α`.
    alpha: Array1<f64>,
}

impl WeightSpec {
    pub fn new(omega_sq: Array1<f64>, alpha: Array1<f64>) -> Result<Self> {
        if omega_sq.is_empty() {
            return Err(Error::invalid("weight dimension must be at least 1"));
        }
        check_dim(omega_sq.len(), alpha.len())?;
        if let Some(q) = omega_sq.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::invalid(format!(
                "omega_sq[{q}] = {} must be positive and finite",
                omega_sq[q]
            )));
        }
        if let Some(q) = alpha.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("alpha[{q}] is not finite")));
        }
        Ok(Self { omega_sq, alpha })
    }

    /// Weights used in the simulation studies: `ω_q = √2 (1 + q/(2p))` and
    /// `α_q = √5 p^{-3/8}` for `q = 1..p`.
    pub fn paper_default(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("weight dimension must be at least 1"));
        }
        let pf = p as f64;
        let omega_sq = Array1::from_iter((1..=p).map(|q| {
            let omega = 1.0 + q as f64 / (2.0 * pf);
            2.0 * omega * omega
        }));
        let alpha = Array1::from_elem(p, 5f64.sqrt() * pf.powf(-0.375));
        Self::new(omega_sq, alpha)
    }

    /// `W = I`, which turns the weighted statistic into the unweighted one.
    pub fn identity(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("weight dimension must be at least 1"));
        }
        Self::new(Array1::ones(p), Array1::zeros(p))
    }

    pub fn dim(&self) -> usize {
        self.omega_sq.len()
    }

    pub fn omega_sq(&self) -> &Array1<f64> {
        &self.omega_sq
    }

    pub fn alpha(&self) -> &Array1<f64> {
        &self.alpha
    }

    /// The common value of `α` when every entry is equal.
    pub fn constant_alpha(&self) -> Option<f64> {
        let a0 = self.alpha[0];
        self.alpha.iter().all(|&a| a == a0).then_some(a0)
    }

    fn has_rank_one_part(&self) -> bool {
        self.alpha.iter().any(|&a| a != 0.0)
    }

    /// `xᵀ W y` in O(p).
    pub fn quad_form(&self, x: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.quad_form_unchecked(x, y))
    }

    pub(crate) fn quad_form_unchecked(&self, x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
        let mut diag = 0.0;
        let mut ax = 0.0;
        let mut ay = 0.0;
        for q in 0..self.omega_sq.len() {
            diag += self.omega_sq[q] * x[q] * y[q];
            ax += self.alpha[q] * x[q];
            ay += self.alpha[q] * y[q];
        }
        diag + ax * ay
    }

    /// `W x` in O(p).
    pub fn apply(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        check_dim(self.dim(), x.len())?;
        let ax = self.alpha.dot(&x);
        Ok(&self.omega_sq * &x + &self.alpha * ax)
    }

    /// `W M` for a `p × m` matrix, column by column.
    pub fn apply_matrix(&self, m: ArrayView2<f64>) -> Result<Array2<f64>> {
        check_dim(self.dim(), m.nrows())?;
        let proj = self.alpha.dot(&m);
        let mut out = m.to_owned();
        for (mut row, (&w, &a)) in out
            .axis_iter_mut(Axis(0))
            .zip(self.omega_sq.iter().zip(self.alpha.iter()))
        {
            row.zip_mut_with(&proj, |v, &pj| *v = w * *v + a * pj);
        }
        Ok(out)
    }

    /// Dense `W`; only for validation at moderate `p`.
    pub fn materialize(&self) -> Result<Array2<f64>> {
        let p = self.dim();
        if p > MATERIALIZE_LIMIT {
            return Err(Error::GuardExceeded {
                what: "dense weight matrix",
                size: p,
                limit: MATERIALIZE_LIMIT,
            });
        }
        let a = self.alpha.view().insert_axis(Axis(1));
        let mut w = a.dot(&a.t());
        for q in 0..p {
            w[[q, q]] += self.omega_sq[q];
        }
        Ok(w)
    }

    /// Rows of `data` mapped into the factor space of `W`.
    ///
    /// With `F = [diag(ω) | α]` we have `W = F Fᵀ`, so `xᵀ W y = (xᵀF)(yᵀF)ᵀ`
    /// and every W-Gram matrix becomes an ordinary Gram matrix.
    pub fn factor_rows(&self, data: ArrayView2<f64>) -> Result<FactoredRows> {
        check_dim(self.dim(), data.ncols())?;
        let p = self.dim();
        let extra = usize::from(self.has_rank_one_part());
        let mut out = Array2::zeros((data.nrows(), p + extra));
        let omega = self.omega_sq.mapv(f64::sqrt);
        {
            let mut head = out.slice_mut(s![.., ..p]);
            head.assign(&data);
            head *= &omega;
        }
        if extra == 1 {
            out.column_mut(p).assign(&data.dot(&self.alpha));
        }
        Ok(FactoredRows { rows: out })
    }
}

/// Observations expressed in the factor space of a [`WeightSpec`].
#[derive(Debug, Clone)]
pub struct FactoredRows {
    rows: Array2<f64>,
}

impl FactoredRows {
    pub fn nrows(&self) -> usize {
        self.rows.nrows()
    }

    /// Matrix of `x_jᵀ W y_m` over the rows of `self` and `other`.
    pub fn gram(&self, other: &FactoredRows) -> Array2<f64> {
        self.rows.dot(&other.rows.t())
    }

    /// `x_jᵀ W x_j` for every row.
    pub fn self_products(&self) -> Array1<f64> {
        self.rows.map_axis(Axis(1), |r| r.dot(&r))
    }
}
