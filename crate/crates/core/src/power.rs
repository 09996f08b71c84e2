//! Analytic power, relative efficiency against the unweighted test, and the
//! fourth-moment trace diagnostic, all from known parameters.
//!
//! Every function here works with dense `p × p` matrices and is guarded by
//! [`crate::dense::DENSE_LIMIT`].

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::datagen::{build_scenario, ScenarioKind};
use crate::dense::{self, trace_of_product};
use crate::error::{check_dim, Error, Result};
use crate::statistic::expected_tn;
use crate::testing::{normal_cdf, normal_upper_quantile};
use crate::variance::sigma_sq_plugin;
use crate::weight::WeightSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerInput {
    pub means: Vec<Array1<f64>>,
    pub covs: Vec<Array2<f64>>,
    pub counts: Vec<usize>,
    pub w: WeightSpec,
    pub level: f64,
}

impl PowerInput {
    fn validate(&self) -> Result<()> {
        let k = self.means.len();
        if k < 2 {
            return Err(Error::TooFewGroups { min: 2, found: k });
        }
        check_dim(k, self.covs.len())?;
        check_dim(k, self.counts.len())?;
        for m in &self.means {
            check_dim(self.w.dim(), m.len())?;
        }
        check_counts(&self.counts)?;
        check_level(self.level)
    }
}

fn check_counts(counts: &[usize]) -> Result<()> {
    match counts.iter().position(|&n| n < 2) {
        Some(i) => Err(Error::GroupTooSmall {
            group: i + 1,
            count: counts[i],
            min: 2,
        }),
        None => Ok(()),
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("significance level {level} is outside (0, 1)")))
    }
}

/// `Φ(−z_ϑ + E(T_n)/σ_{n,k})` with the null standard deviation computed
/// from the known covariances.
pub fn asymptotic_power(inp: &PowerInput) -> Result<f64> {
    inp.validate()?;
    let signal = expected_tn(&inp.means, &inp.w)?;
    let sigma = sigma_sq_plugin(&inp.covs, &inp.counts, &inp.w)?.sqrt();
    Ok(normal_cdf(-normal_upper_quantile(inp.level)? + signal / sigma))
}

/// `Σ_i (k−1)²/(n_i(n_i−1)) + Σ_{i≠l} 1/(n_i n_l)`.
pub fn count_factor(counts: &[usize]) -> f64 {
    let km1 = counts.len() as f64 - 1.0;
    let mut total = 0.0;
    for (i, &ni) in counts.iter().enumerate() {
        let n = ni as f64;
        total += km1 * km1 / (n * (n - 1.0));
        for (l, &nl) in counts.iter().enumerate() {
            if l != i {
                total += 1.0 / (n * nl as f64);
            }
        }
    }
    total
}

/// Power when all groups share the covariance `Σ`:
///
/// ```text
/// Φ(−z_ϑ + E(T_n) / (√(2 tr(WΣ)²) · √count_factor))
/// ```
pub fn equal_cov_power(
    shared_cov: &Array2<f64>,
    means: &[Array1<f64>],
    counts: &[usize],
    w: &WeightSpec,
    level: f64,
) -> Result<f64> {
    if means.len() < 2 {
        return Err(Error::TooFewGroups {
            min: 2,
            found: means.len(),
        });
    }
    check_dim(means.len(), counts.len())?;
    check_counts(counts)?;
    check_level(level)?;
    let ws = weighted(shared_cov, w)?;
    let signal = expected_tn(means, w)?;
    let denom = (2.0 * trace_of_product(ws.view(), ws.view())).sqrt() * count_factor(counts).sqrt();
    Ok(normal_cdf(-normal_upper_quantile(level)? + signal / denom))
}

fn weighted(cov: &Array2<f64>, w: &WeightSpec) -> Result<Array2<f64>> {
    Ok(dense::weighted_covariances(std::slice::from_ref(cov), w)?.remove(0))
}

/// Asymptotic relative efficiency against the unweighted test:
///
/// ```text
/// Σ_{i<l} (μ_i−μ_l)ᵀW(μ_i−μ_l) · √tr(Σ²)  /  (Σ_{i<l} ‖μ_i−μ_l‖² · √tr((WΣ)²))
/// ```
pub fn are_vs_hb(means: &[Array1<f64>], shared_cov: &Array2<f64>, w: &WeightSpec) -> Result<f64> {
    let p = w.dim();
    let ws = weighted(shared_cov, w)?;
    let weighted_signal = expected_tn(means, w)?;
    let plain_signal = expected_tn(means, &WeightSpec::identity(p)?)?;
    if plain_signal == 0.0 {
        return Err(Error::UndefinedEfficiency);
    }
    let tr_s2 = trace_of_product(shared_cov.view(), shared_cov.view());
    let tr_ws2 = trace_of_product(ws.view(), ws.view());
    Ok(weighted_signal * tr_s2.sqrt() / (plain_signal * tr_ws2.sqrt()))
}

/// `max tr(WΣ_{i1}WΣ_{i2}WΣ_{i3}WΣ_{i4}) / tr²((Σ_i WΣ_i)²)` over all `k⁴`
/// index tuples. Small values indicate the fourth-moment trace condition is
/// plausible at this configuration.
pub fn assumption_c_diagnostic(covs: &[Array2<f64>], w: &WeightSpec) -> Result<f64> {
    if covs.is_empty() {
        return Err(Error::invalid("no covariance matrices given"));
    }
    let a = dense::weighted_covariances(covs, w)?;
    let k = a.len();
    let total = a.iter().skip(1).fold(a[0].clone(), |acc, m| acc + m);
    let denom = trace_of_product(total.view(), total.view());
    let pairs: Vec<Vec<Array2<f64>>> = (0..k).map(|i| (0..k).map(|j| a[i].dot(&a[j])).collect()).collect();
    let mut best = f64::NEG_INFINITY;
    for left in pairs.iter().flatten() {
        for right in pairs.iter().flatten() {
            best = best.max(trace_of_product(left.view(), right.view()));
        }
    }
    Ok(best / (denom * denom))
}

/// Lower bound on the standardized signal when one pair of groups differs by
/// `ν` in its first `⌊p^δ⌋` coordinates, with `λ*_p` the largest eigenvalue of
/// the common covariance:
///
/// ```text
/// (α² s² ν² + ν² Σ_{q≤s} ω_q²)
///   / (λ*_p √(2(Σ_{q=2}^{p−1} ω_q⁴ + 2ω_p⁴ + 2p ω_p² α² + p² α⁴)) · √count_factor)
/// ```
pub fn sparse_alternative_snr(
    nu: f64,
    delta: f64,
    p: usize,
    counts: &[usize],
    w: &WeightSpec,
    lambda_p_star: f64,
) -> Result<f64> {
    check_dim(w.dim(), p)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::invalid(format!("delta = {delta} is outside [0, 1]")));
    }
    if !(lambda_p_star > 0.0 && lambda_p_star.is_finite()) {
        return Err(Error::invalid("largest covariance eigenvalue must be positive"));
    }
    if counts.len() < 2 {
        return Err(Error::TooFewGroups {
            min: 2,
            found: counts.len(),
        });
    }
    check_counts(counts)?;
    let alpha = w.constant_alpha().ok_or(Error::NonConstantAlpha)?;
    let a2 = alpha * alpha;
    let pf = p as f64;
    let s = signal_width(pf, delta).min(p);
    let om = w.omega_sq();
    let numer = a2 * (s * s) as f64 * nu * nu + nu * nu * om.slice(ndarray::s![..s]).sum();
    let mid: f64 = if p > 2 {
        om.slice(ndarray::s![1..p - 1]).iter().map(|v| v * v).sum()
    } else {
        0.0
    };
    let wp = om[p - 1];
    let inner = mid + 2.0 * wp * wp + 2.0 * pf * wp * a2 + pf * pf * a2 * a2;
    Ok(numer / (lambda_p_star * (2.0 * inner).sqrt() * count_factor(counts).sqrt()))
}

fn signal_width(pf: f64, delta: f64) -> usize {
    let s = pf.powf(delta);
    let r = s.round();
    if (s - r).abs() < 1e-9 {
        r as usize
    } else {
        s.floor() as usize
    }
}

/// JSON request accepted by the command-line power calculator.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerRequest {
    pub p: usize,
    pub counts: Vec<usize>,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default)]
    pub weights: WeightChoice,
    pub covariance: CovarianceSpec,
    #[serde(default)]
    pub means: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub sparse: Option<SparseMeans>,
}

fn default_level() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(untagged)]
pub enum WeightChoice {
    #[default]
    #[serde(skip)]
    PaperDefault,
    /// `"paper-default"` or `"identity"`.
    Named(String),
    Explicit {
        omega_sq: Vec<f64>,
        alpha: Vec<f64>,
    },
}

impl WeightChoice {
    pub fn build(&self, p: usize) -> Result<WeightSpec> {
        match self {
            WeightChoice::PaperDefault => WeightSpec::paper_default(p),
            WeightChoice::Named(name) => match name.as_str() {
                "paper-default" => WeightSpec::paper_default(p),
                "identity" => WeightSpec::identity(p),
                other => Err(Error::invalid(format!("unknown weight choice {other:?}"))),
            },
            WeightChoice::Explicit { omega_sq, alpha } => {
                let w = WeightSpec::new(Array1::from(omega_sq.clone()), Array1::from(alpha.clone()))?;
                check_dim(p, w.dim())?;
                Ok(w)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CovarianceSpec {
    /// One of the built-in three-group scenarios.
    Scenario(ScenarioKind),
    /// One covariance shared by every group.
    Shared(Vec<Vec<f64>>),
    /// One covariance per group.
    Custom(Vec<Vec<Vec<f64>>>),
}

/// Group 1 is shifted by `ν` in its first `⌊p^δ⌋` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseMeans {
    pub nu: f64,
    pub delta: f64,
}

/// Output of [`evaluate_request`]. Entries that do not apply are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSummary {
    pub asymptotic_power: f64,
    /// Present when every group has the same covariance.
    pub equal_cov_power: Option<f64>,
    /// Present when every group has the same covariance and the means differ.
    pub are_vs_hb: Option<f64>,
    pub assumption_c_diagnostic: f64,
}

fn matrix(rows: &[Vec<f64>], p: usize) -> Result<Array2<f64>> {
    check_dim(p, rows.len())?;
    let mut m = Array2::zeros((p, p));
    for (i, row) in rows.iter().enumerate() {
        check_dim(p, row.len())?;
        m.row_mut(i).assign(&ndarray::ArrayView1::from(row.as_slice()));
    }
    Ok(m)
}

impl PowerRequest {
    pub fn to_input(&self) -> Result<PowerInput> {
        let p = self.p;
        if p == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        dense::guard(p)?;
        let k = self.counts.len();
        let covs = match &self.covariance {
            CovarianceSpec::Scenario(kind) => build_scenario(*kind, p)?.covs,
            CovarianceSpec::Shared(rows) => vec![matrix(rows, p)?; k],
            CovarianceSpec::Custom(list) => list.iter().map(|rows| matrix(rows, p)).collect::<Result<_>>()?,
        };
        check_dim(k, covs.len())?;
        let means = match (&self.means, &self.sparse) {
            (Some(m), None) => m
                .iter()
                .map(|v| {
                    check_dim(p, v.len())?;
                    Ok(Array1::from(v.clone()))
                })
                .collect::<Result<Vec<_>>>()?,
            (None, Some(sp)) => {
                if !(0.0..=1.0).contains(&sp.delta) {
                    return Err(Error::invalid(format!("delta = {} is outside [0, 1]", sp.delta)));
                }
                let mut means = vec![Array1::zeros(p); k];
                if let Some(first) = means.first_mut() {
                    first
                        .slice_mut(ndarray::s![..signal_width(p as f64, sp.delta).min(p)])
                        .fill(sp.nu);
                }
                means
            }
            _ => return Err(Error::invalid("give exactly one of \"means\" and \"sparse\"")),
        };
        Ok(PowerInput {
            means,
            covs,
            counts: self.counts.clone(),
            w: self.weights.build(p)?,
            level: self.level,
        })
    }
}

/// Evaluates every analytic quantity that applies to the request.
pub fn evaluate_request(req: &PowerRequest) -> Result<PowerSummary> {
    let inp = req.to_input()?;
    let asymptotic_power = asymptotic_power(&inp)?;
    let shared = inp.covs.iter().all(|c| c == &inp.covs[0]).then(|| &inp.covs[0]);
    let (equal_cov_power, are_vs_hb) = match shared {
        Some(cov) => {
            let ecp = equal_cov_power(cov, &inp.means, &inp.counts, &inp.w, inp.level)?;
            let are = match are_vs_hb(&inp.means, cov, &inp.w) {
                Ok(v) => Some(v),
                Err(Error::UndefinedEfficiency) => None,
                Err(e) => return Err(e),
            };
            (Some(ecp), are)
        }
        None => (None, None),
    };
    Ok(PowerSummary {
        asymptotic_power,
        equal_cov_power,
        are_vs_hb,
        assumption_c_diagnostic: assumption_c_diagnostic(&inp.covs, &inp.w)?,
    })
}
