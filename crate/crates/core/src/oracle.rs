//! Randomized cross-checks of the fast estimators against literal
//! permutation-sum evaluations on tiny instances.

use ndarray::{Array1, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::{summarize_group, GroupSummary, GroupedSample};
use crate::statistic::{compute_tn, compute_tn_naive};
use crate::variance::{cross_trace_raw, cross_trace_simplified, within_trace_raw, within_trace_simplified};
use crate::weight::WeightSpec;

/// Relative tolerance of every check.
pub const TOLERANCE: f64 = 1e-8;

/// The estimator pairs being compared. Swapping an entry lets tests confirm
/// that a deliberately broken estimator is caught.
#[derive(Clone, Copy)]
pub struct Estimators {
    pub tn_fast: fn(&GroupedSample, &WeightSpec) -> Result<f64>,
    pub tn_naive: fn(&GroupedSample, &WeightSpec) -> Result<f64>,
    pub within_simplified: fn(&GroupSummary, &WeightSpec) -> Result<f64>,
    pub within_raw: fn(ArrayView2<f64>, &WeightSpec) -> Result<f64>,
    pub cross_simplified: fn(&GroupSummary, &GroupSummary, &WeightSpec) -> Result<f64>,
    pub cross_raw: fn(ArrayView2<f64>, ArrayView2<f64>, &WeightSpec) -> Result<f64>,
}

impl Default for Estimators {
    fn default() -> Self {
        Self {
            tn_fast: |s, w| compute_tn(s, w).map(|v| v.t_n),
            tn_naive: compute_tn_naive,
            within_simplified: within_trace_simplified,
            within_raw: within_trace_raw,
            cross_simplified: cross_trace_simplified,
            cross_raw: cross_trace_raw,
        }
    }
}

/// A replayable instance: group rows plus the weight vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleInstance {
    pub groups: Vec<Vec<Vec<f64>>>,
    pub omega_sq: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl OracleInstance {
    fn new(s: &GroupedSample, w: &WeightSpec) -> Self {
        Self {
            groups: s
                .groups()
                .iter()
                .map(|g| g.rows().into_iter().map(|r| r.to_vec()).collect())
                .collect(),
            omega_sq: w.omega_sq().to_vec(),
            alpha: w.alpha().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleFailure {
    pub trial: usize,
    pub check: String,
    pub fast: f64,
    pub reference: f64,
    pub relative_deviation: f64,
    pub instance: OracleInstance,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: usize,
    pub max_relative_deviation: f64,
    pub failures: Vec<OracleFailure>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `n_i ∈ [4, 10]`, `p ∈ [1, 6]`, `k ∈ [2, 4]`, random weights and shifted
/// normal data.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> Result<(GroupedSample, WeightSpec)> {
    let k = rng.random_range(2..=4);
    let p = rng.random_range(1..=6);
    let groups = (0..k)
        .map(|_| {
            let n = rng.random_range(4..=10);
            let shift: f64 = rng.random_range(-2.0..2.0);
            let scale: f64 = rng.random_range(0.5..2.0);
            Array2::from_shape_simple_fn((n, p), || shift + scale * rng.sample::<f64, _>(StandardNormal))
        })
        .collect();
    let omega_sq = Array1::from_shape_simple_fn(p, || rng.random_range(0.5..3.0));
    let alpha = Array1::from_shape_simple_fn(p, || rng.random_range(-1.0..1.0));
    Ok((GroupedSample::new(groups)?, WeightSpec::new(omega_sq, alpha)?))
}

fn relative_deviation(a: f64, b: f64, scale: f64) -> f64 {
    let denom = a.abs().max(b.abs()).max(scale).max(f64::MIN_POSITIVE);
    (a - b).abs() / denom
}

pub fn run_oracle_check(seed: u64, trials: usize) -> Result<OracleReport> {
    run_oracle_check_with(seed, trials, &Estimators::default())
}

pub fn run_oracle_check_with(seed: u64, trials: usize, est: &Estimators) -> Result<OracleReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        seed,
        trials,
        checks: 0,
        max_relative_deviation: 0.0,
        failures: Vec::new(),
    };
    for trial in 0..trials {
        let (s, w) = random_instance(&mut rng)?;
        let mut record = |check: String, fast: f64, reference: f64, scale: f64| {
            let dev = relative_deviation(fast, reference, scale);
            report.checks += 1;
            report.max_relative_deviation = report.max_relative_deviation.max(dev);
            if !(dev <= TOLERANCE) {
                report.failures.push(OracleFailure {
                    trial,
                    check,
                    fast,
                    reference,
                    relative_deviation: dev,
                    instance: OracleInstance::new(&s, &w),
                });
            }
        };

        // T_n may cancel to near zero; compare on the scale of its parts.
        let parts = compute_tn(&s, &w)?;
        let km1 = s.k() as f64 - 1.0;
        let scale = km1 * parts.per_group_within.iter().map(|v| v.abs()).sum::<f64>()
            + parts.cross_terms.values().iter().map(|v| v.abs()).sum::<f64>();
        record("t_n".into(), (est.tn_fast)(&s, &w)?, (est.tn_naive)(&s, &w)?, scale);

        let summaries = s
            .groups()
            .iter()
            .map(|g| summarize_group(g.view(), &w))
            .collect::<Result<Vec<_>>>()?;
        for (i, g) in summaries.iter().enumerate() {
            let fast = (est.within_simplified)(g, &w)?;
            let raw = (est.within_raw)(s.group(i), &w)?;
            record(format!("within_trace[{}]", i + 1), fast, raw, 0.0);
        }
        for i in 0..s.k() {
            for l in i + 1..s.k() {
                let fast = (est.cross_simplified)(&summaries[i], &summaries[l], &w)?;
                let raw = (est.cross_raw)(s.group(i), s.group(l), &w)?;
                record(format!("cross_trace[{},{}]", i + 1, l + 1), fast, raw, 0.0);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_estimators_agree() {
        let rep = run_oracle_check(11, 25).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures.first());
        assert!(rep.checks >= 25 * 4);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_oracle_check(1, 0).is_err());
    }

    #[test]
    fn instances_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (s, w) = random_instance(&mut rng).unwrap();
            assert!((2..=4).contains(&s.k()));
            assert!((1..=6).contains(&s.dim()));
            assert!(s.counts().iter().all(|n| (4..=10).contains(n)));
            assert_eq!(w.dim(), s.dim());
        }
    }
}
