//! The one-sided test: reject `H₀: μ_1 = ⋯ = μ_k` when `T_n ≥ σ̂_{n,k} z_ϑ`.

use libm::erfc;
use serde::Serialize;
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::sample::{self, GroupedSample};
use crate::statistic;
use crate::variance;
use crate::weight::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub t_n: f64,
    /// `σ̂_{n,k}`; NaN when the variance estimate is degenerate.
    pub sigma_hat: f64,
    /// `T_n / σ̂_{n,k}`; NaN when degenerate.
    pub z_score: f64,
    /// Upper-tail normal probability of `z_score`; 1 when degenerate.
    pub p_value: f64,
    pub reject: bool,
    pub level: f64,
    pub degenerate: bool,
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail `1 − Φ(x)`, accurate far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `z` with `1 − Φ(z) = theta`.
pub fn normal_upper_quantile(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!("quantile level {theta} is outside (0, 1)")));
    }
    let mut z = std::f64::consts::SQRT_2 * erfc_inv(2.0 * theta);
    // One Newton step on the upper tail.
    let density = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if density > 0.0 {
        z += (normal_sf(z) - theta) / density;
    }
    Ok(z)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("significance level {level} is outside (0, 1)")))
    }
}

/// Runs the weighted test at significance `level`.
///
/// A non-positive variance estimate does not fail the call: the outcome is
/// flagged `degenerate` and does not reject.
pub fn run_test(s: &GroupedSample, w: &WeightSpec, level: f64) -> Result<TestOutcome> {
    check_level(level)?;
    let critical = normal_upper_quantile(level)?;
    let summaries = sample::summarize(s, w)?;
    let t_n = statistic::compute_tn_from_summaries(&summaries, w)?.t_n;
    let var = variance::estimate_from_summaries(&summaries, w)?.sigma_hat_sq;
    Ok(decide(t_n, var, level, critical))
}

pub(crate) fn decide(t_n: f64, sigma_hat_sq: f64, level: f64, critical: f64) -> TestOutcome {
    if !(sigma_hat_sq > 0.0 && sigma_hat_sq.is_finite()) {
        return TestOutcome {
            t_n,
            sigma_hat: f64::NAN,
            z_score: f64::NAN,
            p_value: 1.0,
            reject: false,
            level,
            degenerate: true,
        };
    }
    let sigma_hat = sigma_hat_sq.sqrt();
    let z_score = t_n / sigma_hat;
    TestOutcome {
        t_n,
        sigma_hat,
        z_score,
        p_value: normal_sf(z_score),
        reject: t_n >= sigma_hat * critical,
        level,
        degenerate: false,
    }
}

/// The unweighted comparator, i.e. the weighted test with `W = I`.
pub fn hb_test(s: &GroupedSample, level: f64) -> Result<TestOutcome> {
    run_test(s, &WeightSpec::identity(s.dim())?, level)
}

/// One-sample Kolmogorov–Smirnov test against `N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub fn ks_test_standard_normal(samples: &[f64]) -> Result<KsResult> {
    if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("KS test needs a non-empty finite sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
    })
}

/// `P(K > λ)` for the limiting Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
