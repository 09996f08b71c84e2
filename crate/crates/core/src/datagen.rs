//! Synthetic grouped samples from the factor model `x_ij = μ_i + Γ_i z_ij`.

use ndarray::{Array1, Array2, ArrayViewMut1, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::dense::{self, ar1_matrix, cholesky};
use crate::error::{check_dim, Error, Result};
use crate::sample::{GroupedSample, MIN_GROUP_SIZE};

/// Autoregressive coefficient of the `0.5^{|i−j|}` covariance.
pub const AR_PHI: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// `Σ_1 = I`, `Σ_2 = AR(0.5)`, `Σ_3 = Σ_1 + Σ_2`.
    #[serde(alias = "s1")]
    Scenario1,
    /// `Σ_1 = Σ_2 = Σ_3 = AR(0.5)`.
    #[serde(alias = "s2")]
    Scenario2,
    Custom,
}

impl ScenarioKind {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::Scenario1 => "scenario1",
            ScenarioKind::Scenario2 => "scenario2",
            ScenarioKind::Custom => "custom",
        }
    }
}

/// A factor `Γ` with `ΓΓᵀ = Σ`, kept in structured form where possible.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Identity,
    /// Cholesky factor of `φ^{|i−j|}`, with `L[i,0] = φ^i` and
    /// `L[i,j] = φ^{i−j} √(1−φ²)` for `1 ≤ j ≤ i`. Applied by the
    /// recursion `x_0 = z_0`, `x_q = φ x_{q−1} + √(1−φ²) z_q`.
    Ar1 {
        phi: f64,
    },
    /// Lower-triangular (or general square) factor.
    Dense(Array2<f64>),
}

impl Factor {
    pub fn to_dense(&self, p: usize) -> Array2<f64> {
        match self {
            Factor::Identity => Array2::eye(p),
            Factor::Ar1 { phi } => {
                let d = (1.0 - phi * phi).sqrt();
                Array2::from_shape_fn((p, p), |(i, j)| match (i, j) {
                    _ if j > i => 0.0,
                    (_, 0) => phi.powi(i as i32),
                    _ => phi.powi((i - j) as i32) * d,
                })
            }
            Factor::Dense(l) => l.clone(),
        }
    }

    /// Replaces every row `z` of `rows` by `Γ z`.
    fn apply_rows(&self, rows: &mut Array2<f64>) {
        match self {
            Factor::Identity => {}
            Factor::Ar1 { phi } => {
                let d = (1.0 - phi * phi).sqrt();
                for mut row in rows.axis_iter_mut(Axis(0)) {
                    ar1_in_place(&mut row, *phi, d);
                }
            }
            Factor::Dense(l) => *rows = rows.dot(&l.t()),
        }
    }
}

fn ar1_in_place(row: &mut ArrayViewMut1<f64>, phi: f64, d: f64) {
    for q in 1..row.len() {
        row[q] = phi * row[q - 1] + d * row[q];
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovScenario {
    pub kind: ScenarioKind,
    pub p: usize,
    /// Target covariances `Σ_i`.
    pub covs: Vec<Array2<f64>>,
    pub factors: Vec<Factor>,
}

impl CovScenario {
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    /// Builds a custom scenario, factoring each covariance by Cholesky.
    pub fn custom(covs: Vec<Array2<f64>>) -> Result<Self> {
        let p = covs
            .first()
            .map(|c| c.nrows())
            .ok_or_else(|| Error::invalid("no covariance matrices given"))?;
        dense::guard(p)?;
        let factors = covs
            .iter()
            .map(|c| {
                dense::check_square(c.view(), p)?;
                cholesky(c.view()).map(Factor::Dense)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind: ScenarioKind::Custom,
            p,
            covs,
            factors,
        })
    }
}

/// Covariances and factors of one of the two simulation scenarios (`k = 3`).
pub fn build_scenario(kind: ScenarioKind, p: usize) -> Result<CovScenario> {
    if p == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    dense::guard(p)?;
    let ar = ar1_matrix(p, AR_PHI);
    let ar_factor = Factor::Ar1 { phi: AR_PHI };
    let (covs, factors) = match kind {
        ScenarioKind::Scenario1 => {
            let sum = &ar + &Array2::<f64>::eye(p);
            let l3 = cholesky(sum.view())?;
            (
                vec![Array2::eye(p), ar, sum],
                vec![Factor::Identity, ar_factor, Factor::Dense(l3)],
            )
        }
        ScenarioKind::Scenario2 => (
            vec![ar.clone(), ar.clone(), ar],
            vec![ar_factor.clone(), ar_factor.clone(), ar_factor],
        ),
        ScenarioKind::Custom => {
            return Err(Error::invalid("custom scenarios are built from explicit covariances"));
        }
    };
    Ok(CovScenario { kind, p, covs, factors })
}

/// Innovation distributions, each with mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnovationLaw {
    /// `N(0, 1)`.
    StdNormal,
    /// `(χ²(2) − 2)/2`.
    StdChisq2,
    /// `t(4)/√2`.
    StdT4,
}

impl InnovationLaw {
    pub fn label(self) -> &'static str {
        match self {
            InnovationLaw::StdNormal => "std_normal",
            InnovationLaw::StdChisq2 => "std_chisq2",
            InnovationLaw::StdT4 => "std_t4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [InnovationLaw::StdNormal, InnovationLaw::StdChisq2, InnovationLaw::StdT4]
            .into_iter()
            .find(|l| l.label() == s)
    }
}

struct Sampler {
    law: InnovationLaw,
    t4: StudentT<f64>,
}

impl Sampler {
    fn new(law: InnovationLaw) -> Self {
        Self {
            law,
            t4: StudentT::new(4.0).expect("valid degrees of freedom"),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.law {
            InnovationLaw::StdNormal => rng.sample(StandardNormal),
            InnovationLaw::StdChisq2 => {
                let g1: f64 = rng.sample(StandardNormal);
                let g2: f64 = rng.sample(StandardNormal);
                (g1 * g1 + g2 * g2 - 2.0) / 2.0
            }
            InnovationLaw::StdT4 => self.t4.sample(rng) / std::f64::consts::SQRT_2,
        }
    }
}

/// `count` i.i.d. draws from `law`.
pub fn sample_innovation<R: Rng + ?Sized>(law: InnovationLaw, count: usize, rng: &mut R) -> Array1<f64> {
    let sampler = Sampler::new(law);
    Array1::from_iter((0..count).map(|_| sampler.draw(rng)))
}

/// Mean vectors of the sparse alternative: `μ_1` has `⌊p^{1−ρ}⌋` leading
/// entries equal to `τ = √(2r Σ_i 1/n_i · log p)`, all other means are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanConfig {
    pub rho: f64,
    pub r: f64,
    pub group_counts: Vec<usize>,
    pub p: usize,
}

impl MeanConfig {
    pub fn new(rho: f64, r: f64, group_counts: Vec<usize>, p: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::invalid(format!("rho = {rho} is outside [0, 1]")));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("r = {r} must be non-negative")));
        }
        if p == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if group_counts.len() < 2 {
            return Err(Error::TooFewGroups {
                min: 2,
                found: group_counts.len(),
            });
        }
        if let Some(i) = group_counts.iter().position(|&n| n < MIN_GROUP_SIZE) {
            return Err(Error::GroupTooSmall {
                group: i + 1,
                count: group_counts[i],
                min: MIN_GROUP_SIZE,
            });
        }
        Ok(Self {
            rho,
            r,
            group_counts,
            p,
        })
    }

    pub fn null(group_counts: Vec<usize>, p: usize) -> Result<Self> {
        Self::new(0.0, 0.0, group_counts, p)
    }

    pub fn tau(&self) -> f64 {
        let recip: f64 = self.group_counts.iter().map(|&n| 1.0 / n as f64).sum();
        (2.0 * self.r * recip * (self.p as f64).ln()).sqrt()
    }

    pub fn signal_count(&self) -> usize {
        let s = (self.p as f64).powf(1.0 - self.rho);
        // Guard against p^{1−ρ} landing a hair below an integer.
        let rounded = s.round();
        let s = if (s - rounded).abs() < 1e-9 { rounded } else { s.floor() };
        (s as usize).min(self.p)
    }

    pub fn means(&self) -> Vec<Array1<f64>> {
        let mut means = vec![Array1::zeros(self.p); self.group_counts.len()];
        let tau = self.tau();
        if tau > 0.0 {
            means[0].slice_mut(ndarray::s![..self.signal_count()]).fill(tau);
        }
        means
    }
}

/// Draws one grouped sample. A pure function of its arguments.
pub fn generate(scenario: &CovScenario, means: &MeanConfig, law: InnovationLaw, seed: u64) -> Result<GroupedSample> {
    check_dim(scenario.p, means.p)?;
    check_dim(scenario.k(), means.group_counts.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = Sampler::new(law);
    let mu = means.means();
    let groups = scenario
        .factors
        .iter()
        .zip(&means.group_counts)
        .zip(&mu)
        .map(|((factor, &n), m)| {
            let mut rows = Array2::from_shape_simple_fn((n, scenario.p), || sampler.draw(&mut rng));
            factor.apply_rows(&mut rows);
            rows += m;
            rows
        })
        .collect();
    GroupedSample::new(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn scenario2_two_by_two() {
        let sc = build_scenario(ScenarioKind::Scenario2, 2).unwrap();
        assert_eq!(sc.covs[0], array![[1.0, 0.5], [0.5, 1.0]]);
        let l = sc.factors[0].to_dense(2);
        assert_eq!(l[[0, 0]], 1.0);
        assert_eq!(l[[0, 1]], 0.0);
        assert_eq!(l[[1, 0]], 0.5);
        assert!((l[[1, 1]] - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scenario1_sum_entries() {
        let sc = build_scenario(ScenarioKind::Scenario1, 3).unwrap();
        assert_eq!(sc.covs[2][[0, 1]], 0.5);
        assert_eq!(sc.covs[2][[0, 0]], 2.0);
        assert_eq!(sc.covs[2][[0, 2]], 0.25);
    }

    #[test]
    fn factors_reconstruct_covariances() {
        for kind in [ScenarioKind::Scenario1, ScenarioKind::Scenario2] {
            let sc = build_scenario(kind, 100).unwrap();
            for (f, c) in sc.factors.iter().zip(&sc.covs) {
                let l = f.to_dense(100);
                let err = (&l.dot(&l.t()) - c).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(err <= 1e-10, "{kind:?}: {err}");
            }
        }
    }

    #[test]
    fn ar1_structured_matches_dense_cholesky() {
        let l = cholesky(ar1_matrix(30, AR_PHI).view()).unwrap();
        let structured = Factor::Ar1 { phi: AR_PHI }.to_dense(30);
        let err = (&l - &structured).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-12);
        let z = Array2::from_shape_fn((3, 30), |(i, j)| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let mut fast = z.clone();
        Factor::Ar1 { phi: AR_PHI }.apply_rows(&mut fast);
        let slow = z.dot(&l.t());
        assert!((&fast - &slow).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn custom_rejects_indefinite() {
        let bad = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(matches!(
            CovScenario::custom(vec![bad.clone(), bad]),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn signal_counts() {
        let m = |rho| MeanConfig::new(rho, 0.02, vec![48, 60, 72], 200).unwrap();
        assert_eq!(m(0.1).signal_count(), 117);
        assert_eq!(m(0.4).signal_count(), 24);
        assert_eq!(m(0.0).signal_count(), 200);
        assert_eq!(m(1.0).signal_count(), 1);
    }

    #[test]
    fn tau_formula() {
        let m = MeanConfig::new(0.1, 0.02, vec![48, 60, 72], 200).unwrap();
        let expected = (2.0 * 0.02 * (1.0 / 48.0 + 1.0 / 60.0 + 1.0 / 72.0) * 200f64.ln()).sqrt();
        assert!((m.tau() - expected).abs() < 1e-15);
        let means = m.means();
        assert_eq!(means[0][116], expected);
        assert_eq!(means[0][117], 0.0);
        assert!(means[1].iter().chain(means[2].iter()).all(|&v| v == 0.0));
        assert!(MeanConfig::null(vec![5, 5], 3)
            .unwrap()
            .means()
            .iter()
            .all(|m| m.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn mean_config_validation() {
        assert!(MeanConfig::new(1.5, 0.0, vec![5, 5], 3).is_err());
        assert!(MeanConfig::new(0.5, -1.0, vec![5, 5], 3).is_err());
        assert!(MeanConfig::new(0.5, 0.0, vec![3, 5], 3).is_err());
        assert!(MeanConfig::new(0.5, 0.0, vec![5], 3).is_err());
    }

    #[test]
    fn generate_is_deterministic() {
        let sc = build_scenario(ScenarioKind::Scenario1, 7).unwrap();
        let m = MeanConfig::new(0.2, 0.05, vec![4, 5, 6], 7).unwrap();
        for law in [InnovationLaw::StdNormal, InnovationLaw::StdChisq2, InnovationLaw::StdT4] {
            let a = generate(&sc, &m, law, 99).unwrap();
            let b = generate(&sc, &m, law, 99).unwrap();
            let c = generate(&sc, &m, law, 100).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert_eq!(a.counts(), vec![4, 5, 6]);
        }
    }

    #[test]
    fn generate_checks_dimensions() {
        let sc = build_scenario(ScenarioKind::Scenario2, 4).unwrap();
        assert!(generate(
            &sc,
            &MeanConfig::null(vec![5, 5, 5], 5).unwrap(),
            InnovationLaw::StdNormal,
            1
        )
        .is_err());
        assert!(generate(
            &sc,
            &MeanConfig::null(vec![5, 5], 4).unwrap(),
            InnovationLaw::StdNormal,
            1
        )
        .is_err());
    }

    #[test]
    fn law_labels_round_trip() {
        for law in [InnovationLaw::StdNormal, InnovationLaw::StdChisq2, InnovationLaw::StdT4] {
            assert_eq!(InnovationLaw::parse(law.label()), Some(law));
            let json = serde_json::to_string(&law).unwrap();
            assert_eq!(json, format!("\"{}\"", law.label()));
        }
    }
}
