//! Monte-Carlo engine for empirical size and power tables.
//!
//! Every replication draws its data from a seed that is a pure function of
//! `(master_seed, cell, replication index)`, and results are aggregated as
//! integer counts, so reports do not depend on the number of worker threads.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{build_scenario, generate, CovScenario, InnovationLaw, MeanConfig, ScenarioKind};
use crate::error::{Error, Result};
use crate::sample::MIN_GROUP_SIZE;
use crate::testing::{self, normal_upper_quantile};
use crate::variance;
use crate::weight::WeightSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Replications used by the presets unless overridden.
pub const DEFAULT_REPLICATIONS: usize = 2000;
/// Replications used for the reference tables.
pub const REFERENCE_REPLICATIONS: usize = 5000;
pub const DEFAULT_MASTER_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// Weighted test with the simulation-study weights.
    Tw,
    /// Unweighted test (`W = I`).
    Thb,
}

impl TestKind {
    pub fn label(self) -> &'static str {
        match self {
            TestKind::Tw => "tw",
            TestKind::Thb => "thb",
        }
    }

    pub fn weights(self, p: usize) -> Result<WeightSpec> {
        match self {
            TestKind::Tw => WeightSpec::paper_default(p),
            TestKind::Thb => WeightSpec::identity(p),
        }
    }
}

fn default_level() -> f64 {
    0.05
}

fn default_tests() -> Vec<TestKind> {
    vec![TestKind::Tw, TestKind::Thb]
}

/// A simulation grid. Group sizes are `(0.8 n*, n*, 1.2 n*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub dims: Vec<usize>,
    pub n_stars: Vec<usize>,
    pub laws: Vec<InnovationLaw>,
    pub scenarios: Vec<ScenarioKind>,
    pub rhos: Vec<f64>,
    /// Signal strengths; `r = 0` is the null.
    pub rs: Vec<f64>,
    pub replications: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    pub master_seed: u64,
    #[serde(default = "default_tests")]
    pub tests: Vec<TestKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Group sizes `(0.8 n*, n*, 1.2 n*)`; `n*` must be a multiple of 5.
pub fn group_sizes(n_star: usize) -> Result<[usize; 3]> {
    if n_star % 5 != 0 {
        return Err(Error::invalid(format!("n* = {n_star} must be a multiple of 5")));
    }
    let sizes = [n_star / 5 * 4, n_star, n_star / 5 * 6];
    if sizes[0] < MIN_GROUP_SIZE {
        return Err(Error::invalid(format!(
            "n* = {n_star} gives a group of {} observations, at least {MIN_GROUP_SIZE} are required",
            sizes[0]
        )));
    }
    Ok(sizes)
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("dims", self.dims.len()),
            ("n_stars", self.n_stars.len()),
            ("laws", self.laws.len()),
            ("scenarios", self.scenarios.len()),
            ("rhos", self.rhos.len()),
            ("rs", self.rs.len()),
            ("tests", self.tests.len()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, n)| *n == 0) {
            return Err(Error::invalid(format!("{name} must not be empty")));
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications must be at least 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::invalid(format!("level {} is outside (0, 1)", self.level)));
        }
        for &p in &self.dims {
            if p == 0 || p > crate::dense::DENSE_LIMIT {
                return Err(Error::invalid(format!(
                    "dimension {p} is outside [1, {}]",
                    crate::dense::DENSE_LIMIT
                )));
            }
        }
        for &n in &self.n_stars {
            group_sizes(n)?;
        }
        if self.scenarios.contains(&ScenarioKind::Custom) {
            return Err(Error::invalid("simulation grids support scenario1 and scenario2 only"));
        }
        if let Some(rho) = self.rhos.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::invalid(format!("rho = {rho} is outside [0, 1]")));
        }
        if let Some(r) = self.rs.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(Error::invalid(format!("r = {r} must be non-negative")));
        }
        Ok(())
    }

    /// Grid cells in report order: scenario, law, p, n*, ρ, r.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &scenario in &self.scenarios {
            for &law in &self.laws {
                for &p in &self.dims {
                    for &n_star in &self.n_stars {
                        for &rho in &self.rhos {
                            for &r in &self.rs {
                                out.push(Cell {
                                    scenario,
                                    law,
                                    p,
                                    n_star,
                                    rho,
                                    r,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// One parameter combination of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub scenario: ScenarioKind,
    pub law: InnovationLaw,
    pub p: usize,
    pub n_star: usize,
    pub rho: f64,
    pub r: f64,
}

impl Cell {
    /// Stable 64-bit identifier (FNV-1a over the cell's canonical fields).
    pub fn id(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        feed(self.scenario.label().as_bytes());
        feed(self.law.label().as_bytes());
        feed(&(self.p as u64).to_le_bytes());
        feed(&(self.n_star as u64).to_le_bytes());
        feed(&self.rho.to_bits().to_le_bytes());
        feed(&self.r.to_bits().to_le_bytes());
        h
    }

    pub fn group_sizes(&self) -> Result<[usize; 3]> {
        group_sizes(self.n_star)
    }

    pub fn mean_config(&self) -> Result<MeanConfig> {
        MeanConfig::new(self.rho, self.r, self.group_sizes()?.to_vec(), self.p)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replication `t` in a cell.
pub fn replication_seed(master_seed: u64, cell_id: u64, t: u64) -> u64 {
    splitmix64(splitmix64(master_seed ^ splitmix64(cell_id)) ^ t)
}

/// Aggregated outcome of one test in one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    #[serde(flatten)]
    pub cell: Cell,
    pub test: TestKind,
    pub rejections: u64,
    pub degenerate_count: u64,
    pub replications: u64,
    /// Wall-clock seconds spent on the cell (shared by its tests). Not written
    /// to CSV so that reports are byte-identical across runs.
    pub wall_time: f64,
}

impl CellResult {
    pub fn rejection_rate(&self) -> f64 {
        self.rejections as f64 / self.replications as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub rows: Vec<CellResult>,
    pub master_seed: u64,
    pub version: String,
}

impl SimReport {
    pub fn find(&self, cell: &Cell, test: TestKind) -> Option<&CellResult> {
        self.rows.iter().find(|r| r.test == test && r.cell == *cell)
    }
}

struct Prepared {
    scenario: CovScenario,
    means: MeanConfig,
    weights: Vec<(TestKind, WeightSpec)>,
}

fn prepare(cell: &Cell, tests: &[TestKind]) -> Result<Prepared> {
    let scenario = build_scenario(cell.scenario, cell.p)?;
    let means = cell.mean_config()?;
    let weights = tests
        .iter()
        .map(|&t| Ok((t, t.weights(cell.p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        scenario,
        means,
        weights,
    })
}

/// Per-test `(rejections, degenerate)` counts.
type Counts = Vec<(u64, u64)>;

fn run_cell(cfg: &SimConfig, cell: &Cell, critical: f64) -> Result<Counts> {
    let prep = prepare(cell, &cfg.tests)?;
    let id = cell.id();
    let zero = vec![(0u64, 0u64); cfg.tests.len()];
    (0..cfg.replications as u64)
        .into_par_iter()
        .map(|t| -> Result<Counts> {
            let seed = replication_seed(cfg.master_seed, id, t);
            let s = generate(&prep.scenario, &prep.means, cell.law, seed)?;
            prep.weights
                .iter()
                .map(|(_, w)| {
                    let summaries = crate::sample::summarize(&s, w)?;
                    let t_n = crate::statistic::compute_tn_from_summaries(&summaries, w)?.t_n;
                    let var = variance::estimate_from_summaries(&summaries, w)?.sigma_hat_sq;
                    let o = testing::decide(t_n, var, cfg.level, critical);
                    Ok((o.reject as u64, o.degenerate as u64))
                })
                .collect()
        })
        .try_fold(
            || zero.clone(),
            |mut acc, item| {
                for (a, b) in acc.iter_mut().zip(item?) {
                    a.0 += b.0;
                    a.1 += b.1;
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || zero.clone(),
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.0 += y.0;
                    x.1 += y.1;
                }
                Ok(a)
            },
        )
}

/// Runs every cell of the grid on the current rayon pool.
pub fn run_grid(cfg: &SimConfig) -> Result<SimReport> {
    run_grid_with_progress(cfg, |_| {})
}

/// Like [`run_grid`], calling `on_cell` with the rows of each finished cell.
pub fn run_grid_with_progress(cfg: &SimConfig, mut on_cell: impl FnMut(&[CellResult])) -> Result<SimReport> {
    cfg.validate()?;
    let critical = normal_upper_quantile(cfg.level)?;
    let mut rows = Vec::new();
    for cell in cfg.cells() {
        let start = Instant::now();
        let counts = run_cell(cfg, &cell, critical)?;
        let wall_time = start.elapsed().as_secs_f64();
        let first = rows.len();
        for (&test, (rejections, degenerate_count)) in cfg.tests.iter().zip(counts) {
            rows.push(CellResult {
                cell,
                test,
                rejections,
                degenerate_count,
                replications: cfg.replications as u64,
                wall_time,
            });
        }
        on_cell(&rows[first..]);
    }
    Ok(SimReport {
        rows,
        master_seed: cfg.master_seed,
        version: VERSION.to_string(),
    })
}

/// Runs the grid on a dedicated pool of `threads` workers.
pub fn run_grid_with_threads(cfg: &SimConfig, threads: usize) -> Result<SimReport> {
    run_grid_on_pool(cfg, threads, |_| {})
}

pub fn run_grid_on_pool(
    cfg: &SimConfig,
    threads: usize,
    on_cell: impl FnMut(&[CellResult]) + Send,
) -> Result<SimReport> {
    if threads == 0 {
        return Err(Error::invalid("thread count must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_grid_with_progress(cfg, on_cell))
}

/// CSV column order of [`write_csv`].
pub const CSV_COLUMNS: [&str; 14] = [
    "p",
    "n_star",
    "law",
    "scenario",
    "rho",
    "r",
    "test",
    "rejection_rate",
    "rejection_rate_full",
    "rejections",
    "degenerate_count",
    "replications",
    "master_seed",
    "version",
];

/// Writes one row per cell and test, preceded by a header.
pub fn write_csv<W: Write>(report: &SimReport, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(CSV_COLUMNS)?;
    for row in &report.rows {
        let rate = row.rejection_rate();
        wtr.write_record([
            row.cell.p.to_string(),
            row.cell.n_star.to_string(),
            row.cell.law.label().to_string(),
            row.cell.scenario.label().to_string(),
            row.cell.rho.to_string(),
            row.cell.r.to_string(),
            row.test.label().to_string(),
            format!("{rate:.4}"),
            rate.to_string(),
            row.rejections.to_string(),
            row.degenerate_count.to_string(),
            row.replications.to_string(),
            report.master_seed.to_string(),
            report.version.clone(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn emit_csv(report: &SimReport, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(report, std::io::BufWriter::new(file))
}

fn field<T: FromStr>(rec: &csv::StringRecord, idx: usize) -> Result<T> {
    let raw = rec.get(idx).unwrap_or_default();
    raw.parse()
        .map_err(|_| Error::Parse(format!("column {} has unreadable value {raw:?}", CSV_COLUMNS[idx])))
}

/// Reads a report written by [`write_csv`]. Wall times are not stored and come back as 0.
pub fn parse_csv<R: Read>(input: R) -> Result<SimReport> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::Parse("unexpected report header".into()));
    }
    let mut rows = Vec::new();
    let mut master_seed = None;
    let mut version = None;
    for rec in rdr.records() {
        let rec = rec?;
        let law_raw = rec.get(2).unwrap_or_default();
        let law = InnovationLaw::parse(law_raw).ok_or_else(|| Error::Parse(format!("unknown law {law_raw:?}")))?;
        let scenario = match rec.get(3).unwrap_or_default() {
            "scenario1" => ScenarioKind::Scenario1,
            "scenario2" => ScenarioKind::Scenario2,
            other => return Err(Error::Parse(format!("unknown scenario {other:?}"))),
        };
        let test = match rec.get(6).unwrap_or_default() {
            "tw" => TestKind::Tw,
            "thb" => TestKind::Thb,
            other => return Err(Error::Parse(format!("unknown test {other:?}"))),
        };
        rows.push(CellResult {
            cell: Cell {
                scenario,
                law,
                p: field(&rec, 0)?,
                n_star: field(&rec, 1)?,
                rho: field(&rec, 4)?,
                r: field(&rec, 5)?,
            },
            test,
            rejections: field(&rec, 9)?,
            degenerate_count: field(&rec, 10)?,
            replications: field(&rec, 11)?,
            wall_time: 0.0,
        });
        master_seed = Some(field(&rec, 12)?);
        version = Some(rec.get(13).unwrap_or_default().to_string());
    }
    Ok(SimReport {
        rows,
        master_seed: master_seed.unwrap_or(0),
        version: version.unwrap_or_else(|| VERSION.to_string()),
    })
}

/// Grids of the reference size and power tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TablePreset {
    Sizes1,
    Sizes2,
    PowersS1Normal,
    PowersS1Chisq,
    PowersS1T4,
    PowersS2Normal,
    PowersS2Chisq,
    PowersS2T4,
}

impl TablePreset {
    pub const ALL: [TablePreset; 8] = [
        TablePreset::Sizes1,
        TablePreset::Sizes2,
        TablePreset::PowersS1Normal,
        TablePreset::PowersS1Chisq,
        TablePreset::PowersS1T4,
        TablePreset::PowersS2Normal,
        TablePreset::PowersS2Chisq,
        TablePreset::PowersS2T4,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TablePreset::Sizes1 => "sizes1",
            TablePreset::Sizes2 => "sizes2",
            TablePreset::PowersS1Normal => "powers-s1-normal",
            TablePreset::PowersS1Chisq => "powers-s1-chisq",
            TablePreset::PowersS1T4 => "powers-s1-t4",
            TablePreset::PowersS2Normal => "powers-s2-normal",
            TablePreset::PowersS2Chisq => "powers-s2-chisq",
            TablePreset::PowersS2T4 => "powers-s2-t4",
        }
    }

    pub fn config(self) -> SimConfig {
        self.config_with_replications(DEFAULT_REPLICATIONS)
    }

    pub fn config_with_replications(self, replications: usize) -> SimConfig {
        use InnovationLaw::*;
        use ScenarioKind::*;
        let (scenario, laws, power) = match self {
            TablePreset::Sizes1 => (Scenario1, vec![StdNormal, StdChisq2, StdT4], false),
            TablePreset::Sizes2 => (Scenario2, vec![StdNormal, StdChisq2, StdT4], false),
            TablePreset::PowersS1Normal => (Scenario1, vec![StdNormal], true),
            TablePreset::PowersS1Chisq => (Scenario1, vec![StdChisq2], true),
            TablePreset::PowersS1T4 => (Scenario1, vec![StdT4], true),
            TablePreset::PowersS2Normal => (Scenario2, vec![StdNormal], true),
            TablePreset::PowersS2Chisq => (Scenario2, vec![StdChisq2], true),
            TablePreset::PowersS2T4 => (Scenario2, vec![StdT4], true),
        };
        let (rhos, rs) = if power {
            (vec![0.1, 0.2, 0.3, 0.4], vec![0.02, 0.04, 0.06, 0.08])
        } else {
            (vec![0.0], vec![0.0])
        };
        SimConfig {
            dims: vec![200, 500, 800],
            n_stars: vec![60, 100],
            laws,
            scenarios: vec![scenario],
            rhos,
            rs,
            replications,
            level: 0.05,
            master_seed: DEFAULT_MASTER_SEED,
            tests: default_tests(),
            note: Some(format!(
                "{}: reference table used {REFERENCE_REPLICATIONS} replications",
                self.id()
            )),
        }
    }
}

impl fmt::Display for TablePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TablePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        TablePreset::ALL
            .into_iter()
            .find(|t| t.id() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown table preset {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(reps: usize) -> SimConfig {
        SimConfig {
            dims: vec![6],
            n_stars: vec![10],
            laws: vec![InnovationLaw::StdNormal],
            scenarios: vec![ScenarioKind::Scenario1],
            rhos: vec![0.5],
            rs: vec![0.0, 0.5],
            replications: reps,
            level: 0.05,
            master_seed: 7,
            tests: vec![TestKind::Tw, TestKind::Thb],
            note: None,
        }
    }

    #[test]
    fn group_size_rules() {
        assert_eq!(group_sizes(60).unwrap(), [48, 60, 72]);
        assert_eq!(group_sizes(100).unwrap(), [80, 100, 120]);
        assert!(group_sizes(62).is_err());
        assert!(group_sizes(0).is_err());
        assert_eq!(group_sizes(5).unwrap(), [4, 5, 6]);
        assert_eq!(group_sizes(10).unwrap(), [8, 10, 12]);
    }

    #[test]
    fn preset_grid_sizes() {
        let s1 = TablePreset::Sizes1.config();
        assert_eq!(s1.cells().len(), 18);
        assert!(s1.rs.iter().all(|&r| r == 0.0));
        let p = TablePreset::PowersS1Normal.config();
        assert_eq!(p.cells().len(), 96);
        assert_eq!(p.replications, DEFAULT_REPLICATIONS);
        assert!(p.note.as_deref().unwrap().contains("5000"));
        for t in TablePreset::ALL {
            assert_eq!(t.id().parse::<TablePreset>().unwrap(), t);
            t.config().validate().unwrap();
        }
        assert!("powers-s3-normal".parse::<TablePreset>().is_err());
    }

    #[test]
    fn presets_cover_printed_pairs() {
        let cfg = TablePreset::Sizes2.config();
        let mut pairs: Vec<(usize, usize)> = cfg.cells().iter().map(|c| (c.p, c.n_star)).collect();
        pairs.sort();
        pairs.dedup();
        assert_eq!(
            pairs,
            vec![(200, 60), (200, 100), (500, 60), (500, 100), (800, 60), (800, 100)]
        );
    }

    #[test]
    fn single_replication_rates_are_binary() {
        let rep = run_grid(&tiny(1)).unwrap();
        assert_eq!(rep.rows.len(), 4);
        assert!(rep
            .rows
            .iter()
            .all(|r| r.rejection_rate() == 0.0 || r.rejection_rate() == 1.0));
    }

    #[test]
    fn thread_count_does_not_change_counts() {
        let cfg = tiny(40);
        let a = run_grid_with_threads(&cfg, 1).unwrap();
        let b = run_grid_with_threads(&cfg, 3).unwrap();
        let strip = |r: &SimReport| {
            r.rows
                .iter()
                .map(|c| (c.rejections, c.degenerate_count))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn csv_round_trip() {
        let rep = run_grid(&tiny(15)).unwrap();
        let mut buf = Vec::new();
        write_csv(&rep, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 1 + rep.rows.len());
        let back = parse_csv(buf.as_slice()).unwrap();
        assert_eq!(back.master_seed, 7);
        for (a, b) in rep.rows.iter().zip(&back.rows) {
            assert_eq!(a.cell, b.cell);
            assert_eq!(
                (a.rejections, a.degenerate_count, a.replications),
                (b.rejections, b.degenerate_count, b.replications)
            );
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let rep = SimReport {
            rows: vec![],
            master_seed: 1,
            version: VERSION.into(),
        };
        let mut buf = Vec::new();
        write_csv(&rep, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn config_json_rejects_unknown_keys() {
        let mut v = serde_json::to_value(tiny(3)).unwrap();
        assert!(SimConfig::from_json(&v.to_string()).is_ok());
        v["bogus"] = serde_json::json!(1);
        assert!(SimConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = tiny(3);
        c.replications = 0;
        assert!(c.validate().is_err());
        let mut c = tiny(3);
        c.n_stars = vec![12];
        assert!(c.validate().is_err());
        let mut c = tiny(3);
        c.scenarios = vec![ScenarioKind::Custom];
        assert!(c.validate().is_err());
        let mut c = tiny(3);
        c.rs = vec![];
        assert!(c.validate().is_err());
    }

    #[test]
    fn seeds_differ_across_cells_and_replications() {
        let cells = tiny(1).cells();
        assert_ne!(cells[0].id(), cells[1].id());
        assert_ne!(
            replication_seed(1, cells[0].id(), 0),
            replication_seed(1, cells[0].id(), 1)
        );
        assert_ne!(
            replication_seed(1, cells[0].id(), 0),
            replication_seed(2, cells[0].id(), 0)
        );
    }
}
