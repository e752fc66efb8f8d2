//! Experiment orchestration and result emission.
//!
//! Results file columns, in order:
//! `run,seed,algorithm,n,throughput,lp_bound,opt,delta_ratio,uncovered,slots_used,wall_ms,note`.
//! Empty cells mean "not computed"; `note` carries a per-run failure
//! message. The summary file alongside has `algorithm,n,count,mean,stddev`
//! over rows with a throughput value.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{run_baseline, BaselineKind};
use crate::centralized::{app_schedule_from, exhaustive_opt_with, ExhaustiveLimits};
use crate::distributed::{run_distributed_frame, ProtocolParams};
use crate::error::{domain, Error, Result};
use crate::lp::{solve_relaxation, FractionalSolution};
use crate::radio::NetworkInstance;
use crate::scenario::{generate_scenario, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "lp-bound")]
    LpBound,
    #[serde(rename = "app")]
    App,
    #[serde(rename = "pm")]
    Pm,
    #[serde(rename = "pg")]
    Pg,
    #[serde(rename = "pcg")]
    Pcg,
    #[serde(rename = "opt")]
    Opt,
    #[serde(rename = "distributed", alias = "dist")]
    Distributed,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::LpBound,
        Algorithm::App,
        Algorithm::Pm,
        Algorithm::Pg,
        Algorithm::Pcg,
        Algorithm::Opt,
        Algorithm::Distributed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LpBound => "lp-bound",
            Algorithm::App => "app",
            Algorithm::Pm => "pm",
            Algorithm::Pg => "pg",
            Algorithm::Pcg => "pcg",
            Algorithm::Opt => "opt",
            Algorithm::Distributed => "distributed",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "dist" {
            return Ok(Algorithm::Distributed);
        }
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| domain(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Pair counts to sweep; `[scenario.pairs]` when empty.
    pub pair_counts: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub opt_max_links: usize,
    pub opt_max_slots: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let limits = ExhaustiveLimits::default();
        SweepConfig {
            pair_counts: Vec::new(),
            algorithms: vec![
                Algorithm::LpBound,
                Algorithm::App,
                Algorithm::Pm,
                Algorithm::Pg,
                Algorithm::Pcg,
            ],
            opt_max_links: limits.max_links,
            opt_max_slots: limits.max_slots,
        }
    }
}

/// Top-level configuration file: a `[scenario]` table and an optional
/// `[experiment]` table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub experiment: SweepConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn pair_counts(&self) -> Vec<usize> {
        if self.experiment.pair_counts.is_empty() {
            vec![self.scenario.pairs]
        } else {
            self.experiment.pair_counts.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for pairs in self.pair_counts() {
            ScenarioConfig {
                pairs,
                ..self.scenario.clone()
            }
            .validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub run: usize,
    pub seed: u64,
    pub algorithm: String,
    pub n: usize,
    pub throughput: Option<f64>,
    pub lp_bound: Option<f64>,
    pub opt: Option<f64>,
    pub delta_ratio: Option<f64>,
    pub uncovered: Option<usize>,
    pub slots_used: Option<usize>,
    pub wall_ms: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub n: usize,
    pub count: usize,
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Mean and sample standard deviation per `(algorithm, n)`, in first
    /// appearance order.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut groups: Vec<((String, usize), Vec<f64>)> = Vec::new();
        for row in &self.rows {
            let key = (row.algorithm.clone(), row.n);
            let idx = match groups.iter().position(|(k, _)| *k == key) {
                Some(i) => i,
                None => {
                    groups.push((key, Vec::new()));
                    groups.len() - 1
                }
            };
            if let Some(a) = row.throughput {
                groups[idx].1.push(a);
            }
        }
        groups
            .into_iter()
            .map(|((algorithm, n), xs)| {
                let count = xs.len();
                let mean = if count == 0 {
                    f64::NAN
                } else {
                    xs.iter().sum::<f64>() / count as f64
                };
                let stddev = if count < 2 {
                    0.0
                } else {
                    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
                };
                SummaryRow {
                    algorithm,
                    n,
                    count,
                    mean,
                    stddev,
                }
            })
            .collect()
    }

    /// Copy with every timing column zeroed.
    pub fn without_timing(&self) -> ResultTable {
        ResultTable {
            rows: self
                .rows
                .iter()
                .map(|r| ResultRow {
                    wall_ms: 0.0,
                    ..r.clone()
                })
                .collect(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Scenario seed for one run; depends only on the master seed, `n` and
/// the run index within that `n`.
pub fn run_seed(master: u64, n: usize, run: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n as u64) ^ run as u64)
}

struct RunContext<'a> {
    instance: &'a NetworkInstance,
    config: &'a ScenarioConfig,
    sweep: &'a SweepConfig,
    seed: u64,
    lp: Option<std::result::Result<FractionalSolution, String>>,
    opt: Option<std::result::Result<Option<f64>, String>>,
}

impl RunContext<'_> {
    fn lp(&mut self) -> std::result::Result<FractionalSolution, String> {
        let (inst, t) = (self.instance, self.config.frame_length);
        self.lp
            .get_or_insert_with(|| solve_relaxation(inst, t).map_err(|e| e.to_string()))
            .clone()
    }

    fn opt(&mut self) -> std::result::Result<Option<f64>, String> {
        let limits = ExhaustiveLimits {
            max_links: self.sweep.opt_max_links,
            max_slots: self.sweep.opt_max_slots,
        };
        let (inst, t) = (self.instance, self.config.frame_length);
        self.opt
            .get_or_insert_with(|| {
                exhaustive_opt_with(inst, t, limits)
                    .map(|o| o.map(|o| o.throughput))
                    .map_err(|e| e.to_string())
            })
            .clone()
    }
}

fn blank_row(run: usize, seed: u64, algorithm: Algorithm, n: usize) -> ResultRow {
    ResultRow {
        run,
        seed,
        algorithm: algorithm.name().to_string(),
        n,
        throughput: None,
        lp_bound: None,
        opt: None,
        delta_ratio: None,
        uncovered: None,
        slots_used: None,
        wall_ms: 0.0,
        note: String::new(),
    }
}

fn evaluate(ctx: &mut RunContext<'_>, algorithm: Algorithm, row: &mut ResultRow) {
    let inst = ctx.instance;
    let t = ctx.config.frame_length;
    let algo_seed = splitmix64(ctx.seed ^ 0xA5A5_A5A5);
    let outcome: std::result::Result<(), String> = (|| {
        match algorithm {
            Algorithm::LpBound => {
                let frac = ctx.lp()?;
                row.throughput = Some(frac.objective);
            }
            Algorithm::App => {
                let frac = ctx.lp()?;
                let out = app_schedule_from(inst, &frac, algo_seed);
                row.throughput = Some(out.throughput());
                row.delta_ratio = Some(out.delta_ratio());
                row.uncovered = Some(out.uncovered.len());
                if !out.uncovered.is_empty() {
                    row.note = "incomplete coverage; lp bound does not apply".into();
                }
            }
            Algorithm::Pm | Algorithm::Pg | Algorithm::Pcg => {
                let kind = match algorithm {
                    Algorithm::Pm => BaselineKind::ProtocolModel,
                    Algorithm::Pg => BaselineKind::PhysicalGreedy,
                    _ => BaselineKind::PhysicalConflictGraph,
                };
                let out = run_baseline(kind, inst, ctx.config.interference_range, t)
                    .map_err(|e| e.to_string())?;
                let a = crate::feasibility::throughput(inst, &out.schedule)
                    .map_err(|e| e.to_string())?;
                row.throughput = Some(a);
                row.uncovered = Some(out.uncovered.len());
            }
            Algorithm::Opt => match ctx.opt()? {
                Some(a) => {
                    row.throughput = Some(a);
                    row.uncovered = Some(0);
                }
                None => return Err("no covering schedule within the frame".into()),
            },
            Algorithm::Distributed => {
                let params = ProtocolParams::for_instance(inst).map_err(|e| e.to_string())?;
                let trace = run_distributed_frame(inst, &params, t, algo_seed)
                    .map_err(|e| e.to_string())?;
                row.throughput = Some(trace.throughput(inst));
                row.uncovered = Some(trace.uncovered().len());
                row.slots_used = trace.slots_used;
            }
        }
        Ok(())
    })();
    if let Err(msg) = outcome {
        row.note = msg;
    }
}

fn run_one(config: &ExperimentConfig, run: usize, n: usize, index: usize) -> Vec<ResultRow> {
    let scenario = ScenarioConfig {
        pairs: n,
        ..config.scenario.clone()
    };
    let seed = run_seed(scenario.seed, n, index);
    let algorithms = &config.experiment.algorithms;
    let instance = match generate_scenario(&scenario, seed) {
        Ok(inst) => inst,
        Err(e) => {
            return algorithms
                .iter()
                .map(|&a| ResultRow {
                    note: e.to_string(),
                    ..blank_row(run, seed, a, n)
                })
                .collect()
        }
    };
    let mut ctx = RunContext {
        instance: &instance,
        config: &scenario,
        sweep: &config.experiment,
        seed,
        lp: None,
        opt: None,
    };
    let mut rows: Vec<ResultRow> = algorithms
        .iter()
        .map(|&a| {
            let mut row = blank_row(run, seed, a, n);
            let start = Instant::now();
            evaluate(&mut ctx, a, &mut row);
            row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            row
        })
        .collect();
    let lp_bound = ctx.lp.and_then(|r| r.ok()).map(|f| f.objective);
    let opt = ctx.opt.and_then(|r| r.ok()).flatten();
    for row in &mut rows {
        row.lp_bound = lp_bound;
        row.opt = opt;
    }
    rows
}

/// Runs every `(n, run)` pair in parallel; rows come back ordered by run id
/// and then by the configured algorithm order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    if config.experiment.algorithms.is_empty() {
        return Ok(ResultTable::default());
    }
    let runs = config.scenario.runs;
    let units: Vec<(usize, usize, usize)> = config
        .pair_counts()
        .into_iter()
        .enumerate()
        .flat_map(|(i, n)| (0..runs).map(move |r| (i * runs + r, n, r)))
        .collect();
    let rows = units
        .par_iter()
        .map(|&(run, n, index)| run_one(config, run, n, index))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(ResultTable { rows })
}

/// Summary file path written next to `path`: `results.csv` becomes
/// `results.summary.csv`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.summary.csv"))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.display().to_string(),
            source,
        },
        other => Error::Config(format!("{}: {other:?}", path.display())),
    }
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub const RESULT_COLUMNS: [&str; 12] = [
    "run",
    "seed",
    "algorithm",
    "n",
    "throughput",
    "lp_bound",
    "opt",
    "delta_ratio",
    "uncovered",
    "slots_used",
    "wall_ms",
    "note",
];

pub const SUMMARY_COLUMNS: [&str; 5] = ["algorithm", "n", "count", "mean", "stddev"];

/// Writes the results file and its summary companion.
pub fn emit_results(table: &ResultTable, path: &Path) -> Result<()> {
    write_csv(path, &RESULT_COLUMNS, &table.rows)?;
    write_csv(&summary_path(path), &SUMMARY_COLUMNS, &table.summary())
}

pub fn read_results(path: &Path) -> Result<ResultTable> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(file);
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<ResultRow>, _>>()
        .map_err(|e| csv_err(path, e))?;
    Ok(ResultTable { rows })
}
