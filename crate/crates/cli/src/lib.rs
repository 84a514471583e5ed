//! Command-line front end for the `steerseq` library.
//!
//! A [`RunConfig`] comes from flags, a JSON file, or both (flags win). [`run`]
//! executes it, prints a short summary and, with an output path, writes the
//! full result as CSV or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use steerseq::solver::{DEFAULT_OVERLAP_STEP, DEFAULT_REGION_STEP, PAIRS_3X2};
use steerseq::steering::ClassicalBoundTable;
use steerseq::{
    check_3x2_overlap_pairs, evaluate, evaluate_verified, greedy_chain, min_purity,
    region_scan_2x2, sharpness_ranges, two_bob_best, Error, RegionScan, RegionSummary, Scenario,
    SharpnessInterval, SteeringReport, SUPPORTED_SETTINGS,
};
use thiserror::Error as ThisError;

pub mod table1;

pub use table1::{reproduce_table1, table1_csv, Table1Row};

/// Largest closed-form vs. simulation deviation accepted by `verify`.
pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Bounds,
    Eval,
    Ranges,
    Maxalices,
    Minpurity,
    Region2x2,
    Check3x2,
    Verify,
    Table1,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every field is optional so that a file and the flags can be layered; the
/// command decides which ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub n_settings: Option<usize>,
    pub mu: Option<f64>,
    pub alice_sharpness: Option<Vec<f64>>,
    pub bob_sharpness: Option<Vec<f64>>,
    pub n_alices: Option<usize>,
    pub n_bobs: Option<usize>,
    pub grid_step: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    /// `maxalices` over every supported setting count.
    pub all: Option<bool>,
    pub verify: Option<bool>,
    /// `verify` sweep size and seed.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// `check3x2` pairs to monitor, as `(alice, bob)`; all six by default.
    pub pairs: Option<Vec<(usize, usize)>>,
}

impl RunConfig {
    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            command: over.command.or(self.command),
            n_settings: over.n_settings.or(self.n_settings),
            mu: over.mu.or(self.mu),
            alice_sharpness: over.alice_sharpness.or(self.alice_sharpness),
            bob_sharpness: over.bob_sharpness.or(self.bob_sharpness),
            n_alices: over.n_alices.or(self.n_alices),
            n_bobs: over.n_bobs.or(self.n_bobs),
            grid_step: over.grid_step.or(self.grid_step),
            output_path: over.output_path.or(self.output_path),
            format: over.format.or(self.format),
            all: over.all.or(self.all),
            verify: over.verify.or(self.verify),
            samples: over.samples.or(self.samples),
            seed: over.seed.or(self.seed),
            pairs: over.pairs.or(self.pairs),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "steerseq",
    version,
    about = "Sequential steering sharing on Werner states"
)]
pub struct Cli {
    /// Operation to run; may come from the config file instead.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of measurement settings.
    #[arg(long = "n")]
    pub n_settings: Option<usize>,
    /// Werner purity of the initial state.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Alice sharpness values, first to last.
    #[arg(long = "alice", value_delimiter = ',')]
    pub alice_sharpness: Option<Vec<f64>>,
    /// Bob sharpness values, first to last.
    #[arg(long = "bob", value_delimiter = ',')]
    pub bob_sharpness: Option<Vec<f64>>,
    #[arg(long = "alices")]
    pub n_alices: Option<usize>,
    #[arg(long = "bobs")]
    pub n_bobs: Option<usize>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long = "output")]
    pub output_path: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub all: bool,
    /// Recompute closed-form numbers with the density-matrix simulation.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pairs to monitor in `check3x2`, e.g. `1-1,2-1,3-1`.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    pub pairs: Option<Vec<(usize, usize)>>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("expected ALICE-BOB, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    Ok((a, b))
}

impl Cli {
    /// Merges the optional config file under the flags.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            command: self.command,
            n_settings: self.n_settings,
            mu: self.mu,
            alice_sharpness: self.alice_sharpness,
            bob_sharpness: self.bob_sharpness,
            n_alices: self.n_alices,
            n_bobs: self.n_bobs,
            grid_step: self.grid_step,
            output_path: self.output_path,
            format: self.format,
            all: self.all.then_some(true),
            verify: self.verify.then_some(true),
            samples: self.samples,
            seed: self.seed,
            pairs: self.pairs,
        };
        Ok(base.overlay(flags))
    }
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Model(#[from] Error),
    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(Error::Infeasible(_)) => 2,
            _ => 1,
        }
    }
}

fn missing(field: &str) -> CliError {
    CliError::Input(format!("missing required field `{field}`"))
}

/// A finished command: the summary for the terminal and the payload for the
/// output file.
pub struct Outcome {
    pub summary: String,
    pub csv: String,
    pub json: String,
    /// Nonzero when the command ran but its check failed.
    pub status: i32,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub scenario: Scenario,
    pub report: SteeringReport,
    pub oracle_max_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangesOutput {
    pub n_settings: usize,
    pub n_alices: usize,
    pub mu: f64,
    pub intervals: Vec<SharpnessInterval>,
    pub oracle_max_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub n_settings: usize,
    pub max_alices: usize,
    /// Greedy sharpness of each Alice against a sharp Bob.
    pub sharpness: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxAlicesOutput {
    pub mu: f64,
    pub entries: Vec<ChainEntry>,
    pub oracle_max_deviation: Option<f64>,
}

impl MaxAlicesOutput {
    pub fn map(&self) -> BTreeMap<usize, usize> {
        self.entries
            .iter()
            .map(|e| (e.n_settings, e.max_alices))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinPurityOutput {
    pub n_settings: usize,
    pub n_alices: usize,
    pub n_bobs: usize,
    pub mu_min: f64,
    pub oracle_max_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapOutput {
    pub n_settings: usize,
    pub mu: f64,
    pub grid_step: f64,
    pub pairs: Vec<(usize, usize)>,
    pub overlap: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub samples: usize,
    pub seed: u64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsOutput {
    pub bounds: BTreeMap<usize, f64>,
}

fn bounds_outcome() -> Outcome {
    let bounds: BTreeMap<usize, f64> = ClassicalBoundTable.iter().collect();
    let mut summary = String::from("classical bounds\n");
    let mut csv = String::from("n,bound\n");
    for (n, c) in &bounds {
        let _ = writeln!(summary, "  C_{n:<2} = {c:.6}");
        let _ = writeln!(csv, "{n},{c:.6}");
    }
    Outcome {
        summary,
        csv,
        json: to_json(&BoundsOutput { bounds }),
        status: 0,
    }
}

fn eval_outcome(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scenario = Scenario::new(
        cfg.mu.ok_or_else(|| missing("mu"))?,
        cfg.n_settings.ok_or_else(|| missing("n_settings"))?,
        cfg.alice_sharpness
            .clone()
            .ok_or_else(|| missing("alice_sharpness"))?,
        cfg.bob_sharpness
            .clone()
            .ok_or_else(|| missing("bob_sharpness"))?,
    )?;
    let (report, dev) = if cfg.verify == Some(true) {
        let (r, d) = evaluate_verified(&scenario)?;
        (r, Some(d))
    } else {
        (evaluate(&scenario)?, None)
    };
    let mut summary = format!(
        "N = {}, mu = {}, bound = {:.6}\n",
        scenario.n_settings(),
        scenario.mu(),
        report.bound
    );
    for (i, row) in report.values.iter().enumerate() {
        for (p, s) in row.iter().enumerate() {
            let tag = if report.violated[i][p] {
                "violated"
            } else {
                "not violated"
            };
            let _ = writeln!(summary, "  S(A{}, B{}) = {s:.6}  {tag}", i + 1, p + 1);
        }
    }
    let _ = writeln!(
        summary,
        "{} of {} pairs violate",
        report.violation_count(),
        scenario.n_alices() * scenario.n_bobs()
    );
    push_deviation(&mut summary, dev);
    let csv = report.to_csv();
    let out = EvalOutput {
        scenario,
        report,
        oracle_max_deviation: dev,
    };
    Ok(Outcome {
        summary,
        csv,
        json: to_json(&out),
        status: 0,
    })
}

fn push_deviation(summary: &mut String, dev: Option<f64>) {
    if let Some(d) = dev {
        let _ = writeln!(summary, "max |closed form - simulation| = {d:.3e}");
    }
}

fn verify_scenarios(scenarios: &[Scenario]) -> Result<f64, CliError> {
    let devs = scenarios
        .par_iter()
        .map(|s| evaluate_verified(s).map(|(_, d)| d))
        .collect::<Result<Vec<f64>, Error>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

fn ranges_outcome(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n_settings.ok_or_else(|| missing("n_settings"))?;
    let n_alices = cfg.n_alices.ok_or_else(|| missing("n_alices"))?;
    let mu = cfg.mu.unwrap_or(1.0);
    let intervals = sharpness_ranges(n, n_alices, mu)?;
    let dev = if cfg.verify == Some(true) {
        // Each endpoint with the other observers at their lower ends, last
        // Alice and Bob as published.
        let lows: Vec<f64> = intervals.iter().map(|iv| iv.lo).collect();
        let highs: Vec<f64> = intervals.iter().map(|iv| iv.hi).collect();
        let split = |v: &[f64]| Scenario::new(mu, n, v[..n_alices].to_vec(), vec![v[n_alices]]);
        Some(verify_scenarios(&[split(&lows)?, split(&highs)?])?)
    } else {
        None
    };
    let mut summary = format!("N = {n}, {n_alices} Alice(s), one Bob, mu = {mu}\n");
    let mut csv = String::from("observer,lo,hi\n");
    for iv in &intervals {
        let _ = writeln!(summary, "  {}: [{:.6}, {:.6}]", iv.observer, iv.lo, iv.hi);
        let _ = writeln!(csv, "{},{:.6},{:.6}", iv.observer, iv.lo, iv.hi);
    }
    push_deviation(&mut summary, dev);
    let out = RangesOutput {
        n_settings: n,
        n_alices,
        mu,
        intervals,
        oracle_max_deviation: dev,
    };
    Ok(Outcome {
        summary,
        csv,
        json: to_json(&out),
        status: 0,
    })
}

fn maxalices_outcome(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mu = cfg.mu.unwrap_or(1.0);
    let settings: Vec<usize> = match (cfg.all, cfg.n_settings) {
        (Some(true), _) | (_, None) => SUPPORTED_SETTINGS.to_vec(),
        (_, Some(n)) => vec![n],
    };
    let entries = settings
        .iter()
        .map(|&n| {
            greedy_chain(n, mu).map(|sharpness| ChainEntry {
                n_settings: n,
                max_alices: sharpness.len(),
                sharpness,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let dev = if cfg.verify == Some(true) {
        let scenarios = entries
            .iter()
            .filter(|e| e.max_alices > 0)
            .map(|e| Scenario::new(mu, e.n_settings, e.sharpness.clone(), vec![1.0]))
            .collect::<Result<Vec<_>, Error>>()?;
        Some(verify_scenarios(&scenarios)?)
    } else {
        None
    };
    let mut summary = format!("maximum number of Alices steering one sharp Bob, mu = {mu}\n");
    let mut csv = String::from("n,max_alices\n");
    for e in &entries {
        let _ = writeln!(summary, "  N = {:<2} -> {}", e.n_settings, e.max_alices);
        let _ = writeln!(csv, "{},{}", e.n_settings, e.max_alices);
    }
    push_deviation(&mut summary, dev);
    let out = MaxAlicesOutput {
        mu,
        entries,
        oracle_max_deviation: dev,
    };
    Ok(Outcome {
        summary,
        csv,
        json: to_json(&out),
        status: 0,
    })
}

fn minpurity_outcome(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n_settings.ok_or_else(|| missing("n_settings"))?;
    let n_alices = cfg.n_alices.ok_or_else(|| missing("n_alices"))?;
    let n_bobs = cfg.n_bobs.unwrap_or(1);
    let mu_min = min_purity(n, n_alices, n_bobs)?;
    let dev = if cfg.verify == Some(true) {
        let scenario = if n_bobs == 1 || n_alices == 1 {
            let chain = greedy_chain(n, mu_min.min(1.0))?;
            let k = n_alices.max(n_bobs).min(chain.len()).max(1);
            let mut lams = chain.into_iter().take(k).collect::<Vec<_>>();
            lams.resize(k, 1.0);
            Scenario::new(mu_min, n, lams, vec![1.0])?
        } else {
            let (a, b) = if n_alices >= n_bobs {
                (n_alices, n_bobs)
            } else {
                (n_bobs, n_alices)
            };
            debug_assert_eq!(b, 2);
            let best = two_bob_best(n, mu_min, a)?;
            Scenario::new(mu_min, n, best.alice_sharpness, best.bob_sharpness)?
        };
        Some(verify_scenarios(&[scenario])?)
    } else {
        None
    };
    let mut summary =
        format!("N = {n}, {n_alices} Alice(s), {n_bobs} Bob(s): mu_min = {mu_min:.6}\n");
    push_deviation(&mut summary, dev);
    let csv = format!("n,n_alices,n_bobs,mu_min\n{n},{n_alices},{n_bobs},{mu_min:.6}\n");
    let out = MinPurityOutput {
        n_settings: n,
        n_alices,
        n_bobs,
        mu_min,
        oracle_max_deviation: dev,
    };
    Ok(Outcome {
        summary,
        csv,
        json: to_json(&out),
        status: 0,
    })
}

/// One CSV row per grid point.
pub fn region_csv(scan: &RegionScan) -> String {
    let mut out = String::from("lambda1,eta1,s11,s12,s21,s22,in_region\n");
    for s in &scan.samples {
        let [a, b, c, d] = s.values;
        let _ = writeln!(
            out,
            "{:.6},{:.6},{a:.6},{b:.6},{c:.6},{d:.6},{}",
            s.lambda1, s.eta1, s.in_region
        );
    }
    out
}

fn region_outcome(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n_settings.ok_or_else(|| missing("n_settings"))?;
    let mu = cfg.mu.unwrap_or(1.0);
    let step = cfg.grid_step.unwrap_or(DEFAULT_REGION_STEP);
    let scan = region_scan_2x2(n, mu, step)?;
    let summary_data: RegionSummary = scan.summary();
    let dev = if cfg.verify == Some(true) {
        let scenarios = scan
            .boundary_curves
            .iter()
            .flat_map(|c| c.points.iter())
            .map(|&[l, e]| Scenario::new(mu, n, vec![l, 1.0], vec![e, 1.0]))
            .collect::<Result<Vec<_>, Error>>()?;
        Some(verify_scenarios(&scenarios)?)
    } else {
        None
    };
    let mut summary = format!(
        "two Alices, two Bobs, N = {n}, mu = {mu}, grid step {step}: {} of {} points share steering\n",
        scan.cells().count(),
        scan.samples.len()
    );
    let fmt_extent = |e: Option<steerseq::solver::Extent>| match e {
        Some(e) => format!("[{:.6}, {:.6}]", e.lo, e.hi),
        None => "empty".to_string(),
    };
    let _ = writeln!(
        summary,
        "  lambda1 extent:  {}",
        fmt_extent(summary_data.lambda_extent)
    );
    let _ = writeln!(
        summary,
        "  eta1 extent:     {}",
        fmt_extent(summary_data.eta_extent)
    );
    let _ = writeln!(
        summary,
        "  diagonal extent: {}",
        fmt_extent(summary_data.diagonal_extent)
    );
    let _ = writeln!(summary, "  area:            {:.6}", summary_data.area);
    push_deviation(&mut summary, dev);
    Ok(Outcome {
        summary,
        csv: region_csv(&scan),
        json: to_json(&summary_data),
        status: 0,
    })
}

fn overlap_outcome(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n_settings.ok_or_else(|| missing("n_settings"))?;
    let mu = cfg.mu.unwrap_or(1.0);
    let step = cfg.grid_step.unwrap_or(DEFAULT_OVERLAP_STEP);
    let pairs = cfg.pairs.clone().unwrap_or_else(|| PAIRS_3X2.to_vec());
    let overlap = check_3x2_overlap_pairs(n, mu, step, &pairs)?;
    let listed: Vec<String> = pairs.iter().map(|(i, p)| format!("A{i}B{p}")).collect();
    let summary = format!(
        "three Alices, two Bobs, N = {n}, mu = {mu}, grid step {step}, pairs {}: {}\n",
        listed.join(" "),
        if overlap {
            "all violate somewhere"
        } else {
            "no common violation"
        }
    );
    let csv = format!("n,mu,grid_step,overlap\n{n},{mu:.6},{step:.6},{overlap}\n");
    let out = OverlapOutput {
        n_settings: n,
        mu,
        grid_step: step,
        pairs,
        overlap,
    };
    Ok(Outcome {
        summary,
        csv,
        json: to_json(&out),
        status: 0,
    })
}

/// A scenario with every field drawn uniformly: setting count, one to three
/// observers per side, purity and sharpness values.
pub fn random_scenario<R: Rng>(rng: &mut R) -> Scenario {
    let n = SUPPORTED_SETTINGS[rng.gen_range(0..SUPPORTED_SETTINGS.len())];
    let alices = rng.gen_range(1..=3);
    let bobs = rng.gen_range(1..=3);
    let mu = rng.gen_range(0.0..=1.0);
    let lam = (0..alices).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let eta = (0..bobs).map(|_| rng.gen_range(0.0..=1.0)).collect();
    Scenario::new(mu, n, lam, eta).expect("sampled inside the valid ranges")
}

/// Deterministic sweep: sample `k` uses its own generator seeded from
/// `(seed, k)`, so the result does not depend on thread scheduling.
pub fn verify_sweep(samples: usize, seed: u64) -> Result<f64, Error> {
    let devs = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            evaluate_verified(&random_scenario(&mut rng)).map(|(_, d)| d)
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

fn verify_outcome(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let samples = cfg.samples.unwrap_or(1000);
    let seed = cfg.seed.unwrap_or(0);
    let max_deviation = verify_sweep(samples, seed)?;
    let passed = max_deviation <= VERIFY_TOL;
    let summary = format!(
        "{samples} random scenarios (seed {seed}): max |closed form - simulation| = {max_deviation:.3e} ({})\n",
        if passed { "ok" } else { "FAILED" }
    );
    let csv = format!(
        "samples,seed,max_deviation,tolerance,passed\n{samples},{seed},{max_deviation:e},{VERIFY_TOL:e},{passed}\n"
    );
    let out = VerifyOutput {
        samples,
        seed,
        max_deviation,
        tolerance: VERIFY_TOL,
        passed,
    };
    Ok(Outcome {
        summary,
        csv,
        json: to_json(&out),
        status: if passed { 0 } else { 1 },
    })
}

fn table1_outcome() -> Result<Outcome, CliError> {
    let rows = reproduce_table1()?;
    let mut summary = String::from("N    N_A  mu_min    published  max deviation\n");
    for r in &rows {
        let _ = writeln!(
            summary,
            "{:<4} {:<4} {:.6}  {:.4}     {:.2e}",
            r.label, r.n_alices, r.mu_min.computed, r.mu_min.published, r.max_deviation
        );
    }
    Ok(Outcome {
        summary,
        csv: table1_csv(&rows),
        json: to_json(&rows),
        status: 0,
    })
}

/// Runs `cfg` without touching the terminal or files.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let command = cfg.command.ok_or_else(|| missing("command"))?;
    match command {
        Command::Bounds => Ok(bounds_outcome()),
        Command::Eval => eval_outcome(cfg),
        Command::Ranges => ranges_outcome(cfg),
        Command::Maxalices => maxalices_outcome(cfg),
        Command::Minpurity => minpurity_outcome(cfg),
        Command::Region2x2 => region_outcome(cfg),
        Command::Check3x2 => overlap_outcome(cfg),
        Command::Verify => verify_outcome(cfg),
        Command::Table1 => table1_outcome(),
    }
}

/// Thread count from `STEERSEQ_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("STEERSEQ_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(CliError::Input(format!(
                "STEERSEQ_THREADS must be an integer >= 1, got {v:?}"
            ))),
        },
    }
}

fn run_inner(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let threads = threads_from_env()?;
    let outcome = match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?
            .install(|| execute(cfg))?,
        None => execute(cfg)?,
    };
    if let Some(path) = &cfg.output_path {
        let body = match cfg.format.unwrap_or_default() {
            Format::Csv => &outcome.csv,
            Format::Json => &outcome.json,
        };
        std::fs::write(path, body).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    }
    let _ = stdout.write_all(outcome.summary.as_bytes());
    Ok(outcome.status)
}

/// Executes `cfg`, prints the summary to `stdout` and any diagnostic to
/// stderr. Exit codes: 0 success, 1 input or write error, 2 infeasible.
pub fn run_with(cfg: &RunConfig, stdout: &mut dyn Write) -> i32 {
    match run_inner(cfg, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cfg: &RunConfig) -> i32 {
    run_with(cfg, &mut std::io::stdout().lock())
}
