//! Experiment suites over families of games, with CSV and JSON output.

mod metrics;

pub use metrics::{kl_divergence, kl_metric, mse_from_payoffs, mse_metric};

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::equilibrium::{enumerate_symmetric_ne, SolverOptions};
use crate::error::{Error, Result};
use crate::game::{gen_random_game, gmp_game, PayoffTensor, TeamStructure};
use crate::marl::{delac_train, ia2c_train, Environment, MetricPoint, TrainConfig, TrainResult};

/// Which family of games a suite plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    ZeroSum,
    GeneralSum,
    Gmp,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::ZeroSum => "zerosum",
            Suite::GeneralSum => "generalsum",
            Suite::Gmp => "gmp",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zerosum" => Ok(Suite::ZeroSum),
            "generalsum" => Ok(Suite::GeneralSum),
            "gmp" => Ok(Suite::Gmp),
            other => Err(Error::InvalidConfig(format!("unknown suite {other:?}"))),
        }
    }
}

/// Learning algorithm selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Delac,
    Ia2c,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Delac => "delac",
            Algo::Ia2c => "ia2c",
        }
    }

    pub fn train(self, config: &TrainConfig, env: &Environment) -> Result<TrainResult> {
        match self {
            Algo::Delac => delac_train(config, env),
            Algo::Ia2c => ia2c_train(config, env),
        }
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delac" => Ok(Algo::Delac),
            "ia2c" => Ok(Algo::Ia2c),
            other => Err(Error::InvalidConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n_games: usize,
    pub omega: f64,
    pub train: TrainConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Training runs per game and algorithm, each with its own derived seed.
    pub seeds_per_game: usize,
    pub algos: Vec<Algo>,
    /// Train games on the rayon pool. Output does not depend on this.
    pub parallel: bool,
}

impl SuiteConfig {
    pub fn new(suite: Suite, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            suite,
            n_games: if suite == Suite::Gmp { 1 } else { 30 },
            omega: 0.5,
            train: TrainConfig::default(),
            out_dir: out_dir.into(),
            seed: 0,
            seeds_per_game: 1,
            algos: vec![Algo::Delac, Algo::Ia2c],
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_games == 0 || self.seeds_per_game == 0 || self.algos.is_empty() {
            return Err(Error::InvalidConfig("suite needs at least one game, seed and algorithm".into()));
        }
        if self.suite == Suite::Gmp && !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::InvalidConfig(format!("omega {} outside (0, 1)", self.omega)));
        }
        self.train.validate()
    }
}

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GAME_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;

/// The suite's games: two teams of two players with two actions and integer
/// payoffs in `[0, 10]` (negated for the second team in the zero-sum suite),
/// or the single matching-pennies game.
pub fn suite_games(config: &SuiteConfig) -> Result<Vec<PayoffTensor>> {
    match config.suite {
        Suite::Gmp => Ok(vec![gmp_game(config.omega)]),
        Suite::ZeroSum | Suite::GeneralSum => (0..config.n_games)
            .map(|g| {
                gen_random_game(
                    TeamStructure::uniform(2, 2, 2)?,
                    0,
                    10,
                    config.suite == Suite::ZeroSum,
                    derive_seed(config.seed, GAME_STREAM, g as u64),
                )
            })
            .collect(),
    }
}

/// Training seed for run `run` of game `game`; the same for every algorithm.
pub fn run_seed(config: &SuiteConfig, game: usize, run: usize) -> u64 {
    derive_seed(config.seed, TRAIN_STREAM, (game * config.seeds_per_game + run) as u64)
}

/// A metric row as written to CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub step: usize,
    pub game_id: String,
    pub algo: String,
    pub team_mse_avg: f64,
    pub kl_avg: f64,
    pub team_payoffs: Vec<f64>,
}

pub fn csv_header(m: usize) -> Vec<String> {
    ["step", "game_id", "algo", "team_mse_avg", "kl_avg"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..=m).map(|i| format!("u_team_{i}")))
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidConfig(format!("csv: {other:?}")),
    }
}

pub fn write_csv(path: &Path, m: usize, rows: &[MetricRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(csv_header(m)).map_err(csv_error)?;
    for r in rows {
        let mut record = vec![
            r.step.to_string(),
            r.game_id.clone(),
            r.algo.clone(),
            r.team_mse_avg.to_string(),
            r.kl_avg.to_string(),
        ];
        record.extend(r.team_payoffs.iter().map(f64::to_string));
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a file written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<MetricRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let bad = |line: usize| Error::InvalidConfig(format!("{}: malformed row {line}", path.display()));
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(csv_error)?;
            if rec.len() < 5 {
                return Err(bad(i + 1));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 1));
            Ok(MetricRow {
                step: rec[0].parse().map_err(|_| bad(i + 1))?,
                game_id: rec[1].to_string(),
                algo: rec[2].to_string(),
                team_mse_avg: num(&rec[3])?,
                kl_avg: num(&rec[4])?,
                team_payoffs: rec.iter().skip(5).map(num).collect::<Result<_>>()?,
            })
        })
        .collect()
}

/// Element-wise mean of equally shaped metric series.
pub fn average_series(series: &[&[MetricPoint]]) -> Result<Vec<MetricPoint>> {
    let first = series.first().ok_or_else(|| Error::InvalidConfig("nothing to average".into()))?;
    if series.iter().any(|s| s.len() != first.len()) {
        return Err(Error::DimensionMismatch("metric series of different lengths".into()));
    }
    let n = series.len() as f64;
    Ok((0..first.len())
        .map(|r| {
            let m = first[r].team_payoffs.len();
            MetricPoint {
                step: first[r].step,
                team_mse_avg: series.iter().map(|s| s[r].team_mse_avg).sum::<f64>() / n,
                kl_avg: series.iter().map(|s| s[r].kl_avg).sum::<f64>() / n,
                team_payoffs: (0..m)
                    .map(|i| series.iter().map(|s| s[r].team_payoffs[i]).sum::<f64>() / n)
                    .collect(),
            }
        })
        .collect())
}

fn rows_of(points: &[MetricPoint], game_id: &str, algo: &str) -> Vec<MetricRow> {
    points
        .iter()
        .map(|p| MetricRow {
            step: p.step,
            game_id: game_id.to_string(),
            algo: algo.to_string(),
            team_mse_avg: p.team_mse_avg,
            kl_avg: p.kl_avg,
            team_payoffs: p.team_payoffs.clone(),
        })
        .collect()
}

/// Git-style content hash: SHA-256 of `"blob <len>\0" ‖ bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

/// Final numbers of one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub game_id: usize,
    pub algo: Algo,
    pub seed: u64,
    pub final_kl: f64,
    pub final_mse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgoSummary {
    pub algo: Algo,
    pub runs: usize,
    pub final_kl_mean: f64,
    pub final_kl_std: f64,
    pub final_mse_mean: f64,
    pub final_mse_std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub game_id: usize,
    pub algo: Option<Algo>,
    pub seed: Option<u64>,
    pub error: String,
}

/// Everything a suite produced, also written to `out_dir`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub games: usize,
    pub equilibria_per_game: Vec<usize>,
    pub algos: Vec<AlgoSummary>,
    pub runs: Vec<RunSummary>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn summary(&self, algo: Algo) -> Option<&AlgoSummary> {
        self.algos.iter().find(|s| s.algo == algo)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

struct GameOutcome {
    equilibria: usize,
    /// Per algorithm: run-averaged series, or none if any run failed.
    series: Vec<Option<Vec<MetricPoint>>>,
    runs: Vec<RunSummary>,
    failures: Vec<Failure>,
}

fn run_game(config: &SuiteConfig, id: usize, game: &PayoffTensor) -> GameOutcome {
    let mut out = GameOutcome {
        equilibria: 0,
        series: Vec::new(),
        runs: Vec::new(),
        failures: Vec::new(),
    };
    match enumerate_symmetric_ne(game, &SolverOptions::default()) {
        Ok(set) => out.equilibria = set.len(),
        Err(e) => {
            out.failures.push(Failure { game_id: id, algo: None, seed: None, error: e.to_string() });
            out.series = vec![None; config.algos.len()];
            return out;
        }
    }
    let env = match Environment::new(game.clone(), config.train.episode_length, config.train.observation) {
        Ok(env) => env,
        Err(e) => {
            out.failures.push(Failure { game_id: id, algo: None, seed: None, error: e.to_string() });
            out.series = vec![None; config.algos.len()];
            return out;
        }
    };
    for &algo in &config.algos {
        let mut results = Vec::new();
        for run in 0..config.seeds_per_game {
            let seed = run_seed(config, id, run);
            let train = TrainConfig { seed, ..config.train.clone() };
            match algo.train(&train, &env) {
                Ok(r) => {
                    let last = r.final_metrics().cloned();
                    out.runs.push(RunSummary {
                        game_id: id,
                        algo,
                        seed,
                        final_kl: last.as_ref().map_or(f64::NAN, |p| p.kl_avg),
                        final_mse: last.as_ref().map_or(f64::NAN, |p| p.team_mse_avg),
                    });
                    results.push(r.metrics);
                }
                Err(e) => out.failures.push(Failure {
                    game_id: id,
                    algo: Some(algo),
                    seed: Some(seed),
                    error: e.to_string(),
                }),
            }
        }
        let series = if results.len() == config.seeds_per_game {
            let refs: Vec<&[MetricPoint]> = results.iter().map(Vec::as_slice).collect();
            average_series(&refs).ok()
        } else {
            None
        };
        out.series.push(series);
    }
    out
}

/// Runs every algorithm on every game of the suite and writes
/// `games/`, `metrics/game_<id>.csv`, `metrics/average.csv`, `summary.json`,
/// `failures.json` and `manifest.json` under `out_dir`. Per-game failures are
/// recorded and the remaining games still run.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let games = suite_games(config)?;
    let games_dir = config.out_dir.join("games");
    let metrics_dir = config.out_dir.join("metrics");
    fs::create_dir_all(&games_dir)?;
    fs::create_dir_all(&metrics_dir)?;

    let mut game_hashes = Vec::new();
    for (id, game) in games.iter().enumerate() {
        let text = game.to_json()?;
        game_hashes.push(content_hash(text.as_bytes()));
        fs::write(games_dir.join(format!("game_{id}.json")), text)?;
    }

    let outcomes: Vec<GameOutcome> = if config.parallel {
        games.par_iter().enumerate().map(|(id, g)| run_game(config, id, g)).collect()
    } else {
        games.iter().enumerate().map(|(id, g)| run_game(config, id, g)).collect()
    };

    let m = 2;
    for (id, o) in outcomes.iter().enumerate() {
        let mut rows = Vec::new();
        for (algo, series) in config.algos.iter().zip(&o.series) {
            if let Some(s) = series {
                rows.extend(rows_of(s, &id.to_string(), algo.name()));
            }
        }
        write_csv(&metrics_dir.join(format!("game_{id}.csv")), m, &rows)?;
    }
    let mut avg_rows = Vec::new();
    for (a, algo) in config.algos.iter().enumerate() {
        let ok: Vec<&[MetricPoint]> = outcomes
            .iter()
            .filter_map(|o| o.series[a].as_deref())
            .collect();
        if !ok.is_empty() {
            avg_rows.extend(rows_of(&average_series(&ok)?, "mean", algo.name()));
        }
    }
    write_csv(&metrics_dir.join("average.csv"), m, &avg_rows)?;

    let runs: Vec<RunSummary> = outcomes.iter().flat_map(|o| o.runs.clone()).collect();
    let failures: Vec<Failure> = outcomes.iter().flat_map(|o| o.failures.clone()).collect();
    let algos = config
        .algos
        .iter()
        .map(|&algo| {
            let kl: Vec<f64> = runs.iter().filter(|r| r.algo == algo).map(|r| r.final_kl).collect();
            let mse: Vec<f64> = runs.iter().filter(|r| r.algo == algo).map(|r| r.final_mse).collect();
            let (final_kl_mean, final_kl_std) = mean_std(&kl);
            let (final_mse_mean, final_mse_std) = mean_std(&mse);
            AlgoSummary { algo, runs: kl.len(), final_kl_mean, final_kl_std, final_mse_mean, final_mse_std }
        })
        .collect();
    let report = SuiteReport {
        suite: config.suite,
        games: games.len(),
        equilibria_per_game: outcomes.iter().map(|o| o.equilibria).collect(),
        algos,
        runs,
        failures,
    };
    fs::write(config.out_dir.join("summary.json"), serde_json::to_string_pretty(&report)?)?;
    fs::write(config.out_dir.join("failures.json"), serde_json::to_string_pretty(&report.failures)?)?;
    let manifest = serde_json::json!({
        "config": config,
        "seed": config.seed,
        "game_hashes": game_hashes,
        "crate_version": env!("CARGO_PKG_VERSION"),
    });
    fs::write(config.out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(report)
}
