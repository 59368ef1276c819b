//! Command-line front end: generate games, solve them, train, run suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use teamsym::equilibrium::{enumerate_symmetric_ne, solve_symmetric_ne, SolverOptions};
use teamsym::game::{gen_random_game, PayoffTensor, TeamStructure};
use teamsym::harness::{content_hash, run_suite, write_csv, Algo, MetricRow, Suite, SuiteConfig};
use teamsym::marl::{Environment, TrainConfig};

const EXIT_SOLVER: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "teamsym", version, about = "Team-symmetric games and delegate actor-critic training")]
struct Cli {
    /// TOML file of `key = value` training overrides.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Delac,
    Ia2c,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Zerosum,
    Generalsum,
    Gmp,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random integer-payoff game.
    Gen {
        #[arg(long, default_value_t = 2)]
        teams: usize,
        /// Team sizes; one value is repeated for every team.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        sizes: Vec<usize>,
        /// Actions per team; one value is repeated for every team.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        actions: Vec<usize>,
        /// Inclusive payoff range `LO,HI`.
        #[arg(long, value_delimiter = ',', num_args = 2, default_value = "0,10", allow_negative_numbers = true)]
        range: Vec<i64>,
        #[arg(long)]
        zero_sum: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print a team-symmetric equilibrium (or all found) as JSON.
    Solve {
        file: PathBuf,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Train on one game and write its metric series.
    Train {
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        metrics: PathBuf,
        /// Directory for final network checkpoints.
        #[arg(long)]
        checkpoints: Option<PathBuf>,
    },
    /// Run an experiment suite.
    Bench {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        games: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        omega: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seeds_per_game: usize,
        /// Run games one after another instead of on the thread pool.
        #[arg(long)]
        serial: bool,
    },
}

fn per_team(values: &[usize], teams: usize, what: &str) -> anyhow::Result<Vec<usize>> {
    match values.len() {
        1 => Ok(vec![values[0]; teams]),
        n if n == teams => Ok(values.to_vec()),
        n => Err(teamsym::Error::InvalidConfig(format!("{n} {what} given for {teams} teams")).into()),
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<TrainConfig> {
    let Some(path) = path else {
        return Ok(TrainConfig::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: TrainConfig = toml::from_str(&text)
        .map_err(|e| teamsym::Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

fn load_game(path: &Path) -> anyhow::Result<(PayoffTensor, String)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let game = PayoffTensor::from_json(&text)?;
    Ok((game, content_hash(text.as_bytes())))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let base = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Gen { teams, sizes, actions, range, zero_sum, seed, output } => {
            let structure = TeamStructure::new(
                per_team(&sizes, teams, "sizes")?,
                per_team(&actions, teams, "action counts")?,
            )?;
            let game = gen_random_game(structure, range[0], range[1], zero_sum, seed)?;
            fs::write(&output, game.to_json()?)?;
        }
        Command::Solve { file, all, tol } => {
            let (game, _) = load_game(&file)?;
            let opts = SolverOptions::default().with_tolerance(tol);
            if all {
                let sols = enumerate_symmetric_ne(&game, &opts)?;
                println!("{}", serde_json::to_string_pretty(&sols)?);
            } else {
                println!("{}", solve_symmetric_ne(&game, &opts)?.to_json()?);
            }
        }
        Command::Train { algo, game, steps, seed, metrics, checkpoints } => {
            let (tensor, hash) = load_game(&game)?;
            let config = TrainConfig {
                total_steps: steps.unwrap_or(base.total_steps),
                seed: seed.unwrap_or(base.seed),
                ..base
            };
            let algo = match algo {
                AlgoArg::Delac => Algo::Delac,
                AlgoArg::Ia2c => Algo::Ia2c,
            };
            let env = Environment::new(tensor.clone(), config.episode_length, config.observation)?;
            let result = algo.train(&config, &env)?;
            let rows: Vec<MetricRow> = result
                .metrics
                .iter()
                .map(|p| MetricRow {
                    step: p.step,
                    game_id: "0".into(),
                    algo: algo.name().into(),
                    team_mse_avg: p.team_mse_avg,
                    kl_avg: p.kl_avg,
                    team_payoffs: p.team_payoffs.clone(),
                })
                .collect();
            write_csv(&metrics, tensor.num_teams(), &rows)?;
            if let Some(dir) = &checkpoints {
                fs::create_dir_all(dir)?;
                for (i, a) in result.actors.iter().enumerate() {
                    fs::write(dir.join(format!("actor_{i}.json")), a.to_checkpoint()?)?;
                }
                for (i, c) in result.critics.iter().enumerate() {
                    fs::write(dir.join(format!("critic_{i}.json")), c.to_checkpoint()?)?;
                }
            }
            let manifest = serde_json::json!({
                "algo": algo.name(),
                "config": config,
                "seed": config.seed,
                "game": game.display().to_string(),
                "game_hash": hash,
                "final": result.final_metrics(),
                "policy": result.policy,
            });
            let manifest_path = metrics.with_extension("manifest.json");
            fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
            println!("{}", serde_json::to_string_pretty(&manifest["final"])?);
        }
        Command::Bench { suite, games, omega, out, seed, steps, seeds_per_game, serial } => {
            let suite = match suite {
                SuiteArg::Zerosum => Suite::ZeroSum,
                SuiteArg::Generalsum => Suite::GeneralSum,
                SuiteArg::Gmp => Suite::Gmp,
            };
            let mut config = SuiteConfig::new(suite, out);
            if let Some(n) = games {
                if suite == Suite::Gmp && n != 1 {
                    bail!(teamsym::Error::InvalidConfig("the gmp suite has exactly one game".into()));
                }
                config.n_games = n;
            }
            config.omega = omega;
            config.seed = seed;
            config.seeds_per_game = seeds_per_game;
            config.parallel = !serial;
            config.train = TrainConfig { total_steps: steps.unwrap_or(base.total_steps), ..base };
            let report = run_suite(&config)?;
            println!("{}", serde_json::to_string_pretty(&report.algos)?);
            if !report.failures.is_empty() {
                eprintln!("{} run(s) failed; see failures.json", report.failures.len());
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<teamsym::Error>() {
        Some(teamsym::Error::NoEquilibriumFound(_) | teamsym::Error::EmptyEquilibriumSet) => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
