//! Run a small benchmark suite and print the per-algorithm summary.
//!
//! cargo run --release --example bench_suite -- zerosum 5 out/

use teamsym::harness::{run_suite, Suite, SuiteConfig};
use teamsym::marl::TrainConfig;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let suite: Suite = args.next().unwrap_or_else(|| "zerosum".into()).parse()?;
    let games: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let out = args.next().unwrap_or_else(|| "bench_out".into());

    let mut config = SuiteConfig::new(suite, &out);
    config.n_games = games;
    config.train = TrainConfig { total_steps: 10_000, ..TrainConfig::default() };
    let report = run_suite(&config)?;
    println!("{suite}: {} games, equilibria per game {:?}", report.games, report.equilibria_per_game);
    for a in &report.algos {
        println!(
            "  {:<6} KL {:.4} ± {:.4}   MSE {:.4} ± {:.4}   ({} runs)",
            a.algo.name(), a.final_kl_mean, a.final_kl_std, a.final_mse_mean, a.final_mse_std, a.runs
        );
    }
    println!("{} failure(s); outputs in {out}", report.failures.len());
    Ok(())
}
