//! Train the delegate actor-critic on matching pennies and print the
//! learning curve.
//!
//! RUST_LOG=debug cargo run --release --example delac_gmp -- 10000 0

use teamsym::game::gmp_game;
use teamsym::marl::{delac_train, Environment, TrainConfig};

fn main() -> anyhow::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let steps = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let config = TrainConfig { total_steps: steps, seed, ..TrainConfig::default() };
    let env = Environment::new(gmp_game(0.5), config.episode_length, config.observation)?;
    let r = delac_train(&config, &env)?;
    println!("{:>7} {:>12} {:>12}", "step", "team mse", "kl");
    for p in r.metrics.iter().step_by((r.metrics.len() / 20).max(1)) {
        println!("{:>7} {:>12.3e} {:>12.3e}", p.step, p.team_mse_avg, p.kl_avg);
    }
    println!("final policy {:?}", r.policy.strategies());
    println!("{} batches, {} equilibrium solves", r.batches, r.solver_calls);
    Ok(())
}
