//! Delegate actor-critic against independent advantage actor-critic on
//! matching pennies over a few seeds.

use teamsym::game::gmp_game;
use teamsym::harness::Algo;
use teamsym::marl::{Environment, TrainConfig};

fn main() -> anyhow::Result<()> {
    let seeds = 5;
    let env = Environment::new(gmp_game(0.5), 1, TrainConfig::default().observation)?;
    for algo in [Algo::Delac, Algo::Ia2c] {
        let kls = (0..seeds)
            .map(|seed| {
                let config = TrainConfig { total_steps: 10_000, seed, ..TrainConfig::default() };
                Ok(algo.train(&config, &env)?.final_metrics().map_or(f64::NAN, |m| m.kl_avg))
            })
            .collect::<anyhow::Result<Vec<f64>>>()?;
        let mean = kls.iter().sum::<f64>() / kls.len() as f64;
        println!("{:<6} mean final KL {mean:.4}  per seed {kls:.4?}", algo.name());
    }
    Ok(())
}
