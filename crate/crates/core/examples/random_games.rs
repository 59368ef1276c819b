//! Generate random two-team games, solve each and report the worst residual.
//!
//! cargo run --example random_games -- 50

use teamsym::equilibrium::{enumerate_symmetric_ne, epsilon_residual, solve_symmetric_ne, SolverOptions};
use teamsym::game::{gen_random_game, TeamStructure};

fn main() -> anyhow::Result<()> {
    let n: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
    let opts = SolverOptions::default();
    let mut worst: f64 = 0.0;
    let mut counts = std::collections::BTreeMap::new();
    for seed in 0..n {
        let s = TeamStructure::uniform(2, 2, 2)?;
        let game = gen_random_game(s, 0, 10, seed % 2 == 0, seed)?;
        let sol = solve_symmetric_ne(&game, &opts)?;
        worst = worst.max(epsilon_residual(&game, &sol.profile)?);
        *counts.entry(enumerate_symmetric_ne(&game, &opts)?.len()).or_insert(0) += 1;
    }
    println!("{n} games solved, worst residual {worst:.2e}");
    for (k, c) in counts {
        println!("  {c} game(s) with {k} symmetric equilibria");
    }
    Ok(())
}
