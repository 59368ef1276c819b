//! Solve generalized matching pennies and list every symmetric equilibrium.
//!
//! cargo run --example gmp_equilibrium -- 0.5

use teamsym::equilibrium::{deviation_gains, enumerate_symmetric_ne, solve_symmetric_ne, SolverOptions};
use teamsym::game::{gmp_game, gmp_has_unique_equilibrium};

fn main() -> anyhow::Result<()> {
    let omega: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.5);
    let game = gmp_game(omega);
    println!("GMP(omega = {omega}), unique equilibrium expected: {}", gmp_has_unique_equilibrium(omega));
    for (counts, u) in game.iter() {
        let c: Vec<String> = counts.iter().map(|g| g.to_string()).collect();
        println!("  {:<16} {:?}", c.join(" "), u);
    }

    let opts = SolverOptions::default();
    let sol = solve_symmetric_ne(&game, &opts)?;
    println!("\nsolution: {:?}", sol.profile.strategies());
    println!("values {:?}, residual {:.2e}", sol.values, sol.residual);
    println!("deviation gains {:?}", deviation_gains(&game, &sol.profile)?);

    let all = enumerate_symmetric_ne(&game, &opts)?;
    println!("\n{} equilibrium(s):", all.len());
    for s in all {
        println!("  {:?}", s.profile.strategies());
    }
    Ok(())
}
