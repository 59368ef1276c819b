//! Expand a count-form game to every player, check the two symmetry
//! properties, then break one on purpose and print the witness.

use teamsym::game::{
    find_common_payoff_violation, find_team_symmetry_violation, gmp_game, reduce_to_count_form,
};

fn main() -> anyhow::Result<()> {
    let game = gmp_game(0.5);
    let mut full = game.expand()?;
    println!("{} pure profiles", full.num_profiles());
    println!("common payoff violation: {:?}", find_common_payoff_violation(&full));
    println!("team symmetry violation: {:?}", find_team_symmetry_violation(&full));
    println!("round trip exact: {}", reduce_to_count_form(&full)? == game);

    // Give player 0 a private bonus in one profile.
    let profile = [0, 1, 0, 0];
    full.set_payoff(0, &profile, full.payoff(0, &profile) + 1.0);
    println!("\nafter perturbing player 0:");
    println!("common payoff violation: {:?}", find_common_payoff_violation(&full));
    println!("team symmetry violation: {:?}", find_team_symmetry_violation(&full));
    println!("reduce: {:?}", reduce_to_count_form(&full).err().map(|e| e.to_string()));
    Ok(())
}
