//! Expected payoffs through multinomial counts versus full enumeration of
//! every player's action, on a random three-team game.

use std::time::Instant;

use teamsym::game::{gen_random_game, TeamStructure};
use teamsym::payoff::{brute_force_payoff, team_action_payoffs, Focal, MixedStrategy, SymmetricProfile};

fn main() -> anyhow::Result<()> {
    let s = TeamStructure::new(vec![3, 2, 1], vec![3, 2, 2])?;
    let game = gen_random_game(s.clone(), -5, 5, false, 42)?;
    println!(
        "{} players, {} count-form entries instead of {} pure profiles",
        s.num_players(),
        s.count_form_size(),
        s.full_form_size().unwrap_or(usize::MAX)
    );
    let profile = SymmetricProfile::new(vec![
        MixedStrategy::new(vec![0.2, 0.5, 0.3])?,
        MixedStrategy::new(vec![0.6, 0.4])?,
        MixedStrategy::uniform(2),
    ]);

    for team in 0..s.num_teams() {
        let t = Instant::now();
        let fast = team_action_payoffs(&game, team, &profile)?;
        let fast_time = t.elapsed();
        let t = Instant::now();
        let slow = (0..s.num_actions(team))
            .map(|a| brute_force_payoff(&game, team, Focal::Action(a), &profile))
            .collect::<teamsym::Result<Vec<_>>>()?;
        let slow_time = t.elapsed();
        let gap = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("team {team}: {fast:.4?} ({fast_time:?} vs {slow_time:?}), max gap {gap:.1e}");
    }
    Ok(())
}
