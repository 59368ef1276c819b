//! Repeated play of a count-form game.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{counts_of_profile, CountVector, PayoffTensor, TeamStructure};

/// What agents observe before acting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservationSpec {
    /// The constant vector `[1]`: a stateless repeated game.
    #[default]
    Constant,
    /// One-hot over the previous step's joint counts, with an extra slot
    /// marking the first step of an episode.
    LastCounts,
}

impl ObservationSpec {
    pub fn dim(self, game: &PayoffTensor) -> usize {
        match self {
            ObservationSpec::Constant => 1,
            ObservationSpec::LastCounts => game.len() + 1,
        }
    }
}

/// Result of one environment step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub rewards: Vec<f64>,
    pub counts: Vec<CountVector>,
    pub observation: Vec<f64>,
    /// The episode ended with this step; `observation` is already the reset one.
    pub done: bool,
}

/// A single-state chain: every step pays the tensor entry at the realized
/// counts, and episodes last `episode_length` steps.
#[derive(Clone, Debug)]
pub struct Environment {
    game: PayoffTensor,
    episode_length: usize,
    spec: ObservationSpec,
    t: usize,
    last_index: Option<usize>,
}

impl Environment {
    pub fn new(game: PayoffTensor, episode_length: usize, spec: ObservationSpec) -> Result<Self> {
        if episode_length == 0 {
            return Err(Error::InvalidConfig("episode length must be at least 1".into()));
        }
        Ok(Self {
            game,
            episode_length,
            spec,
            t: 0,
            last_index: None,
        })
    }

    pub fn game(&self) -> &PayoffTensor {
        &self.game
    }

    pub fn structure(&self) -> &TeamStructure {
        self.game.structure()
    }

    pub fn episode_length(&self) -> usize {
        self.episode_length
    }

    pub fn observation_spec(&self) -> ObservationSpec {
        self.spec
    }

    pub fn observation_dim(&self) -> usize {
        self.spec.dim(&self.game)
    }

    /// Observation at the start of an episode.
    pub fn initial_observation(&self) -> Vec<f64> {
        self.encode(None)
    }

    pub fn observation(&self) -> Vec<f64> {
        self.encode(self.last_index)
    }

    fn encode(&self, last: Option<usize>) -> Vec<f64> {
        match self.spec {
            ObservationSpec::Constant => vec![1.0],
            ObservationSpec::LastCounts => {
                let mut o = vec![0.0; self.game.len() + 1];
                o[last.unwrap_or(self.game.len())] = 1.0;
                o
            }
        }
    }

    pub fn reset(&mut self) -> Vec<f64> {
        self.t = 0;
        self.last_index = None;
        self.observation()
    }

    /// Plays one joint action, given per player in team order.
    pub fn step(&mut self, joint_actions: &[usize]) -> Result<StepOutcome> {
        let s = self.game.structure();
        if joint_actions.len() != s.num_players() {
            return Err(Error::InvalidAction(format!(
                "{} actions for {} players",
                joint_actions.len(),
                s.num_players()
            )));
        }
        for (player, &a) in joint_actions.iter().enumerate() {
            let k = s.num_actions(s.team_of(player));
            if a >= k {
                return Err(Error::InvalidAction(format!(
                    "player {player} chose action {a} but has only {k}"
                )));
            }
        }
        let counts = counts_of_profile(s, joint_actions);
        let index = self.game.index_of(&counts).expect("counts of a valid profile");
        let rewards = self.game.entry(index).to_vec();
        self.t += 1;
        let done = self.t >= self.episode_length;
        let observation = if done {
            self.reset()
        } else {
            self.last_index = Some(index);
            self.observation()
        };
        Ok(StepOutcome {
            rewards,
            counts,
            observation,
            done,
        })
    }
}

/// Steps `env` and returns the team rewards and the next observation.
pub fn env_step(env: &mut Environment, joint_actions: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    let out = env.step(joint_actions)?;
    Ok((out.rewards, out.observation))
}

/// Suffix-discounted sums of one episode's team rewards.
pub fn discounted_returns(rewards: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    let ends = vec![false; rewards.len()];
    discounted_returns_with_boundaries(rewards, &ends, gamma)
}

/// Like [`discounted_returns`], but `ends[t]` marks the last step of a
/// segment; nothing flows back across it.
pub fn discounted_returns_with_boundaries(rewards: &[Vec<f64>], ends: &[bool], gamma: f64) -> Vec<Vec<f64>> {
    assert_eq!(rewards.len(), ends.len(), "one boundary flag per step");
    let mut out = vec![Vec::new(); rewards.len()];
    let mut acc: Option<Vec<f64>> = None;
    for t in (0..rewards.len()).rev() {
        let next = match (&acc, ends[t]) {
            (Some(a), false) => rewards[t].iter().zip(a).map(|(r, a)| r + gamma * a).collect(),
            _ => rewards[t].clone(),
        };
        out[t] = next.clone();
        acc = Some(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::gmp_game;

    #[test]
    fn gmp_rewards() {
        let mut env = Environment::new(gmp_game(0.5), 10, ObservationSpec::Constant).unwrap();
        let (r, o) = env_step(&mut env, &[0, 0, 0, 0]).unwrap();
        assert_eq!(r, vec![1.0, -1.0]);
        assert_eq!(o, vec![1.0]);
        let (r, o2) = env_step(&mut env, &[0, 1, 0, 1]).unwrap();
        assert_eq!(r, vec![0.0, 0.0]);
        assert_eq!(o2, o);
    }

    #[test]
    fn invalid_actions() {
        let mut env = Environment::new(gmp_game(0.5), 10, ObservationSpec::Constant).unwrap();
        assert!(matches!(env.step(&[0, 2, 0, 0]), Err(Error::InvalidAction(_))));
        assert!(matches!(env.step(&[0, 0]), Err(Error::InvalidAction(_))));
    }

    #[test]
    fn episodes_reset() {
        let mut env = Environment::new(gmp_game(0.5), 2, ObservationSpec::LastCounts).unwrap();
        let start = env.initial_observation();
        assert_eq!(start.len(), 10);
        assert_eq!(start[9], 1.0);
        let a = env.step(&[1, 1, 0, 0]).unwrap();
        assert!(!a.done);
        assert_eq!(a.observation[env.game().index_of(&a.counts).unwrap()], 1.0);
        let b = env.step(&[1, 1, 0, 0]).unwrap();
        assert!(b.done);
        assert_eq!(b.observation, start);
    }

    #[test]
    fn returns_examples() {
        let r = vec![vec![1.0]; 3];
        assert_eq!(discounted_returns(&r, 0.5), vec![vec![1.75], vec![1.5], vec![1.0]]);
        let r2 = vec![vec![1.0, -2.0], vec![3.0, 4.0]];
        assert_eq!(discounted_returns(&r2, 0.0), r2);
        let ends = [false, true, false, true];
        let cat = discounted_returns_with_boundaries(&[r2.clone(), r2.clone()].concat(), &ends, 0.9);
        let single = discounted_returns(&r2, 0.9);
        assert_eq!(cat, [single.clone(), single].concat());
    }
}
