//! One critic per player, as in the non-delegate formulation. Each critic
//! sees the full joint action (one-hot per player) and regresses its own
//! player's return. Teammates start from the same weights and see the same
//! data, so they should never diverge.

use rand::Rng;

use super::{RolloutBatch, TrainConfig};
use crate::error::{Error, Result};
use crate::game::TeamStructure;
use crate::neural::{adam_step, backprop, mse_and_grad, Activation, AdamState, Gradients, Mlp};

#[derive(Clone, Debug)]
pub struct PerPlayerCritics {
    structure: TeamStructure,
    critics: Vec<Mlp>,
    opts: Vec<AdamState>,
}

impl PerPlayerCritics {
    /// One initialization per team, copied to every teammate.
    pub fn new<R: Rng>(config: &TrainConfig, structure: &TeamStructure, obs_dim: usize, rng: &mut R) -> Result<Self> {
        let input = obs_dim + Self::action_dim(structure);
        let mut critics = Vec::with_capacity(structure.num_players());
        for team in 0..structure.num_teams() {
            let net = Mlp::new(&config.net_dims(input, 1), Activation::Tanh, rng)?;
            critics.extend(std::iter::repeat(net).take(structure.team_size(team)));
        }
        let opts = critics.iter().map(|c| AdamState::for_net(c, config.critic_lr)).collect();
        Ok(Self {
            structure: structure.clone(),
            critics,
            opts,
        })
    }

    fn action_dim(structure: &TeamStructure) -> usize {
        (0..structure.num_players())
            .map(|p| structure.num_actions(structure.team_of(p)))
            .sum()
    }

    pub fn critics(&self) -> &[Mlp] {
        &self.critics
    }

    /// Observation followed by a one-hot block per player.
    pub fn input(&self, observation: &[f64], actions: &[usize]) -> Result<Vec<f64>> {
        let s = &self.structure;
        if actions.len() != s.num_players() {
            return Err(Error::InvalidAction(format!("{} actions for {} players", actions.len(), s.num_players())));
        }
        let mut x = observation.to_vec();
        for (p, &a) in actions.iter().enumerate() {
            let k = s.num_actions(s.team_of(p));
            if a >= k {
                return Err(Error::InvalidAction(format!("player {p} chose {a} of {k}")));
            }
            x.extend((0..k).map(|j| if j == a { 1.0 } else { 0.0 }));
        }
        Ok(x)
    }

    /// Every critic's value of one joint action.
    pub fn values(&self, observation: &[f64], actions: &[usize]) -> Result<Vec<f64>> {
        let x = self.input(observation, actions)?;
        self.critics.iter().map(|c| c.forward(&x).map(|v| v[0])).collect()
    }

    /// Largest gap between teammates' values at one joint action.
    pub fn within_team_gap(&self, observation: &[f64], actions: &[usize]) -> Result<f64> {
        let v = self.values(observation, actions)?;
        let s = &self.structure;
        Ok((0..s.num_players())
            .map(|p| (v[p] - v[s.first_player(s.team_of(p))]).abs())
            .fold(0.0, f64::max))
    }

    /// One Adam step per critic on the batch's Monte Carlo targets.
    pub fn update(&mut self, config: &TrainConfig, batch: &RolloutBatch) -> Result<()> {
        let targets = batch.returns(config.gamma);
        let inputs = batch
            .transitions
            .iter()
            .map(|t| self.input(&t.observation, &t.actions))
            .collect::<Result<Vec<_>>>()?;
        for p in 0..self.critics.len() {
            let team = self.structure.team_of(p);
            let critic = &self.critics[p];
            let mut grads = Gradients::zeros_like(critic);
            for (x, y) in inputs.iter().zip(&targets) {
                let q = critic.forward(x)?;
                let (_, g) = mse_and_grad(&q, &[y[team]])?;
                grads.add_assign(&backprop(critic, x, &g)?);
            }
            adam_step(&mut self.opts[p], &mut self.critics[p], &grads, config.max_grad_norm)?;
        }
        Ok(())
    }
}
