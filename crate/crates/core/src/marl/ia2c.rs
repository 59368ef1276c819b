//! Independent advantage actor-critic. Teammates share an actor and a state
//! value network but nothing is shared across teams and no critic sees the
//! joint action.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{fingerprint, training_loop, Environment, PolicySource, RolloutBatch, TrainConfig, TrainResult};
use crate::error::Result;
use crate::game::TeamStructure;
use crate::neural::{adam_step, backprop, mse_and_grad, softmax, Activation, AdamState, Gradients, Mlp};

#[derive(Clone, Debug)]
pub struct Ia2cAgent {
    structure: TeamStructure,
    actors: Vec<Mlp>,
    critics: Vec<Mlp>,
    actor_opts: Vec<AdamState>,
    critic_opts: Vec<AdamState>,
}

impl PolicySource for Ia2cAgent {
    fn structure(&self) -> &TeamStructure {
        &self.structure
    }

    fn actors(&self) -> &[Mlp] {
        &self.actors
    }
}

impl Ia2cAgent {
    pub fn new<R: rand::Rng>(config: &TrainConfig, env: &Environment, rng: &mut R) -> Result<Self> {
        let structure = env.structure().clone();
        let obs_dim = env.observation_dim();
        let m = structure.num_teams();
        let actors = (0..m)
            .map(|i| Mlp::new(&config.net_dims(obs_dim, structure.num_actions(i)), Activation::Tanh, rng))
            .collect::<Result<Vec<_>>>()?;
        let critics = (0..m)
            .map(|_| Mlp::new(&config.net_dims(obs_dim, 1), Activation::Tanh, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            actor_opts: actors.iter().map(|a| AdamState::for_net(a, config.actor_lr)).collect(),
            critic_opts: critics.iter().map(|c| AdamState::for_net(c, config.critic_lr)).collect(),
            structure,
            actors,
            critics,
        })
    }

    pub fn critics(&self) -> &[Mlp] {
        &self.critics
    }

    /// GAE advantages and value targets for one team.
    fn advantages(&self, config: &TrainConfig, batch: &RolloutBatch, team: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut values = ValueCache::new(&self.critics[team]);
        let n = batch.len();
        let mut adv = vec![0.0; n];
        let mut targets = vec![0.0; n];
        for idx in batch.per_env() {
            let mut next_adv = 0.0;
            for (j, &i) in idx.iter().enumerate().rev() {
                let t = &batch.transitions[i];
                let v = values.get(&t.observation)?;
                let next_v = if t.done { 0.0 } else { values.get(&t.next_observation)? };
                let cut = t.done || j + 1 == idx.len();
                let delta = t.rewards[team] + config.gamma * next_v - v;
                let a = delta + if cut { 0.0 } else { config.gamma * config.gae_lambda * next_adv };
                adv[i] = a;
                targets[i] = a + v;
                next_adv = a;
            }
        }
        Ok((adv, targets))
    }

    /// One batch of policy-gradient and value updates. Output gradients of
    /// steps sharing an observation are summed before backprop, which is
    /// exact because backprop is linear in the output gradient.
    pub fn update(&mut self, config: &TrainConfig, batch: &RolloutBatch) -> Result<()> {
        let s = self.structure.clone();
        let groups = group_by_observation(batch);
        for team in 0..s.num_teams() {
            let (adv, targets) = self.advantages(config, batch, team)?;
            for _ in 0..config.epochs {
                let actor = &self.actors[team];
                let mut grads = Gradients::zeros_like(actor);
                for (obs, members) in &groups {
                    let probs = softmax(&actor.forward(obs)?);
                    let p = probs.probs();
                    let entropy: f64 = -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>();
                    // d/dlogits of -A·Σ log π(a_player) - c·H, summed over steps.
                    let mut g: Vec<f64> = p
                        .iter()
                        .map(|&pj| {
                            let log = if pj > 0.0 { pj.ln() } else { 0.0 };
                            members.len() as f64 * config.entropy_coeff * pj * (log + entropy)
                        })
                        .collect();
                    for &i in members {
                        let a = adv[i];
                        for player in s.players_of(team) {
                            for (j, gj) in g.iter_mut().enumerate() {
                                let indicator = if batch.transitions[i].actions[player] == j { 1.0 } else { 0.0 };
                                *gj -= a * (indicator - p[j]);
                            }
                        }
                    }
                    grads.add_assign(&backprop(actor, obs, &g)?);
                }
                adam_step(&mut self.actor_opts[team], &mut self.actors[team], &grads, config.max_grad_norm)?;
            }
            for _ in 0..config.critic_epochs {
                let critic = &self.critics[team];
                let mut grads = Gradients::zeros_like(critic);
                for (obs, members) in &groups {
                    let v = critic.forward(obs)?;
                    let mut g = 0.0;
                    for &i in members {
                        g += mse_and_grad(&v, &[targets[i]])?.1[0];
                    }
                    grads.add_assign(&backprop(critic, obs, &[g])?);
                }
                adam_step(&mut self.critic_opts[team], &mut self.critics[team], &grads, config.max_grad_norm)?;
            }
        }
        Ok(())
    }
}

/// Distinct observations with the indices of the steps taken from them.
fn group_by_observation(batch: &RolloutBatch) -> Vec<(Vec<f64>, Vec<usize>)> {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for (i, t) in batch.transitions.iter().enumerate() {
        let slot = *index.entry(fingerprint(&t.observation)).or_insert_with(|| {
            groups.push((t.observation.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(i);
    }
    groups
}

struct ValueCache<'a> {
    critic: &'a Mlp,
    values: HashMap<Vec<u64>, f64>,
}

impl<'a> ValueCache<'a> {
    fn new(critic: &'a Mlp) -> Self {
        Self { critic, values: HashMap::new() }
    }

    fn get(&mut self, observation: &[f64]) -> Result<f64> {
        let key = fingerprint(observation);
        if let Some(&v) = self.values.get(&key) {
            return Ok(v);
        }
        let v = self.critic.forward(observation)?[0];
        self.values.insert(key, v);
        Ok(v)
    }
}

/// Trains the independent baseline on copies of `env`.
pub fn ia2c_train(config: &TrainConfig, env: &Environment) -> Result<TrainResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut agent = Ia2cAgent::new(config, env, &mut rng)?;
    let (metrics, batches) =
        training_loop(config, env, &mut agent, &mut rng, |agent, batch| agent.update(config, batch))?;
    let policy = agent.policy(&env.initial_observation())?;
    Ok(TrainResult {
        algo: "ia2c".into(),
        policy,
        metrics,
        solver_calls: 0,
        actors: agent.actors,
        critics: agent.critics,
        batches,
    })
}
