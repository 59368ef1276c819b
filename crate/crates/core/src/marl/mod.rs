//! Repeated-game learning: the environment, the delegate actor-critic
//! trainer, an independent actor-critic baseline, and a per-player reference
//! used to check that teammates' critics never drift apart.

mod delac;
mod env;
mod memory;
mod ia2c;
mod reference;

pub use delac::{delac_train, delac_train_with, DelacAgent};
pub use env::{
    discounted_returns, discounted_returns_with_boundaries, env_step, Environment,
    ObservationSpec, StepOutcome,
};
pub use ia2c::{ia2c_train, Ia2cAgent};
pub use reference::PerPlayerCritics;
pub(crate) use memory::Accumulator;

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{enumerate_symmetric_ne, SolverOptions};
use crate::error::{Error, Result};
use crate::game::{CountVector, PayoffTensor, TeamStructure};
use crate::harness::{kl_metric, mse_metric};
use crate::neural::{softmax, Mlp};
use crate::payoff::{mixed_payoffs, SymmetricProfile};

/// Which steps the critic and actor losses sum over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossWindow {
    /// Only the batch just collected.
    #[default]
    Batch,
    /// Every step collected so far. Kept as sufficient statistics: per
    /// distinct critic input the visit count and summed targets, per distinct
    /// observation the visit count and summed equilibrium strategies.
    History,
}

/// How the delegate trainer picks a target when the critic's game has
/// several equilibria.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumSelection {
    /// Whatever the solver returns first.
    First,
    /// The equilibrium with the smallest summed `KL(target ‖ current policy)`,
    /// i.e. the one the actors can reach most cheaply.
    #[default]
    NearestToPolicy,
}

/// Training hyper-parameters. Steps count single environment transitions
/// summed over all parallel environments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub total_steps: usize,
    pub gamma: f64,
    /// GAE parameter; only the baseline uses it.
    pub gae_lambda: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Carried for completeness; neither trainer clips its policy ratio.
    pub clip_epsilon: f64,
    /// Actor optimization passes per batch.
    pub epochs: usize,
    /// Critic optimization passes per batch.
    pub critic_epochs: usize,
    pub batch_size: usize,
    pub entropy_coeff: f64,
    pub max_grad_norm: f64,
    pub n_envs: usize,
    pub episode_length: usize,
    pub seed: u64,
    pub eval_interval: usize,
    pub hidden_sizes: Vec<usize>,
    pub observation: ObservationSpec,
    /// Deviation-gain tolerance for equilibria of the critic's game.
    pub solver_tolerance: f64,
    /// Steps the delegate critic's loss sums over.
    pub critic_window: LossWindow,
    /// Steps the delegate actors' loss sums over.
    pub actor_window: LossWindow,
    pub selection: EquilibriumSelection,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            total_steps: 50_000,
            gamma: 0.99,
            gae_lambda: 0.95,
            actor_lr: 3e-4,
            critic_lr: 3e-2,
            clip_epsilon: 0.2,
            epochs: 4,
            critic_epochs: 4,
            batch_size: 256,
            entropy_coeff: 0.0,
            max_grad_norm: 0.5,
            n_envs: 4,
            episode_length: 1,
            seed: 0,
            eval_interval: 100,
            hidden_sizes: vec![64, 64],
            observation: ObservationSpec::Constant,
            solver_tolerance: 1e-6,
            critic_window: LossWindow::Batch,
            actor_window: LossWindow::Batch,
            selection: EquilibriumSelection::NearestToPolicy,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return bad("gae_lambda must lie in [0, 1]");
        }
        if !(self.actor_lr > 0.0 && self.critic_lr > 0.0) || !self.actor_lr.is_finite() || !self.critic_lr.is_finite() {
            return bad("learning rates must be positive");
        }
        if self.batch_size == 0 || self.n_envs == 0 || self.episode_length == 0 || self.eval_interval == 0 {
            return bad("batch size, environment count, episode length and eval interval must be positive");
        }
        if self.epochs == 0 || self.critic_epochs == 0 {
            return bad("epoch counts must be positive");
        }
        if self.hidden_sizes.contains(&0) {
            return bad("hidden layers must be non-empty");
        }
        if !(self.max_grad_norm > 0.0) || !(self.entropy_coeff >= 0.0) || !(self.solver_tolerance > 0.0) {
            return bad("max_grad_norm and solver_tolerance must be positive, entropy_coeff non-negative");
        }
        Ok(())
    }

    /// Solver settings used on critic games.
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions::default().with_tolerance(self.solver_tolerance)
    }

    pub(crate) fn net_dims(&self, input: usize, output: usize) -> Vec<usize> {
        std::iter::once(input)
            .chain(self.hidden_sizes.iter().copied())
            .chain(std::iter::once(output))
            .collect()
    }
}

/// One evaluation of the current policies against the true game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub step: usize,
    pub team_mse_avg: f64,
    pub kl_avg: f64,
    /// Expected payoff of each team under the current policies.
    pub team_payoffs: Vec<f64>,
}

/// Outcome of a training run.
#[derive(Clone, Debug)]
pub struct TrainResult {
    pub algo: String,
    /// Final per-team policies at the episode-start observation.
    pub policy: SymmetricProfile,
    pub metrics: Vec<MetricPoint>,
    pub actors: Vec<Mlp>,
    pub critics: Vec<Mlp>,
    /// Equilibrium problems solved on critic games (DelAC only).
    pub solver_calls: usize,
    pub batches: usize,
}

impl TrainResult {
    pub fn final_metrics(&self) -> Option<&MetricPoint> {
        self.metrics.last()
    }
}

/// Anything that maps an observation to one mixed strategy per team.
pub trait PolicySource {
    fn structure(&self) -> &TeamStructure;
    fn actors(&self) -> &[Mlp];

    fn policy(&self, observation: &[f64]) -> Result<SymmetricProfile> {
        let strategies = self
            .actors()
            .iter()
            .map(|a| a.forward(observation).map(|l| softmax(&l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SymmetricProfile::new(strategies))
    }
}

/// Per-team softmax policy of `trainer` at `observation`.
pub fn extract_policy<P: PolicySource + ?Sized>(trainer: &P, observation: &[f64]) -> Result<SymmetricProfile> {
    trainer.policy(observation)
}

/// Counts scaled by team size and concatenated across teams.
pub fn encode_counts(structure: &TeamStructure, counts: &[CountVector]) -> Vec<f64> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(i, g)| {
            let n = structure.team_size(i) as f64;
            g.0.iter().map(move |&c| c as f64 / n)
        })
        .collect()
}

pub(crate) fn critic_input(structure: &TeamStructure, observation: &[f64], counts: &[CountVector]) -> Vec<f64> {
    let mut x = observation.to_vec();
    x.extend(encode_counts(structure, counts));
    x
}

/// The count-form game whose entry at `g` is `critic(observation ⊕ enc(g))`.
pub fn build_game_from_critic(critic: &Mlp, structure: &TeamStructure, observation: &[f64]) -> Result<PayoffTensor> {
    let expected_in = observation.len() + structure.action_counts().iter().sum::<usize>();
    if critic.input_dim() != expected_in || critic.output_dim() != structure.num_teams() {
        return Err(Error::DimensionMismatch(format!(
            "critic maps {} -> {}, but the game needs {} -> {}",
            critic.input_dim(),
            critic.output_dim(),
            expected_in,
            structure.num_teams()
        )));
    }
    PayoffTensor::from_fn(structure.clone(), |joint| {
        critic
            .forward(&critic_input(structure, observation, joint))
            .expect("dimensions checked above")
    })
}

/// One stored transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub env: usize,
    pub observation: Vec<f64>,
    pub actions: Vec<usize>,
    pub counts: Vec<CountVector>,
    pub rewards: Vec<f64>,
    pub next_observation: Vec<f64>,
    /// The episode ended here.
    pub done: bool,
}

/// Transitions in collection order (round-robin over environments).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RolloutBatch {
    pub transitions: Vec<Transition>,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// Indices of each environment's transitions, in time order.
    pub fn per_env(&self) -> Vec<Vec<usize>> {
        let n = self.transitions.iter().map(|t| t.env + 1).max().unwrap_or(0);
        let mut out = vec![Vec::new(); n];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.env].push(i);
        }
        out
    }

    /// Monte Carlo targets, cut at episode ends and at the end of each
    /// environment's segment of the batch.
    pub fn returns(&self, gamma: f64) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); self.len()];
        for idx in self.per_env() {
            let rewards: Vec<Vec<f64>> = idx.iter().map(|&i| self.transitions[i].rewards.clone()).collect();
            let ends: Vec<bool> = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| self.transitions[i].done || j + 1 == idx.len())
                .collect();
            for (&i, y) in idx.iter().zip(discounted_returns_with_boundaries(&rewards, &ends, gamma)) {
                out[i] = y;
            }
        }
        out
    }

    /// Distinct observations with their multiplicities, in first-seen order.
    pub fn distinct_observations(&self) -> Vec<(Vec<f64>, usize)> {
        let mut order: Vec<(Vec<f64>, usize)> = Vec::new();
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
        for t in &self.transitions {
            let key = fingerprint(&t.observation);
            match seen.get(&key) {
                Some(&j) => order[j].1 += 1,
                None => {
                    seen.insert(key, order.len());
                    order.push((t.observation.clone(), 1));
                }
            }
        }
        order
    }
}

pub(crate) fn fingerprint(observation: &[f64]) -> Vec<u64> {
    observation.iter().map(|v| v.to_bits()).collect()
}

pub(crate) fn sample_action<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (a, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Parallel environments stepped round-robin.
pub struct Rollout {
    envs: Vec<Environment>,
    observations: Vec<Vec<f64>>,
    next_env: usize,
}

impl Rollout {
    /// `n_envs` freshly reset copies of `template`.
    pub fn new(template: &Environment, n_envs: usize) -> Self {
        let envs: Vec<Environment> = (0..n_envs)
            .map(|_| {
                let mut e = template.clone();
                e.reset();
                e
            })
            .collect();
        let observations = envs.iter().map(|e| e.observation()).collect();
        Self {
            envs,
            observations,
            next_env: 0,
        }
    }

    /// Collects `steps` transitions, sampling each player's action from its
    /// team's strategy under `policy`.
    pub fn collect<R, F>(&mut self, steps: usize, rng: &mut R, mut policy: F) -> Result<RolloutBatch>
    where
        R: Rng + ?Sized,
        F: FnMut(&[f64]) -> Result<SymmetricProfile>,
    {
        let mut cache: HashMap<Vec<u64>, SymmetricProfile> = HashMap::new();
        let mut batch = RolloutBatch::default();
        for _ in 0..steps {
            let e = self.next_env;
            self.next_env = (self.next_env + 1) % self.envs.len();
            let obs = self.observations[e].clone();
            let key = fingerprint(&obs);
            if !cache.contains_key(&key) {
                cache.insert(key.clone(), policy(&obs)?);
            }
            let profile = &cache[&key];
            let s = self.envs[e].structure();
            let actions: Vec<usize> = (0..s.num_players())
                .map(|p| sample_action(profile.strategy(s.team_of(p)).probs(), rng))
                .collect();
            let out = self.envs[e].step(&actions)?;
            self.observations[e] = out.observation.clone();
            batch.transitions.push(Transition {
                env: e,
                observation: obs,
                actions,
                counts: out.counts,
                rewards: out.rewards,
                next_observation: out.observation,
                done: out.done,
            });
        }
        Ok(batch)
    }
}

/// Evaluates policies at the episode-start observation against the true game.
pub(crate) struct Evaluator {
    game: PayoffTensor,
    ne_set: Vec<SymmetricProfile>,
    observation: Vec<f64>,
}

impl Evaluator {
    pub(crate) fn new(env: &Environment) -> Result<Self> {
        let ne_set = enumerate_symmetric_ne(env.game(), &SolverOptions::default())?
            .into_iter()
            .map(|s| s.profile)
            .collect();
        Ok(Self {
            game: env.game().clone(),
            ne_set,
            observation: env.initial_observation(),
        })
    }

    pub(crate) fn evaluate<P: PolicySource + ?Sized>(&self, step: usize, agent: &P) -> Result<MetricPoint> {
        let learned = agent.policy(&self.observation)?;
        Ok(MetricPoint {
            step,
            team_mse_avg: mse_metric(&self.game, &learned, &self.ne_set)?,
            kl_avg: kl_metric(&learned, &self.ne_set),
            team_payoffs: mixed_payoffs(&self.game, &learned)?,
        })
    }
}

/// Runs the shared collect/update loop. `update` sees each batch after it is
/// collected; metrics are taken every `eval_interval` steps with the policy
/// that was acting at that step.
pub(crate) fn training_loop<A, R, U>(
    config: &TrainConfig,
    env: &Environment,
    agent: &mut A,
    rng: &mut R,
    mut update: U,
) -> Result<(Vec<MetricPoint>, usize)>
where
    A: PolicySource,
    R: Rng,
    U: FnMut(&mut A, &RolloutBatch) -> Result<()>,
{
    let evaluator = Evaluator::new(env)?;
    let mut rollout = Rollout::new(env, config.n_envs);
    let mut metrics = Vec::new();
    let mut step = 0;
    let mut batches = 0;
    while step < config.total_steps {
        let len = config.batch_size.min(config.total_steps - step);
        let first_eval = step.div_ceil(config.eval_interval) * config.eval_interval;
        if first_eval < step + len {
            let point = evaluator.evaluate(0, agent)?;
            for s in (first_eval..step + len).step_by(config.eval_interval) {
                metrics.push(MetricPoint { step: s, ..point.clone() });
            }
        }
        let batch = rollout.collect(len, rng, |o| agent.policy(o))?;
        update(agent, &batch)?;
        step += len;
        batches += 1;
        if let Some(m) = metrics.last() {
            log::debug!("step {step}: team mse {:.3e}, kl {:.3e}", m.team_mse_avg, m.kl_avg);
        }
    }
    if step % config.eval_interval == 0 {
        metrics.push(evaluator.evaluate(step, agent)?);
    }
    Ok((metrics, batches))
}
