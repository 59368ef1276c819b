//! Delegate actor-critic: one actor per team, one critic with a head per team.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    build_game_from_critic, critic_input, training_loop, Accumulator, Environment, EquilibriumSelection, LossWindow,
    PolicySource, RolloutBatch, TrainConfig, TrainResult,
};
use crate::equilibrium::{enumerate_symmetric_ne, solve_symmetric_ne};
use crate::harness::kl_divergence;
use crate::error::{Error, Result};
use crate::game::{PayoffTensor, TeamStructure};
use crate::neural::{adam_step, backprop, kl_loss, mse_and_grad, Activation, AdamState, Gradients, Mlp};
use crate::payoff::{MixedStrategy, SymmetricProfile};

/// Networks and optimizer state of a delegate actor-critic learner.
#[derive(Clone, Debug)]
pub struct DelacAgent {
    structure: TeamStructure,
    actors: Vec<Mlp>,
    critic: Mlp,
    actor_opts: Vec<AdamState>,
    critic_opt: AdamState,
    solver_calls: usize,
    critic_memory: Accumulator,
    target_memory: Accumulator,
}

impl PolicySource for DelacAgent {
    fn structure(&self) -> &TeamStructure {
        &self.structure
    }

    fn actors(&self) -> &[Mlp] {
        &self.actors
    }
}

impl DelacAgent {
    /// Fresh networks drawn from `rng`: actors first (team order), then the critic.
    pub fn new<R: rand::Rng>(config: &TrainConfig, env: &Environment, rng: &mut R) -> Result<Self> {
        let structure = env.structure().clone();
        let obs_dim = env.observation_dim();
        let actors = (0..structure.num_teams())
            .map(|i| Mlp::new(&config.net_dims(obs_dim, structure.num_actions(i)), Activation::Tanh, rng))
            .collect::<Result<Vec<_>>>()?;
        let critic_in = obs_dim + structure.action_counts().iter().sum::<usize>();
        let critic = Mlp::new(
            &config.net_dims(critic_in, structure.num_teams()),
            Activation::Tanh,
            rng,
        )?;
        let actor_opts = actors.iter().map(|a| AdamState::for_net(a, config.actor_lr)).collect();
        let critic_opt = AdamState::for_net(&critic, config.critic_lr);
        Ok(Self {
            structure,
            actors,
            critic,
            actor_opts,
            critic_opt,
            solver_calls: 0,
            critic_memory: Accumulator::default(),
            target_memory: Accumulator::default(),
        })
    }

    pub fn critic(&self) -> &Mlp {
        &self.critic
    }

    pub fn solver_calls(&self) -> usize {
        self.solver_calls
    }

    /// Fits the critic to Monte Carlo targets over the configured window.
    /// Steps sharing a critic input are pooled, which leaves the gradient of
    /// the summed squared error unchanged.
    pub fn update_critic(&mut self, config: &TrainConfig, batch: &RolloutBatch) -> Result<f64> {
        if config.critic_window == LossWindow::Batch {
            self.critic_memory.clear();
        }
        for (t, y) in batch.transitions.iter().zip(batch.returns(config.gamma)) {
            let x = critic_input(&self.structure, &t.observation, &t.counts);
            self.critic_memory.add(&x, 1.0, &y);
        }
        let mut loss = 0.0;
        for _ in 0..config.critic_epochs {
            loss = 0.0;
            let mut grads = Gradients::zeros_like(&self.critic);
            for (x, w, y) in self.critic_memory.means() {
                let q = self.critic.forward(x)?;
                let (l, mut g) = mse_and_grad(&q, &y)?;
                loss += w * l;
                g.iter_mut().for_each(|v| *v *= w);
                grads.add_assign(&backprop(&self.critic, x, &g)?);
            }
            adam_step(&mut self.critic_opt, &mut self.critic, &grads, config.max_grad_norm)?;
        }
        Ok(loss)
    }

    /// Solves the critic's game once per distinct observation in the batch.
    /// `observe` sees every game built.
    pub fn equilibrium_targets<F>(
        &mut self,
        config: &TrainConfig,
        batch: &RolloutBatch,
        observe: &mut F,
    ) -> Result<Vec<(Vec<f64>, usize, SymmetricProfile)>>
    where
        F: FnMut(&PayoffTensor),
    {
        let opts = config.solver_options();
        let mut out = Vec::new();
        for (obs, count) in batch.distinct_observations() {
            let game = build_game_from_critic(&self.critic, &self.structure, &obs)?;
            observe(&game);
            self.solver_calls += 1;
            let annotate = |e| match e {
                Error::NoEquilibriumFound(msg) => Error::NoEquilibriumFound(format!(
                    "critic game at observation {obs:?} (payoffs {:?}): {msg}",
                    game.entries()
                )),
                other => other,
            };
            let target = match config.selection {
                EquilibriumSelection::First => solve_symmetric_ne(&game, &opts).map_err(annotate)?.profile,
                EquilibriumSelection::NearestToPolicy => {
                    let current = self.policy(&obs)?;
                    let mut best: Option<(f64, SymmetricProfile)> = None;
                    for sol in enumerate_symmetric_ne(&game, &opts).map_err(annotate)? {
                        let d: f64 = sol
                            .profile
                            .strategies()
                            .iter()
                            .zip(current.strategies())
                            .map(|(t, p)| kl_divergence(t, p))
                            .sum();
                        if best.as_ref().map_or(true, |(b, _)| d < *b) {
                            best = Some((d, sol.profile));
                        }
                    }
                    best.expect("enumeration returns at least one equilibrium").1
                }
            };
            out.push((obs, count, target));
        }
        Ok(out)
    }

    /// Moves each actor toward its team's equilibrium strategies. The loss
    /// is the KL divergence summed over the window's steps; per observation
    /// that equals, up to a constant, the visit count times the KL divergence
    /// from the mean target.
    pub fn update_actors(
        &mut self,
        config: &TrainConfig,
        targets: &[(Vec<f64>, usize, SymmetricProfile)],
    ) -> Result<f64> {
        if config.actor_window == LossWindow::Batch {
            self.target_memory.clear();
        }
        for (obs, count, profile) in targets {
            let flat: Vec<f64> = profile.strategies().iter().flat_map(|s| s.probs().to_vec()).collect();
            self.target_memory.add(obs, *count as f64, &flat);
        }
        let means: Vec<(Vec<f64>, f64, Vec<f64>)> = self
            .target_memory
            .means()
            .map(|(o, w, m)| (o.to_vec(), w, m))
            .collect();
        let mut total = 0.0;
        for _ in 0..config.epochs {
            total = 0.0;
            for team in 0..self.actors.len() {
                let offset: usize = (0..team).map(|i| self.structure.num_actions(i)).sum();
                let k = self.structure.num_actions(team);
                let actor = &self.actors[team];
                let mut grads = Gradients::zeros_like(actor);
                for (obs, w, mean) in &means {
                    let target = MixedStrategy::from_simplex(mean[offset..offset + k].to_vec());
                    let logits = actor.forward(obs)?;
                    let (l, mut g) = kl_loss(&target, &logits);
                    total += w * l;
                    g.iter_mut().for_each(|v| *v *= w);
                    grads.add_assign(&backprop(actor, obs, &g)?);
                }
                adam_step(&mut self.actor_opts[team], &mut self.actors[team], &grads, config.max_grad_norm)?;
            }
        }
        Ok(total)
    }
}

/// Trains delegate actors and a centralized critic on copies of `env`.
pub fn delac_train(config: &TrainConfig, env: &Environment) -> Result<TrainResult> {
    delac_train_with(config, env, |_| {})
}

/// [`delac_train`] with a hook that sees every critic game built.
pub fn delac_train_with<F>(config: &TrainConfig, env: &Environment, mut observe: F) -> Result<TrainResult>
where
    F: FnMut(&PayoffTensor),
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut agent = DelacAgent::new(config, env, &mut rng)?;
    let (metrics, batches) = training_loop(config, env, &mut agent, &mut rng, |agent, batch| {
        agent.update_critic(config, batch)?;
        let targets = agent.equilibrium_targets(config, batch, &mut observe)?;
        agent.update_actors(config, &targets)?;
        Ok(())
    })?;
    let policy = agent.policy(&env.initial_observation())?;
    Ok(TrainResult {
        algo: "delac".into(),
        policy,
        metrics,
        solver_calls: agent.solver_calls,
        actors: agent.actors,
        critics: vec![agent.critic],
        batches,
    })
}
