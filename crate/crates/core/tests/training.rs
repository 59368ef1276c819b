use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use teamsym::game::{gmp_game, linear_game, LinearPayoffSpec, TeamStructure};
use teamsym::marl::{
    build_game_from_critic, delac_train, discounted_returns, discounted_returns_with_boundaries, extract_policy,
    ia2c_train, DelacAgent, Environment, ObservationSpec, PolicySource, Rollout, TrainConfig,
};
use teamsym::neural::{Activation, Mlp};
use teamsym::payoff::{MixedStrategy, SymmetricProfile};

fn naive_returns(rewards: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    (0..rewards.len())
        .map(|t| {
            (0..rewards[t].len())
                .map(|i| (t..rewards.len()).map(|u| gamma.powi((u - t) as i32) * rewards[u][i]).sum())
                .collect()
        })
        .collect()
}

#[test]
fn suffix_scan_matches_quadratic_returns() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for len in [1, 2, 7, 64] {
        let rewards: Vec<Vec<f64>> = (0..len)
            .map(|_| (0..2).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect())
            .collect();
        let fast = discounted_returns(&rewards, 0.97);
        for (a, b) in fast.iter().flatten().zip(naive_returns(&rewards, 0.97).iter().flatten()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn returns_stop_at_episode_ends() {
    let rewards = vec![vec![1.0], vec![1.0], vec![1.0], vec![1.0]];
    let ends = [false, true, false, true];
    let r = discounted_returns_with_boundaries(&rewards, &ends, 0.5);
    assert_eq!(r, vec![vec![1.5], vec![1.0], vec![1.5], vec![1.0]]);
}

fn tv(a: &MixedStrategy, b: &MixedStrategy) -> f64 {
    0.5 * a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn dominant_env() -> Environment {
    // Every player gains 1 per teammate or opponent on action 0, so action 0 is dominant.
    let s = TeamStructure::uniform(2, 2, 2).unwrap();
    let spec = LinearPayoffSpec::new(s, vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
    Environment::new(linear_game(&spec), 1, ObservationSpec::Constant).unwrap()
}

fn short(seed: u64) -> TrainConfig {
    TrainConfig { total_steps: 10_000, seed, ..TrainConfig::default() }
}

#[test]
fn delac_finds_the_dominant_action() {
    let r = delac_train(&short(0), &dominant_env()).unwrap();
    for x in r.policy.strategies() {
        assert!(tv(x, &MixedStrategy::pure(2, 0)) <= 0.05, "{:?}", x);
    }
}

#[test]
fn ia2c_finds_the_dominant_action() {
    let config = TrainConfig { total_steps: 20_000, ..short(0) };
    let r = ia2c_train(&config, &dominant_env()).unwrap();
    for x in r.policy.strategies() {
        assert!(tv(x, &MixedStrategy::pure(2, 0)) <= 0.1, "{:?}", x);
    }
}

#[test]
fn ia2c_lags_delac_on_matching_pennies() {
    let env = Environment::new(gmp_game(0.5), 1, ObservationSpec::Constant).unwrap();
    let kl = |f: fn(&TrainConfig, &Environment) -> teamsym::Result<teamsym::marl::TrainResult>| {
        (0..3).map(|s| f(&short(s), &env).unwrap().final_metrics().unwrap().kl_avg).sum::<f64>() / 3.0
    };
    let (d, i) = (kl(delac_train), kl(ia2c_train));
    assert!(d < i, "delac {d} ia2c {i}");
}

#[test]
fn one_solver_call_per_batch_with_a_constant_observation() {
    let env = Environment::new(gmp_game(0.5), 1, ObservationSpec::Constant).unwrap();
    let config = TrainConfig { total_steps: 3000, ..TrainConfig::default() };
    let r = delac_train(&config, &env).unwrap();
    assert!(r.batches > 0);
    assert!(r.solver_calls <= r.batches, "{} calls for {} batches", r.solver_calls, r.batches);
}

#[test]
fn training_is_deterministic_in_the_seed() {
    let env = Environment::new(gmp_game(0.5), 1, ObservationSpec::Constant).unwrap();
    let config = TrainConfig { total_steps: 2000, seed: 11, ..TrainConfig::default() };
    let a = delac_train(&config, &env).unwrap();
    let b = delac_train(&config, &env).unwrap();
    assert_eq!(a.actors, b.actors);
    assert_eq!(a.metrics, b.metrics);
    let c = ia2c_train(&config, &env).unwrap();
    let d = ia2c_train(&config, &env).unwrap();
    assert_eq!(c.actors, d.actors);
}

struct Fixed(TeamStructure, Vec<Mlp>);

impl PolicySource for Fixed {
    fn structure(&self) -> &TeamStructure {
        &self.0
    }
    fn actors(&self) -> &[Mlp] {
        &self.1
    }
}

#[test]
fn zero_actors_play_uniformly() {
    let s = TeamStructure::new(vec![2, 1], vec![3, 2]).unwrap();
    let actors = vec![
        Mlp::zeros(&[1, 8, 3], Activation::Tanh).unwrap(),
        Mlp::zeros(&[1, 8, 2], Activation::Tanh).unwrap(),
    ];
    let p = extract_policy(&Fixed(s, actors), &[1.0]).unwrap();
    assert_eq!(p, SymmetricProfile::uniform(&[3, 2]));
}

#[test]
fn critic_trained_to_tolerance_reproduces_the_game() {
    let game = gmp_game(0.5);
    let env = Environment::new(game.clone(), 1, ObservationSpec::Constant).unwrap();
    // A smaller step than the training default so the fit can settle.
    let config = TrainConfig { critic_lr: 3e-3, ..TrainConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut agent = DelacAgent::new(&config, &env, &mut rng).unwrap();
    let mut rollout = Rollout::new(&env, config.n_envs);
    let uniform = SymmetricProfile::uniform(&[2, 2]);
    let obs = env.initial_observation();
    let errors = |agent: &DelacAgent| -> Vec<f64> {
        let learned = build_game_from_critic(agent.critic(), env.structure(), &obs).unwrap();
        learned
            .entries()
            .iter()
            .flatten()
            .zip(game.entries().iter().flatten())
            .map(|(a, b)| a - b)
            .collect()
    };
    let mut mse = f64::INFINITY;
    for _ in 0..2000 {
        let batch = rollout.collect(config.batch_size, &mut rng, |_| Ok(uniform.clone())).unwrap();
        agent.update_critic(&config, &batch).unwrap();
        let e = errors(&agent);
        mse = e.iter().map(|x| x * x).sum::<f64>() / e.len() as f64;
        // Train a little past the tolerance so no single entry lags.
        if mse <= 1e-5 {
            break;
        }
    }
    assert!(mse <= 1e-4, "critic MSE stalled at {mse}");
    let worst = errors(&agent).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(worst <= 1e-2, "largest entry error {worst}");
}
