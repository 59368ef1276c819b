//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use teamsym::equilibrium::{enumerate_symmetric_ne, solve_symmetric_ne, SolverOptions};
use teamsym::game::{
    check_common_payoff, check_team_symmetry, gen_random_game, gmp_game, PayoffTensor, TeamStructure,
};
use teamsym::harness::{run_suite, Algo, Suite, SuiteConfig};
use teamsym::marl::{
    delac_train, delac_train_with, Environment, ObservationSpec, PerPlayerCritics, Rollout, TrainConfig,
};
use teamsym::neural::{backprop, kl_loss, mse_and_grad, softmax, Activation, Mlp};
use teamsym::payoff::{brute_force_payoff, mixed_payoff, team_action_payoff, Focal, MixedStrategy, SymmetricProfile};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_profile(structure: &TeamStructure, rng: &mut ChaCha8Rng) -> SymmetricProfile {
    SymmetricProfile::new(
        structure
            .action_counts()
            .iter()
            .map(|&k| {
                let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
                MixedStrategy::normalized(raw).unwrap()
            })
            .collect(),
    )
}

fn random_structure(rng: &mut ChaCha8Rng) -> TeamStructure {
    loop {
        let m = rng.gen_range(2..=3);
        let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=3)).collect();
        if sizes.iter().sum::<usize>() > 6 {
            continue;
        }
        let actions = (0..m).map(|_| rng.gen_range(2..=3)).collect();
        return TeamStructure::new(sizes, actions).unwrap();
    }
}

fn payoff_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = random_structure(&mut rng);
        let m = s.num_teams();
        let game = PayoffTensor::from_fn(s.clone(), |_| (0..m).map(|_| rng.gen_range(-10.0..10.0)).collect()).unwrap();
        let profile = random_profile(&s, &mut rng);
        for team in 0..m {
            for a in 0..s.num_actions(team) {
                let fast = team_action_payoff(&game, team, a, &profile).unwrap();
                let slow = brute_force_payoff(&game, team, Focal::Action(a), &profile).unwrap();
                worst = worst.max((fast - slow).abs());
            }
            let fast = mixed_payoff(&game, team, &profile).unwrap();
            let slow = brute_force_payoff(&game, team, Focal::Mixed, &profile).unwrap();
            worst = worst.max((fast - slow).abs());
        }
    }
    outcome(worst <= 1e-10, format!("100 cases, max |multinomial - enumeration| = {worst:.2e}"))
}

fn gmp_equilibrium() -> Outcome {
    let game = gmp_game(0.5);
    let opts = SolverOptions::default();
    let sol = solve_symmetric_ne(&game, &opts).unwrap();
    let uniform = SymmetricProfile::uniform(&[2, 2]);
    let dist = sol.profile.max_abs_diff(&uniform);
    let all = enumerate_symmetric_ne(&game, &opts).unwrap();
    outcome(
        dist <= 1e-6 && all.len() == 1,
        format!("distance to uniform {dist:.2e}, {} equilibrium(s) enumerated", all.len()),
    )
}

fn existence() -> Outcome {
    let opts = SolverOptions::default();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for g in 0..200u64 {
        let s = TeamStructure::uniform(2, 2, 2).unwrap();
        let game = gen_random_game(s, 0, 10, g % 2 == 0, 1000 + g).unwrap();
        match solve_symmetric_ne(&game, &opts) {
            Ok(sol) => {
                for team in 0..2 {
                    let value = brute_force_payoff(&game, team, Focal::Mixed, &sol.profile).unwrap();
                    for a in 0..2 {
                        let dev = brute_force_payoff(&game, team, Focal::Action(a), &sol.profile).unwrap();
                        worst = worst.max(dev - value);
                    }
                }
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && worst <= 1e-6,
        format!("200 games, {failures} solver failures, max brute-force deviation gain {worst:.2e}"),
    )
}

fn gradients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let depth = rng.gen_range(1..=3);
        let mut dims = vec![rng.gen_range(1..=5)];
        for _ in 0..depth {
            dims.push(rng.gen_range(2..=8));
        }
        let activation = if case % 2 == 0 { Activation::Tanh } else { Activation::Identity };
        let net = Mlp::new(&dims, activation, &mut rng).unwrap();
        let input: Vec<f64> = (0..dims[0]).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let out_dim = *dims.last().unwrap();
        let use_kl = case % 3 != 0;
        let target: Vec<f64> = if use_kl {
            let logits: Vec<f64> = (0..out_dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            softmax(&logits).into_inner()
        } else {
            (0..out_dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let loss = |n: &Mlp| -> (f64, Vec<f64>) {
            let out = n.forward(&input).unwrap();
            if use_kl {
                kl_loss(&MixedStrategy::new(target.clone()).unwrap(), &out)
            } else {
                mse_and_grad(&out, &target).unwrap()
            }
        };
        let (_, out_grad) = loss(&net);
        let analytic = backprop(&net, &input, &out_grad).unwrap().flat();
        let base = net.params();
        for i in 0..base.len() {
            let mut up = net.clone();
            let mut p = base.clone();
            p[i] += h;
            up.set_params(&p).unwrap();
            let mut dn = net.clone();
            p[i] -= 2.0 * h;
            dn.set_params(&p).unwrap();
            let fd = (loss(&up).0 - loss(&dn).0) / (2.0 * h);
            let scale = fd.abs().max(analytic[i].abs()).max(1e-3);
            worst = worst.max((fd - analytic[i]).abs() / scale);
        }
    }
    outcome(worst <= 1e-5, format!("50 random nets, max relative error {worst:.2e}"))
}

fn symmetry() -> Outcome {
    // Per-player critics, shared initialization within teams, identical data.
    let config = TrainConfig { batch_size: 32, episode_length: 4, ..TrainConfig::default() };
    let env = Environment::new(gmp_game(0.5), config.episode_length, ObservationSpec::LastCounts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut critics = PerPlayerCritics::new(&config, env.structure(), env.observation_dim(), &mut rng).unwrap();
    let mut rollout = Rollout::new(&env, config.n_envs);
    let policy = SymmetricProfile::new(vec![
        MixedStrategy::new(vec![0.3, 0.7]).unwrap(),
        MixedStrategy::new(vec![0.6, 0.4]).unwrap(),
    ]);
    let mut gap: f64 = 0.0;
    for _ in 0..100 {
        let batch = rollout.collect(config.batch_size, &mut rng, |_| Ok(policy.clone())).unwrap();
        critics.update(&config, &batch).unwrap();
        for t in &batch.transitions {
            gap = gap.max(critics.within_team_gap(&t.observation, &t.actions).unwrap());
        }
    }

    // Every critic game built during a short delegate run.
    let train = TrainConfig { total_steps: 1000, ..TrainConfig::default() };
    let env = Environment::new(gmp_game(0.5), train.episode_length, train.observation).unwrap();
    let mut built = 0;
    let mut broken = 0;
    delac_train_with(&train, &env, |g| {
        built += 1;
        let full = g.expand().unwrap();
        if !(check_common_payoff(&full) && check_team_symmetry(&full)) {
            broken += 1;
        }
    })
    .unwrap();
    outcome(
        gap <= 1e-12 && built > 0 && broken == 0,
        format!("within-team critic gap {gap:.1e} over 100 updates; {built} critic games, {broken} asymmetric"),
    )
}

fn window_mean(points: &[teamsym::marl::MetricPoint], keep: impl Fn(usize) -> bool) -> f64 {
    let v: Vec<f64> = points.iter().filter(|p| keep(p.step)).map(|p| p.team_mse_avg).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn delac_gmp() -> Outcome {
    let env = Environment::new(gmp_game(0.5), TrainConfig::default().episode_length, ObservationSpec::Constant).unwrap();
    let seeds = 5;
    let (mut kl, mut first, mut last) = (0.0, 0.0, 0.0);
    for seed in 0..seeds {
        let config = TrainConfig { total_steps: 10_000, seed, ..TrainConfig::default() };
        let r = delac_train(&config, &env).unwrap();
        kl += r.final_metrics().unwrap().kl_avg / seeds as f64;
        first += window_mean(&r.metrics, |s| s < 1000) / seeds as f64;
        last += window_mean(&r.metrics, |s| s > 9000) / seeds as f64;
    }
    outcome(
        kl <= 0.05 && last <= 0.1 * first,
        format!("mean final KL {kl:.4}; team MSE first 1000 steps {first:.2e}, last 1000 steps {last:.2e}"),
    )
}

fn zero_sum_ordering() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut config = SuiteConfig::new(Suite::ZeroSum, dir.path());
    config.n_games = 10;
    config.seeds_per_game = 3;
    config.train = TrainConfig { total_steps: 10_000, ..TrainConfig::default() };
    let report = run_suite(&config).unwrap();
    let delac = report.summary(Algo::Delac).unwrap();
    let ia2c = report.summary(Algo::Ia2c).unwrap();
    outcome(
        report.failures.is_empty() && delac.runs == 30 && delac.final_kl_mean < ia2c.final_kl_mean && delac.final_kl_mean <= 0.05,
        format!(
            "final KL delac {:.4}±{:.4} vs ia2c {:.4}±{:.4} over {} runs each",
            delac.final_kl_mean, delac.final_kl_std, ia2c.final_kl_mean, ia2c.final_kl_std, delac.runs
        ),
    )
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.join("metrics"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}"));
        let status = Command::new(env!("CARGO_BIN_EXE_teamsym"))
            .args(["bench", "--suite", "gmp", "--seed", "7", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(false, format!("bench exited with {}", status.status));
        }
        outputs.push(csv_bytes(&out));
    }
    let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
    outcome(same, format!("{} metric CSVs compared byte for byte", outputs[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("payoff oracle equivalence", payoff_oracle),
        ("matching pennies equilibrium", gmp_equilibrium),
        ("equilibrium existence on random games", existence),
        ("gradient correctness", gradients),
        ("within-team symmetry of critics and critic games", symmetry),
        ("delegate actor-critic on matching pennies", delac_gmp),
        ("zero-sum suite ordering", zero_sum_ordering),
        ("bench determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {} {name}: {} ({:.1?})",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
