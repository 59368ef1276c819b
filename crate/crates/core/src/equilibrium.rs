//! Team-symmetric Nash equilibria.
//!
//! A team-symmetric profile `(x_1, …, x_m)` is an equilibrium when, for every
//! team `i`, each action in the support of `x_i` earns the same focal payoff
//! `U_i` and no action earns more. Writing `r_{i,j} = U_i - ũ_{i,j}` gives the
//! complementarity system
//!
//! ```text
//! ũ_{i,j}(x) + r_{i,j} = U_i,   Σ_j (x_i)_j = 1,
//! (x_i)_j ≥ 0,  r_{i,j} ≥ 0,   (x_i)_j · r_{i,j} = 0.
//! ```
//!
//! The solver guesses the support of every team, solves the equal-payoff
//! equations on that support with damped Newton, and keeps the candidate if it
//! passes the deviation-gain check. For teams larger than one player the
//! equations are polynomial, so a support may need several starting points;
//! when every support attempt fails, the Nash improvement map is iterated with
//! averaging and the result is polished with Newton.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{FullFormGame, PayoffTensor, TeamStructure};
use crate::payoff::{
    mixed_payoffs, raw_action_payoff, raw_action_payoff_gradient, team_action_payoffs,
    MixedStrategy, SymmetricProfile,
};

/// Solver knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Largest deviation gain accepted for a returned solution.
    pub tolerance: f64,
    pub max_newton_iters: usize,
    /// Total improvement-map iterations spent by the fallback, split across starts.
    pub max_fixed_point_iters: usize,
    /// Random starting points per support (and fallback starts).
    pub multistarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_newton_iters: 100,
            max_fixed_point_iters: 100_000,
            multistarts: 32,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "solver tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// A verified team-symmetric equilibrium.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub profile: SymmetricProfile,
    /// Team values `U*_i` (expected payoff of a team-`i` agent).
    pub values: Vec<f64>,
    /// Slacks `r_{i,j} = max(0, U*_i - ũ_{i,j})`.
    pub slacks: Vec<Vec<f64>>,
    /// ε-Nash gap: the largest positive deviation gain.
    pub residual: f64,
    /// `support[i][j]` is true when team `i` plays action `j` with positive probability.
    pub support: Vec<Vec<bool>>,
}

impl EquilibriumSolution {
    /// Evaluates values, slacks and residual of `profile` in `game`.
    pub fn evaluate(game: &PayoffTensor, profile: SymmetricProfile) -> Result<Self> {
        let values = mixed_payoffs(game, &profile)?;
        let mut slacks = Vec::with_capacity(values.len());
        let mut residual: f64 = 0.0;
        for (i, &value) in values.iter().enumerate() {
            let per_action = team_action_payoffs(game, i, &profile)?;
            residual = per_action
                .iter()
                .fold(residual, |r, u| r.max(u - value));
            slacks.push(per_action.iter().map(|u| (value - u).max(0.0)).collect());
        }
        let support = profile
            .strategies()
            .iter()
            .map(|x| x.probs().iter().map(|&p| p > 0.0).collect())
            .collect();
        Ok(Self {
            profile,
            values,
            slacks,
            residual,
            support,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `δ_{i,a} = ũ_{i,a}(x) - ū_i(x)` for every team and action.
pub fn deviation_gains(game: &PayoffTensor, profile: &SymmetricProfile) -> Result<Vec<Vec<f64>>> {
    (0..game.num_teams())
        .map(|i| {
            let per_action = team_action_payoffs(game, i, profile)?;
            let value: f64 = per_action
                .iter()
                .zip(profile.strategy(i).probs())
                .map(|(u, x)| u * x)
                .sum();
            Ok(per_action.into_iter().map(|u| u - value).collect())
        })
        .collect()
}

/// Largest positive deviation gain (0 at an exact equilibrium).
pub fn epsilon_residual(game: &PayoffTensor, profile: &SymmetricProfile) -> Result<f64> {
    Ok(deviation_gains(game, profile)?
        .iter()
        .flatten()
        .fold(0.0, |r: f64, &g| r.max(g)))
}

/// True iff no team can gain more than `eps` by a unilateral deviation.
pub fn verify_equilibrium(game: &PayoffTensor, profile: &SymmetricProfile, eps: f64) -> Result<bool> {
    Ok(epsilon_residual(game, profile)? <= eps)
}

fn improvement_step(x: &[f64], gains: &[f64]) -> Vec<f64> {
    let positive: Vec<f64> = gains.iter().map(|g| g.max(0.0)).collect();
    let denom = 1.0 + positive.iter().sum::<f64>();
    x.iter()
        .zip(&positive)
        .map(|(p, g)| (p + g) / denom)
        .collect()
}

/// Nash's improvement map restricted to team-symmetric profiles: each team
/// shifts mass toward actions that beat its current expected payoff.
pub fn nash_improvement_map(game: &PayoffTensor, profile: &SymmetricProfile) -> Result<SymmetricProfile> {
    let gains = deviation_gains(game, profile)?;
    let strategies = profile
        .strategies()
        .iter()
        .zip(&gains)
        .map(|(x, g)| MixedStrategy::normalized(improvement_step(x.probs(), g)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymmetricProfile::new(strategies))
}

/// Expected payoff of `player` in a per-player game where player `p` mixes
/// with `strategies[p]`.
pub fn full_form_expected_payoff(game: &FullFormGame, player: usize, strategies: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for index in 0..game.num_profiles() {
        let profile = game.profile_at(index);
        let w: f64 = profile
            .iter()
            .zip(strategies)
            .map(|(&a, s)| s[a])
            .product();
        if w != 0.0 {
            total += w * game.payoff(player, &profile);
        }
    }
    total
}

/// The improvement map on arbitrary per-player profiles of a full-form game.
pub fn per_player_improvement_map(game: &FullFormGame, strategies: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..strategies.len())
        .map(|i| {
            let base = full_form_expected_payoff(game, i, strategies);
            let gains: Vec<f64> = (0..strategies[i].len())
                .map(|a| {
                    let mut deviated = strategies.to_vec();
                    deviated[i] = MixedStrategy::pure(strategies[i].len(), a).into_inner();
                    full_form_expected_payoff(game, i, &deviated) - base
                })
                .collect();
            improvement_step(&strategies[i], &gains)
        })
        .collect()
}

type Support = Vec<Vec<usize>>;

fn team_supports(k: usize) -> Vec<Vec<usize>> {
    (1..=k).flat_map(|size| (0..k).combinations(size)).collect()
}

/// Joint supports ordered by total size, then lexicographically.
fn joint_supports(structure: &TeamStructure) -> Vec<Support> {
    let mut all: Vec<Support> = structure
        .action_counts()
        .iter()
        .map(|&k| team_supports(k))
        .multi_cartesian_product()
        .collect();
    all.sort_by(|a, b| {
        let sa: usize = a.iter().map(Vec::len).sum();
        let sb: usize = b.iter().map(Vec::len).sum();
        sa.cmp(&sb).then_with(|| a.cmp(b))
    });
    all
}

fn uniform_on(support: &Support, structure: &TeamStructure) -> Vec<Vec<f64>> {
    support
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut x = vec![0.0; structure.num_actions(i)];
            for &a in s {
                x[a] = 1.0 / s.len() as f64;
            }
            x
        })
        .collect()
}

/// Dirichlet(1) draw restricted to the support.
fn random_on(support: &Support, structure: &TeamStructure, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    support
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut x = vec![0.0; structure.num_actions(i)];
            let draws: Vec<f64> = s
                .iter()
                .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                .collect();
            let total: f64 = draws.iter().sum();
            for (&a, d) in s.iter().zip(draws) {
                x[a] = d / total;
            }
            x
        })
        .collect()
}

fn has_free_variables(support: &Support) -> bool {
    support.iter().any(|s| s.len() > 1)
}

struct SupportSystem<'a> {
    game: &'a PayoffTensor,
    support: &'a Support,
    /// Offset of team `i`'s block (its support probabilities followed by `U_i`).
    offsets: Vec<usize>,
    dim: usize,
}

impl<'a> SupportSystem<'a> {
    fn new(game: &'a PayoffTensor, support: &'a Support) -> Self {
        let mut offsets = Vec::with_capacity(support.len());
        let mut dim = 0;
        for s in support {
            offsets.push(dim);
            dim += s.len() + 1;
        }
        Self {
            game,
            support,
            offsets,
            dim,
        }
    }

    fn unpack(&self, z: &DVector<f64>) -> Vec<Vec<f64>> {
        self.support
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut x = vec![0.0; self.game.structure().num_actions(i)];
                for (slot, &a) in s.iter().enumerate() {
                    x[a] = z[self.offsets[i] + slot];
                }
                x
            })
            .collect()
    }

    fn pack(&self, x: &[Vec<f64>]) -> DVector<f64> {
        let probs: Vec<&[f64]> = x.iter().map(Vec::as_slice).collect();
        let mut z = DVector::zeros(self.dim);
        for (i, s) in self.support.iter().enumerate() {
            let mut value = 0.0;
            for (slot, &a) in s.iter().enumerate() {
                z[self.offsets[i] + slot] = x[i][a];
                value += x[i][a] * raw_action_payoff(self.game, i, a, &probs);
            }
            z[self.offsets[i] + s.len()] = value;
        }
        z
    }

    fn residual(&self, z: &DVector<f64>) -> DVector<f64> {
        let x = self.unpack(z);
        let probs: Vec<&[f64]> = x.iter().map(Vec::as_slice).collect();
        let mut f = DVector::zeros(self.dim);
        for (i, s) in self.support.iter().enumerate() {
            let value = z[self.offsets[i] + s.len()];
            let mut mass = 0.0;
            for (slot, &a) in s.iter().enumerate() {
                f[self.offsets[i] + slot] = raw_action_payoff(self.game, i, a, &probs) - value;
                mass += z[self.offsets[i] + slot];
            }
            f[self.offsets[i] + s.len()] = mass - 1.0;
        }
        f
    }

    fn jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let x = self.unpack(z);
        let probs: Vec<&[f64]> = x.iter().map(Vec::as_slice).collect();
        let mut jac = DMatrix::zeros(self.dim, self.dim);
        for (i, s) in self.support.iter().enumerate() {
            for (slot, &a) in s.iter().enumerate() {
                let row = self.offsets[i] + slot;
                let grad = raw_action_payoff_gradient(self.game, i, a, &probs);
                for (j, sj) in self.support.iter().enumerate() {
                    for (col_slot, &l) in sj.iter().enumerate() {
                        jac[(row, self.offsets[j] + col_slot)] = grad[j][l];
                    }
                }
                jac[(row, self.offsets[i] + s.len())] = -1.0;
            }
            let row = self.offsets[i] + s.len();
            for slot in 0..s.len() {
                jac[(row, self.offsets[i] + slot)] = 1.0;
            }
        }
        jac
    }

    /// Damped Newton from `start`. Returns the final probabilities, or `None`
    /// when the Jacobian is singular or the iteration stalls far from a root.
    fn solve(&self, start: &[Vec<f64>], max_iters: usize, scale: f64) -> Option<Vec<Vec<f64>>> {
        let mut z = self.pack(start);
        let mut f = self.residual(&z);
        let mut norm = f.amax();
        let target = 1e-13 * scale;
        for _ in 0..max_iters {
            if norm <= target {
                break;
            }
            let step = self.jacobian(&z).lu().solve(&(-&f))?;
            if step.iter().any(|v| !v.is_finite()) {
                return None;
            }
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..=30 {
                let candidate = &z + &step * t;
                let fc = self.residual(&candidate);
                let nc = fc.amax();
                if nc < norm {
                    z = candidate;
                    f = fc;
                    norm = nc;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if norm > 1e-8 * scale {
            return None;
        }
        Some(self.unpack(&z))
    }
}

fn payoff_scale(game: &PayoffTensor) -> f64 {
    game.entries()
        .iter()
        .flatten()
        .fold(1.0, |acc: f64, v| acc.max(v.abs()))
}

/// Turns raw Newton output into a verified solution, if it is one.
fn accept(game: &PayoffTensor, x: Vec<Vec<f64>>, tol: f64) -> Option<EquilibriumSolution> {
    if x.iter().flatten().any(|p| !p.is_finite() || *p < -tol) {
        return None;
    }
    let strategies = x
        .into_iter()
        .map(|p| MixedStrategy::normalized(p.into_iter().map(|v| if v < 0.0 { 0.0 } else { v }).collect()))
        .collect::<Result<Vec<_>>>()
        .ok()?;
    let solution = EquilibriumSolution::evaluate(game, SymmetricProfile::new(strategies)).ok()?;
    (solution.residual <= tol).then_some(solution)
}

fn uniform_solution(game: &PayoffTensor) -> Result<EquilibriumSolution> {
    EquilibriumSolution::evaluate(
        game,
        SymmetricProfile::uniform(game.structure().action_counts()),
    )
}

fn is_degenerate(game: &PayoffTensor) -> bool {
    game.is_constant_per_team(1e-12 * payoff_scale(game))
}

struct Search<'a> {
    game: &'a PayoffTensor,
    opts: &'a SolverOptions,
    supports: Vec<Support>,
    scale: f64,
}

impl<'a> Search<'a> {
    fn new(game: &'a PayoffTensor, opts: &'a SolverOptions) -> Self {
        Self {
            game,
            opts,
            supports: joint_supports(game.structure()),
            scale: payoff_scale(game),
        }
    }

    fn attempt(&self, support: &Support, start: &[Vec<f64>]) -> Option<EquilibriumSolution> {
        let system = SupportSystem::new(self.game, support);
        let x = system.solve(start, self.opts.max_newton_iters, self.scale)?;
        accept(self.game, x, self.opts.tolerance)
    }

    /// Improvement-map iteration with averaging over the last 100 iterates,
    /// polished with Newton on the averaged point's support.
    fn fixed_point_fallback(&self, rng: &mut ChaCha8Rng) -> Option<EquilibriumSolution> {
        const WINDOW: usize = 100;
        let structure = self.game.structure();
        let full: Support = structure.action_counts().iter().map(|&k| (0..k).collect()).collect();
        let starts = self.opts.multistarts.max(1);
        let per_start = (self.opts.max_fixed_point_iters / starts).max(WINDOW);
        for start in 0..starts {
            let init = if start == 0 {
                uniform_on(&full, structure)
            } else {
                random_on(&full, structure, rng)
            };
            let mut profile = SymmetricProfile::new(
                init.into_iter()
                    .map(|p| MixedStrategy::normalized(p).expect("positive draw"))
                    .collect(),
            );
            let mut window: Vec<Vec<Vec<f64>>> = Vec::with_capacity(WINDOW);
            for iter in 0..per_start {
                profile = nash_improvement_map(self.game, &profile).ok()?;
                if window.len() == WINDOW {
                    window.remove(0);
                }
                window.push(
                    profile
                        .strategies()
                        .iter()
                        .map(|s| s.probs().to_vec())
                        .collect(),
                );
                if (iter + 1) % WINDOW != 0 {
                    continue;
                }
                let averaged: Vec<Vec<f64>> = (0..structure.num_teams())
                    .map(|i| {
                        (0..structure.num_actions(i))
                            .map(|a| window.iter().map(|w| w[i][a]).sum::<f64>() / window.len() as f64)
                            .collect()
                    })
                    .collect();
                if let Some(sol) = accept(self.game, averaged.clone(), self.opts.tolerance) {
                    return Some(sol);
                }
                if let Some(sol) = self.polish(&averaged) {
                    return Some(sol);
                }
            }
        }
        None
    }

    fn polish(&self, point: &[Vec<f64>]) -> Option<EquilibriumSolution> {
        for cutoff in [1e-2, 1e-3, 1e-4] {
            let support: Support = point
                .iter()
                .map(|x| (0..x.len()).filter(|&a| x[a] > cutoff).collect::<Vec<_>>())
                .collect();
            if support.iter().any(Vec::is_empty) {
                continue;
            }
            let start: Vec<Vec<f64>> = point
                .iter()
                .zip(&support)
                .map(|(x, s)| {
                    let mass: f64 = s.iter().map(|&a| x[a]).sum();
                    (0..x.len())
                        .map(|a| if s.contains(&a) { x[a] / mass } else { 0.0 })
                        .collect()
                })
                .collect();
            if let Some(sol) = self.attempt(&support, &start) {
                return Some(sol);
            }
        }
        None
    }
}

/// Finds one team-symmetric equilibrium. Supports are scanned smallest first
/// (then lexicographically) from their uniform point; then every support is
/// retried from random starts; then the improvement-map fallback runs. The
/// first verified candidate is returned.
pub fn solve_symmetric_ne(game: &PayoffTensor, opts: &SolverOptions) -> Result<EquilibriumSolution> {
    opts.validate()?;
    if is_degenerate(game) {
        return uniform_solution(game);
    }
    let search = Search::new(game, opts);
    let structure = game.structure();
    for support in &search.supports {
        if let Some(sol) = search.attempt(support, &uniform_on(support, structure)) {
            return Ok(sol);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for support in search.supports.iter().filter(|s| has_free_variables(s)) {
        for _ in 0..opts.multistarts {
            let start = random_on(support, structure, &mut rng);
            if let Some(sol) = search.attempt(support, &start) {
                return Ok(sol);
            }
        }
    }
    search.fixed_point_fallback(&mut rng).ok_or_else(|| {
        Error::NoEquilibriumFound(format!(
            "{} supports and the fixed-point fallback failed at tolerance {}",
            search.supports.len(),
            opts.tolerance
        ))
    })
}

/// Distance below which two solutions are considered the same equilibrium.
pub const DEDUP_DISTANCE: f64 = 1e-6;

/// All equilibria found across every support and starting point, deduplicated.
pub fn enumerate_symmetric_ne(game: &PayoffTensor, opts: &SolverOptions) -> Result<Vec<EquilibriumSolution>> {
    opts.validate()?;
    if is_degenerate(game) {
        return Ok(vec![uniform_solution(game)?]);
    }
    let search = Search::new(game, opts);
    let structure = game.structure();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut found: Vec<EquilibriumSolution> = Vec::new();
    let push = |sol: EquilibriumSolution, found: &mut Vec<EquilibriumSolution>| {
        if !found
            .iter()
            .any(|f| f.profile.max_abs_diff(&sol.profile) <= DEDUP_DISTANCE)
        {
            found.push(sol);
        }
    };
    for support in &search.supports {
        if let Some(sol) = search.attempt(support, &uniform_on(support, structure)) {
            push(sol, &mut found);
        }
        if has_free_variables(support) {
            for _ in 0..opts.multistarts {
                let start = random_on(support, structure, &mut rng);
                if let Some(sol) = search.attempt(support, &start) {
                    push(sol, &mut found);
                }
            }
        }
    }
    if found.is_empty() {
        if let Some(sol) = search.fixed_point_fallback(&mut rng) {
            found.push(sol);
        }
    }
    if found.is_empty() {
        return Err(Error::NoEquilibriumFound(format!(
            "no support produced a verified solution at tolerance {}",
            opts.tolerance
        )));
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{gmp_game, linear_game, LinearPayoffSpec};

    fn ms(p: &[f64]) -> MixedStrategy {
        MixedStrategy::new(p.to_vec()).unwrap()
    }

    fn matching_pennies() -> PayoffTensor {
        let s = TeamStructure::uniform(2, 1, 2).unwrap();
        PayoffTensor::from_fn(s, |j| {
            let u = if j[0] == j[1] { 1.0 } else { -1.0 };
            vec![u, -u]
        })
        .unwrap()
    }

    fn dominant_game() -> PayoffTensor {
        let s = TeamStructure::uniform(2, 2, 2).unwrap();
        let spec = LinearPayoffSpec::new(s, vec![vec![3.0, 1.0], vec![0.0, 2.0]]).unwrap();
        linear_game(&spec)
    }

    #[test]
    fn supports_are_ordered_by_size_then_lex() {
        let s = TeamStructure::uniform(2, 1, 2).unwrap();
        let sup = joint_supports(&s);
        assert_eq!(sup.len(), 9);
        assert_eq!(sup[0], vec![vec![0], vec![0]]);
        assert_eq!(sup[1], vec![vec![0], vec![1]]);
        assert_eq!(sup[4], vec![vec![0], vec![0, 1]]);
        assert_eq!(sup[8], vec![vec![0, 1], vec![0, 1]]);
    }

    #[test]
    fn gmp_gains() {
        let g = gmp_game(0.5);
        let uniform = SymmetricProfile::uniform(&[2, 2]);
        for gain in deviation_gains(&g, &uniform).unwrap().iter().flatten() {
            assert!(gain.abs() < 1e-15);
        }
        let p = SymmetricProfile::new(vec![ms(&[1.0, 0.0]), ms(&[0.5, 0.5])]);
        let gains = deviation_gains(&g, &p).unwrap();
        assert!((gains[1][1] - 0.5).abs() < 1e-12);
        assert!(verify_equilibrium(&g, &uniform, 1e-9).unwrap());
        assert!(!verify_equilibrium(&g, &p, 0.1).unwrap());
        assert!(verify_equilibrium(&g, &p, f64::INFINITY).unwrap());
    }

    #[test]
    fn dominated_actions_have_negative_gains() {
        let g = dominant_game();
        let p = SymmetricProfile::new(vec![ms(&[0.6, 0.4]), ms(&[0.3, 0.7])]);
        let gains = deviation_gains(&g, &p).unwrap();
        assert!(gains[0][1] < 0.0);
        assert!(gains[1][0] < 0.0);
    }

    #[test]
    fn improvement_map_examples() {
        let g = gmp_game(0.5);
        let uniform = SymmetricProfile::uniform(&[2, 2]);
        assert_eq!(nash_improvement_map(&g, &uniform).unwrap(), uniform);

        let mp = matching_pennies();
        let both_heads = SymmetricProfile::new(vec![ms(&[1.0, 0.0]), ms(&[1.0, 0.0])]);
        let next = nash_improvement_map(&mp, &both_heads).unwrap();
        assert_eq!(next.strategy(0).probs(), &[1.0, 0.0]);
        let t = next.strategy(1).probs();
        assert!((t[0] - 1.0 / 3.0).abs() < 1e-15 && (t[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn solve_gmp() {
        let sol = solve_symmetric_ne(&gmp_game(0.5), &SolverOptions::default()).unwrap();
        for x in sol.profile.strategies() {
            assert!((x.prob(0) - 0.5).abs() < 1e-9);
        }
        assert!(sol.values.iter().all(|v| v.abs() < 1e-12));
        assert!(sol.residual <= 1e-9);
    }

    #[test]
    fn gmp_grid_sweep_has_a_single_near_equilibrium_region() {
        // Every grid point with a small ε-Nash gap sits next to the uniform profile.
        let g = gmp_game(0.5);
        let steps = 1000;
        for a in 0..=steps {
            let p = a as f64 / steps as f64;
            for b in (0..=steps).step_by(10) {
                let q = b as f64 / steps as f64;
                let prof = SymmetricProfile::new(vec![ms(&[p, 1.0 - p]), ms(&[q, 1.0 - q])]);
                if epsilon_residual(&g, &prof).unwrap() < 1e-3 {
                    assert!((p - 0.5).abs() <= 0.01 && (q - 0.5).abs() <= 0.01, "{p} {q}");
                }
            }
        }
    }

    #[test]
    fn solve_dominant_and_matching_pennies() {
        let sol = solve_symmetric_ne(&dominant_game(), &SolverOptions::default()).unwrap();
        assert_eq!(sol.profile.strategy(0).probs(), &[1.0, 0.0]);
        assert_eq!(sol.profile.strategy(1).probs(), &[0.0, 1.0]);
        let all = enumerate_symmetric_ne(&dominant_game(), &SolverOptions::default()).unwrap();
        assert_eq!(all.len(), 1);

        let sol = solve_symmetric_ne(&matching_pennies(), &SolverOptions::default()).unwrap();
        for x in sol.profile.strategies() {
            assert!((x.prob(0) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn enumerate_gmp_is_unique() {
        let all = enumerate_symmetric_ne(&gmp_game(0.5), &SolverOptions::default()).unwrap();
        assert_eq!(all.len(), 1);
    }

    #[test]
    fn coordination_game_has_both_pure_equilibria() {
        // Size-1 teams; both earn 2 when both play action 0, 1 when both play
        // action 1, 0 otherwise. Both pure profiles are strict equilibria and the
        // indifference condition 2q = 1 - q gives the mixed one at q = 1/3.
        let s = TeamStructure::uniform(2, 1, 2).unwrap();
        let g = PayoffTensor::from_fn(s, |j| {
            let u = match (j[0].0[0], j[1].0[0]) {
                (1, 1) => 2.0,
                (0, 0) => 1.0,
                _ => 0.0,
            };
            vec![u, u]
        })
        .unwrap();
        let all = enumerate_symmetric_ne(&g, &SolverOptions::default()).unwrap();
        let has = |p: &[f64], q: &[f64]| {
            all.iter().any(|s| {
                s.profile
                    .max_abs_diff(&SymmetricProfile::new(vec![ms(p), ms(q)]))
                    < 1e-9
            })
        };
        assert!(has(&[1.0, 0.0], &[1.0, 0.0]));
        assert!(has(&[0.0, 1.0], &[0.0, 1.0]));
        assert!(has(&[1.0 / 3.0, 2.0 / 3.0], &[1.0 / 3.0, 2.0 / 3.0]));
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn degenerate_game_returns_uniform() {
        let s = TeamStructure::uniform(2, 2, 3).unwrap();
        let g = PayoffTensor::from_fn(s, |_| vec![0.0, 0.0]).unwrap();
        let sol = solve_symmetric_ne(&g, &SolverOptions::default()).unwrap();
        assert_eq!(sol.profile, SymmetricProfile::uniform(&[3, 3]));
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn solution_invariants_hold() {
        let g = crate::game::gen_random_game(TeamStructure::uniform(2, 2, 3).unwrap(), 0, 10, false, 4)
            .unwrap();
        let opts = SolverOptions::default();
        for sol in enumerate_symmetric_ne(&g, &opts).unwrap() {
            for i in 0..2 {
                let u = team_action_payoffs(&g, i, &sol.profile).unwrap();
                for j in 0..3 {
                    assert!((u[j] + sol.slacks[i][j] - sol.values[i]).abs() <= 1e-8);
                    assert!(sol.profile.strategy(i).prob(j) * sol.slacks[i][j] <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn bad_tolerance_rejected() {
        let opts = SolverOptions::default().with_tolerance(0.0);
        assert!(matches!(
            solve_symmetric_ne(&gmp_game(0.5), &opts),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn solution_json_has_support_masks() {
        let sol = solve_symmetric_ne(&dominant_game(), &SolverOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&sol.to_json().unwrap()).unwrap();
        assert_eq!(v["support"], serde_json::json!([[true, false], [false, true]]));
        assert_eq!(v["profile"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
    }
}
