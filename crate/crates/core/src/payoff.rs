//! Expected payoffs under team-symmetric mixed profiles.
//!
//! When every member of team `j` mixes with `x_j`, the team's count vector is
//! multinomial with parameters `(n_j, x_j)`. A focal team-`i` agent fixing
//! action `a` sees its teammates' counts as multinomial `(n_i - 1, x_i)`, and
//! its payoff is the tensor entry at `g_i + e_a`. Summing over count vectors
//! instead of per-player profiles makes the cost polynomial in team sizes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{feasible_count_vectors, CountVector, LinearPayoffSpec, PayoffTensor};

/// Largest player count accepted by [`brute_force_payoff`].
pub const BRUTE_FORCE_MAX_PLAYERS: usize = 12;
/// Largest joint profile count accepted by [`brute_force_payoff`].
pub const BRUTE_FORCE_MAX_PROFILES: usize = 10_000_000;

const SIMPLEX_TOL: f64 = 1e-12;

/// A probability distribution over one team's actions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::DimensionMismatch("empty strategy".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "strategy has negative or non-finite entries: {probs:?}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL * probs.len() as f64 {
            return Err(Error::InvalidConfig(format!(
                "strategy sums to {total}, not 1"
            )));
        }
        Ok(Self(probs))
    }

    /// Clips negatives to zero and rescales onto the simplex.
    pub fn normalized(probs: Vec<f64>) -> Result<Self> {
        let clipped: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "cannot normalize {probs:?} onto the simplex"
            )));
        }
        Ok(Self(clipped.into_iter().map(|p| p / total).collect()))
    }

    /// Wraps probabilities already known to lie on the simplex up to rounding.
    pub(crate) fn from_simplex(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    /// The vertex `v_a` of the simplex.
    pub fn pure(k: usize, action: usize) -> Self {
        let mut v = vec![0.0; k];
        v[action] = 1.0;
        Self(v)
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prob(&self, action: usize) -> f64 {
        self.0[action]
    }

    /// Actions played with probability above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.0.len()).filter(|&a| self.0[a] > tol).collect()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// One mixed strategy per team; every member of a team plays it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymmetricProfile {
    strategies: Vec<MixedStrategy>,
}

impl SymmetricProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        Self { strategies }
    }

    pub fn uniform(action_counts: &[usize]) -> Self {
        Self::new(action_counts.iter().map(|&k| MixedStrategy::uniform(k)).collect())
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn strategy(&self, team: usize) -> &MixedStrategy {
        &self.strategies[team]
    }

    pub fn num_teams(&self) -> usize {
        self.strategies.len()
    }

    /// Largest absolute difference between corresponding probabilities.
    pub fn max_abs_diff(&self, other: &SymmetricProfile) -> f64 {
        self.strategies
            .iter()
            .zip(&other.strategies)
            .flat_map(|(a, b)| a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub(crate) fn prob_slices(&self) -> Vec<&[f64]> {
        self.strategies.iter().map(|s| s.probs()).collect()
    }

    /// Checks that this profile fits the game's structure.
    pub fn check_against(&self, game: &PayoffTensor) -> Result<()> {
        let s = game.structure();
        if self.strategies.len() != s.num_teams() {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} strategies for {} teams",
                self.strategies.len(),
                s.num_teams()
            )));
        }
        for (i, x) in self.strategies.iter().enumerate() {
            if x.len() != s.num_actions(i) {
                return Err(Error::DimensionMismatch(format!(
                    "team {i} strategy has {} entries, game has {} actions",
                    x.len(),
                    s.num_actions(i)
                )));
            }
        }
        Ok(())
    }
}

const LN_TABLE_CUTOFF: usize = 20;

fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `n! / ∏ c_j!`, exact for `n <= 20`, via logarithms above that.
pub fn multinomial_coefficient(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n <= LN_TABLE_CUTOFF {
        let denom: u64 = counts.iter().map(|&c| factorial_u64(c)).product();
        (factorial_u64(n) / denom) as f64
    } else {
        let ln = ln_factorial(n) - counts.iter().map(|&c| ln_factorial(c)).sum::<f64>();
        ln.exp().round()
    }
}

/// Multinomial weight evaluated as a polynomial in `p` (no simplex check), so
/// it stays meaningful at intermediate Newton iterates.
pub(crate) fn multinomial_weight(counts: &[usize], p: &[f64]) -> f64 {
    let mut w = 1.0;
    for (&c, &q) in counts.iter().zip(p) {
        if c > 0 {
            if q == 0.0 {
                return 0.0;
            }
            w *= q.powi(c as i32);
        }
    }
    if w == 0.0 {
        return 0.0;
    }
    multinomial_coefficient(counts) * w
}

/// Probability of `counts` under a multinomial with `n` draws from `p`.
pub fn multinomial_pmf(counts: &CountVector, n: usize, p: &MixedStrategy) -> Result<f64> {
    if counts.len() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} counts but {} probabilities",
            counts.len(),
            p.len()
        )));
    }
    if counts.total() != n {
        return Err(Error::DimensionMismatch(format!(
            "counts sum to {} but n = {n}",
            counts.total()
        )));
    }
    Ok(multinomial_weight(counts.as_slice(), p.probs()))
}

/// `E[u_{payoff_team}(g + fixed)]` where team `j`'s `g_j` is multinomial with
/// `draws[j]` trials and probabilities `probs[j]`.
pub(crate) fn count_expectation(
    game: &PayoffTensor,
    payoff_team: usize,
    draws: &[usize],
    fixed: &[CountVector],
    probs: &[&[f64]],
) -> f64 {
    let m = game.num_teams();
    // Per team: (rank of g_j + fixed_j in the full tensor, weight).
    let mut terms: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
    for j in 0..m {
        let k = probs[j].len();
        let list: Vec<(usize, f64)> = feasible_count_vectors(draws[j], k)
            .into_iter()
            .filter_map(|g| {
                let w = multinomial_weight(g.as_slice(), probs[j]);
                if w == 0.0 {
                    return None;
                }
                let full = g.plus(&fixed[j]);
                let rank = game.rank_of(j, &full).expect("counts sum to team size");
                Some((rank, w))
            })
            .collect();
        if list.is_empty() {
            return 0.0;
        }
        terms.push(list);
    }

    let mut cursor = vec![0usize; m];
    let mut ranks = vec![0usize; m];
    let mut total = 0.0;
    loop {
        let mut weight = 1.0;
        for j in 0..m {
            let (r, w) = terms[j][cursor[j]];
            ranks[j] = r;
            weight *= w;
        }
        total += weight * game.entry(game.index_of_ranks(&ranks))[payoff_team];

        let mut j = m;
        loop {
            if j == 0 {
                return total;
            }
            j -= 1;
            cursor[j] += 1;
            if cursor[j] < terms[j].len() {
                break;
            }
            cursor[j] = 0;
        }
    }
}

fn focal_setup(game: &PayoffTensor, team: usize, action: usize) -> (Vec<usize>, Vec<CountVector>) {
    let s = game.structure();
    let mut draws = s.team_sizes().to_vec();
    draws[team] -= 1;
    let fixed = (0..s.num_teams())
        .map(|j| {
            if j == team {
                CountVector::unit(s.num_actions(j), action)
            } else {
                CountVector::zeros(s.num_actions(j))
            }
        })
        .collect();
    (draws, fixed)
}

pub(crate) fn raw_action_payoff(game: &PayoffTensor, team: usize, action: usize, probs: &[&[f64]]) -> f64 {
    let (draws, fixed) = focal_setup(game, team, action);
    count_expectation(game, team, &draws, &fixed, probs)
}

/// Partial derivatives of the focal payoff `ũ_{team,action}` with respect to
/// every raw probability `x_{j,l}`, treating the probabilities as free
/// polynomial variables.
pub(crate) fn raw_action_payoff_gradient(
    game: &PayoffTensor,
    team: usize,
    action: usize,
    probs: &[&[f64]],
) -> Vec<Vec<f64>> {
    let (draws, fixed) = focal_setup(game, team, action);
    (0..game.num_teams())
        .map(|j| {
            let k = probs[j].len();
            if draws[j] == 0 {
                return vec![0.0; k];
            }
            (0..k)
                .map(|l| {
                    let mut d = draws.clone();
                    d[j] -= 1;
                    let mut f = fixed.clone();
                    f[j] = f[j].with_added(l);
                    draws[j] as f64 * count_expectation(game, team, &d, &f, probs)
                })
                .collect()
        })
        .collect()
}

fn check_team_action(game: &PayoffTensor, team: usize, action: usize) -> Result<()> {
    let s = game.structure();
    if team >= s.num_teams() {
        return Err(Error::DimensionMismatch(format!("no team {team}")));
    }
    if action >= s.num_actions(team) {
        return Err(Error::DimensionMismatch(format!(
            "team {team} has no action {action}"
        )));
    }
    Ok(())
}

/// Expected payoff `ũ_{i,a}` of one team-`i` agent that plays `a` while its
/// teammates and every other team mix according to `profile`.
pub fn team_action_payoff(
    game: &PayoffTensor,
    team: usize,
    action: usize,
    profile: &SymmetricProfile,
) -> Result<f64> {
    profile.check_against(game)?;
    check_team_action(game, team, action)?;
    Ok(raw_action_payoff(game, team, action, &profile.prob_slices()))
}

/// `ũ_{i,a}` for every action of `team`.
pub fn team_action_payoffs(
    game: &PayoffTensor,
    team: usize,
    profile: &SymmetricProfile,
) -> Result<Vec<f64>> {
    profile.check_against(game)?;
    check_team_action(game, team, 0)?;
    let probs = profile.prob_slices();
    Ok((0..game.structure().num_actions(team))
        .map(|a| raw_action_payoff(game, team, a, &probs))
        .collect())
}

/// Expected payoff of a team-`i` agent when everybody follows `profile`.
pub fn mixed_payoff(game: &PayoffTensor, team: usize, profile: &SymmetricProfile) -> Result<f64> {
    let per_action = team_action_payoffs(game, team, profile)?;
    Ok(per_action
        .iter()
        .zip(profile.strategy(team).probs())
        .map(|(u, x)| u * x)
        .sum())
}

/// Expected payoffs of all teams.
pub fn mixed_payoffs(game: &PayoffTensor, profile: &SymmetricProfile) -> Result<Vec<f64>> {
    (0..game.num_teams())
        .map(|i| mixed_payoff(game, i, profile))
        .collect()
}

/// Closed form of `ũ_{i,a}` for a game linear in counts:
/// `c_{i,a} + (n_i - 1) Σ_j c_{i,j} (x_i)_j + Σ_{k≠i} n_k Σ_j c_{k,j} (x_k)_j`.
pub fn linear_team_action_payoff(
    spec: &LinearPayoffSpec,
    team: usize,
    action: usize,
    profile: &SymmetricProfile,
) -> Result<f64> {
    let s = &spec.structure;
    if profile.num_teams() != s.num_teams()
        || profile
            .strategies()
            .iter()
            .zip(s.action_counts())
            .any(|(x, &k)| x.len() != k)
    {
        return Err(Error::DimensionMismatch(
            "profile does not match the linear game's structure".into(),
        ));
    }
    if action >= s.num_actions(team) {
        return Err(Error::DimensionMismatch(format!(
            "team {team} has no action {action}"
        )));
    }
    let c = spec.coeffs_for(team);
    let dot = |k: usize| -> f64 {
        c[k].iter()
            .zip(profile.strategy(k).probs())
            .map(|(c, x)| c * x)
            .sum()
    };
    let mut total = c[team][action] + (s.team_size(team) - 1) as f64 * dot(team);
    for k in (0..s.num_teams()).filter(|&k| k != team) {
        total += s.team_size(k) as f64 * dot(k);
    }
    Ok(total)
}

/// What the focal agent of the brute-force oracle plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Focal {
    /// A fixed action, as in `ũ_{i,a}`.
    Action(usize),
    /// The team's mixed strategy, as in `ū_i`.
    Mixed,
}

/// Expected payoff by enumerating every joint pure profile of all `n` players
/// and weighting it by the product of per-player probabilities. Independent
/// of the multinomial route; used as an oracle.
pub fn brute_force_payoff(
    game: &PayoffTensor,
    team: usize,
    focal: Focal,
    profile: &SymmetricProfile,
) -> Result<f64> {
    profile.check_against(game)?;
    let s = game.structure();
    if let Focal::Action(a) = focal {
        check_team_action(game, team, a)?;
    } else {
        check_team_action(game, team, 0)?;
    }
    let n = s.num_players();
    if n > BRUTE_FORCE_MAX_PLAYERS {
        return Err(Error::TooLarge(format!(
            "{n} players exceeds the brute-force limit of {BRUTE_FORCE_MAX_PLAYERS}"
        )));
    }
    let size = s
        .full_form_size()
        .filter(|&p| p <= BRUTE_FORCE_MAX_PROFILES)
        .ok_or_else(|| Error::TooLarge("joint profile space exceeds 10^7".into()))?;

    let focal_player = s.first_player(team);
    let player_probs: Vec<Vec<f64>> = (0..n)
        .map(|p| {
            let t = s.team_of(p);
            match focal {
                Focal::Action(a) if p == focal_player => {
                    MixedStrategy::pure(s.num_actions(t), a).into_inner()
                }
                _ => profile.strategy(t).probs().to_vec(),
            }
        })
        .collect();
    let radices: Vec<usize> = player_probs.iter().map(Vec::len).collect();

    let mut actions = vec![0usize; n];
    let mut total = 0.0;
    for _ in 0..size {
        let weight: f64 = actions
            .iter()
            .zip(&player_probs)
            .map(|(&a, p)| p[a])
            .product();
        if weight != 0.0 {
            let counts = crate::game::counts_of_profile(s, &actions);
            total += weight * game.get(&counts).expect("feasible counts")[team];
        }
        for p in (0..n).rev() {
            actions[p] += 1;
            if actions[p] < radices[p] {
                break;
            }
            actions[p] = 0;
        }
    }
    Ok(total)
}
