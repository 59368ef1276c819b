//! Game representations for team-symmetric games.
//!
//! Players are split into `m` teams. Team `i` has `n_i` interchangeable
//! players that share one payoff function and one action set of size `k_i`.
//! Under those two assumptions a payoff depends only on how many players of
//! each team chose each action, so the canonical representation is the
//! count-indexed [`PayoffTensor`]. [`FullFormGame`] keeps the per-player
//! form around for validation and for brute-force oracles.
//!
//! Actions are 0-indexed. Count vectors are always enumerated in ascending
//! lexicographic order, and joint count tuples in lexicographic order of
//! their concatenation with team 0 most significant.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of per-player profiles a [`FullFormGame`] may hold.
pub const MAX_FULL_FORM_PROFILES: usize = 10_000_000;

/// Above this many within-team permutations, symmetry checks fall back to
/// adjacent transpositions (which generate the same group).
pub const EXHAUSTIVE_PERMUTATION_LIMIT: usize = 10_000;

/// Shape of a team game: team sizes and per-team action counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TeamStructure {
    team_sizes: Vec<usize>,
    action_counts: Vec<usize>,
}

impl TeamStructure {
    pub fn new(team_sizes: Vec<usize>, action_counts: Vec<usize>) -> Result<Self> {
        if team_sizes.len() < 2 {
            return Err(Error::InvalidStructure(format!(
                "need at least two teams, got {}",
                team_sizes.len()
            )));
        }
        if team_sizes.len() != action_counts.len() {
            return Err(Error::InvalidStructure(format!(
                "{} team sizes but {} action counts",
                team_sizes.len(),
                action_counts.len()
            )));
        }
        if let Some(i) = team_sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidStructure(format!("team {i} has no players")));
        }
        if let Some(i) = action_counts.iter().position(|&k| k < 2) {
            return Err(Error::InvalidStructure(format!(
                "team {i} needs at least two actions"
            )));
        }
        Ok(Self {
            team_sizes,
            action_counts,
        })
    }

    /// `m` teams, each with `size` players and `actions` actions.
    pub fn uniform(m: usize, size: usize, actions: usize) -> Result<Self> {
        Self::new(vec![size; m], vec![actions; m])
    }

    pub fn num_teams(&self) -> usize {
        self.team_sizes.len()
    }

    pub fn team_sizes(&self) -> &[usize] {
        &self.team_sizes
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn team_size(&self, team: usize) -> usize {
        self.team_sizes[team]
    }

    pub fn num_actions(&self, team: usize) -> usize {
        self.action_counts[team]
    }

    pub fn num_players(&self) -> usize {
        self.team_sizes.iter().sum()
    }

    /// Index of the first player of `team` (players are numbered team by team).
    pub fn first_player(&self, team: usize) -> usize {
        self.team_sizes[..team].iter().sum()
    }

    pub fn players_of(&self, team: usize) -> std::ops::Range<usize> {
        let start = self.first_player(team);
        start..start + self.team_sizes[team]
    }

    pub fn team_of(&self, player: usize) -> usize {
        let mut acc = 0;
        for (team, &n) in self.team_sizes.iter().enumerate() {
            acc += n;
            if player < acc {
                return team;
            }
        }
        panic!("player {player} out of range");
    }

    /// Number of entries of the count-form tensor, `∏ C(n_i + k_i - 1, k_i - 1)`.
    pub fn count_form_size(&self) -> usize {
        self.team_sizes
            .iter()
            .zip(&self.action_counts)
            .map(|(&n, &k)| binomial(n + k - 1, k - 1))
            .product()
    }

    /// Number of per-player action profiles `∏ k_i^{n_i}`, or `None` on overflow.
    pub fn full_form_size(&self) -> Option<usize> {
        let mut total: usize = 1;
        for (&n, &k) in self.team_sizes.iter().zip(&self.action_counts) {
            for _ in 0..n {
                total = total.checked_mul(k)?;
            }
        }
        Some(total)
    }

    /// Number of within-team permutations `∏ n_i!`, saturating.
    pub fn permutation_count(&self) -> usize {
        self.team_sizes
            .iter()
            .map(|&n| (1..=n).fold(1usize, |acc, x| acc.saturating_mul(x)))
            .fold(1usize, |acc, x| acc.saturating_mul(x))
    }
}

/// Number of players of one team choosing each action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountVector(pub Vec<usize>);

impl CountVector {
    pub fn zeros(k: usize) -> Self {
        Self(vec![0; k])
    }

    /// The unit vector `e_a`.
    pub fn unit(k: usize, action: usize) -> Self {
        let mut v = vec![0; k];
        v[action] = 1;
        Self(v)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn with_added(&self, action: usize) -> Self {
        let mut v = self.0.clone();
        v[action] += 1;
        Self(v)
    }

    pub fn plus(&self, other: &CountVector) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for CountVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All length-`k` non-negative integer vectors summing to `n`, ascending
/// lexicographic. There are `C(n + k - 1, k - 1)` of them.
pub fn feasible_count_vectors(n: usize, k: usize) -> Vec<CountVector> {
    fn fill(remaining: usize, slot: usize, prefix: &mut Vec<usize>, out: &mut Vec<CountVector>) {
        if slot + 1 == prefix.capacity() {
            prefix.push(remaining);
            out.push(CountVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for c in 0..=remaining {
            prefix.push(c);
            fill(remaining - c, slot + 1, prefix, out);
            prefix.pop();
        }
    }
    assert!(k >= 1, "count vectors need at least one action");
    let mut out = Vec::with_capacity(binomial(n + k - 1, k - 1));
    let mut prefix = Vec::with_capacity(k);
    fill(n, 0, &mut prefix, &mut out);
    out
}

/// Count-form payoffs: one payoff per team for every feasible joint count tuple.
#[derive(Clone, Debug)]
pub struct PayoffTensor {
    structure: TeamStructure,
    team_vectors: Vec<Vec<CountVector>>,
    ranks: Vec<HashMap<CountVector, usize>>,
    strides: Vec<usize>,
    entries: Vec<Vec<f64>>,
}

impl PartialEq for PayoffTensor {
    fn eq(&self, other: &Self) -> bool {
        self.structure == other.structure && self.entries == other.entries
    }
}

impl PayoffTensor {
    /// Builds a tensor by evaluating `payoffs` at every joint count tuple, in
    /// canonical order.
    pub fn from_fn<F>(structure: TeamStructure, mut payoffs: F) -> Result<Self>
    where
        F: FnMut(&[CountVector]) -> Vec<f64>,
    {
        let m = structure.num_teams();
        let team_vectors: Vec<Vec<CountVector>> = (0..m)
            .map(|i| feasible_count_vectors(structure.team_size(i), structure.num_actions(i)))
            .collect();
        let ranks = team_vectors
            .iter()
            .map(|vs| vs.iter().cloned().enumerate().map(|(r, v)| (v, r)).collect())
            .collect();
        let mut strides = vec![1; m];
        for i in (0..m.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * team_vectors[i + 1].len();
        }
        let mut tensor = Self {
            structure,
            team_vectors,
            ranks,
            strides,
            entries: Vec::new(),
        };
        let len = tensor.len();
        let mut entries = Vec::with_capacity(len);
        for index in 0..len {
            let joint = tensor.joint_counts(index);
            let values = payoffs(&joint);
            if values.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "payoff function returned {} values for {m} teams",
                    values.len()
                )));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidGameFile(format!("non-finite payoff {v}")));
            }
            entries.push(values);
        }
        tensor.entries = entries;
        Ok(tensor)
    }

    pub fn structure(&self) -> &TeamStructure {
        &self.structure
    }

    pub fn num_teams(&self) -> usize {
        self.structure.num_teams()
    }

    pub fn len(&self) -> usize {
        self.team_vectors.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Feasible count vectors of one team in canonical order.
    pub fn team_vectors(&self, team: usize) -> &[CountVector] {
        &self.team_vectors[team]
    }

    pub fn rank_of(&self, team: usize, counts: &CountVector) -> Option<usize> {
        self.ranks[team].get(counts).copied()
    }

    pub fn index_of(&self, joint: &[CountVector]) -> Option<usize> {
        if joint.len() != self.num_teams() {
            return None;
        }
        joint
            .iter()
            .enumerate()
            .map(|(i, g)| self.rank_of(i, g).map(|r| r * self.strides[i]))
            .sum()
    }

    /// Flat index from per-team ranks.
    pub fn index_of_ranks(&self, ranks: &[usize]) -> usize {
        ranks.iter().zip(&self.strides).map(|(r, s)| r * s).sum()
    }

    pub fn joint_counts(&self, index: usize) -> Vec<CountVector> {
        self.team_vectors
            .iter()
            .zip(&self.strides)
            .map(|(vs, &s)| vs[(index / s) % vs.len()].clone())
            .collect()
    }

    pub fn get(&self, joint: &[CountVector]) -> Option<&[f64]> {
        self.index_of(joint).map(|i| self.entries[i].as_slice())
    }

    pub fn entry(&self, index: usize) -> &[f64] {
        &self.entries[index]
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// Iterates `(joint counts, payoffs)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<CountVector>, &[f64])> + '_ {
        (0..self.len()).map(move |i| (self.joint_counts(i), self.entries[i].as_slice()))
    }

    /// True when every payoff is an integer.
    pub fn is_integer_valued(&self) -> bool {
        self.entries.iter().flatten().all(|v| v.fract() == 0.0)
    }

    /// True when each team's payoff is the same at every entry.
    pub fn is_constant_per_team(&self, tol: f64) -> bool {
        let first = &self.entries[0];
        self.entries
            .iter()
            .all(|e| e.iter().zip(first).all(|(a, b)| (a - b).abs() <= tol))
    }

    /// Per-player form of this game: each player receives its team's payoff
    /// at the counts realized by the profile.
    pub fn expand(&self) -> Result<FullFormGame> {
        let structure = self.structure.clone();
        FullFormGame::from_fn(structure.clone(), |profile| {
            let counts = counts_of_profile(&structure, profile);
            let payoffs = self.get(&counts).expect("profile counts are feasible");
            (0..structure.num_players())
                .map(|p| payoffs[structure.team_of(p)])
                .collect()
        })
    }

    pub fn to_file(&self) -> GameFile {
        GameFile {
            m: self.num_teams(),
            team_sizes: self.structure.team_sizes().to_vec(),
            action_counts: self.structure.action_counts().to_vec(),
            entries: self
                .iter()
                .map(|(counts, payoffs)| GameFileEntry {
                    counts: counts.into_iter().map(|c| c.0).collect(),
                    payoffs: payoffs.to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &GameFile) -> Result<Self> {
        let structure = TeamStructure::new(file.team_sizes.clone(), file.action_counts.clone())
            .map_err(|e| Error::InvalidGameFile(e.to_string()))?;
        if file.m != structure.num_teams() {
            return Err(Error::InvalidGameFile(format!(
                "m = {} but {} team sizes given",
                file.m,
                structure.num_teams()
            )));
        }
        let mut by_counts: HashMap<Vec<CountVector>, &[f64]> = HashMap::new();
        for entry in &file.entries {
            let key: Vec<CountVector> = entry.counts.iter().cloned().map(CountVector).collect();
            if by_counts.insert(key.clone(), &entry.payoffs).is_some() {
                return Err(Error::InvalidGameFile(format!(
                    "duplicate entry for counts {}",
                    key.iter().join(" ")
                )));
            }
        }
        let tensor = Self::from_fn(structure, |joint| {
            by_counts
                .get(joint)
                .map(|p| p.to_vec())
                .unwrap_or_default()
        })
        .map_err(|e| match e {
            Error::DimensionMismatch(_) => {
                Error::InvalidGameFile("missing entry or wrong payoff arity".into())
            }
            other => other,
        })?;
        if file.entries.len() != tensor.len() {
            return Err(Error::InvalidGameFile(format!(
                "expected {} entries, found {} (infeasible counts present)",
                tensor.len(),
                file.entries.len()
            )));
        }
        Ok(tensor)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GameFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidGameFile(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// On-disk game schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub m: usize,
    pub team_sizes: Vec<usize>,
    pub action_counts: Vec<usize>,
    pub entries: Vec<GameFileEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameFileEntry {
    pub counts: Vec<Vec<usize>>,
    pub payoffs: Vec<f64>,
}

/// Per-player team counts realized by a pure action profile.
pub fn counts_of_profile(structure: &TeamStructure, profile: &[usize]) -> Vec<CountVector> {
    (0..structure.num_teams())
        .map(|team| {
            let mut c = CountVector::zeros(structure.num_actions(team));
            for p in structure.players_of(team) {
                c.0[profile[p]] += 1;
            }
            c
        })
        .collect()
}

/// Per-player normal form: payoffs for every player at every pure profile.
#[derive(Clone, Debug, PartialEq)]
pub struct FullFormGame {
    structure: TeamStructure,
    radices: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl FullFormGame {
    /// Builds the game from a per-profile payoff function. Player 0's action is
    /// the most significant digit of the profile index.
    pub fn from_fn<F>(structure: TeamStructure, mut payoffs: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<f64>,
    {
        let size = structure
            .full_form_size()
            .filter(|&s| s <= MAX_FULL_FORM_PROFILES)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "full form exceeds {MAX_FULL_FORM_PROFILES} profiles"
                ))
            })?;
        let n = structure.num_players();
        let radices: Vec<usize> = (0..n)
            .map(|p| structure.num_actions(structure.team_of(p)))
            .collect();
        let mut game = Self {
            structure,
            radices,
            payoffs: Vec::with_capacity(size),
        };
        let mut table = Vec::with_capacity(size);
        for index in 0..size {
            let profile = game.profile_at(index);
            let values = payoffs(&profile);
            if values.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "payoff function returned {} values for {n} players",
                    values.len()
                )));
            }
            table.push(values);
        }
        game.payoffs = table;
        Ok(game)
    }

    pub fn structure(&self) -> &TeamStructure {
        &self.structure
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len()
    }

    pub fn profile_at(&self, mut index: usize) -> Vec<usize> {
        let mut profile = vec![0; self.radices.len()];
        for (slot, &k) in profile.iter_mut().zip(&self.radices).rev() {
            *slot = index % k;
            index /= k;
        }
        profile
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&a, &k)| acc * k + a)
    }

    pub fn payoffs_at(&self, profile: &[usize]) -> &[f64] {
        &self.payoffs[self.profile_index(profile)]
    }

    pub fn payoff(&self, player: usize, profile: &[usize]) -> f64 {
        self.payoffs[self.profile_index(profile)][player]
    }

    pub fn set_payoff(&mut self, player: usize, profile: &[usize], value: f64) {
        let idx = self.profile_index(profile);
        self.payoffs[idx][player] = value;
    }

    fn is_integer_valued(&self) -> bool {
        self.payoffs.iter().flatten().all(|v| v.fract() == 0.0)
    }
}

fn payoffs_match(a: f64, b: f64, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }
}

/// A concrete violation of common payoffs or team symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryWitness {
    pub reason: String,
    pub profile: Vec<usize>,
    pub permutation: Vec<usize>,
}

impl From<SymmetryWitness> for Error {
    fn from(w: SymmetryWitness) -> Self {
        Error::SymmetryViolation {
            reason: w.reason,
            profile: w.profile,
            permutation: w.permutation,
        }
    }
}

fn transposition(n: usize, a: usize, b: usize) -> Vec<usize> {
    let mut phi: Vec<usize> = (0..n).collect();
    phi.swap(a, b);
    phi
}

/// First profile where two teammates receive different payoffs.
pub fn find_common_payoff_violation(game: &FullFormGame) -> Option<SymmetryWitness> {
    let exact = game.is_integer_valued();
    let s = &game.structure;
    let n = s.num_players();
    for (index, payoffs) in game.payoffs.iter().enumerate() {
        for team in 0..s.num_teams() {
            let players = s.players_of(team);
            let lead = players.start;
            for p in players.skip(1) {
                if !payoffs_match(payoffs[lead], payoffs[p], exact) {
                    return Some(SymmetryWitness {
                        reason: format!("players {lead} and {p} of team {team} disagree"),
                        profile: game.profile_at(index),
                        permutation: transposition(n, lead, p),
                    });
                }
            }
        }
    }
    None
}

pub fn check_common_payoff(game: &FullFormGame) -> bool {
    find_common_payoff_violation(game).is_none()
}

/// Within-team permutations used by the symmetry check: every one of them
/// when there are at most [`EXHAUSTIVE_PERMUTATION_LIMIT`], otherwise the
/// adjacent same-team transpositions.
pub fn within_team_permutations(structure: &TeamStructure) -> Vec<Vec<usize>> {
    let n = structure.num_players();
    if structure.permutation_count() > EXHAUSTIVE_PERMUTATION_LIMIT {
        let mut out = Vec::new();
        for team in 0..structure.num_teams() {
            let players = structure.players_of(team);
            for p in players.start..players.end.saturating_sub(1) {
                out.push(transposition(n, p, p + 1));
            }
        }
        return out;
    }
    let per_team: Vec<Vec<Vec<usize>>> = (0..structure.num_teams())
        .map(|team| {
            let players: Vec<usize> = structure.players_of(team).collect();
            let len = players.len();
            players.into_iter().permutations(len).collect()
        })
        .collect();
    per_team
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| parts.into_iter().flatten().collect::<Vec<usize>>())
        .filter(|phi| phi.iter().enumerate().any(|(i, &p)| i != p))
        .collect()
}

/// First `(profile, φ, i)` with `u_{φ(i)}(a) != u_i(a_{φ(1)}, …, a_{φ(n)})`.
pub fn find_team_symmetry_violation(game: &FullFormGame) -> Option<SymmetryWitness> {
    let exact = game.is_integer_valued();
    let n = game.structure.num_players();
    let mut permuted = vec![0; n];
    for phi in within_team_permutations(&game.structure) {
        for index in 0..game.num_profiles() {
            let profile = game.profile_at(index);
            for (j, slot) in permuted.iter_mut().enumerate() {
                *slot = profile[phi[j]];
            }
            let lhs = &game.payoffs[index];
            let rhs = game.payoffs_at(&permuted);
            for i in 0..n {
                if !payoffs_match(lhs[phi[i]], rhs[i], exact) {
                    return Some(SymmetryWitness {
                        reason: format!("payoff of player {i} changes under permutation"),
                        profile,
                        permutation: phi,
                    });
                }
            }
        }
    }
    None
}

pub fn check_team_symmetry(game: &FullFormGame) -> bool {
    find_team_symmetry_violation(game).is_none()
}

/// Collapses a team-symmetric common-payoff game to count form.
pub fn reduce_to_count_form(game: &FullFormGame) -> Result<PayoffTensor> {
    if let Some(w) = find_common_payoff_violation(game) {
        return Err(w.into());
    }
    if let Some(w) = find_team_symmetry_violation(game) {
        return Err(w.into());
    }
    let s = game.structure.clone();
    PayoffTensor::from_fn(s.clone(), |joint| {
        // Realize the counts with players sorted by action inside each team.
        let mut profile = Vec::with_capacity(s.num_players());
        for g in joint {
            for (action, &c) in g.0.iter().enumerate() {
                profile.extend(std::iter::repeat(action).take(c));
            }
        }
        let payoffs = game.payoffs_at(&profile);
        (0..s.num_teams())
            .map(|team| payoffs[s.first_player(team)])
            .collect()
    })
}

/// Random integer-payoff game. Each entry's team payoffs are drawn uniformly
/// from `[lo, hi]`; with `zero_sum` the second team gets the negated payoff of
/// the first.
pub fn gen_random_game(
    structure: TeamStructure,
    lo: i64,
    hi: i64,
    zero_sum: bool,
    seed: u64,
) -> Result<PayoffTensor> {
    if lo > hi {
        return Err(Error::InvalidConfig(format!("empty payoff range [{lo}, {hi}]")));
    }
    let m = structure.num_teams();
    if zero_sum && m != 2 {
        return Err(Error::ZeroSumRequiresTwoTeams(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PayoffTensor::from_fn(structure, |_| {
        if zero_sum {
            let u = rng.gen_range(lo..=hi) as f64;
            vec![u, -u]
        } else {
            (0..m).map(|_| rng.gen_range(lo..=hi) as f64).collect()
        }
    })
}

/// Whether `omega` lies in the range where generalized matching pennies has a
/// unique (mixed) equilibrium.
pub fn gmp_has_unique_equilibrium(omega: f64) -> bool {
    omega > 0.0 && omega < 1.0
}

/// Generalized matching pennies: two teams of two, actions H (0) and T (1).
///
/// Rows are team 0's counts (HH, HT/TH, TT), columns team 1's:
///
/// ```text
///          HH      HT/TH     TT
/// HH      1,-1     ω,-ω    -1, 1
/// HT/TH  -ω, ω     0, 0    -ω, ω
/// TT     -1, 1     ω,-ω     1,-1
/// ```
pub fn gmp_game(omega: f64) -> PayoffTensor {
    if !gmp_has_unique_equilibrium(omega) {
        log::warn!("GMP with omega = {omega} is outside (0, 1); equilibrium may not be unique");
    }
    // Team-0 payoff by (row, column) where row/col = number of T players.
    let table = [
        [1.0, omega, -1.0],
        [-omega, 0.0, -omega],
        [-1.0, omega, 1.0],
    ];
    let structure = TeamStructure::uniform(2, 2, 2).expect("valid structure");
    PayoffTensor::from_fn(structure, |joint| {
        let u = table[joint[0].0[1]][joint[1].0[1]];
        vec![u, -u]
    })
    .expect("finite table")
}

/// Coefficients of a game whose payoff is linear in the action counts:
/// `u(g_1, …, g_m) = Σ_k Σ_j c_{k,j} (g_k)_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearPayoffSpec {
    pub structure: TeamStructure,
    /// `coeffs[k][j]` multiplies the number of team-`k` players on action `j`.
    pub coeffs: Vec<Vec<f64>>,
    /// Optional per-team coefficient sets; team `i` then uses `team_coeffs[i]`
    /// instead of the shared `coeffs`.
    #[serde(default)]
    pub team_coeffs: Option<Vec<Vec<Vec<f64>>>>,
}

impl LinearPayoffSpec {
    pub fn new(structure: TeamStructure, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        check_coeff_shape(&structure, &coeffs)?;
        Ok(Self {
            structure,
            coeffs,
            team_coeffs: None,
        })
    }

    pub fn zeros(structure: TeamStructure) -> Self {
        let coeffs = structure.action_counts().iter().map(|&k| vec![0.0; k]).collect();
        Self {
            structure,
            coeffs,
            team_coeffs: None,
        }
    }

    pub fn with_team_coeffs(mut self, team_coeffs: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if team_coeffs.len() != self.structure.num_teams() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficient sets for {} teams",
                team_coeffs.len(),
                self.structure.num_teams()
            )));
        }
        for c in &team_coeffs {
            check_coeff_shape(&self.structure, c)?;
        }
        self.team_coeffs = Some(team_coeffs);
        Ok(self)
    }

    /// Coefficients used for team `team`'s payoff.
    pub fn coeffs_for(&self, team: usize) -> &[Vec<f64>] {
        match &self.team_coeffs {
            Some(per_team) => &per_team[team],
            None => &self.coeffs,
        }
    }
}

fn check_coeff_shape(structure: &TeamStructure, coeffs: &[Vec<f64>]) -> Result<()> {
    if coeffs.len() != structure.num_teams()
        || coeffs
            .iter()
            .zip(structure.action_counts())
            .any(|(row, &k)| row.len() != k)
    {
        return Err(Error::DimensionMismatch(
            "coefficient matrix must be teams × actions".into(),
        ));
    }
    if coeffs.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidConfig("non-finite coefficient".into()));
    }
    Ok(())
}

pub fn linear_game(spec: &LinearPayoffSpec) -> PayoffTensor {
    let m = spec.structure.num_teams();
    PayoffTensor::from_fn(spec.structure.clone(), |joint| {
        (0..m)
            .map(|team| {
                spec.coeffs_for(team)
                    .iter()
                    .zip(joint)
                    .map(|(row, g)| row.iter().zip(&g.0).map(|(c, &n)| c * n as f64).sum::<f64>())
                    .sum()
            })
            .collect()
    })
    .expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(v: &[usize]) -> CountVector {
        CountVector(v.to_vec())
    }

    #[test]
    fn count_vectors_small_cases() {
        assert_eq!(
            feasible_count_vectors(2, 2),
            vec![cv(&[0, 2]), cv(&[1, 1]), cv(&[2, 0])]
        );
        assert_eq!(feasible_count_vectors(0, 3), vec![cv(&[0, 0, 0])]);
        assert_eq!(feasible_count_vectors(3, 3).len(), 10);
        assert_eq!(feasible_count_vectors(4, 1), vec![cv(&[4])]);
    }

    fn count_by_recursion(n: usize, k: usize) -> usize {
        if k == 1 {
            return 1;
        }
        (0..=n).map(|c| count_by_recursion(n - c, k - 1)).sum()
    }

    #[test]
    fn count_vector_cardinality_matches_recursion() {
        for n in 0..=8 {
            for k in 1..=4 {
                let vs = feasible_count_vectors(n, k);
                assert_eq!(vs.len(), count_by_recursion(n, k));
                assert_eq!(vs.len(), binomial(n + k - 1, k - 1));
                assert!(vs.windows(2).all(|w| w[0] < w[1]));
                assert!(vs.iter().all(|v| v.total() == n && v.len() == k));
            }
        }
    }

    #[test]
    fn structure_validation() {
        assert!(TeamStructure::new(vec![2], vec![2]).is_err());
        assert!(TeamStructure::new(vec![2, 0], vec![2, 2]).is_err());
        assert!(TeamStructure::new(vec![2, 2], vec![2, 1]).is_err());
        assert!(TeamStructure::new(vec![2, 2], vec![2]).is_err());
        let s = TeamStructure::new(vec![2, 3], vec![2, 3]).unwrap();
        assert_eq!(s.num_players(), 5);
        assert_eq!(s.players_of(1), 2..5);
        assert_eq!(s.team_of(4), 1);
        assert_eq!(s.count_form_size(), 3 * 10);
        assert_eq!(s.full_form_size(), Some(4 * 27));
    }

    #[test]
    fn gmp_matches_table() {
        let g = gmp_game(0.5);
        assert_eq!(g.len(), 9);
        let hh = cv(&[2, 0]);
        let ht = cv(&[1, 1]);
        let tt = cv(&[0, 2]);
        let at = |a: &CountVector, b: &CountVector| g.get(&[a.clone(), b.clone()]).unwrap().to_vec();
        assert_eq!(at(&hh, &hh), vec![1.0, -1.0]);
        assert_eq!(at(&hh, &ht), vec![0.5, -0.5]);
        assert_eq!(at(&hh, &tt), vec![-1.0, 1.0]);
        assert_eq!(at(&ht, &hh), vec![-0.5, 0.5]);
        assert_eq!(at(&ht, &ht), vec![0.0, 0.0]);
        assert_eq!(at(&ht, &tt), vec![-0.5, 0.5]);
        assert_eq!(at(&tt, &hh), vec![-1.0, 1.0]);
        assert_eq!(at(&tt, &ht), vec![0.5, -0.5]);
        assert_eq!(at(&tt, &tt), vec![1.0, -1.0]);
        assert!(g.entries().iter().all(|e| e[0] + e[1] == 0.0));
    }

    #[test]
    fn gmp_full_form_is_symmetric_and_reduces_back() {
        let g = gmp_game(0.5);
        let full = g.expand().unwrap();
        assert!(check_common_payoff(&full));
        assert!(check_team_symmetry(&full));
        assert_eq!(reduce_to_count_form(&full).unwrap(), g);
    }

    #[test]
    fn perturbed_gmp_breaks_common_payoff() {
        let mut full = gmp_game(0.5).expand().unwrap();
        let profile = [0, 1, 1, 0];
        let v = full.payoff(0, &profile);
        full.set_payoff(0, &profile, v + 1.0);
        assert!(!check_common_payoff(&full));
        match reduce_to_count_form(&full) {
            Err(Error::SymmetryViolation { profile: p, permutation, .. }) => {
                assert_eq!(p, profile.to_vec());
                assert_eq!(permutation, vec![1, 0, 2, 3]);
            }
            other => panic!("expected SymmetryViolation, got {other:?}"),
        }
    }

    #[test]
    fn singleton_teams_are_trivially_symmetric() {
        let s = TeamStructure::uniform(3, 1, 2).unwrap();
        let full = FullFormGame::from_fn(s, |a| vec![a[0] as f64, 2.0 * a[1] as f64, -(a[2] as f64)])
            .unwrap();
        assert!(check_common_payoff(&full));
        assert!(check_team_symmetry(&full));
    }

    #[test]
    fn identity_player_dependence_breaks_symmetry() {
        // Team 0 earns 1 iff specifically player 0 plays H.
        let s = TeamStructure::uniform(2, 2, 2).unwrap();
        let full = FullFormGame::from_fn(s, |a| {
            let u = if a[0] == 0 { 1.0 } else { 0.0 };
            vec![u, u, -u, -u]
        })
        .unwrap();
        assert!(check_common_payoff(&full));
        assert!(!check_team_symmetry(&full));
        let err = reduce_to_count_form(&full).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
    }

    #[test]
    fn constant_game_reduces_to_constant_tensor() {
        let s = TeamStructure::uniform(2, 2, 3).unwrap();
        let full = FullFormGame::from_fn(s, |_| vec![5.0; 4]).unwrap();
        let t = reduce_to_count_form(&full).unwrap();
        assert_eq!(t.len(), 36);
        assert!(t.entries().iter().all(|e| e == &vec![5.0, 5.0]));
    }

    #[test]
    fn random_games_are_deterministic_and_in_range() {
        let s = TeamStructure::uniform(2, 2, 2).unwrap();
        let a = gen_random_game(s.clone(), 0, 10, false, 7).unwrap();
        let b = gen_random_game(s.clone(), 0, 10, false, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 9);
        assert!(a
            .entries()
            .iter()
            .flatten()
            .all(|&v| (0.0..=10.0).contains(&v) && v.fract() == 0.0));
        let z = gen_random_game(s, 0, 10, true, 3).unwrap();
        assert!(z.entries().iter().all(|e| e[0] + e[1] == 0.0));
    }

    #[test]
    fn zero_sum_needs_two_teams() {
        let s = TeamStructure::uniform(3, 1, 2).unwrap();
        assert!(matches!(
            gen_random_game(s, 0, 10, true, 0),
            Err(Error::ZeroSumRequiresTwoTeams(3))
        ));
    }

    #[test]
    fn linear_game_entries() {
        let s = TeamStructure::uniform(2, 2, 2).unwrap();
        assert!(linear_game(&LinearPayoffSpec::zeros(s.clone()))
            .entries()
            .iter()
            .flatten()
            .all(|&v| v == 0.0));

        let spec = LinearPayoffSpec::new(s.clone(), vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let g = linear_game(&spec);
        for other in g.team_vectors(1).to_vec() {
            assert_eq!(g.get(&[cv(&[2, 0]), other]).unwrap(), &[2.0, 2.0]);
        }

        let spec = LinearPayoffSpec::new(s, vec![vec![0.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let g = linear_game(&spec);
        for other in g.team_vectors(0).to_vec() {
            assert_eq!(g.get(&[other, cv(&[1, 1])]).unwrap(), &[3.0, 3.0]);
        }
    }

    #[test]
    fn game_file_rejects_missing_and_duplicate_entries() {
        let g = gmp_game(0.5);
        let file = g.to_file();
        assert_eq!(PayoffTensor::from_file(&file).unwrap(), g);

        let mut missing = file.clone();
        missing.entries.pop();
        assert!(matches!(
            PayoffTensor::from_file(&missing),
            Err(Error::InvalidGameFile(_))
        ));

        let mut dup = file.clone();
        let first = dup.entries[0].clone();
        dup.entries[1] = first;
        assert!(matches!(
            PayoffTensor::from_file(&dup),
            Err(Error::InvalidGameFile(_))
        ));
    }

    #[test]
    fn game_json_layout() {
        let json = gmp_game(0.5).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["m"], 2);
        assert_eq!(v["team_sizes"], serde_json::json!([2, 2]));
        assert_eq!(v["entries"][0]["counts"], serde_json::json!([[0, 2], [0, 2]]));
        assert_eq!(v["entries"][0]["payoffs"], serde_json::json!([1.0, -1.0]));
    }
}
