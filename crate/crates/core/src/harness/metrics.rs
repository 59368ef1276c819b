//! Distances between learned policies and a set of equilibria.

use crate::error::{Error, Result};
use crate::game::PayoffTensor;
use crate::payoff::{mixed_payoffs, MixedStrategy, SymmetricProfile};

/// Team-averaged squared payoff gap to the closest equilibrium payoff vector.
pub fn mse_from_payoffs(learned: &[f64], ne_payoffs: &[Vec<f64>]) -> Result<f64> {
    ne_payoffs
        .iter()
        .map(|ne| {
            if ne.len() != learned.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} learned payoffs against {} equilibrium payoffs",
                    learned.len(),
                    ne.len()
                )));
            }
            Ok(learned.iter().zip(ne).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / learned.len() as f64)
        })
        .try_fold(None, |best: Option<f64>, v: Result<f64>| {
            let v = v?;
            Ok::<_, Error>(Some(best.map_or(v, |b| b.min(v))))
        })?
        .ok_or(Error::EmptyEquilibriumSet)
}

/// [`mse_from_payoffs`] with payoffs taken as expectations under each profile.
pub fn mse_metric(game: &PayoffTensor, learned: &SymmetricProfile, ne_set: &[SymmetricProfile]) -> Result<f64> {
    if ne_set.is_empty() {
        return Err(Error::EmptyEquilibriumSet);
    }
    let ne_payoffs = ne_set
        .iter()
        .map(|ne| mixed_payoffs(game, ne))
        .collect::<Result<Vec<_>>>()?;
    mse_from_payoffs(&mixed_payoffs(game, learned)?, &ne_payoffs)
}

/// `D_KL(target ‖ learned)` with `0 · log 0 = 0`.
pub fn kl_divergence(target: &MixedStrategy, learned: &MixedStrategy) -> f64 {
    target
        .probs()
        .iter()
        .zip(learned.probs())
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, &l)| if l > 0.0 { t * (t / l).ln() } else { f64::INFINITY })
        .sum()
}

/// Team-averaged `D_KL(NE ‖ learned)` to the closest equilibrium; `+inf` for
/// an empty set.
pub fn kl_metric(learned: &SymmetricProfile, ne_set: &[SymmetricProfile]) -> f64 {
    ne_set
        .iter()
        .map(|ne| {
            let m = learned.num_teams() as f64;
            ne.strategies()
                .iter()
                .zip(learned.strategies())
                .map(|(t, l)| kl_divergence(t, l))
                .sum::<f64>()
                / m
        })
        .fold(f64::INFINITY, f64::min)
}
