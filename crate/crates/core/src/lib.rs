//! Team-symmetric games and delegate actor-critic learning.
//!
//! * [`game`]: team structures, count-form payoff tensors, symmetry checks and
//!   generators (random integer games, generalized matching pennies, linear games).
//! * [`payoff`]: multinomial expected payoffs plus a brute-force oracle.
//! * [`equilibrium`]: team-symmetric Nash equilibria via support enumeration
//!   on the complementarity conditions, with an improvement-map fallback.
//! * [`neural`]: small MLPs, losses and Adam.
//! * [`marl`]: repeated-game environment, the delegate actor-critic trainer and
//!   an independent actor-critic baseline.
//! * [`harness`]: metrics and experiment suites writing CSV/JSON.

pub mod error;
pub mod game;
pub mod payoff;
pub mod equilibrium;
pub mod neural;
pub mod marl;
pub mod harness;

pub use error::{Error, Result};
