//! Solver, strategy engine and simulation lab for infinite-duration
//! bidding games with reachability, parity and mean-payoff objectives.

#![allow(clippy::needless_range_loop)]

pub mod amount;
pub mod arena;
pub mod cli;
pub mod error;
pub mod fixpoint;
pub mod gen;
pub mod meanpayoff;
pub mod num;
pub mod oracle;
pub mod parity;
pub mod richman;
pub mod sim;
pub mod strategy;

pub use amount::Amount;
pub use arena::{load_arena, Arena, ObjectiveKind, Player, TieRule};
pub use error::{Error, Result};
pub use num::Q;
