//! Bidding strategies: the constructions with winning guarantees plus
//! baseline adversaries. Every strategy sees only its own budget, the
//! current vertex and the energy, and learns outcomes through `observe`.

mod baseline;
mod maxmp;
mod minmp;
mod parity;
mod richman;
mod titfortat;

pub use baseline::{AllIn, Greedy, MoveRule, RandomBidder};
pub use maxmp::{max_general_strategy, max_recurrent_strategy, MaxMeanPayoff};
pub use minmp::{min_mp_strategy, MinMeanPayoff, MinPhase};
pub use parity::{parity_memoryless_strategy, ParityMemoryless};
pub use richman::{richman_winner_strategy, RichmanWinner};
pub use titfortat::{tit_for_tat_strategy, TitForTat};

use crate::amount::Amount;
use crate::arena::{Arena, Player};
use crate::num::Q;
use serde::Serialize;
use std::collections::VecDeque;
use std::sync::Arc;

/// What a strategy sees when it has to bid.
#[derive(Clone, Copy, Debug)]
pub struct View<'a> {
    pub arena: &'a Arena,
    pub round: u64,
    pub vertex: usize,
    pub me: Player,
    pub budget: Amount,
    pub energy: &'a Q,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Action {
    pub bid: Amount,
    /// Arena edge index; must leave the current vertex.
    pub edge: usize,
}

/// One resolved bidding round.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub vertex: usize,
    pub bids: [Amount; 2],
    pub winner: Player,
    pub edge: usize,
    pub dst: usize,
    /// Budgets after the transfer.
    pub budgets: [Amount; 2],
    /// Energy after traversing `edge`.
    pub energy: Q,
}

/// Constants a strategy was built with, for inspection and reporting.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StrategyParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_max: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_max: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wiggle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_energy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countdown: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<String>,
}

/// A budget check made when a strategy switches currency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvEvent {
    pub block: i64,
    pub budget: Amount,
    pub required: Amount,
}

/// Internal state the referee's monitors may read. Never used to alter play.
#[derive(Clone, Debug)]
pub enum Probe {
    None,
    Min {
        active: bool,
        norm: Q,
        b_max: Q,
        base: usize,
        /// Split-graph values; the entry after the last vertex is the terminal copy.
        values: Arc<Vec<Q>>,
    },
    Max {
        currency: Amount,
        z: f64,
        base: usize,
        values: Arc<Vec<f64>>,
        weights: Arc<Vec<f64>>,
        /// Present on rounds where the currency just changed.
        inv: Option<InvEvent>,
    },
    TitForTat {
        unmatched: usize,
        matching: Option<Amount>,
        free_wins: u64,
    },
}

pub trait Strategy: Send {
    fn name(&self) -> String;
    fn act(&mut self, view: &View) -> Action;
    fn observe(&mut self, _rec: &RoundRecord, _me: Player) {}
    fn params(&self) -> StrategyParams {
        StrategyParams::default()
    }
    fn probe(&self) -> Probe {
        Probe::None
    }
}

/// Breadth-first distances to `target` over edges accepted by `keep`.
/// Unreachable vertices get `u32::MAX`.
pub(crate) fn distances_to(arena: &Arena, targets: &[usize], keep: impl Fn(usize) -> bool) -> Vec<u32> {
    let mut pred = vec![vec![]; arena.n()];
    for (k, e) in arena.edges().iter().enumerate() {
        if keep(k) {
            pred[e.dst].push(e.src);
        }
    }
    let mut dist = vec![u32::MAX; arena.n()];
    let mut queue = VecDeque::new();
    for &t in targets {
        dist[t] = 0;
        queue.push_back(t);
    }
    while let Some(v) = queue.pop_front() {
        for &p in &pred[v] {
            if dist[p] == u32::MAX {
                dist[p] = dist[v] + 1;
                queue.push_back(p);
            }
        }
    }
    dist
}

/// Pulls the token to `target` inside a strongly connected region by bidding
/// `eps · 2^-d` at distance `d`: every lost bidding pays at least that much.
#[derive(Clone, Debug)]
pub(crate) struct Drawer {
    target: usize,
    dist: Vec<u32>,
    step: Vec<Option<usize>>,
    pub eps: Amount,
}

impl Drawer {
    pub fn new(arena: &Arena, target: usize, region: &[bool], eps: Amount) -> Drawer {
        let dist = distances_to(arena, &[target], |e| region[arena.edge(e).src] && region[arena.edge(e).dst]);
        let step = (0..arena.n())
            .map(|v| {
                arena
                    .out(v)
                    .iter()
                    .copied()
                    .filter(|&e| region[arena.edge(e).dst])
                    .min_by_key(|&e| (dist[arena.edge(e).dst], e))
            })
            .collect();
        Drawer { target, dist, step, eps }
    }

    /// Rounds needed from `v`; at the target this is the length of the
    /// shortest way back to it.
    pub fn distance(&self, arena: &Arena, v: usize) -> u32 {
        if v == self.target {
            arena.successors(v).map(|d| self.dist[d]).min().unwrap_or(u32::MAX).saturating_add(1)
        } else {
            self.dist[v]
        }
    }

    pub fn action(&self, view: &View) -> Action {
        let d = self.distance(view.arena, view.vertex).min(1000);
        let bid = (self.eps * Amount::exp2(-(d as f64))).min(view.budget);
        let edge = self.step[view.vertex].unwrap_or(view.arena.out(view.vertex)[0]);
        Action { bid, edge }
    }
}
