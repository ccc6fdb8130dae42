//! Adversaries without guarantees, used to exercise the constructions.

use super::{Action, Strategy, View};
use crate::amount::Amount;
use crate::arena::Arena;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How a baseline picks its edge after winning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveRule {
    Uniform,
    /// Heaviest edge, lowest index on ties.
    MaxWeight,
    /// Lightest edge, lowest index on ties.
    MinWeight,
}

impl MoveRule {
    fn pick(self, arena: &Arena, v: usize, rng: &mut ChaCha8Rng) -> usize {
        let out = arena.out(v);
        match self {
            MoveRule::Uniform => out[rng.gen_range(0..out.len())],
            MoveRule::MaxWeight => *out.iter().rev().max_by(|&&a, &&b| arena.edge(a).weight.cmp(&arena.edge(b).weight)).unwrap(),
            MoveRule::MinWeight => *out.iter().min_by(|&&a, &&b| arena.edge(a).weight.cmp(&arena.edge(b).weight)).unwrap(),
        }
    }

    fn label(self) -> &'static str {
        match self {
            MoveRule::Uniform => "uniform",
            MoveRule::MaxWeight => "max",
            MoveRule::MinWeight => "min",
        }
    }
}

/// Bids a uniform fraction of its budget.
pub struct RandomBidder {
    seed: u64,
    rng: ChaCha8Rng,
    moves: MoveRule,
}

impl RandomBidder {
    pub fn new(seed: u64, moves: MoveRule) -> Self {
        RandomBidder { seed, rng: ChaCha8Rng::seed_from_u64(seed), moves }
    }
}

impl Strategy for RandomBidder {
    fn name(&self) -> String {
        format!("random(seed={},move={})", self.seed, self.moves.label())
    }

    fn act(&mut self, view: &View) -> Action {
        let frac: f64 = self.rng.gen();
        let edge = self.moves.pick(view.arena, view.vertex, &mut self.rng);
        Action { bid: view.budget * frac, edge }
    }
}

/// Bids a fixed fraction of its budget and moves by one-step weight.
pub struct Greedy {
    fraction: f64,
    moves: MoveRule,
    rng: ChaCha8Rng,
}

impl Greedy {
    pub fn new(fraction: f64, moves: MoveRule) -> Self {
        Greedy { fraction: fraction.clamp(0.0, 1.0), moves, rng: ChaCha8Rng::seed_from_u64(0) }
    }
}

impl Strategy for Greedy {
    fn name(&self) -> String {
        format!("greedy(fraction={},move={})", self.fraction, self.moves.label())
    }

    fn act(&mut self, view: &View) -> Action {
        Action { bid: view.budget * self.fraction, edge: self.moves.pick(view.arena, view.vertex, &mut self.rng) }
    }
}

/// Stakes the whole budget on the first bidding, then bids nothing.
pub struct AllIn {
    spent: bool,
    moves: MoveRule,
    rng: ChaCha8Rng,
}

impl AllIn {
    pub fn new(moves: MoveRule) -> Self {
        AllIn { spent: false, moves, rng: ChaCha8Rng::seed_from_u64(0) }
    }
}

impl Strategy for AllIn {
    fn name(&self) -> String {
        format!("allin(move={})", self.moves.label())
    }

    fn act(&mut self, view: &View) -> Action {
        let bid = if self.spent { Amount::ZERO } else { view.budget };
        self.spent = true;
        Action { bid, edge: self.moves.pick(view.arena, view.vertex, &mut self.rng) }
    }
}
