use super::{Action, Drawer, Probe, Strategy, StrategyParams, View};
use crate::amount::Amount;
use crate::arena::Arena;
use crate::error::{domain, Result};
use crate::meanpayoff::{exact_weights, weighted_richman};
use crate::num::{fmt_q, qi, Q};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MinPhase {
    /// Normalized threshold bids, moving along the cheapest edge.
    Active,
    /// Energy is not positive: bid nothing.
    Idle,
    /// Pull the play back to the base vertex with the reserved budget slice.
    Return,
}

/// Min's strategy in a strongly connected mean-payoff game whose base vertex
/// has a non-positive weighted threshold value. In the active phase it bids
/// the half gap of that function divided by `N`, where `N` is the least
/// integer with `(1 - delta) · budget > (energy + b_max + w_max) / N`,
/// recomputed whenever a new epoch starts at the base.
pub struct MinMeanPayoff {
    base: usize,
    values: Arc<Vec<Q>>,
    gaps: Vec<Q>,
    steps: Vec<usize>,
    b_max: Q,
    w_max: Q,
    delta: Q,
    norm: Q,
    bids: Vec<Amount>,
    phase: MinPhase,
    started: bool,
    drawer: Drawer,
    initial_energy: Q,
    epochs: u64,
}

pub fn min_mp_strategy(arena: &Arena, base: usize, budget: &Q, initial_energy: &Q, delta: &Q) -> Result<MinMeanPayoff> {
    if !budget.is_positive() || *budget > Q::one() {
        return domain("Min's budget must lie in (0, 1]");
    }
    if initial_energy.is_negative() {
        return domain("the initial energy must be non-negative");
    }
    if delta.is_negative() || *delta >= Q::one() {
        return domain("the reserved fraction must lie in [0, 1)");
    }
    let wrv = weighted_richman(arena, base)?;
    if wrv.w_of_u.is_positive() {
        return domain(format!("the base value {} is positive: Min has no guarantee here", fmt_q(&wrv.w_of_u)));
    }
    let weights = exact_weights(arena);
    let n = arena.n();
    let gaps: Vec<Q> = (0..n).map(|v| wrv.half_gap(arena, &weights, v)).collect();
    let steps = (0..n).map(|v| wrv.policy[v].unwrap().1).collect();
    let b_max = gaps.iter().map(|g| g.abs()).max().unwrap_or_else(Q::zero);
    let w_max = wrv.values.iter().map(|w| w.abs()).max().unwrap_or_else(Q::zero);
    let drawer = Drawer::new(arena, base, &vec![true; n], Amount::ZERO);
    let mut s = MinMeanPayoff {
        base,
        values: Arc::new(wrv.values),
        gaps,
        steps,
        b_max,
        w_max,
        delta: delta.clone(),
        norm: qi(1),
        bids: vec![],
        phase: MinPhase::Active,
        started: false,
        drawer,
        initial_energy: initial_energy.clone(),
        epochs: 0,
    };
    s.begin_epoch(budget, initial_energy);
    Ok(s)
}

impl MinMeanPayoff {
    /// The normalizer for a fresh epoch with the given budget and energy.
    pub fn normalizer(&self, budget: &Q, energy: &Q) -> Q {
        let need = energy + &self.b_max + &self.w_max;
        let avail = (Q::one() - &self.delta) * budget;
        let n = (need / avail).floor() + Q::one();
        n.max(qi(1))
    }

    fn begin_epoch(&mut self, budget: &Q, energy: &Q) {
        self.norm = self.normalizer(budget, energy);
        self.bids = self.gaps.iter().map(|g| Amount::from_q(&(g / &self.norm))).collect();
        self.phase = MinPhase::Active;
        self.epochs += 1;
    }

    pub fn norm(&self) -> &Q {
        &self.norm
    }

    pub fn b_max(&self) -> &Q {
        &self.b_max
    }

    pub fn w_max(&self) -> &Q {
        &self.w_max
    }

    pub fn phase(&self) -> MinPhase {
        self.phase
    }

    /// Active-phase bid at `v` under the current normalizer.
    pub fn active_bid(&self, v: usize) -> Q {
        &self.gaps[v] / &self.norm
    }

    /// Slice of the budget spent on returning; all of it when nothing is reserved.
    fn reserve(&self, budget: Amount) -> Amount {
        if self.delta.is_zero() {
            budget
        } else {
            budget * crate::num::q_to_f64(&self.delta)
        }
    }

    fn settle(&mut self, view: &View) {
        let positive = view.energy.is_positive();
        let at_base = view.vertex == self.base;
        if !self.started {
            self.started = true;
            if !at_base {
                self.phase = MinPhase::Return;
                self.drawer.eps = self.reserve(view.budget);
            }
        }
        for _ in 0..3 {
            match self.phase {
                MinPhase::Active if !positive => self.phase = MinPhase::Idle,
                MinPhase::Idle if positive => {
                    if at_base {
                        self.begin_epoch(&view.budget.to_q(), view.energy);
                    } else {
                        self.phase = MinPhase::Return;
                        self.drawer.eps = self.reserve(view.budget);
                    }
                }
                MinPhase::Return if at_base => {
                    if positive {
                        self.begin_epoch(&view.budget.to_q(), view.energy);
                    } else {
                        self.phase = MinPhase::Idle;
                    }
                }
                _ => break,
            }
        }
    }
}

impl Strategy for MinMeanPayoff {
    fn name(&self) -> String {
        "min-meanpayoff".into()
    }

    fn act(&mut self, view: &View) -> Action {
        self.settle(view);
        let v = view.vertex;
        match self.phase {
            MinPhase::Active => Action { bid: self.bids[v], edge: self.steps[v] },
            MinPhase::Idle => Action { bid: Amount::ZERO, edge: self.steps[v] },
            MinPhase::Return => self.drawer.action(view),
        }
    }

    fn params(&self) -> StrategyParams {
        StrategyParams {
            n: Some(fmt_q(&self.norm)),
            b_max: Some(fmt_q(&self.b_max)),
            w_max: Some(fmt_q(&self.w_max)),
            initial_energy: Some(fmt_q(&self.initial_energy)),
            ..Default::default()
        }
    }

    fn probe(&self) -> Probe {
        Probe::Min {
            active: self.phase == MinPhase::Active,
            norm: self.norm.clone(),
            b_max: self.b_max.clone(),
            base: self.base,
            values: self.values.clone(),
        }
    }
}
