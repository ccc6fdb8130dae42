use super::{Action, Probe, RoundRecord, Strategy, View};
use crate::amount::Amount;
use crate::arena::{Arena, Player};
use crate::error::{domain, Result};
use num_traits::Signed;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Min's matching strategy on the single-vertex game with a `+1` and a `-1`
/// loop: every bid Max wins goes on a pile, and Min keeps bidding the
/// smallest unmatched bid until it wins with it.
pub struct TitForTat {
    down: usize,
    unmatched: BinaryHeap<Reverse<Amount>>,
    last_bid: Amount,
    free_wins: u64,
}

pub fn tit_for_tat_strategy(arena: &Arena) -> Result<TitForTat> {
    let shape_ok = arena.n() == 1
        && arena.edges().len() == 2
        && arena.edges().iter().any(|e| e.weight.is_positive())
        && arena.edges().iter().any(|e| e.weight.is_negative());
    if !shape_ok {
        return domain("tit-for-tat needs one vertex with a positive and a negative self-loop");
    }
    let down = (0..2).find(|&e| arena.edge(e).weight.is_negative()).unwrap();
    Ok(TitForTat { down, unmatched: BinaryHeap::new(), last_bid: Amount::ZERO, free_wins: 0 })
}

impl TitForTat {
    pub fn unmatched(&self) -> usize {
        self.unmatched.len()
    }

    pub fn matching(&self) -> Option<Amount> {
        self.unmatched.peek().map(|r| r.0)
    }
}

impl Strategy for TitForTat {
    fn name(&self) -> String {
        "tit-for-tat".into()
    }

    fn act(&mut self, _view: &View) -> Action {
        self.last_bid = self.matching().unwrap_or(Amount::ZERO);
        Action { bid: self.last_bid, edge: self.down }
    }

    fn observe(&mut self, rec: &RoundRecord, me: Player) {
        if rec.winner == me {
            if self.unmatched.is_empty() {
                self.free_wins += 1;
            } else {
                self.unmatched.pop();
            }
        } else {
            self.unmatched.push(Reverse(rec.bids[me.other().index()]));
        }
    }

    fn probe(&self) -> Probe {
        Probe::TitForTat { unmatched: self.unmatched.len(), matching: self.matching(), free_wins: self.free_wins }
    }
}
