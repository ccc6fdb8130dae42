use super::{Action, InvEvent, Probe, Strategy, StrategyParams, View};
use crate::amount::Amount;
use crate::arena::Arena;
use crate::error::{domain, Result};
use crate::meanpayoff::{
    classify_scc, contributions, exact_weights, is_recurrent_scc, scale_z, scale_z_tilde, weighted_richman, weighted_richman_with,
    z_recurrent,
};
use crate::num::{fmt_f64, fmt_q, q_to_f64, qi, Q};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::Arc;

#[derive(Clone, Debug)]
enum Ledger {
    /// Currency follows the block of the energy at the last root visit.
    Recurrent,
    /// Even blocks `2n` fix the currency `z^-n`; odd blocks keep the last one.
    General,
    /// No negative weight is ever traversed: bidding nothing suffices.
    Idle,
}

/// Max's strategy in a strongly connected mean-payoff game in which every
/// base value is positive. Bids are the half gap of the scaled threshold
/// function times the current currency, and the token moves along the best
/// edge. Energy is split into blocks of `block` units that set the currency.
pub struct MaxMeanPayoff {
    ledger: Ledger,
    base: usize,
    z: f64,
    z_amount: Amount,
    values: Arc<Vec<f64>>,
    weights: Arc<Vec<f64>>,
    gaps: Vec<Amount>,
    steps: Vec<usize>,
    b_max: f64,
    w_max: f64,
    wiggle: f64,
    block: u64,
    initial_energy: u64,
    level: i64,
    currency: Amount,
    inv: Option<InvEvent>,
}

/// Largest and smallest energy of a simple cycle through `root`.
fn root_cycle_extremes(arena: &Arena, root: usize) -> (Q, Q) {
    let n = arena.n();
    // Longest / shortest path weight from v back into the root avoiding it otherwise.
    let mut memo: Vec<Option<(Q, Q)>> = vec![None; n];
    fn go(arena: &Arena, root: usize, v: usize, memo: &mut Vec<Option<(Q, Q)>>) -> Option<(Q, Q)> {
        if let Some(r) = &memo[v] {
            return Some(r.clone());
        }
        let mut best: Option<(Q, Q)> = None;
        for &e in arena.out(v) {
            let ed = arena.edge(e);
            let tail = if ed.dst == root { Some((qi(0), qi(0))) } else { go(arena, root, ed.dst, memo) };
            if let Some((hi, lo)) = tail {
                let (hi, lo) = (hi + &ed.weight, lo + &ed.weight);
                best = Some(match best {
                    None => (hi, lo),
                    Some((bh, bl)) => (bh.max(hi), bl.min(lo)),
                });
            }
        }
        memo[v] = best.clone();
        best
    }
    let mut hi: Option<Q> = None;
    let mut lo: Option<Q> = None;
    for &e in arena.out(root) {
        let ed = arena.edge(e);
        let tail = if ed.dst == root { Some((qi(0), qi(0))) } else { go(arena, root, ed.dst, &mut memo) };
        if let Some((h, l)) = tail {
            let (h, l) = (h + &ed.weight, l + &ed.weight);
            hi = Some(hi.map_or(h.clone(), |x| x.max(h)));
            lo = Some(lo.map_or(l.clone(), |x| x.min(l)));
        }
    }
    (hi.unwrap_or_else(Q::zero), lo.unwrap_or_else(Q::zero))
}

fn check_budget(budget: &Q) -> Result<()> {
    if !budget.is_positive() || *budget > Q::one() {
        return domain("Max's budget must lie in (0, 1]");
    }
    Ok(())
}

fn idle(base: usize, n: usize) -> MaxMeanPayoff {
    MaxMeanPayoff {
        ledger: Ledger::Idle,
        base,
        z: f64::INFINITY,
        z_amount: Amount::one(),
        values: Arc::new(vec![0.0; n + 1]),
        weights: Arc::new(vec![]),
        gaps: vec![Amount::ZERO; n],
        steps: vec![0; n],
        b_max: 0.0,
        w_max: 0.0,
        wiggle: 0.0,
        block: 1,
        initial_energy: 0,
        level: 0,
        currency: Amount::ZERO,
        inv: None,
    }
}

/// Recurrent games: every cycle passes through the root, where alone the
/// currency may change.
pub fn max_recurrent_strategy(arena: &Arena, budget: &Q) -> Result<MaxMeanPayoff> {
    check_budget(budget)?;
    let Some(root) = is_recurrent_scc(arena) else {
        return domain("the game has no recurrent root");
    };
    let wrv = weighted_richman(arena, root)?;
    if !wrv.w_of_u.is_positive() {
        return domain(format!("the root value {} is not positive", fmt_q(&wrv.w_of_u)));
    }
    let cont = contributions(arena, &wrv)?;
    let Some(z) = z_recurrent(arena, &wrv, &cont)? else {
        let mut s = idle(root, arena.n());
        s.steps = (0..arena.n()).map(|v| wrv.policy[v].unwrap().0).collect();
        return Ok(s);
    };
    let wz_weights = scale_z(arena, &z)?;
    let wz = weighted_richman_with(arena, root, &wz_weights)?;
    let n = arena.n();
    let gaps: Vec<Q> = (0..n).map(|v| wz.half_gap(arena, &wz_weights, v)).collect();
    let b_max = gaps.iter().map(|g| g.abs()).max().unwrap();
    let (hi, lo) = root_cycle_extremes(arena, root);
    let w_max = hi.abs().max(lo.abs());
    let one = Q::one();
    let block = ((&b_max + qi(3) * &w_max) / (&one - one.clone() / &z)).ceil().max(one.clone());
    let wiggle = qi(2) * &w_max + &b_max;
    let zinv = one.clone() / &z;
    // Least n with budget > (wiggle + M/(z-1)) z^-(n-1) and Σ_{i≤n} M z^-i > 1.
    let mut level = 1i64;
    let mut scale = one.clone();
    let mut spent = &block * &zinv;
    let reserve = &wiggle + &block / (&z - &one);
    while !(*budget > &reserve * &scale && spent > one) {
        level += 1;
        scale *= &zinv;
        spent += &block * &scale * &zinv;
        if level > 100_000 {
            return domain("no initial energy found for this budget");
        }
    }
    let block_u = block.to_integer().to_u64().unwrap_or(u64::MAX);
    let zf = q_to_f64(&z);
    let z_amount = Amount::from_q(&z);
    Ok(MaxMeanPayoff {
        ledger: Ledger::Recurrent,
        base: root,
        z: zf,
        z_amount,
        values: Arc::new(wz.values.iter().map(q_to_f64).collect()),
        weights: Arc::new(wz_weights.iter().map(q_to_f64).collect()),
        gaps: gaps.iter().map(Amount::from_q).collect(),
        steps: (0..n).map(|v| wz.policy[v].unwrap().0).collect(),
        b_max: q_to_f64(&b_max),
        w_max: q_to_f64(&w_max),
        wiggle: q_to_f64(&wiggle),
        block: block_u,
        initial_energy: block_u * (level as u64 - 1),
        level,
        currency: z_amount.powi(-level),
        inv: None,
    })
}

/// General strongly connected games with every base value positive.
pub fn max_general_strategy(arena: &Arena, budget: &Q) -> Result<MaxMeanPayoff> {
    check_budget(budget)?;
    let class = classify_scc(arena)?;
    if class.tau == 0 {
        return domain("some base value is non-positive: Max has no guarantee here");
    }
    let base = class.witness;
    let wrv = weighted_richman(arena, base)?;
    let cont = contributions(arena, &wrv)?;
    let Some(ratio) = z_recurrent(arena, &wrv, &cont)? else {
        let mut s = idle(base, arena.n());
        s.steps = (0..arena.n()).map(|v| wrv.policy[v].unwrap().0).collect();
        return Ok(s);
    };
    let z = q_to_f64(&ratio).sqrt();
    let weights = scale_z_tilde(arena, &z)?;
    let wt = weighted_richman_with(arena, base, &weights)?;
    let n = arena.n();
    let gaps: Vec<f64> = (0..n).map(|v| wt.half_gap(arena, &weights, v)).collect();
    let b_max = gaps.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    let w_max = wt.values.iter().fold(0.0f64, |a, w| a.max(w.abs()));
    let max_weight = exact_weights(arena).iter().map(q_to_f64).fold(0.0f64, |a, w| a.max(w.abs()));
    let wiggle = 2.0 * w_max + b_max;
    let block = general_block(z, b_max, w_max, max_weight);
    let mut level = 1i64;
    loop {
        let below: f64 = (1..level).map(|i| 2.0 * block as f64 * z.powi(-(i as i32))).sum();
        if Amount::from_q(budget) > inv_ascend(z, wiggle, w_max, block, level) && (level > 1 && below > 1.0) {
            break;
        }
        level += 1;
        if level > 100_000 {
            return domain("no initial energy found for this budget");
        }
    }
    let z_amount = Amount::from_f64(z);
    Ok(MaxMeanPayoff {
        ledger: Ledger::General,
        base,
        z,
        z_amount,
        values: Arc::new(wt.values.clone()),
        weights: Arc::new(weights),
        gaps: gaps.iter().map(|&g| Amount::from_f64(g)).collect(),
        steps: (0..n).map(|v| wt.policy[v].unwrap().0).collect(),
        b_max,
        w_max,
        wiggle,
        block,
        initial_energy: block * (2 * level as u64 - 1),
        level,
        currency: z_amount.powi(-level),
        inv: None,
    })
}

/// Least block size meeting the budget step of every block transition.
/// `max_weight` bounds how far one round moves the energy past a boundary.
pub fn general_block(z: f64, b_max: f64, w_max: f64, max_weight: f64) -> u64 {
    let wiggle = 2.0 * w_max + b_max;
    let c1 = (2.0 * w_max + max_weight - wiggle * z * (z - 1.0)) / (2.0 * (z - 1.0));
    let c2 = wiggle + (z * max_weight + 2.0 * w_max) / (z - 1.0);
    let c4 = (2.0 * max_weight + 2.0 * w_max * (z + 1.0)) / (z - 1.0);
    let need = c1.max(c2).max(c4).max(max_weight + 1.0).max(1.0);
    need.ceil() as u64
}

/// Budget required on entering block `2n` from below.
fn inv_ascend(z: f64, wiggle: f64, w_max: f64, block: u64, n: i64) -> Amount {
    let za = Amount::from_f64(z);
    let m = block as f64;
    za.powi(-(n - 1)) * (wiggle + 2.0 * m / (z - 1.0)) + za.powi(-n) * (2.0 * w_max)
}

/// Budget required on entering block `2n` from above.
fn inv_descend(z: f64, wiggle: f64, block: u64, n: i64) -> Amount {
    let m = block as f64;
    Amount::from_f64(z).powi(-n) * (wiggle + m + 2.0 * m / (z - 1.0))
}

impl MaxMeanPayoff {
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn block(&self) -> u64 {
        self.block
    }

    pub fn initial_energy(&self) -> u64 {
        self.initial_energy
    }

    pub fn b_max(&self) -> f64 {
        self.b_max
    }

    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    pub fn wiggle(&self) -> f64 {
        self.wiggle
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Bid at `v` in the currency of level 0 (before scaling by `z^-n`).
    pub fn unit_bid(&self, v: usize) -> Amount {
        self.gaps[v]
    }

    pub fn currency(&self) -> Amount {
        self.currency
    }

    fn block_of(&self, energy: &Q) -> i64 {
        let b = energy.floor().to_integer().div_floor(&num_bigint::BigInt::from(self.block));
        b.to_i64().unwrap_or(i64::MAX - 1).saturating_add(1).max(1)
    }

    fn update_currency(&mut self, view: &View) {
        self.inv = None;
        let b = self.block_of(view.energy);
        let m = self.block as f64;
        let e = q_to_f64(view.energy);
        let (level, required) = match self.ledger {
            Ledger::Idle => return,
            Ledger::Recurrent => {
                if view.vertex != self.base || b == self.level {
                    return;
                }
                let (hat, edge) = if b > self.level { (b, m * (b - 1) as f64) } else { (b + 1, m * b as f64) };
                let slack = (edge + self.w_max - e).clamp(0.0, 2.0 * self.w_max);
                let scale = self.z_amount.powi(-(hat - 1));
                (b, scale * (self.wiggle + slack) + scale * (m / (self.z - 1.0)))
            }
            Ledger::General => {
                if b % 2 != 0 || b / 2 == self.level {
                    return;
                }
                let n = b / 2;
                let req = if n > self.level {
                    inv_ascend(self.z, self.wiggle, self.w_max, self.block, n)
                } else {
                    inv_descend(self.z, self.wiggle, self.block, n)
                };
                (n, req)
            }
        };
        self.level = level;
        self.currency = self.z_amount.powi(-level);
        self.inv = Some(InvEvent { block: b, budget: view.budget, required });
    }
}

impl Strategy for MaxMeanPayoff {
    fn name(&self) -> String {
        match self.ledger {
            Ledger::Recurrent => "max-recurrent".into(),
            Ledger::General => "max-general".into(),
            Ledger::Idle => "max-idle".into(),
        }
    }

    fn act(&mut self, view: &View) -> Action {
        self.update_currency(view);
        let v = view.vertex;
        Action { bid: self.gaps[v] * self.currency, edge: self.steps[v] }
    }

    fn params(&self) -> StrategyParams {
        StrategyParams {
            z: Some(self.z),
            block: Some(self.block),
            b_max: Some(fmt_f64(self.b_max)),
            w_max: Some(fmt_f64(self.w_max)),
            wiggle: Some(fmt_f64(self.wiggle)),
            initial_energy: Some(self.initial_energy.to_string()),
            ..Default::default()
        }
    }

    fn probe(&self) -> Probe {
        Probe::Max {
            currency: self.currency,
            z: self.z,
            base: self.base,
            values: self.values.clone(),
            weights: self.weights.clone(),
            inv: self.inv,
        }
    }
}
