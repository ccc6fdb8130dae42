//! Game arenas: the file format, validation and graph decomposition.
//!
//! ```text
//! objective richman|reachability|parity|meanpayoff
//! tiebreak player1|player2|alternate=1|alternate=2
//! vertex <name> [parity=<uint>] [target=1|2] [weight=<rational>]
//! edge <src> <dst> [weight=<rational>] [id=<name>]
//! ```
//!
//! A vertex weight is charged on departure, so the loader adds it to every
//! outgoing edge of that vertex.

use crate::error::{Error, Result};
use crate::num::{fmt_q, parse_q, Q};
use num_traits::Zero;
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Resolves equal bids. `Alternate(p)` gives the tie to `p` on even rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TieRule {
    #[default]
    Player1Wins,
    Player2Wins,
    Alternate(Player),
}

impl TieRule {
    pub fn winner(self, round: u64) -> Player {
        match self {
            TieRule::Player1Wins => Player::One,
            TieRule::Player2Wins => Player::Two,
            TieRule::Alternate(p) => {
                if round.is_multiple_of(2) {
                    p
                } else {
                    p.other()
                }
            }
        }
    }

    pub fn parse(s: &str) -> Option<TieRule> {
        match s {
            "player1" => Some(TieRule::Player1Wins),
            "player2" => Some(TieRule::Player2Wins),
            "alternate=1" | "alternate" => Some(TieRule::Alternate(Player::One)),
            "alternate=2" => Some(TieRule::Alternate(Player::Two)),
            _ => None,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            TieRule::Player1Wins => "player1",
            TieRule::Player2Wins => "player2",
            TieRule::Alternate(Player::One) => "alternate=1",
            TieRule::Alternate(Player::Two) => "alternate=2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveKind {
    Richman,
    Reachability,
    Parity,
    MeanPayoff,
}

impl ObjectiveKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ObjectiveKind::Richman => "richman",
            ObjectiveKind::Reachability => "reachability",
            ObjectiveKind::Parity => "parity",
            ObjectiveKind::MeanPayoff => "meanpayoff",
        }
    }

    pub fn parse(s: &str) -> Option<ObjectiveKind> {
        match s {
            "richman" => Some(ObjectiveKind::Richman),
            "reachability" => Some(ObjectiveKind::Reachability),
            "parity" => Some(ObjectiveKind::Parity),
            "meanpayoff" => Some(ObjectiveKind::MeanPayoff),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub parity: u32,
    /// `Some(One)` marks the Player-1 sink or a reachability target,
    /// `Some(Two)` the Player-2 sink.
    pub target: Option<Player>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
    pub weight: Q,
}

#[derive(Clone, Debug)]
pub struct Arena {
    pub objective: ObjectiveKind,
    pub tiebreak: TieRule,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl PartialEq for Arena {
    fn eq(&self, o: &Arena) -> bool {
        self.objective == o.objective
            && self.tiebreak == o.tiebreak
            && self.vertices == o.vertices
            && self.edges == o.edges
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '=' || c == '#' || c == ',')
}

/// Incremental construction of an [`Arena`].
#[derive(Clone, Debug)]
pub struct ArenaBuilder {
    objective: ObjectiveKind,
    tiebreak: TieRule,
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize, Q, Option<String>)>,
    index: HashMap<String, usize>,
}

impl ArenaBuilder {
    pub fn new(objective: ObjectiveKind) -> Self {
        ArenaBuilder { objective, tiebreak: TieRule::default(), vertices: vec![], edges: vec![], index: HashMap::new() }
    }

    pub fn tiebreak(mut self, t: TieRule) -> Self {
        self.tiebreak = t;
        self
    }

    pub fn set_tiebreak(&mut self, t: TieRule) {
        self.tiebreak = t;
    }

    pub fn add_vertex(&mut self, name: &str, parity: u32, target: Option<Player>) -> Result<usize> {
        if !valid_name(name) {
            return Err(Error::Validation(format!("bad vertex name {name:?}")));
        }
        if self.index.contains_key(name) {
            return Err(Error::Validation(format!("duplicate vertex {name}")));
        }
        let id = self.vertices.len();
        self.vertices.push(Vertex { name: name.to_string(), parity, target });
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn vertex(mut self, name: &str) -> Self {
        self.add_vertex(name, 0, None).expect("vertex");
        self
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn vertex_mut(&mut self, v: usize) -> &mut Vertex {
        &mut self.vertices[v]
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, weight: Q, id: Option<String>) -> usize {
        self.edges.push((src, dst, weight, id));
        self.edges.len() - 1
    }

    /// Adds an edge by vertex names, creating neither endpoint.
    pub fn edge(mut self, src: &str, dst: &str, weight: Q) -> Self {
        let (s, d) = (self.lookup(src).expect("src"), self.lookup(dst).expect("dst"));
        self.add_edge(s, d, weight, None);
        self
    }

    pub fn build(self) -> Result<Arena> {
        let explicit: HashSet<String> = self.edges.iter().filter_map(|e| e.3.clone()).collect();
        let mut used = HashSet::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, (src, dst, weight, id)) in self.edges.into_iter().enumerate() {
            let id = match id {
                Some(id) => id,
                None => {
                    let mut cand = format!("e{k}");
                    while explicit.contains(&cand) || used.contains(&cand) {
                        cand.push('_');
                    }
                    cand
                }
            };
            if !valid_name(&id) {
                return Err(Error::Validation(format!("bad edge id {id:?}")));
            }
            if !used.insert(id.clone()) {
                return Err(Error::Validation(format!("duplicate edge id {id}")));
            }
            edges.push(Edge { id, src, dst, weight });
        }
        Arena::from_parts(self.objective, self.tiebreak, self.vertices, edges)
    }
}

impl Arena {
    pub fn from_parts(objective: ObjectiveKind, tiebreak: TieRule, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Arena> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::Validation("arena has no vertices".into()));
        }
        let mut out = vec![vec![]; n];
        for (k, e) in edges.iter().enumerate() {
            if e.src >= n || e.dst >= n {
                return Err(Error::Validation(format!("edge {} has an unknown endpoint", e.id)));
            }
            out[e.src].push(k);
        }
        let index = vertices.iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
        let a = Arena { objective, tiebreak, vertices, edges, out, index };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        if self.index.len() != self.vertices.len() {
            return Err(Error::Validation("duplicate vertex names".into()));
        }
        let count = |p: Player| self.vertices.iter().filter(|v| v.target == Some(p)).count();
        let dead_end = |v: usize| Error::Validation(format!("dead-end vertex {} (out-degree 0)", self.vertices[v].name));
        match self.objective {
            ObjectiveKind::Richman => {
                if count(Player::One) != 1 || count(Player::Two) != 1 {
                    return Err(Error::Validation("a richman game needs exactly one target=1 and one target=2 vertex".into()));
                }
                for v in 0..self.n() {
                    if self.vertices[v].target.is_none() && self.out[v].is_empty() {
                        return Err(dead_end(v));
                    }
                }
            }
            ObjectiveKind::Reachability => {
                if count(Player::Two) != 0 {
                    return Err(Error::Validation("target=2 is only meaningful in richman games".into()));
                }
            }
            ObjectiveKind::Parity | ObjectiveKind::MeanPayoff => {
                if count(Player::One) + count(Player::Two) != 0 {
                    return Err(Error::Validation(format!("targets are not allowed in {} games", self.objective.keyword())));
                }
                for v in 0..self.n() {
                    if self.out[v].is_empty() {
                        return Err(dead_end(v));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn name(&self, v: usize) -> &str {
        &self.vertices[v].name
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Outgoing edge indices of `v`, in declaration order.
    pub fn out(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.lookup(name).ok_or_else(|| Error::Domain(format!("unknown vertex {name}")))
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// `(v_R, v_S)` of a richman game.
    pub fn richman_sinks(&self) -> Result<(usize, usize)> {
        if self.objective != ObjectiveKind::Richman {
            return Err(Error::Domain(format!("expected a richman game, got {}", self.objective.keyword())));
        }
        let find = |p| self.vertices.iter().position(|v| v.target == Some(p)).unwrap();
        Ok((find(Player::One), find(Player::Two)))
    }

    pub fn targets(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.vertices[v].target == Some(Player::One)).collect()
    }

    pub fn names(&self) -> HashSet<String> {
        self.index.keys().cloned().collect()
    }

    pub fn parity(&self, v: usize) -> u32 {
        self.vertices[v].parity
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().map(move |&e| self.edges[e].dst)
    }

    /// Vertices from which some vertex of `targets` is reachable (including `targets`).
    pub fn can_reach(&self, targets: &[usize]) -> Vec<bool> {
        let mut pred = vec![vec![]; self.n()];
        for e in &self.edges {
            pred[e.dst].push(e.src);
        }
        let mut seen = vec![false; self.n()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &t in targets {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &p in &pred[v] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Vertices with no path to the target set.
    pub fn unreachable_from_target(&self, targets: &[usize]) -> Vec<usize> {
        let r = self.can_reach(targets);
        (0..self.n()).filter(|&v| !r[v]).collect()
    }

    pub fn scc_decompose(&self) -> SccDecomposition {
        let comps = tarjan(self.n(), |v| self.successors(v).collect());
        let mut comp_of = vec![0; self.n()];
        for (c, vs) in comps.iter().enumerate() {
            for &v in vs {
                comp_of[v] = c;
            }
        }
        let bscc = comps
            .iter()
            .enumerate()
            .map(|(c, vs)| vs.iter().all(|&v| self.successors(v).all(|d| comp_of[d] == c)))
            .collect();
        SccDecomposition { components: comps, bscc, comp_of }
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.scc_decompose().components.len() == 1
    }

    /// The subgame induced by `keep` (edges leaving `keep` are dropped).
    pub fn induced(&self, keep: &[usize], objective: ObjectiveKind) -> Result<(Arena, Vec<usize>)> {
        let mut map = vec![usize::MAX; self.n()];
        let mut b = ArenaBuilder::new(objective).tiebreak(self.tiebreak);
        for &v in keep {
            let vx = &self.vertices[v];
            map[v] = b.add_vertex(&vx.name, vx.parity, None)?;
        }
        for e in &self.edges {
            if map[e.src] != usize::MAX && map[e.dst] != usize::MAX {
                b.add_edge(map[e.src], map[e.dst], e.weight.clone(), Some(e.id.clone()));
            }
        }
        Ok((b.build()?, keep.to_vec()))
    }

    /// Serializes to the game-file format; `load_arena` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut s = format!("objective {}\n", self.objective.keyword());
        if self.tiebreak != TieRule::default() {
            s += &format!("tiebreak {}\n", self.tiebreak.keyword());
        }
        for v in &self.vertices {
            s += &format!("vertex {}", v.name);
            if v.parity != 0 {
                s += &format!(" parity={}", v.parity);
            }
            if let Some(p) = v.target {
                s += &format!(" target={}", p.number());
            }
            s.push('\n');
        }
        for e in &self.edges {
            s += &format!("edge {} {}", self.vertices[e.src].name, self.vertices[e.dst].name);
            if !e.weight.is_zero() {
                s += &format!(" weight={}", fmt_q(&e.weight));
            }
            s += &format!(" id={}\n", e.id);
        }
        s
    }
}

/// `base`, or `base` with primes appended until it avoids `taken`.
pub fn fresh_name(taken: &HashSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Components in reverse topological order plus bottom-component flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    pub components: Vec<Vec<usize>>,
    pub bscc: Vec<bool>,
    pub comp_of: Vec<usize>,
}

impl SccDecomposition {
    pub fn bottom(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.components.iter().zip(&self.bscc).filter(|(_, &b)| b).map(|(c, _)| c)
    }
}

/// Iterative Tarjan; components come out sinks-first, each sorted.
pub fn tarjan(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let adj: Vec<Vec<usize>> = (0..n).map(&succ).collect();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = vec![];
    let mut comps = vec![];
    let mut next = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = vec![];
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Parses and validates a game file.
pub fn load_arena(text: &str) -> Result<Arena> {
    let mut objective = None;
    let mut tiebreak = None;
    let mut b: Option<ArenaBuilder> = None;
    let mut vertex_weights: Vec<(usize, Q)> = vec![];
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "objective" => {
                if objective.is_some() {
                    return Err(perr(line, "objective given twice".into()));
                }
                let kind = toks
                    .get(1)
                    .and_then(|s| ObjectiveKind::parse(s))
                    .ok_or_else(|| perr(line, "expected objective richman|reachability|parity|meanpayoff".into()))?;
                if toks.len() > 2 {
                    return Err(perr(line, "trailing tokens after objective".into()));
                }
                objective = Some(kind);
                let mut nb = ArenaBuilder::new(kind);
                if let Some(t) = tiebreak {
                    nb.set_tiebreak(t);
                }
                b = Some(nb);
            }
            "tiebreak" => {
                let t = toks
                    .get(1)
                    .and_then(|s| TieRule::parse(s))
                    .ok_or_else(|| perr(line, "expected tiebreak player1|player2|alternate=1|alternate=2".into()))?;
                if toks.len() > 2 {
                    return Err(perr(line, "trailing tokens after tiebreak".into()));
                }
                tiebreak = Some(t);
                if let Some(nb) = b.as_mut() {
                    nb.set_tiebreak(t);
                }
            }
            "vertex" => {
                let nb = b.as_mut().ok_or_else(|| perr(line, "vertex before objective".into()))?;
                let name = toks.get(1).ok_or_else(|| perr(line, "vertex needs a name".into()))?;
                let (mut parity, mut target, mut weight) = (0u32, None, None);
                for kv in &toks[2..] {
                    let (k, v) = kv.split_once('=').ok_or_else(|| perr(line, format!("expected key=value, got {kv}")))?;
                    match k {
                        "parity" => parity = v.parse().map_err(|_| perr(line, format!("bad parity {v}")))?,
                        "target" => {
                            let p = v.parse::<u8>().ok().and_then(Player::from_number);
                            target = Some(p.ok_or_else(|| perr(line, format!("bad target {v}")))?)
                        }
                        "weight" => weight = Some(parse_q(v).ok_or_else(|| perr(line, format!("bad rational {v}")))?),
                        _ => return Err(perr(line, format!("unknown vertex attribute {k}"))),
                    }
                }
                let id = nb.add_vertex(name, parity, target).map_err(|e| perr(line, e.to_string()))?;
                if let Some(w) = weight {
                    vertex_weights.push((id, w));
                }
            }
            "edge" => {
                let nb = b.as_mut().ok_or_else(|| perr(line, "edge before objective".into()))?;
                if toks.len() < 3 {
                    return Err(perr(line, "edge needs a source and a destination".into()));
                }
                let s = nb.lookup(toks[1]).ok_or_else(|| perr(line, format!("unknown vertex {}", toks[1])))?;
                let d = nb.lookup(toks[2]).ok_or_else(|| perr(line, format!("unknown vertex {}", toks[2])))?;
                let (mut weight, mut id) = (Q::zero(), None);
                for kv in &toks[3..] {
                    let (k, v) = kv.split_once('=').ok_or_else(|| perr(line, format!("expected key=value, got {kv}")))?;
                    match k {
                        "weight" => weight = parse_q(v).ok_or_else(|| perr(line, format!("bad rational {v}")))?,
                        "id" => id = Some(v.to_string()),
                        _ => return Err(perr(line, format!("unknown edge attribute {k}"))),
                    }
                }
                nb.add_edge(s, d, weight, id);
            }
            other => return Err(perr(line, format!("unknown directive {other}"))),
        }
    }
    let mut nb = b.ok_or_else(|| perr(0, "missing objective line".into()))?;
    for (v, w) in vertex_weights {
        for e in nb.edges.iter_mut().filter(|e| e.0 == v) {
            e.2 = e.2.clone() + w.clone();
        }
    }
    nb.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qi;

    const DETOUR_REACH: &str = "objective reachability\nvertex v0\nvertex v1\nvertex v2\nvertex t target=1\n\
        edge v0 v1\nedge v0 v2\nedge v2 v0\nedge v2 t\n";

    #[test]
    fn loads_reachability_fixture() {
        let a = load_arena(DETOUR_REACH).unwrap();
        assert_eq!(a.n(), 4);
        assert_eq!(a.edges().len(), 4);
        assert_eq!(a.targets(), vec![3]);
    }

    #[test]
    fn two_loop_parallel_edges() {
        let a = load_arena("objective meanpayoff\nvertex u\nedge u u weight=1\nedge u u weight=-1\n").unwrap();
        assert_eq!(a.n(), 1);
        assert_eq!(a.out(0).len(), 2);
        assert_ne!(a.edge(0).id, a.edge(1).id);
    }

    #[test]
    fn dead_end_rejected_in_meanpayoff() {
        let e = load_arena("objective meanpayoff\nvertex a\nvertex b\nedge a b\n").unwrap_err();
        assert!(matches!(e, Error::Validation(ref m) if m.contains("dead-end")), "{e}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = load_arena("objective parity\nvertex a\nedge a b\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, msg: "unknown vertex b".into() });
    }

    #[test]
    fn vertex_weight_moves_to_edges() {
        let a = load_arena("objective meanpayoff\nvertex a weight=2\nvertex b\nedge a b weight=1/2\nedge b a\n").unwrap();
        assert_eq!(a.edge(0).weight, crate::num::q(5, 2));
        assert_eq!(a.edge(1).weight, qi(0));
    }

    #[test]
    fn scc_of_detour_reach() {
        let a = load_arena(DETOUR_REACH).unwrap();
        let d = a.scc_decompose();
        let mut comps: Vec<(Vec<usize>, bool)> = d.components.iter().cloned().zip(d.bscc.iter().copied()).collect();
        comps.sort();
        assert_eq!(comps, vec![(vec![0, 2], false), (vec![1], true), (vec![3], true)]);
        assert_eq!(a.unreachable_from_target(&[3]), vec![1]);
    }

    #[test]
    fn dag_components() {
        let a = load_arena("objective reachability\nvertex a\nvertex b\nvertex c target=1\nedge a b\nedge b c\n").unwrap();
        let d = a.scc_decompose();
        assert_eq!(d.components, vec![vec![2], vec![1], vec![0]]);
        assert_eq!(d.bscc, vec![true, false, false]);
    }

    #[test]
    fn round_trip() {
        let src = "objective parity\ntiebreak alternate=2\nvertex a parity=3\nvertex b\nedge a b id=x\nedge b a weight=-7/3\nedge b b\n";
        let a = load_arena(src).unwrap();
        let b = load_arena(&a.to_text()).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.tiebreak, TieRule::Alternate(Player::Two));
    }

    #[test]
    fn tie_rules() {
        assert_eq!(TieRule::Alternate(Player::Two).winner(0), Player::Two);
        assert_eq!(TieRule::Alternate(Player::Two).winner(1), Player::One);
        assert_eq!(TieRule::Player2Wins.winner(5), Player::Two);
    }
}
