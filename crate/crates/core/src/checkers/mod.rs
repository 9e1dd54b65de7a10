//! System-level properties decided over explored state graphs: pairwise
//! synchronization, electoral systems and semantic symmetry.
//!
//! Every checker explores first. An exploration that hits a limit, or a
//! graph with a cycle, yields `unknown`; pass and fail are only reported
//! on complete acyclic graphs.

mod report;
mod sample;

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::engine::{
    explore, Computation, EngineError, Limits, StateGraph, StateId, Step, VarName,
};
use crate::graph::{Permutation, Vertex};
use crate::lang::{System, Value};

pub use report::{PropertyReport, Stats, Verdict, Witness};
pub use sample::{sample_check, SampleSpec};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Engine(EngineError),
}

/// Explores `sys`, turning a limit overrun into `Ok(Err(report))` with an
/// `unknown` verdict.
fn explore_or_unknown(
    property: &'static str,
    sys: &System,
    limits: Limits,
) -> Result<Result<StateGraph, PropertyReport>, CheckError> {
    match explore(sys, limits) {
        Ok(g) => Ok(Ok(g)),
        Err(e @ EngineError::LimitExceeded { .. }) => {
            let mut r = PropertyReport::new(property, Verdict::Unknown, Stats::default());
            r.notes.push(e.to_string());
            Ok(Err(r))
        }
        Err(e) => Err(CheckError::Engine(e)),
    }
}

fn cyclic_unknown(property: &'static str, g: &StateGraph) -> PropertyReport {
    let mut r = PropertyReport::new(property, Verdict::Unknown, Stats::of(g));
    r.notes
        .push("state graph has a cycle: some computations are infinite".into());
    r
}

/// Number of maximal paths of an acyclic graph, saturating.
pub fn count_computations(g: &StateGraph) -> Option<u128> {
    let order = g.topological_order()?;
    let mut paths = vec![0u128; g.len()];
    for &s in order.iter().rev() {
        paths[s] = if g.terminal(s).is_some() {
            1
        } else {
            g.edges(s)
                .fold(0u128, |acc, (_, t)| acc.saturating_add(paths[t]))
        };
    }
    Some(paths[g.initial()])
}

/// Predecessor lists as `(source, label)`.
fn predecessors(g: &StateGraph) -> Vec<Vec<(StateId, usize)>> {
    let mut pred = vec![Vec::new(); g.len()];
    for s in 0..g.len() {
        for (l, t) in g.edges(s) {
            pred[t].push((s, l));
        }
    }
    pred
}

/// Shortest path from the initial state to `target` followed by the
/// first-edge continuation to a terminal state.
fn path_through(g: &StateGraph, target: StateId) -> Computation {
    let mut parent: Vec<Option<(StateId, usize)>> = vec![None; g.len()];
    let mut seen = vec![false; g.len()];
    seen[g.initial()] = true;
    let mut queue = VecDeque::from([g.initial()]);
    while let Some(s) = queue.pop_front() {
        if s == target {
            break;
        }
        for (l, t) in g.edges(s) {
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some((s, l));
                queue.push_back(t);
            }
        }
    }
    let mut labels = Vec::new();
    let mut s = target;
    while let Some((p, l)) = parent[s] {
        labels.push(l);
        s = p;
    }
    labels.reverse();
    let mut s = target;
    while g.terminal(s).is_none() {
        let (l, t) = g
            .edges(s)
            .next()
            .expect("non-terminal states have successors");
        labels.push(l);
        s = t;
    }
    Computation {
        steps: labels.into_iter().map(|l| g.labels()[l].clone()).collect(),
        outcome: g.terminal(s).expect("terminal"),
    }
}

/// Unordered pairs `a < b` of `q`.
pub fn pairs_of(q: &BTreeSet<Vertex>) -> Vec<(Vertex, Vertex)> {
    let v: Vec<&Vertex> = q.iter().collect();
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            out.push((v[i].clone(), v[j].clone()));
        }
    }
    out
}

struct Bits {
    words: usize,
    data: Vec<u64>,
}

impl Bits {
    fn new(states: usize, bits: usize) -> Self {
        let words = bits.div_ceil(64).max(1);
        Bits {
            words,
            data: vec![0; states * words],
        }
    }

    fn row(&self, s: usize) -> &[u64] {
        &self.data[s * self.words..(s + 1) * self.words]
    }

    fn get(&self, s: usize, bit: usize) -> bool {
        self.row(s)[bit / 64] >> (bit % 64) & 1 == 1
    }
}

fn link_mask(step: &Step, pairs: &[(Vertex, Vertex)], words: usize) -> Vec<u64> {
    let mut m = vec![0u64; words];
    for (i, (a, b)) in pairs.iter().enumerate() {
        if step.links(a, b) {
            m[i / 64] |= 1 << (i % 64);
        }
    }
    m
}

/// Pairs of `q` missed by some computation of `g`, with one witness
/// computation per missed pair. Propagates, in topological order, the set
/// of pairs that some path from the initial state has not yet covered.
pub fn uncovered_pairs(
    g: &StateGraph,
    pairs: &[(Vertex, Vertex)],
) -> Option<Vec<((Vertex, Vertex), Computation)>> {
    let order = g.topological_order()?;
    let mut open = Bits::new(g.len(), pairs.len());
    let w = open.words;
    let masks: Vec<Vec<u64>> = g.labels().iter().map(|s| link_mask(s, pairs, w)).collect();
    for i in 0..pairs.len() {
        open.data[g.initial() * w + i / 64] |= 1 << (i % 64);
    }
    for &s in order {
        let row: Vec<u64> = open.row(s).to_vec();
        for (l, t) in g.edges(s) {
            for k in 0..w {
                open.data[t * w + k] |= row[k] & !masks[l][k];
            }
        }
    }
    let pred = predecessors(g);
    let mut out = Vec::new();
    for (i, pair) in pairs.iter().enumerate() {
        let Some((end, outcome)) = g.terminals().find(|(t, _)| open.get(*t, i)) else {
            continue;
        };
        let mut labels = Vec::new();
        let mut s = end;
        while s != g.initial() {
            let &(p, l) = pred[s]
                .iter()
                .find(|(p, l)| open.get(*p, i) && masks[*l][i / 64] >> (i % 64) & 1 == 0)
                .expect("an uncovered state has an uncovered predecessor");
            labels.push(l);
            s = p;
        }
        labels.reverse();
        out.push((
            pair.clone(),
            Computation {
                steps: labels.into_iter().map(|l| g.labels()[l].clone()).collect(),
                outcome,
            },
        ));
    }
    Some(out)
}

fn improper_terminal(g: &StateGraph) -> Option<StateId> {
    g.terminals()
        .find(|(_, o)| *o != crate::engine::Outcome::ProperlyTerminated)
        .map(|(s, _)| s)
}

/// Pairwise synchronization of `q` on an explored graph.
pub fn pairwise_sync_on(g: &StateGraph, q: &BTreeSet<Vertex>) -> PropertyReport {
    const NAME: &str = "pairwise-sync";
    if g.is_cyclic() {
        return cyclic_unknown(NAME, g);
    }
    let mut r = PropertyReport::new(NAME, Verdict::Pass, Stats::of(g));
    if let Some(t) = improper_terminal(g) {
        let c = path_through(g, t);
        r.verdict = Verdict::Fail;
        r.witnesses.push(Witness::computation(
            format!("computation ends {}", c.outcome),
            c,
        ));
        return r;
    }
    let pairs = pairs_of(q);
    for ((a, b), c) in uncovered_pairs(g, &pairs).expect("acyclic") {
        r.verdict = Verdict::Fail;
        r.witnesses.push(Witness::computation(
            format!("no direct communication between {a} and {b}"),
            c,
        ));
    }
    r.notes.push(format!("pairs checked: {}", pairs.len()));
    r
}

/// Every maximal computation properly terminates and contains, for each
/// unordered pair of `q`, a direct communication between the two.
pub fn check_pairwise_sync(
    sys: &System,
    q: &BTreeSet<Vertex>,
    limits: Limits,
) -> Result<PropertyReport, CheckError> {
    if let Some(v) = q.iter().find(|v| sys.process(v).is_none()) {
        return Err(CheckError::Precondition(format!(
            "{v} is not a process of the system"
        )));
    }
    Ok(match explore_or_unknown("pairwise-sync", sys, limits)? {
        Ok(g) => pairwise_sync_on(&g, q),
        Err(r) => r,
    })
}

fn leader_var() -> VarName {
    VarName::plain("leader")
}

/// Electoral property on an explored graph.
pub fn electoral_on(g: &StateGraph) -> PropertyReport {
    const NAME: &str = "electoral";
    if g.is_cyclic() {
        return cyclic_unknown(NAME, g);
    }
    let mut r = PropertyReport::new(NAME, Verdict::Pass, Stats::of(g));
    if let Some(t) = improper_terminal(g) {
        let c = path_through(g, t);
        r.verdict = Verdict::Fail;
        r.witnesses.push(Witness::computation(
            format!("computation ends {}", c.outcome),
            c,
        ));
        return r;
    }
    let m = g.machine();
    let vertices: Vec<Vertex> = m.vertices().cloned().collect();
    let mut elected = BTreeSet::new();
    for (t, _) in g.terminals() {
        let values: Vec<(Vertex, Option<Value>)> = vertices
            .iter()
            .map(|v| (v.clone(), m.read(g.state(t), v, &leader_var())))
            .collect();
        let first = &values[0].1;
        let agree = values.iter().all(|(_, x)| x == first);
        let named = matches!(first, Some(Value::Atom(a)) if vertices.contains(a));
        if !(agree && named) {
            let shown: Vec<String> = values
                .iter()
                .map(|(v, x)| match x {
                    Some(x) => format!("{v}:{x}"),
                    None => format!("{v}:undefined"),
                })
                .collect();
            r.verdict = Verdict::Fail;
            r.witnesses.push(Witness::computation(
                format!("terminal leaders {}", shown.join(" ")),
                path_through(g, t),
            ));
            return r;
        }
        elected.insert(first.clone().expect("named"));
    }
    let names: Vec<String> = elected.iter().map(|v| v.to_string()).collect();
    r.notes
        .push(format!("possible leaders: {}", names.join(" ")));
    r
}

/// Every computation properly terminates with all `leader` variables
/// holding the same process name.
pub fn check_electoral(sys: &System, limits: Limits) -> Result<PropertyReport, CheckError> {
    if let Some((v, _)) = sys
        .processes()
        .iter()
        .find(|(_, p)| !p.program.writes("leader"))
    {
        return Err(CheckError::Precondition(format!(
            "process {v} has no variable leader"
        )));
    }
    Ok(match explore_or_unknown("electoral", sys, limits)? {
        Ok(g) => electoral_on(&g),
        Err(r) => r,
    })
}

/// Renames every process name in the computation.
pub fn rename_computation(c: &Computation, p: &Permutation) -> Computation {
    c.rename(p)
}

#[derive(Default)]
struct Interner {
    index: HashMap<Vec<u32>, u32>,
    list: Vec<Vec<u32>>,
}

impl Interner {
    fn intern(&mut self, s: Vec<u32>) -> u32 {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        self.list.push(s.clone());
        let i = (self.list.len() - 1) as u32;
        self.index.insert(s, i);
        i
    }
}

/// A computation whose renaming under `p` is not a computation.
fn unmatched(g: &StateGraph, p: &Permutation, limit: usize) -> Result<Option<Computation>, usize> {
    let index: HashMap<&Step, usize> = g.labels().iter().enumerate().map(|(i, s)| (s, i)).collect();
    let renamed: Vec<Option<usize>> = g
        .labels()
        .iter()
        .map(|s| index.get(&s.rename(p)).copied())
        .collect();
    // Product of a path in g with the set of states its renaming reaches.
    let mut sets = Interner::default();
    let init = (g.initial() as u32, sets.intern(vec![g.initial() as u32]));
    // Product state: (state of g, interned set of renamed states).
    type Node = (u32, u32);
    let mut seen: HashMap<Node, Option<(Node, usize)>> = HashMap::new();
    seen.insert(init, None);
    let mut queue = VecDeque::from([init]);
    let mut bad = None;
    'search: while let Some(node @ (s, set)) = queue.pop_front() {
        let members = sets.list[set as usize].clone();
        if g.terminal(s as usize).is_some() {
            if !members.iter().any(|&m| g.terminal(m as usize).is_some()) {
                bad = Some(node);
                break;
            }
            continue;
        }
        for (l, t) in g.edges(s as usize) {
            let mut next: Vec<u32> = match renamed[l] {
                None => Vec::new(),
                Some(rl) => members
                    .iter()
                    .flat_map(|&m| g.edges(m as usize).filter(move |(x, _)| *x == rl))
                    .map(|(_, u)| u as u32)
                    .collect(),
            };
            next.sort_unstable();
            next.dedup();
            let empty = next.is_empty();
            let child = (t as u32, sets.intern(next));
            if seen.contains_key(&child) {
                continue;
            }
            if seen.len() >= limit {
                return Err(seen.len());
            }
            seen.insert(child, Some((node, l)));
            if empty {
                bad = Some(child);
                break 'search;
            }
            queue.push_back(child);
        }
    }
    let Some(mut node) = bad else {
        return Ok(None);
    };
    let mut labels = Vec::new();
    while let Some(&Some((prev, l))) = seen.get(&node) {
        labels.push(l);
        node = prev;
    }
    labels.reverse();
    // Extend the prefix to a maximal computation.
    let mut s = bad.expect("set").0 as usize;
    while g.terminal(s).is_none() {
        let (l, t) = g.edges(s).next().expect("successor");
        labels.push(l);
        s = t;
    }
    Ok(Some(Computation {
        steps: labels.into_iter().map(|l| g.labels()[l].clone()).collect(),
        outcome: g.terminal(s).expect("terminal"),
    }))
}

/// Symmetry on an explored graph: for every `p` in `group`, the renaming
/// of every computation is a computation. The computation set is finite
/// and renaming is injective, so inclusion already gives equality.
pub fn symmetric_on(g: &StateGraph, group: &[Permutation], limits: Limits) -> PropertyReport {
    const NAME: &str = "symmetric";
    if g.is_cyclic() {
        return cyclic_unknown(NAME, g);
    }
    let mut r = PropertyReport::new(NAME, Verdict::Pass, Stats::of(g));
    for p in group {
        match unmatched(g, p, limits.max_states) {
            Ok(None) => {}
            Ok(Some(c)) => {
                r.verdict = Verdict::Fail;
                let image = c.rename(p);
                r.witnesses.push(Witness::computation(
                    format!(
                        "renaming under {p} is not a computation: {}",
                        first_missing(g, &image)
                    ),
                    c,
                ));
                return r;
            }
            Err(n) => {
                r.verdict = Verdict::Unknown;
                r.notes.push(format!(
                    "inclusion check under {p} exceeded {n} product states"
                ));
                return r;
            }
        }
    }
    r.notes
        .push(format!("permutations checked: {}", group.len()));
    r
}

/// Describes where `c` stops being a computation of `g`.
fn first_missing(g: &StateGraph, c: &Computation) -> String {
    match crate::engine::replay(g.machine(), &c.steps) {
        Err(e) => e.to_string(),
        Ok(_) => "ok".into(),
    }
}

/// Checks that every permutation in `group` is an automorphism of the
/// system's network, then decides symmetry.
pub fn check_symmetric(
    sys: &System,
    group: &[Permutation],
    limits: Limits,
) -> Result<PropertyReport, CheckError> {
    let net = sys.network();
    for p in group {
        if p.domain() != *net.vertices() || !net.is_automorphism(p) {
            return Err(CheckError::Precondition(format!(
                "{p} is not an automorphism of the network"
            )));
        }
    }
    Ok(match explore_or_unknown("symmetric", sys, limits)? {
        Ok(g) => symmetric_on(&g, group, limits),
        Err(r) => r,
    })
}

#[cfg(test)]
mod tests;
