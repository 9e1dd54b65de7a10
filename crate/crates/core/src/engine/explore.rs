//! State-graph construction, computation enumeration, sampling and replay.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EngineError, Machine, Outcome, Step, SystemState};
use crate::lang::System;

pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Limits {
    pub const DEFAULT_MAX_STATES: usize = 1_000_000;
    pub const DEFAULT_MAX_DEPTH: usize = 10_000;
    pub const DEFAULT_COMPUTATION_CAP: usize = 100_000;
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: Self::DEFAULT_MAX_STATES,
            max_depth: Self::DEFAULT_MAX_DEPTH,
        }
    }
}

/// A complete explored transition system. Construction fails rather than
/// return a partial graph.
#[derive(Debug)]
pub struct StateGraph {
    machine: Arc<Machine>,
    states: Vec<SystemState>,
    succ: Vec<Vec<(u32, u32)>>,
    labels: Vec<Step>,
    terminal: Vec<Option<Outcome>>,
    topo: Option<Vec<StateId>>,
    depth: usize,
}

impl StateGraph {
    pub fn machine(&self) -> &Machine {
        &self.machine
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: StateId) -> &SystemState {
        &self.states[id]
    }

    /// Distinct step labels; transitions refer to them by index.
    pub fn labels(&self) -> &[Step] {
        &self.labels
    }

    /// Outgoing transitions as `(label index, target)`.
    pub fn edges(&self, id: StateId) -> impl Iterator<Item = (usize, StateId)> + '_ {
        self.succ[id].iter().map(|&(l, t)| (l as usize, t as usize))
    }

    pub fn successors(&self, id: StateId) -> impl Iterator<Item = (&Step, StateId)> + '_ {
        self.edges(id).map(|(l, t)| (&self.labels[l], t))
    }

    pub fn transition_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn terminal(&self, id: StateId) -> Option<Outcome> {
        self.terminal[id]
    }

    pub fn terminals(&self) -> impl Iterator<Item = (StateId, Outcome)> + '_ {
        self.terminal
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (i, t)))
    }

    pub fn outcome_counts(&self) -> BTreeMap<Outcome, usize> {
        let mut m = BTreeMap::new();
        for (_, t) in self.terminals() {
            *m.entry(t).or_insert(0) += 1;
        }
        m
    }

    /// Whether some computation is infinite.
    pub fn is_cyclic(&self) -> bool {
        self.topo.is_none()
    }

    /// States in topological order, if the graph is acyclic.
    pub fn topological_order(&self) -> Option<&[StateId]> {
        self.topo.as_deref()
    }

    /// Length of the longest shortest path from the initial state.
    pub fn depth(&self) -> usize {
        self.depth
    }
}

fn topological(succ: &[Vec<(u32, u32)>]) -> Option<Vec<StateId>> {
    let mut indeg = vec![0usize; succ.len()];
    for out in succ {
        for &(_, t) in out {
            indeg[t as usize] += 1;
        }
    }
    let mut ready: Vec<StateId> = (0..succ.len()).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(succ.len());
    while let Some(s) = ready.pop() {
        order.push(s);
        for &(_, t) in &succ[s] {
            indeg[t as usize] -= 1;
            if indeg[t as usize] == 0 {
                ready.push(t as usize);
            }
        }
    }
    (order.len() == succ.len()).then_some(order)
}

/// Breadth-first exploration of every reachable state.
pub fn explore(sys: &System, limits: Limits) -> Result<StateGraph, EngineError> {
    let machine = Arc::new(Machine::new(sys)?);
    explore_machine(machine, limits)
}

pub(crate) fn explore_machine(
    machine: Arc<Machine>,
    limits: Limits,
) -> Result<StateGraph, EngineError> {
    let init = machine.initial();
    let mut index: HashMap<SystemState, u32> = HashMap::new();
    let mut label_index: HashMap<Step, u32> = HashMap::new();
    let mut labels = Vec::new();
    let mut states = vec![init.clone()];
    let mut depths = vec![0usize];
    let mut succ: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
    let mut terminal = vec![None];
    index.insert(init, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut max_depth = 0;
    while let Some(id) = queue.pop_front() {
        let next = machine.successors(&states[id]);
        if next.is_empty() {
            terminal[id] = Some(machine.classify(&states[id]));
            continue;
        }
        let d = depths[id];
        if d >= limits.max_depth {
            return Err(EngineError::LimitExceeded {
                states: states.len(),
                depth: d,
                frontier: queue.len() + 1,
            });
        }
        let mut out = Vec::with_capacity(next.len());
        for (step, s) in next {
            let l = *label_index.entry(step.clone()).or_insert_with(|| {
                labels.push(step);
                (labels.len() - 1) as u32
            });
            let t = match index.get(&s) {
                Some(&t) => t,
                None => {
                    if states.len() >= limits.max_states {
                        return Err(EngineError::LimitExceeded {
                            states: states.len(),
                            depth: d + 1,
                            frontier: queue.len() + 1,
                        });
                    }
                    let t = states.len() as u32;
                    index.insert(s.clone(), t);
                    states.push(s);
                    depths.push(d + 1);
                    max_depth = max_depth.max(d + 1);
                    succ.push(Vec::new());
                    terminal.push(None);
                    queue.push_back(t as usize);
                    t
                }
            };
            out.push((l, t));
        }
        succ[id] = out;
    }
    let topo = topological(&succ);
    Ok(StateGraph {
        machine,
        states,
        succ,
        labels,
        terminal,
        topo,
        depth: max_depth,
    })
}

/// A maximal (or truncated) sequence of steps from the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Computation {
    pub steps: Vec<Step>,
    pub outcome: Outcome,
}

impl Computation {
    pub fn rename(&self, p: &crate::graph::Permutation) -> Computation {
        Computation {
            steps: self.steps.iter().map(|s| s.rename(p)).collect(),
            outcome: self.outcome,
        }
    }
}

/// Every maximal path of an acyclic graph, in depth-first order.
pub fn computations(g: &StateGraph, cap: usize) -> Result<Vec<Computation>, EngineError> {
    if g.is_cyclic() {
        return Err(EngineError::Divergent);
    }
    let mut out = Vec::new();
    let mut path: Vec<Step> = Vec::new();
    // (state, next edge to try)
    let mut stack = vec![(g.initial(), 0usize)];
    while let Some(top) = stack.last_mut() {
        let s = top.0;
        if let Some(outcome) = g.terminal(s) {
            if out.len() >= cap {
                return Err(EngineError::CapExceeded { cap });
            }
            out.push(Computation {
                steps: path.clone(),
                outcome,
            });
            stack.pop();
            path.pop();
            continue;
        }
        if top.1 < g.succ[s].len() {
            let (l, t) = g.succ[s][top.1];
            top.1 += 1;
            path.push(g.labels[l as usize].clone());
            stack.push((t as usize, 0));
        } else {
            stack.pop();
            path.pop();
        }
    }
    Ok(out)
}

/// One run choosing uniformly among enabled steps with a seeded generator.
pub fn random_run(sys: &System, seed: u64, max_steps: usize) -> Result<Computation, EngineError> {
    let m = Machine::new(sys)?;
    Ok(random_run_machine(&m, seed, max_steps))
}

pub(crate) fn random_run_machine(m: &Machine, seed: u64, max_steps: usize) -> Computation {
    sample_run(m, seed, max_steps).0
}

/// Like [`random_run`] on a compiled machine, also returning the last
/// state. Step labels do not name the branch taken, so the state cannot
/// always be recovered from the steps alone.
pub fn sample_run(m: &Machine, seed: u64, max_steps: usize) -> (Computation, SystemState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = m.initial();
    let mut steps = Vec::new();
    loop {
        let mut next = m.successors(&s);
        if next.is_empty() {
            let outcome = m.classify(&s);
            return (Computation { steps, outcome }, s);
        }
        if steps.len() >= max_steps {
            return (
                Computation {
                    steps,
                    outcome: Outcome::Truncated,
                },
                s,
            );
        }
        let (step, t) = next.swap_remove(rng.gen_range(0..next.len()));
        steps.push(step);
        s = t;
    }
}

/// Checks that `steps` is a computation of the system and returns its
/// classification.
pub fn replay(m: &Machine, steps: &[Step]) -> Result<Computation, EngineError> {
    let mut current: HashSet<SystemState> = HashSet::from([m.initial()]);
    for (i, step) in steps.iter().enumerate() {
        let next: HashSet<SystemState> = current
            .iter()
            .flat_map(|s| m.successors(s))
            .filter(|(st, _)| st == step)
            .map(|(_, t)| t)
            .collect();
        if next.is_empty() {
            return Err(EngineError::NotEnabled {
                index: i + 1,
                step: step.to_string(),
            });
        }
        current = next;
    }
    let mut ends: Vec<Outcome> = current
        .iter()
        .filter(|s| m.successors(s).is_empty())
        .map(|s| m.classify(s))
        .collect();
    ends.sort();
    match ends.first() {
        Some(&outcome) => Ok(Computation {
            steps: steps.to_vec(),
            outcome,
        }),
        None => {
            let s = current.iter().next().expect("nonempty");
            let more = m.successors(s);
            Err(EngineError::NotMaximal(format!(
                "{} more step(s) enabled, e.g. {}",
                more.len(),
                more[0].0
            )))
        }
    }
}

/// One line per step: `<idx> <kind> <vertex[,vertex]> <detail>`.
pub fn render_trace(steps: &[Step]) -> String {
    let mut out = String::new();
    for (i, s) in steps.iter().enumerate() {
        let _ = writeln!(out, "{} {s}", i + 1);
    }
    out
}

/// Vertex/edge listing of a state graph for debugging.
pub fn render_state_graph(g: &StateGraph) -> String {
    let mut out = String::new();
    for id in 0..g.len() {
        let tag = match g.terminal(id) {
            Some(t) => t.to_string(),
            None if id == g.initial() => "initial".into(),
            None => "inner".into(),
        };
        let _ = writeln!(out, "state {id} {tag}");
        for line in g.machine.describe(g.state(id)).lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    for id in 0..g.len() {
        for (step, t) in g.successors(id) {
            let _ = writeln!(out, "edge {id} -> {t} {step}");
        }
    }
    out
}
