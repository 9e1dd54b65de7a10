//! Operational semantics and exhaustive exploration of systems.
//!
//! Steps follow a fixed granularity: every arrival at a selection or
//! repetition costs one atomic guard-evaluation step, a repetition whose
//! guards are all closed exits within that same step, and a rendezvous is a
//! single joint step of sender and receiver.

mod explore;
mod machine;

use std::fmt;

use thiserror::Error;

use crate::graph::{Permutation, Vertex};
use crate::lang::Value;

pub use explore::{
    computations, explore, random_run, render_state_graph, render_trace, replay, sample_run,
    Computation, Limits, StateGraph, StateId,
};
pub use machine::{apply_step, enabled_steps, Machine, SystemState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("system is not admitted by its network: {0}")]
    NotAdmitted(String),
    #[error("process {vertex}: {message}")]
    Compile { vertex: Vertex, message: String },
    #[error(
        "limit exceeded after {states} states (depth {depth}, frontier {frontier}); \
         the state graph is incomplete"
    )]
    LimitExceeded {
        states: usize,
        depth: usize,
        frontier: usize,
    },
    #[error("state graph has a cycle: divergent computations exist")]
    Divergent,
    #[error("more than {cap} computations")]
    CapExceeded { cap: usize },
    #[error("step {index} ({step}) is not enabled")]
    NotEnabled { index: usize, step: String },
    #[error("replayed sequence is not maximal: {0}")]
    NotMaximal(String),
}

/// A variable as it appears in step labels: `x` or `sync[P1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName {
    pub name: String,
    pub index: Option<Vertex>,
}

impl VarName {
    pub fn plain(name: &str) -> Self {
        VarName {
            name: name.to_string(),
            index: None,
        }
    }

    pub fn indexed(name: &str, index: &str) -> Self {
        VarName {
            name: name.to_string(),
            index: Some(Vertex::new(index)),
        }
    }

    fn rename(&self, p: &Permutation) -> Self {
        VarName {
            name: self.name.clone(),
            index: self.index.as_ref().map(|v| rename_vertex(v, p)),
        }
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.index {
            Some(i) => write!(f, "{}[{i}]", self.name),
            None => f.write_str(&self.name),
        }
    }
}

/// What a guard looks like from outside: its communication partner and
/// direction, never its position in the program text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GuardKind {
    Local,
    Send(Vertex),
    Recv(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardSig {
    pub kind: GuardKind,
    pub open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FailReason {
    AllGuardsClosed,
    Undefined(VarName),
    TypeError,
    Overflow,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::AllGuardsClosed => f.write_str("all guards closed"),
            FailReason::Undefined(v) => write!(f, "undefined variable {v}"),
            FailReason::TypeError => f.write_str("type error"),
            FailReason::Overflow => f.write_str("integer out of range"),
        }
    }
}

/// An observable computation step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Assign {
        vertex: Vertex,
        var: VarName,
        value: Value,
    },
    /// Entering the body of an open guard without communication.
    Select {
        vertex: Vertex,
    },
    Fail {
        vertex: Vertex,
        reason: FailReason,
    },
    Comm {
        sender: Vertex,
        receiver: Vertex,
        value: Value,
        var: VarName,
    },
    /// Atomic evaluation of all boolean guards; `exit` when a repetition
    /// finds them all closed and terminates in the same step.
    Guards {
        vertex: Vertex,
        pattern: Vec<GuardSig>,
        exit: bool,
    },
}

fn rename_vertex(v: &Vertex, p: &Permutation) -> Vertex {
    p.get(v.as_str()).cloned().unwrap_or_else(|| v.clone())
}

/// Maps names of processes occurring in a value; other atoms and integers
/// are left alone.
pub fn rename_value(v: &Value, p: &Permutation) -> Value {
    match v {
        Value::Atom(a) => Value::Atom(rename_vertex(a, p)),
        Value::Tagged(t, a) => Value::Tagged(t.clone(), rename_vertex(a, p)),
        other => other.clone(),
    }
}

impl Step {
    /// The acting processes, sender first for communications.
    pub fn actors(&self) -> Vec<&Vertex> {
        match self {
            Step::Comm {
                sender, receiver, ..
            } => vec![sender, receiver],
            Step::Assign { vertex, .. }
            | Step::Select { vertex }
            | Step::Fail { vertex, .. }
            | Step::Guards { vertex, .. } => vec![vertex],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Step::Assign { .. } => "assign",
            Step::Select { .. } => "select",
            Step::Fail { .. } => "fail",
            Step::Comm { .. } => "comm",
            Step::Guards { exit: false, .. } => "guards",
            Step::Guards { exit: true, .. } => "exit",
        }
    }

    /// Whether this is a direct communication between `a` and `b`, in either
    /// direction.
    pub fn links(&self, a: &Vertex, b: &Vertex) -> bool {
        matches!(self, Step::Comm { sender, receiver, .. }
            if (sender == a && receiver == b) || (sender == b && receiver == a))
    }

    pub fn rename(&self, p: &Permutation) -> Step {
        let r = |v: &Vertex| rename_vertex(v, p);
        match self {
            Step::Assign { vertex, var, value } => Step::Assign {
                vertex: r(vertex),
                var: var.rename(p),
                value: rename_value(value, p),
            },
            Step::Select { vertex } => Step::Select { vertex: r(vertex) },
            Step::Fail { vertex, reason } => Step::Fail {
                vertex: r(vertex),
                reason: match reason {
                    FailReason::Undefined(v) => FailReason::Undefined(v.rename(p)),
                    other => other.clone(),
                },
            },
            Step::Comm {
                sender,
                receiver,
                value,
                var,
            } => Step::Comm {
                sender: r(sender),
                receiver: r(receiver),
                value: rename_value(value, p),
                var: var.rename(p),
            },
            Step::Guards {
                vertex,
                pattern,
                exit,
            } => {
                let mut pattern: Vec<GuardSig> = pattern
                    .iter()
                    .map(|g| GuardSig {
                        kind: match &g.kind {
                            GuardKind::Local => GuardKind::Local,
                            GuardKind::Send(w) => GuardKind::Send(r(w)),
                            GuardKind::Recv(w) => GuardKind::Recv(r(w)),
                        },
                        open: g.open,
                    })
                    .collect();
                pattern.sort();
                Step::Guards {
                    vertex: r(vertex),
                    pattern,
                    exit: *exit,
                }
            }
        }
    }
}

impl fmt::Display for Step {
    /// `<kind> <vertex[,vertex]> <detail>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let actors: Vec<String> = self.actors().iter().map(|v| v.to_string()).collect();
        write!(f, "{} {}", self.kind(), actors.join(","))?;
        match self {
            Step::Assign { var, value, .. } => write!(f, " {var} := {value}"),
            Step::Select { .. } => Ok(()),
            Step::Fail { reason, .. } => write!(f, " {reason}"),
            Step::Comm {
                sender,
                receiver,
                value,
                var,
            } => write!(f, " {value} from {sender} into {receiver}.{var}"),
            Step::Guards { pattern, .. } => {
                let open = pattern.iter().filter(|g| g.open).count();
                write!(f, " open={open} closed={}", pattern.len() - open)
            }
        }
    }
}

/// How a finite computation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    ProperlyTerminated,
    Deadlocked,
    Failed,
    /// A sampled run that hit its step budget.
    Truncated,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::ProperlyTerminated => "properly-terminated",
            Outcome::Deadlocked => "deadlocked",
            Outcome::Failed => "failed",
            Outcome::Truncated => "truncated",
        })
    }
}
