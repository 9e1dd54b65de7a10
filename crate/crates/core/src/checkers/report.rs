//! Property reports: verdict, witnesses, statistics and their renderings.

use std::fmt::{self, Write as _};

use crate::engine::{render_trace, Computation, Limits, StateGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    /// Exploration was incomplete or the graph has infinite computations.
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub terminals: usize,
    /// Number of maximal computations of an acyclic graph (saturating).
    pub computations: Option<u128>,
    /// Number of sampled runs; set only by sampling checks, which have no
    /// state graph.
    pub runs: Option<usize>,
}

impl Stats {
    pub fn of(g: &StateGraph) -> Self {
        Stats {
            states: g.len(),
            transitions: g.transition_count(),
            terminals: g.terminals().count(),
            computations: super::count_computations(g),
            runs: None,
        }
    }
}

/// Evidence for a failing verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub description: String,
    pub computation: Option<Computation>,
}

impl Witness {
    pub fn computation(description: String, c: Computation) -> Self {
        Witness {
            description,
            computation: Some(c),
        }
    }

    pub fn plain(description: String) -> Self {
        Witness {
            description,
            computation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: &'static str,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub stats: Stats,
    pub notes: Vec<String>,
}

impl PropertyReport {
    pub fn new(property: &'static str, verdict: Verdict, stats: Stats) -> Self {
        PropertyReport {
            property,
            verdict,
            witnesses: Vec::new(),
            stats,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Machine-readable `key=value` lines.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "property={}", self.property);
        let _ = writeln!(out, "verdict={}", self.verdict);
        let s = &self.stats;
        if let Some(r) = s.runs {
            let _ = writeln!(out, "runs={r}");
        } else {
            let _ = writeln!(out, "states={}", s.states);
            let _ = writeln!(out, "transitions={}", s.transitions);
            let _ = writeln!(out, "terminals={}", s.terminals);
            if let Some(c) = s.computations {
                let _ = writeln!(out, "computations={c}");
            }
        }
        let _ = writeln!(out, "witnesses={}", self.witnesses.len());
        if !self.witnesses.is_empty() {
            let _ = writeln!(out, "witness_index=1");
        }
        out
    }

    /// Human-readable report with the limits in the header and every
    /// witness trace.
    pub fn render(&self, limits: Limits, cap: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} (max_states={} max_depth={} computation_cap={cap})",
            self.property, limits.max_states, limits.max_depth
        );
        let _ = writeln!(out, "verdict: {}", self.verdict);
        let s = &self.stats;
        if let Some(r) = s.runs {
            let _ = writeln!(out, "runs: {r}");
        } else {
            let _ = write!(
                out,
                "states: {}  transitions: {}  terminals: {}",
                s.states, s.transitions, s.terminals
            );
            if let Some(c) = s.computations {
                let _ = write!(out, "  computations: {c}");
            }
            out.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        for (i, w) in self.witnesses.iter().enumerate() {
            let _ = writeln!(out, "witness {}: {}", i + 1, w.description);
            if let Some(c) = &w.computation {
                for line in render_trace(&c.steps).lines() {
                    let _ = writeln!(out, "  {line}");
                }
                let _ = writeln!(out, "  outcome: {}", c.outcome);
            }
        }
        out
    }
}
