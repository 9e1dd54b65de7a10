//! Seeded random runs for systems too large to explore.

use std::collections::BTreeSet;
use std::ops::Range;

use super::{pairs_of, CheckError, PropertyReport, Stats, Verdict, Witness};
use crate::engine::{sample_run, Machine, Outcome, VarName};
use crate::graph::Vertex;
use crate::lang::{System, Value};

/// What every sampled run must satisfy.
#[derive(Debug, Clone)]
pub struct SampleSpec {
    pub seeds: Range<u64>,
    pub max_steps: usize,
    /// Pairs that each run must cover; none means only termination.
    pub pairs: Option<BTreeSet<Vertex>>,
    /// Require agreeing `leader` variables at the end of each run.
    pub electoral: bool,
}

/// Runs one seeded computation per seed. Fails on the first bad run;
/// passing means every sampled run was fine, which is evidence rather
/// than proof. A run that hits `max_steps` makes the verdict `unknown`
/// unless another run fails.
pub fn sample_check(sys: &System, spec: &SampleSpec) -> Result<PropertyReport, CheckError> {
    let m = Machine::new(sys).map_err(CheckError::Engine)?;
    let pairs = spec.pairs.as_ref().map(pairs_of).unwrap_or_default();
    let vertices: Vec<Vertex> = m.vertices().cloned().collect();
    let stats = Stats {
        runs: Some(spec.seeds.clone().count()),
        ..Stats::default()
    };
    let mut r = PropertyReport::new("sampled", Verdict::Pass, stats);
    let mut truncated = 0;
    let mut leaders = BTreeSet::new();
    for seed in spec.seeds.clone() {
        let (c, end) = sample_run(&m, seed, spec.max_steps);
        match c.outcome {
            Outcome::ProperlyTerminated => {}
            Outcome::Truncated => {
                truncated += 1;
                continue;
            }
            o => {
                r.verdict = Verdict::Fail;
                r.witnesses.push(Witness::computation(
                    format!("seed {seed}: run ends {o}"),
                    c,
                ));
                return Ok(r);
            }
        }
        if let Some((a, b)) = pairs
            .iter()
            .find(|(a, b)| !c.steps.iter().any(|s| s.links(a, b)))
        {
            r.verdict = Verdict::Fail;
            r.witnesses.push(Witness::computation(
                format!("seed {seed}: no direct communication between {a} and {b}"),
                c,
            ));
            return Ok(r);
        }
        if spec.electoral {
            let vals: BTreeSet<Option<Value>> = vertices
                .iter()
                .map(|v| m.read(&end, v, &VarName::plain("leader")))
                .collect();
            let ok = vals.len() == 1
                && matches!(vals.iter().next(), Some(Some(Value::Atom(a))) if vertices.contains(a));
            if !ok {
                r.verdict = Verdict::Fail;
                r.witnesses.push(Witness::computation(
                    format!("seed {seed}: leaders disagree or are not process names"),
                    c,
                ));
                return Ok(r);
            }
            leaders.extend(vals.into_iter().flatten());
        }
    }
    if truncated > 0 {
        r.verdict = Verdict::Unknown;
        r.notes.push(format!(
            "{truncated} run(s) hit the step budget of {}",
            spec.max_steps
        ));
    }
    r.notes.push(format!(
        "sampled {} seeded runs; not exhaustive",
        spec.seeds.clone().count()
    ));
    if !pairs.is_empty() {
        r.notes
            .push(format!("pairs checked per run: {}", pairs.len()));
    }
    if spec.electoral {
        let names: Vec<String> = leaders.iter().map(|v| v.to_string()).collect();
        r.notes
            .push(format!("observed leaders: {}", names.join(" ")));
    }
    Ok(r)
}
