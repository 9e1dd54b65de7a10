use std::collections::{BTreeSet, HashSet};

use super::*;
use crate::engine::{computations, Outcome};
use crate::graph::{automorphisms, Network};
use crate::lang::{instantiate, parse_program, Binding};
use crate::library::{
    gen_asymmetric, gen_buffer_system, gen_sync_io, gen_two_process_deadlock_in,
    gen_two_process_sync_io, knockout_transform, networks,
};

fn set(vs: &[&str]) -> BTreeSet<Vertex> {
    vs.iter().map(|v| Vertex::new(v)).collect()
}

fn all_vertices(sys: &System) -> BTreeSet<Vertex> {
    sys.vertices().cloned().collect()
}

/// Brute-force pairwise synchronization over enumerated computations.
fn sync_oracle(g: &StateGraph, q: &BTreeSet<Vertex>) -> bool {
    let all = computations(g, 10_000).expect("small acyclic system");
    let pairs = pairs_of(q);
    all.iter().all(|c| {
        c.outcome == Outcome::ProperlyTerminated
            && pairs
                .iter()
                .all(|(a, b)| c.steps.iter().any(|s| s.links(a, b)))
    })
}

/// Brute-force symmetry: the renamed computation set equals the original.
fn symmetry_oracle(g: &StateGraph, group: &[Permutation]) -> bool {
    let all: HashSet<Vec<Step>> = computations(g, 10_000)
        .expect("small acyclic system")
        .into_iter()
        .map(|c| c.steps)
        .collect();
    group.iter().all(|p| {
        let renamed: HashSet<Vec<Step>> = all
            .iter()
            .map(|c| c.iter().map(|s| s.rename(p)).collect())
            .collect();
        renamed == all
    })
}

fn two_sided(text_a: &str, text_b: &str) -> System {
    let net = networks::two_process();
    let a = Binding::new(parse_program(text_a).unwrap().into());
    let b = Binding::new(parse_program(text_b).unwrap().into());
    instantiate(
        &net,
        &[(Vertex::new("P0"), a), (Vertex::new("P1"), b)].into(),
    )
    .unwrap()
}

fn broadcast_on_cycle() -> System {
    let net = networks::three_cycle();
    let frags =
        crate::library::spanning_tree_broadcast(&net, &Vertex::new("1"), "v", "self").unwrap();
    let bindings = frags
        .iter()
        .map(|(v, f)| (v.clone(), Binding::new(parse_program(f).unwrap().into())))
        .collect();
    instantiate(&net, &bindings).unwrap()
}

fn corpus() -> Vec<System> {
    let p2 = set(&["P0", "P1"]);
    vec![
        gen_two_process_sync_io().unwrap(),
        gen_two_process_deadlock_in().unwrap(),
        gen_buffer_system().unwrap(),
        gen_asymmetric().unwrap(),
        gen_sync_io(&networks::three_cycle(), true).unwrap(),
        gen_sync_io(&networks::two_process(), true).unwrap(),
        gen_sync_io(&networks::complete(3), true).unwrap(),
        knockout_transform(&gen_two_process_sync_io().unwrap(), &p2).unwrap(),
        two_sided("\"P1\" ! 1", "if [ \"P0\" ? x -> skip [] true -> skip ] fi"),
        two_sided("x := 1", "y := 2"),
        two_sided("\"P1\" ! 1; \"P1\" ? x", "\"P0\" ? x; \"P0\" ! 2"),
        two_sided(
            "if [ \"P1\" ! 1 -> skip [] \"P1\" ? y -> skip ] fi",
            "if [ \"P0\" ! 1 -> skip [] \"P0\" ? y -> skip ] fi",
        ),
        broadcast_on_cycle(),
    ]
}

/// Explored corpus members small enough to enumerate.
fn small_graphs() -> Vec<(System, StateGraph)> {
    let out: Vec<(System, StateGraph)> = corpus()
        .into_iter()
        .map(|s| {
            let g = explore(&s, Limits::default()).unwrap();
            (s, g)
        })
        .filter(|(_, g)| count_computations(g).unwrap() <= 10_000)
        .collect();
    assert!(out.len() >= 8, "only {} small systems", out.len());
    out
}

#[test]
fn bitset_sync_matches_path_enumeration() {
    for (sys, g) in small_graphs() {
        let vs: Vec<Vertex> = sys.vertices().cloned().collect();
        for mask in 0u32..(1 << vs.len()) {
            let q: BTreeSet<Vertex> = vs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| v.clone())
                .collect();
            let r = pairwise_sync_on(&g, &q);
            assert_eq!(r.passed(), sync_oracle(&g, &q), "q={q:?}");
            if r.verdict == Verdict::Fail {
                let w = r.witnesses[0].computation.as_ref().unwrap();
                let replayed = crate::engine::replay(g.machine(), &w.steps).unwrap();
                assert_eq!(replayed.outcome, w.outcome);
            }
        }
    }
}

#[test]
fn subset_construction_matches_enumeration() {
    for (sys, g) in small_graphs() {
        let group = automorphisms(sys.network()).unwrap();
        let r = symmetric_on(&g, &group, Limits::default());
        assert_eq!(r.passed(), symmetry_oracle(&g, &group));
        for p in &group {
            let one = symmetric_on(&g, std::slice::from_ref(p), Limits::default());
            assert_eq!(one.passed(), symmetry_oracle(&g, std::slice::from_ref(p)));
        }
    }
}

#[test]
fn sync_examples() {
    let lim = Limits::default();
    let s = gen_two_process_sync_io().unwrap();
    assert_eq!(
        check_pairwise_sync(&s, &all_vertices(&s), lim)
            .unwrap()
            .verdict,
        Verdict::Pass
    );
    let b = gen_buffer_system().unwrap();
    let r = check_pairwise_sync(&b, &set(&["R0", "R1"]), lim).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.witnesses[0].description.contains("R0 and R1"));
    let d = gen_two_process_deadlock_in().unwrap();
    let r = check_pairwise_sync(&d, &all_vertices(&d), lim).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(
        r.witnesses[0].computation.as_ref().unwrap().outcome,
        Outcome::Deadlocked
    );
    assert!(check_pairwise_sync(&s, &set(&["nope"]), lim).is_err());
}

#[test]
fn limits_and_cycles_give_unknown() {
    let s = gen_two_process_sync_io().unwrap();
    let tiny = Limits {
        max_states: 5,
        max_depth: 100,
    };
    let r = check_pairwise_sync(&s, &all_vertices(&s), tiny).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown);
    let r = check_symmetric(&s, &[], tiny).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown);
    let spin = two_sided("x := true; do [ x -> skip ] od", "skip");
    let r = check_pairwise_sync(&spin, &set(&["P0"]), Limits::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown);
    let r = check_symmetric(&spin, &[], Limits::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown);
}

#[test]
fn electoral_examples() {
    let lim = Limits::default();
    let s = gen_two_process_sync_io().unwrap();
    assert!(matches!(
        check_electoral(&s, lim),
        Err(CheckError::Precondition(_))
    ));
    let k = knockout_transform(&s, &all_vertices(&s)).unwrap();
    let r = check_electoral(&k, lim).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{}", r.render(lim, 0));
    assert!(r.notes.iter().any(|n| n.contains("P0 P1")));
    let split = two_sided("leader := \"P0\"", "leader := \"P1\"");
    let r = check_electoral(&split, lim).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.witnesses[0].description.contains("P0:P0"));
}

#[test]
fn symmetry_examples() {
    let lim = Limits::default();
    let s = gen_two_process_sync_io().unwrap();
    let group = automorphisms(s.network()).unwrap();
    assert_eq!(group.len(), 2);
    assert!(check_symmetric(&s, &group, lim).unwrap().passed());
    let a = gen_asymmetric().unwrap();
    let r = check_symmetric(&a, &automorphisms(a.network()).unwrap(), lim).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let w = r.witnesses[0].computation.as_ref().unwrap();
    assert!(w.steps.iter().any(|st| matches!(st,
        Step::Comm { sender, .. } if sender.as_str() == "Q0")));
    let id = vec![Permutation::identity(a.network().vertices())];
    assert!(check_symmetric(&a, &id, lim).unwrap().passed());
    let not_auto = Permutation::parse_cycles(networks::three_cycle().vertices(), "(1 2)").unwrap();
    let c = gen_sync_io(&networks::three_cycle(), true).unwrap();
    assert!(check_symmetric(&c, &[not_auto], lim).is_err());
}

#[test]
fn rename_properties() {
    let s = gen_two_process_sync_io().unwrap();
    let g = explore(&s, Limits::default()).unwrap();
    let swap = Permutation::parse_cycles(s.network().vertices(), "(P0 P1)").unwrap();
    let id = Permutation::identity(s.network().vertices());
    for c in computations(&g, 10_000).unwrap() {
        assert_eq!(rename_computation(&c, &id), c);
        assert_eq!(rename_computation(&rename_computation(&c, &swap), &swap), c);
        let m = rename_computation(&c, &swap);
        assert_eq!(
            crate::engine::replay(g.machine(), &m.steps)
                .unwrap()
                .outcome,
            c.outcome
        );
    }
}

#[test]
fn sampling() {
    let s = gen_two_process_sync_io().unwrap();
    let spec = SampleSpec {
        seeds: 0..50,
        max_steps: 1_000,
        pairs: Some(all_vertices(&s)),
        electoral: false,
    };
    let r = sample_check(&s, &spec).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.stats.runs, Some(50));
    let b = gen_buffer_system().unwrap();
    let r = sample_check(
        &b,
        &SampleSpec {
            pairs: Some(set(&["R0", "R1"])),
            ..spec.clone()
        },
    )
    .unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let short = SampleSpec {
        max_steps: 3,
        ..spec
    };
    assert_eq!(sample_check(&s, &short).unwrap().verdict, Verdict::Unknown);
}

#[test]
fn report_renderings() {
    let d = gen_two_process_deadlock_in().unwrap();
    let r = check_pairwise_sync(&d, &all_vertices(&d), Limits::default()).unwrap();
    let sum = r.summary();
    assert!(sum.contains("verdict=fail\n"));
    assert!(sum.contains("witness_index=1\n"));
    let text = r.render(Limits::default(), 100_000);
    assert!(text.starts_with("# pairwise-sync (max_states=1000000 max_depth=10000"));
    assert!(text.contains("outcome: deadlocked"));
    let _ = Network::default();
}
