//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line with its measured time against the allowed budget.
//!
//! Run with `cargo test -p symcsp --test acceptance -- --nocapture`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symcsp::checkers::{
    check_electoral, check_pairwise_sync, check_symmetric, pairwise_sync_on, sample_check,
    SampleSpec, Verdict,
};
use symcsp::engine::{
    computations, explore, replay, FailReason, GuardKind, GuardSig, Limits, Machine, Outcome,
    StateGraph, Step, VarName,
};
use symcsp::extension::{identifying_structure, slice_orbits, ExtendedNetwork};
use symcsp::graph::{automorphisms, wamoti, Network, Permutation, Vertex};
use symcsp::lang::{check_dialect, instantiate, parse_program, Binding, Dialect, System, Value};
use symcsp::library::{
    gen_asymmetric, gen_buffer_system, gen_election_majority_in, gen_election_sync_in, gen_sync_io,
    gen_two_process_deadlock_in, gen_two_process_sync_io, knockout_transform, networks,
    spanning_tree_broadcast, ElectionPhase, HubChoice,
};

fn v(s: &str) -> Vertex {
    Vertex::new(s)
}

fn all(sys: &System) -> BTreeSet<Vertex> {
    sys.vertices().cloned().collect()
}

/// Prints the criterion line and fails the test when the check or the
/// time budget is missed.
fn verdict(n: u32, name: &str, ok: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let in_time = elapsed <= budget;
    let tag = if ok && in_time { "PASS" } else { "FAIL" };
    println!(
        "criterion {n:>2} {tag} {name}: {detail} [{:.3}s of {}s]",
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
    assert!(in_time, "criterion {n} ({name}) exceeded its time budget");
}

fn secs(n: u64) -> Duration {
    Duration::from_secs(n)
}

fn assign(p: &str, var: &str, b: bool) -> Step {
    Step::Assign {
        vertex: v(p),
        var: VarName::plain(var),
        value: Value::Bool(b),
    }
}

fn guards(p: &str, peer: &str, send_open: bool, recv_open: bool) -> Step {
    let exit = !send_open && !recv_open;
    Step::Guards {
        vertex: v(p),
        pattern: vec![
            GuardSig {
                kind: GuardKind::Send(v(peer)),
                open: send_open,
            },
            GuardSig {
                kind: GuardKind::Recv(v(peer)),
                open: recv_open,
            },
        ],
        exit,
    }
}

fn comm(from: &str, to: &str) -> Step {
    Step::Comm {
        sender: v(from),
        receiver: v(to),
        value: Value::Atom(v(from)),
        var: VarName::plain("x"),
    }
}

/// The reference interleaving, step for step; payloads are the sender's
/// own name.
fn reference_trace() -> Vec<Step> {
    vec![
        assign("P0", "recd", false),
        assign("P1", "recd", false),
        assign("P1", "sent", false),
        assign("P0", "sent", false),
        guards("P1", "P0", true, true),
        guards("P0", "P1", true, true),
        comm("P0", "P1"),
        assign("P0", "sent", true),
        guards("P0", "P1", false, true),
        assign("P1", "recd", true),
        guards("P1", "P0", true, false),
        comm("P1", "P0"),
        assign("P1", "sent", true),
        assign("P0", "recd", true),
        guards("P0", "P1", false, false),
        guards("P1", "P0", false, false),
    ]
}

#[test]
fn criterion_01_two_process_sync_io() {
    let t = Instant::now();
    let sys = gen_two_process_sync_io().unwrap();
    let g = explore(&sys, Limits::default()).unwrap();
    let proper = g.terminals().all(|(_, o)| o == Outcome::ProperlyTerminated);
    let sync = check_pairwise_sync(&sys, &all(&sys), Limits::default()).unwrap();
    let group = automorphisms(sys.network()).unwrap();
    let sym = check_symmetric(&sys, &group, Limits::default()).unwrap();
    let m = Machine::new(&sys).unwrap();
    let trace = reference_trace();
    let replayed = replay(&m, &trace);
    let exact = matches!(&replayed, Ok(c) if c.steps == trace
        && c.outcome == Outcome::ProperlyTerminated);
    let ok = proper
        && !g.is_cyclic()
        && sync.verdict == Verdict::Pass
        && group.len() == 2
        && sym.verdict == Verdict::Pass
        && exact
        && trace.len() == 16;
    verdict(
        1,
        "two-process sync_io",
        ok,
        t.elapsed(),
        secs(5),
        &format!(
            "states={} terminals={} sync={} symmetric={} trace16={}",
            g.len(),
            g.terminals().count(),
            sync.verdict,
            sym.verdict,
            exact
        ),
    );
}

#[test]
fn criterion_02_dialect_gap() {
    let t = Instant::now();
    let sys = gen_two_process_sync_io().unwrap();
    let counts: Vec<usize> = sys
        .processes()
        .values()
        .map(|p| check_dialect(&p.program, Dialect::In).len())
        .collect();
    let io_clean = sys
        .processes()
        .values()
        .all(|p| check_dialect(&p.program, Dialect::Io).is_empty());
    let p0 = &sys.processes()[&v("P0")].program;
    let viol = check_dialect(p0, Dialect::In);
    let ok = counts.iter().all(|&c| c == 1) && io_clean && viol[0].guard.contains('!');
    verdict(
        2,
        "dialect gap",
        ok,
        t.elapsed(),
        secs(5),
        &format!("violations per process={counts:?} first=`{}`", viol[0]),
    );
}

#[test]
fn criterion_03_deadlock_variant() {
    let t = Instant::now();
    let sys = gen_two_process_deadlock_in().unwrap();
    let g = explore(&sys, Limits::default()).unwrap();
    let counts = g.outcome_counts();
    let dead = counts.get(&Outcome::Deadlocked).copied().unwrap_or(0);
    let proper = counts
        .get(&Outcome::ProperlyTerminated)
        .copied()
        .unwrap_or(0);
    verdict(
        3,
        "deadlock variant",
        dead >= 1 && proper >= 1,
        t.elapsed(),
        secs(5),
        &format!("deadlocked={dead} properly-terminated={proper}"),
    );
}

#[test]
fn criterion_04_buffer_failure() {
    let t = Instant::now();
    let sys = gen_buffer_system().unwrap();
    let g = explore(&sys, Limits::default()).unwrap();
    let proper = g.terminals().all(|(_, o)| o == Outcome::ProperlyTerminated);
    let direct = g
        .labels()
        .iter()
        .filter(|s| s.links(&v("R0"), &v("R1")))
        .count();
    let r = check_pairwise_sync(&sys, &[v("R0"), v("R1")].into(), Limits::default()).unwrap();
    let m = g.machine();
    let delivered = g.terminals().all(|(id, _)| {
        m.read(g.state(id), &v("R0"), &VarName::plain("x")) == Some(Value::Atom(v("R1")))
            && m.read(g.state(id), &v("R1"), &VarName::plain("x")) == Some(Value::Atom(v("R0")))
    });
    let ok = proper && !g.is_cyclic() && direct == 0 && r.verdict == Verdict::Fail && delivered;
    verdict(
        4,
        "buffer failure",
        ok,
        t.elapsed(),
        secs(60),
        &format!(
            "states={} direct R0-R1 steps={direct} sync={} payloads delivered={delivered}",
            g.len(),
            r.verdict
        ),
    );
}

#[test]
fn criterion_05_sync_io_generator() {
    for (label, net) in [
        ("3-cycle", networks::three_cycle()),
        ("2-vertex", networks::two_process()),
    ] {
        let t = Instant::now();
        let sys = gen_sync_io(&net, true).unwrap();
        let sync = check_pairwise_sync(&sys, &all(&sys), Limits::default()).unwrap();
        let group = automorphisms(&net).unwrap();
        let sym = check_symmetric(&sys, &group, Limits::default()).unwrap();
        verdict(
            5,
            &format!("sync_io on {label}"),
            sync.passed() && sym.passed(),
            t.elapsed(),
            secs(60),
            &format!(
                "states={} |group|={} sync={} symmetric={}",
                sync.stats.states,
                group.len(),
                sync.verdict,
                sym.verdict
            ),
        );
    }
}

#[test]
fn criterion_06_knockout_electoral() {
    let t = Instant::now();
    let base = gen_two_process_sync_io().unwrap();
    let sys = knockout_transform(&base, &all(&base)).unwrap();
    let r = check_electoral(&sys, Limits::default()).unwrap();
    let g = explore(&sys, Limits::default()).unwrap();
    let m = g.machine();
    let mut one_winner = true;
    for (id, _) in g.terminals() {
        let s = g.state(id);
        let winners: Vec<&Vertex> = sys
            .vertices()
            .filter(|p| m.read(s, p, &VarName::plain("winning")) == Some(Value::Bool(true)))
            .collect();
        one_winner &= winners.len() == 1
            && sys.vertices().all(|p| {
                m.read(s, p, &VarName::plain("leader")) == Some(Value::Atom(winners[0].clone()))
            });
    }
    verdict(
        6,
        "knockout electoral",
        r.verdict == Verdict::Pass && one_winner,
        t.elapsed(),
        secs(30),
        &format!(
            "states={} electoral={} one winner per terminal={one_winner}",
            g.len(),
            r.verdict
        ),
    );
}

#[test]
fn criterion_07_slice_orbits() {
    let t = Instant::now();
    let (x, sigma, iota) = networks::slicing_example();
    let sliced = slice_orbits(&x, &sigma, &iota, Some(&[v("2")])).unwrap();
    // Expected map built independently: iota on S_1 and on 2, iota^5 on the
    // rest of S_2.
    let mut expected = BTreeMap::new();
    for u in ["1", "1a", "1b", "1c", "2"] {
        expected.insert(v(u), iota.apply(&v(u)).clone());
    }
    for u in ["2a", "2b", "2c"] {
        let mut w = v(u);
        for _ in 0..5 {
            w = iota.apply(&w).clone();
        }
        expected.insert(v(u), w);
    }
    let expected = Permutation::from_map(expected).unwrap();
    let orbits: BTreeSet<BTreeSet<Vertex>> = sliced
        .orbits()
        .into_iter()
        .map(|o| o.into_iter().collect())
        .collect();
    let want: BTreeSet<BTreeSet<Vertex>> = [["1", "2"], ["2a", "1c"], ["2c", "1a"], ["2b", "1b"]]
        .iter()
        .map(|o| o.iter().map(|s| v(s)).collect())
        .collect();
    let base = x
        .base()
        .vertices()
        .iter()
        .all(|u| x.base().contains(sliced.apply(u).as_str()));
    let ok = sliced == expected
        && orbits == want
        && x.ext().is_automorphism(&sliced)
        && sliced.is_well_balanced()
        && sliced.period() == 2
        && base
        && x.respects_blocks(&sliced);
    verdict(
        7,
        "slice orbits",
        ok,
        t.elapsed(),
        secs(1),
        &format!("sigma'={sliced}"),
    );
}

#[test]
fn criterion_08_identifying_structure() {
    let t = Instant::now();
    let x = ExtendedNetwork::trivial(&networks::three_cycle());
    let h = identifying_structure(&x).unwrap();
    let group = automorphisms(h.ext()).unwrap();
    let base = x.base().vertices();
    let keeps_base = group
        .iter()
        .all(|p| base.iter().all(|u| base.contains(p.apply(u))));
    let blocks_ok = group.iter().all(|p| h.respects_blocks(p));
    let w = wamoti(h.ext()).unwrap();
    let ok = h.ext().len() == 12 && keeps_base && blocks_ok && !w.is_empty();
    verdict(
        8,
        "identifying structure",
        ok,
        t.elapsed(),
        secs(60),
        &format!(
            "|V_H|={} |Aut(H)|={} keeps V={keeps_base} blocks={blocks_ok} |wamoti|={}",
            h.ext().len(),
            group.len(),
            w.len()
        ),
    );
}

#[test]
fn criterion_09_election_based_sync() {
    let t = Instant::now();
    let net = networks::hub3();
    let stub = ElectionPhase::stub(&net, &v("1")).unwrap();
    let sys = gen_election_sync_in(&net, HubChoice::Fixed(v("1")), stub).unwrap();
    let r = check_pairwise_sync(&sys, &all(&sys), Limits::default()).unwrap();
    verdict(
        9,
        "hub network, stub election, exhaustive",
        r.verdict == Verdict::Pass,
        t.elapsed(),
        secs(300),
        &format!("states={} sync={}", r.stats.states, r.verdict),
    );

    let t = Instant::now();
    let net = networks::positive();
    let election = gen_election_majority_in(&net).unwrap();
    let sys = gen_election_sync_in(&net, HubChoice::Fixed(v("1")), election).unwrap();
    let spec = SampleSpec {
        seeds: 0..500,
        max_steps: 100_000,
        pairs: Some(all(&sys)),
        electoral: false,
    };
    let r = sample_check(&sys, &spec).unwrap();
    verdict(
        9,
        "positive network, majority election, 500 runs",
        r.verdict == Verdict::Pass,
        t.elapsed(),
        secs(300),
        &format!("runs={:?} sampled={}", r.stats.runs, r.verdict),
    );
}

#[test]
fn criterion_10_asymmetry_detection() {
    let t = Instant::now();
    let sys = gen_asymmetric().unwrap();
    let group = automorphisms(sys.network()).unwrap();
    let r = check_symmetric(&sys, &group, Limits::default()).unwrap();
    let witness = r.witnesses.first().and_then(|w| w.computation.clone());
    let m = Machine::new(&sys).unwrap();
    let concrete = match &witness {
        Some(c) => {
            let swap = group.iter().find(|p| !p.is_identity()).unwrap();
            replay(&m, &c.steps).is_ok() && replay(&m, &c.rename(swap).steps).is_err()
        }
        None => false,
    };
    verdict(
        10,
        "asymmetry detection",
        r.verdict == Verdict::Fail && concrete,
        t.elapsed(),
        secs(5),
        &format!(
            "symmetric={} witness replays and its mirror does not={concrete}",
            r.verdict
        ),
    );
}

/// Automorphisms by filtering every bijection of the vertex set.
fn brute_automorphisms(net: &Network) -> BTreeSet<Permutation> {
    let vs: Vec<Vertex> = net.vertices().iter().cloned().collect();
    vs.iter()
        .cloned()
        .permutations(vs.len())
        .map(|img| Permutation::from_map(vs.iter().cloned().zip(img).collect()).unwrap())
        .filter(|p| net.is_automorphism(p))
        .collect()
}

fn random_network(rng: &mut ChaCha8Rng) -> Network {
    let n = rng.gen_range(1..=6);
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let density = rng.gen_range(0.1..0.9);
    let mut edges = Vec::new();
    for a in &refs {
        for b in &refs {
            if a != b && rng.gen_bool(density) {
                edges.push((*a, *b));
            }
        }
    }
    Network::from_strs(&refs, &edges).unwrap()
}

fn broadcast_system(net: &Network, root: &str) -> System {
    let frags = spanning_tree_broadcast(net, &v(root), "got", "self").unwrap();
    let bindings = frags
        .iter()
        .map(|(u, f)| (u.clone(), Binding::new(parse_program(f).unwrap().into())))
        .collect();
    instantiate(net, &bindings).unwrap()
}

/// Pair coverage by enumerating maximal paths.
fn enumerated_sync(g: &StateGraph, q: &BTreeSet<Vertex>) -> Option<bool> {
    let all = computations(g, 10_000).ok()?;
    let q: Vec<&Vertex> = q.iter().collect();
    Some(all.iter().all(|c| {
        c.outcome == Outcome::ProperlyTerminated
            && q.iter()
                .tuple_combinations()
                .all(|(a, b)| c.steps.iter().any(|s| s.links(a, b)))
    }))
}

#[test]
fn criterion_11_oracle_equivalence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut graphs = vec![
        networks::two_process(),
        networks::three_cycle(),
        networks::four_cycle(),
        networks::hub3(),
        networks::positive(),
        networks::buffer_ring(),
        networks::complete(4),
        networks::mixing_extension().ext().clone(),
    ];
    graphs.extend((0..120).map(|_| random_network(&mut rng)));
    let mut aut_ok = true;
    for net in &graphs {
        let pruned: BTreeSet<Permutation> = automorphisms(net).unwrap().into_iter().collect();
        aut_ok &= pruned == brute_automorphisms(net);
    }

    let mut systems = vec![
        gen_two_process_sync_io().unwrap(),
        gen_two_process_deadlock_in().unwrap(),
        gen_asymmetric().unwrap(),
        gen_sync_io(&networks::two_process(), true).unwrap(),
    ];
    for net in [networks::four_cycle(), networks::hub3()] {
        systems.push(gen_sync_io(&net, false).unwrap());
    }
    for (net, root) in [
        (networks::three_cycle(), "1"),
        (networks::hub3(), "3"),
        (networks::four_cycle(), "2"),
        (networks::positive(), "4"),
    ] {
        systems.push(broadcast_system(&net, root));
    }
    let mut compared = 0;
    let mut cov_ok = true;
    let mut seen = HashSet::new();
    for sys in &systems {
        let Ok(g) = explore(sys, Limits::default()) else {
            continue;
        };
        let vs: Vec<Vertex> = sys.vertices().cloned().collect();
        for k in 0..=vs.len() {
            for q in vs.iter().cloned().combinations(k) {
                let q: BTreeSet<Vertex> = q.into_iter().collect();
                let Some(brute) = enumerated_sync(&g, &q) else {
                    continue;
                };
                compared += 1;
                seen.insert(brute);
                cov_ok &= pairwise_sync_on(&g, &q).passed() == brute;
            }
        }
    }
    let ok = aut_ok && cov_ok && compared >= 20 && seen.len() == 2;
    verdict(
        11,
        "oracle equivalence",
        ok,
        t.elapsed(),
        secs(120),
        &format!(
            "graphs={} automorphisms agree={aut_ok} coverage cases={compared} agree={cov_ok}",
            graphs.len()
        ),
    );
    let _ = FailReason::AllGuardsClosed;
}
