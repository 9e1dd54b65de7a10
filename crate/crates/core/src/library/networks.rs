//! Example networks and extensions used throughout the tests and the CLI.

use std::collections::{BTreeMap, BTreeSet};

use crate::extension::ExtendedNetwork;
use crate::graph::{Network, Permutation, Vertex};

fn net(vertices: &[&str], edges: &[(&str, &str)]) -> Network {
    Network::from_strs(vertices, edges).expect("fixture networks are well-formed")
}

fn both<'a>(pairs: &[(&'a str, &'a str)]) -> Vec<(&'a str, &'a str)> {
    pairs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect()
}

/// `P0 <-> P1`.
pub fn two_process() -> Network {
    net(&["P0", "P1"], &both(&[("P0", "P1")]))
}

/// `P0' <-> P1'`.
pub fn two_process_primed() -> Network {
    net(&["P0'", "P1'"], &both(&[("P0'", "P1'")]))
}

/// `Q0 <-> Q1`.
pub fn two_process_q() -> Network {
    net(&["Q0", "Q1"], &both(&[("Q0", "Q1")]))
}

/// The ring `R0 -> R0' -> R1 -> R1' -> R0`.
pub fn buffer_ring() -> Network {
    net(
        &["R0", "R0'", "R1", "R1'"],
        &[("R0", "R0'"), ("R0'", "R1"), ("R1", "R1'"), ("R1'", "R0")],
    )
}

/// `1 -> 2 -> 3 -> 1`.
pub fn three_cycle() -> Network {
    net(&["1", "2", "3"], &[("1", "2"), ("2", "3"), ("3", "1")])
}

/// Directed 4-cycle `1 -> 2 -> 3 -> 4 -> 1`; `(1 3)(2 4)` is an
/// automorphism of period 2.
pub fn four_cycle() -> Network {
    net(
        &["1", "2", "3", "4"],
        &[("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")],
    )
}

/// Complete bidirectional graph on `n` vertices named `1..=n`.
pub fn complete(n: usize) -> Network {
    let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut edges = Vec::new();
    for a in &refs {
        for b in &refs {
            if a != b {
                edges.push((*a, *b));
            }
        }
    }
    net(&refs, &edges)
}

/// Strongly and directly connected, rigid, with hub `1`:
/// `1 <-> 2`, `1 <-> 3`, `3 -> 2`.
pub fn hub3() -> Network {
    net(
        &["1", "2", "3"],
        &[("1", "2"), ("2", "1"), ("1", "3"), ("3", "1"), ("3", "2")],
    )
}

/// Five vertices: `1` and `2` linked both ways to everything, and the
/// one-way triangle `3 -> 4 -> 5 -> 3`. `{1,2}` and `{3,4,5}` are invariant
/// under every automorphism.
pub fn positive() -> Network {
    let mut edges = both(&[("1", "2")]);
    for c in ["1", "2"] {
        for v in ["3", "4", "5"] {
            edges.push((c, v));
            edges.push((v, c));
        }
    }
    edges.extend([("3", "4"), ("4", "5"), ("5", "3")]);
    net(&["1", "2", "3", "4", "5"], &edges)
}

fn blocks(spec: &[(&str, &[&str])]) -> BTreeMap<Vertex, BTreeSet<Vertex>> {
    spec.iter()
        .map(|(v, b)| (Vertex::new(v), b.iter().map(|u| Vertex::new(u)).collect()))
        .collect()
}

/// An extension of the 3-cycle with three helpers per peer. Helper `vc`
/// links to the next peer, as `2c -> 3`.
pub fn helpers_on_cycle() -> ExtendedNetwork {
    let peers = ["1", "2", "3"];
    let names: Vec<String> = peers
        .iter()
        .flat_map(|v| {
            [
                v.to_string(),
                format!("{v}a"),
                format!("{v}b"),
                format!("{v}c"),
            ]
        })
        .collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    for (i, v) in peers.iter().enumerate() {
        let n = peers[(i + 1) % 3];
        let (a, b, c) = (format!("{v}a"), format!("{v}b"), format!("{v}c"));
        edges.push((v.to_string(), a.clone()));
        edges.push((a, v.to_string()));
        edges.push((v.to_string(), b.clone()));
        edges.push((b.clone(), v.to_string()));
        edges.push((b, format!("{n}b")));
        edges.push((v.to_string(), c.clone()));
        edges.push((c, n.to_string()));
        edges.push((v.to_string(), n.to_string()));
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let erefs: Vec<(&str, &str)> = edges
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let ext = net(&refs, &erefs);
    let bl: Vec<(String, Vec<String>)> = peers
        .iter()
        .map(|v| {
            (
                v.to_string(),
                vec![
                    v.to_string(),
                    format!("{v}a"),
                    format!("{v}b"),
                    format!("{v}c"),
                ],
            )
        })
        .collect();
    let bl: BTreeMap<Vertex, BTreeSet<Vertex>> = bl
        .iter()
        .map(|(v, b)| (Vertex::new(v), b.iter().map(|u| Vertex::new(u)).collect()))
        .collect();
    ExtendedNetwork::new(three_cycle(), ext, bl).expect("fixture extension is well-formed")
}

/// Base `1 <-> 2`, blocks `{1,1a,1b,1c}` and `{2,2a,2b,2c}`, helpers wired
/// so that the swap extends to an automorphism whose helper orbit is the
/// 6-cycle `(2a 1a 2c 1b 2b 1c)`. Returns the extension, the base swap and
/// that extending automorphism.
pub fn slicing_example() -> (ExtendedNetwork, Permutation, Permutation) {
    let base = net(&["1", "2"], &both(&[("1", "2")]));
    let mut edges = both(&[
        ("1", "2"),
        ("1", "1a"),
        ("1", "1b"),
        ("1", "1c"),
        ("2", "2a"),
        ("2", "2b"),
        ("2", "2c"),
    ]);
    edges.extend([
        ("1a", "1b"),
        ("1b", "1c"),
        ("1c", "1a"),
        ("2c", "2b"),
        ("2b", "2a"),
        ("2a", "2c"),
    ]);
    let ext = net(&["1", "1a", "1b", "1c", "2", "2a", "2b", "2c"], &edges);
    let x = ExtendedNetwork::new(
        base.clone(),
        ext.clone(),
        blocks(&[
            ("1", &["1", "1a", "1b", "1c"]),
            ("2", &["2", "2a", "2b", "2c"]),
        ]),
    )
    .expect("fixture extension is well-formed");
    let sigma = Permutation::parse_cycles(base.vertices(), "(1 2)").expect("valid");
    let iota =
        Permutation::parse_cycles(ext.vertices(), "(1 2)(2a 1a 2c 1b 2b 1c)").expect("valid");
    (x, sigma, iota)
}

/// Base `1 <-> 2` extended by a bidirectional 4-cycle `1 - 1a - 2 - 2a - 1`
/// with blocks `{1,1a}` and `{2,2a}`. The rotation of the 4-cycle mixes
/// peers and helpers and is excluded by the block filter.
pub fn mixing_extension() -> ExtendedNetwork {
    let base = net(&["1", "2"], &both(&[("1", "2")]));
    let ext = net(
        &["1", "1a", "2", "2a"],
        &both(&[
            ("1", "1a"),
            ("1a", "2"),
            ("2", "2a"),
            ("2a", "1"),
            ("1", "2"),
        ]),
    );
    ExtendedNetwork::new(
        base,
        ext,
        blocks(&[("1", &["1", "1a"]), ("2", &["2", "2a"])]),
    )
    .expect("fixture extension is well-formed")
}
