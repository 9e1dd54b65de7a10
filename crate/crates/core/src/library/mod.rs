//! Program generators: the fixed example systems, the generic pairwise
//! synchronizer, the knockout transformation and two election
//! constructions.

mod broadcast;
mod election;
mod knockout;
pub mod networks;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{is_peer_to_peer, GraphError, Network, Vertex};
use crate::lang::{
    check_dialect, instantiate, parse_program, Binding, Dialect, ParseError, Program, System,
    SystemError,
};

pub use broadcast::{bfs_tree, children, spanning_tree_broadcast, SpanningTree};
pub use election::{gen_election_majority_in, gen_election_sync_in, ElectionPhase, HubChoice};
pub use knockout::knockout_transform;

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("generated program for {vertex} does not parse: {source}")]
    Generated {
        vertex: String,
        #[source]
        source: ParseError,
    },
    #[error("generated program for {vertex} is not in dialect {dialect}: {detail}")]
    Dialect {
        vertex: Vertex,
        dialect: Dialect,
        detail: String,
    },
}

/// Quotes a vertex name for program text.
pub(crate) fn q(v: &Vertex) -> String {
    format!("\"{v}\"")
}

/// Assigns each of `assignments` in every possible order, chosen
/// non-deterministically. A fixed order would single out one neighbour
/// and break step-level symmetry. Up to four assignments become one flat
/// selection over all orders; longer lists nest one choice per level.
pub fn init_all_orders(assignments: &[String]) -> String {
    match assignments.len() {
        0 => String::new(),
        1 => format!("{};\n", assignments[0]),
        n if n <= 4 => {
            let mut branches = Vec::new();
            permutations(&mut assignments.to_vec(), 0, &mut |p| {
                branches.push(format!("true -> {}", p.join("; ")));
            });
            format!("if [ {} ] fi;\n", branches.join("\n  [] "))
        }
        _ => format!("{};\n", nested_orders(assignments)),
    }
}

fn nested_orders(assignments: &[String]) -> String {
    if assignments.len() == 1 {
        return assignments[0].clone();
    }
    let branches: Vec<String> = (0..assignments.len())
        .map(|i| {
            let mut rest = assignments.to_vec();
            let first = rest.remove(i);
            format!("true -> {first}; {}", nested_orders(&rest))
        })
        .collect();
    format!("if [ {} ] fi", branches.join(" [] "))
}

fn permutations(items: &mut Vec<String>, k: usize, f: &mut dyn FnMut(&[String])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, f);
        items.swap(k, i);
    }
}

pub(crate) fn parse_generated(vertex: &str, text: &str) -> Result<Program, LibraryError> {
    parse_program(text).map_err(|source| LibraryError::Generated {
        vertex: vertex.to_string(),
        source,
    })
}

/// Instantiates one concrete program per vertex.
pub(crate) fn system_of(
    net: &Network,
    programs: BTreeMap<Vertex, Program>,
) -> Result<System, LibraryError> {
    let bindings = programs
        .into_iter()
        .map(|(v, p)| (v, Binding::new(Arc::new(p))))
        .collect();
    Ok(instantiate(net, &bindings)?)
}

/// Parses `text` once and binds it at every vertex with the given
/// placeholder assignment.
fn uniform_system(
    net: &Network,
    text: &str,
    args: impl Fn(&Vertex) -> Vec<(&'static str, String)>,
) -> Result<System, LibraryError> {
    let program = Arc::new(parse_generated("*", text)?);
    let mut bindings = BTreeMap::new();
    for v in net.vertices() {
        let mut b = Binding::new(program.clone());
        for (p, t) in args(v) {
            b = b.with(p, &t);
        }
        bindings.insert(v.clone(), b);
    }
    Ok(instantiate(net, &bindings)?)
}

/// Fails unless every process of `sys` is written in `dialect`.
pub fn check_system_dialect(sys: &System, dialect: Dialect) -> Result<(), LibraryError> {
    for (v, p) in sys.processes() {
        let bad = check_dialect(&p.program, dialect);
        if let Some(first) = bad.first() {
            return Err(LibraryError::Dialect {
                vertex: v.clone(),
                dialect,
                detail: first.to_string(),
            });
        }
    }
    Ok(())
}

fn other_of_two(net: &Network, v: &Vertex) -> String {
    net.vertices()
        .iter()
        .find(|w| *w != v)
        .expect("two-vertex network")
        .to_string()
}

/// Two processes exchanging their names with output guards.
pub const SYNC_IO_TEXT: &str = "\
program sync_io(NEXT)
recd := false;
sent := false;
do
  [ not recd & NEXT ? x -> recd := true
  [] not sent & NEXT ! self -> sent := true
  ]
od
";

/// The same exchange with the send moved out of the guard; may deadlock.
pub const DEADLOCK_IN_TEXT: &str = "\
program deadlock_in(NEXT)
recd := false;
sent := false;
do
  [ not recd & NEXT ? x -> recd := true
  [] not sent -> NEXT ! self; sent := true
  ]
od
";

/// Ring member of the buffered system.
pub const BUFFER_MEMBER_TEXT: &str = "\
program member(OUT, IN)
recd := false;
sent := false;
do
  [ not recd & IN ? x -> recd := true
  [] not sent -> OUT ! self; sent := true
  ]
od
";

/// One-place buffer between two ring members.
pub const BUFFER_TEXT: &str = "\
program buffer(FROM, TO)
FROM ? y;
TO ! y
";

/// Asymmetric by name: `Q0` sends, `Q1` receives.
pub const ASYMMETRIC_TEXT: &str = "\
program asymmetric(NEXT)
if
  [ self = \"Q0\" -> NEXT ! self
  [] self = \"Q1\" -> NEXT ? x
  ]
fi
";

/// `sync_io` on `P0 <-> P1`.
pub fn gen_two_process_sync_io() -> Result<System, LibraryError> {
    let net = networks::two_process();
    uniform_system(&net, SYNC_IO_TEXT, |v| {
        vec![("NEXT", other_of_two(&net, v))]
    })
}

/// `deadlock_in` on `P0' <-> P1'`.
pub fn gen_two_process_deadlock_in() -> Result<System, LibraryError> {
    let net = networks::two_process_primed();
    uniform_system(&net, DEADLOCK_IN_TEXT, |v| {
        vec![("NEXT", other_of_two(&net, v))]
    })
}

/// Ring members `R0`, `R1` and buffers `R0'`, `R1'` on
/// `R0 -> R0' -> R1 -> R1' -> R0`.
pub fn gen_buffer_system() -> Result<System, LibraryError> {
    let net = networks::buffer_ring();
    let member = Arc::new(parse_generated("member", BUFFER_MEMBER_TEXT)?);
    let buffer = Arc::new(parse_generated("buffer", BUFFER_TEXT)?);
    let mut b = BTreeMap::new();
    let v = |s: &str| Vertex::new(s);
    b.insert(
        v("R0"),
        Binding::new(member.clone())
            .with("OUT", "R0'")
            .with("IN", "R1'"),
    );
    b.insert(
        v("R1"),
        Binding::new(member).with("OUT", "R1'").with("IN", "R0'"),
    );
    b.insert(
        v("R0'"),
        Binding::new(buffer.clone())
            .with("FROM", "R0")
            .with("TO", "R1"),
    );
    b.insert(
        v("R1'"),
        Binding::new(buffer).with("FROM", "R1").with("TO", "R0"),
    );
    Ok(instantiate(&net, &b)?)
}

/// `asymmetric` on `Q0 <-> Q1`.
pub fn gen_asymmetric() -> Result<System, LibraryError> {
    let net = networks::two_process_q();
    uniform_system(&net, ASYMMETRIC_TEXT, |v| {
        vec![("NEXT", other_of_two(&net, v))]
    })
}

/// Pairwise synchronizer with output guards: each process offers, once
/// per neighbour, a receive from every in-neighbour and a send to every
/// out-neighbour, with one flag per neighbour.
pub fn gen_sync_io(net: &Network, require_p2p: bool) -> Result<System, LibraryError> {
    if net.is_empty() {
        return Err(LibraryError::Precondition("empty network".into()));
    }
    if require_p2p {
        let r = is_peer_to_peer(net)?;
        if !r.holds() {
            return Err(LibraryError::Precondition(format!(
                "network is not peer-to-peer: {r:?}"
            )));
        }
    }
    let mut programs = BTreeMap::new();
    for v in net.vertices() {
        programs.insert(
            v.clone(),
            parse_generated(v.as_str(), &sync_io_text(net, v))?,
        );
    }
    let sys = system_of(net, programs)?;
    check_system_dialect(&sys, Dialect::Io)?;
    Ok(sys)
}

fn sync_io_text(net: &Network, v: &Vertex) -> String {
    let ins = net.predecessors(v);
    let outs = net.successors(v);
    let flags: BTreeSet<&Vertex> = ins.iter().chain(&outs).collect();
    let mut text = String::from("program sync_io\n");
    let inits: Vec<String> = flags
        .iter()
        .map(|w| format!("sync[{}] := false", q(w)))
        .collect();
    text.push_str(&init_all_orders(&inits));
    let mut branches = Vec::new();
    for w in &ins {
        branches.push(format!(
            "not sync[{0}] & {0} ? x -> sync[{0}] := true",
            q(w)
        ));
    }
    for w in &outs {
        branches.push(format!(
            "not sync[{0}] & {0} ! 0 -> sync[{0}] := true",
            q(w)
        ));
    }
    if !branches.is_empty() {
        text.push_str(&format!("do\n  [ {}\n  ]\nod\n", branches.join("\n  [] ")));
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{print_program, Stmt};

    #[test]
    fn all_orders_shapes() {
        let a: Vec<String> = (0..3).map(|i| format!("f[\"{i}\"] := false")).collect();
        let t = init_all_orders(&a);
        assert_eq!(t.matches("true ->").count(), 6);
        let p = parse_program(&t).unwrap();
        assert_eq!(p.body.len(), 1);
        let five: Vec<String> = (0..5).map(|i| format!("x{i} := 0")).collect();
        let p = parse_program(&init_all_orders(&five)).unwrap();
        match &p.body[0] {
            Stmt::Select(bs) => assert_eq!(bs.len(), 5),
            other => panic!("expected selection, got {other:?}"),
        }
        assert_eq!(init_all_orders(&[]), "");
    }

    #[test]
    fn fixed_systems_instantiate_and_classify() {
        let s = gen_two_process_sync_io().unwrap();
        check_system_dialect(&s, Dialect::Io).unwrap();
        assert!(check_system_dialect(&s, Dialect::In).is_err());
        let d = gen_two_process_deadlock_in().unwrap();
        check_system_dialect(&d, Dialect::In).unwrap();
        let b = gen_buffer_system().unwrap();
        check_system_dialect(&b, Dialect::In).unwrap();
        assert_eq!(b.processes().len(), 4);
        let a = gen_asymmetric().unwrap();
        let q0 = print_program(&a.process(&Vertex::new("Q0")).unwrap().program);
        assert!(q0.contains("\"Q1\" ! \"Q0\""), "{q0}");
    }

    #[test]
    fn sync_io_on_cycle() {
        let net = networks::three_cycle();
        let s = gen_sync_io(&net, true).unwrap();
        let p = &s.process(&Vertex::new("1")).unwrap().program;
        let comms = p.communications();
        assert_eq!(comms.len(), 2);
        assert!(gen_sync_io(&networks::buffer_ring(), true).is_err());
        assert!(gen_sync_io(&networks::buffer_ring(), false).is_ok());
    }
}
