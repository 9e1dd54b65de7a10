//! Turns a pairwise-synchronizing system into an electoral one.
//!
//! Every member of the candidate set starts with `winning := true`. Each
//! communication between two candidates is followed by a second one in the
//! same direction carrying the sender's flag; a receiver that gets `true`
//! drops out. When every pair of candidates meets, exactly one flag
//! survives. The winner then broadcasts its name as `leader` along its own
//! breadth-first tree, and each vertex dispatches on the received name to
//! forward along the right tree.

use std::collections::{BTreeMap, BTreeSet};

use super::broadcast::{bfs_tree, forward, SpanningTree};
use super::{parse_generated, q, system_of, LibraryError};
use crate::graph::Vertex;
use crate::lang::{Branch, Comm, NameRef, Program, Stmt, System};

const RESERVED: [&str; 3] = ["winning", "leader", "kw"];

fn snippet(text: &str) -> Vec<Stmt> {
    parse_generated("*", text)
        .expect("knockout snippets are well-formed")
        .body
}

fn candidate_peer<'a>(peer: &'a NameRef, me: &Vertex, p: &BTreeSet<Vertex>) -> Option<&'a Vertex> {
    match peer {
        NameRef::Vertex(w) if w != me && p.contains(w) => Some(w),
        _ => None,
    }
}

fn after(comm_is_send: bool, w: &Vertex) -> Vec<Stmt> {
    if comm_is_send {
        snippet(&format!("{} ! winning", q(w)))
    } else {
        snippet(&format!(
            "{} ? kw; if [ kw -> winning := false [] not kw -> skip ] fi",
            q(w)
        ))
    }
}

struct Instrument<'a> {
    me: &'a Vertex,
    p: &'a BTreeSet<Vertex>,
    count: usize,
}

impl Instrument<'_> {
    fn stmts(&mut self, stmts: &[Stmt]) -> Vec<Stmt> {
        let mut out = Vec::new();
        for s in stmts {
            match s {
                Stmt::Send(peer, _) | Stmt::Recv(peer, _) => {
                    out.push(s.clone());
                    if let Some(w) = candidate_peer(peer, self.me, self.p) {
                        self.count += 1;
                        out.extend(after(matches!(s, Stmt::Send(..)), w));
                    }
                }
                Stmt::Select(bs) => out.push(Stmt::Select(self.branches(bs))),
                Stmt::Repeat(bs) => out.push(Stmt::Repeat(self.branches(bs))),
                Stmt::Assign(..) => out.push(s.clone()),
            }
        }
        out
    }

    fn branches(&mut self, bs: &[Branch]) -> Vec<Branch> {
        bs.iter()
            .map(|b| {
                let mut body = Vec::new();
                if let Some(c) = &b.comm {
                    if let Some(w) = candidate_peer(c.peer(), self.me, self.p) {
                        self.count += 1;
                        body.extend(after(matches!(c, Comm::Send(..)), w));
                    }
                }
                body.extend(self.stmts(&b.body));
                Branch::new(b.cond.clone(), b.comm.clone(), body)
            })
            .collect()
    }
}

/// Text of the final phase at `v`.
fn final_phase(v: &Vertex, p: &BTreeSet<Vertex>, trees: &BTreeMap<Vertex, SpanningTree>) -> String {
    // Group the other candidates by the tree parent of `v`.
    let mut by_parent: BTreeMap<&Vertex, Vec<&Vertex>> = BTreeMap::new();
    for r in p.iter().filter(|r| *r != v) {
        by_parent.entry(&trees[r].parent[v]).or_default().push(r);
    }
    let receive = if by_parent.is_empty() {
        "skip".to_string()
    } else {
        let branches: Vec<String> = by_parent
            .iter()
            .map(|(u, roots)| {
                let body = if roots.len() == 1 {
                    forward(&trees[roots[0]], v, "leader")
                } else {
                    let cases: Vec<String> = roots
                        .iter()
                        .map(|r| {
                            format!("leader = {} -> {}", q(r), forward(&trees[*r], v, "leader"))
                        })
                        .collect();
                    format!("if [ {} ] fi", cases.join(" [] "))
                };
                format!("{} ? leader -> {body}", q(u))
            })
            .collect();
        format!("if [ {} ] fi", branches.join(" [] "))
    };
    if p.contains(v) {
        format!(
            "if [ winning -> leader := self; {} [] not winning -> {receive} ] fi",
            forward(&trees[v], v, "leader")
        )
    } else {
        receive
    }
}

/// Instruments `sys` so that exactly one member of `p` ends with `winning`
/// true and every process learns it as `leader`, provided every pair of
/// members of `p` communicates directly in every computation. The network
/// must be strongly connected and the programs must not use the
/// variables `winning`, `leader` or `kw`.
pub fn knockout_transform(sys: &System, p: &BTreeSet<Vertex>) -> Result<System, LibraryError> {
    let net = sys.network();
    if p.is_empty() {
        return Err(LibraryError::Precondition("empty candidate set".into()));
    }
    if let Some(v) = p.iter().find(|v| !net.vertices().contains(*v)) {
        return Err(LibraryError::Precondition(format!("{v} is not a vertex")));
    }
    if !net.strongly_connected() {
        return Err(LibraryError::Precondition(
            "network is not strongly connected".into(),
        ));
    }
    for (v, proc_) in sys.processes() {
        if let Some(name) = RESERVED.iter().find(|n| proc_.program.writes(n)) {
            return Err(LibraryError::Precondition(format!(
                "process {v} already uses variable {name}"
            )));
        }
    }
    let trees: BTreeMap<Vertex, SpanningTree> = p
        .iter()
        .map(|r| Ok((r.clone(), bfs_tree(net, r)?)))
        .collect::<Result<_, LibraryError>>()?;
    let mut total = 0;
    let mut programs = BTreeMap::new();
    for (v, proc_) in sys.processes() {
        let mut body = Vec::new();
        if p.contains(v) {
            body.extend(snippet("winning := true"));
            let mut ins = Instrument { me: v, p, count: 0 };
            body.extend(ins.stmts(&proc_.program.body));
            total += ins.count;
        } else {
            body.extend(proc_.program.body.iter().cloned());
        }
        body.extend(snippet(&final_phase(v, p, &trees)));
        let mut prog = Program::new(&format!("{}_knockout", proc_.program.name), body);
        prog.atoms = proc_.program.atoms.clone();
        programs.insert(v.clone(), prog);
    }
    if p.len() > 1 && total == 0 {
        return Err(LibraryError::Precondition(
            "no communication between candidates to instrument".into(),
        ));
    }
    system_of(net, programs)
}
