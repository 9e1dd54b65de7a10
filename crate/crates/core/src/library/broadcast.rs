//! Broadcast of a value along a breadth-first spanning tree.

use std::collections::{BTreeMap, VecDeque};

use super::{q, LibraryError};
use crate::graph::{Network, Vertex};

/// Out-tree rooted at `root` reaching every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: Vertex,
    /// Parent of every non-root vertex.
    pub parent: BTreeMap<Vertex, Vertex>,
}

/// Breadth-first out-tree, visiting successors in name order.
pub fn bfs_tree(net: &Network, root: &Vertex) -> Result<SpanningTree, LibraryError> {
    if !net.vertices().contains(root) {
        return Err(LibraryError::Precondition(format!(
            "{root} is not a vertex"
        )));
    }
    let mut parent = BTreeMap::new();
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(v) = queue.pop_front() {
        for w in net.successors(&v) {
            if &w != root && !parent.contains_key(&w) {
                parent.insert(w.clone(), v.clone());
                queue.push_back(w);
            }
        }
    }
    if parent.len() + 1 != net.len() {
        let missing = net
            .vertices()
            .iter()
            .find(|v| *v != root && !parent.contains_key(*v))
            .expect("some vertex is unreachable");
        return Err(LibraryError::Precondition(format!(
            "{missing} is not reachable from {root}"
        )));
    }
    Ok(SpanningTree {
        root: root.clone(),
        parent,
    })
}

/// Children of `v` in the tree, in name order.
pub fn children(tree: &SpanningTree, v: &Vertex) -> Vec<Vertex> {
    tree.parent
        .iter()
        .filter(|(_, p)| *p == v)
        .map(|(c, _)| c.clone())
        .collect()
}

/// Statements sending `var` to every child of `v`.
pub(crate) fn forward(tree: &SpanningTree, v: &Vertex, var: &str) -> String {
    children(tree, v)
        .iter()
        .map(|c| format!("{} ! {var};\n", q(c)))
        .collect()
}

/// Per-vertex program fragments: the root stores `payload` (an expression
/// in program syntax) into `var`, every other vertex receives it from its
/// tree parent, and everybody forwards it to its children. On a single
/// vertex the fragment performs no communication.
pub fn spanning_tree_broadcast(
    net: &Network,
    root: &Vertex,
    var: &str,
    payload: &str,
) -> Result<BTreeMap<Vertex, String>, LibraryError> {
    let tree = bfs_tree(net, root)?;
    Ok(net
        .vertices()
        .iter()
        .map(|v| {
            let head = match tree.parent.get(v) {
                None => format!("{var} := {payload};\n"),
                Some(p) => format!("{} ? {var};\n", q(p)),
            };
            (v.clone(), head + &forward(&tree, v, var))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{explore, Limits, Outcome, VarName};
    use crate::lang::Value;
    use crate::library::{networks, parse_generated, system_of};

    #[test]
    fn tree_on_cycle() {
        let net = networks::three_cycle();
        let t = bfs_tree(&net, &Vertex::new("2")).unwrap();
        assert_eq!(t.parent[&Vertex::new("3")], Vertex::new("2"));
        assert_eq!(t.parent[&Vertex::new("1")], Vertex::new("3"));
        assert_eq!(children(&t, &Vertex::new("2")), vec![Vertex::new("3")]);
        let broken = Network::from_strs(&["a", "b"], &[("a", "b")]).unwrap();
        assert!(bfs_tree(&broken, &Vertex::new("b")).is_err());
    }

    #[test]
    fn broadcast_delivers_payload_everywhere() {
        let net = networks::positive();
        let root = Vertex::new("4");
        let frags = spanning_tree_broadcast(&net, &root, "v", "self").unwrap();
        let programs = frags
            .iter()
            .map(|(v, f)| (v.clone(), parse_generated(v.as_str(), f).unwrap()))
            .collect();
        let sys = system_of(&net, programs).unwrap();
        let g = explore(&sys, Limits::default()).unwrap();
        let terms: Vec<_> = g.terminals().collect();
        assert!(terms.iter().all(|(_, o)| *o == Outcome::ProperlyTerminated));
        for (id, _) in terms {
            for v in net.vertices() {
                let got = g.machine().read(g.state(id), v, &VarName::plain("v"));
                assert_eq!(got, Some(Value::Atom(root.clone())));
            }
        }
    }

    #[test]
    fn single_vertex_broadcast_is_silent() {
        let net = Network::from_strs(&["only"], &[]).unwrap();
        let f = spanning_tree_broadcast(&net, &Vertex::new("only"), "v", "1").unwrap();
        assert!(!f[&Vertex::new("only")].contains('!'));
    }
}
