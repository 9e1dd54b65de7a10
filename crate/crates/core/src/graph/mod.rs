//! Directed communication graphs: connectivity predicates, automorphism
//! enumeration, orbit analysis and the peer-to-peer predicate.

mod automorphism;
mod perm;
mod text;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use automorphism::{
    automorphisms, automorphisms_bounded, wamoti, wamoti_bounded, AutomorphismSearch,
    DEFAULT_SEARCH_BOUND,
};
pub use perm::{check_invariant, PermError, Permutation};
pub(crate) use text::{classify as classify_line, strip_comment, GraphLine};
pub use text::{parse_network, render_network};

/// Opaque vertex (process) name.
///
/// Names compare lexicographically, which fixes iteration and report order
/// everywhere in the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(Arc<str>);

impl Vertex {
    pub fn new(name: &str) -> Self {
        Vertex(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for Vertex {
    fn from(s: &str) -> Self {
        Vertex::new(s)
    }
}

impl From<String> for Vertex {
    fn from(s: String) -> Self {
        Vertex(Arc::from(s))
    }
}

impl AsRef<str> for Vertex {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Vertex {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {0} -> {1} has an undeclared endpoint")]
    UndeclaredEndpoint(Vertex, Vertex),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(Vertex),
    #[error("automorphism search over {vertices} vertices exceeds the bound of {bound}")]
    SearchBoundExceeded { vertices: usize, bound: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// A directed graph without self-loops.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Network {
    vertices: BTreeSet<Vertex>,
    edges: BTreeSet<(Vertex, Vertex)>,
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("vertices", &self.vertices)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Network {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<Vertex>,
        E: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut net = Network::default();
        for v in vertices {
            let v = v.into();
            if !net.vertices.insert(v.clone()) {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        for (a, b) in edges {
            net.add_edge(a, b)?;
        }
        Ok(net)
    }

    /// Convenience constructor from string slices, used heavily in tests.
    pub fn from_strs(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        Network::new(
            vertices.iter().copied(),
            edges.iter().map(|&(a, b)| (Vertex::new(a), Vertex::new(b))),
        )
    }

    pub fn add_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        if self.vertices.contains(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.vertices.insert(v);
        Ok(())
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if !self.vertices.contains(&a) || !self.vertices.contains(&b) {
            return Err(GraphError::UndeclaredEndpoint(a, b));
        }
        self.edges.insert((a, b));
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(Vertex, Vertex)> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, a: &Vertex, b: &Vertex) -> bool {
        self.edges.contains(&(a.clone(), b.clone()))
    }

    /// Out-neighbours of `v` in lexicographic order.
    pub fn successors(&self, v: &Vertex) -> Vec<Vertex> {
        self.edges
            .iter()
            .filter(|(a, _)| a == v)
            .map(|(_, b)| b.clone())
            .collect()
    }

    /// In-neighbours of `v` in lexicographic order.
    pub fn predecessors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self
            .edges
            .iter()
            .filter(|(_, b)| b == v)
            .map(|(a, _)| a.clone())
            .collect();
        out.sort();
        out
    }

    /// The vertices reachable from `start` (including `start`).
    pub fn reachable_from(&self, start: &Vertex) -> BTreeSet<Vertex> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start.clone());
        while let Some(v) = queue.pop_front() {
            if let Some(next) = adj.get(&v) {
                for w in next {
                    if seen.insert(w.clone()) {
                        queue.push_back(w.clone());
                    }
                }
            }
        }
        seen
    }

    pub(crate) fn adjacency(&self) -> BTreeMap<Vertex, Vec<Vertex>> {
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for (a, b) in &self.edges {
            adj.entry(a.clone()).or_default().push(b.clone());
        }
        adj
    }

    /// Whether `a` and `b` are joined by directed paths both ways.
    pub fn strongly_connected_pair(&self, a: &Vertex, b: &Vertex) -> bool {
        self.reachable_from(a).contains(b) && self.reachable_from(b).contains(a)
    }

    /// Every ordered pair of vertices is joined by a directed path.
    pub fn strongly_connected(&self) -> bool {
        let Some(first) = self.vertices.iter().next() else {
            return true;
        };
        if self.reachable_from(first).len() != self.vertices.len() {
            return false;
        }
        let reversed = self.reversed();
        reversed.reachable_from(first).len() == self.vertices.len()
    }

    /// Every unordered pair of distinct vertices has an edge in at least one
    /// direction.
    pub fn directly_connected(&self) -> bool {
        self.missing_direct_pair().is_none()
    }

    /// The first unordered pair without an edge in either direction.
    pub fn missing_direct_pair(&self) -> Option<(Vertex, Vertex)> {
        let vs: Vec<&Vertex> = self.vertices.iter().collect();
        for (i, a) in vs.iter().enumerate() {
            for b in &vs[i + 1..] {
                if !self.has_edge(a, b) && !self.has_edge(b, a) {
                    return Some(((*a).clone(), (*b).clone()));
                }
            }
        }
        None
    }

    pub fn reversed(&self) -> Network {
        Network {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }

    /// The network on `keep` with every edge between kept vertices.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> Network {
        Network {
            vertices: self.vertices.intersection(keep).cloned().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .cloned()
                .collect(),
        }
    }

    /// Whether `p` is defined on this vertex set and maps edges onto edges.
    pub fn is_automorphism(&self, p: &Permutation) -> bool {
        if p.domain() != self.vertices {
            return false;
        }
        self.edges.iter().all(|(a, b)| {
            self.edges
                .contains(&(p.apply(a).clone(), p.apply(b).clone()))
        })
    }
}

/// Outcome of the peer-to-peer predicate with each condition reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P2pReport {
    pub enough_vertices: bool,
    pub strongly_connected: bool,
    pub directly_connected: bool,
    pub missing_pair: Option<(Vertex, Vertex)>,
    /// A witness from `wamoti(net)`, if any exists.
    pub wamoti_witness: Option<Permutation>,
    pub automorphism_count: usize,
}

impl P2pReport {
    pub fn holds(&self) -> bool {
        self.enough_vertices
            && self.strongly_connected
            && self.directly_connected
            && self.wamoti_witness.is_some()
    }
}

impl fmt::Display for P2pReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "at_least_two_vertices={}", self.enough_vertices)?;
        writeln!(f, "strongly_connected={}", self.strongly_connected)?;
        write!(f, "directly_connected={}", self.directly_connected)?;
        if let Some((a, b)) = &self.missing_pair {
            write!(f, " (no edge between {a} and {b})")?;
        }
        writeln!(f)?;
        writeln!(f, "automorphisms={}", self.automorphism_count)?;
        match &self.wamoti_witness {
            Some(p) => writeln!(f, "wamoti_nonempty=true witness={p}")?,
            None => writeln!(f, "wamoti_nonempty=false")?,
        }
        write!(f, "peer_to_peer={}", self.holds())
    }
}

/// Checks the three peer-to-peer conditions plus the two-vertex minimum.
pub fn is_peer_to_peer(net: &Network) -> Result<P2pReport, GraphError> {
    is_peer_to_peer_bounded(net, DEFAULT_SEARCH_BOUND)
}

pub fn is_peer_to_peer_bounded(net: &Network, bound: usize) -> Result<P2pReport, GraphError> {
    let group = automorphisms_bounded(net, bound)?;
    let witness = group
        .iter()
        .find(|p| p.period() > 1 && p.is_well_balanced())
        .cloned();
    Ok(P2pReport {
        enough_vertices: net.len() >= 2,
        strongly_connected: net.strongly_connected(),
        directly_connected: net.directly_connected(),
        missing_pair: net.missing_direct_pair(),
        wamoti_witness: witness,
        automorphism_count: group.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3() -> Network {
        Network::from_strs(&["1", "2", "3"], &[("1", "2"), ("2", "3"), ("3", "1")]).unwrap()
    }

    fn buffer_ring() -> Network {
        Network::from_strs(
            &["R0", "R0'", "R1", "R1'"],
            &[("R0", "R0'"), ("R0'", "R1"), ("R1", "R1'"), ("R1'", "R0")],
        )
        .unwrap()
    }

    /// Reachability by repeated relaxation, independent of the BFS above.
    fn closure_oracle(net: &Network) -> BTreeSet<(Vertex, Vertex)> {
        let mut reach: BTreeSet<(Vertex, Vertex)> = net.edges().clone();
        for v in net.vertices() {
            reach.insert((v.clone(), v.clone()));
        }
        loop {
            let mut added = false;
            let snapshot: Vec<_> = reach.iter().cloned().collect();
            for (a, b) in &snapshot {
                for (c, d) in &snapshot {
                    if b == c && reach.insert((a.clone(), d.clone())) {
                        added = true;
                    }
                }
            }
            if !added {
                return reach;
            }
        }
    }

    #[test]
    fn strong_connectivity_examples() {
        assert!(cycle3().strongly_connected());
        let one_way = Network::from_strs(&["1", "2"], &[("1", "2")]).unwrap();
        assert!(!one_way.strongly_connected());
        let ring = buffer_ring();
        let reach = closure_oracle(&ring);
        let oracle = ring.vertices().iter().all(|a| {
            ring.vertices()
                .iter()
                .all(|b| reach.contains(&(a.clone(), b.clone())))
        });
        assert!(oracle);
        assert!(ring.strongly_connected());
        let single = Network::from_strs(&["x"], &[]).unwrap();
        assert!(single.strongly_connected());
    }

    #[test]
    fn direct_connectivity_examples() {
        assert!(cycle3().directly_connected());
        let ring = buffer_ring();
        assert!(!ring.directly_connected());
        assert_eq!(
            ring.missing_direct_pair(),
            Some((Vertex::new("R0"), Vertex::new("R1")))
        );
        let pair = Network::from_strs(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap();
        assert!(pair.directly_connected());
    }

    #[test]
    fn rejects_malformed_networks() {
        assert_eq!(
            Network::from_strs(&["a"], &[("a", "a")]),
            Err(GraphError::SelfLoop(Vertex::new("a")))
        );
        assert!(matches!(
            Network::from_strs(&["a"], &[("a", "b")]),
            Err(GraphError::UndeclaredEndpoint(..))
        ));
        assert!(matches!(
            Network::from_strs(&["a", "a"], &[]),
            Err(GraphError::DuplicateVertex(_))
        ));
    }

    #[test]
    fn peer_to_peer_examples() {
        let r = is_peer_to_peer(&cycle3()).unwrap();
        assert!(r.holds());
        let pair = Network::from_strs(&["P0", "P1"], &[("P0", "P1"), ("P1", "P0")]).unwrap();
        assert!(is_peer_to_peer(&pair).unwrap().holds());
        let r = is_peer_to_peer(&buffer_ring()).unwrap();
        assert!(!r.holds());
        assert!(r.strongly_connected);
        assert!(!r.directly_connected);
        let single = Network::from_strs(&["x"], &[]).unwrap();
        let r = is_peer_to_peer(&single).unwrap();
        assert!(r.strongly_connected && r.directly_connected && !r.enough_vertices);
        assert!(!r.holds());
    }
}
