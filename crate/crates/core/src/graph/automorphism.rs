//! Backtracking automorphism search pruned by degree signatures.

use std::collections::{BTreeMap, BTreeSet};

use super::{GraphError, Network, Permutation, Vertex};

/// Largest vertex count searched unless the caller raises the bound.
pub const DEFAULT_SEARCH_BOUND: usize = 12;

/// Configurable automorphism search over one network.
///
/// Vertices may be restricted to a set of allowed images, which is how
/// extensions of a given base automorphism are found.
pub struct AutomorphismSearch<'a> {
    net: &'a Network,
    bound: usize,
    allowed: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl<'a> AutomorphismSearch<'a> {
    pub fn new(net: &'a Network) -> Self {
        AutomorphismSearch {
            net,
            bound: DEFAULT_SEARCH_BOUND,
            allowed: BTreeMap::new(),
        }
    }

    pub fn bound(mut self, bound: usize) -> Self {
        self.bound = bound;
        self
    }

    /// Only consider images of `v` inside `targets`.
    pub fn restrict(mut self, v: &Vertex, targets: BTreeSet<Vertex>) -> Self {
        match self.allowed.get_mut(v) {
            Some(existing) => {
                *existing = existing.intersection(&targets).cloned().collect();
            }
            None => {
                self.allowed.insert(v.clone(), targets);
            }
        }
        self
    }

    pub fn all(&self) -> Result<Vec<Permutation>, GraphError> {
        let mut out = Vec::new();
        self.run(&mut |p| {
            out.push(p);
            true
        })?;
        Ok(out)
    }

    pub fn first(&self) -> Result<Option<Permutation>, GraphError> {
        let mut found = None;
        self.run(&mut |p| {
            found = Some(p);
            false
        })?;
        Ok(found)
    }

    fn run(&self, emit: &mut dyn FnMut(Permutation) -> bool) -> Result<(), GraphError> {
        let n = self.net.len();
        if n > self.bound {
            return Err(GraphError::SearchBoundExceeded {
                vertices: n,
                bound: self.bound,
            });
        }
        let names: Vec<Vertex> = self.net.vertices().iter().cloned().collect();
        let index: BTreeMap<&Vertex, usize> =
            names.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut adj = vec![vec![false; n]; n];
        for (a, b) in self.net.edges() {
            adj[index[a]][index[b]] = true;
        }
        let signature = |i: usize| {
            let out = (0..n).filter(|&j| adj[i][j]).count();
            let inc = (0..n).filter(|&j| adj[j][i]).count();
            let mutual = (0..n).filter(|&j| adj[i][j] && adj[j][i]).count();
            (out, inc, mutual)
        };
        let sigs: Vec<_> = (0..n).map(signature).collect();
        let candidates: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| sigs[i] == sigs[j])
                    .filter(|&j| match self.allowed.get(&names[i]) {
                        Some(allowed) => allowed.contains(&names[j]),
                        None => true,
                    })
                    .collect()
            })
            .collect();
        // most constrained vertices first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (candidates[i].len(), i));

        let mut state = Backtrack {
            adj: &adj,
            order: &order,
            candidates: &candidates,
            image: vec![usize::MAX; n],
            used: vec![false; n],
        };
        let mut emit_indices = |image: &[usize]| {
            let map = image
                .iter()
                .enumerate()
                .map(|(i, &j)| (names[i].clone(), names[j].clone()))
                .collect();
            emit(Permutation::from_map(map).expect("search yields bijections"))
        };
        state.extend(0, &mut emit_indices);
        Ok(())
    }
}

struct Backtrack<'s> {
    adj: &'s [Vec<bool>],
    order: &'s [usize],
    candidates: &'s [Vec<usize>],
    image: Vec<usize>,
    used: Vec<bool>,
}

impl Backtrack<'_> {
    /// Returns false once the consumer asks to stop.
    fn extend(&mut self, depth: usize, emit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            return emit(&self.image);
        }
        let v = self.order[depth];
        for &w in &self.candidates[v] {
            if self.used[w] || !self.consistent(depth, v, w) {
                continue;
            }
            self.image[v] = w;
            self.used[w] = true;
            let go_on = self.extend(depth + 1, emit);
            self.used[w] = false;
            self.image[v] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }

    fn consistent(&self, depth: usize, v: usize, w: usize) -> bool {
        self.order[..depth].iter().all(|&u| {
            let iu = self.image[u];
            self.adj[v][u] == self.adj[w][iu] && self.adj[u][v] == self.adj[iu][w]
        })
    }
}

/// All edge-preserving permutations of the vertex set, in lexicographic
/// order of their mapping tables.
pub fn automorphisms(net: &Network) -> Result<Vec<Permutation>, GraphError> {
    automorphisms_bounded(net, DEFAULT_SEARCH_BOUND)
}

pub fn automorphisms_bounded(net: &Network, bound: usize) -> Result<Vec<Permutation>, GraphError> {
    let mut group = AutomorphismSearch::new(net).bound(bound).all()?;
    group.sort();
    Ok(group)
}

/// Non-trivial well-balanced automorphisms.
pub fn wamoti(net: &Network) -> Result<Vec<Permutation>, GraphError> {
    wamoti_bounded(net, DEFAULT_SEARCH_BOUND)
}

pub fn wamoti_bounded(net: &Network, bound: usize) -> Result<Vec<Permutation>, GraphError> {
    Ok(automorphisms_bounded(net, bound)?
        .into_iter()
        .filter(|p| p.period() > 1 && p.is_well_balanced())
        .collect())
}
