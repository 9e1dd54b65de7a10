use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("{0} appears twice in the cycle notation")]
    Repeated(Vertex),
    #[error("{0} is not in the permutation domain")]
    OutsideDomain(Vertex),
    #[error("mapping is not a bijection: {0} is hit twice")]
    NotInjective(Vertex),
    #[error("cycle notation: {0}")]
    Syntax(String),
    #[error("domains differ")]
    DomainMismatch,
}

/// A bijection of a finite vertex set onto itself.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    map: BTreeMap<Vertex, Vertex>,
}

impl Permutation {
    pub fn identity<'a, I: IntoIterator<Item = &'a Vertex>>(domain: I) -> Self {
        Permutation {
            map: domain.into_iter().map(|v| (v.clone(), v.clone())).collect(),
        }
    }

    pub fn from_map(map: BTreeMap<Vertex, Vertex>) -> Result<Self, PermError> {
        let mut hit = BTreeSet::new();
        for w in map.values() {
            if !map.contains_key(w) {
                return Err(PermError::OutsideDomain(w.clone()));
            }
            if !hit.insert(w.clone()) {
                return Err(PermError::NotInjective(w.clone()));
            }
        }
        Ok(Permutation { map })
    }

    /// Builds a permutation of `domain` from disjoint cycles; unmentioned
    /// vertices are fixed.
    pub fn from_cycles<'a, I>(domain: I, cycles: &[Vec<Vertex>]) -> Result<Self, PermError>
    where
        I: IntoIterator<Item = &'a Vertex>,
    {
        let mut map: BTreeMap<Vertex, Vertex> =
            domain.into_iter().map(|v| (v.clone(), v.clone())).collect();
        let mut seen = BTreeSet::new();
        for cycle in cycles {
            for (i, v) in cycle.iter().enumerate() {
                if !map.contains_key(v) {
                    return Err(PermError::OutsideDomain(v.clone()));
                }
                if !seen.insert(v.clone()) {
                    return Err(PermError::Repeated(v.clone()));
                }
                let next = &cycle[(i + 1) % cycle.len()];
                map.insert(v.clone(), next.clone());
            }
        }
        Ok(Permutation { map })
    }

    /// Parses cycle notation such as `(1 2 3)(1a 2a)` over `domain`.
    pub fn parse_cycles<'a, I>(domain: I, text: &str) -> Result<Self, PermError>
    where
        I: IntoIterator<Item = &'a Vertex>,
    {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(after_open) = rest.strip_prefix('(') else {
                return Err(PermError::Syntax(format!("expected '(' at {rest:?}")));
            };
            let Some(close) = after_open.find(')') else {
                return Err(PermError::Syntax("unclosed cycle".into()));
            };
            let body = &after_open[..close];
            let names: Vec<Vertex> = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(Vertex::new)
                .collect();
            if !names.is_empty() {
                cycles.push(names);
            }
            rest = after_open[close + 1..].trim_start();
        }
        Permutation::from_cycles(domain, &cycles)
    }

    pub fn domain(&self) -> BTreeSet<Vertex> {
        self.map.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Image of `v`; vertices outside the domain are fixed.
    pub fn apply<'a>(&'a self, v: &'a Vertex) -> &'a Vertex {
        self.map.get(v).unwrap_or(v)
    }

    pub fn get(&self, v: &str) -> Option<&Vertex> {
        self.map.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, &Vertex)> {
        self.map.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.map.len() != other.map.len() || !self.map.keys().eq(other.map.keys()) {
            return Err(PermError::DomainMismatch);
        }
        Ok(Permutation {
            map: other
                .map
                .iter()
                .map(|(v, w)| (v.clone(), self.apply(w).clone()))
                .collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            map: self
                .map
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }

    /// `k`-fold self-composition.
    pub fn pow(&self, k: usize) -> Permutation {
        Permutation {
            map: self
                .map
                .keys()
                .map(|v| (v.clone(), self.apply_times(v, k)))
                .collect(),
        }
    }

    pub fn apply_times(&self, v: &Vertex, k: usize) -> Vertex {
        let mut cur = v.clone();
        for _ in 0..k {
            cur = self.apply(&cur).clone();
        }
        cur
    }

    /// The orbits, each listed starting from its least member and following
    /// the permutation. Orbits are ordered by least member.
    pub fn orbits(&self) -> Vec<Vec<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.map.keys() {
            if seen.contains(v) {
                continue;
            }
            let mut orbit = vec![v.clone()];
            seen.insert(v.clone());
            let mut cur = self.apply(v);
            while cur != v {
                seen.insert(cur.clone());
                orbit.push(cur.clone());
                cur = self.apply(cur);
            }
            out.push(orbit);
        }
        out
    }

    /// The orbit containing `v`.
    pub fn orbit_of(&self, v: &Vertex) -> Vec<Vertex> {
        let mut orbit = vec![v.clone()];
        let mut cur = self.apply(v);
        while cur != v {
            orbit.push(cur.clone());
            cur = self.apply(cur);
        }
        orbit
    }

    /// Least `p > 0` with `self^p = id`: the lcm of the orbit sizes.
    pub fn period(&self) -> usize {
        self.orbits().iter().map(Vec::len).fold(1, lcm)
    }

    /// All orbits have the same cardinality.
    pub fn is_well_balanced(&self) -> bool {
        let mut sizes = self.orbits().into_iter().map(|o| o.len());
        match sizes.next() {
            Some(first) => sizes.all(|s| s == first),
            None => true,
        }
    }

    /// Maps every vertex of `set` through the permutation.
    pub fn image(&self, set: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
        set.iter().map(|v| self.apply(v).clone()).collect()
    }

    /// Restriction to `keep`, if `keep` is invariant.
    pub fn restrict(&self, keep: &BTreeSet<Vertex>) -> Option<Permutation> {
        if &self.image(keep) != keep {
            return None;
        }
        Some(Permutation {
            map: keep
                .iter()
                .map(|v| (v.clone(), self.apply(v).clone()))
                .collect(),
        })
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Whether every permutation in `group` maps `w` onto itself.
pub fn check_invariant(w: &BTreeSet<Vertex>, group: &[Permutation]) -> bool {
    group.iter().all(|p| &p.image(w) == w)
}

impl fmt::Display for Permutation {
    /// Cycle notation without fixed points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for orbit in self.orbits() {
            if orbit.len() < 2 {
                continue;
            }
            any = true;
            f.write_str("(")?;
            for (i, v) in orbit.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dom(names: &[&str]) -> Vec<Vertex> {
        names.iter().map(|s| Vertex::new(s)).collect()
    }

    fn set(names: &[&str]) -> BTreeSet<Vertex> {
        names.iter().map(|s| Vertex::new(s)).collect()
    }

    fn tau() -> Permutation {
        Permutation::parse_cycles(&dom(&["1", "2", "3", "4"]), "(1 3)(2 4)").unwrap()
    }

    #[test]
    fn period_examples() {
        let d = dom(&["a", "b", "c"]);
        assert_eq!(Permutation::identity(&d).period(), 1);
        let swap = Permutation::parse_cycles(&d[..2], "(a b)").unwrap();
        assert_eq!(swap.period(), 2);
        assert_eq!(tau().period(), 2);
    }

    #[test]
    fn orbit_examples() {
        let d = dom(&["a", "b"]);
        assert_eq!(
            Permutation::identity(&d).orbits(),
            vec![dom(&["a"]), dom(&["b"])]
        );
        assert_eq!(tau().orbits(), vec![dom(&["1", "3"]), dom(&["2", "4"])]);
        let helpers = dom(&["1a", "1b", "1c", "2a", "2b", "2c"]);
        let six = Permutation::parse_cycles(&helpers, "(2a 1a 2c 1b 2b 1c)").unwrap();
        let orbits = six.orbits();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].len(), 6);
        assert_eq!(
            six.orbit_of(&Vertex::new("2a")),
            dom(&["2a", "1a", "2c", "1b", "2b", "1c"])
        );
    }

    #[test]
    fn well_balanced_examples() {
        let d = dom(&["1", "2", "3"]);
        assert!(Permutation::identity(&d).is_well_balanced());
        let partial = Permutation::parse_cycles(&d, "(1 2)").unwrap();
        assert!(!partial.is_well_balanced());
        assert!(tau().is_well_balanced());
    }

    #[test]
    fn invariance_examples() {
        let group = vec![Permutation::identity(&dom(&["1", "2", "3", "4"])), tau()];
        assert!(check_invariant(&set(&["1", "3"]), &group));
        let d = dom(&["1", "2"]);
        let swap = vec![
            Permutation::identity(&d),
            Permutation::parse_cycles(&d, "(1 2)").unwrap(),
        ];
        assert!(!check_invariant(&set(&["1"]), &swap));
        assert!(check_invariant(&set(&["1"]), &swap[..1]));
    }

    #[test]
    fn cycle_notation_errors() {
        let d = dom(&["1", "2"]);
        assert!(matches!(
            Permutation::parse_cycles(&d, "(1 3)"),
            Err(PermError::OutsideDomain(_))
        ));
        assert!(matches!(
            Permutation::parse_cycles(&d, "(1 2)(1)"),
            Err(PermError::Repeated(_))
        ));
        assert!(matches!(
            Permutation::parse_cycles(&d, "1 2"),
            Err(PermError::Syntax(_))
        ));
        assert_eq!(
            Permutation::parse_cycles(&d, "").unwrap(),
            Permutation::identity(&d)
        );
    }

    fn arb_perm() -> impl Strategy<Value = Permutation> {
        (1usize..8)
            .prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|images| {
                let map = images
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (Vertex::new(&format!("v{i}")), Vertex::new(&format!("v{j}"))))
                    .collect();
                Permutation::from_map(map).unwrap()
            })
    }

    proptest! {
        #[test]
        fn period_is_lcm_and_minimal(p in arb_perm()) {
            let period = p.period();
            prop_assert!(p.pow(period).is_identity());
            for k in 1..period {
                prop_assert!(!p.pow(k).is_identity());
            }
        }

        #[test]
        fn well_balanced_iff_no_partial_fixed_points(p in arb_perm()) {
            // all orbit sizes equal <=> no power strictly between id and p^period fixes a point
            let alt = (1..p.period()).all(|k| {
                let q = p.pow(k);
                let no_fixed = q.iter().all(|(a, b)| a != b);
                no_fixed
            });
            prop_assert_eq!(p.is_well_balanced(), alt);
        }

        #[test]
        fn orbits_partition_and_are_invariant(p in arb_perm()) {
            let orbits = p.orbits();
            let total: usize = orbits.iter().map(Vec::len).sum();
            prop_assert_eq!(total, p.len());
            for o in &orbits {
                let s: BTreeSet<Vertex> = o.iter().cloned().collect();
                prop_assert_eq!(p.image(&s), s);
            }
        }

        #[test]
        fn inverse_and_cycle_text_round_trip(p in arb_perm()) {
            let id = Permutation::identity(&p.domain());
            prop_assert_eq!(p.compose(&p.inverse()).unwrap(), id);
            let reparsed = Permutation::parse_cycles(&p.domain(), &p.to_string()).unwrap();
            prop_assert_eq!(reparsed, p);
        }
    }
}
