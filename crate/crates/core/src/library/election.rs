//! Pairwise synchronization with input guards only, built on top of an
//! election.
//!
//! After the election the leader broadcasts the name of a hub. The hub
//! collects one hello from every other vertex, numbering them in arrival
//! order, then for every pair of followers tells one side to send and the
//! other to receive. The direction follows the arrival order when both
//! edges exist; a single edge fixes it.

use std::collections::{BTreeMap, BTreeSet};

use super::broadcast::{bfs_tree, forward};
use super::{check_system_dialect, init_all_orders, parse_generated, q, system_of, LibraryError};
use crate::graph::{automorphisms, Network, Vertex};
use crate::lang::{Dialect, System};
use crate::library::networks;

/// Program text that ends with `leader` set at every vertex.
#[derive(Debug, Clone)]
pub struct ElectionPhase {
    /// Statement list per vertex, each ending with `;`.
    pub fragments: BTreeMap<Vertex, String>,
    /// Atoms the fragments use.
    pub atoms: BTreeSet<String>,
    /// Every value `leader` can take.
    pub leaders: BTreeSet<Vertex>,
    /// Whether the leader is fixed in advance rather than elected.
    pub stub: bool,
}

impl ElectionPhase {
    /// Assigns `leader` outright. Only sound on networks without
    /// non-trivial automorphisms, where a fixed name breaks no symmetry.
    pub fn stub(net: &Network, leader: &Vertex) -> Result<Self, LibraryError> {
        if !net.vertices().contains(leader) {
            return Err(LibraryError::Precondition(format!(
                "{leader} is not a vertex"
            )));
        }
        Ok(ElectionPhase {
            fragments: net
                .vertices()
                .iter()
                .map(|v| (v.clone(), format!("leader := {};\n", q(leader))))
                .collect(),
            atoms: BTreeSet::new(),
            leaders: [leader.clone()].into(),
            stub: true,
        })
    }
}

/// Which vertex coordinates the synchronization phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HubChoice {
    /// A fixed vertex.
    Fixed(Vertex),
    /// Whoever was elected.
    Leader,
}

fn eligible_hub(net: &Network, h: &Vertex) -> bool {
    net.vertices()
        .iter()
        .filter(|w| *w != h)
        .all(|w| net.has_edge(h, w) && net.has_edge(w, h))
}

fn coordinator(net: &Network, h: &Vertex) -> String {
    let followers: Vec<&Vertex> = net.vertices().iter().filter(|w| *w != h).collect();
    let inits: Vec<String> = followers
        .iter()
        .map(|w| format!("order[{}] := -1", q(w)))
        .collect();
    let mut t = init_all_orders(&inits);
    t.push_str("count := 0;\n");
    if !followers.is_empty() {
        let hello: Vec<String> = followers
            .iter()
            .map(|w| {
                format!(
                    "order[{0}] = -1 & {0} ? x -> order[{0}] := count; count := count + 1",
                    q(w)
                )
            })
            .collect();
        t.push_str(&format!("do [ {} ] od;\n", hello.join("\n  [] ")));
    }
    let order = |a: &Vertex, b: &Vertex| {
        format!(
            "{} ! contact({}); {} ! listen({});\n",
            q(a),
            q(b),
            q(b),
            q(a)
        )
    };
    for (i, a) in followers.iter().enumerate() {
        for b in &followers[i + 1..] {
            match (net.has_edge(a, b), net.has_edge(b, a)) {
                (true, true) => t.push_str(&format!(
                    "if [ order[{qa}] < order[{qb}] -> {ab} [] not order[{qa}] < order[{qb}] -> {ba} ] fi;\n",
                    qa = q(a),
                    qb = q(b),
                    ab = order(a, b),
                    ba = order(b, a),
                )),
                (true, false) => t.push_str(&order(a, b)),
                (false, true) => t.push_str(&order(b, a)),
                (false, false) => unreachable!("directly connected network"),
            }
        }
    }
    t
}

fn follower(net: &Network, h: &Vertex, c: &Vertex) -> String {
    let others: Vec<&Vertex> = net
        .vertices()
        .iter()
        .filter(|w| *w != h && *w != c)
        .collect();
    let mut t = format!("{} ! 0;\n", q(h));
    if others.is_empty() {
        return t;
    }
    let mut cases = Vec::new();
    for w in &others {
        if net.has_edge(c, w) {
            cases.push(format!("m = contact({0}) -> {0} ! 0", q(w)));
        }
        if net.has_edge(w, c) {
            cases.push(format!("m = listen({0}) -> {0} ? x", q(w)));
        }
    }
    t.push_str(&format!(
        "num := {};\ndo [ 0 < num & {} ? m -> if [ {} ] fi; num := num - 1 ] od;\n",
        others.len(),
        q(h),
        cases.join("\n    [] ")
    ));
    t
}

fn dispatch(var: &str, cases: Vec<(&Vertex, String)>) -> String {
    if cases.len() == 1 {
        return cases.into_iter().next().expect("one case").1;
    }
    let branches: Vec<String> = cases
        .into_iter()
        .map(|(v, body)| format!("{var} = {} -> {body}", q(v)))
        .collect();
    format!("if [ {} ] fi;\n", branches.join("\n  [] "))
}

/// Composes `election` with the hub broadcast and the coordinated
/// synchronization phase. Requires a strongly and directly connected
/// network and a hub linked both ways to every other vertex. All
/// generated programs use input guards only.
pub fn gen_election_sync_in(
    net: &Network,
    hub: HubChoice,
    election: ElectionPhase,
) -> Result<System, LibraryError> {
    if !net.strongly_connected() {
        return Err(LibraryError::Precondition(
            "network is not strongly connected".into(),
        ));
    }
    if let Some((a, b)) = net.missing_direct_pair() {
        return Err(LibraryError::Precondition(format!(
            "{a} and {b} are not directly connected"
        )));
    }
    if election.stub && automorphisms(net)?.len() > 1 {
        return Err(LibraryError::Precondition(
            "a fixed leader is only allowed on networks without non-trivial automorphisms".into(),
        ));
    }
    if let Some(v) = net
        .vertices()
        .iter()
        .find(|v| !election.fragments.contains_key(*v))
    {
        return Err(LibraryError::Precondition(format!(
            "election phase has no fragment for {v}"
        )));
    }
    let hubs: BTreeSet<Vertex> = match &hub {
        HubChoice::Fixed(h) => [h.clone()].into(),
        HubChoice::Leader => election.leaders.clone(),
    };
    if let Some(h) = hubs.iter().find(|h| !eligible_hub(net, h)) {
        return Err(LibraryError::Precondition(format!(
            "{h} is not linked both ways to every other vertex"
        )));
    }
    let trees = election
        .leaders
        .iter()
        .map(|r| Ok((r.clone(), bfs_tree(net, r)?)))
        .collect::<Result<BTreeMap<_, _>, LibraryError>>()?;
    let mut atoms = election.atoms.clone();
    atoms.extend(["contact".to_string(), "listen".to_string()]);
    let header = format!(
        "program election_sync\natoms {};\n",
        atoms.iter().cloned().collect::<Vec<_>>().join(" ")
    );
    let mut programs = BTreeMap::new();
    for c in net.vertices() {
        let mut text = header.clone();
        text.push_str(&election.fragments[c]);
        let announce = election
            .leaders
            .iter()
            .map(|r| {
                let tree = &trees[r];
                let head = match tree.parent.get(c) {
                    None => match &hub {
                        HubChoice::Fixed(h) => format!("hub := {};\n", q(h)),
                        HubChoice::Leader => "hub := self;\n".to_string(),
                    },
                    Some(p) => format!("{} ? hub;\n", q(p)),
                };
                (r, head + &forward(tree, c, "hub"))
            })
            .collect();
        text.push_str(&dispatch("leader", announce));
        let roles = hubs
            .iter()
            .map(|h| {
                let role = if h == c {
                    coordinator(net, h)
                } else {
                    follower(net, h, c)
                };
                (h, role)
            })
            .collect();
        text.push_str(&dispatch("hub", roles));
        programs.insert(c.clone(), parse_generated(c.as_str(), &text)?);
    }
    let sys = system_of(net, programs)?;
    check_system_dialect(&sys, Dialect::In)?;
    Ok(sys)
}

fn candidate(c: &Vertex, other: &Vertex, voters: &[Vertex]) -> String {
    let asked: Vec<String> = voters
        .iter()
        .map(|v| format!("asked[{}] := false", q(v)))
        .collect();
    let mut t = init_all_orders(&asked);
    t.push_str("tokens := 0;\n");
    let ask: Vec<String> = voters
        .iter()
        .map(|v| {
            format!(
                "not asked[{0}] -> {0} ! req; {0} ? ans; asked[{0}] := true;\n      \
                 if [ ans -> tokens := tokens + 1 [] not ans -> skip ] fi",
                q(v)
            )
        })
        .collect();
    t.push_str(&format!("do [ {} ] od;\n", ask.join("\n  [] ")));
    t.push_str(&format!(
        "if [ 1 < tokens -> leader := self [] not 1 < tokens -> leader := {} ] fi;\n",
        q(other)
    ));
    let told: Vec<String> = voters
        .iter()
        .map(|v| format!("told[{}] := false", q(v)))
        .collect();
    let tell: Vec<String> = voters
        .iter()
        .map(|v| format!("not told[{0}] -> {0} ! leader; told[{0}] := true", q(v)))
        .collect();
    t.push_str(&format!(
        "if [ leader = self -> {}do [ {} ] od\n  [] not leader = self -> skip ] fi;\n",
        init_all_orders(&told),
        tell.join("\n  [] ")
    ));
    let _ = c;
    t
}

fn voter(candidates: &[Vertex]) -> String {
    let got: Vec<String> = candidates
        .iter()
        .map(|c| format!("got[{}] := false", q(c)))
        .collect();
    let mut t = init_all_orders(&got);
    t.push_str("awarded := false;\n");
    let answer: Vec<String> = candidates
        .iter()
        .map(|c| {
            format!(
                "not got[{0}] & {0} ? m -> got[{0}] := true;\n      \
                 if [ awarded -> {0} ! false [] not awarded -> {0} ! true; awarded := true ] fi",
                q(c)
            )
        })
        .collect();
    t.push_str(&format!("do [ {} ] od;\n", answer.join("\n  [] ")));
    let hear: Vec<String> = candidates
        .iter()
        .map(|c| format!("{} ? leader -> skip", q(c)))
        .collect();
    t.push_str(&format!("if [ {} ] fi;\n", hear.join(" [] ")));
    t
}

/// Majority vote on the five-vertex network of
/// [`networks::positive`]: `1` and `2` each ask the voters `3`, `4`, `5`
/// for a token, every voter grants exactly one, and the candidate with
/// two tokens wins and informs the voters.
pub fn gen_election_majority_in(net: &Network) -> Result<ElectionPhase, LibraryError> {
    if *net != networks::positive() {
        return Err(LibraryError::Precondition(
            "majority election needs the five-vertex network with candidates 1, 2 \
             and voters 3, 4, 5"
                .into(),
        ));
    }
    let v = |s: &str| Vertex::new(s);
    let candidates = [v("1"), v("2")];
    let voters = [v("3"), v("4"), v("5")];
    let mut fragments = BTreeMap::new();
    fragments.insert(v("1"), candidate(&candidates[0], &candidates[1], &voters));
    fragments.insert(v("2"), candidate(&candidates[1], &candidates[0], &voters));
    for w in &voters {
        fragments.insert(w.clone(), voter(&candidates));
    }
    Ok(ElectionPhase {
        fragments,
        atoms: ["req".to_string()].into(),
        leaders: candidates.into_iter().collect(),
        stub: false,
    })
}
