//! Finite deterministic graph presentations of trees of pairs.
//!
//! A graph tree is a finite labeled graph with a root; its unfolding (the
//! set of label paths that have a run from the root) is an infinite-depth
//! tree of pairs, closed under prefixes by construction. Labels are pairs
//! (a, b): on Cantor-side trees a is a bit and b a letter below the
//! alphabet bound; on Baire-side trees both components are letters. A pair
//! of sequences (u, v) of equal length belongs to the unfolding iff the
//! label path (u(0),v(0)), ..., (u(n-1),v(n-1)) has a run.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Cantor,
    Baire,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTree {
    states: Vec<String>,
    root: usize,
    alphabet_bound: u64,
    side: Side,
    edges: BTreeMap<(usize, u64, u64), usize>,
}

impl GraphTree {
    pub fn new(
        states: Vec<String>,
        root: &str,
        alphabet_bound: u64,
        side: Side,
        edges: &[(String, u64, u64, String)],
    ) -> Result<Self> {
        if alphabet_bound == 0 {
            return Err(Error::Malformed("alphabet bound must be at least 1".into()));
        }
        let index: BTreeMap<&str, usize> =
            states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != states.len() {
            return Err(Error::Malformed("duplicate state names".into()));
        }
        let root =
            *index.get(root).ok_or_else(|| Error::Malformed(format!("unknown root {root:?}")))?;
        let mut map = BTreeMap::new();
        for (from, a, b, to) in edges {
            let from = *index
                .get(from.as_str())
                .ok_or_else(|| Error::Malformed(format!("unknown state {from:?}")))?;
            let to = *index
                .get(to.as_str())
                .ok_or_else(|| Error::Malformed(format!("unknown state {to:?}")))?;
            let (a_bound, b_bound) = match side {
                Side::Cantor => (2, alphabet_bound),
                Side::Baire => (alphabet_bound, alphabet_bound),
            };
            if *a >= a_bound || *b >= b_bound {
                return Err(Error::Malformed(format!("label ({a},{b}) out of bounds")));
            }
            if map.insert((from, *a, *b), to).is_some() {
                return Err(Error::Malformed(format!(
                    "duplicate edge from {} under ({a},{b})",
                    states[from]
                )));
            }
        }
        let tree = GraphTree { states, root, alphabet_bound, side, edges: map };
        let reachable = tree.reachable();
        if reachable.len() != tree.states.len() {
            let dead: Vec<&str> = tree
                .states
                .iter()
                .enumerate()
                .filter(|(i, _)| !reachable.contains(i))
                .map(|(_, s)| s.as_str())
                .collect();
            return Err(Error::Malformed(format!("unreachable states: {dead:?}")));
        }
        Ok(tree)
    }

    fn reachable(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([self.root]);
        seen.insert(self.root);
        while let Some(q) = queue.pop_front() {
            for (_, &to) in self.edges.range((q, 0, 0)..=(q, u64::MAX, u64::MAX)) {
                if seen.insert(to) {
                    queue.push_back(to);
                }
            }
        }
        seen
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn alphabet_bound(&self) -> u64 {
        self.alphabet_bound
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn step(&self, q: usize, a: u64, b: u64) -> Option<usize> {
        self.edges.get(&(q, a, b)).copied()
    }

    /// Outgoing edges of a state in canonical label order (first component
    /// ascending, then second component ascending).
    pub fn unfold_children(&self, q: usize) -> Result<Vec<((u64, u64), usize)>> {
        if q >= self.states.len() {
            return Err(Error::Malformed(format!("unknown state index {q}")));
        }
        Ok(self
            .edges
            .range((q, 0, 0)..=(q, u64::MAX, u64::MAX))
            .map(|(&(_, a, b), &to)| ((a, b), to))
            .collect())
    }

    /// The state reached by a label path from the root, if it has a run.
    pub fn state_of_path(&self, labels: &[(u64, u64)]) -> Option<usize> {
        let mut q = self.root;
        for &(a, b) in labels {
            q = self.step(q, a, b)?;
        }
        Some(q)
    }

    /// Membership of an equal-length pair of sequences in the unfolding.
    pub fn contains_pair(&self, main: &[u64], witness: &[u64]) -> bool {
        main.len() == witness.len()
            && self
                .state_of_path(&main.iter().copied().zip(witness.iter().copied()).collect::<Vec<_>>())
                .is_some()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RawGraphTree::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: RawGraphTree = serde_json::from_value(v.clone())
            .map_err(|e| Error::Malformed(format!("graph tree JSON: {e}")))?;
        raw.build()
    }
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    from: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    bit: Option<u64>,
    letter: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<u64>,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct RawGraphTree {
    states: Vec<String>,
    root: String,
    alphabet_bound: u64,
    edges: Vec<RawEdge>,
}

impl From<&GraphTree> for RawGraphTree {
    fn from(t: &GraphTree) -> Self {
        let edges = t
            .edges
            .iter()
            .map(|(&(from, a, b), &to)| match t.side {
                Side::Cantor => RawEdge {
                    from: t.states[from].clone(),
                    bit: Some(a),
                    letter: b,
                    witness: None,
                    to: t.states[to].clone(),
                },
                Side::Baire => RawEdge {
                    from: t.states[from].clone(),
                    bit: None,
                    letter: a,
                    witness: Some(b),
                    to: t.states[to].clone(),
                },
            })
            .collect();
        RawGraphTree {
            states: t.states.clone(),
            root: t.states[t.root].clone(),
            alphabet_bound: t.alphabet_bound,
            edges,
        }
    }
}

impl RawGraphTree {
    fn build(self) -> Result<GraphTree> {
        let mut side = None;
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let (this_side, a, b) = match (e.bit, e.witness) {
                (Some(bit), None) => (Side::Cantor, bit, e.letter),
                (None, Some(w)) => (Side::Baire, e.letter, w),
                _ => {
                    return Err(Error::Malformed(
                        "edge must carry either bit/letter or letter/witness".into(),
                    ))
                }
            };
            if *side.get_or_insert(this_side) != this_side {
                return Err(Error::Malformed("mixed edge label kinds".into()));
            }
            edges.push((e.from.clone(), a, b, e.to.clone()));
        }
        GraphTree::new(
            self.states,
            &self.root.clone(),
            self.alphabet_bound,
            side.unwrap_or(Side::Cantor),
            &edges,
        )
    }
}
