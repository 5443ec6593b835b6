//! Finite least-fixpoint computations comparing the norm of a
//! semi-positive code with the order type of a finite linear order.
//!
//! Both directions run a monotone operator over a finite universe: the
//! subterm closure of the code crossed with the initial segments of the
//! order. Iteration from the empty table stabilizes in at most
//! universe-many steps; the root entry then answers the comparison. The
//! operators are exposed so tests can confirm that the computed tables
//! really are fixed points.

use std::collections::{BTreeSet, HashMap};

use crate::order::LinOrder;
use crate::spc::Spc;

/// The shared finite universe: indexed subterms of a code (children by
/// index, DAG-aware) and initial-segment lengths 0..=order_type.
pub struct Universe {
    children: Vec<Option<Vec<usize>>>,
    root: usize,
    segments: usize,
}

impl Universe {
    pub fn new(c: &Spc, b: &LinOrder) -> Self {
        fn collect(
            c: &Spc,
            children: &mut Vec<Option<Vec<usize>>>,
            index: &mut HashMap<*const Spc, usize>,
        ) -> usize {
            let key = c as *const Spc;
            if let Some(&i) = index.get(&key) {
                return i;
            }
            let entry = match c {
                Spc::Leaf(_) => None,
                Spc::Node(grid) => Some(
                    grid.iter()
                        .flatten()
                        .map(|child| collect(child, children, index))
                        .collect(),
                ),
            };
            children.push(entry);
            let i = children.len() - 1;
            index.insert(key, i);
            i
        }
        let mut children = Vec::new();
        let root = collect(c, &mut children, &mut HashMap::new());
        Universe { children, root, segments: b.order_type() + 1 }
    }

    pub fn subterm_count(&self) -> usize {
        self.children.len()
    }

    pub fn segment_count(&self) -> usize {
        self.segments
    }

    /// One application of the norm-below-order operator. An entry (s, t)
    /// asserts that the norm of subterm s is at most the segment length t:
    /// leaves hold everywhere, a node holds at t iff all its children hold
    /// at some shorter segment.
    pub fn phi_step(&self, table: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (s, kids) in self.children.iter().enumerate() {
            for t in 0..self.segments {
                let holds = match kids {
                    None => true,
                    Some(kids) => {
                        (0..t).any(|t2| kids.iter().all(|k| table.contains(&(*k, t2))))
                    }
                };
                if holds {
                    out.insert((s, t));
                }
            }
        }
        out
    }

    /// One application of the order-below-norm operator. An entry (t, s)
    /// asserts that the segment length t is at most the norm of subterm s:
    /// the empty segment holds everywhere, a longer segment holds at a node
    /// iff some child carries the segment one shorter, and never at a leaf.
    pub fn psi_step(&self, table: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (s, kids) in self.children.iter().enumerate() {
            for t in 0..self.segments {
                let holds = match (t, kids) {
                    (0, _) => true,
                    (_, None) => false,
                    (t, Some(kids)) => kids.iter().any(|k| table.contains(&(t - 1, *k))),
                };
                if holds {
                    out.insert((t, s));
                }
            }
        }
        out
    }

    /// Least fixed point of a monotone step.
    pub fn lfp(
        &self,
        step: impl Fn(&Universe, &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)>,
    ) -> BTreeSet<(usize, usize)> {
        let mut table = BTreeSet::new();
        let bound = self.children.len() * self.segments + 1;
        for _ in 0..=bound {
            let next = step(self, &table);
            if next == table {
                return table;
            }
            table = next;
        }
        unreachable!("monotone operator failed to stabilize within the universe bound")
    }

    pub fn root(&self) -> usize {
        self.root
    }
}

/// Whether the norm of the code is at most the order type, by fixpoint.
pub fn norm_le_wo(c: &Spc, b: &LinOrder) -> bool {
    let u = Universe::new(c, b);
    let table = u.lfp(Universe::phi_step);
    table.contains(&(u.root(), b.order_type()))
}

/// Whether the order type is at most the norm of the code, by fixpoint.
pub fn wo_le_norm(b: &LinOrder, c: &Spc) -> bool {
    let u = Universe::new(c, b);
    let table = u.lfp(Universe::psi_step);
    table.contains(&(b.order_type(), u.root()))
}
