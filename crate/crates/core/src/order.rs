//! Finite linear orders on sets of naturals, and the order assigned to a
//! finite prefix-closed tree by comparing its member sequences in the
//! Kleene-Brouwer way.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num::bigint::BigUint;

use crate::error::{Error, Result};
use crate::seq::{self, FinSeq};

/// A finite linear order: a field of naturals and the full non-strict
/// relation on it. Construction validates the linear-order conditions, so
/// a value of this type is always reflexive, antisymmetric, transitive and
/// total on its field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinOrder {
    field: BTreeSet<BigUint>,
    relation: BTreeSet<(BigUint, BigUint)>,
}

impl LinOrder {
    pub fn new(field: BTreeSet<BigUint>, relation: BTreeSet<(BigUint, BigUint)>) -> Result<Self> {
        for (a, b) in &relation {
            if !field.contains(a) || !field.contains(b) {
                return Err(Error::Malformed("relation pair outside the field".into()));
            }
        }
        for a in &field {
            if !relation.contains(&(a.clone(), a.clone())) {
                return Err(Error::Malformed("relation is not reflexive".into()));
            }
            for b in &field {
                let ab = relation.contains(&(a.clone(), b.clone()));
                let ba = relation.contains(&(b.clone(), a.clone()));
                if !ab && !ba {
                    return Err(Error::Malformed("relation is not total".into()));
                }
                if ab && ba && a != b {
                    return Err(Error::Malformed("relation is not antisymmetric".into()));
                }
                for c in &field {
                    if ab
                        && relation.contains(&(b.clone(), c.clone()))
                        && !relation.contains(&(a.clone(), c.clone()))
                    {
                        return Err(Error::Malformed("relation is not transitive".into()));
                    }
                }
            }
        }
        Ok(LinOrder { field, relation })
    }

    /// Build the order whose relation follows the given element list.
    pub fn from_sorted(elements: &[BigUint]) -> Result<Self> {
        let field: BTreeSet<BigUint> = elements.iter().cloned().collect();
        if field.len() != elements.len() {
            return Err(Error::Malformed("duplicate elements".into()));
        }
        let mut relation = BTreeSet::new();
        for (i, a) in elements.iter().enumerate() {
            for b in &elements[i..] {
                relation.insert((a.clone(), b.clone()));
            }
        }
        Ok(LinOrder { field, relation })
    }

    /// The empty order.
    pub fn empty() -> Self {
        LinOrder { field: BTreeSet::new(), relation: BTreeSet::new() }
    }

    pub fn field(&self) -> &BTreeSet<BigUint> {
        &self.field
    }

    pub fn relation(&self) -> &BTreeSet<(BigUint, BigUint)> {
        &self.relation
    }

    /// Finite linear orders are well-orders; the order type is the size.
    pub fn order_type(&self) -> usize {
        self.field.len()
    }

    pub fn le(&self, a: &BigUint, b: &BigUint) -> bool {
        self.relation.contains(&(a.clone(), b.clone()))
    }

    pub fn lt(&self, a: &BigUint, b: &BigUint) -> bool {
        a != b && self.le(a, b)
    }

    /// Field elements listed in relation order.
    pub fn sorted_elements(&self) -> Vec<BigUint> {
        let mut v: Vec<BigUint> = self.field.iter().cloned().collect();
        v.sort_by(|a, b| {
            if a == b {
                Ordering::Equal
            } else if self.le(a, b) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        });
        v
    }
}

/// True iff `t` is nonempty and closed under prefixes.
pub fn is_prefix_closed(t: &[FinSeq]) -> bool {
    if t.is_empty() {
        return false;
    }
    let set: BTreeSet<&FinSeq> = t.iter().collect();
    t.iter().all(|u| (0..u.len()).all(|k| set.contains(&u[..k].to_vec())))
}

/// The linear order on the codes of a finite prefix-closed tree induced by
/// Kleene-Brouwer comparison of the members.
pub fn lo_code_of_tree(t: &[FinSeq]) -> Result<LinOrder> {
    if !is_prefix_closed(t) {
        return Err(Error::Precondition(
            "tree must be nonempty and closed under prefixes".into(),
        ));
    }
    let mut members: Vec<FinSeq> = t.to_vec();
    members.sort();
    members.dedup();
    members.sort_by(|a, b| seq::kb_compare(a, b));
    let codes: Vec<BigUint> =
        members.iter().map(|u| seq::encode_seq(u)).collect::<Result<_>>()?;
    LinOrder::from_sorted(&codes)
}

/// Coordinatewise comparison of characteristic functions: every related
/// pair of `a` is related in `b`.
pub fn lo_embedding_check(a: &LinOrder, b: &LinOrder) -> bool {
    a.relation.is_subset(&b.relation)
}
