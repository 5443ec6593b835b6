//! Set codes over Cantor space.
//!
//! [`Spc`] is the semi-positive code AST: leaves denote the empty set
//! (level 0), the full space (level 1), or the coordinate set
//! {x : x(k) = 1} (level k+2); a node denotes the union over its rows of
//! the intersection of each row. Negation cannot be expressed, which is
//! why every code of this shape denotes a monotone set.
//!
//! [`Borel`] is the complement-of-union AST: a leaf denotes the complement
//! of the cylinder of a finite binary word, a node the union of the
//! complements of its children. Cylinders replace metric balls as the
//! basic open sets; the two coincide in Cantor space.
//!
//! Shared subterms are expressed through `Rc`; evaluation and norms are
//! memoized by node address so DAG-shaped codes cost their size, not their
//! unfolding.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::UpPoint;

pub const DEFAULT_SUPPORT_BOUND: usize = 16;

/// Semi-positive code: union of intersections of coordinate sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spc {
    /// 0 denotes the empty set, 1 the full space, k+2 the coordinate set
    /// {x : x(k) = 1}.
    Leaf(u64),
    /// Union over rows of the intersection of each row; both dimensions
    /// are nonempty.
    #[serde(rename = "union")]
    Node(Vec<Vec<Rc<Spc>>>),
}

impl Spc {
    pub fn leaf_empty() -> Rc<Spc> {
        Rc::new(Spc::Leaf(0))
    }

    pub fn leaf_full() -> Rc<Spc> {
        Rc::new(Spc::Leaf(1))
    }

    /// The coordinate set {x : x(k) = 1}.
    pub fn leaf_coord(k: u64) -> Rc<Spc> {
        Rc::new(Spc::Leaf(k + 2))
    }

    pub fn union_of(grid: Vec<Vec<Rc<Spc>>>) -> Result<Rc<Spc>> {
        if grid.is_empty() || grid.iter().any(|row| row.is_empty()) {
            return Err(Error::Malformed("code grid must have nonempty rows".into()));
        }
        Ok(Rc::new(Spc::Node(grid)))
    }

    /// Validates the nonempty-grid invariant recursively (deserialized
    /// codes come through here).
    pub fn validate(&self) -> Result<()> {
        match self {
            Spc::Leaf(_) => Ok(()),
            Spc::Node(grid) => {
                if grid.is_empty() || grid.iter().any(|row| row.is_empty()) {
                    return Err(Error::Malformed("code grid must have nonempty rows".into()));
                }
                grid.iter().flatten().try_for_each(|c| c.validate())
            }
        }
    }
}

fn eval_spc_at(c: &Spc, x: &UpPoint, memo: &mut HashMap<*const Spc, bool>) -> bool {
    let key = c as *const Spc;
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = match c {
        Spc::Leaf(0) => false,
        Spc::Leaf(1) => true,
        Spc::Leaf(level) => x.coordinate((level - 2) as usize) == 1,
        Spc::Node(grid) => grid
            .iter()
            .any(|row| row.iter().all(|child| eval_spc_at(child, x, memo))),
    };
    memo.insert(key, v);
    v
}

/// Membership of a point in the set denoted by a semi-positive code.
pub fn eval_spc(c: &Spc, x: &UpPoint) -> bool {
    eval_spc_at(c, x, &mut HashMap::new())
}

fn norm_at(c: &Spc, memo: &mut HashMap<*const Spc, u64>) -> u64 {
    let key = c as *const Spc;
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = match c {
        Spc::Leaf(_) => 0,
        Spc::Node(grid) => {
            1 + grid.iter().flatten().map(|child| norm_at(child, memo)).max().unwrap_or(0)
        }
    };
    memo.insert(key, v);
    v
}

/// Recursion depth of the code: 0 on leaves, 1 + max over children on
/// nodes.
pub fn spc_norm(c: &Spc) -> u64 {
    norm_at(c, &mut HashMap::new())
}

fn support_at(c: &Spc, out: &mut BTreeSet<u64>, seen: &mut BTreeSet<*const Spc>) {
    if !seen.insert(c as *const Spc) {
        return;
    }
    match c {
        Spc::Leaf(level) if *level >= 2 => {
            out.insert(level - 2);
        }
        Spc::Leaf(_) => {}
        Spc::Node(grid) => grid.iter().flatten().for_each(|ch| support_at(ch, out, seen)),
    }
}

/// The coordinates the code reads.
pub fn spc_support(c: &Spc) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    support_at(c, &mut out, &mut BTreeSet::new());
    out
}

/// Borel code: a leaf is the complement of the cylinder of a binary word,
/// a node the union of the complements of its children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Borel {
    #[serde(rename = "co_cylinder")]
    Leaf(String),
    #[serde(rename = "co_union")]
    Node(Vec<Rc<Borel>>),
}

impl Borel {
    pub fn co_cylinder(word: &str) -> Result<Rc<Borel>> {
        if !word.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Malformed(format!("cylinder word must be binary: {word:?}")));
        }
        Ok(Rc::new(Borel::Leaf(word.to_string())))
    }

    pub fn co_union(children: Vec<Rc<Borel>>) -> Result<Rc<Borel>> {
        if children.is_empty() {
            return Err(Error::Malformed("union must have children".into()));
        }
        Ok(Rc::new(Borel::Node(children)))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Borel::Leaf(w) => {
                if w.chars().all(|c| c == '0' || c == '1') {
                    Ok(())
                } else {
                    Err(Error::Malformed(format!("cylinder word must be binary: {w:?}")))
                }
            }
            Borel::Node(children) => {
                if children.is_empty() {
                    return Err(Error::Malformed("union must have children".into()));
                }
                children.iter().try_for_each(|c| c.validate())
            }
        }
    }
}

fn in_cylinder(word: &str, x: &UpPoint) -> bool {
    word.chars().enumerate().all(|(i, c)| x.coordinate(i) == (c == '1') as u64)
}

fn eval_borel_at(c: &Borel, x: &UpPoint, memo: &mut HashMap<*const Borel, bool>) -> bool {
    let key = c as *const Borel;
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = match c {
        Borel::Leaf(word) => !in_cylinder(word, x),
        Borel::Node(children) => children.iter().any(|ch| !eval_borel_at(ch, x, memo)),
    };
    memo.insert(key, v);
    v
}

/// Membership of a point in the set denoted by a Borel code.
pub fn eval_borel(c: &Borel, x: &UpPoint) -> bool {
    eval_borel_at(c, x, &mut HashMap::new())
}

fn rank_at(c: &Borel, memo: &mut HashMap<*const Borel, u64>) -> u64 {
    let key = c as *const Borel;
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = match c {
        Borel::Leaf(_) => 0,
        Borel::Node(children) => {
            1 + children.iter().map(|ch| rank_at(ch, memo)).max().unwrap_or(0)
        }
    };
    memo.insert(key, v);
    v
}

pub fn borel_rank(c: &Borel) -> u64 {
    rank_at(c, &mut HashMap::new())
}

fn borel_depth_at(c: &Borel, memo: &mut HashMap<*const Borel, usize>) -> usize {
    let key = c as *const Borel;
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = match c {
        Borel::Leaf(word) => word.len(),
        Borel::Node(children) => {
            children.iter().map(|ch| borel_depth_at(ch, memo)).max().unwrap_or(0)
        }
    };
    memo.insert(key, v);
    v
}

/// The coordinates a Borel code reads: everything below its longest
/// cylinder word.
pub fn borel_support(c: &Borel) -> BTreeSet<u64> {
    (0..borel_depth_at(c, &mut HashMap::new()) as u64).collect()
}

/// Evaluation-equivalent Borel code of a semi-positive code. Coordinate
/// sets translate through cylinders, unions and intersections through
/// double complementation.
pub fn spc_to_borel(c: &Spc) -> Rc<Borel> {
    fn go(c: &Spc, memo: &mut HashMap<*const Spc, Rc<Borel>>) -> Rc<Borel> {
        let key = c as *const Spc;
        if let Some(b) = memo.get(&key) {
            return b.clone();
        }
        let b = match c {
            // Complement of the whole space.
            Spc::Leaf(0) => Borel::co_cylinder("").unwrap(),
            // Complement of that.
            Spc::Leaf(1) => Borel::co_union(vec![Borel::co_cylinder("").unwrap()]).unwrap(),
            Spc::Leaf(level) => {
                // {x : x(k) = 1} as the complement of the union of all
                // cylinders fixing coordinate k to 0.
                let k = (level - 2) as usize;
                let mut zeros = Vec::with_capacity(1 << k);
                for bits in 0u64..(1 << k) {
                    let mut w: String =
                        (0..k).map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect();
                    w.push('0');
                    zeros.push(Borel::co_cylinder(&w).unwrap());
                }
                Borel::co_union(vec![Borel::co_union(zeros).unwrap()]).unwrap()
            }
            Spc::Node(grid) => {
                let rows = grid
                    .iter()
                    .map(|row| {
                        Borel::co_union(row.iter().map(|ch| go(ch, memo)).collect()).unwrap()
                    })
                    .collect();
                Borel::co_union(rows).unwrap()
            }
        };
        memo.insert(key, b.clone());
        b
    }
    go(c, &mut HashMap::new())
}

/// Exhaustive monotonicity check of the Boolean function a code induces on
/// the coordinates it reads, with the stated capacity bound.
fn monotone_over(support: &[u64], eval: impl Fn(&UpPoint) -> bool, bound: usize) -> Result<bool> {
    if support.len() > bound {
        return Err(Error::CapacityExceeded(format!(
            "support size {} exceeds brute-force bound {bound}",
            support.len()
        )));
    }
    let n = support.len();
    let width = support.iter().max().map_or(0, |m| *m as usize + 1);
    let point = |mask: u64| {
        let mut w = vec![0u64; width];
        for (i, &coord) in support.iter().enumerate() {
            w[coord as usize] = mask >> i & 1;
        }
        UpPoint::from_word_tail(&w, 0)
    };
    let table: Vec<bool> = (0..1u64 << n).map(|mask| eval(&point(mask))).collect();
    for mask in 0..1u64 << n {
        if !table[mask as usize] {
            continue;
        }
        for i in 0..n {
            if mask >> i & 1 == 0 && !table[(mask | 1 << i) as usize] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_monotone_spc_bounded(c: &Spc, bound: usize) -> Result<bool> {
    let support: Vec<u64> = spc_support(c).into_iter().collect();
    monotone_over(&support, |x| eval_spc(c, x), bound)
}

pub fn is_monotone_spc(c: &Spc) -> Result<bool> {
    is_monotone_spc_bounded(c, DEFAULT_SUPPORT_BOUND)
}

pub fn is_monotone_borel_bounded(c: &Borel, bound: usize) -> Result<bool> {
    let support: Vec<u64> = borel_support(c).into_iter().collect();
    monotone_over(&support, |x| eval_borel(c, x), bound)
}

pub fn is_monotone_borel(c: &Borel) -> Result<bool> {
    is_monotone_borel_bounded(c, DEFAULT_SUPPORT_BOUND)
}

/// A code is positive iff it holds at the all-ones point and fails at the
/// all-zeros point; for semi-positive codes this is exactly "monotone and
/// different from the empty set and the full space".
pub fn is_positive(c: &Spc) -> bool {
    eval_spc(c, &UpPoint::one()) && !eval_spc(c, &UpPoint::zero())
}
