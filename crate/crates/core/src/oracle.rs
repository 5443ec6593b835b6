//! Independent second routes for results the main algorithms compute.
//!
//! Nothing in this module calls the simplex solver, the separator
//! builders, or the product-graph machinery; agreement between a function
//! here and its counterpart elsewhere is evidence, not tautology.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::{Polytope, Rat};
use crate::graph::{GraphTree, Side};
use crate::point::UpPoint;

/// coeffs . y <= rhs, with the set of base constraints it combines kept
/// as a bitmask for Imbert's redundancy rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Ineq {
    coeffs: Vec<Rat>,
    rhs: Rat,
    hist: u64,
}

impl Ineq {
    /// Scale so the largest absolute coefficient is one; constraints that
    /// differ by a positive factor collapse together.
    fn normalized(mut self) -> Self {
        let scale = self.coeffs.iter().map(|c| c.abs()).max().filter(|m| !m.is_zero());
        if let Some(scale) = scale {
            for c in &mut self.coeffs {
                *c /= &scale;
            }
            self.rhs /= scale;
        }
        self
    }
}

const FM_CAP: usize = 20_000;

/// Replace every pair of opposing constraints on variable `j` by their
/// positive combination, keeping the rest. `eliminated` counts rounds
/// including this one: a combination drawing on more than `eliminated + 1`
/// base constraints is redundant (Imbert) and is dropped before any
/// arithmetic happens.
fn fm_eliminate(system: Vec<Ineq>, j: usize, eliminated: usize) -> Result<Vec<Ineq>> {
    let mut zeros = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for c in system {
        if c.coeffs[j].is_zero() {
            zeros.push(c);
        } else if c.coeffs[j].is_positive() {
            pos.push(c);
        } else {
            neg.push(c);
        }
    }
    let keep = |p: &Ineq, n: &Ineq| (p.hist | n.hist).count_ones() as usize <= eliminated + 1;
    let mut surviving = zeros.len();
    for p in &pos {
        surviving += neg.iter().filter(|n| keep(p, n)).count();
    }
    if surviving > FM_CAP {
        return Err(Error::CapacityExceeded(format!(
            "elimination of variable {j} would produce more than {FM_CAP} constraints"
        )));
    }
    // Keep only the tightest bound per coefficient vector.
    let mut best: BTreeMap<Vec<Rat>, (Rat, u64)> = BTreeMap::new();
    let mut push = |c: Ineq| {
        let c = c.normalized();
        match best.get_mut(&c.coeffs) {
            Some((rhs, _)) if *rhs <= c.rhs => {}
            Some(slot) => *slot = (c.rhs, c.hist),
            None => {
                best.insert(c.coeffs, (c.rhs, c.hist));
            }
        }
    };
    for c in zeros {
        push(c);
    }
    for p in &pos {
        for n in neg.iter().filter(|n| keep(p, n)) {
            let a = &p.coeffs[j];
            let b = -&n.coeffs[j];
            let coeffs: Vec<Rat> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(pc, nc)| &b * pc + a * nc)
                .collect();
            debug_assert!(coeffs[j].is_zero());
            push(Ineq {
                coeffs,
                rhs: &b * &p.rhs + a * &n.rhs,
                hist: p.hist | n.hist,
            });
        }
    }
    Ok(best
        .into_iter()
        .map(|(coeffs, (rhs, hist))| Ineq { coeffs, rhs, hist })
        .collect())
}

/// Max-norm distance to a convex hull by Fourier-Motzkin elimination of
/// the combination weights, leaving one-variable bounds on the distance.
pub fn fourier_motzkin_distance(x: &[Rat], p: &Polytope) -> Result<Rat> {
    let k = p.vertices().len();
    if k == 0 {
        return Err(Error::UndefinedDistance);
    }
    let dim = p.dim().unwrap();
    if x.len() != dim {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    // Variables: weights 0..k-1, then the distance t at index k.
    let t = k;
    let nvars = k + 1;
    if k + 2 * dim + 3 > 64 {
        return Err(Error::CapacityExceeded(
            "too many base constraints for history tracking".into(),
        ));
    }
    let mut system: Vec<Ineq> = Vec::new();
    let mut next_id = 0u32;
    let mut tag = |coeffs: Vec<Rat>, rhs: Rat| {
        let hist = 1u64 << next_id;
        next_id += 1;
        Ineq { coeffs, rhs, hist }
    };
    let unit = |j: usize, sign: i64| {
        let mut coeffs = vec![Rat::zero(); nvars];
        coeffs[j] = Rat::from_integer(sign.into());
        coeffs
    };
    let mut ones = vec![Rat::one(); nvars];
    ones[t] = Rat::zero();
    system.push(tag(ones.clone(), Rat::one()));
    system.push(tag(ones.iter().map(|c| -c).collect(), -Rat::one()));
    for j in 0..k {
        system.push(tag(unit(j, -1), Rat::zero()));
    }
    system.push(tag(unit(t, -1), Rat::zero()));
    for i in 0..dim {
        let mut up = vec![Rat::zero(); nvars];
        let mut down = vec![Rat::zero(); nvars];
        for j in 0..k {
            up[j] = p.vertices()[j][i].clone();
            down[j] = -&up[j];
        }
        up[t] = -Rat::one();
        down[t] = -Rat::one();
        system.push(tag(up, x[i].clone()));
        system.push(tag(down, -&x[i]));
    }

    for (round, j) in (0..k).enumerate() {
        system = fm_eliminate(system, j, round + 1)?;
    }

    let mut lower = Rat::zero();
    let mut upper: Option<Rat> = None;
    for c in system {
        let a = &c.coeffs[t];
        if a.is_zero() {
            if c.rhs.is_negative() {
                return Err(Error::LogicError("distance system became infeasible".into()));
            }
        } else if a.is_positive() {
            let bound = &c.rhs / a;
            if upper.as_ref().map_or(true, |u| bound < *u) {
                upper = Some(bound);
            }
        } else {
            let bound = &c.rhs / a;
            if bound > lower {
                lower = bound;
            }
        }
    }
    if let Some(u) = upper {
        if u < lower {
            return Err(Error::LogicError("distance bounds crossed".into()));
        }
    }
    Ok(lower)
}

/// Unique solution of `a . w = b` when the columns of `a` are linearly
/// independent and the system is consistent; `None` otherwise.
fn solve_exact(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    let cols = if rows == 0 { return None } else { a[0].len() };
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let scale = m[r][c].clone();
        for v in &mut m[r] {
            *v /= &scale;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for c2 in 0..=cols {
                    let delta = &f * &m[r][c2];
                    m[i][c2] -= delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if pivot_cols.len() < cols {
        return None;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

const CARATHEODORY_VERTEX_CAP: usize = 20;

/// Hull membership by exhaustive search over affinely independent vertex
/// subsets of size at most dimension plus one; each candidate subset
/// yields a unique weight vector by Gaussian elimination.
pub fn caratheodory_membership(x: &[Rat], p: &Polytope) -> Result<bool> {
    let k = p.vertices().len();
    if k == 0 {
        return Ok(false);
    }
    if k > CARATHEODORY_VERTEX_CAP {
        return Err(Error::CapacityExceeded(format!(
            "subset search over {k} vertices"
        )));
    }
    let dim = p.dim().unwrap();
    if x.len() != dim {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    let max_size = (dim + 1).min(k);
    let mut target: Vec<Rat> = x.to_vec();
    target.push(Rat::one());
    for mask in 1u32..1 << k {
        let size = mask.count_ones() as usize;
        if size > max_size {
            continue;
        }
        let chosen: Vec<usize> = (0..k).filter(|j| mask >> j & 1 == 1).collect();
        // Rows: one per coordinate, then the affine row of ones.
        let a: Vec<Vec<Rat>> = (0..=dim)
            .map(|i| {
                chosen
                    .iter()
                    .map(|&j| {
                        if i < dim { p.vertices()[j][i].clone() } else { Rat::one() }
                    })
                    .collect()
            })
            .collect();
        if let Some(w) = solve_exact(&a, &target) {
            if w.iter().all(|l| !l.is_negative()) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn main_label_bound(tree: &GraphTree) -> u64 {
    match tree.side() {
        Side::Cantor => 2,
        Side::Baire => tree.alphabet_bound(),
    }
}

/// Whether some infinite run of the tree reads `x` on the first track,
/// decided by iterating reachable state sets far enough that, with the
/// point's letters cycling, any future emptiness would already have
/// shown up.
pub fn member_projection_bounded(tree: &GraphTree, x: &UpPoint) -> Result<bool> {
    if tree.num_states() > 16 {
        return Err(Error::CapacityExceeded(
            "reachable-set iteration over more than 16 states".into(),
        ));
    }
    if x.max_letter() >= main_label_bound(tree) {
        return Err(Error::Precondition("point letter outside the tree alphabet".into()));
    }
    let steps = x.prefix().len()
        + ((1usize << tree.num_states()) + 2) * x.period().len().max(1)
        + 1;
    let mut reach: BTreeSet<usize> = BTreeSet::new();
    reach.insert(tree.root());
    for n in 0..steps {
        let a = x.coordinate(n);
        let mut next = BTreeSet::new();
        for &q in &reach {
            for b in 0..tree.alphabet_bound() {
                if let Some(q2) = tree.step(q, a, b) {
                    next.insert(q2);
                }
            }
        }
        if next.is_empty() {
            return Ok(false);
        }
        reach = next;
    }
    Ok(true)
}

/// Whether the pair of points traces an infinite run: the walk is
/// deterministic, so surviving past every (state, letter-phase)
/// combination means it repeats forever.
pub fn pair_in_closed_body(tree: &GraphTree, x: &UpPoint, y: &UpPoint) -> Result<bool> {
    let (mb, wb) = (main_label_bound(tree), tree.alphabet_bound());
    if x.max_letter() >= mb || y.max_letter() >= wb {
        return Err(Error::Precondition("point letter outside the tree alphabet".into()));
    }
    let window = x.joint_window(y);
    let steps = window
        .checked_mul(tree.num_states())
        .and_then(|v| v.checked_add(window + 1))
        .ok_or_else(|| Error::CapacityExceeded("joint window overflow".into()))?;
    if steps > 4_000_000 {
        return Err(Error::CapacityExceeded(format!("walk of {steps} steps")));
    }
    let mut q = tree.root();
    for n in 0..steps {
        match tree.step(q, x.coordinate(n), y.coordinate(n)) {
            Some(q2) => q = q2,
            None => return Ok(false),
        }
    }
    Ok(true)
}
