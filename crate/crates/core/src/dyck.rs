//! Separation of two projected tree bodies in Cantor space.
//!
//! Two finite graph presentations span a product graph over state pairs,
//! constrained so the first track never shows a one where the second
//! shows a zero. When that product has no reachable cycle, a bar
//! recursion over it assembles a union-of-intersections code that covers
//! everything the first tree projects to and misses everything the
//! second does. When it has a cycle, unrolling the lasso produces a pair
//! of points witnessing that no coordinatewise-monotone set can separate
//! the projections.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::graph::{GraphTree, Side};
use crate::point::{point_subseteq, UpPoint};
use crate::spc::{eval_spc, spc_support, Spc};

/// One product step: the label pair read by each tree.
pub type PairLabel = ((u64, u64), (u64, u64));

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<PairLabel>,
    pub cycle: Vec<PairLabel>,
}

/// The depth-erased product of two presentations: reachable state pairs
/// with the bit constraint, plus the acyclicity verdict. On acyclic
/// products every path, and hence the recursion depth, is bounded by the
/// number of reachable pairs.
#[derive(Debug, Clone)]
pub struct DyckProduct {
    pairs: Vec<(usize, usize)>,
    lasso: Option<Lasso>,
}

impl DyckProduct {
    pub fn is_acyclic(&self) -> bool {
        self.lasso.is_none()
    }

    pub fn lasso(&self) -> Option<&Lasso> {
        self.lasso.as_ref()
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

fn require_cantor(tree: &GraphTree, which: &str) -> Result<()> {
    if tree.side() != Side::Cantor {
        return Err(Error::Precondition(format!(
            "{which} presentation must carry bit labels on its first track"
        )));
    }
    Ok(())
}

pub fn build_product(t: &GraphTree, s: &GraphTree) -> Result<DyckProduct> {
    require_cantor(t, "first")?;
    require_cantor(s, "second")?;
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut edges: Vec<Vec<(PairLabel, usize)>> = Vec::new();
    let root = (t.root(), s.root());
    index.insert(root, 0);
    pairs.push(root);
    edges.push(Vec::new());
    let mut queue = vec![0usize];
    while let Some(i) = queue.pop() {
        let (qt, qs) = pairs[i];
        let mut out = Vec::new();
        for ((tb, n), qt2) in t.unfold_children(qt)? {
            for ((sb, m), qs2) in s.unfold_children(qs)? {
                if tb == 1 && sb == 0 {
                    continue;
                }
                let target = (qt2, qs2);
                let j = *index.entry(target).or_insert_with(|| {
                    pairs.push(target);
                    edges.push(Vec::new());
                    queue.push(pairs.len() - 1);
                    pairs.len() - 1
                });
                out.push((((tb, n), (sb, m)), j));
            }
        }
        edges[i] = out;
    }
    let lasso = find_lasso(&edges);
    Ok(DyckProduct { pairs, lasso })
}

/// Depth-first search from node 0; the first back edge closes a cycle,
/// and the stack at that moment supplies the stem.
fn find_lasso(edges: &[Vec<(PairLabel, usize)>]) -> Option<Lasso> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color = vec![Color::White; edges.len()];
    let mut stack: Vec<(usize, usize, Option<PairLabel>)> = vec![(0, 0, None)];
    color[0] = Color::Gray;
    while let Some(&(node, next_edge, _)) = stack.last() {
        if let Some(&(label, target)) = edges[node].get(next_edge) {
            stack.last_mut().unwrap().1 += 1;
            match color[target] {
                Color::White => {
                    color[target] = Color::Gray;
                    stack.push((target, 0, Some(label)));
                }
                Color::Gray => {
                    let pos = stack
                        .iter()
                        .position(|&(n, _, _)| n == target)
                        .expect("gray node is on the stack");
                    let stem =
                        stack[1..=pos].iter().map(|&(_, _, l)| l.unwrap()).collect();
                    let mut cycle: Vec<PairLabel> =
                        stack[pos + 1..].iter().map(|&(_, _, l)| l.unwrap()).collect();
                    cycle.push(label);
                    return Some(Lasso { stem, cycle });
                }
                Color::Black => {}
            }
        } else {
            color[node] = Color::Black;
            stack.pop();
        }
    }
    None
}

/// The branches recovered from an ill-founded product: a point in each
/// projection, with witnesses, the first pointwise below the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationWitness {
    pub x: UpPoint,
    pub gamma_x: UpPoint,
    pub y: UpPoint,
    pub gamma_y: UpPoint,
}

pub fn extract_witness(p: &DyckProduct) -> Result<SeparationWitness> {
    let lasso = p
        .lasso()
        .ok_or_else(|| Error::LogicError("no witness in an acyclic product".into()))?;
    let track = |f: fn(&PairLabel) -> u64| -> Result<UpPoint> {
        let prefix: Vec<u64> = lasso.stem.iter().map(f).collect();
        let period: Vec<u64> = lasso.cycle.iter().map(f).collect();
        UpPoint::new(&prefix, &period)
    };
    let w = SeparationWitness {
        x: track(|l| l.0 .0)?,
        gamma_x: track(|l| l.0 .1)?,
        y: track(|l| l.1 .0)?,
        gamma_y: track(|l| l.1 .1)?,
    };
    debug_assert!(point_subseteq(&w.x, &w.y));
    Ok(w)
}

/// Whether some branch of the tree projects to `x` on the first track:
/// the product of the presentation with the point's phase automaton has
/// an infinite path exactly when it has a reachable cycle.
pub fn member_projection(tree: &GraphTree, x: &UpPoint) -> Result<bool> {
    require_cantor(tree, "the")?;
    if !x.is_binary() {
        return Err(Error::Precondition("projection point must be binary".into()));
    }
    let window = x.prefix().len() + x.period().len();
    let phase_next = |p: usize| if p + 1 < window { p + 1 } else { x.prefix().len() };
    let node = |q: usize, p: usize| q * window + p;
    let mut adjacency: Vec<Vec<((), usize)>> = vec![Vec::new(); tree.num_states() * window];
    for q in 0..tree.num_states() {
        for p in 0..window {
            let a = x.coordinate(p);
            let mut out = Vec::new();
            for b in 0..tree.alphabet_bound() {
                if let Some(q2) = tree.step(q, a, b) {
                    out.push(((), node(q2, phase_next(p))));
                }
            }
            adjacency[node(q, p)] = out;
        }
    }
    Ok(has_reachable_cycle(&adjacency, node(tree.root(), 0)))
}

fn has_reachable_cycle(adjacency: &[Vec<((), usize)>], start: usize) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color = vec![Color::White; adjacency.len()];
    let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
    color[start] = Color::Gray;
    while let Some(&(n, i)) = stack.last() {
        if let Some(&((), tgt)) = adjacency[n].get(i) {
            stack.last_mut().unwrap().1 += 1;
            match color[tgt] {
                Color::White => {
                    color[tgt] = Color::Gray;
                    stack.push((tgt, 0));
                }
                Color::Gray => return true,
                Color::Black => {}
            }
        } else {
            color[n] = Color::Black;
            stack.pop();
        }
    }
    false
}

pub const DEFAULT_STATE_CAPACITY: usize = 64;

/// Product-state capacity: SEPKIT_MAX_STATES when set and parseable,
/// otherwise the default.
pub fn product_capacity() -> usize {
    std::env::var("SEPKIT_MAX_STATES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_STATE_CAPACITY)
}

#[derive(Debug, Clone)]
pub enum DyckOutcome {
    Separator(Rc<Spc>),
    Witness(SeparationWitness),
}

pub fn dyck_separate(t: &GraphTree, s: &GraphTree) -> Result<DyckOutcome> {
    dyck_separate_with_capacity(t, s, product_capacity())
}

pub fn dyck_separate_with_capacity(
    t: &GraphTree,
    s: &GraphTree,
    capacity: usize,
) -> Result<DyckOutcome> {
    if t.num_states() * s.num_states() > capacity {
        return Err(Error::CapacityExceeded(format!(
            "{} x {} state pairs exceed the capacity of {capacity}",
            t.num_states(),
            s.num_states()
        )));
    }
    let product = build_product(t, s)?;
    if !product.is_acyclic() {
        return Ok(DyckOutcome::Witness(extract_witness(&product)?));
    }
    let mut memo = HashMap::new();
    let code = separator_at(t, s, t.root(), s.root(), 0, Some(&mut memo))?;
    Ok(DyckOutcome::Separator(code))
}

/// The bar recursion. The index grid is the full rectangle of
/// (bit, letter) pairs below the larger alphabet bound: rows where the
/// first tree has no child carry the empty set and vanish from the
/// union; entries where only the second tree's child is missing carry
/// the full set and vanish from their intersection; entries whose label
/// pair is blocked, which forces bits one and zero, carry the
/// single-coordinate set at the current depth; the rest recurse.
fn separator_at(
    t: &GraphTree,
    s: &GraphTree,
    qt: usize,
    qs: usize,
    depth: u64,
    mut memo: Option<&mut HashMap<(usize, usize, u64), Rc<Spc>>>,
) -> Result<Rc<Spc>> {
    if let Some(memo) = memo.as_deref_mut() {
        if let Some(hit) = memo.get(&(qt, qs, depth)) {
            return Ok(hit.clone());
        }
    }
    let k = t.alphabet_bound().max(s.alphabet_bound());
    let t_children: BTreeMap<(u64, u64), usize> =
        t.unfold_children(qt)?.into_iter().collect();
    let s_children: BTreeMap<(u64, u64), usize> =
        s.unfold_children(qs)?.into_iter().collect();
    let index_grid: Vec<(u64, u64)> =
        (0..2).flat_map(|bit| (0..k).map(move |n| (bit, n))).collect();
    let mut rows = Vec::with_capacity(index_grid.len());
    for &(tb, n) in &index_grid {
        let mut row = Vec::with_capacity(index_grid.len());
        for &(sb, m) in &index_grid {
            let entry = match (t_children.get(&(tb, n)), s_children.get(&(sb, m))) {
                (None, _) => Spc::leaf_empty(),
                (Some(_), None) => Spc::leaf_full(),
                (Some(_), Some(_)) if tb == 1 && sb == 0 => Spc::leaf_coord(depth),
                (Some(&qt2), Some(&qs2)) => {
                    separator_at(t, s, qt2, qs2, depth + 1, memo.as_deref_mut())?
                }
            };
            row.push(entry);
        }
        rows.push(row);
    }
    let code = Spc::union_of(rows)?;
    if let Some(memo) = memo {
        memo.insert((qt, qs, depth), code.clone());
    }
    Ok(code)
}

#[cfg(test)]
pub(crate) fn separator_code(t: &GraphTree, s: &GraphTree, memoized: bool) -> Result<Rc<Spc>> {
    let mut memo = HashMap::new();
    separator_at(t, s, t.root(), s.root(), 0, memoized.then_some(&mut memo))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyckViolation {
    pub point: UpPoint,
    pub in_first: bool,
    pub in_second: bool,
    pub in_separator: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyckCheck {
    pub depth: usize,
    pub points_checked: usize,
    pub first_members: usize,
    pub second_members: usize,
    pub violations: Vec<DyckViolation>,
}

const MAX_VERIFY_DEPTH: usize = 24;

/// Exhaustive check of the separation contract over every binary word of
/// the given length continued by each constant tail: points the first
/// tree projects to must satisfy the code, points the second projects to
/// must not.
pub fn verify_dyck(
    t: &GraphTree,
    s: &GraphTree,
    code: &Spc,
    depth: usize,
) -> Result<DyckCheck> {
    let support = spc_support(code);
    if let Some(&max) = support.iter().next_back() {
        if (depth as u64) < max + 1 {
            return Err(Error::Precondition(format!(
                "verification depth {depth} below the code support bound {}",
                max + 1
            )));
        }
    }
    if depth > MAX_VERIFY_DEPTH {
        return Err(Error::CapacityExceeded(format!(
            "exhaustive check at depth {depth} (limit {MAX_VERIFY_DEPTH})"
        )));
    }
    let mut seen: HashSet<UpPoint> = HashSet::new();
    let mut check = DyckCheck {
        depth,
        points_checked: 0,
        first_members: 0,
        second_members: 0,
        violations: Vec::new(),
    };
    for word_bits in 0..1u64 << depth {
        let word: Vec<u64> = (0..depth).map(|i| word_bits >> i & 1).collect();
        for tail in 0..2 {
            let point = UpPoint::from_word_tail(&word, tail);
            if !seen.insert(point.clone()) {
                continue;
            }
            let in_first = member_projection(t, &point)?;
            let in_second = member_projection(s, &point)?;
            let in_separator = eval_spc(code, &point);
            check.points_checked += 1;
            check.first_members += in_first as usize;
            check.second_members += in_second as usize;
            if (in_first && !in_separator) || (in_second && in_separator) {
                check.violations.push(DyckViolation {
                    point,
                    in_first,
                    in_second,
                    in_separator,
                });
            }
        }
    }
    Ok(check)
}
