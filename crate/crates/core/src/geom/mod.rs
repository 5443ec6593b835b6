//! Exact rational convex geometry under the maximum norm.
//!
//! Everything here is a finite object with rational coordinates: closed
//! boxes and finite unions of them, polytopes given by their vertex lists,
//! and the linear programs that decide hull membership and hull distance.
//! No floating point is used anywhere; equalities in the tests are
//! rational equalities.

pub mod lp;

use std::fmt;

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
pub use lp::{lp_feasible_min, Cmp, Constraint, LpOutcome};

pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from(BigInt::from(p))
}

/// 2^e for a possibly negative exponent.
pub fn pow2(e: i64) -> Rat {
    if e >= 0 {
        Rat::from(BigInt::from(1u8) << e as usize)
    } else {
        Rat::new(BigInt::one(), BigInt::from(1u8) << (-e) as usize)
    }
}

/// Rationals print and parse as "p/q"; a bare integer reads as "p/1".
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_from_str(s: &str) -> Result<Rat> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt =
        p.parse().map_err(|e| Error::Malformed(format!("bad rational {s:?}: {e}")))?;
    let q: BigInt =
        q.parse().map_err(|e| Error::Malformed(format!("bad rational {s:?}: {e}")))?;
    if q.is_zero() {
        return Err(Error::Malformed(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(p, q))
}

pub fn vec_to_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

pub fn vec_from_strings(v: &[String]) -> Result<Vec<Rat>> {
    v.iter().map(|s| rat_from_str(s)).collect()
}

/// Maximum-norm distance between two points of equal dimension.
pub fn linf_dist(x: &[Rat], y: &[Rat]) -> Rat {
    assert_eq!(x.len(), y.len(), "dimension mismatch");
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_else(Rat::zero)
}

mod rat_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Vec<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        super::vec_to_strings(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        super::vec_from_strings(&raw).map_err(D::Error::custom)
    }
}

/// A closed box: the product of per-coordinate closed intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatBox {
    #[serde(with = "rat_vec_serde")]
    lo: Vec<Rat>,
    #[serde(with = "rat_vec_serde")]
    hi: Vec<Rat>,
}

impl RatBox {
    pub fn new(lo: Vec<Rat>, hi: Vec<Rat>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Malformed("box bound dimensions differ".into()));
        }
        if lo.iter().zip(hi.iter()).any(|(a, b)| a > b) {
            return Err(Error::Malformed("box has an empty coordinate interval".into()));
        }
        Ok(RatBox { lo, hi })
    }

    /// The cube [-r, r]^dim.
    pub fn cube(dim: usize, r: &Rat) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Malformed("cube radius must be nonnegative".into()));
        }
        Ok(RatBox { lo: vec![-r.clone(); dim], hi: vec![r.clone(); dim] })
    }

    /// The closed max-norm ball around a center.
    pub fn ball(center: &[Rat], r: &Rat) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Malformed("ball radius must be nonnegative".into()));
        }
        Ok(RatBox {
            lo: center.iter().map(|c| c - r).collect(),
            hi: center.iter().map(|c| c + r).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rat] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rat] {
        &self.hi
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.dim()
            && self.lo.iter().zip(x).all(|(a, v)| a <= v)
            && self.hi.iter().zip(x).all(|(b, v)| v <= b)
    }

    pub fn intersect(&self, other: &RatBox) -> Option<RatBox> {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let lo: Vec<Rat> =
            self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(b).clone()).collect();
        let hi: Vec<Rat> =
            self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(b).clone()).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            None
        } else {
            Some(RatBox { lo, hi })
        }
    }

    pub fn subset_of(&self, other: &RatBox) -> bool {
        self.dim() == other.dim()
            && self.lo.iter().zip(&other.lo).all(|(a, b)| b <= a)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| a <= b)
    }

    /// All 2^dim corners.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let n = self.dim();
        (0..1u64 << n)
            .map(|mask| {
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 { self.hi[i].clone() } else { self.lo[i].clone() }
                    })
                    .collect()
            })
            .collect()
    }

    /// Max-norm diameter: the largest side length.
    pub fn diameter(&self) -> Rat {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

impl fmt::Display for RatBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "[{},{}]", self.lo[i], self.hi[i])?;
        }
        Ok(())
    }
}

/// A finite union of closed boxes of one dimension; the empty union is the
/// empty set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSet {
    dim: usize,
    boxes: Vec<RatBox>,
}

impl BoxSet {
    pub fn empty(dim: usize) -> Self {
        BoxSet { dim, boxes: Vec::new() }
    }

    pub fn from_boxes(dim: usize, boxes: Vec<RatBox>) -> Result<Self> {
        if boxes.iter().any(|b| b.dim() != dim) {
            return Err(Error::Malformed("box dimensions differ".into()));
        }
        Ok(BoxSet { dim, boxes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[RatBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.boxes.iter().any(|b| b.contains(x))
    }

    /// Clip to a closed box, dropping emptied members.
    pub fn intersect_box(&self, cube: &RatBox) -> BoxSet {
        BoxSet {
            dim: self.dim,
            boxes: self.boxes.iter().filter_map(|b| b.intersect(cube)).collect(),
        }
    }

    /// All corner points of all member boxes.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let mut vs: Vec<Vec<Rat>> = self.boxes.iter().flat_map(|b| b.vertices()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Exact inclusion of unions of closed boxes, by splitting along every
    /// endpoint hyperplane: each fragment of a member box must lie inside
    /// a single box of `other`.
    pub fn subset_of(&self, other: &BoxSet) -> bool {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.boxes.iter().all(|b| covered(b, &other.boxes))
    }
}

/// Pieces of a coordinate line: breakpoints and the open spans between
/// them.
#[derive(Debug, Clone)]
struct Piece {
    lo: Rat,
    hi: Rat,
    open: bool,
}

impl Piece {
    fn split(mut cuts: Vec<Rat>, lo: &Rat, hi: &Rat) -> Vec<Piece> {
        cuts.retain(|c| lo <= c && c <= hi);
        cuts.push(lo.clone());
        cuts.push(hi.clone());
        cuts.sort();
        cuts.dedup();
        let mut pieces = Vec::new();
        for (i, c) in cuts.iter().enumerate() {
            pieces.push(Piece { lo: c.clone(), hi: c.clone(), open: false });
            if let Some(next) = cuts.get(i + 1) {
                pieces.push(Piece { lo: c.clone(), hi: next.clone(), open: true });
            }
        }
        pieces
    }

    fn inside_closed(&self, lo: &Rat, hi: &Rat) -> bool {
        lo <= &self.lo && &self.hi <= hi
    }

    fn meets_open(&self, lo: &Rat, hi: &Rat) -> bool {
        if self.open {
            lo.max(&self.lo) < hi.min(&self.hi)
        } else {
            lo < &self.lo && &self.lo < hi
        }
    }
}

fn for_each_cell(per_coord: &[Vec<Piece>], mut f: impl FnMut(&[&Piece])) {
    fn go<'a>(
        per_coord: &'a [Vec<Piece>],
        cell: &mut Vec<&'a Piece>,
        f: &mut impl FnMut(&[&Piece]),
    ) {
        match per_coord.split_first() {
            None => f(cell),
            Some((first, rest)) => {
                for p in first {
                    cell.push(p);
                    go(rest, cell, f);
                    cell.pop();
                }
            }
        }
    }
    go(per_coord, &mut Vec::new(), &mut f);
}

/// Whether a closed box is covered by a finite union of closed boxes.
fn covered(b: &RatBox, by: &[RatBox]) -> bool {
    let per_coord: Vec<Vec<Piece>> = (0..b.dim())
        .map(|i| {
            let mut cuts: Vec<Rat> = Vec::new();
            for o in by {
                cuts.push(o.lo()[i].clone());
                cuts.push(o.hi()[i].clone());
            }
            Piece::split(cuts, &b.lo()[i], &b.hi()[i])
        })
        .collect();
    let mut ok = true;
    for_each_cell(&per_coord, |cell| {
        if !ok {
            return;
        }
        let inside_some = by.iter().any(|o| {
            cell.iter()
                .enumerate()
                .all(|(i, p)| p.inside_closed(&o.lo()[i], &o.hi()[i]))
        });
        if !inside_some {
            ok = false;
        }
    });
    ok
}

/// An open box, used as subtrahend data by [`complement_in_cube`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenBox {
    #[serde(with = "rat_vec_serde")]
    pub lo: Vec<Rat>,
    #[serde(with = "rat_vec_serde")]
    pub hi: Vec<Rat>,
}

impl OpenBox {
    pub fn new(lo: Vec<Rat>, hi: Vec<Rat>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Malformed("box bound dimensions differ".into()));
        }
        Ok(OpenBox { lo, hi })
    }

    fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a >= b)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.lo.len()
            && self.lo.iter().zip(x).all(|(a, v)| a < v)
            && self.hi.iter().zip(x).all(|(b, v)| v < b)
    }
}

/// The cube [-m, m]^dim minus a finite union of open boxes, as a finite
/// union of closed boxes. Splitting along every endpoint keeps the result
/// exact: each grid fragment is either inside some open box or disjoint
/// from all of them, and the closure of a disjoint fragment stays
/// disjoint.
pub fn complement_in_cube(open_boxes: &[OpenBox], m: u64, dim: usize) -> Result<BoxSet> {
    let m = rat_int(m as i64);
    let lo_cube = -m.clone();
    let open: Vec<&OpenBox> = open_boxes
        .iter()
        .map(|b| {
            if b.lo.len() != dim {
                return Err(Error::Malformed("open box dimension mismatch".into()));
            }
            Ok(b)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|b| !b.is_empty())
        .collect();

    let per_coord: Vec<Vec<Piece>> = (0..dim)
        .map(|i| {
            let mut cuts: Vec<Rat> = Vec::new();
            for b in &open {
                cuts.push(b.lo[i].clone());
                cuts.push(b.hi[i].clone());
            }
            Piece::split(cuts, &lo_cube, &m)
        })
        .collect();

    let mut kept: Vec<RatBox> = Vec::new();
    for_each_cell(&per_coord, |cell| {
        let in_some_open = open.iter().any(|b| {
            cell.iter().enumerate().all(|(i, p)| p.meets_open(&b.lo[i], &b.hi[i]))
        });
        if !in_some_open {
            let lo = cell.iter().map(|p| p.lo.clone()).collect();
            let hi = cell.iter().map(|p| p.hi.clone()).collect();
            kept.push(RatBox { lo, hi });
        }
    });

    // Drop fragments contained in other fragments; pure cosmetics, the
    // union is unchanged.
    if kept.len() <= 2000 {
        let mut keep_flags = vec![true; kept.len()];
        for i in 0..kept.len() {
            for j in 0..kept.len() {
                if i != j
                    && keep_flags[i]
                    && kept[i].subset_of(&kept[j])
                    && (!kept[j].subset_of(&kept[i]) || j < i)
                {
                    keep_flags[i] = false;
                }
            }
        }
        kept = kept
            .into_iter()
            .zip(keep_flags)
            .filter_map(|(b, keep)| keep.then_some(b))
            .collect();
    }
    BoxSet::from_boxes(dim, kept)
}

/// A polytope as the convex hull of finitely many rational points; an
/// empty vertex list denotes the empty polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    vertices: Vec<Vec<Rat>>,
}

impl Serialize for Polytope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            vertices: Vec<Vec<String>>,
        }
        Raw { vertices: self.vertices.iter().map(|v| vec_to_strings(v)).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<Vec<String>>,
        }
        let raw = Raw::deserialize(d)?;
        let vertices = raw
            .vertices
            .iter()
            .map(|v| vec_from_strings(v))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Polytope::new(vertices).map_err(D::Error::custom)
    }
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<Rat>>) -> Result<Self> {
        if let Some(first) = vertices.first() {
            if vertices.iter().any(|v| v.len() != first.len()) {
                return Err(Error::Malformed("vertex dimensions differ".into()));
            }
        }
        let mut vertices = vertices;
        vertices.sort();
        vertices.dedup();
        Ok(Polytope { vertices })
    }

    pub fn empty() -> Self {
        Polytope { vertices: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn dim(&self) -> Option<usize> {
        self.vertices.first().map(|v| v.len())
    }
}

/// Whether x lies in the convex hull: feasibility of nonnegative weights
/// summing to one that combine the vertices into x. The empty polytope
/// contains nothing.
pub fn hull_membership(x: &[Rat], p: &Polytope) -> bool {
    let k = p.vertices.len();
    if k == 0 {
        return false;
    }
    let dim = p.dim().unwrap();
    assert_eq!(x.len(), dim, "dimension mismatch");
    let mut constraints =
        vec![Constraint::new(vec![Rat::one(); k], Cmp::Eq, Rat::one())];
    for i in 0..dim {
        let coeffs: Vec<Rat> = p.vertices.iter().map(|v| v[i].clone()).collect();
        constraints.push(Constraint::new(coeffs, Cmp::Eq, x[i].clone()));
    }
    matches!(
        lp_feasible_min(&vec![Rat::zero(); k], &constraints),
        LpOutcome::Optimal { .. }
    )
}

/// Exact max-norm distance from x to the convex hull: minimize t subject
/// to the combination staying within t of x in every coordinate.
pub fn hull_distance_inf(x: &[Rat], p: &Polytope) -> Result<Rat> {
    let k = p.vertices.len();
    if k == 0 {
        return Err(Error::UndefinedDistance);
    }
    let dim = p.dim().unwrap();
    if x.len() != dim {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    // Variables: lambda_0..lambda_{k-1}, then t.
    let mut objective = vec![Rat::zero(); k];
    objective.push(Rat::one());
    let mut constraints = Vec::with_capacity(1 + 2 * dim);
    let mut ones = vec![Rat::one(); k];
    ones.push(Rat::zero());
    constraints.push(Constraint::new(ones, Cmp::Eq, Rat::one()));
    for i in 0..dim {
        let mut up: Vec<Rat> = p.vertices.iter().map(|v| v[i].clone()).collect();
        up.push(-Rat::one());
        constraints.push(Constraint::new(up, Cmp::Le, x[i].clone()));
        let mut down: Vec<Rat> = p.vertices.iter().map(|v| v[i].clone()).collect();
        down.push(Rat::one());
        constraints.push(Constraint::new(down, Cmp::Ge, x[i].clone()));
    }
    match lp_feasible_min(&objective, &constraints) {
        LpOutcome::Optimal { value, .. } => Ok(value),
        outcome => Err(Error::LogicError(format!(
            "hull distance program must be solvable, got {outcome:?}"
        ))),
    }
}

/// The polytope on the corner points of a union of boxes: the hull of a
/// finite union of boxes is the hull of all their vertices.
pub fn hull_of_boxset(b: &BoxSet) -> Polytope {
    Polytope { vertices: b.vertices() }
}

/// Vertex form of {x : max-norm distance from x to the hull <= r}: every
/// vertex translated by every corner of the cube [-r, r]^dim.
pub fn minkowski_cube(p: &Polytope, r: &Rat) -> Result<Polytope> {
    if r.is_negative() {
        return Err(Error::Precondition("radius must be nonnegative".into()));
    }
    if p.is_empty() {
        return Err(Error::Precondition("polytope must be nonempty".into()));
    }
    let dim = p.dim().unwrap();
    let cube = RatBox::cube(dim, r)?;
    let mut vertices = Vec::with_capacity(p.vertices.len() << dim);
    for v in &p.vertices {
        for e in cube.vertices() {
            vertices.push(v.iter().zip(&e).map(|(a, b)| a + b).collect());
        }
    }
    Polytope::new(vertices)
}

/// Hull inclusion by vertex membership; the empty polytope is a subset of
/// everything.
pub fn polytope_subset(p: &Polytope, q: &Polytope) -> bool {
    p.vertices.iter().all(|v| hull_membership(v, q))
}
