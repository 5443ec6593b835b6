//! Separation of a convex analytic set from a disjoint analytic set in
//! N-space, at finite scale.
//!
//! The A side arrives as a good Souslin scheme, the B side as a
//! Baire-side graph presentation whose branches are joint box addresses.
//! The separator is built by bar recursion over a tree of nodes
//! (m, b, d, u): m picks a working cube, (b, d) runs through the B
//! presentation, and u through the scheme. A node stays in the tree
//! while the scheme cell meets the cube, the pair walk survives, and
//! the B-side anchor stays close to the cell hull at every level; each
//! failure mode closes the branch with a definite convex piece, and the
//! pieces assemble into a convexly generated code whose rows grow along
//! both the letter index and the cube index.

use std::collections::BTreeMap;
use std::rc::Rc;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::cgc::{eval_cgc, Cgc};
use crate::error::{Error, Result};
use crate::geom::{
    hull_distance_inf, hull_of_boxset, pow2, rat, rat_from_str, rat_to_string, Polytope, Rat,
    RatBox,
};
use crate::graph::{GraphTree, Side};
use crate::point::UpPoint;
use crate::scheme::{address_anchor, depth_approx_member, SchemeKind, SouslinScheme};
use crate::seq::FinSeq;

/// How many closed approximants an emitted neighborhood unfolds to.
pub const NBHD_LEVELS: u32 = 6;

/// A candidate node of the separation tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreissNode {
    pub m: u64,
    pub b: FinSeq,
    pub d: FinSeq,
    pub u: FinSeq,
}

fn clipped_entry(a: &SouslinScheme, u: &[u64], cube: &RatBox) -> Result<crate::geom::BoxSet> {
    Ok(a.entry(u)?.intersect_box(cube))
}

/// Membership in the separation tree: the cell meets the working cube,
/// the pair word is accepted, and at every level the B-side anchor is
/// within 2^(4-s) of the clipped cell hull (strictly).
pub fn j_member(node: &PreissNode, a: &SouslinScheme, s: &GraphTree) -> Result<bool> {
    if node.b.len() != node.d.len() || node.b.len() != node.u.len() {
        return Err(Error::Precondition("node tracks must share one length".into()));
    }
    let cube = RatBox::cube(a.dimension(), &Rat::from_integer(node.m.into()))?;
    if clipped_entry(a, &node.u, &cube)?.is_empty() {
        return Ok(false);
    }
    if !s.contains_pair(&node.b, &node.d) {
        return Ok(false);
    }
    for level in 0..=node.u.len() {
        let cell = clipped_entry(a, &node.u[..level], &cube)?;
        if cell.is_empty() {
            return Ok(false);
        }
        let anchor = address_anchor(&node.b[..level], a.dimension())?;
        let dist = hull_distance_inf(&anchor, &hull_of_boxset(&cell))?;
        if dist >= pow2(4 - level as i64) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A closed branch of the third kind: at `level` = lh(u) the extension
/// through B-word `b` drifted away from the cell hull, leaving an open
/// neighborhood of the hull that still catches the whole cell while
/// missing every B-point through `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FireEvent {
    pub level: usize,
    pub b: FinSeq,
    pub u: FinSeq,
    pub hull: Polytope,
    pub radius: Rat,
}

#[derive(Serialize, Deserialize)]
struct RawFire {
    level: usize,
    b: FinSeq,
    u: FinSeq,
    hull: Polytope,
    radius: String,
}

impl Serialize for FireEvent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawFire {
            level: self.level,
            b: self.b.clone(),
            u: self.u.clone(),
            hull: self.hull.clone(),
            radius: rat_to_string(&self.radius),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FireEvent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFire::deserialize(d)?;
        Ok(FireEvent {
            level: raw.level,
            b: raw.b,
            u: raw.u,
            hull: raw.hull,
            radius: rat_from_str(&raw.radius).map_err(serde::de::Error::custom)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreissOutcome {
    Emitted(Rc<Cgc>),
    Exhausted { reason: String },
}

/// Everything a separation run produces besides the report prose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreissRun {
    pub outcome: PreissOutcome,
    /// Nodes expanded, indexed by scheme-address length.
    pub explored: Vec<u64>,
    pub fires: Vec<FireEvent>,
    pub cubes: u64,
}

impl PreissRun {
    pub fn code(&self) -> Option<&Rc<Cgc>> {
        match &self.outcome {
            PreissOutcome::Emitted(c) => Some(c),
            PreissOutcome::Exhausted { .. } => None,
        }
    }

    /// Radius of the cube on which the separation guarantee holds.
    pub fn guarantee_radius(&self) -> u64 {
        self.cubes - 1
    }
}

enum Step {
    Done(Rc<Cgc>),
    Out(String),
}

struct Search<'a> {
    a: &'a SouslinScheme,
    s: &'a GraphTree,
    cube: RatBox,
    universe: Rc<Cgc>,
    empty: Rc<Cgc>,
    budget: u64,
    explored: Vec<u64>,
    fires: Vec<FireEvent>,
}

impl Search<'_> {
    fn explore(&mut self, m: u64, q: usize, b: &FinSeq, d: &FinSeq, u: &FinSeq) -> Result<Step> {
        if self.budget == 0 {
            return Ok(Step::Out(format!(
                "fuel exhausted with the frontier at cube {m}, address {u:?}"
            )));
        }
        self.budget -= 1;
        self.explored[u.len()] += 1;
        let n = u.len();
        if n == self.a.depth() {
            return Ok(Step::Out(format!(
                "scheme depth {n} reached at cube {m} with the branch still open"
            )));
        }
        let threshold = pow2(3 - n as i64);
        let ks = self.s.alphabet_bound();
        let ka = self.a.alphabet();
        let mut children: BTreeMap<(u64, u64, u64), Rc<Cgc>> = BTreeMap::new();
        for j in 0..ka {
            let mut u2 = u.clone();
            u2.push(j);
            let cell = clipped_entry(self.a, &u2, &self.cube)?;
            let hull = (!cell.is_empty()).then(|| hull_of_boxset(&cell));
            for k in 0..ks {
                for l in 0..ks {
                    let piece = match &hull {
                        // The extended cell misses the working cube.
                        None => self.empty.clone(),
                        Some(hull) => match self.s.step(q, k, l) {
                            // The pair word leaves the presentation.
                            None => self.universe.clone(),
                            Some(q2) => {
                                let mut b2 = b.clone();
                                b2.push(k);
                                let anchor = address_anchor(&b2, self.a.dimension())?;
                                let dist = hull_distance_inf(&anchor, hull)?;
                                if dist < threshold {
                                    let mut d2 = d.clone();
                                    d2.push(l);
                                    match self.explore(m, q2, &b2, &d2, &u2)? {
                                        Step::Done(c) => c,
                                        out => return Ok(out),
                                    }
                                } else {
                                    if dist < pow2(3 - n as i64) {
                                        return Err(Error::ConstantsViolation(format!(
                                            "anchor gap {} below 2^{} at level {n}",
                                            rat_to_string(&dist),
                                            3 - n as i64
                                        )));
                                    }
                                    let radius = pow2(-(n as i64));
                                    self.fires.push(FireEvent {
                                        level: n,
                                        b: b2.clone(),
                                        u: u2.clone(),
                                        hull: hull.clone(),
                                        radius: radius.clone(),
                                    });
                                    Rc::new(Cgc::OpenNbhd {
                                        p: hull.clone(),
                                        r: radius,
                                        levels: NBHD_LEVELS,
                                    })
                                }
                            }
                        },
                    };
                    children.insert((k, l, j), piece);
                }
            }
        }
        // Row j intersects every piece with letter index at least j; each
        // row is a suffix of the previous one, so the union is increasing.
        let rows: Vec<Vec<Rc<Cgc>>> = (0..ka)
            .map(|j| {
                let mut row = Vec::new();
                for i in j..ka {
                    for k in 0..ks {
                        for l in 0..ks {
                            row.push(children[&(k, l, i)].clone());
                        }
                    }
                }
                row
            })
            .collect();
        Ok(Step::Done(Rc::new(Cgc::Node(rows))))
    }
}

/// Build a convexly generated separator for the scheme's set against the
/// presented set, working inside cubes of radius below `cubes` and
/// expanding at most `fuel` nodes.
pub fn preiss_separate(
    a: &SouslinScheme,
    s: &GraphTree,
    cubes: u64,
    fuel: u64,
) -> Result<PreissRun> {
    if a.kind() != SchemeKind::Good {
        return Err(Error::Precondition("the scheme must be of the good kind".into()));
    }
    if s.side() != Side::Baire {
        return Err(Error::Precondition(
            "the B side must be a letter-labeled presentation".into(),
        ));
    }
    if cubes == 0 {
        return Err(Error::Precondition("at least one working cube required".into()));
    }
    if fuel == 0 {
        return Err(Error::Precondition("fuel must be positive".into()));
    }
    let dim = a.dimension();
    let universe = Rc::new(Cgc::Leaf(Polytope::new(
        RatBox::cube(dim, &Rat::from_integer(cubes.into()))?.vertices(),
    )?));
    let mut cube_codes: Vec<Rc<Cgc>> = Vec::with_capacity(cubes as usize);
    let mut search = Search {
        a,
        s,
        cube: RatBox::cube(dim, &Rat::zero())?,
        universe,
        empty: Cgc::empty(),
        budget: fuel,
        explored: vec![0; a.depth() + 1],
        fires: Vec::new(),
    };
    for m in 0..cubes {
        let root = PreissNode { m, b: Vec::new(), d: Vec::new(), u: Vec::new() };
        if !j_member(&root, a, s)? {
            // The scheme's set misses this cube entirely.
            cube_codes.push(search.empty.clone());
            continue;
        }
        search.cube = RatBox::cube(dim, &Rat::from_integer(m.into()))?;
        match search.explore(m, s.root(), &Vec::new(), &Vec::new(), &Vec::new())? {
            Step::Done(c) => cube_codes.push(c),
            Step::Out(reason) => {
                return Ok(PreissRun {
                    outcome: PreissOutcome::Exhausted { reason },
                    explored: search.explored,
                    fires: search.fires,
                    cubes,
                });
            }
        }
    }
    // Union over m of the intersection of all cube components from m on.
    let rows: Vec<Vec<Rc<Cgc>>> = (0..cubes as usize)
        .map(|m| cube_codes[m..].to_vec())
        .collect();
    Ok(PreissRun {
        outcome: PreissOutcome::Emitted(Rc::new(Cgc::Node(rows))),
        explored: search.explored,
        fires: search.fires,
        cubes,
    })
}

/// The rational grid of the given step denominator covering the closed
/// cube of the given radius.
pub fn sample_grid(dim: usize, radius: u64, step_denom: i64) -> Vec<Vec<Rat>> {
    let span = radius as i64 * step_denom;
    let mut out = Vec::new();
    let mut current = vec![Rat::zero(); dim];
    fn fill(out: &mut Vec<Vec<Rat>>, current: &mut Vec<Rat>, coord: usize, span: i64, denom: i64) {
        if coord == current.len() {
            out.push(current.clone());
            return;
        }
        for num in -span..=span {
            current[coord] = rat(num, denom);
            fill(out, current, coord + 1, span, denom);
        }
    }
    fill(&mut out, &mut current, 0, span, step_denom);
    out
}

/// Verification summary over rational samples and B-side addresses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreissCheck {
    pub a_checked: usize,
    pub a_violations: Vec<String>,
    pub b_checked: usize,
    pub b_violations: Vec<String>,
    pub fire_checks: usize,
    pub fire_violations: Vec<String>,
}

impl PreissCheck {
    pub fn ok(&self) -> bool {
        self.a_violations.is_empty()
            && self.b_violations.is_empty()
            && self.fire_violations.is_empty()
    }
}

fn extends(address: &UpPoint, word: &[u64]) -> bool {
    word.iter().enumerate().all(|(t, &l)| address.coordinate(t) == l)
}

/// Check an emitted code against samples: every sample that the scheme
/// approximates inside the guarantee cube must evaluate true, every
/// B-address limit must evaluate false, and every B-address through a
/// fired branch must clear the fired neighborhood radius.
pub fn verify_preiss(
    a: &SouslinScheme,
    run: &PreissRun,
    samples: &[Vec<Rat>],
    b_addresses: &[UpPoint],
) -> Result<PreissCheck> {
    let code = run.code().ok_or_else(|| {
        Error::Precondition("no code was emitted; nothing to verify".into())
    })?;
    let guarantee = RatBox::cube(a.dimension(), &Rat::from_integer(run.guarantee_radius().into()))?;
    let mut check = PreissCheck {
        a_checked: 0,
        a_violations: Vec::new(),
        b_checked: 0,
        b_violations: Vec::new(),
        fire_checks: 0,
        fire_violations: Vec::new(),
    };
    for x in samples {
        if !guarantee.contains(x) || !depth_approx_member(a, x, a.depth())? {
            continue;
        }
        check.a_checked += 1;
        if !eval_cgc(code, x)? {
            check.a_violations.push(format!("{x:?} approximated by the scheme but excluded"));
        }
    }
    for address in b_addresses {
        let y = crate::scheme::sigma_limit(address, a.dimension())?;
        check.b_checked += 1;
        if eval_cgc(code, &y)? {
            check.b_violations.push(format!("{address} lands inside the separator"));
        }
        for fire in &run.fires {
            if !extends(address, &fire.b) {
                continue;
            }
            check.fire_checks += 1;
            let dist = hull_distance_inf(&y, &fire.hull)?;
            if dist <= fire.radius {
                check.fire_violations.push(format!(
                    "{address} within {} of the hull fired at level {}",
                    rat_to_string(&dist),
                    fire.level
                ));
            }
        }
    }
    Ok(check)
}
