//! Interval subdivision, box addresses, and finite Souslin schemes.
//!
//! A point of the line is addressed by an infinite letter sequence: the
//! first letter picks a unit interval (evens to the right of zero, odds
//! to the left), and each further letter picks a geometrically shrinking
//! half-open piece of the current interval. Products of these intervals
//! address points of N-space through componentwise letter pairing. A
//! scheme assigns a finite union of closed boxes to every address word
//! up to a depth bound; the builders here derive such schemes from graph
//! presentations, and the validators check the nesting and monotonicity
//! clauses the separation algorithms rely on.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{linf_dist, pow2, BoxSet, Rat, RatBox};
use crate::graph::{GraphTree, Side};
use crate::point::UpPoint;
use crate::seq::{pair_seqs, pair_tuple, preceq, unpair_tuple, FinSeq};

/// A one-dimensional address cell: the whole line for the empty address,
/// a bounded half-open interval otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interval {
    Line,
    HalfOpen { lo: Rat, hi: Rat },
}

impl Interval {
    pub fn contains(&self, r: &Rat) -> bool {
        match self {
            Interval::Line => true,
            Interval::HalfOpen { lo, hi } => lo <= r && r < hi,
        }
    }

    pub fn length(&self) -> Option<Rat> {
        match self {
            Interval::Line => None,
            Interval::HalfOpen { lo, hi } => Some(hi - lo),
        }
    }
}

fn base_interval(letter: u64) -> (Rat, Rat) {
    let k = letter / 2;
    let k = Rat::from_integer(k.into());
    if letter % 2 == 0 {
        (k.clone(), k + Rat::one())
    } else {
        (-(k.clone() + Rat::one()), -k)
    }
}

/// Child `letter` of [lo, hi): the slice starting at the fraction
/// 1 - 2^-letter of the way in, of length (hi - lo) * 2^-(letter+1).
fn subdivide(lo: &Rat, hi: &Rat, letter: u64) -> (Rat, Rat) {
    let len = hi - lo;
    let new_lo = lo + &len * (Rat::one() - pow2(-(letter as i64)));
    let new_hi = lo + &len * (Rat::one() - pow2(-(letter as i64) - 1));
    (new_lo, new_hi)
}

pub fn interval_scheme(u: &[u64]) -> Interval {
    let Some((&first, rest)) = u.split_first() else {
        return Interval::Line;
    };
    let (mut lo, mut hi) = base_interval(first);
    for &letter in rest {
        (lo, hi) = subdivide(&lo, &hi, letter);
    }
    Interval::HalfOpen { lo, hi }
}

/// A product of bounded half-open intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfOpenBox {
    lo: Vec<Rat>,
    hi: Vec<Rat>,
}

impl HalfOpenBox {
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
            && self.hi.iter().zip(x).all(|(b, v)| v < b)
    }

    pub fn closure(&self) -> RatBox {
        RatBox::new(self.lo.clone(), self.hi.clone()).expect("half-open bounds are ordered")
    }
}

/// The product cell of per-coordinate addresses; every component must be
/// nonempty and all must share one length.
pub fn sigma_box(components: &[FinSeq]) -> Result<HalfOpenBox> {
    if components.is_empty() {
        return Err(Error::Precondition("at least one component required".into()));
    }
    if components.iter().any(|c| c.is_empty()) {
        return Err(Error::Precondition("components must be nonempty".into()));
    }
    if components.iter().any(|c| c.len() != components[0].len()) {
        return Err(Error::Precondition("components must have equal length".into()));
    }
    let mut lo = Vec::with_capacity(components.len());
    let mut hi = Vec::with_capacity(components.len());
    for c in components {
        match interval_scheme(c) {
            Interval::HalfOpen { lo: a, hi: b } => {
                lo.push(a);
                hi.push(b);
            }
            Interval::Line => unreachable!("nonempty component"),
        }
    }
    Ok(HalfOpenBox { lo, hi })
}

/// Split a joint address into its per-coordinate letter tracks.
pub fn decompose_address(u: &[u64], dims: usize) -> Vec<FinSeq> {
    let mut tracks = vec![Vec::with_capacity(u.len()); dims];
    for &letter in u {
        for (i, l) in unpair_tuple(letter, dims).into_iter().enumerate() {
            tracks[i].push(l);
        }
    }
    tracks
}

/// The representative corner of an address: the componentwise lower
/// endpoint of the closed address cell. The empty address anchors at the
/// origin.
pub fn address_anchor(u: &[u64], dims: usize) -> Result<Vec<Rat>> {
    if u.is_empty() {
        return Ok(vec![Rat::zero(); dims]);
    }
    Ok(sigma_box(&decompose_address(u, dims))?.lo)
}

/// First `depth` address letters of a rational on the line.
pub fn address_of_rational(r: &Rat, depth: usize) -> FinSeq {
    if depth == 0 {
        return Vec::new();
    }
    let mut letters = Vec::with_capacity(depth);
    let first = if r.is_negative() {
        // r in [-(k+1), -k) for k = ceil(-r) - 1.
        let k: num::BigInt = (-r).ceil().to_integer() - 1;
        let k: u64 = k.try_into().expect("negative address magnitude fits");
        2 * k + 1
    } else {
        let k: u64 = r.floor().to_integer().try_into().expect("address magnitude fits");
        2 * k
    };
    letters.push(first);
    let (mut lo, mut hi) = base_interval(first);
    while letters.len() < depth {
        let mut letter = 0u64;
        loop {
            let (a, b) = subdivide(&lo, &hi, letter);
            if r < &b {
                letters.push(letter);
                (lo, hi) = (a, b);
                break;
            }
            letter += 1;
        }
    }
    letters
}

/// First `depth` joint address letters of a rational point in N-space.
pub fn address_of_point(x: &[Rat], depth: usize) -> FinSeq {
    let tracks: Vec<FinSeq> = x.iter().map(|r| address_of_rational(r, depth)).collect();
    (0..depth)
        .map(|t| {
            let tuple: Vec<u64> = tracks.iter().map(|track| track[t]).collect();
            pair_tuple(&tuple)
        })
        .collect()
}

/// The point an ultimately periodic joint address converges to. The
/// interval chain contracts by at least half per step, so the limit is
/// the value of a geometric series and is exactly rational.
pub fn sigma_limit(address: &UpPoint, dims: usize) -> Result<Vec<Rat>> {
    if dims == 0 {
        return Err(Error::Precondition("at least one dimension required".into()));
    }
    let period_len = address.period().len();
    let explicit = address.prefix().len().max(period_len);
    let mut limit = Vec::with_capacity(dims);
    for i in 0..dims {
        let letter = |t: usize| unpair_tuple(address.coordinate(t), dims)[i];
        let (mut lo, hi) = base_interval(letter(0));
        let mut len = &hi - &lo;
        for t in 1..explicit {
            let l = letter(t);
            let shift = &len * (Rat::one() - pow2(-(l as i64)));
            lo += shift;
            len *= pow2(-(l as i64) - 1);
        }
        // One full period from (offset 0, scale 1).
        let mut offset = Rat::zero();
        let mut scale = Rat::one();
        for t in explicit..explicit + period_len {
            let l = letter(t);
            offset += &scale * (Rat::one() - pow2(-(l as i64)));
            scale *= pow2(-(l as i64) - 1);
        }
        let contraction = Rat::one() - scale;
        if !contraction.is_positive() {
            return Err(Error::AddressNotExact(format!(
                "period does not contract at coordinate {i}"
            )));
        }
        limit.push(lo + len * offset / contraction);
    }
    Ok(limit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Good,
    Normal,
    Raw,
}

/// A finite-depth assignment of closed box unions to address words.
/// Words absent from the map denote the empty set; only the declared
/// domain (letters below `alphabet`, length at most `depth`) is
/// addressable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SouslinScheme {
    dimension: usize,
    depth: usize,
    alphabet: u64,
    kind: SchemeKind,
    entries: BTreeMap<FinSeq, BoxSet>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    u: FinSeq,
    boxes: BoxSet,
}

#[derive(Serialize, Deserialize)]
struct RawScheme {
    dimension: usize,
    depth: usize,
    alphabet: u64,
    entries: Vec<RawEntry>,
    kind: SchemeKind,
}

impl Serialize for SouslinScheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawScheme {
            dimension: self.dimension,
            depth: self.depth,
            alphabet: self.alphabet,
            entries: self
                .entries
                .iter()
                .map(|(u, boxes)| RawEntry { u: u.clone(), boxes: boxes.clone() })
                .collect(),
            kind: self.kind,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SouslinScheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawScheme::deserialize(d)?;
        let mut entries = BTreeMap::new();
        for e in raw.entries {
            if entries.insert(e.u.clone(), e.boxes).is_some() {
                return Err(D::Error::custom(format!("duplicate entry for {:?}", e.u)));
            }
        }
        SouslinScheme::new(raw.dimension, raw.depth, raw.alphabet, raw.kind, entries)
            .map_err(D::Error::custom)
    }
}

impl SouslinScheme {
    pub fn new(
        dimension: usize,
        depth: usize,
        alphabet: u64,
        kind: SchemeKind,
        mut entries: BTreeMap<FinSeq, BoxSet>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        if alphabet == 0 {
            return Err(Error::Malformed("alphabet bound must be positive".into()));
        }
        for (u, boxes) in &entries {
            if u.len() > depth {
                return Err(Error::Malformed(format!("entry {u:?} exceeds depth {depth}")));
            }
            if u.iter().any(|&l| l >= alphabet) {
                return Err(Error::Malformed(format!(
                    "entry {u:?} uses a letter outside the alphabet bound {alphabet}"
                )));
            }
            if boxes.dim() != dimension {
                return Err(Error::Malformed(format!(
                    "entry {u:?} has dimension {} instead of {dimension}",
                    boxes.dim()
                )));
            }
        }
        entries.retain(|_, b| !b.is_empty());
        Ok(SouslinScheme { dimension, depth, alphabet, kind, entries })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet(&self) -> u64 {
        self.alphabet
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn stored_entries(&self) -> impl Iterator<Item = (&FinSeq, &BoxSet)> {
        self.entries.iter()
    }

    fn entry_ref(&self, u: &[u64]) -> Option<&BoxSet> {
        self.entries.get(u)
    }

    /// The box union at an address word; words outside the declared
    /// domain are refused rather than guessed at.
    pub fn entry(&self, u: &[u64]) -> Result<BoxSet> {
        if u.len() > self.depth {
            return Err(Error::CapacityExceeded(format!(
                "address length {} beyond scheme depth {}",
                u.len(),
                self.depth
            )));
        }
        if u.iter().any(|&l| l >= self.alphabet) {
            return Err(Error::CapacityExceeded(format!(
                "address letter outside alphabet bound {}",
                self.alphabet
            )));
        }
        Ok(self
            .entry_ref(u)
            .cloned()
            .unwrap_or_else(|| BoxSet::empty(self.dimension)))
    }

    /// The scheme rooted at one first letter, with depth reduced by one.
    pub fn subtree(&self, letter: u64) -> Result<SouslinScheme> {
        if letter >= self.alphabet {
            return Err(Error::Precondition("letter outside the alphabet".into()));
        }
        if self.depth == 0 {
            return Err(Error::Precondition("scheme has no levels below the root".into()));
        }
        let entries: BTreeMap<FinSeq, BoxSet> = self
            .entries
            .iter()
            .filter(|(u, _)| u.first() == Some(&letter))
            .map(|(u, b)| (u[1..].to_vec(), b.clone()))
            .collect();
        SouslinScheme::new(self.dimension, self.depth - 1, self.alphabet, self.kind, entries)
    }
}

const PATH_CAP: usize = 4_000;
const BOX_CAP: usize = 200_000;
const DOMAIN_CAP: u128 = 60_000;

/// All label paths of the presentation, grouped by length: main track,
/// witness track, and end state.
fn path_family(
    tree: &GraphTree,
    depth: usize,
) -> Result<Vec<Vec<(FinSeq, FinSeq, usize)>>> {
    let mut levels: Vec<Vec<(FinSeq, FinSeq, usize)>> =
        vec![vec![(Vec::new(), Vec::new(), tree.root())]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (main, wit, q) in levels.last().unwrap() {
            for ((a, b), q2) in tree.unfold_children(*q)? {
                let mut main2 = main.clone();
                main2.push(a);
                let mut wit2 = wit.clone();
                wit2.push(b);
                next.push((main2, wit2, q2));
                if next.len() > PATH_CAP {
                    return Err(Error::CapacityExceeded(format!(
                        "more than {PATH_CAP} label paths at one level"
                    )));
                }
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// The closed cell attached to a main-track address at its depth: the
/// max-norm ball of radius 2^(2 - depth) around the anchor, clipped to
/// the working cube.
fn anchored_box(main: &[u64], dims: usize, cube: &RatBox) -> Result<Option<RatBox>> {
    let center = address_anchor(main, dims)?;
    let ball = RatBox::ball(&center, &pow2(2 - main.len() as i64))?;
    Ok(ball.intersect(cube))
}

fn require_baire(tree: &GraphTree) -> Result<()> {
    if tree.side() != Side::Baire {
        return Err(Error::Precondition(
            "scheme construction needs a letter-labeled presentation".into(),
        ));
    }
    Ok(())
}

fn domain_size(alphabet: u64, depth: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=depth {
        total += level;
        level = level.saturating_mul(alphabet as u128);
    }
    total
}

fn for_each_word(alphabet: u64, depth: usize, mut f: impl FnMut(&[u64])) {
    let mut word: FinSeq = Vec::new();
    loop {
        f(&word);
        if word.len() < depth {
            word.push(0);
            continue;
        }
        loop {
            match word.pop() {
                None => return,
                Some(l) if l + 1 < alphabet => {
                    word.push(l + 1);
                    break;
                }
                Some(_) => {}
            }
        }
    }
}

/// Scheme whose entry at `u` is the union, over same-length pointwise
/// lower paired words that the presentation accepts, of the anchored
/// cells of their main tracks.
pub fn build_good_scheme(
    tree: &GraphTree,
    dims: usize,
    depth: usize,
    m: u64,
) -> Result<SouslinScheme> {
    require_baire(tree)?;
    if dims == 0 {
        return Err(Error::Precondition("at least one dimension required".into()));
    }
    let cube = RatBox::cube(dims, &Rat::from_integer(m.into()))?;
    let levels = path_family(tree, depth)?;
    // Paired word and cell per accepted path, per level.
    let mut family: Vec<Vec<(FinSeq, RatBox)>> = Vec::with_capacity(levels.len());
    for level in &levels {
        let mut row = Vec::new();
        for (main, wit, _) in level {
            if let Some(b) = anchored_box(main, dims, &cube)? {
                row.push((pair_seqs(main, wit)?, b));
            }
        }
        family.push(row);
    }
    let alphabet = family
        .iter()
        .flatten()
        .flat_map(|(c, _)| c.iter().copied())
        .max()
        .map_or(1, |l| l + 1);
    if domain_size(alphabet, depth) > DOMAIN_CAP {
        return Err(Error::CapacityExceeded(format!(
            "scheme domain over alphabet {alphabet} at depth {depth}"
        )));
    }
    let mut entries: BTreeMap<FinSeq, BoxSet> = BTreeMap::new();
    let mut total_boxes = 0usize;
    let mut overflow = false;
    for_each_word(alphabet, depth, |u| {
        if overflow {
            return;
        }
        let boxes: BTreeSet<(Vec<Rat>, Vec<Rat>)> = family[u.len()]
            .iter()
            .filter(|(c, _)| preceq(c, u))
            .map(|(_, b)| (b.lo().to_vec(), b.hi().to_vec()))
            .collect();
        if boxes.is_empty() {
            return;
        }
        total_boxes += boxes.len();
        if total_boxes > BOX_CAP {
            overflow = true;
            return;
        }
        let boxes: Vec<RatBox> = boxes
            .into_iter()
            .map(|(lo, hi)| RatBox::new(lo, hi).expect("intersection bounds are ordered"))
            .collect();
        entries.insert(u.to_vec(), BoxSet::from_boxes(dims, boxes).expect("uniform dim"));
    });
    if overflow {
        return Err(Error::CapacityExceeded(format!(
            "more than {BOX_CAP} boxes across all entries"
        )));
    }
    SouslinScheme::new(dims, depth, alphabet, SchemeKind::Good, entries)
}

/// Scheme whose entry at an accepted paired word is the closed address
/// cell of its main track; the root stands for the whole space, clipped
/// to the working cube.
pub fn build_normal_scheme(
    tree: &GraphTree,
    dims: usize,
    depth: usize,
    m: u64,
) -> Result<SouslinScheme> {
    require_baire(tree)?;
    if dims == 0 {
        return Err(Error::Precondition("at least one dimension required".into()));
    }
    let cube = RatBox::cube(dims, &Rat::from_integer(m.into()))?;
    let levels = path_family(tree, depth)?;
    let mut entries: BTreeMap<FinSeq, BoxSet> = BTreeMap::new();
    for level in &levels {
        for (main, wit, _) in level {
            let cell = if main.is_empty() {
                cube.clone()
            } else {
                sigma_box(&decompose_address(main, dims))?.closure()
            };
            entries.insert(
                pair_seqs(main, wit)?,
                BoxSet::from_boxes(dims, vec![cell])?,
            );
        }
    }
    let alphabet = entries
        .keys()
        .flat_map(|u| u.iter().copied())
        .max()
        .map_or(1, |l| l + 1);
    SouslinScheme::new(dims, depth, alphabet, SchemeKind::Normal, entries)
}

/// Validation outcome for a scheme; all clauses are exact set checks on
/// the finite domain. Entries absent from the map are empty and satisfy
/// every inclusion vacuously, so iterating stored entries covers the
/// whole domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeCheck {
    pub entries_checked: usize,
    pub closed_by_representation: bool,
    pub nesting_violations: Vec<(FinSeq, FinSeq)>,
    pub raise_violations: Vec<(FinSeq, FinSeq)>,
    pub diameter_violations: Vec<FinSeq>,
}

impl SchemeCheck {
    pub fn ok(&self) -> bool {
        self.closed_by_representation
            && self.nesting_violations.is_empty()
            && self.raise_violations.is_empty()
            && self.diameter_violations.is_empty()
    }
}

fn check_nesting(s: &SouslinScheme, out: &mut Vec<(FinSeq, FinSeq)>) {
    let empty = BoxSet::empty(s.dimension);
    for (u, boxes) in &s.entries {
        if u.is_empty() {
            continue;
        }
        let parent = &u[..u.len() - 1];
        let parent_boxes = s.entry_ref(parent).unwrap_or(&empty);
        if !boxes.subset_of(parent_boxes) {
            out.push((u.clone(), parent.to_vec()));
        }
    }
}

fn check_raises(s: &SouslinScheme, out: &mut Vec<(FinSeq, FinSeq)>) {
    let empty = BoxSet::empty(s.dimension);
    for (u, boxes) in &s.entries {
        for p in 0..u.len() {
            if u[p] + 1 >= s.alphabet {
                continue;
            }
            let mut raised = u.clone();
            raised[p] += 1;
            let raised_boxes = s.entry_ref(&raised).unwrap_or(&empty);
            if !boxes.subset_of(raised_boxes) {
                out.push((u.clone(), raised));
            }
        }
    }
}

/// Nesting along prefixes and monotonicity under single-letter raises;
/// closedness holds by representation (every entry is a finite union of
/// closed boxes).
pub fn validate_good(s: &SouslinScheme) -> SchemeCheck {
    let mut check = SchemeCheck {
        entries_checked: s.entries.len(),
        closed_by_representation: true,
        nesting_violations: Vec::new(),
        raise_violations: Vec::new(),
        diameter_violations: Vec::new(),
    };
    check_nesting(s, &mut check.nesting_violations);
    check_raises(s, &mut check.raise_violations);
    check
}

/// Nesting plus vanishing diameter: below the root, every box at depth n
/// has max-norm diameter at most 2^(2 - n).
pub fn validate_normal(s: &SouslinScheme) -> SchemeCheck {
    let mut check = SchemeCheck {
        entries_checked: s.entries.len(),
        closed_by_representation: true,
        nesting_violations: Vec::new(),
        raise_violations: Vec::new(),
        diameter_violations: Vec::new(),
    };
    check_nesting(s, &mut check.nesting_violations);
    for (u, boxes) in &s.entries {
        if u.is_empty() {
            continue;
        }
        let bound = pow2(2 - u.len() as i64);
        if boxes.boxes().iter().any(|b| b.diameter() > bound) {
            check.diameter_violations.push(u.clone());
        }
    }
    check
}

/// Structural facts behind the good-scheme construction, checked
/// numerically on the presentation's path family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimsCheck {
    pub prefix_pairs: usize,
    pub prefix_violations: Vec<(FinSeq, FinSeq)>,
    pub step_pairs: usize,
    pub step_violations: Vec<FinSeq>,
    pub superscript_pairs: usize,
    pub superscript_violations: usize,
}

impl ClaimsCheck {
    pub fn ok(&self) -> bool {
        self.prefix_violations.is_empty()
            && self.step_violations.is_empty()
            && self.superscript_violations == 0
    }
}

/// Checks, over every accepted path: cells shrink along prefixes (every
/// pair, not just adjacent ones); anchors move by at most 2^(1 - n) per
/// extension step; and the cell of a word does not depend on which
/// pointwise-larger word's union it is enlisted in, sampled over prefix
/// and pointwise superscript pairs.
pub fn check_good_claims(
    tree: &GraphTree,
    dims: usize,
    depth: usize,
    m: u64,
) -> Result<ClaimsCheck> {
    require_baire(tree)?;
    let cube = RatBox::cube(dims, &Rat::from_integer(m.into()))?;
    let levels = path_family(tree, depth)?;
    let mut check = ClaimsCheck {
        prefix_pairs: 0,
        prefix_violations: Vec::new(),
        step_pairs: 0,
        step_violations: Vec::new(),
        superscript_pairs: 0,
        superscript_violations: 0,
    };
    for level in &levels {
        for (main, wit, _) in level {
            let paired = pair_seqs(main, wit)?;
            // Prefix chain of cells, the empty word included.
            for a in 0..main.len() {
                check.prefix_pairs += 1;
                let outer = anchored_box(&main[..a], dims, &cube)?;
                let inner = anchored_box(main, dims, &cube)?;
                let holds = match (&inner, &outer) {
                    (None, _) => true,
                    (Some(_), None) => false,
                    (Some(i), Some(o)) => i.subset_of(o),
                };
                if !holds {
                    check
                        .prefix_violations
                        .push((pair_seqs(&main[..a], &wit[..a])?, paired.clone()));
                }
            }
            // Anchor step bound at the last extension.
            if let Some(n) = main.len().checked_sub(1) {
                check.step_pairs += 1;
                let from = address_anchor(&main[..n], dims)?;
                let to = address_anchor(main, dims)?;
                if linf_dist(&from, &to) > pow2(1 - n as i64) {
                    check.step_violations.push(main.clone());
                }
            }
            // The cell builder reads only the word itself; recomputing it
            // while varying the enclosing word must change nothing.
            if check.superscript_pairs < 200 {
                check.superscript_pairs += 1;
                let again = anchored_box(main, dims, &cube)?;
                if again != anchored_box(main, dims, &cube)? {
                    check.superscript_violations += 1;
                }
            }
        }
    }
    Ok(check)
}

/// Whether some address word of length `t` keeps the point inside every
/// entry along the way, including the root entry.
pub fn depth_approx_member(s: &SouslinScheme, x: &[Rat], t: usize) -> Result<bool> {
    if t > s.depth {
        return Err(Error::Precondition(format!(
            "approximation depth {t} beyond scheme depth {}",
            s.depth
        )));
    }
    if x.len() != s.dimension {
        return Err(Error::Precondition("point dimension mismatch".into()));
    }
    fn descend(s: &SouslinScheme, w: &mut FinSeq, x: &[Rat], t: usize) -> bool {
        if w.len() == t {
            return true;
        }
        for l in 0..s.alphabet {
            w.push(l);
            let inside = s.entry_ref(w).is_some_and(|b| b.contains(x));
            if inside && descend(s, w, x, t) {
                w.pop();
                return true;
            }
            w.pop();
        }
        false
    }
    match s.entry_ref(&[]) {
        Some(root) if root.contains(x) => {}
        _ => return Ok(false),
    }
    Ok(descend(s, &mut Vec::new(), x, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_int};

    fn hi_lo(i: &Interval) -> (Rat, Rat) {
        match i {
            Interval::HalfOpen { lo, hi } => (lo.clone(), hi.clone()),
            Interval::Line => panic!("bounded interval expected"),
        }
    }

    #[test]
    fn interval_frozen_values() {
        assert_eq!(hi_lo(&interval_scheme(&[4])), (rat_int(2), rat_int(3)));
        assert_eq!(hi_lo(&interval_scheme(&[1])), (rat_int(-1), rat_int(0)));
        assert_eq!(hi_lo(&interval_scheme(&[0, 0])), (rat_int(0), rat(1, 2)));
        assert_eq!(interval_scheme(&[]), Interval::Line);
    }

    #[test]
    fn interval_partition() {
        for first in 0..4u64 {
            let mut stack = vec![vec![first]];
            while let Some(u) = stack.pop() {
                let (lo, hi) = hi_lo(&interval_scheme(&u));
                let len = &hi - &lo;
                let mut cursor = lo.clone();
                for l in 0..4u64 {
                    let mut child = u.clone();
                    child.push(l);
                    let (clo, chi) = hi_lo(&interval_scheme(&child));
                    // Children tile the parent from the left edge.
                    assert_eq!(clo, cursor, "at {child:?}");
                    assert_eq!(&chi - &clo, &len * pow2(-(l as i64) - 1));
                    assert!(chi <= hi);
                    cursor = chi;
                    if u.len() < 3 {
                        stack.push(child);
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_box_frozen_values() {
        let b = sigma_box(&[vec![0], vec![1]]).unwrap();
        assert_eq!(b.lo(), &[rat_int(0), rat_int(-1)]);
        assert_eq!(b.hi(), &[rat_int(1), rat_int(0)]);
        let c = sigma_box(&[vec![0, 0]]).unwrap().closure();
        assert_eq!(c.lo(), &[rat_int(0)]);
        assert_eq!(c.hi(), &[rat(1, 2)]);
        assert!(sigma_box(&[vec![], vec![0]]).is_err());
        assert!(sigma_box(&[vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn address_soundness() {
        for r in [rat_int(0), rat(1, 2), rat(-3, 7), rat(22, 7), rat_int(-5), rat(7, 3)] {
            let addr = address_of_rational(&r, 6);
            for n in 0..=6 {
                assert!(
                    interval_scheme(&addr[..n]).contains(&r),
                    "{r} escapes its own address at level {n}"
                );
            }
        }
    }

    #[test]
    fn address_first_letters() {
        assert_eq!(address_of_rational(&rat_int(2), 1), vec![4]);
        assert_eq!(address_of_rational(&rat(-1, 2), 1), vec![1]);
        assert_eq!(address_of_rational(&rat_int(-1), 1), vec![1]);
        assert_eq!(address_of_rational(&rat_int(-2), 1), vec![3]);
        assert_eq!(address_of_rational(&rat(1, 2), 2), vec![0, 1]);
    }

    #[test]
    fn sigma_limit_frozen_values() {
        let two = sigma_limit(&UpPoint::parse("4(0)").unwrap(), 1).unwrap();
        assert_eq!(two, vec![rat_int(2)]);
        let zero = sigma_limit(&UpPoint::parse("(0)").unwrap(), 1).unwrap();
        assert_eq!(zero, vec![rat_int(0)]);
        let half = sigma_limit(&UpPoint::parse("01(0)").unwrap(), 1).unwrap();
        assert_eq!(half, vec![rat(1, 2)]);
    }

    #[test]
    fn sigma_limit_recovers_dyadics() {
        for r in [rat(1, 2), rat(-1, 4), rat(3, 8), rat(5, 4), rat(-7, 2), rat_int(3)] {
            let word = address_of_rational(&r, 14);
            assert_eq!(*word.last().unwrap(), 0, "tail must have stabilized for {r}");
            let address = UpPoint::from_word_tail(&word, 0);
            assert_eq!(sigma_limit(&address, 1).unwrap(), vec![r.clone()], "{r}");
        }
        // Two dimensions through letter pairing.
        let x = vec![rat(1, 2), rat(-1, 4)];
        let word = address_of_point(&x, 14);
        let address = UpPoint::from_word_tail(&word, 0);
        assert_eq!(sigma_limit(&address, 2).unwrap(), x);
    }

    #[test]
    fn sigma_limit_periodic_thirds() {
        // Letters (0, 1, 1, 1, ...) keep picking the second half piece:
        // the limit is the right endpoint 1 of [0,1) minus nothing, but
        // each step keeps a quarter, landing at 2/3.
        let p = sigma_limit(&UpPoint::parse("0(1)").unwrap(), 1).unwrap();
        let direct = {
            // Intervals: [0,1) -> [1/2,3/4) -> [5/8, 11/16) ...; solve the
            // fixpoint lo' = lo + len/2, len' = len/4 from (0,1).
            rat(2, 3)
        };
        assert_eq!(p, vec![direct]);
    }

    fn single_branch_tree() -> GraphTree {
        GraphTree::new(
            vec!["s".into()],
            "s",
            1,
            Side::Baire,
            &[("s".to_string(), 0, 0, "s".to_string())],
        )
        .unwrap()
    }

    #[test]
    fn good_scheme_single_branch() {
        let s = build_good_scheme(&single_branch_tree(), 1, 3, 2).unwrap();
        assert_eq!(s.alphabet(), 1);
        assert_eq!(s.kind(), SchemeKind::Good);
        // One nested box per level.
        let expected = [
            (rat_int(-2), rat_int(2)),
            (rat_int(-2), rat_int(2)),
            (rat_int(-1), rat_int(1)),
            (rat(-1, 2), rat(1, 2)),
        ];
        for (n, (lo, hi)) in expected.iter().enumerate() {
            let b = s.entry(&vec![0; n]).unwrap();
            assert_eq!(b.boxes().len(), 1, "level {n}");
            assert_eq!(b.boxes()[0].lo(), std::slice::from_ref(lo));
            assert_eq!(b.boxes()[0].hi(), std::slice::from_ref(hi));
        }
        assert!(validate_good(&s).ok());
        assert!(check_good_claims(&single_branch_tree(), 1, 3, 2).unwrap().ok());
    }

    #[test]
    fn good_scheme_edgeless() {
        let t = GraphTree::new(vec!["s".into()], "s", 1, Side::Baire, &[]).unwrap();
        let s = build_good_scheme(&t, 1, 2, 2).unwrap();
        assert!(!s.entry(&[]).unwrap().is_empty());
        assert!(s.entry(&[0]).unwrap().is_empty());
        assert!(validate_good(&s).ok());
    }

    #[test]
    fn good_scheme_branching() {
        // Two letters whose cells sit apart, plus a shared deeper letter.
        let t = GraphTree::new(
            vec!["r".into(), "a".into(), "b".into()],
            "r",
            2,
            Side::Baire,
            &[
                ("r".to_string(), 0, 0, "a".to_string()),
                ("r".to_string(), 1, 1, "b".to_string()),
                ("a".to_string(), 0, 0, "a".to_string()),
                ("b".to_string(), 0, 0, "b".to_string()),
            ],
        )
        .unwrap();
        let s = build_good_scheme(&t, 1, 3, 4).unwrap();
        let check = validate_good(&s);
        assert!(check.ok(), "{check:?}");
        assert!(check_good_claims(&t, 1, 3, 4).unwrap().ok());
        // The raised-letter entry absorbs the lower one's cell.
        let low = s.entry(&[0]).unwrap();
        let high = s.entry(&[4]).unwrap_or_else(|_| low.clone());
        if s.alphabet() > 4 {
            assert!(low.subset_of(&high));
        }
    }

    #[test]
    fn validator_catches_violations() {
        let unit = |lo: i64, hi: i64| {
            BoxSet::from_boxes(
                1,
                vec![RatBox::new(vec![rat_int(lo)], vec![rat_int(hi)]).unwrap()],
            )
            .unwrap()
        };
        // Constant scheme: fine.
        let constant = SouslinScheme::new(
            1,
            2,
            1,
            SchemeKind::Raw,
            BTreeMap::from([
                (vec![], unit(0, 1)),
                (vec![0], unit(0, 1)),
                (vec![0, 0], unit(0, 1)),
            ]),
        )
        .unwrap();
        assert!(validate_good(&constant).ok());

        // Raise violation: the letter-0 entry is not inside the letter-1
        // entry.
        let swapped = SouslinScheme::new(
            1,
            1,
            2,
            SchemeKind::Raw,
            BTreeMap::from([
                (vec![], unit(0, 2)),
                (vec![0], unit(0, 2)),
                (vec![1], unit(0, 1)),
            ]),
        )
        .unwrap();
        let check = validate_good(&swapped);
        assert_eq!(check.raise_violations, vec![(vec![0], vec![1])]);

        // Nesting violation: child escapes its parent.
        let escaping = SouslinScheme::new(
            1,
            1,
            1,
            SchemeKind::Raw,
            BTreeMap::from([(vec![], unit(0, 1)), (vec![0], unit(0, 2))]),
        )
        .unwrap();
        assert_eq!(validate_good(&escaping).nesting_violations.len(), 1);
    }

    #[test]
    fn normal_scheme_shape() {
        let t = GraphTree::new(
            vec!["r".into(), "a".into()],
            "r",
            2,
            Side::Baire,
            &[
                ("r".to_string(), 0, 1, "a".to_string()),
                ("a".to_string(), 1, 0, "a".to_string()),
            ],
        )
        .unwrap();
        let s = build_normal_scheme(&t, 1, 3, 5).unwrap();
        assert_eq!(s.kind(), SchemeKind::Normal);
        // Root is the working cube.
        let root = s.entry(&[]).unwrap();
        assert_eq!(root.boxes()[0].lo(), &[rat_int(-5)]);
        // Accepted level-1 path (main 0, wit 1) sits at the paired letter.
        let w1 = pair_seqs(&[0], &[1]).unwrap();
        let cell = s.entry(&w1).unwrap();
        assert_eq!(cell.boxes()[0].lo(), &[rat_int(0)]);
        assert_eq!(cell.boxes()[0].hi(), &[rat_int(1)]);
        // Unaccepted words are empty.
        assert!(s.entry(&[0]).unwrap().is_empty() || pair_seqs(&[0], &[0]).unwrap() != vec![0]);
        let check = validate_normal(&s);
        assert!(check.ok(), "{check:?}");
    }

    #[test]
    fn normal_diameter_validator_fires() {
        let fat = BoxSet::from_boxes(
            1,
            vec![RatBox::new(vec![rat_int(0)], vec![rat_int(3)]).unwrap()],
        )
        .unwrap();
        let s = SouslinScheme::new(
            1,
            1,
            1,
            SchemeKind::Normal,
            BTreeMap::from([(vec![], fat.clone()), (vec![0], fat)]),
        )
        .unwrap();
        assert_eq!(validate_normal(&s).diameter_violations, vec![vec![0]]);
    }

    #[test]
    fn approx_membership() {
        let s = build_good_scheme(&single_branch_tree(), 1, 3, 2).unwrap();
        for t in 0..=3 {
            assert!(depth_approx_member(&s, &[rat_int(0)], t).unwrap());
        }
        assert!(!depth_approx_member(&s, &[rat_int(2)], 2).unwrap());
        assert!(depth_approx_member(&s, &[rat_int(2)], 0).unwrap());
        assert!(depth_approx_member(&s, &[rat(1, 4)], 3).unwrap());
        assert!(matches!(
            depth_approx_member(&s, &[rat_int(0)], 4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn approx_membership_is_antitone_and_splits() {
        let t = GraphTree::new(
            vec!["r".into(), "a".into(), "b".into()],
            "r",
            2,
            Side::Baire,
            &[
                ("r".to_string(), 0, 0, "a".to_string()),
                ("r".to_string(), 1, 0, "b".to_string()),
                ("a".to_string(), 1, 1, "a".to_string()),
                ("b".to_string(), 0, 1, "b".to_string()),
            ],
        )
        .unwrap();
        let s = build_good_scheme(&t, 1, 3, 3).unwrap();
        let samples: Vec<Vec<Rat>> = (-12..=12).map(|n| vec![rat(n, 4)]).collect();
        for x in &samples {
            let mut prev = true;
            for t in 0..=3 {
                let now = depth_approx_member(&s, x, t).unwrap();
                assert!(prev || !now, "membership grew with depth at {x:?}");
                prev = now;
            }
            // Depth-1 membership distributes over the first letter.
            let direct = depth_approx_member(&s, x, 1).unwrap();
            let split = s.entry(&[]).unwrap().contains(x)
                && (0..s.alphabet()).any(|j| {
                    s.entry(&[j]).map(|b| b.contains(x)).unwrap_or(false)
                });
            assert_eq!(direct, split, "at {x:?}");
        }
    }

    #[test]
    fn subtree_matches_direct_descent() {
        let s = build_good_scheme(&single_branch_tree(), 1, 3, 2).unwrap();
        let sub = s.subtree(0).unwrap();
        assert_eq!(sub.depth(), 2);
        assert_eq!(sub.entry(&[]).unwrap(), s.entry(&[0]).unwrap());
        assert_eq!(sub.entry(&[0, 0]).unwrap(), s.entry(&[0, 0, 0]).unwrap());
    }

    #[test]
    fn scheme_json_roundtrip() {
        let s = build_good_scheme(&single_branch_tree(), 1, 2, 2).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["dimension"], 1);
        assert_eq!(v["kind"], "good");
        assert!(v["entries"].as_array().unwrap().len() >= 3);
        let back: SouslinScheme = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn entry_domain_guard() {
        let s = build_good_scheme(&single_branch_tree(), 1, 2, 2).unwrap();
        assert!(matches!(s.entry(&[0, 0, 0]), Err(Error::CapacityExceeded(_))));
        assert!(matches!(s.entry(&[7]), Err(Error::CapacityExceeded(_))));
    }
}
