//! End-to-end acceptance battery. Each test prints one PASS line with its
//! measurements (visible under `--nocapture`); any assertion failure is
//! the corresponding FAIL.

use std::collections::BTreeMap;
use std::rc::Rc;
use std::time::Instant;

use num::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sepkit_core::cgc::validate_cgc;
use sepkit_core::dyck::{build_product, dyck_separate, member_projection, verify_dyck, DyckOutcome};
use sepkit_core::fixpoint::{norm_le_wo, wo_le_norm};
use sepkit_core::geom::{
    hull_distance_inf, hull_membership, rat, rat_int, BoxSet, Polytope, Rat, RatBox,
};
use sepkit_core::graph::{GraphTree, Side};
use sepkit_core::oracle::{caratheodory_membership, fourier_motzkin_distance};
use sepkit_core::order::{lo_code_of_tree, lo_embedding_check, LinOrder};
use sepkit_core::point::{point_subseteq, UpPoint};
use sepkit_core::preiss::{preiss_separate, sample_grid, verify_preiss};
use sepkit_core::report::{
    digest_input, dyck_report, preiss_report, to_canonical_json, DyckConfig, PreissConfig,
};
use sepkit_core::scheme::{
    build_good_scheme, check_good_claims, validate_good, SchemeKind, SouslinScheme,
};
use sepkit_core::seq::{pair_tuple, FinSeq};
use sepkit_core::spc::{
    eval_borel, eval_spc, is_monotone_spc, spc_norm, spc_support, spc_to_borel, Spc,
};

fn random_tree(rng: &mut ChaCha8Rng, side: Side, max_states: usize, forward_bias: bool) -> GraphTree {
    let n = rng.gen_range(1..=max_states);
    let k: u64 = rng.gen_range(1..=3);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let a_bound = match side {
        Side::Cantor => 2,
        Side::Baire => k,
    };
    let mut used: std::collections::BTreeSet<(usize, u64, u64)> = Default::default();
    let mut edges: Vec<(String, u64, u64, String)> = Vec::new();
    for i in 1..n {
        loop {
            let from = rng.gen_range(0..i);
            let a = rng.gen_range(0..a_bound);
            let b = rng.gen_range(0..k);
            if used.insert((from, a, b)) {
                edges.push((states[from].clone(), a, b, states[i].clone()));
                break;
            }
        }
    }
    let extra = rng.gen_range(0..=if forward_bias { n } else { 2 * n });
    for _ in 0..extra {
        let from = rng.gen_range(0..n);
        let a = rng.gen_range(0..a_bound);
        let b = rng.gen_range(0..k);
        if used.insert((from, a, b)) {
            let to = if forward_bias && rng.gen_bool(0.7) {
                rng.gen_range(from..n)
            } else {
                rng.gen_range(0..n)
            };
            edges.push((states[from].clone(), a, b, states[to].clone()));
        }
    }
    GraphTree::new(states, "q0", k, side, &edges).expect("reachable by construction")
}

fn random_spc(rng: &mut ChaCha8Rng, depth: usize) -> Rc<Spc> {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => Spc::leaf_empty(),
            1 => Spc::leaf_full(),
            _ => Spc::leaf_coord(rng.gen_range(0..10)),
        };
    }
    let rows = rng.gen_range(1..=3);
    let grid = (0..rows)
        .map(|_| (0..rng.gen_range(1..=3)).map(|_| random_spc(rng, depth - 1)).collect())
        .collect();
    Spc::union_of(grid).expect("nonempty grid")
}

#[test]
fn c01_dyck_soundness_on_random_acyclic_pairs() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut pairs = 0usize;
    let mut points = 0usize;
    let mut attempts = 0usize;
    while pairs < 200 {
        attempts += 1;
        assert!(attempts < 50_000, "generator failed to reach 200 acyclic pairs");
        let t = random_tree(&mut rng, Side::Cantor, 5, true);
        let s = random_tree(&mut rng, Side::Cantor, 5, true);
        let product = build_product(&t, &s).unwrap();
        if !product.is_acyclic() || product.num_pairs() > 11 {
            continue;
        }
        let code = match dyck_separate(&t, &s).unwrap() {
            DyckOutcome::Separator(code) => code,
            DyckOutcome::Witness(_) => unreachable!("acyclic products emit codes"),
        };
        let depth = product.num_pairs() + 1;
        let check = verify_dyck(&t, &s, &code, depth).unwrap();
        assert!(
            check.violations.is_empty(),
            "separation contract broken on pair {pairs}: {:?}",
            check.violations.first()
        );
        pairs += 1;
        points += check.points_checked;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "soundness suite took {elapsed:?}");
    println!(
        "PASS c01 dyck soundness: {pairs} acyclic pairs, {points} points, 0 violations, {elapsed:?}"
    );
}

#[test]
fn c02_dyck_witnesses_on_random_cyclic_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut pairs = 0usize;
    let mut attempts = 0usize;
    while pairs < 100 {
        attempts += 1;
        assert!(attempts < 50_000, "generator failed to reach 100 cyclic pairs");
        let t = random_tree(&mut rng, Side::Cantor, 5, false);
        let s = random_tree(&mut rng, Side::Cantor, 5, false);
        let product = build_product(&t, &s).unwrap();
        if product.is_acyclic() {
            continue;
        }
        let w = match dyck_separate(&t, &s).unwrap() {
            DyckOutcome::Witness(w) => w,
            DyckOutcome::Separator(_) => unreachable!("cyclic products yield witnesses"),
        };
        assert!(member_projection(&t, &w.x).unwrap(), "x outside the first projection");
        assert!(member_projection(&s, &w.y).unwrap(), "y outside the second projection");
        assert!(point_subseteq(&w.x, &w.y), "witness pair is not pointwise dominated");
        pairs += 1;
    }
    println!("PASS c02 dyck witnesses: {pairs} cyclic pairs, all witnesses genuine");
}

#[test]
fn c03_semi_positive_codes_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for i in 0..1000 {
        let code = random_spc(&mut rng, 3);
        assert!(
            is_monotone_spc(&code).unwrap(),
            "code {i} evaluated non-monotonically: {code:?}"
        );
    }
    println!("PASS c03 positivity law: 1000 random codes, all monotone on their support");
}

fn permutations(items: &[BigUint]) -> Vec<Vec<BigUint>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head.clone());
            out.push(p);
        }
    }
    out
}

fn all_small_orders() -> Vec<LinOrder> {
    let universe: Vec<BigUint> = [3u64, 5, 7, 9, 11].iter().map(|&n| BigUint::from(n)).collect();
    let mut orders = Vec::new();
    for mask in 0..1u32 << universe.len() {
        let subset: Vec<BigUint> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, x)| x.clone())
            .collect();
        for p in permutations(&subset) {
            orders.push(LinOrder::from_sorted(&p).unwrap());
        }
    }
    orders
}

fn code_family() -> Vec<Rc<Spc>> {
    let leaves =
        vec![Spc::leaf_empty(), Spc::leaf_full(), Spc::leaf_coord(0), Spc::leaf_coord(1)];
    let mut family = leaves.clone();
    let mut layer = Vec::new();
    for a in &leaves {
        layer.push(Spc::union_of(vec![vec![a.clone()]]).unwrap());
        for b in &leaves {
            layer.push(Spc::union_of(vec![vec![a.clone(), b.clone()]]).unwrap());
            layer.push(Spc::union_of(vec![vec![a.clone()], vec![b.clone()]]).unwrap());
        }
    }
    family.extend(layer.iter().cloned());
    for _ in 0..2 {
        let mut next = Vec::new();
        for c in layer.iter().take(12) {
            next.push(Spc::union_of(vec![vec![c.clone()]]).unwrap());
            next.push(Spc::union_of(vec![vec![c.clone(), Spc::leaf_full()], vec![Spc::leaf_coord(0)]]).unwrap());
        }
        family.extend(next.iter().cloned());
        layer = next;
    }
    family
}

#[test]
fn c04_norm_and_order_comparisons_agree_with_direct_computation() {
    let orders = all_small_orders();
    let codes = code_family();
    let mut checked = 0usize;
    for code in &codes {
        let norm = spc_norm(code);
        for order in &orders {
            let ot = order.order_type() as u64;
            assert_eq!(
                norm_le_wo(code, order),
                norm <= ot,
                "norm {norm} vs order type {ot} (norm_le_wo)"
            );
            assert_eq!(
                wo_le_norm(order, code),
                ot <= norm,
                "order type {ot} vs norm {norm} (wo_le_norm)"
            );
            checked += 1;
        }
    }
    assert!(checked >= 10_000, "only {checked} pairs");
    println!(
        "PASS c04 comparison fixpoints: {} codes x {} orders = {checked} pairs, exact agreement",
        codes.len(),
        orders.len()
    );
}

fn grow_tree(rng: &mut ChaCha8Rng, base: &mut Vec<FinSeq>, steps: usize) {
    for _ in 0..steps {
        let parent = base[rng.gen_range(0..base.len())].clone();
        if parent.len() >= 4 {
            continue;
        }
        let mut child = parent;
        child.push(rng.gen_range(0..4));
        if !base.contains(&child) {
            base.push(child);
        }
    }
}

#[test]
fn c05_tree_inclusion_embeds_the_order_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..500 {
        let mut small: Vec<FinSeq> = vec![Vec::new()];
        let small_steps = rng.gen_range(0..=8);
        grow_tree(&mut rng, &mut small, small_steps);
        let mut large = small.clone();
        let extra_steps = rng.gen_range(1..=6);
        grow_tree(&mut rng, &mut large, extra_steps);
        let a = lo_code_of_tree(&small).unwrap();
        let b = lo_code_of_tree(&large).unwrap();
        assert!(lo_embedding_check(&a, &b), "case {case}: relation not preserved");
        let elems = a.sorted_elements();
        for x in &elems {
            for y in &elems {
                if a.lt(x, y) {
                    assert!(b.lt(x, y), "case {case}: {x} < {y} lost in the larger code");
                }
            }
        }
    }
    println!("PASS c05 order-code embedding: 500 nested tree pairs, relation preserved");
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rat> {
    (0..dim).map(|_| rat(rng.gen_range(-8..=8), rng.gen_range(1..=4))).collect()
}

#[test]
fn c06_exact_lp_agrees_with_both_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut members = 0usize;
    for _ in 0..300 {
        let dim = rng.gen_range(1..=2);
        let verts: Vec<Vec<Rat>> =
            (0..rng.gen_range(1..=5)).map(|_| random_point(&mut rng, dim)).collect();
        let p = Polytope::new(verts).unwrap();
        let x = random_point(&mut rng, dim);
        let direct = hull_distance_inf(&x, &p).unwrap();
        let oracle = fourier_motzkin_distance(&x, &p).unwrap();
        assert_eq!(direct, oracle, "distance mismatch at {x:?} vs {p:?}");
    }
    for _ in 0..300 {
        let dim = rng.gen_range(1..=3);
        let verts: Vec<Vec<Rat>> =
            (0..rng.gen_range(1..=8)).map(|_| random_point(&mut rng, dim)).collect();
        let p = Polytope::new(verts).unwrap();
        let x = if rng.gen_bool(0.5) {
            random_point(&mut rng, dim)
        } else {
            // Midpoint of two vertices, guaranteed inside.
            let vs = p.vertices();
            let a = &vs[rng.gen_range(0..vs.len())];
            let b = &vs[rng.gen_range(0..vs.len())];
            a.iter().zip(b).map(|(u, v)| (u + v) / rat_int(2)).collect()
        };
        let direct = hull_membership(&x, &p);
        let oracle = caratheodory_membership(&x, &p).unwrap();
        assert_eq!(direct, oracle, "membership mismatch at {x:?} vs {p:?}");
        members += direct as usize;
    }
    println!(
        "PASS c06 exact geometry: 300 distance + 300 membership instances ({members} members), exact agreement"
    );
}

#[test]
fn c07_built_schemes_pass_their_validator_and_structure_checks() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut built = 0usize;
    let mut attempts = 0usize;
    while built < 50 {
        attempts += 1;
        assert!(attempts < 5_000, "generator failed to build 50 schemes");
        let tree = random_tree(&mut rng, Side::Baire, 3, false);
        let dims = rng.gen_range(1..=2);
        let mut depth = rng.gen_range(1..=4);
        if tree.alphabet_bound() == 3 {
            depth = depth.min(3);
        }
        let scheme = match build_good_scheme(&tree, dims, depth, 2) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let check = validate_good(&scheme);
        assert!(check.ok(), "clauses broken on attempt {attempts}: {check:?}");
        let claims = check_good_claims(&tree, dims, depth, 2).unwrap();
        assert!(claims.ok(), "structure claims broken on attempt {attempts}: {claims:?}");
        built += 1;
    }
    let elapsed = start.elapsed();
    println!(
        "PASS c07 scheme construction: {built} schemes validated with all claims, {elapsed:?}"
    );
}

fn boxset(dim: usize, lo: Vec<Rat>, hi: Vec<Rat>) -> BoxSet {
    BoxSet::from_boxes(dim, vec![RatBox::new(lo, hi).unwrap()]).unwrap()
}

fn constant_scheme(dim: usize, depth: usize, lo: Vec<Rat>, hi: Vec<Rat>) -> SouslinScheme {
    let mut entries = BTreeMap::new();
    for n in 0..=depth {
        entries.insert(vec![0u64; n], boxset(dim, lo.clone(), hi.clone()));
    }
    SouslinScheme::new(dim, depth, 1, SchemeKind::Good, entries).unwrap()
}

fn nested_scheme(dim: usize, depth: usize, lo: Vec<Rat>, hi: Vec<Rat>) -> SouslinScheme {
    let mut entries = BTreeMap::new();
    for n in 0..=depth {
        let pad = sepkit_core::geom::pow2(-(n as i64));
        let level_lo: Vec<Rat> = lo.iter().map(|a| a - &pad).collect();
        let level_hi: Vec<Rat> = hi.iter().map(|b| b + &pad).collect();
        entries.insert(vec![0u64; n], boxset(dim, level_lo, level_hi));
    }
    SouslinScheme::new(dim, depth, 1, SchemeKind::Good, entries).unwrap()
}

fn wide_scheme(depth: usize, lo: Vec<Rat>, hi: Vec<Rat>) -> SouslinScheme {
    let mut entries = BTreeMap::new();
    let mut level: Vec<FinSeq> = vec![Vec::new()];
    for _ in 0..=depth {
        for u in &level {
            entries.insert(u.clone(), boxset(lo.len(), lo.clone(), hi.clone()));
        }
        level = level
            .iter()
            .flat_map(|u| {
                (0..2u64).map(move |l| {
                    let mut v = u.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    SouslinScheme::new(lo.len(), depth, 2, SchemeKind::Good, entries).unwrap()
}

/// Single-path presentation: the word's letters, then a constant-zero loop.
fn path_b_tree(word: &[u64], bound: u64) -> GraphTree {
    let mut states: Vec<String> = (0..=word.len()).map(|i| format!("s{i}")).collect();
    states.push("loop".into());
    let mut edges: Vec<(String, u64, u64, String)> = Vec::new();
    for (i, &l) in word.iter().enumerate() {
        edges.push((format!("s{i}"), l, 0, format!("s{}", i + 1)));
    }
    edges.push((format!("s{}", word.len()), 0, 0, "loop".into()));
    edges.push(("loop".into(), 0, 0, "loop".into()));
    GraphTree::new(states, "s0", bound, Side::Baire, &edges).unwrap()
}

/// Several single-letter branches from the root, each into its own loop.
fn fan_b_tree(first_letters: &[u64], bound: u64) -> GraphTree {
    let mut states = vec!["r".to_string()];
    let mut edges: Vec<(String, u64, u64, String)> = Vec::new();
    for (i, &l) in first_letters.iter().enumerate() {
        let s = format!("b{i}");
        states.push(s.clone());
        edges.push(("r".into(), l, 0, s.clone()));
        edges.push((s.clone(), 0, 0, s));
    }
    GraphTree::new(states, "r", bound, Side::Baire, &edges).unwrap()
}

/// The base-cell subtree at a first letter: all addresses through it.
fn segment_b_tree(first_letter: u64, bound: u64) -> GraphTree {
    GraphTree::new(
        vec!["r".into(), "a".into()],
        "r",
        bound,
        Side::Baire,
        &[
            ("r".into(), first_letter, 0, "a".into()),
            ("a".into(), 0, 0, "a".into()),
            ("a".into(), 1, 0, "a".into()),
        ],
    )
    .unwrap()
}

fn address(prefix: &[u64], period: &[u64]) -> UpPoint {
    UpPoint::new(prefix, period).unwrap()
}

#[test]
fn c08_preiss_battery_separates_every_instance() {
    let start = Instant::now();
    let r = rat_int;
    let pair = |a: u64, b: u64| pair_tuple(&[a, b]);
    // (name, convex scheme, avoided set, cube bound, avoided addresses)
    let mut instances: Vec<(&str, SouslinScheme, GraphTree, u64, Vec<UpPoint>)> = vec![
        (
            "1d point 0 vs point 2",
            constant_scheme(1, 4, vec![r(0)], vec![r(0)]),
            path_b_tree(&[4], 5),
            2,
            vec![address(&[4], &[0])],
        ),
        (
            "1d point 1/2 vs point 2",
            constant_scheme(1, 4, vec![rat(1, 2)], vec![rat(1, 2)]),
            path_b_tree(&[4], 5),
            2,
            vec![address(&[4], &[0])],
        ),
        (
            "1d segment vs point 2",
            constant_scheme(1, 4, vec![r(0)], vec![r(1)]),
            path_b_tree(&[4], 5),
            2,
            vec![address(&[4], &[0])],
        ),
        (
            "1d off-center segment vs point 2",
            constant_scheme(1, 4, vec![r(-1)], vec![rat(1, 2)]),
            path_b_tree(&[4], 5),
            2,
            vec![address(&[4], &[0])],
        ),
        (
            "1d nested boxes vs point 2",
            nested_scheme(1, 4, vec![r(0)], vec![r(1)]),
            path_b_tree(&[4], 5),
            2,
            vec![address(&[4], &[0])],
        ),
        (
            "1d nested point vs point 2",
            nested_scheme(1, 4, vec![rat(1, 4)], vec![rat(1, 4)]),
            path_b_tree(&[4], 5),
            2,
            vec![address(&[4], &[0])],
        ),
        (
            "1d branching segment vs point 2",
            wide_scheme(4, vec![r(0)], vec![r(1)]),
            path_b_tree(&[4], 5),
            2,
            vec![address(&[4], &[0])],
        ),
        (
            "1d point 0 vs point -2",
            constant_scheme(1, 4, vec![r(0)], vec![r(0)]),
            path_b_tree(&[3], 5),
            2,
            vec![address(&[3], &[0])],
        ),
        (
            "1d segment vs point -2",
            constant_scheme(1, 4, vec![r(0)], vec![r(1)]),
            path_b_tree(&[3], 5),
            2,
            vec![address(&[3], &[0])],
        ),
        (
            "1d nested boxes vs point -2",
            nested_scheme(1, 4, vec![r(0)], vec![r(1)]),
            path_b_tree(&[3], 5),
            2,
            vec![address(&[3], &[0])],
        ),
        (
            "1d segment vs point 5/2",
            constant_scheme(1, 4, vec![r(0)], vec![r(1)]),
            path_b_tree(&[4, 1], 5),
            2,
            vec![address(&[4, 1], &[0])],
        ),
        (
            "1d segment vs two points",
            constant_scheme(1, 4, vec![r(0)], vec![r(1)]),
            fan_b_tree(&[3, 4], 5),
            2,
            vec![address(&[3], &[0]), address(&[4], &[0])],
        ),
        (
            "1d point 0 vs two points",
            constant_scheme(1, 4, vec![r(0)], vec![r(0)]),
            fan_b_tree(&[3, 4], 5),
            2,
            vec![address(&[3], &[0]), address(&[4], &[0])],
        ),
        (
            "1d segment vs base segment",
            constant_scheme(1, 4, vec![r(0)], vec![r(1)]),
            segment_b_tree(4, 5),
            2,
            vec![
                address(&[4], &[0]),
                address(&[4], &[1]),
                address(&[4, 1], &[0]),
                address(&[4, 1, 1], &[0]),
            ],
        ),
        (
            "1d point 0 vs base segment",
            constant_scheme(1, 4, vec![r(0)], vec![r(0)]),
            segment_b_tree(4, 5),
            2,
            vec![address(&[4], &[0]), address(&[4], &[1])],
        ),
    ];
    let p22 = pair(4, 4);
    let pm22 = pair(3, 4);
    let zz = pair(0, 0);
    let bound2 = p22.max(pm22) + 1;
    let two_d: Vec<(&str, SouslinScheme, GraphTree, u64, Vec<UpPoint>)> = vec![
        (
            "2d square vs point (2,2)",
            constant_scheme(2, 4, vec![r(0), r(0)], vec![r(1), r(1)]),
            path_b_tree(&[p22], bound2),
            2,
            vec![address(&[p22], &[zz])],
        ),
        (
            "2d square vs point (-2,2)",
            constant_scheme(2, 4, vec![r(0), r(0)], vec![r(1), r(1)]),
            path_b_tree(&[pm22], bound2),
            2,
            vec![address(&[pm22], &[zz])],
        ),
        (
            "2d point vs point (2,2)",
            constant_scheme(2, 4, vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]),
            path_b_tree(&[p22], bound2),
            2,
            vec![address(&[p22], &[zz])],
        ),
        (
            "2d point vs point (-2,2)",
            constant_scheme(2, 4, vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]),
            path_b_tree(&[pm22], bound2),
            2,
            vec![address(&[pm22], &[zz])],
        ),
        (
            "2d nested square vs point (2,2)",
            nested_scheme(2, 4, vec![r(0), r(0)], vec![r(1), r(1)]),
            path_b_tree(&[p22], bound2),
            2,
            vec![address(&[p22], &[zz])],
        ),
        (
            "2d nested square vs point (-2,2)",
            nested_scheme(2, 4, vec![r(0), r(0)], vec![r(1), r(1)]),
            path_b_tree(&[pm22], bound2),
            2,
            vec![address(&[pm22], &[zz])],
        ),
        (
            "2d flat segment vs point (2,2)",
            constant_scheme(2, 4, vec![r(0), rat(1, 2)], vec![r(1), rat(1, 2)]),
            path_b_tree(&[p22], bound2),
            2,
            vec![address(&[p22], &[zz])],
        ),
        (
            "2d flat segment vs point (-2,2)",
            constant_scheme(2, 4, vec![r(0), rat(1, 2)], vec![r(1), rat(1, 2)]),
            path_b_tree(&[pm22], bound2),
            2,
            vec![address(&[pm22], &[zz])],
        ),
    ];
    instances.extend(two_d);
    assert!(instances.len() >= 20, "battery too small: {}", instances.len());
    let mut fires = 0usize;
    for (name, scheme, avoided, cubes, addresses) in &instances {
        assert!(validate_good(scheme).ok(), "{name}: scheme invalid");
        // An error here would include the runtime gap assertion tripping.
        let run = preiss_separate(scheme, avoided, *cubes, 10_000)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(run.code().is_some(), "{name}: fuel exhausted");
        let code_check = validate_cgc(run.code().unwrap()).unwrap();
        assert!(code_check.ok(), "{name}: emitted code fails validation: {code_check:?}");
        let grid = sample_grid(scheme.dimension(), run.guarantee_radius(), 4);
        let check = verify_preiss(scheme, &run, &grid, addresses).unwrap();
        assert!(check.ok(), "{name}: verification violations: {check:?}");
        assert!(check.a_checked > 0, "{name}: no grid point was applicable");
        assert_eq!(check.b_checked, addresses.len());
        fires += run.fires.len();
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "battery took {elapsed:?}");
    println!(
        "PASS c08 preiss battery: {} instances separated and verified ({fires} fires), {elapsed:?}",
        instances.len()
    );
}

#[test]
fn c09_borel_image_evaluates_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut points = 0usize;
    for i in 0..1000 {
        let code = random_spc(&mut rng, 3);
        let borel = spc_to_borel(&code);
        let support: Vec<u64> = spc_support(&code).into_iter().collect();
        let window = support.iter().max().map_or(0, |&m| m as usize + 1);
        for mask in 0..1u64 << support.len() {
            let mut word = vec![0u64; window];
            for (j, &coord) in support.iter().enumerate() {
                word[coord as usize] = mask >> j & 1;
            }
            let x = UpPoint::from_word_tail(&word, 0);
            assert_eq!(
                eval_spc(&code, &x),
                eval_borel(&borel, &x),
                "evaluations split on code {i} at {x}"
            );
            points += 1;
        }
    }
    println!("PASS c09 borel image: 1000 codes, {points} support points, identical evaluation");
}

fn dyck_report_bytes() -> String {
    let t = GraphTree::new(
        vec!["r".into(), "live".into()],
        "r",
        1,
        Side::Cantor,
        &[
            ("r".into(), 1, 0, "live".into()),
            ("live".into(), 0, 0, "live".into()),
            ("live".into(), 1, 0, "live".into()),
        ],
    )
    .unwrap();
    let s = GraphTree::new(
        vec!["r".into(), "live".into()],
        "r",
        1,
        Side::Cantor,
        &[
            ("r".into(), 0, 0, "live".into()),
            ("live".into(), 0, 0, "live".into()),
            ("live".into(), 1, 0, "live".into()),
        ],
    )
    .unwrap();
    let outcome = dyck_separate(&t, &s).unwrap();
    let code = match &outcome {
        DyckOutcome::Separator(code) => code.clone(),
        DyckOutcome::Witness(_) => unreachable!(),
    };
    let check = verify_dyck(&t, &s, &code, 4).unwrap();
    let inputs = vec![
        digest_input("t", &serde_json::to_vec(&t.to_json()).unwrap()),
        digest_input("s", &serde_json::to_vec(&s.to_json()).unwrap()),
    ];
    let report = dyck_report(
        inputs,
        DyckConfig { verify_depth: 4, max_states: 64 },
        &outcome,
        Some(&check),
    );
    to_canonical_json(&report)
}

fn preiss_report_bytes() -> String {
    let scheme = constant_scheme(1, 4, vec![rat_int(0)], vec![rat_int(1)]);
    let avoided = path_b_tree(&[4], 5);
    let run = preiss_separate(&scheme, &avoided, 2, 200).unwrap();
    let code_check = validate_cgc(run.code().unwrap()).unwrap();
    let grid = sample_grid(1, run.guarantee_radius(), 4);
    let check = verify_preiss(&scheme, &run, &grid, &[address(&[4], &[0])]).unwrap();
    let inputs = vec![
        digest_input("a", &serde_json::to_vec(&scheme).unwrap()),
        digest_input("b", &serde_json::to_vec(&avoided.to_json()).unwrap()),
    ];
    let report = preiss_report(
        inputs,
        PreissConfig { cubes: 2, fuel: 200, grid_step_denominator: 4 },
        &run,
        Some(code_check),
        Some(check),
    );
    to_canonical_json(&report)
}

#[test]
fn c10_reports_are_reproducible() {
    let d1 = dyck_report_bytes();
    let d2 = dyck_report_bytes();
    assert_eq!(d1, d2, "two runs rendered different first-kind reports");
    let p1 = preiss_report_bytes();
    let p2 = preiss_report_bytes();
    assert_eq!(p1, p2, "two runs rendered different second-kind reports");
    println!(
        "PASS c10 reproducibility: repeated runs byte-identical ({} + {} bytes)",
        d1.len(),
        p1.len()
    );
}
