//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! The process fails if a criterion fails unless it is listed in
//! `KNOWN_FAILURES`; a listed criterion that starts passing also fails the run,
//! so the list cannot go stale.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsg_atoms::contract::{representative_words, signature, signature_diameter_bound, triple_radius, Budgets};
use rsg_atoms::{
    address_system, certify_full_contracting_rsg, mapping_triple, morphism_check, nucleus_extract, type_graph, AtomTree, Ball,
    ConeModel, GroupOracle, Infinite, Verdict,
};
use rsg_core::graph::irreducible_core;
use rsg_core::rsg::{agree_near, image_point, lambda_map, FullRsg, RsgElement, RsgEntry};
use rsg_core::thompson::match_code_lists;
use rsg_core::transducer::{compose, image, invert, maps_equal, verify_nucleus_of_injections, State, Transition};
use rsg_core::{catalog, map_cones_v, ClassesGroup, ClopenSet, DirectedGraph, Error, Path, RationalMap, RationalPoint, VElement};

/// Criteria expected to fail, with the reason recorded next to the number.
/// 8: the binary nucleus has to contain k = f|_1 to be closed under
/// restriction, and k is its own cycle (trivial classes group), so the
/// Hilbert basis is {{1},{f},{k}} rather than {{1},{f}}.
const KNOWN_FAILURES: &[u32] = &[8];

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Check = fn() -> Outcome;

fn p(g: &DirectedGraph, s: &str) -> Path {
    Path::parse(g, s).unwrap()
}

// ---------------------------------------------------------------- 1

fn classes_groups() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=6usize {
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let edges: Vec<(&str, &str, &str)> = names.iter().map(|e| (e.as_str(), "v", "v")).collect();
        let g = DirectedGraph::new(&["v"], &edges).unwrap();
        let cg = ClassesGroup::of_core(&g, &[0]).unwrap();
        let inv: Vec<String> = cg.invariants().iter().map(|d| d.to_string()).collect();
        if inv != vec![(n - 1).to_string()] || cg.rank() != 0 {
            bad.push(format!("{n} loops gave {inv:?}"));
        }
    }
    let g = DirectedGraph::new(
        &["v", "w"],
        &[("a1", "v", "v"), ("a2", "v", "v"), ("x", "v", "w"), ("b1", "w", "w"), ("b2", "w", "w"), ("y", "w", "v")],
    )
    .unwrap();
    let cg = ClassesGroup::of_core(&g, &[0, 1]).unwrap();
    let inv: Vec<String> = cg.invariants().iter().map(|d| d.to_string()).collect();
    if inv != ["1", "0"] || cg.describe() != "Z" {
        bad.push(format!("two-node graph gave {inv:?}"));
    }
    outcome(bad.is_empty(), if bad.is_empty() { "Z/(n-1) for n = 2..6; two-node graph diag(1,0) = Z".into() } else { bad.join("; ") })
}

// ---------------------------------------------------------------- 2

fn z2_atoms() -> Outcome {
    let o = GroupOracle::zn(2);
    let t = AtomTree::build(&o, 6, 6).unwrap();
    let mut counts = Vec::new();
    let mut ok = true;
    for n in 1..=5 {
        let inf = t.infinite_at(n);
        let three = inf.iter().filter(|&&a| t.atoms[a].children.len() == 3).count();
        ok &= inf.len() == 8 * n && three == 4 && inf.iter().all(|&a| t.atoms[a].infinite == Infinite::Certified);
        counts.push(format!("{}/{three}", inf.len()));
    }
    // Level-6 quadrant atoms need a pool of radius 14 to show two witnesses.
    let tg = type_graph(&o, 6, 2, 8).unwrap();
    ok &= tg.type_count() == 9 && tg.stabilized && tg.consistent;
    outcome(
        ok,
        format!(
            "infinite/three-children per level {}; {} types, new per level {:?}",
            counts.join(" "),
            tg.type_count(),
            tg.new_types_per_level
        ),
    )
}

// ---------------------------------------------------------------- 3

fn free_group() -> Outcome {
    let o = GroupOracle::free(2);
    let t = AtomTree::build(&o, 6, 3).unwrap();
    let mut ok = true;
    for n in 1..=6 {
        ok &= t.levels[n].len() == 4 * 3usize.pow(n as u32 - 1);
        // Exact set equality: every pool element of length ≥ n lies in the
        // atom rooted at its length-n prefix, and nowhere else.
        for x in (n..=t.pool.radius).flat_map(|j| t.pool.sphere(j)) {
            let w = &t.pool.elems[x][..n];
            let a = t.atom_of(n, x);
            ok &= a.is_some() && t.least_witness(a.unwrap()).as_slice() == w;
        }
        for &a in &t.levels[n] {
            let w = t.least_witness(a).clone();
            let size: usize = (0..=t.pool.radius - n).map(|j| 3usize.pow(j as u32)).sum();
            ok &= t.atoms[a].witnesses.len() == size && t.atoms[a].witnesses.iter().all(|&x| o.in_cone(&w, &t.pool.elems[x as usize]));
        }
    }
    let partition = ok;
    let tg = type_graph(&o, 4, 1, 3).unwrap();
    let core = tg.core().unwrap().map_or(0, |c| c.nodes.len());
    ok &= tg.type_count() == 5 && core == 4 && tg.certified;
    let addr = address_system(tg).unwrap();
    let all: Vec<_> = (0..=4).flat_map(|l| addr.addresses_at(l)).collect();
    let (mut checked, mut certified) = (0, 0);
    for a in &all {
        for b in &all {
            if addr.terminus(a) == addr.terminus(b) {
                let g = addr.canonical_morphism(a, b).unwrap();
                checked += 1;
                certified += (morphism_check(addr.tree(), &g, addr.atom_of[a], addr.atom_of[b], 1).verdict == Verdict::Certified) as usize;
            }
        }
    }
    ok &= checked == certified;
    outcome(
        ok,
        format!(
            "atoms = cones to level 6: {partition}; {} types, core of {core}; {certified}/{checked} canonical morphisms certified",
            addr.types.type_count()
        ),
    )
}

// ---------------------------------------------------------------- 4

fn nucleus_examples() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, (g, n)) in [("ternary {1,f}", catalog::ternary_nucleus()), ("binary {1,f,k}", catalog::binary_nucleus())] {
        let core = irreducible_core(&g).unwrap().unwrap();
        let cert = verify_nucleus_of_injections(&g, &n, &core, 200).unwrap();
        ok &= cert.all_pass();
        notes.push(format!("{name} axioms {}", if cert.all_pass() { "pass" } else { "fail" }));
    }
    for (name, (g, f), want) in [("ternary", catalog::ternary_f(), vec!["0", "1"]), ("binary", catalog::binary_f(), vec!["0", "10"])] {
        let ff = compose(&g, &f, &f, 100).unwrap();
        let (pre, rest) = ff.local_action(&g, &Path::null()).unwrap();
        let id = RationalMap::identity(&g, &ClopenSet::whole());
        let prefix_map = pre == p(&g, "0") && maps_equal(&g, &rest, &id).unwrap();
        let want: Vec<Path> = want.iter().map(|s| p(&g, s)).collect();
        let img = image(&g, &f, 100).unwrap() == ClopenSet::from_paths(&g, &want);
        ok &= prefix_map && img;
        notes.push(format!("{name} f∘f = 0-prefix {prefix_map}, image {img}"));
    }
    let (g, with_id) = catalog::wreath_with_identity();
    let core = irreducible_core(&g).unwrap().unwrap();
    let cert = verify_nucleus_of_injections(&g, &with_id, &core, 200).unwrap();
    let gm = RationalMap::from_state(&g, with_id.states.clone(), 0);
    let hm = RationalMap::from_state(&g, with_id.states.clone(), 1);
    let gh = compose(&g, &gm, &hm, 50).unwrap();
    // gh restricts to itself at every cone, so {gh|_α} never enters the set.
    let self_similar = ["0", "1", "01", "110"].iter().all(|a| {
        let (_, r) = gh.local_action(&g, &p(&g, a)).unwrap();
        maps_equal(&g, &r, &gh).unwrap()
    });
    let (_, pair) = catalog::wreath_pair();
    let pair_cert = verify_nucleus_of_injections(&g, &pair, &core, 200).unwrap();
    let wreath = cert.failed() == ["ProdNuc"] && pair_cert.failed().contains(&"ProdNuc") && self_similar;
    ok &= wreath;
    notes.push(format!("wreath pair fails ProdNuc with gh|_α = gh: {wreath}"));
    outcome(ok, notes.join("; "))
}

// ---------------------------------------------------------------- 5

/// A random machine on the full shift with at most 4 states. Each state
/// writes 1 or 2 letters per edge and its outputs form a prefix code, so
/// every state is injective and no state collapses its cone to a point.
fn random_machine(g: &DirectedGraph, rng: &mut ChaCha8Rng) -> RationalMap {
    let k = g.edge_count();
    let n = rng.gen_range(1..=4);
    let states: Vec<State> = (0..n)
        .map(|i| {
            let outs: Vec<Vec<usize>> = loop {
                let outs: Vec<Vec<usize>> =
                    (0..k).map(|_| (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..k)).collect()).collect();
                let prefix_free =
                    (0..k).all(|a| (0..k).all(|b| a == b || !outs[b].starts_with(&outs[a])));
                if prefix_free {
                    break outs;
                }
            };
            State {
                name: format!("q{i}"),
                dom: 0,
                cod: Some(0),
                trans: outs
                    .into_iter()
                    .enumerate()
                    .map(|(e, out)| Transition { edge: e, out: Path::from_edges(g, &out).unwrap(), next: rng.gen_range(0..n) })
                    .collect(),
            }
        })
        .collect();
    RationalMap::from_state(g, Arc::new(states), 0)
}

fn random_path(g: &DirectedGraph, rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Path {
    let len = rng.gen_range(lo..=hi);
    if len == 0 {
        return Path::node(0);
    }
    let e: Vec<usize> = (0..len).map(|_| rng.gen_range(0..g.edge_count())).collect();
    Path::from_edges(g, &e).unwrap()
}

/// Output `a` followed by the relative output `b`.
fn join(g: &DirectedGraph, a: &Path, b: &Path) -> Path {
    if b.is_null() || b.is_node() {
        return a.clone();
    }
    if a.is_null() || a.is_node() {
        return b.clone();
    }
    a.concat(g, b).unwrap()
}

fn transducer_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let g = DirectedGraph::full_shift(2);
    let (mut twice, mut comp) = (0, 0);
    let mut bad = Vec::new();
    for i in 0..100 {
        let f = random_machine(&g, &mut rng);
        let h = random_machine(&g, &mut rng);
        let fh = compose(&g, &f, &h, 1000).unwrap();
        for _ in 0..4 {
            let a = random_path(&g, &mut rng, 0, 3);
            let b = random_path(&g, &mut rng, 1, 3);
            let ab = join(&g, &a, &b);
            // f|_{ab} = (f|_a)|_b
            let (oa, ra) = f.local_action(&g, &a).unwrap();
            let (ob, rab) = ra.local_action(&g, &b).unwrap();
            let (o, r) = f.local_action(&g, &ab).unwrap();
            if join(&g, &oa, &ob) == o && maps_equal(&g, &rab, &r).unwrap() {
                twice += 1;
            } else {
                bad.push(format!("restrict-twice, machine {i}"));
            }
            // (f∘h)|_a = f|_{h(a)} ∘ h|_a, with the output of f at h(a) in front.
            let (u, ha) = h.local_action(&g, &a).unwrap();
            let (v, fu) = f.local_action(&g, &u).unwrap();
            let inner = compose(&g, &fu, &ha, 1000).unwrap();
            let (w, rest) = inner.local_action(&g, &Path::null()).unwrap();
            let (o, r) = fh.local_action(&g, &a).unwrap();
            if join(&g, &v, &w) == o && maps_equal(&g, &rest, &r).unwrap() {
                comp += 1;
            } else {
                bad.push(format!("restrict-composition, machine {i}"));
            }
        }
    }
    let (g2, n) = catalog::binary_nucleus();
    let r = FullRsg::new(g2.clone(), n, ClopenSet::whole()).unwrap();
    let f = r.member_by_name("f").unwrap();
    let k = r.member_by_name("k").unwrap();
    let mut inv_ok = 0;
    for i in 0..50 {
        let q = if i % 2 == 0 { f } else { k };
        let (a, b) = (random_path(&g2, &mut rng, 1, 2), random_path(&g2, &mut rng, 1, 2));
        let el = match r.proof_element(q, &a, &b) {
            Ok(el) if !a.comparable(&b) => el,
            _ => r.proof_element(q, &p(&g2, "0"), &p(&g2, "1")).unwrap(),
        };
        let v = r.from_v(&random_v(&g2, &ClopenSet::whole(), 4, &mut rng)).unwrap();
        let hm = r.to_rational(&r.compose(&v, &el).unwrap());
        let back = invert(&g2, &invert(&g2, &hm, 1000).unwrap(), 1000).unwrap();
        if maps_equal(&g2, &back, &hm).unwrap() {
            inv_ok += 1;
        } else {
            bad.push(format!("invert twice, homeomorphism {i}"));
        }
    }
    bad.truncate(3);
    outcome(
        twice == 400 && comp == 400 && inv_ok == 50,
        format!("restrict-twice {twice}/400, restrict-composition {comp}/400, invert∘invert {inv_ok}/50{}", if bad.is_empty() { String::new() } else { format!("; {}", bad.join(", ")) }),
    )
}

// ---------------------------------------------------------------- 6

fn contracting_lemma() -> Outcome {
    let o = GroupOracle::free(2);
    let tg = type_graph(&o, 4, 2, 3).unwrap();
    let m = ConeModel::new(&address_system(tg).unwrap()).unwrap();
    let radius = triple_radius(0.0);
    let diam = signature_diameter_bound(0.0);
    let ball = Ball::new(&o, 2, 1000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut n_triples, mut worst, mut worst_diam, mut bad) = (0, 0, 0, 0);
    for g in &ball.elems {
        let n = 2 * g.len() + 14;
        // Prefix/suffix classes of length 2 with the least filler, plus random
        // reduced words; the triple only depends on the prefix against g and
        // on the last letters.
        let mut words = representative_words(&o, n, 2, 2);
        for _ in 0..100 {
            let mut w: Vec<u8> = vec![rng.gen_range(0..4)];
            while w.len() < n {
                let s = rng.gen_range(0..4u8);
                if s != o.inverse_gen(*w.last().unwrap()) {
                    w.push(s);
                }
            }
            words.push(w);
        }
        for w in &words {
            match mapping_triple(&m, g, w) {
                Ok(t) => {
                    let d = signature(&m, &t).diameter;
                    worst = worst.max(t.distance);
                    worst_diam = worst_diam.max(d);
                    if t.distance as f64 > radius || d as f64 > diam || (n as f64) <= t.threshold {
                        bad += 1;
                    }
                }
                Err(_) => bad += 1,
            }
            n_triples += 1;
        }
    }
    outcome(
        bad == 0,
        format!(
            "{n_triples} triples over {} elements of B_2; max distance {worst} ≤ {radius}, max signature diameter {worst_diam} ≤ {diam}",
            ball.len()
        ),
    )
}

// ---------------------------------------------------------------- 7

/// First certified run of the (Z/2)*Z pipeline.
const FREE_PRODUCT_NUCLEUS: usize = 3;

fn nucleus_extraction() -> Outcome {
    let cert = certify_full_contracting_rsg(&GroupOracle::free(2), Budgets::default()).unwrap();
    let n_states = cert.nucleus.as_ref().map_or(0, |n| n.members.as_ref().map_or(n.states.len(), |m| m.len()));
    let identities = cert.nucleus.as_ref().is_some_and(|n| {
        n.states.iter().all(|s| s.id.starts_with("1_"))
    });
    let free_ok = cert.full && n_states == cert.core.len() && identities;

    let o = GroupOracle::free_product(&["Z/2", "Z"]).unwrap();
    let b = Budgets::default();
    let tg = type_graph(&o, b.max_level, b.depth, b.horizon).unwrap();
    let m = ConeModel::new(&address_system(tg).unwrap()).unwrap();
    let gens: Vec<Vec<u8>> = (0..o.gen_count() as u8).map(|s| vec![s]).collect();
    let nuc = nucleus_extract(&m, &gens, b.state_budget).unwrap();
    let closed = nuc.growth.windows(2).last().is_some_and(|w| w[0] == w[1]);
    let core = irreducible_core(&nuc.graph).unwrap().unwrap();
    let axioms = verify_nucleus_of_injections(&nuc.graph, &nuc.set, &core, b.state_budget).unwrap();
    let fp_ok = closed && nuc.set.len() == FREE_PRODUCT_NUCLEUS && axioms.all_pass();
    outcome(
        free_ok && fp_ok,
        format!(
            "F2: full = {}, {n_states} identity states for {} core types; (Z/2)*Z: {} states (regression {FREE_PRODUCT_NUCLEUS}), growth {:?}, axioms {}",
            cert.full,
            cert.core.len(),
            nuc.set.len(),
            nuc.growth,
            if axioms.all_pass() { "pass" } else { "fail" }
        ),
    )
}

// ---------------------------------------------------------------- 8

fn basis_names(r: &FullRsg) -> Vec<Vec<String>> {
    let b = r.ker_del1_generators().unwrap();
    let mut v: Vec<Vec<String>> =
        b.generators.iter().map(|c| c.states.iter().map(|&q| r.state_name(q).to_string()).collect()).collect();
    v.sort();
    v
}

fn hilbert_bases() -> Outcome {
    let s = |v: &[&[&str]]| -> Vec<Vec<String>> { v.iter().map(|c| c.iter().map(|x| x.to_string()).collect()).collect() };
    let (g, n) = catalog::ternary_nucleus();
    let ternary = FullRsg::new(g, n, ClopenSet::whole()).unwrap();
    let (g, n) = catalog::binary_nucleus();
    let binary = FullRsg::new(g, n, ClopenSet::whole()).unwrap();
    let tb = basis_names(&ternary);
    let bb = basis_names(&binary);
    let ternary_ok = tb == s(&[&["1"], &["f", "f"]]);
    let binary_ok = bb == s(&[&["1"], &["f"]]);
    // Brute force: every cycle of total size ≤ 6 decomposes over the basis.
    let mut cycles = 0;
    let mut undecomposed = 0;
    for r in [&ternary, &binary] {
        let basis = r.ker_del1_generators().unwrap();
        let m = r.nucleus.members.clone();
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(c) = stack.pop() {
            if !c.is_empty() && r.is_cycle(&c).unwrap() {
                cycles += 1;
                undecomposed += basis.decompose(&c).is_none() as usize;
            }
            if c.len() < 6 {
                let last = c.last().copied().unwrap_or(0);
                for &q in m.iter().filter(|&&q| q >= last) {
                    let mut t = c.clone();
                    t.push(q);
                    stack.push(t);
                }
            }
        }
    }
    outcome(
        ternary_ok && binary_ok && undecomposed == 0,
        format!("ternary basis {tb:?}; binary basis {bb:?} (expected [[1], [f]]); {cycles} cycles ≤ 6, {undecomposed} undecomposed"),
    )
}

// ---------------------------------------------------------------- 9

fn random_code(g: &DirectedGraph, e: &ClopenSet, steps: usize, rng: &mut ChaCha8Rng) -> Vec<Path> {
    let mut code = e.code_at_length(g, 1);
    for _ in 0..steps {
        let k = rng.gen_range(0..code.len());
        let p = code.remove(k);
        code.extend(p.children(g));
    }
    code
}

fn random_v(g: &DirectedGraph, e: &ClopenSet, steps: usize, rng: &mut ChaCha8Rng) -> VElement {
    let a = random_code(g, e, steps, rng);
    let b = random_code(g, e, steps, rng);
    let pairs = match_code_lists(g, a, b, 16).unwrap();
    let mut by_t: BTreeMap<usize, Vec<(Path, Path)>> = BTreeMap::new();
    for p in pairs {
        by_t.entry(p.0.terminus(g).unwrap()).or_default().push(p);
    }
    let mut out = Vec::new();
    for (_, v) in by_t {
        let mut rs: Vec<Path> = v.iter().map(|p| p.1.clone()).collect();
        rs.shuffle(rng);
        out.extend(v.into_iter().map(|p| p.0).zip(rs));
    }
    VElement::new(g, out).unwrap()
}

fn random_point(g: &DirectedGraph, rng: &mut ChaCha8Rng) -> RationalPoint {
    let pre = random_path(g, rng, 0, 4);
    let pre = if pre.is_node() { Path::null() } else { pre };
    RationalPoint::new(g, pre, random_path(g, rng, 1, 3)).unwrap()
}

fn rsg_arithmetic() -> Outcome {
    let (g, n) = catalog::ternary_nucleus();
    let r = FullRsg::new(g.clone(), n, ClopenSet::whole()).unwrap();
    let f = r.member_by_name("f").unwrap();
    let one = r.member_by_name("1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let double_f = RsgElement::new(vec![
        RsgEntry { dom: p(&g, "0"), out: p(&g, "0"), state: f },
        RsgEntry { dom: p(&g, "1"), out: p(&g, "1"), state: f },
        RsgEntry { dom: p(&g, "20"), out: p(&g, "02"), state: one },
        RsgEntry { dom: p(&g, "21"), out: p(&g, "12"), state: one },
        RsgEntry { dom: p(&g, "22"), out: p(&g, "2"), state: one },
    ]);
    let gens = vec![
        double_f,
        r.proof_element(f, &p(&g, "2"), &p(&g, "01")).unwrap(),
        r.from_v(&random_v(&g, &ClopenSet::whole(), 4, &mut rng)).unwrap(),
    ];
    let inv: Vec<RsgElement> = gens.iter().map(|x| r.invert(x).unwrap()).collect();
    let (mut points, mut point_ok, mut axioms_ok) = (0, 0, 0);
    for _ in 0..200 {
        let word: Vec<(usize, bool)> = (0..rng.gen_range(1..=6)).map(|_| (rng.gen_range(0..3), rng.gen_bool(0.5))).collect();
        let mut prod = r.identity();
        for &(i, s) in &word {
            prod = r.compose(&prod, if s { &inv[i] } else { &gens[i] }).unwrap();
        }
        for _ in 0..2 {
            let w = random_point(&g, &mut rng);
            let mut x = w.clone();
            for &(i, s) in word.iter().rev() {
                x = image_point(&r, if s { &inv[i] } else { &gens[i] }, &x).unwrap();
            }
            let y = image_point(&r, &prod, &w).unwrap();
            points += 1;
            point_ok += (x.normalized(&g) == y.normalized(&g) && x.prefix_of_len(&g, 12) == y.prefix_of_len(&g, 12)) as usize;
        }
        // Inverses on both sides, identity laws, associativity with a generator.
        let pinv = r.invert(&prod).unwrap();
        let h = &gens[rng.gen_range(0..3)];
        let ok = r.is_identity(&r.compose(&prod, &pinv).unwrap()).unwrap()
            && r.is_identity(&r.compose(&pinv, &prod).unwrap()).unwrap()
            && r.equal(&r.compose(&r.identity(), &prod).unwrap(), &prod).unwrap()
            && r.equal(
                &r.compose(&r.compose(&prod, h).unwrap(), &pinv).unwrap(),
                &r.compose(&prod, &r.compose(h, &pinv).unwrap()).unwrap(),
            )
            .unwrap();
        axioms_ok += ok as usize;
    }
    outcome(
        point_ok == points && axioms_ok == 200,
        format!("{point_ok}/{points} points agree to depth 12; group axioms on {axioms_ok}/200 words"),
    )
}

// ---------------------------------------------------------------- 10

fn cone_maps() -> Outcome {
    let g = DirectedGraph::new(
        &["v", "w"],
        &[("a", "v", "v"), ("x", "v", "w"), ("b1", "w", "w"), ("b2", "w", "w"), ("b3", "w", "w")],
    )
    .unwrap();
    let e = ClopenSet::cone(&g, &Path::node(0));
    let obstructed = matches!(map_cones_v(&g, &e, &[(p(&g, "a"), p(&g, "a a"))], 12), Err(Error::ClassObstruction(_)));
    let s = DirectedGraph::full_shift(2);
    let h = map_cones_v(&s, &ClopenSet::whole(), &[(p(&s, "0"), p(&s, "00"))], 12).unwrap();
    let mut evaluated = 0;
    let mut ok = true;
    for x in ClopenSet::cone(&s, &p(&s, "0")).code_at_length(&s, 8) {
        ok &= h.apply(&s, &x) == Some(p(&s, "0").concat(&s, &x).unwrap());
        evaluated += 1;
    }
    ok &= h.compose(&s, &h.invert(&s)).unwrap().is_identity();
    outcome(obstructed && ok, format!("class obstruction for a -> aa: {obstructed}; 0 -> 00 verified on {evaluated} paths: {ok}"))
}

// ---------------------------------------------------------------- 11

/// A random element of V supported off the cone `keep`.
fn padding(g: &DirectedGraph, keep: &Path, rng: &mut ChaCha8Rng) -> VElement {
    let rest = ClopenSet::whole().difference(g, &ClopenSet::cone(g, keep));
    let mut pairs = random_v(g, &rest, rng.gen_range(0..4), rng).pairs().to_vec();
    pairs.push((keep.clone(), keep.clone()));
    VElement::new(g, pairs).unwrap()
}

fn germs() -> Outcome {
    let (g, n) = catalog::binary_nucleus();
    let r = FullRsg::new(g.clone(), n, ClopenSet::whole()).unwrap();
    let f = r.member_by_name("f").unwrap();
    let one = r.member_by_name("1").unwrap();
    let omega = RationalPoint::new(&g, p(&g, "0"), p(&g, "0")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let hf = RsgElement::new(vec![
        RsgEntry { dom: p(&g, "0"), out: p(&g, "0"), state: f },
        RsgEntry { dom: p(&g, "10"), out: p(&g, "011"), state: one },
        RsgEntry { dom: p(&g, "11"), out: p(&g, "1"), state: one },
    ]);
    // f on 𝔠0 has image 𝔠00 ∪ 𝔠010; the rest of the shift fills 𝔠011 ∪ 𝔠1.
    r.check_bijective(&hf).unwrap();
    let sim = r.from_v(&map_cones_v(&g, &ClopenSet::whole(), &[(p(&g, "0"), p(&g, "00"))], 16).unwrap()).unwrap();
    let sim_inv = r.invert(&sim).unwrap();
    let power = |k: i32, x: &RsgElement| -> RsgElement {
        let mut y = x.clone();
        for _ in 0..k.unsigned_abs() {
            y = r.compose(if k > 0 { &sim } else { &sim_inv }, &y).unwrap();
        }
        y
    };
    let keep = p(&g, "000");
    let mut samples = Vec::new();
    let mut invariant = 0;
    for _ in 0..50 {
        let (a, b, c) = (rng.gen_range(-3..=3), rng.gen_range(0..=2), rng.gen_range(-3..=3));
        let mut core = power(c, &r.identity());
        for _ in 0..b {
            core = r.compose(&hf, &core).unwrap();
        }
        let core = power(a, &core);
        let left = r.from_v(&padding(&g, &keep, &mut rng)).unwrap();
        let right = r.from_v(&padding(&g, &keep, &mut rng)).unwrap();
        let padded = r.compose(&left, &r.compose(&core, &right).unwrap()).unwrap();
        let lp = lambda_map(&r, &padded, &omega).unwrap();
        invariant += (lp == lambda_map(&r, &core, &omega).unwrap()) as usize;
        samples.push((lp, padded));
    }
    // Coset property: equal λ means agreement near ω after some sim^k.
    let mut coset = 0;
    let mut reference: BTreeMap<usize, RsgElement> = BTreeMap::new();
    for (l, h) in &samples {
        let base = reference.entry(*l).or_insert_with(|| h.clone()).clone();
        coset += (-12..=12).any(|k| agree_near(&r, &power(k, &base), h, &omega, 12)) as usize;
    }
    let values: Vec<&str> = reference.keys().map(|&q| r.state_name(q)).collect();
    outcome(
        invariant == 50 && coset == 50,
        format!("λ germ-invariant on {invariant}/50 padded samples; coset property on {coset}/50; λ values {values:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, Check); 11] = [
        (1, "classes groups", Duration::from_secs(1), classes_groups),
        (2, "Z^2 atoms and types", Duration::from_secs(60), z2_atoms),
        (3, "F2 atoms, types, canonical morphisms", Duration::from_secs(60), free_group),
        (4, "nucleus examples", Duration::from_secs(10), nucleus_examples),
        (5, "transducer laws", Duration::from_secs(60), transducer_laws),
        (6, "contracting lemma at δ = 0", Duration::from_secs(300), contracting_lemma),
        (7, "nucleus extraction", Duration::from_secs(600), nucleus_extraction),
        (8, "ker ∂1 Hilbert bases", Duration::from_secs(60), hilbert_bases),
        (9, "RSG arithmetic", Duration::from_secs(120), rsg_arithmetic),
        (10, "map_cones_v", Duration::from_secs(10), cone_maps),
        (11, "germ λ-map", Duration::from_secs(60), germs),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= limit;
        let timing = if took <= limit { String::new() } else { format!("; over the {limit:?} limit") };
        println!(
            "criterion {id:>2} {}: {name}: {}{timing} [{:.2}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
        if pass == KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected (known failures {KNOWN_FAILURES:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
