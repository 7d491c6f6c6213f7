mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsg_core::catalog;
use rsg_core::rsg::{agree_near, image_point, lambda_map, FullRsg, RsgElement, RsgEntry};
use rsg_core::thompson::map_cones_v;
use rsg_core::transducer::{maps_equal, RationalMap, TransducerJson};
use rsg_core::{ClopenSet, DirectedGraph, Path, RationalPoint};

fn ternary() -> FullRsg {
    let (g, n) = catalog::ternary_nucleus();
    FullRsg::new(g, n, ClopenSet::whole()).unwrap()
}

fn binary() -> FullRsg {
    let (g, n) = catalog::binary_nucleus();
    FullRsg::new(g, n, ClopenSet::whole()).unwrap()
}

fn p(g: &DirectedGraph, s: &str) -> Path {
    Path::parse(g, s).unwrap()
}

/// f on 𝔠0 and on 𝔠1, prefix exchange on 𝔠2 onto the rest.
fn double_f(r: &FullRsg) -> RsgElement {
    let g = r.g();
    let f = r.member_by_name("f").unwrap();
    let one = r.member_by_name("1").unwrap();
    let el = RsgElement::new(vec![
        RsgEntry { dom: p(g, "0"), out: p(g, "0"), state: f },
        RsgEntry { dom: p(g, "1"), out: p(g, "1"), state: f },
        RsgEntry { dom: p(g, "20"), out: p(g, "02"), state: one },
        RsgEntry { dom: p(g, "21"), out: p(g, "12"), state: one },
        RsgEntry { dom: p(g, "22"), out: p(g, "2"), state: one },
    ]);
    r.check_bijective(&el).unwrap();
    el
}

fn names(r: &FullRsg, qs: &[usize]) -> Vec<String> {
    qs.iter().map(|&q| r.state_name(q).to_string()).collect()
}

#[test]
fn refuses_uncertified_nucleus() {
    let (g, n) = catalog::binary_pair();
    assert!(FullRsg::new(g, n, ClopenSet::whole()).is_err());
}

#[test]
fn del1_ternary() {
    let r = ternary();
    let f = r.member_by_name("f").unwrap();
    let one = r.member_by_name("1").unwrap();
    assert_eq!(r.classes.show(&r.del1(&[f]).unwrap()), "(1)");
    assert!(r.classes.is_zero(&r.del1(&[one]).unwrap()));
    assert!(r.classes.is_zero(&r.del1(&[f, f]).unwrap()));
}

#[test]
fn hilbert_basis_examples() {
    let r = ternary();
    let b = r.ker_del1_generators().unwrap();
    let got: Vec<Vec<String>> = b.generators.iter().map(|c| names(&r, &c.states)).collect();
    assert_eq!(got, vec![vec!["1".to_string()], vec!["f".into(), "f".into()]]);
    assert_eq!(b.max_degree, 2);

    let r = binary();
    let b = r.ker_del1_generators().unwrap();
    let mut got: Vec<Vec<String>> = b.generators.iter().map(|c| names(&r, &c.states)).collect();
    got.sort();
    assert_eq!(got, vec![vec!["1".to_string()], vec!["f".into()], vec!["k".into()]]);
}

#[test]
fn proof_element_membership() {
    let r = ternary();
    let g = r.g().clone();
    let f = r.member_by_name("f").unwrap();
    let el = r.proof_element(f, &p(&g, "0"), &p(&g, "1")).unwrap();
    assert!(r.local_is(&el, &p(&g, "0"), f).unwrap());
    assert_eq!(r.apply(&el, &p(&g, "00")).unwrap(), p(&g, "10"));
    let inv = r.invert(&el).unwrap();
    assert!(r.is_identity(&r.compose(&el, &inv).unwrap()).unwrap());
    // It swaps the cone with its image, so it is an involution.
    assert!(r.is_identity(&r.compose(&el, &el).unwrap()).unwrap());
}

#[test]
fn square_of_f_is_prefix_map() {
    let r = ternary();
    let g = r.g().clone();
    let h = double_f(&r);
    let h2 = r.compose(&h, &h).unwrap();
    let (out, q) = r.local_state(&h2, &p(&g, "00")).unwrap();
    assert_eq!(out, p(&g, "000"));
    assert!(r.is_identity_state(q));
    let hinv = r.invert(&h).unwrap();
    assert!(r.is_identity(&r.compose(&hinv, &h).unwrap()).unwrap());
}

#[test]
fn rejects_map_outside_nucleus() {
    let g = DirectedGraph::full_shift(3);
    let j: TransducerJson = serde_json::from_value(serde_json::json!({
        "domain": [{"null": true}],
        "initial": [{"cone": {"node": "v"}, "out": {"node": "v"}, "state": "a"}],
        "states": [
            {"id": "a", "node": "v", "trans": [
                {"edge": "0", "out": ["0"], "next": "b"},
                {"edge": "1", "out": ["1"], "next": "b"},
                {"edge": "2", "out": ["2"], "next": "b"}]},
            {"id": "b", "node": "v", "trans": [
                {"edge": "0", "out": ["1"], "next": "a"},
                {"edge": "1", "out": ["0"], "next": "a"},
                {"edge": "2", "out": ["2"], "next": "a"}]}
        ]
    }))
    .unwrap();
    let m = RationalMap::from_json(&g, &j).unwrap();
    let r = ternary();
    for depth in [0, 2, 5] {
        assert!(r.membership(&m, depth).unwrap().is_none());
    }
}

#[test]
fn membership_of_v_uses_identities() {
    let r = ternary();
    let g = r.g().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v = common::random_v(&g, &ClopenSet::whole(), 5, &mut rng);
    let el = r.from_v(&v).unwrap();
    assert!(el.entries.iter().all(|e| r.is_identity_state(e.state)));
    assert!(r.as_v(&el).unwrap().equal(&v));
}

fn random_point<R: Rng>(g: &DirectedGraph, rng: &mut R) -> RationalPoint {
    let k = g.edge_count();
    let pre: Vec<usize> = (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..k)).collect();
    let per: Vec<usize> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..k)).collect();
    let prefix = if pre.is_empty() { Path::null() } else { Path::from_edges(g, &pre).unwrap() };
    RationalPoint::new(g, prefix, Path::from_edges(g, &per).unwrap()).unwrap()
}

fn ternary_generators(r: &FullRsg) -> Vec<RsgElement> {
    let g = r.g().clone();
    let f = r.member_by_name("f").unwrap();
    vec![
        double_f(r),
        r.proof_element(f, &p(&g, "2"), &p(&g, "01")).unwrap(),
        r.from_v(&common::random_v(&g, &ClopenSet::whole(), 4, &mut ChaCha8Rng::seed_from_u64(3))).unwrap(),
    ]
}

#[test]
fn random_words_match_evaluation() {
    let r = ternary();
    let g = r.g().clone();
    let gens = ternary_generators(&r);
    let inv: Vec<RsgElement> = gens.iter().map(|x| r.invert(x).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..6 {
        let word: Vec<(usize, bool)> = (0..6).map(|_| (rng.gen_range(0..3), rng.gen_bool(0.5))).collect();
        let mut prod = r.identity();
        for &(i, s) in &word {
            prod = r.compose(&prod, if s { &inv[i] } else { &gens[i] }).unwrap();
        }
        for _ in 0..8 {
            let w = random_point(&g, &mut rng);
            let mut x = w.clone();
            for &(i, s) in word.iter().rev() {
                x = image_point(&r, if s { &inv[i] } else { &gens[i] }, &x).unwrap();
            }
            let y = image_point(&r, &prod, &w).unwrap();
            assert_eq!(x.normalized(&g), y.normalized(&g));
            assert_eq!(x.prefix_of_len(&g, 12), y.prefix_of_len(&g, 12));
        }
    }
}

#[test]
fn model_generators() {
    let r = ternary();
    let gens = r.generator_set().unwrap();
    let one = &gens.models[0];
    assert!(r.as_v(&one.element).is_some());
    let ff = &gens.models[1];
    assert_eq!(ff.domain_code.len(), 2);
    assert!(r.as_v(&ff.element).is_none());
    r.check_rectifier(&ff.element, &ff.rectifier, &ff.domain_code, &ff.cycle.states).unwrap();

    let r = binary();
    let gens = r.generator_set().unwrap();
    for m in &gens.models {
        assert_eq!(m.domain_code.len(), 1);
        r.check_rectifier(&m.element, &m.rectifier, &m.domain_code, &m.cycle.states).unwrap();
        // Supported on the domain code.
        let d = ClopenSet::from_paths(r.g(), &m.domain_code);
        for e in &m.element.entries {
            if !ClopenSet::cone(r.g(), &e.dom).is_subset(r.g(), &d) {
                assert_eq!(e.dom, e.out);
                assert!(r.is_identity_state(e.state));
            }
        }
    }
}

#[test]
fn normalish_forms_round_trip() {
    let r = binary();
    let g = r.g().clone();
    let gens = r.generator_set().unwrap();
    let f = r.member_by_name("f").unwrap();
    let k = r.member_by_name("k").unwrap();
    let a = r.proof_element(f, &p(&g, "0"), &p(&g, "1")).unwrap();
    let b = r.proof_element(k, &p(&g, "11"), &p(&g, "0")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = r.from_v(&common::random_v(&g, &ClopenSet::whole(), 4, &mut rng)).unwrap();
    let samples = vec![a.clone(), b.clone(), r.compose(&a, &b).unwrap(), r.compose(&v, &r.compose(&b, &a).unwrap()).unwrap(), v.clone()];
    for x in &samples {
        let w = r.normalish_form(&gens, x).unwrap();
        assert!(r.equal(&r.evaluate_form(&w).unwrap(), x).unwrap());
        assert!(r.recognize_normalish(x, &w).unwrap());
        let mut codes: Vec<Path> = Vec::new();
        for h in &w.factors {
            codes.extend(h.code.iter().cloned());
            r.check_rectifier(&h.element, &h.rectifier, &h.code, &h.states).unwrap();
        }
        assert!(rsg_core::clopen::Code::new(codes).is_ok());
        if let Some(h) = w.factors.first() {
            let mut bad = w.clone();
            let q = h.states[0];
            bad.factors[0].states[0] = *r.nucleus.members.iter().find(|&&m| m != q).unwrap();
            assert!(!r.recognize_normalish(x, &bad).unwrap());
        }
    }
    let wv = r.normalish_form(&gens, &v).unwrap();
    assert!(wv.factors.is_empty());
}

#[test]
fn model_generator_forms() {
    let r = ternary();
    let gens = r.generator_set().unwrap();
    let h = &gens.models[1].element;
    let w = r.normalish_form(&gens, h).unwrap();
    assert!(r.equal(&r.evaluate_form(&w).unwrap(), h).unwrap());
    assert!(r.recognize_normalish(h, &w).unwrap());
}

#[test]
fn lambda_examples() {
    let r = ternary();
    let g = r.g().clone();
    let one = r.member_by_name("1").unwrap();
    let f = r.member_by_name("f").unwrap();
    let w = RationalPoint::new(&g, p(&g, "1"), p(&g, "2")).unwrap();
    assert_eq!(lambda_map(&r, &r.identity(), &w).unwrap(), one);
    let sim = map_cones_v(&g, &ClopenSet::whole(), &[(p(&g, "1"), p(&g, "12"))], 16).unwrap();
    assert_eq!(lambda_map(&r, &r.from_v(&sim).unwrap(), &w).unwrap(), one);
    // Identity on 𝔠1, so the germ at ω is trivial.
    let far = r.proof_element(f, &p(&g, "0"), &p(&g, "2")).unwrap();
    assert_eq!(lambda_map(&r, &far, &w).unwrap(), one);

    let zero = RationalPoint::new(&g, p(&g, "0"), p(&g, "0")).unwrap();
    let h = double_f(&r);
    assert_eq!(lambda_map(&r, &h, &zero).unwrap(), f);

    let square = RationalPoint::new(&g, p(&g, "1"), p(&g, "22")).unwrap();
    assert!(lambda_map(&r, &r.identity(), &square).is_err());
    assert!(lambda_map(&r, &far, &RationalPoint::new(&g, p(&g, "0"), p(&g, "1")).unwrap()).is_err());
}

#[test]
fn lambda_coset_property() {
    let r = ternary();
    let g = r.g().clone();
    let zero = RationalPoint::new(&g, p(&g, "0"), p(&g, "0")).unwrap();
    let sim = r.from_v(&map_cones_v(&g, &ClopenSet::whole(), &[(p(&g, "0"), p(&g, "00"))], 16).unwrap()).unwrap();
    let sim_inv = r.invert(&sim).unwrap();
    let h = double_f(&r);
    let mut h2 = h.clone();
    for _ in 0..3 {
        h2 = r.compose(&sim, &h2).unwrap();
    }
    for _ in 0..2 {
        h2 = r.compose(&h2, &sim_inv).unwrap();
    }
    assert_eq!(lambda_map(&r, &h, &zero).unwrap(), lambda_map(&r, &h2, &zero).unwrap());
    let mut found = None;
    for k in -12i32..=12 {
        let mut x = h.clone();
        for _ in 0..k.unsigned_abs() {
            x = r.compose(if k > 0 { &sim } else { &sim_inv }, &x).unwrap();
        }
        if agree_near(&r, &x, &h2, &zero, 12) {
            found = Some(k);
            break;
        }
    }
    assert_eq!(found, Some(1));
}

#[test]
fn element_json_round_trip() {
    let r = binary();
    let g = r.g().clone();
    let f = r.member_by_name("f").unwrap();
    let a = r.proof_element(f, &p(&g, "0"), &p(&g, "1")).unwrap();
    let j = r.element_to_json(&a, "binary");
    let text = serde_json::to_string(&j).unwrap();
    let back = r.element_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn del1_is_additive(a in proptest::collection::vec(0usize..2, 0..6), b in proptest::collection::vec(0usize..2, 0..6)) {
        let r = ternary();
        let pick = |v: &[usize]| v.iter().map(|&i| r.nucleus.members[i]).collect::<Vec<_>>();
        let (pa, pb) = (pick(&a), pick(&b));
        let mut both = pa.clone();
        both.extend(&pb);
        let lhs = r.del1(&both).unwrap();
        let rhs = r.classes.add(&r.del1(&pa).unwrap(), &r.del1(&pb).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn restrict_twice(seed in 0u64..1000, a in "[012]{0,3}", b in "[012]{1,3}") {
        let r = ternary();
        let g = r.g().clone();
        let gens = ternary_generators(&r);
        let h = &gens[(seed % 3) as usize];
        let pa = if a.is_empty() { Path::node(0) } else { p(&g, &a) };
        let pb = p(&g, &b);
        let full = pa.concat(&g, &pb).unwrap();
        if let (Some((_, qa)), Some((_, qab))) = (r.local_state(h, &pa), r.local_state(h, &full)) {
            let stepped = pb.edges().iter().fold(qa, |q, &e| r.step(q, e));
            prop_assert_eq!(stepped, qab);
        }
        let (_, la) = r.to_rational(h).local_action(&g, &pa).unwrap();
        let (_, lab) = r.to_rational(h).local_action(&g, &full).unwrap();
        let (_, twice) = la.local_action(&g, &pb).unwrap();
        prop_assert!(maps_equal(&g, &twice, &lab).unwrap());
    }
}

#[test]
fn hilbert_basis_is_complete_to_size_six() {
    for r in [ternary(), binary()] {
        let b = r.ker_del1_generators().unwrap();
        let m = r.nucleus.members.clone();
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(s) = stack.pop() {
            if !s.is_empty() && r.is_cycle(&s).unwrap() {
                assert!(b.decompose(&s).is_some(), "cycle {:?} not decomposed", names(&r, &s));
            }
            if s.len() < 6 {
                let last = s.last().copied().unwrap_or(0);
                for &q in m.iter().filter(|&&q| q >= last) {
                    let mut t = s.clone();
                    t.push(q);
                    stack.push(t);
                }
            }
        }
    }
}

#[test]
fn membership_matches_machine() {
    let r = binary();
    let g = r.g().clone();
    let f = r.member_by_name("f").unwrap();
    let a = r.proof_element(f, &p(&g, "0"), &p(&g, "1")).unwrap();
    let b = r.invert(&a).unwrap();
    let m = rsg_core::transducer::compose(&g, &r.to_rational(&a), &r.to_rational(&b), 512).unwrap();
    let el = r.membership(&m, 12).unwrap().unwrap();
    assert!(maps_equal(&g, &r.to_rational(&el), &m).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..40 {
        let x: Vec<usize> = (0..12).map(|_| rng.gen_range(0..2)).collect();
        let x = Path::from_edges(&g, &x).unwrap();
        assert_eq!(r.apply(&el, &x).unwrap(), m.apply(&g, &x).unwrap());
    }
}
