use rsg_core::catalog;
use rsg_core::graph::irreducible_core;
use rsg_core::transducer::{
    compose, image, invert, maps_equal, nucleus_of, states_equal, verify_nucleus_of_injections,
    RationalMap, Residual,
};
use rsg_core::{ClopenSet, Path};

#[test]
fn ternary_evaluation() {
    let (g, f) = catalog::ternary_f();
    let p = |s: &str| Path::parse(&g, s).unwrap();
    let (out, res) = f.evaluate(&g, &p("1"), 10).unwrap();
    assert_eq!(out, p("02"));
    let Residual::State(q) = res else { panic!("expected a state") };
    assert_eq!(f.state(q).name, "1");
    assert_eq!(f.apply(&g, &p("0001")).unwrap(), p("00002"));
    let (out, m) = f.local_action(&g, &p("0")).unwrap();
    assert_eq!(out, p("0"));
    assert!(maps_equal(&g, &m, &f).unwrap());
}

#[test]
fn ternary_square_is_prefix_map() {
    let (g, f) = catalog::ternary_f();
    let ff = compose(&g, &f, &f, 100).unwrap();
    for s in ["0", "1", "2", "0120", "2222"] {
        let a = Path::parse(&g, s).unwrap();
        let expect = Path::parse(&g, &format!("0{s}")).unwrap();
        assert_eq!(ff.apply(&g, &a).unwrap(), expect);
    }
    let (out, rest) = ff.local_action(&g, &Path::null()).unwrap();
    assert_eq!(out, Path::parse(&g, "0").unwrap());
    let id = RationalMap::identity(&g, &ClopenSet::whole());
    assert!(maps_equal(&g, &rest, &id).unwrap());
}

#[test]
fn images_match() {
    let (g, f) = catalog::ternary_f();
    let want = ClopenSet::from_paths(&g, &[Path::parse(&g, "0").unwrap(), Path::parse(&g, "1").unwrap()]);
    assert_eq!(image(&g, &f, 100).unwrap(), want);
    let (g, f) = catalog::binary_f();
    let want = ClopenSet::from_paths(&g, &[Path::parse(&g, "0").unwrap(), Path::parse(&g, "10").unwrap()]);
    assert_eq!(image(&g, &f, 100).unwrap(), want);
}

#[test]
fn ternary_inverse() {
    let (g, f) = catalog::ternary_f();
    let inv = invert(&g, &f, 100).unwrap();
    let p = |s: &str| Path::parse(&g, s).unwrap();
    let (o0, r0) = inv.local_action(&g, &p("0")).unwrap();
    assert_eq!(o0, Path::null().concat(&g, &Path::node(0)).unwrap());
    assert!(maps_equal(&g, &r0, &f).unwrap());
    let (o1, r1) = inv.local_action(&g, &p("1")).unwrap();
    assert_eq!(o1, p("2"));
    assert!(maps_equal(&g, &r1, &RationalMap::identity(&g, &ClopenSet::whole())).unwrap());
    let back = invert(&g, &inv, 100).unwrap();
    assert!(maps_equal(&g, &back, &f).unwrap());
}

#[test]
fn ternary_nucleus_and_axioms() {
    let (g, f) = catalog::ternary_f();
    let n = nucleus_of(&g, &f).unwrap();
    let mut names = n.member_names();
    names.sort();
    assert_eq!(names, vec!["1", "f"]);
    let core = irreducible_core(&g).unwrap().unwrap();
    let (_, set) = catalog::ternary_nucleus();
    let cert = verify_nucleus_of_injections(&g, &set, &core, 200).unwrap();
    assert!(cert.all_pass(), "{cert:?}");
    assert!(!states_equal(&set.states, 0, &set.states, 1));
}

#[test]
fn binary_nucleus_needs_restriction() {
    let (g, f) = catalog::binary_f();
    let core = irreducible_core(&g).unwrap().unwrap();
    let mut names = nucleus_of(&g, &f).unwrap().member_names();
    names.sort();
    assert_eq!(names, vec!["1", "f", "k"]);
    let (_, closed) = catalog::binary_nucleus();
    assert!(verify_nucleus_of_injections(&g, &closed, &core, 200).unwrap().all_pass());
    let (_, pair) = catalog::binary_pair();
    let cert = verify_nucleus_of_injections(&g, &pair, &core, 200).unwrap();
    assert_eq!(cert.failed(), vec!["LocNuc", "InvNuc", "ProdNuc"]);
}

#[test]
fn wreath_pair_fails_products() {
    let (g, set) = catalog::wreath_pair();
    let core = irreducible_core(&g).unwrap().unwrap();
    let cert = verify_nucleus_of_injections(&g, &set, &core, 200).unwrap();
    assert_eq!(cert.failed(), vec!["IdNuc", "ProdNuc"]);
    let (_, set) = catalog::wreath_with_identity();
    let cert = verify_nucleus_of_injections(&g, &set, &core, 200).unwrap();
    assert_eq!(cert.failed(), vec!["ProdNuc"]);
    // The product gh restricts to itself everywhere.
    let gm = RationalMap::from_state(&g, set.states.clone(), 0);
    let hm = RationalMap::from_state(&g, set.states.clone(), 1);
    let gh = compose(&g, &gm, &hm, 50).unwrap();
    for a in ["0", "1", "01", "110"] {
        let (_, r) = gh.local_action(&g, &Path::parse(&g, a).unwrap()).unwrap();
        assert!(maps_equal(&g, &r, &gh).unwrap());
    }
}
