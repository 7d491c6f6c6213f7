use rsg_atoms::{address_system, morphism_check, type_graph, GroupOracle, Verdict};

#[test]
fn z2_has_nine_types() {
    let tg = type_graph(&GroupOracle::zn(2), 6, 2, 8).unwrap();
    println!("{:?}", tg.report());
    assert_eq!(tg.type_count(), 9);
    assert!(tg.stabilized && tg.consistent);
}

#[test]
fn free_group_type_graph() {
    let tg = type_graph(&GroupOracle::free(2), 4, 2, 3).unwrap();
    println!("{:?}", tg.report());
    assert_eq!(tg.type_count(), 5);
    assert!(tg.stabilized && tg.consistent && tg.certified);
    let core = tg.core().unwrap().expect("core");
    assert_eq!(core.nodes.len(), 4);
}

#[test]
fn z2_star_z_type_graph() {
    let o = GroupOracle::free_product(&["Z/2", "Z"]).unwrap();
    let tg = type_graph(&o, 5, 2, 3).unwrap();
    println!("{:?} {}", tg.report(), tg.to_dot());
    assert!(tg.stabilized && tg.consistent && tg.certified);
    assert!(tg.core().unwrap().is_some());
}

#[test]
fn free_canonical_morphisms_certified() {
    let tg = type_graph(&GroupOracle::free(2), 4, 1, 3).unwrap();
    let addr = address_system(tg).unwrap();
    let t = addr.tree();
    for lvl in 0..=4 {
        assert_eq!(addr.addresses_at(lvl).len(), t.infinite_at(lvl).len());
    }
    let all: Vec<_> = (0..=4).flat_map(|l| addr.addresses_at(l)).collect();
    let mut n = 0;
    for a in &all {
        for b in &all {
            if addr.terminus(a) != addr.terminus(b) {
                continue;
            }
            let g = addr.canonical_morphism(a, b).unwrap();
            let r = morphism_check(t, &g, addr.atom_of[a], addr.atom_of[b], 1);
            assert_eq!(r.verdict, Verdict::Certified, "{} -> {}", addr.show(a), addr.show(b));
            n += 1;
        }
    }
    assert!(n > 1000);
}

#[test]
fn morphism_examples() {
    let o = GroupOracle::zn(2);
    let t = rsg_atoms::AtomTree::build(&o, 4, 6).unwrap();
    let quad = t.atom_of_elem(1, &o.parse("xy").unwrap()).unwrap();
    let row = t.atom_of_elem(1, &o.parse("y").unwrap()).unwrap();
    assert_eq!(morphism_check(&t, &[], quad, quad, 2).verdict, Verdict::Certified);
    let r = morphism_check(&t, &o.parse("x").unwrap(), row, quad, 2);
    assert_eq!(r.verdict, Verdict::Refuted);
    let q2 = t.atom_of_elem(2, &o.parse("xxyy").unwrap()).unwrap();
    let r = morphism_check(&t, &o.parse("xy").unwrap(), quad, q2, 2);
    assert!(r.consistent() && r.divergence);

    let f = GroupOracle::free_product(&["Z/3", "Z"]).unwrap();
    let t = rsg_atoms::AtomTree::build(&f, 4, 2).unwrap();
    let w1 = f.parse("ab").unwrap();
    let w2 = f.parse("Abab").unwrap();
    let a1 = t.atom_of_elem(2, &w1).unwrap();
    let a2 = t.atom_of_elem(4, &w2).unwrap();
    let g = f.mul(&w2, &f.inv(&w1));
    assert_eq!(morphism_check(&t, &g, a1, a2, 2).verdict, Verdict::Certified);
}
