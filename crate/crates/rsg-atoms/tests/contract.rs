use rsg_atoms::contract::{core_gate, representative_words, signature, Budgets};
use rsg_atoms::{
    address_system, boundary_local_action, certify_full_contracting_rsg, mapping_triple, norm_s, nucleus_extract, signature_equivalent,
    type_graph, ConeModel, GroupOracle,
};
use rsg_core::DirectedGraph;

fn model(o: &GroupOracle) -> ConeModel {
    let tg = type_graph(o, 4, 2, 3).unwrap();
    ConeModel::new(&address_system(tg).unwrap()).unwrap()
}

#[test]
fn norm_s_values() {
    assert_eq!(norm_s(&[3, 3, 3]).unwrap(), 0.0);
    assert_eq!(norm_s(&[0, 4]).unwrap(), 2.0);
    assert!(norm_s(&[]).is_err());
}

#[test]
fn triple_identity_and_generator() {
    let o = GroupOracle::free(2);
    let m = model(&o);
    let w = o.parse("abababababababab").unwrap();
    let t = mapping_triple(&m, &[], &w).unwrap();
    assert_eq!(t.v, w);
    let t = mapping_triple(&m, &o.parse("a").unwrap(), &w).unwrap();
    assert!(t.distance <= 6);
    assert_eq!(t.v, o.parse("aabababababababab").unwrap());
    assert!(mapping_triple(&m, &o.parse("a").unwrap(), &o.parse("abab").unwrap()).is_err());
}

#[test]
fn signatures() {
    let o = GroupOracle::free(2);
    let m = model(&o);
    let g = o.parse("a").unwrap();
    let t1 = mapping_triple(&m, &g, &o.parse("bbbbbbbbbbbbbbbb").unwrap()).unwrap();
    let t2 = mapping_triple(&m, &g, &o.parse("babababbabbbbbbb").unwrap()).unwrap();
    assert_eq!(signature_equivalent(&m, &t1, &t1), Some(vec![]));
    assert!(signature_equivalent(&m, &t1, &t2).is_some());
    let s = signature(&m, &t1);
    assert!(s.diameter <= 10);
    // a⁻¹ at a cone starting with a cancels; a does not.
    let w = o.parse("abbbbbbbbbbbbbbbb").unwrap();
    let ta = mapping_triple(&m, &o.parse("a").unwrap(), &w).unwrap();
    let tb = mapping_triple(&m, &o.parse("A").unwrap(), &w).unwrap();
    assert_eq!(ta.v.len(), w.len() + 1);
    assert_eq!(tb.v.len(), w.len() - 1);
}

#[test]
fn local_actions() {
    let o = GroupOracle::free(2);
    let m = model(&o);
    let alpha = m.address(&o.parse("bb").unwrap()).unwrap();
    let id = boundary_local_action(&m, &[], &alpha, 3).unwrap();
    assert_eq!(id.image, alpha);
    assert!(id.descendants.iter().all(|(c, i)| c == i));
    let a = o.parse("a").unwrap();
    let la = boundary_local_action(&m, &a, &alpha, 2).unwrap();
    assert_eq!(m.word(&la.image), o.parse("abb").unwrap());
    let top = m.address(&o.parse("A").unwrap()).unwrap();
    let lt = boundary_local_action(&m, &a, &top, 1).unwrap();
    assert!(lt.image.is_empty());
    let words: Vec<String> = lt.descendants.iter().map(|(_, i)| o.show(&m.word(i))).collect();
    assert_eq!(words, vec!["A", "b", "B"]);
}

#[test]
fn representatives_cover_prefixes_and_suffixes() {
    let o = GroupOracle::free(2);
    let reps = representative_words(&o, 16, 2, 2);
    assert_eq!(reps.len(), 144);
    assert!(reps.iter().all(|w| w.len() == 16 && o.normal_form(w) == *w));
}

#[test]
fn free_nucleus_is_identities() {
    let o = GroupOracle::free(2);
    let m = model(&o);
    let gens: Vec<Vec<u8>> = (0..4u8).map(|s| vec![s]).collect();
    let n = nucleus_extract(&m, &gens, 10_000).unwrap();
    assert_eq!(n.set.len(), 4);
    assert!(n.identities_only());
}

#[test]
fn z2_star_z_nucleus_finite() {
    let o = GroupOracle::free_product(&["Z/2", "Z"]).unwrap();
    let m = model(&o);
    let gens: Vec<Vec<u8>> = (0..o.gen_count() as u8).map(|s| vec![s]).collect();
    let n = nucleus_extract(&m, &gens, 10_000).unwrap();
    println!("{} states, growth {:?}", n.set.len(), n.growth);
    assert_eq!(n.set.len(), 3);
}

#[test]
fn certificates() {
    let c = certify_full_contracting_rsg(&GroupOracle::free(2), Budgets::default()).unwrap();
    println!("{}", serde_json::to_string_pretty(&c.stages).unwrap());
    assert!(c.full);
    let z = certify_full_contracting_rsg(&GroupOracle::zn(2), Budgets::default()).unwrap();
    assert_eq!(z.failed_stage.as_deref(), Some("hyperbolicity"));
    let h = DirectedGraph::new(
        &["u", "v1", "v2", "v3"],
        &[("l0", "u", "u"), ("l1", "v1", "v1"), ("l2", "v2", "v2"), ("l3", "v3", "v3"), ("f1", "v1", "u"), ("f2", "v2", "u"), ("f3", "v3", "u")],
    )
    .unwrap();
    assert!(!core_gate(&h).unwrap().pass);
}
