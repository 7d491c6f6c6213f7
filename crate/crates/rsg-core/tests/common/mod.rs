#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rsg_core::{ClopenSet, DirectedGraph, Path, VElement};

/// A random complete code of `e` obtained by `steps` random cone splits.
pub fn random_code<R: Rng>(g: &DirectedGraph, e: &ClopenSet, steps: usize, rng: &mut R) -> Vec<Path> {
    let mut code = e.code_at_length(g, 1);
    for _ in 0..steps {
        let k = rng.gen_range(0..code.len());
        let p = code.remove(k);
        code.extend(p.children(g));
    }
    code
}

/// A random prefix exchange on `e`: two random codes paired by terminus,
/// with random order inside each terminus class.
pub fn random_v<R: Rng>(g: &DirectedGraph, e: &ClopenSet, steps: usize, rng: &mut R) -> VElement {
    let a = random_code(g, e, steps, rng);
    let b = random_code(g, e, steps, rng);
    let pairs = rsg_core::thompson::match_code_lists(g, a, b, 16).expect("codes of one set match");
    let mut by_t: std::collections::BTreeMap<usize, Vec<(Path, Path)>> = Default::default();
    for p in pairs {
        by_t.entry(p.0.terminus(g).unwrap()).or_default().push(p);
    }
    let mut out = Vec::new();
    for (_, v) in by_t {
        let mut rs: Vec<Path> = v.iter().map(|p| p.1.clone()).collect();
        rs.shuffle(rng);
        out.extend(v.into_iter().map(|p| p.0).zip(rs));
    }
    VElement::new(g, out).expect("valid element")
}
