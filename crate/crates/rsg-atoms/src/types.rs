//! Morphisms between atoms, types of atoms, the type graph and a system of
//! addresses on top of it.

use std::collections::{BTreeMap, HashMap};

use rsg_core::graph::{EdgeJson, GraphJson};
use rsg_core::{irreducible_core, Core, DirectedGraph, EdgeId, NodeId, Path};
use serde::Serialize;

use crate::atoms::AtomTree;
use crate::error::{AtomsError, Result};
use crate::oracle::{Elem, GroupOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Pass,
    Fail,
    /// Nothing inside the computed window could be tested.
    Unchecked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorphismReport {
    /// g·A₁ = A₂ on the part of the pool where both sides are visible.
    pub cond_i: Check,
    /// g(A₁ ∩ B_{m+j}) = A₂ ∩ B_{n+j} for j ≤ k.
    pub cond_ii: Check,
    /// g induces a bijection of infinite descendants to depth k.
    pub cond_iii: Check,
    /// Descendant depth actually reached by (iii).
    pub depth_checked: usize,
    pub verdict: Verdict,
    /// Which sufficient criterion certified the morphism, or why not.
    pub reason: String,
    /// (i) and (iii) hold but (ii) does not.
    pub divergence: bool,
    /// Children of A₁ paired with their images among children of A₂.
    pub child_map: Vec<(usize, usize)>,
}

impl MorphismReport {
    /// (i) and (iii) hold wherever they could be tested.
    pub fn consistent(&self) -> bool {
        self.cond_i == Check::Pass && self.cond_iii != Check::Fail
    }
}

fn check_i(t: &AtomTree, g: &[u8], a1: usize, a2: usize) -> Check {
    let o = &t.oracle;
    let (m, n) = (t.atoms[a1].level, t.atoms[a2].level);
    let gi = o.inv(g);
    let mut tested = false;
    for (src, dst, lvl, h) in [(a1, a2, n, g), (a2, a1, m, gi.as_slice())] {
        for &x in &t.atoms[src].witnesses {
            let y = o.mul(h, &t.pool.elems[x as usize]);
            let Some(i) = t.pool.position(&y) else { continue };
            match t.atom_of(lvl, i) {
                Some(b) if b == dst => tested = true,
                _ => return Check::Fail,
            }
        }
    }
    if tested {
        Check::Pass
    } else {
        Check::Unchecked
    }
}

fn check_ii(t: &AtomTree, g: &[u8], a1: usize, a2: usize, k: usize) -> Check {
    let o = &t.oracle;
    let (m, n) = (t.atoms[a1].level as i64, t.atoms[a2].level as i64);
    let gi = o.inv(g);
    let mut tested = false;
    for (src, h, shift) in [(a1, g, n - m), (a2, gi.as_slice(), m - n)] {
        let base = t.atoms[src].level as i64;
        for &x in &t.atoms[src].witnesses {
            let xe = &t.pool.elems[x as usize];
            if xe.len() as i64 > base + k as i64 {
                break;
            }
            tested = true;
            if o.mul(h, xe).len() as i64 - xe.len() as i64 != shift {
                return Check::Fail;
            }
        }
    }
    if tested {
        Check::Pass
    } else {
        Check::Unchecked
    }
}

/// The image atom of c under g at level lvl, if g·c lands in one atom.
fn image_atom(t: &AtomTree, g: &[u8], c: usize, lvl: usize) -> std::result::Result<Option<usize>, ()> {
    let mut img = None;
    for &x in &t.atoms[c].witnesses {
        let y = t.oracle.mul(g, &t.pool.elems[x as usize]);
        let Some(i) = t.pool.position(&y) else { continue };
        match (t.atom_of(lvl, i), img) {
            (None, _) => return Err(()),
            (Some(b), None) => img = Some(b),
            (Some(b), Some(p)) if b != p => return Err(()),
            _ => {}
        }
    }
    Ok(img)
}

fn check_iii(t: &AtomTree, g: &[u8], a1: usize, a2: usize, k: usize) -> (Check, usize, Vec<(usize, usize)>) {
    let (m, n) = (t.atoms[a1].level, t.atoms[a2].level);
    let gi = t.oracle.inv(g);
    let mut reached = 0;
    let mut child_map = Vec::new();
    for d in 1..=k {
        if m + d > t.max_level || n + d > t.max_level {
            break;
        }
        let d1 = t.descendants(a1, d);
        let d2 = t.descendants(a2, d);
        if d1.len() != d2.len() {
            return (Check::Fail, d, Vec::new());
        }
        let mut used = vec![false; d2.len()];
        let mut complete = true;
        let mut map = Vec::new();
        for &c in &d1 {
            match image_atom(t, g, c, n + d) {
                Err(()) => return (Check::Fail, d, Vec::new()),
                Ok(None) => complete = false,
                Ok(Some(b)) => {
                    let Some(pos) = d2.iter().position(|&x| x == b) else {
                        return (Check::Fail, d, Vec::new());
                    };
                    if used[pos] || image_atom(t, &gi, b, m + d).map_or(true, |r| r.is_some_and(|r| r != c)) {
                        return (Check::Fail, d, Vec::new());
                    }
                    used[pos] = true;
                    map.push((c, b));
                }
            }
        }
        if !complete {
            break;
        }
        if d == 1 {
            child_map = map;
        }
        reached = d;
    }
    let c = if reached == 0 { Check::Unchecked } else { Check::Pass };
    (c, reached, child_map)
}

/// The sufficient criterion: g·N̂(A₁) = N̂(A₂), g·d̄_{A₁} agrees with d̄_{A₂}
/// there, and g·C(x) = C(gx) for x ∈ N̂(A₁).
pub fn make_morphisms_criterion(t: &AtomTree, g: &[u8], a1: usize, a2: usize, window: usize) -> Option<bool> {
    let o = &t.oracle;
    o.delta()?;
    let n1 = t.nhat(a1).ok()?;
    let mut n2 = t.nhat(a2).ok()?;
    let mut img: Vec<Elem> = n1.iter().map(|x| o.mul(g, x)).collect();
    img.sort();
    n2.sort();
    if img != n2 {
        return Some(false);
    }
    let mut offset = None;
    for x in &n1 {
        let gx = o.mul(g, x);
        let d = t.profile_at(a1, x)? as i64 - t.profile_at(a2, &gx)? as i64;
        if *offset.get_or_insert(d) != d {
            return Some(false);
        }
        if o.cone_type(x, window) != o.cone_type(&gx, window) {
            return Some(false);
        }
    }
    Some(true)
}

fn cone_translation(t: &AtomTree, g: &[u8], a1: usize, a2: usize) -> bool {
    let o = &t.oracle;
    let (Some(w1), Some(w2)) = (t.cone_root(a1), t.cone_root(a2)) else {
        return false;
    };
    o.cone_type(w1, 0) == o.cone_type(w2, 0) && o.mul(w2, &o.inv(w1)) == g
}

pub fn morphism_check(t: &AtomTree, g: &[u8], a1: usize, a2: usize, k: usize) -> MorphismReport {
    let g = t.oracle.normal_form(g);
    let cond_i = check_i(t, &g, a1, a2);
    let cond_ii = check_ii(t, &g, a1, a2, k);
    let (cond_iii, depth_checked, child_map) = check_iii(t, &g, a1, a2, k);
    let inf = |a: usize| t.atoms[a].infinite.is_infinite();
    let (verdict, reason) = if cond_i == Check::Fail || cond_iii == Check::Fail || inf(a1) != inf(a2) {
        (Verdict::Refuted, "a checked condition fails".to_string())
    } else if g.is_empty() && a1 == a2 {
        (Verdict::Certified, "identity".into())
    } else if cone_translation(t, &g, a1, a2) {
        (Verdict::Certified, "cone translation".into())
    } else {
        match make_morphisms_criterion(t, &g, a1, a2, k) {
            Some(true) => {
                let exact = t.oracle.kind_name() != "dehn";
                let r = if exact { "nearest-set criterion".to_string() } else { format!("nearest-set criterion, cone window {k}") };
                (Verdict::Certified, r)
            }
            Some(_) => (Verdict::Inconclusive, "nearest-set criterion does not apply".into()),
            None => (Verdict::Inconclusive, "no hyperbolicity constant".into()),
        }
    };
    let divergence = cond_ii == Check::Fail && cond_i == Check::Pass && cond_iii != Check::Fail;
    MorphismReport { cond_i, cond_ii, cond_iii, depth_checked, verdict, reason, divergence, child_map }
}

/// Candidate morphisms from atom r to atom a: alignments of least-layer
/// witnesses, then alignments of the N̂ sets.
pub fn candidates(t: &AtomTree, r: usize, a: usize) -> Vec<Elem> {
    let o = &t.oracle;
    let mut out: Vec<Elem> = Vec::new();
    let w1 = t.least_witness(r).clone();
    let w1i = o.inv(&w1);
    for x in t.lowest_witnesses(a).into_iter().take(64) {
        out.push(o.mul(&t.pool.elems[x], &w1i));
    }
    if o.delta().is_some() {
        if let (Ok(n1), Ok(n2)) = (t.nhat(r), t.nhat(a)) {
            if n1.len() == n2.len() && !n1.is_empty() {
                let p0i = o.inv(&n1[0]);
                for q in &n2 {
                    out.push(o.mul(q, &p0i));
                }
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|g| seen.insert(g.clone()));
    out
}

#[derive(Clone, Debug)]
pub struct TypeGraph {
    pub tree: AtomTree,
    pub graph: DirectedGraph,
    pub root: NodeId,
    /// Representative atom per type; type ids equal node ids.
    pub reps: Vec<usize>,
    pub atom_type: HashMap<usize, usize>,
    /// Morphism from the representative of the atom's type to the atom.
    pub morphism: HashMap<usize, (Elem, Verdict)>,
    /// Per edge: the child of the source representative and the morphism
    /// onto it from the representative of the target type.
    pub edge_witness: Vec<(usize, Elem)>,
    pub new_types_per_level: Vec<usize>,
    pub stabilized: bool,
    pub consistent: bool,
    /// Every classifying morphism was certified.
    pub certified: bool,
    pub divergences: Vec<String>,
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeReport {
    pub types: usize,
    pub new_types_per_level: Vec<usize>,
    pub stabilized: bool,
    pub consistent: bool,
    pub certified: bool,
    pub divergences: Vec<String>,
}

pub fn type_graph(oracle: &GroupOracle, max_level: usize, depth: usize, horizon: usize) -> Result<TypeGraph> {
    let tree = AtomTree::build(oracle, max_level, horizon)?;
    type_graph_of(tree, depth)
}

pub fn type_graph_of(tree: AtomTree, depth: usize) -> Result<TypeGraph> {
    let o = tree.oracle.clone();
    let mut reps: Vec<usize> = Vec::new();
    let mut atom_type = HashMap::new();
    let mut morphism = HashMap::new();
    let mut new_types = vec![0usize; tree.max_level + 1];
    let mut certified = true;
    let mut divergences = Vec::new();
    for j in 0..=tree.max_level {
        for a in tree.infinite_at(j) {
            let mut found = None;
            'types: for (ty, &r) in reps.iter().enumerate() {
                let mut fallback = None;
                for g in candidates(&tree, r, a) {
                    let rep = morphism_check(&tree, &g, r, a, depth);
                    if rep.divergence {
                        divergences.push(format!(
                            "type of {} at level {} → level {}: (i) and (iii) hold, (ii) fails",
                            o.show(tree.least_witness(r)),
                            tree.atoms[r].level,
                            j
                        ));
                    }
                    if rep.consistent() {
                        if rep.verdict == Verdict::Certified {
                            found = Some((ty, g, Verdict::Certified));
                            break 'types;
                        }
                        fallback.get_or_insert((ty, g, rep.verdict));
                    }
                }
                if let Some(f) = fallback {
                    found = Some(f);
                    break;
                }
            }
            match found {
                Some((ty, g, v)) => {
                    certified &= v == Verdict::Certified;
                    atom_type.insert(a, ty);
                    morphism.insert(a, (g, v));
                }
                None => {
                    atom_type.insert(a, reps.len());
                    morphism.insert(a, (Vec::new(), Verdict::Certified));
                    reps.push(a);
                    new_types[j] += 1;
                }
            }
        }
    }
    divergences.sort();
    divergences.dedup();
    let child_types = |a: usize| -> Vec<usize> {
        let mut v: Vec<usize> = tree.atoms[a].children.iter().map(|c| atom_type[c]).collect();
        v.sort();
        v
    };
    let mut consistent = true;
    for (&a, &ty) in &atom_type {
        if tree.atoms[a].level < tree.max_level && child_types(a) != child_types(reps[ty]) {
            consistent = false;
        }
    }
    let l = tree.max_level;
    let stabilized = l >= 2 && new_types[l] == 0 && new_types[l - 1] == 0;
    let mut names: Vec<String> = Vec::new();
    for &r in &reps {
        let lvl = tree.atoms[r].level;
        let mut name = if lvl == 0 { "r".to_string() } else { o.show(tree.least_witness(r)) };
        if names.contains(&name) {
            name = format!("{name}@{lvl}");
        }
        names.push(name);
    }
    let mut edges = Vec::new();
    let mut edge_witness = Vec::new();
    for (ty, &r) in reps.iter().enumerate() {
        for &c in &tree.atoms[r].children {
            edges.push(EdgeJson { id: format!("e{}", edges.len()), src: names[ty].clone(), dst: names[atom_type[&c]].clone() });
            edge_witness.push((c, morphism[&c].0.clone()));
        }
    }
    let graph = DirectedGraph::from_json(&GraphJson { nodes: names, edges })?;
    Ok(TypeGraph {
        tree,
        graph,
        root: 0,
        reps,
        atom_type,
        morphism,
        edge_witness,
        new_types_per_level: new_types,
        stabilized,
        consistent,
        certified,
        divergences,
        depth,
    })
}

impl TypeGraph {
    pub fn type_count(&self) -> usize {
        self.reps.len()
    }

    pub fn report(&self) -> TypeReport {
        TypeReport {
            types: self.reps.len(),
            new_types_per_level: self.new_types_per_level.clone(),
            stabilized: self.stabilized,
            consistent: self.consistent,
            certified: self.certified,
            divergences: self.divergences.clone(),
        }
    }

    pub fn core(&self) -> Result<Option<Core>> {
        Ok(irreducible_core(&self.graph)?)
    }

    pub fn to_dot(&self) -> String {
        let core = self.core().ok().flatten();
        self.graph.to_dot(core.as_ref())
    }

    /// Child-type counts per type, sorted by target.
    pub fn child_multiset(&self, ty: usize) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &c in &self.tree.atoms[self.reps[ty]].children {
            *m.entry(self.atom_type[&c]).or_insert(0) += 1;
        }
        m
    }
}

/// A system of addresses: paths from the root node name atoms, and each
/// address α carries a morphism g_α from the representative of t(α) to A_α.
#[derive(Clone, Debug)]
pub struct AddressSystem {
    pub types: TypeGraph,
    /// Atom of each address, for every address up to the tree's max level.
    pub atom_of: HashMap<Vec<EdgeId>, usize>,
    pub address_of: HashMap<usize, Vec<EdgeId>>,
    pub element: HashMap<Vec<EdgeId>, Elem>,
}

pub fn address_system(types: TypeGraph) -> Result<AddressSystem> {
    if !types.stabilized || !types.consistent {
        return Err(AtomsError::Unstabilized(format!(
            "new types per level {:?}, consistent {}",
            types.new_types_per_level, types.consistent
        )));
    }
    let t = &types.tree;
    let o = &t.oracle;
    let root_atom = types.reps[0];
    let mut atom_of = HashMap::new();
    let mut address_of = HashMap::new();
    let mut element = HashMap::new();
    atom_of.insert(Vec::new(), root_atom);
    address_of.insert(root_atom, Vec::new());
    element.insert(Vec::new(), Vec::new());
    let mut frontier: Vec<Vec<EdgeId>> = vec![Vec::new()];
    for lvl in 0..t.max_level {
        let mut next = Vec::new();
        for alpha in frontier {
            let ty = terminus(&types, &alpha);
            let ga = element[&alpha].clone();
            for &e in types.graph.out_edges(ty) {
                let h = &types.edge_witness[e].1;
                let gb = o.mul(&ga, h);
                let w = o.mul(&gb, t.least_witness(types.reps[types.graph.dst(e)]));
                let a = t
                    .atom_of_elem(lvl + 1, &w)
                    .ok_or_else(|| AtomsError::MissingWitness(format!("address image {} leaves the pool", o.show(&w))))?;
                let mut beta = alpha.clone();
                beta.push(e);
                if address_of.insert(a, beta.clone()).is_some() {
                    return Err(AtomsError::Inconsistent(format!("two addresses for atom {a}")));
                }
                atom_of.insert(beta.clone(), a);
                element.insert(beta.clone(), gb);
                next.push(beta);
            }
        }
        frontier = next;
    }
    Ok(AddressSystem { types, atom_of, address_of, element })
}

fn terminus(types: &TypeGraph, alpha: &[EdgeId]) -> NodeId {
    alpha.last().map_or(types.root, |&e| types.graph.dst(e))
}

impl AddressSystem {
    pub fn tree(&self) -> &AtomTree {
        &self.types.tree
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.types.graph
    }

    pub fn terminus(&self, alpha: &[EdgeId]) -> NodeId {
        terminus(&self.types, alpha)
    }

    pub fn path(&self, alpha: &[EdgeId]) -> Result<Path> {
        if alpha.is_empty() {
            return Ok(Path::node(self.types.root));
        }
        Ok(Path::from_edges(&self.types.graph, alpha)?)
    }

    /// The morphism from A_α to A_β induced by the canonical similarity.
    pub fn canonical_morphism(&self, alpha: &[EdgeId], beta: &[EdgeId]) -> Result<Elem> {
        if self.terminus(alpha) != self.terminus(beta) {
            return Err(AtomsError::Precondition("addresses end at different types".into()));
        }
        let o = &self.types.tree.oracle;
        let ga = self.element.get(alpha).ok_or_else(|| AtomsError::Precondition("address beyond computed levels".into()))?;
        let gb = self.element.get(beta).ok_or_else(|| AtomsError::Precondition("address beyond computed levels".into()))?;
        Ok(o.mul(gb, &o.inv(ga)))
    }

    pub fn addresses_at(&self, level: usize) -> Vec<Vec<EdgeId>> {
        let mut v: Vec<Vec<EdgeId>> = self.atom_of.keys().filter(|a| a.len() == level).cloned().collect();
        v.sort();
        v
    }

    pub fn show(&self, alpha: &[EdgeId]) -> String {
        if alpha.is_empty() {
            return self.types.graph.node_name(self.types.root).to_string();
        }
        alpha.iter().map(|&e| self.types.graph.edge_name(e)).collect::<Vec<_>>().join(".")
    }
}
