//! Atoms of B_n: classes of elements whose normalized distance functions
//! agree on the ball, and the tree they form across levels.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::ball::{Ball, NONE};
use crate::error::{AtomsError, Result};
use crate::oracle::{Elem, GroupOracle};

/// Default cap on the element pool.
pub const POOL_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infinite {
    /// Infinite by an exact characterization of the atom.
    Certified,
    /// Witnessed at every layer from its first appearance out to the
    /// horizon, which is this many layers past the atom's level.
    Heuristic(usize),
    Finite,
}

impl Infinite {
    pub fn is_infinite(self) -> bool {
        !matches!(self, Infinite::Finite)
    }
}

#[derive(Clone, Debug)]
pub struct Atom {
    pub level: usize,
    /// d̄_A on B_level in ball order, shifted so the minimum is 0.
    pub profile: Vec<u8>,
    /// Pool indices of the elements of the atom, ascending.
    pub witnesses: Vec<u32>,
    pub infinite: Infinite,
    pub parent: Option<usize>,
    /// Infinite atoms one level down inside this one, by least witness.
    pub children: Vec<usize>,
}

/// All atoms of B_0, …, B_L restricted to a pool B_{L+D}.
#[derive(Clone, Debug)]
pub struct AtomTree {
    pub oracle: GroupOracle,
    pub pool: Ball,
    pub max_level: usize,
    pub horizon: usize,
    pub atoms: Vec<Atom>,
    /// Atom ids per level, by least witness.
    pub levels: Vec<Vec<usize>>,
    /// member[j][x]: the level-j atom of pool element x; NONE inside B_{j-1}.
    member: Vec<Vec<u32>>,
    /// Pool index of w when the atom is exactly the cone C(w) with |w| = level.
    cone_root: Vec<Option<u32>>,
}

impl AtomTree {
    pub fn build(oracle: &GroupOracle, max_level: usize, horizon: usize) -> Result<AtomTree> {
        Self::build_with_budget(oracle, max_level, horizon, POOL_BUDGET)
    }

    pub fn build_with_budget(oracle: &GroupOracle, max_level: usize, horizon: usize, budget: usize) -> Result<AtomTree> {
        if horizon == 0 {
            return Err(AtomsError::Precondition("horizon must be at least 1".into()));
        }
        let radius = max_level + horizon;
        if radius > 120 {
            return Err(AtomsError::Budget("pool radius above 120".into()));
        }
        let pool = Ball::new(oracle, radius, budget)?;
        let inner = pool.size_of(max_level);
        let mut keys: Vec<HashMap<Vec<u8>, usize>> = vec![HashMap::new(); max_level + 1];
        let mut local: Vec<Vec<(Vec<u8>, Vec<u32>)>> = vec![Vec::new(); max_level + 1];
        let mut local_member: Vec<Vec<u32>> = vec![vec![NONE; pool.len()]; max_level + 1];
        let mut row = vec![0u8; inner];
        for (i, x) in pool.elems.iter().enumerate() {
            for (b, r) in row.iter_mut().enumerate() {
                *r = oracle.dist(x, &pool.elems[b]) as u8;
            }
            let top = (pool.layer[i] as usize).min(max_level);
            for j in 0..=top {
                let slice = &row[..pool.size_of(j)];
                let m = *slice.iter().min().expect("nonempty ball");
                let key: Vec<u8> = slice.iter().map(|v| v - m).collect();
                let next = local[j].len();
                let id = *keys[j].entry(key.clone()).or_insert(next);
                if id == next {
                    local[j].push((key, Vec::new()));
                }
                local[j][id].1.push(i as u32);
                local_member[j][i] = id as u32;
            }
        }
        let mut atoms = Vec::new();
        let mut levels = Vec::new();
        let mut member = Vec::new();
        for (j, list) in local.into_iter().enumerate() {
            let base = atoms.len();
            levels.push((base..base + list.len()).collect());
            for (profile, witnesses) in list {
                atoms.push(Atom { level: j, profile, witnesses, infinite: Infinite::Finite, parent: None, children: Vec::new() });
            }
            member.push(local_member[j].iter().map(|&l| if l == NONE { NONE } else { l + base as u32 }).collect());
        }
        let cone_root = vec![None; atoms.len()];
        let mut t = AtomTree { oracle: oracle.clone(), pool, max_level, horizon, atoms, levels, member, cone_root };
        for a in 0..t.atoms.len() {
            t.atoms[a].infinite = t.classify_infinite(a);
        }
        for j in 1..=max_level {
            for &a in &t.levels[j].clone() {
                let w = &t.atoms[a].witnesses;
                let p = t.member[j - 1][w[0] as usize];
                if w.iter().any(|&x| t.member[j - 1][x as usize] != p) {
                    return Err(AtomsError::Inconsistent(format!("atom {a} at level {j} straddles two parents")));
                }
                t.atoms[a].parent = Some(p as usize);
                if t.atoms[a].infinite.is_infinite() {
                    t.atoms[p as usize].children.push(a);
                }
            }
        }
        Ok(t)
    }

    fn classify_infinite(&mut self, a: usize) -> Infinite {
        let o = self.oracle.clone();
        let atom = self.atoms[a].clone();
        let j = atom.level;
        if j == 0 {
            return if o.is_infinite() { Infinite::Certified } else { Infinite::Finite };
        }
        let least = self.pool.elems[atom.witnesses[0] as usize].clone();
        if let Some(coords) = o.coords(&least) {
            if coords.len() == 2 {
                // Atoms of ℤ² are products of rays (≤ −j or ≥ j) and
                // singletons; one is infinite iff a factor is a ray.
                let ray = atom.witnesses.iter().any(|&x| {
                    o.coords(&self.pool.elems[x as usize]).expect("zn").iter().any(|c| c.unsigned_abs() as usize >= j)
                });
                return if ray { Infinite::Certified } else { Infinite::Finite };
            }
        }
        let cone_lemma = o.is_infinite() && (o.is_tree() || o.ends_in_free_letter(&least));
        if cone_lemma && least.len() == j && self.equals_pool_cone(a, &least) {
            self.cone_root[a] = Some(atom.witnesses[0]);
            return Infinite::Certified;
        }
        let r = self.pool.radius;
        let mut seen = vec![false; r + 1];
        for &x in &atom.witnesses {
            seen[self.pool.layer[x as usize] as usize] = true;
        }
        let first = seen.iter().position(|&s| s).expect("witness");
        if first < r && seen[first..].iter().all(|&s| s) {
            Infinite::Heuristic(r - j)
        } else {
            Infinite::Finite
        }
    }

    fn equals_pool_cone(&self, a: usize, root: &[u8]) -> bool {
        let j = self.atoms[a].level;
        let mut cone: Vec<u32> = Vec::new();
        for i in self.pool.starts[j]..self.pool.len() {
            if self.oracle.in_cone(root, &self.pool.elems[i]) {
                cone.push(i as u32);
            }
        }
        cone == self.atoms[a].witnesses
    }

    /// w such that the atom equals C(w) with |w| its level, when certified.
    pub fn cone_root(&self, a: usize) -> Option<&Elem> {
        self.cone_root[a].map(|i| &self.pool.elems[i as usize])
    }

    /// Infinite atoms at level level(a)+d inside a.
    pub fn descendants(&self, a: usize, d: usize) -> Vec<usize> {
        let mut cur = vec![a];
        for _ in 0..d {
            cur = cur.iter().flat_map(|&c| self.atoms[c].children.iter().copied()).collect();
        }
        cur
    }

    pub fn level_of(&self, a: usize) -> usize {
        self.atoms[a].level
    }

    /// The level-j atom containing pool element x.
    pub fn atom_of(&self, j: usize, x: usize) -> Option<usize> {
        self.member.get(j).and_then(|m| m.get(x)).filter(|&&id| id != NONE).map(|&id| id as usize)
    }

    pub fn atom_of_elem(&self, j: usize, x: &[u8]) -> Option<usize> {
        self.pool.position(x).and_then(|i| self.atom_of(j, i))
    }

    pub fn infinite_at(&self, j: usize) -> Vec<usize> {
        self.levels[j].iter().copied().filter(|&a| self.atoms[a].infinite.is_infinite()).collect()
    }

    pub fn least_witness(&self, a: usize) -> &Elem {
        &self.pool.elems[self.atoms[a].witnesses[0] as usize]
    }

    /// Witnesses on the lowest layer the atom reaches.
    pub fn lowest_witnesses(&self, a: usize) -> Vec<usize> {
        let w = &self.atoms[a].witnesses;
        let l0 = self.pool.layer[w[0] as usize];
        w.iter().map(|&x| x as usize).take_while(|&x| self.pool.layer[x] == l0).collect()
    }

    /// d̄_A at a point of B_level.
    pub fn profile_at(&self, a: usize, p: &[u8]) -> Option<u8> {
        let i = self.pool.position(p)?;
        self.atoms[a].profile.get(i).copied()
    }

    fn require_witness(&self, a: usize) -> Result<()> {
        if self.atoms[a].witnesses.is_empty() {
            return Err(AtomsError::MissingWitness(format!("atom {a}")));
        }
        Ok(())
    }

    /// N(A): where d̄_A attains its minimum on B_n.
    pub fn nearest(&self, a: usize) -> Result<Vec<Elem>> {
        self.require_witness(a)?;
        let at = &self.atoms[a];
        Ok(at.profile.iter().enumerate().filter(|(_, &v)| v == 0).map(|(i, _)| self.pool.elems[i].clone()).collect())
    }

    /// V(A): points p of B_n such that no geodesic from p to a witness
    /// passes through another point of B_n.
    pub fn visible(&self, a: usize) -> Result<Vec<Elem>> {
        self.require_witness(a)?;
        let at = &self.atoms[a];
        let x = &self.pool.elems[*at.witnesses.last().expect("witness") as usize];
        let n = self.pool.size_of(at.level);
        let o = &self.oracle;
        let dx: Vec<usize> = (0..n).map(|q| o.dist(x, &self.pool.elems[q])).collect();
        let mut out = Vec::new();
        for p in 0..n {
            let pe = &self.pool.elems[p];
            let blocked = (0..n).any(|q| q != p && o.dist(pe, &self.pool.elems[q]) + dx[q] == dx[p]);
            if !blocked {
                out.push(pe.clone());
            }
        }
        Ok(out)
    }

    /// N̂(A) = S_n ∩ B_{4δ+2}(N(A)).
    pub fn nhat(&self, a: usize) -> Result<Vec<Elem>> {
        let delta = self
            .oracle
            .delta()
            .ok_or_else(|| AtomsError::Precondition("N̂ needs a hyperbolicity constant".into()))?;
        let r = (4.0 * delta + 2.0).floor() as usize;
        let near = self.nearest(a)?;
        let j = self.atoms[a].level;
        Ok(self
            .pool
            .sphere(j)
            .map(|i| &self.pool.elems[i])
            .filter(|s| near.iter().any(|p| self.oracle.dist(s, p) <= r))
            .cloned()
            .collect())
    }

    pub fn profile_hash(&self, a: usize) -> u64 {
        let mut h = DefaultHasher::new();
        self.atoms[a].profile.hash(&mut h);
        h.finish()
    }

    /// level, profile hash, witness count, children, infinite flag.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,profile_hash,witnesses,children,infinite\n");
        for (a, at) in self.atoms.iter().enumerate() {
            let flag = match at.infinite {
                Infinite::Certified => "certified".to_string(),
                Infinite::Heuristic(d) => format!("heuristic({d})"),
                Infinite::Finite => "finite".to_string(),
            };
            let _ = writeln!(s, "{},{:016x},{},{},{}", at.level, self.profile_hash(a), at.witnesses.len(), at.children.len(), flag);
        }
        s
    }

    /// The tree of infinite atoms, labelled by least witness.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph atoms {\n");
        for (a, at) in self.atoms.iter().enumerate() {
            if !at.infinite.is_infinite() {
                continue;
            }
            let _ = writeln!(s, "  n{a} [label=\"{}:{}\"];", at.level, self.oracle.show(self.least_witness(a)));
            for &c in &at.children {
                let _ = writeln!(s, "  n{a} -> n{c};");
            }
        }
        s.push_str("}\n");
        s
    }
}
