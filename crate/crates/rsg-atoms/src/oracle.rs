//! Word-problem oracles for the groups whose trees of atoms we compute.
//!
//! Elements are canonical words over a symmetric generator list, stored as
//! generator indices. Canonical words are geodesic, so the word length of an
//! element is the length of its canonical word. Generators are single
//! letters; the inverse of a lowercase letter is its uppercase form, and an
//! involution has no separate inverse letter.

use std::collections::HashSet;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{AtomsError, Result};

pub type Elem = Vec<u8>;

/// JSON description of an oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    Free { rank: usize },
    /// Factors are "Z" or "Z/m" with m ≥ 2.
    FreeProduct { factors: Vec<String> },
    Zn { n: usize },
    /// A presentation on which Dehn's algorithm solves the word problem,
    /// with an asserted hyperbolicity constant.
    Dehn { gens: Vec<String>, rels: Vec<String>, delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Infinite,
    Cyclic(u32),
}

/// Cone type of x: the set T(x) of h with |xh| = |x| + |h|, so that
/// C(x) = x·T(x). Built-in kinds give an exact key; Dehn oracles give the
/// set of such h up to a fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConeType {
    Root,
    Exact(Vec<i64>),
    Window(Vec<Elem>),
}

#[derive(Debug, Default)]
struct DehnCache {
    spheres: Vec<Vec<Elem>>,
}

#[derive(Clone, Debug)]
enum Kind {
    Product(Vec<Factor>),
    Zn(usize),
    Dehn { rels: Vec<Elem>, cache: Arc<Mutex<DehnCache>> },
}

#[derive(Clone, Debug)]
pub struct GroupOracle {
    spec: OracleSpec,
    kind: Kind,
    letters: Vec<char>,
    inv: Vec<u8>,
    /// Factor (or coordinate) of each generator and its signed step.
    part: Vec<(usize, i64)>,
    pos: Vec<u8>,
    neg: Vec<Option<u8>>,
    delta: Option<f64>,
}

const ZN_LETTERS: &[char] = &['x', 'y', 'z', 'w', 'u', 'v'];

fn parse_factor(s: &str) -> Result<Factor> {
    let t = s.trim();
    if t == "Z" {
        return Ok(Factor::Infinite);
    }
    let m = t
        .strip_prefix("Z/")
        .and_then(|m| m.parse::<u32>().ok())
        .filter(|&m| m >= 2)
        .ok_or_else(|| AtomsError::InvalidOracle(format!("factor {s:?} is not Z or Z/m with m ≥ 2")))?;
    Ok(Factor::Cyclic(m))
}

impl GroupOracle {
    pub fn from_spec(spec: OracleSpec) -> Result<GroupOracle> {
        let mut letters = Vec::new();
        let mut inv = Vec::new();
        let mut part = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut push_pair = |base: char, slot: usize, involution: bool| {
            let i = letters.len() as u8;
            letters.push(base);
            part.push((slot, 1));
            pos.push(i);
            if involution {
                inv.push(i);
                neg.push(None);
            } else {
                letters.push(base.to_ascii_uppercase());
                part.push((slot, -1));
                inv.push(i + 1);
                inv.push(i);
                neg.push(Some(i + 1));
            }
        };
        let (kind, delta) = match &spec {
            OracleSpec::Free { rank } => {
                if *rank == 0 || *rank > 26 {
                    return Err(AtomsError::InvalidOracle("rank must be between 1 and 26".into()));
                }
                for f in 0..*rank {
                    push_pair((b'a' + f as u8) as char, f, false);
                }
                (Kind::Product(vec![Factor::Infinite; *rank]), Some(0.0))
            }
            OracleSpec::FreeProduct { factors } => {
                if factors.is_empty() || factors.len() > 26 {
                    return Err(AtomsError::InvalidOracle("between 1 and 26 factors".into()));
                }
                let fs: Vec<Factor> = factors.iter().map(|s| parse_factor(s)).collect::<Result<_>>()?;
                for (f, x) in fs.iter().enumerate() {
                    push_pair((b'a' + f as u8) as char, f, *x == Factor::Cyclic(2));
                }
                // Blocks of the Cayley graph are m-cycles; their diameter bounds
                // the thinness of triangles. Edges and lines give a tree.
                let delta = fs
                    .iter()
                    .map(|f| match f {
                        Factor::Cyclic(m) if *m >= 3 => (m / 2) as f64,
                        _ => 0.0,
                    })
                    .fold(0.0, f64::max);
                (Kind::Product(fs), Some(delta))
            }
            OracleSpec::Zn { n } => {
                if *n == 0 || *n > ZN_LETTERS.len() {
                    return Err(AtomsError::InvalidOracle(format!("zn needs 1 ≤ n ≤ {}", ZN_LETTERS.len())));
                }
                for (i, &c) in ZN_LETTERS.iter().take(*n).enumerate() {
                    push_pair(c, i, false);
                }
                (Kind::Zn(*n), None)
            }
            OracleSpec::Dehn { gens, delta, .. } => {
                if !(delta.is_finite() && *delta >= 0.0) {
                    return Err(AtomsError::InvalidOracle("delta must be a nonnegative number".into()));
                }
                for (i, g) in gens.iter().enumerate() {
                    let mut cs = g.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) if c.is_ascii_lowercase() => push_pair(c, i, false),
                        _ => return Err(AtomsError::InvalidOracle(format!("generator {g:?} is not one lowercase letter"))),
                    }
                }
                (Kind::Dehn { rels: Vec::new(), cache: Arc::default() }, Some(*delta))
            }
        };
        let mut o = GroupOracle { spec: spec.clone(), kind, letters, inv, part, pos, neg, delta };
        if let OracleSpec::Dehn { rels, .. } = &spec {
            let parsed: Vec<Elem> = rels.iter().map(|r| o.parse_letters(r)).collect::<Result<_>>()?;
            o.kind = Kind::Dehn { rels: symmetrize(&parsed, &o.inv), cache: Arc::default() };
        }
        Ok(o)
    }

    pub fn from_json(s: &str) -> Result<GroupOracle> {
        Self::from_spec(serde_json::from_str(s)?)
    }

    pub fn free(rank: usize) -> GroupOracle {
        Self::from_spec(OracleSpec::Free { rank }).expect("valid rank")
    }

    pub fn zn(n: usize) -> GroupOracle {
        Self::from_spec(OracleSpec::Zn { n }).expect("valid dimension")
    }

    pub fn free_product(factors: &[&str]) -> Result<GroupOracle> {
        Self::from_spec(OracleSpec::FreeProduct { factors: factors.iter().map(|s| s.to_string()).collect() })
    }

    pub fn spec(&self) -> &OracleSpec {
        &self.spec
    }

    pub fn gen_count(&self) -> usize {
        self.letters.len()
    }

    pub fn letter(&self, g: u8) -> char {
        self.letters[g as usize]
    }

    pub fn inverse_gen(&self, g: u8) -> u8 {
        self.inv[g as usize]
    }

    /// Asserted or derived hyperbolicity constant; None for ℤⁿ.
    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    /// Free products of copies of ℤ and ℤ/2: the Cayley graph is a tree.
    pub fn is_tree(&self) -> bool {
        matches!(&self.kind, Kind::Product(fs) if fs.iter().all(|f| matches!(f, Factor::Infinite | Factor::Cyclic(2))))
    }

    pub fn is_infinite(&self) -> bool {
        match &self.kind {
            Kind::Product(fs) => fs.contains(&Factor::Infinite) || fs.len() >= 2,
            Kind::Zn(_) => true,
            Kind::Dehn { .. } => true,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.spec {
            OracleSpec::Free { .. } => "free",
            OracleSpec::FreeProduct { .. } => "free_product",
            OracleSpec::Zn { .. } => "zn",
            OracleSpec::Dehn { .. } => "dehn",
        }
    }

    /// Whether the last letter of x generates a ℤ free factor.
    pub fn ends_in_free_letter(&self, x: &[u8]) -> bool {
        match (&self.kind, x.last()) {
            (Kind::Product(fs), Some(&l)) => fs[self.part[l as usize].0] == Factor::Infinite,
            _ => false,
        }
    }

    fn parse_letters(&self, s: &str) -> Result<Elem> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Vec::new());
        }
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '·' && *c != '*')
            .map(|c| {
                self.letters
                    .iter()
                    .position(|&l| l == c)
                    .map(|i| i as u8)
                    .ok_or_else(|| AtomsError::InvalidWord(format!("unknown letter {c:?} in {s:?}")))
            })
            .collect()
    }

    /// Parses a word and returns its canonical form.
    pub fn parse(&self, s: &str) -> Result<Elem> {
        Ok(self.normal_form(&self.parse_letters(s)?))
    }

    pub fn show(&self, x: &[u8]) -> String {
        if x.is_empty() {
            "1".into()
        } else {
            x.iter().map(|&g| self.letter(g)).collect()
        }
    }

    pub fn identity(&self) -> Elem {
        Vec::new()
    }

    pub fn generator(&self, g: u8) -> Elem {
        vec![g]
    }

    pub fn normal_form(&self, w: &[u8]) -> Elem {
        match &self.kind {
            Kind::Product(fs) => self.product_nf(fs, w),
            Kind::Zn(n) => self.zn_emit(&self.zn_coords(*n, w)),
            Kind::Dehn { rels, cache } => self.dehn_nf(rels, cache, w),
        }
    }

    pub fn mul(&self, a: &[u8], b: &[u8]) -> Elem {
        if b.is_empty() {
            return a.to_vec();
        }
        if a.is_empty() {
            return b.to_vec();
        }
        let mut w = Vec::with_capacity(a.len() + b.len());
        w.extend_from_slice(a);
        w.extend_from_slice(b);
        self.normal_form(&w)
    }

    pub fn inv(&self, a: &[u8]) -> Elem {
        let w: Vec<u8> = a.iter().rev().map(|&g| self.inv[g as usize]).collect();
        self.normal_form(&w)
    }

    pub fn len(&self, a: &[u8]) -> usize {
        a.len()
    }

    /// d(a, b) = |a⁻¹b|. A common word prefix cancels by left invariance.
    pub fn dist(&self, a: &[u8], b: &[u8]) -> usize {
        let k = a.iter().zip(b).take_while(|(x, y)| x == y).count();
        let (a, b) = (&a[k..], &b[k..]);
        if a.is_empty() || b.is_empty() || self.is_tree() {
            return a.len() + b.len();
        }
        if let Kind::Zn(n) = &self.kind {
            let ca = self.zn_coords(*n, a);
            let cb = self.zn_coords(*n, b);
            return ca.iter().zip(&cb).map(|(x, y)| (x - y).unsigned_abs() as usize).sum();
        }
        self.mul(&self.inv(a), b).len()
    }

    /// Whether y ∈ C(x), i.e. some geodesic from 1 to y passes through x.
    pub fn in_cone(&self, x: &[u8], y: &[u8]) -> bool {
        y.len() == x.len() + self.dist(x, y)
    }

    pub fn cone_type(&self, x: &[u8], window: usize) -> ConeType {
        if x.is_empty() {
            return ConeType::Root;
        }
        match &self.kind {
            Kind::Product(fs) => {
                let last = *x.last().expect("nonempty");
                let (f, _) = self.part[last as usize];
                let run: i64 = x.iter().rev().take_while(|&&l| self.part[l as usize].0 == f).map(|&l| self.part[l as usize].1).sum();
                match fs[f] {
                    Factor::Infinite => ConeType::Exact(vec![f as i64, run.signum()]),
                    Factor::Cyclic(_) => ConeType::Exact(vec![f as i64, run]),
                }
            }
            Kind::Zn(n) => ConeType::Exact(self.zn_coords(*n, x).iter().map(|c| c.signum()).collect()),
            Kind::Dehn { .. } => {
                let mut out = Vec::new();
                for layer in self.dehn_spheres(window).iter() {
                    for h in layer {
                        if self.mul(x, h).len() == x.len() + h.len() {
                            out.push(h.clone());
                        }
                    }
                }
                ConeType::Window(out)
            }
        }
    }

    fn product_nf(&self, fs: &[Factor], w: &[u8]) -> Elem {
        let mut st: Vec<(usize, i64)> = Vec::with_capacity(w.len());
        for &l in w {
            let (f, s) = self.part[l as usize];
            if let Some(top) = st.last_mut() {
                if top.0 == f {
                    top.1 += s;
                    if let Factor::Cyclic(m) = fs[f] {
                        top.1 = top.1.rem_euclid(m as i64);
                    }
                    if top.1 == 0 {
                        st.pop();
                    }
                    continue;
                }
            }
            let e = match fs[f] {
                Factor::Cyclic(m) => s.rem_euclid(m as i64),
                Factor::Infinite => s,
            };
            st.push((f, e));
        }
        let mut out = Vec::with_capacity(w.len());
        for (f, e) in st {
            let (letter, count) = match fs[f] {
                Factor::Infinite if e > 0 => (self.pos[f], e),
                Factor::Infinite => (self.neg[f].expect("inverse letter"), -e),
                Factor::Cyclic(m) => {
                    let m = m as i64;
                    if e <= m - e {
                        (self.pos[f], e)
                    } else {
                        (self.neg[f].expect("inverse letter"), m - e)
                    }
                }
            };
            out.extend(std::iter::repeat(letter).take(count as usize));
        }
        out
    }

    fn zn_coords(&self, n: usize, w: &[u8]) -> Vec<i64> {
        let mut c = vec![0i64; n];
        for &l in w {
            let (i, s) = self.part[l as usize];
            c[i] += s;
        }
        c
    }

    fn zn_emit(&self, c: &[i64]) -> Elem {
        let mut out = Vec::new();
        for (i, &x) in c.iter().enumerate() {
            let l = if x >= 0 { self.pos[i] } else { self.neg[i].expect("inverse letter") };
            out.extend(std::iter::repeat(l).take(x.unsigned_abs() as usize));
        }
        out
    }

    /// Coordinates of an element of ℤⁿ.
    pub fn coords(&self, x: &[u8]) -> Option<Vec<i64>> {
        match &self.kind {
            Kind::Zn(n) => Some(self.zn_coords(*n, x)),
            _ => None,
        }
    }

    fn free_reduce(&self, w: &mut Elem) {
        let mut out: Elem = Vec::with_capacity(w.len());
        for &l in w.iter() {
            if out.last() == Some(&self.inv[l as usize]) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        *w = out;
    }

    /// Free reduction followed by Dehn rewriting: a subword that is more than
    /// half of a relator is replaced by the inverse of the rest.
    fn dehn_reduce(&self, rels: &[Elem], w: &[u8]) -> Elem {
        let mut w = w.to_vec();
        'outer: loop {
            self.free_reduce(&mut w);
            for r in rels {
                let n = r.len();
                for l in (n / 2 + 1..=n).rev() {
                    let u = &r[..l];
                    if let Some(i) = w.windows(l).position(|s| s == u) {
                        let rest: Elem = r[l..].iter().rev().map(|&g| self.inv[g as usize]).collect();
                        w.splice(i..i + l, rest);
                        continue 'outer;
                    }
                }
            }
            return w;
        }
    }

    fn dehn_equal(&self, rels: &[Elem], a: &[u8], b: &[u8]) -> bool {
        let mut w: Elem = a.iter().rev().map(|&g| self.inv[g as usize]).collect();
        w.extend_from_slice(b);
        self.dehn_reduce(rels, &w).is_empty()
    }

    fn dehn_spheres(&self, radius: usize) -> Vec<Vec<Elem>> {
        let Kind::Dehn { rels, cache } = &self.kind else {
            return Vec::new();
        };
        let mut c = cache.lock().expect("dehn cache");
        if c.spheres.is_empty() {
            c.spheres.push(vec![Vec::new()]);
        }
        while c.spheres.len() <= radius {
            let j = c.spheres.len() - 1;
            let mut next: Vec<Elem> = Vec::new();
            for x in &c.spheres[j] {
                for g in 0..self.letters.len() as u8 {
                    let mut y = x.clone();
                    y.push(g);
                    let seen = |s: &Vec<Elem>| s.iter().any(|z| self.dehn_equal(rels, z, &y));
                    if seen(&next) || seen(&c.spheres[j]) || (j > 0 && seen(&c.spheres[j - 1])) {
                        continue;
                    }
                    next.push(y);
                }
            }
            c.spheres.push(next);
        }
        c.spheres[..=radius].to_vec()
    }

    /// The shortlex-least word for w, found among the spheres up to the
    /// length of its Dehn reduction.
    fn dehn_nf(&self, rels: &[Elem], _cache: &Arc<Mutex<DehnCache>>, w: &[u8]) -> Elem {
        let r = self.dehn_reduce(rels, w);
        if r.len() <= 1 {
            return r;
        }
        for layer in self.dehn_spheres(r.len()) {
            if let Some(x) = layer.iter().find(|x| self.dehn_equal(rels, x, &r)) {
                return x.clone();
            }
        }
        r
    }
}

/// All cyclic conjugates of the relators and their inverses.
fn symmetrize(rels: &[Elem], inv: &[u8]) -> Vec<Elem> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for r in rels {
        let ri: Elem = r.iter().rev().map(|&g| inv[g as usize]).collect();
        for w in [r, &ri] {
            for i in 0..w.len() {
                let mut c = w[i..].to_vec();
                c.extend_from_slice(&w[..i]);
                if seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_syllables() {
        let o = GroupOracle::free_product(&["Z/3", "Z"]).unwrap();
        assert_eq!(o.show(&o.parse("aa").unwrap()), "A");
        assert_eq!(o.show(&o.parse("aaa").unwrap()), "1");
        assert_eq!(o.show(&o.parse("abBa").unwrap()), "A");
        assert_eq!(o.delta(), Some(1.0));
    }

    #[test]
    fn dehn_surface_group() {
        // Genus-two surface group; Dehn's algorithm applies to it.
        let spec = OracleSpec::Dehn {
            gens: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            rels: vec!["abABcdCD".into()],
            delta: 2.0,
        };
        let o = GroupOracle::from_spec(spec).unwrap();
        assert_eq!(o.parse("abAB").unwrap(), o.parse("dcDC").unwrap());
        assert_eq!(o.parse("abABcdCD").unwrap(), o.identity());
        let x = o.parse("abc").unwrap();
        assert_eq!(o.mul(&x, &o.inv(&x)), o.identity());
    }
}
