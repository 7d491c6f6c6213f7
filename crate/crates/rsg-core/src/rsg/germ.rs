//! Germs at rational points: the λ-map onto states periodic under
//! restriction by the period.

use num_integer::Integer;

use super::{FullRsg, RsgElement};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::thompson::RationalPoint;

/// Smallest d with τ equal to its rotation by d; τ is primitive iff d = |τ|.
fn rotation_period(t: &[usize]) -> usize {
    let n = t.len();
    (1..=n).find(|&d| n % d == 0 && (0..n).all(|i| t[i] == t[(i + d) % n])).unwrap_or(n)
}

/// Members p with dom(p) = origin(τ) that are periodic under p ↦ p|_τ,
/// together with the lcm of their periods.
pub fn periodic_states(rsg: &FullRsg, tau: &Path) -> (Vec<usize>, usize) {
    let v = tau.origin().expect("nonempty period");
    let step = |p: usize| -> usize { tau.edges().iter().fold(p, |q, &e| rsg.step(q, e)) };
    let mut out = Vec::new();
    let mut lcm = 1usize;
    for &p in &rsg.nucleus.members {
        if rsg.nucleus.states[p].dom != v {
            continue;
        }
        let mut q = step(p);
        let mut k = 1;
        while q != p && k <= rsg.nucleus.states.len() {
            q = step(q);
            k += 1;
        }
        if q == p {
            out.push(p);
            lcm = lcm.lcm(&k);
        }
    }
    (out, lcm)
}

/// Output and state of h along σ·τ^k for k = 0, 1, … until the state
/// sequence repeats. Returns (start k, outputs, states); the states from
/// index `mu` on repeat with period `lam`.
struct Orbit {
    start: usize,
    outs: Vec<Path>,
    states: Vec<usize>,
    mu: usize,
    lam: usize,
}

fn orbit(rsg: &FullRsg, h: &RsgElement, w: &RationalPoint) -> Result<Orbit> {
    let g = &rsg.graph;
    let depth = h.entries.iter().map(|e| e.dom.len()).max().unwrap_or(0);
    let plen = w.period.len();
    let start = depth.saturating_sub(w.prefix.len()).div_ceil(plen);
    let mut outs = Vec::new();
    let mut states = Vec::new();
    for k in start.. {
        let x = w.prefix_of_len(g, w.prefix.len() + k * plen);
        let (out, q) = rsg
            .local_state(h, &x)
            .ok_or_else(|| Error::OutsideDomain(format!("{} is not inside E", x.display(g))))?;
        if let Some(i) = states.iter().position(|&s| s == q) {
            let mu = i;
            let lam = states.len() - i;
            return Ok(Orbit { start, outs, states, mu, lam });
        }
        outs.push(out);
        states.push(q);
    }
    unreachable!()
}

/// h(ω) as a rational point.
pub fn image_point(rsg: &FullRsg, h: &RsgElement, w: &RationalPoint) -> Result<RationalPoint> {
    let g = &rsg.graph;
    let o = orbit(rsg, h, w)?;
    let prefix = o.outs[o.mu].clone();
    let next = {
        let x = w.prefix_of_len(g, w.prefix.len() + (o.start + o.mu + o.lam) * w.period.len());
        rsg.local_state(h, &x).expect("same entry").0
    };
    let period = next
        .strip_prefix(g, &prefix)
        .ok_or_else(|| Error::InvalidMachine("outputs along the orbit are not nested".into()))?;
    if period.is_empty() {
        return Err(Error::InvalidMachine("map collapses a periodic point".into()));
    }
    RationalPoint::new(g, prefix, period)
}

pub fn fixes(rsg: &FullRsg, h: &RsgElement, w: &RationalPoint) -> Result<bool> {
    let g = &rsg.graph;
    Ok(image_point(rsg, h, w)?.normalized(g) == w.normalized(g))
}

/// λ(h): the eventually constant value of h|_{σ·τ^{iM}}. Requires h(ω) = ω
/// and τ primitive; the result lies in the τ-periodic states.
pub fn lambda_map(rsg: &FullRsg, h: &RsgElement, w: &RationalPoint) -> Result<usize> {
    if rotation_period(w.period.edges()) != w.period.len() {
        return Err(Error::InvalidPoint("period is a proper power".into()));
    }
    if !fixes(rsg, h, w)? {
        return Err(Error::NotFixed("h does not fix the point".into()));
    }
    let (periodic, m) = periodic_states(rsg, &w.period);
    let o = orbit(rsg, h, w)?;
    // Along the cycle the state at σ·τ^k depends on k mod λ; stepping by M
    // must land on one value.
    let at = |k: usize| -> usize {
        if k < o.mu {
            o.states[k]
        } else {
            o.states[o.mu + (k - o.mu) % o.lam]
        }
    };
    // Indices in the orbit are offset by its start.
    let first = (o.start + o.mu).div_ceil(m) * m - o.start;
    let value = at(first);
    for i in 1..=o.lam {
        if at(first + i * m) != value {
            return Err(Error::InvalidMachine("restrictions along σ·τ^{iM} are not eventually constant".into()));
        }
    }
    if !periodic.contains(&value) {
        return Err(Error::InvalidMachine(format!("λ value {} is not τ-periodic", rsg.state_name(value))));
    }
    Ok(value)
}

/// a and b agree on the cone at σ·τ^k for some k ≤ depth: same output
/// prefix and same state there.
pub fn agree_near(rsg: &FullRsg, a: &RsgElement, b: &RsgElement, w: &RationalPoint, depth: usize) -> bool {
    let g = &rsg.graph;
    (0..=depth).any(|k| {
        let x = w.prefix_of_len(g, w.prefix.len() + k * w.period.len());
        matches!((rsg.local_state(a, &x), rsg.local_state(b, &x)), (Some(p), Some(q)) if p == q)
    })
}

#[cfg(test)]
mod tests {
    use super::rotation_period;

    #[test]
    fn proper_powers() {
        assert_eq!(rotation_period(&[0, 1, 0, 1]), 2);
        assert_eq!(rotation_period(&[0, 1, 1]), 3);
        assert_eq!(rotation_period(&[2, 2, 2]), 1);
    }
}
