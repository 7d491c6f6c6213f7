//! Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

/// `left · m · right = diagonal(diag)` with `left`, `right` unimodular and
/// each invariant factor dividing the next (zeros last).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub left: Matrix,
    pub right: Matrix,
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn from_i64(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn smith_normal_form(m: &Matrix) -> Smith {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a = m.clone();
    let mut left = identity(rows);
    let mut right = identity(cols);
    let steps = rows.min(cols);
    'outer: for t in 0..steps {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            a.swap(t, pi);
            left.swap(t, pi);
            if pj != t {
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                for row in right.iter_mut() {
                    row.swap(t, pj);
                }
            }
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_sub(&mut a, i, t, &q);
                row_sub(&mut left, i, t, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_sub(&mut a, j, t, &q);
                col_sub(&mut right, j, t, &q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let mut bad = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_sub(&mut a, t, i, &minus_one);
                    row_sub(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in left[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    let diag = (0..steps).map(|i| a[i][i].clone()).collect();
    Smith { diag, left, right }
}

fn row_sub(a: &mut Matrix, target: usize, source: usize, q: &BigInt) {
    let src = a[source].clone();
    for (x, s) in a[target].iter_mut().zip(src.iter()) {
        *x -= q * s;
    }
}

fn col_sub(a: &mut Matrix, target: usize, source: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let s = row[source].clone();
        row[target] -= q * s;
    }
}

impl Smith {
    /// Recomputes `left · m · right` and compares it with the stored diagonal.
    pub fn verify(&self, m: &Matrix) -> bool {
        let p = mul(&mul(&self.left, m), &self.right);
        for (i, row) in p.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let expected = if i == j && i < self.diag.len() { self.diag[i].clone() } else { BigInt::zero() };
                if *x != expected {
                    return false;
                }
            }
        }
        let nz: Vec<&BigInt> = self.diag.iter().filter(|d| !d.is_zero()).collect();
        let zeros_last = self.diag.iter().skip_while(|d| !d.is_zero()).all(|d| d.is_zero());
        zeros_last && nz.windows(2).all(|w| (w[1] % w[0]).is_zero())
    }
}
