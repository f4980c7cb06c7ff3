//! Reference computations written independently of the library, kept
//! deliberately naive.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rank and non-unit invariant factors by textbook Smith reduction.
pub fn smith(mut a: Vec<Vec<BigInt>>) -> (usize, Vec<BigInt>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry of the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let p = a[t][t].clone();
        let mut dirty = false;
        for i in t + 1..rows {
            let q = a[i][t].div_floor(&p);
            if !q.is_zero() {
                for j in t..cols {
                    let v = &a[t][j] * &q;
                    a[i][j] -= v;
                }
            }
            dirty |= !a[i][t].is_zero();
        }
        for j in t + 1..cols {
            let q = a[t][j].div_floor(&p);
            if !q.is_zero() {
                for i in t..rows {
                    let v = &a[i][t] * &q;
                    a[i][j] -= v;
                }
            }
            dirty |= !a[t][j].is_zero();
        }
        if dirty {
            continue;
        }
        // The pivot must divide the rest; otherwise fold a row in.
        if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &p).is_zero())) {
            for j in t..cols {
                let v = a[i][j].clone();
                a[t][j] += v;
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    let rank = diag.len();
    (rank, diag.into_iter().filter(|d| !d.is_one()).collect())
}

pub fn rational_rank(mut a: Vec<Vec<BigRational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in 0..cols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// `(free rank, torsion)` of `ker d_next / im d_prev` with `dim` the middle
/// dimension.
pub fn int_cohomology(d_prev: Vec<Vec<BigInt>>, d_next: Vec<Vec<BigInt>>, dim: usize) -> (usize, Vec<BigInt>) {
    let (r_prev, torsion) = smith(d_prev);
    let (r_next, _) = smith(d_next);
    (dim - r_next - r_prev, torsion)
}

pub fn rat_cohomology(d_prev: Vec<Vec<BigRational>>, d_next: Vec<Vec<BigRational>>, dim: usize) -> usize {
    dim - rational_rank(d_next) - rational_rank(d_prev)
}

/// `d(t) = Σ (−1)^i t with entry i removed`, through a hash map.
pub fn formal_d(x: &[(Vec<u8>, i64)]) -> Vec<(Vec<u8>, i64)> {
    let mut out: HashMap<Vec<u8>, i64> = HashMap::new();
    for (t, c) in x {
        for i in 0..t.len() {
            let mut f = t.clone();
            f.remove(i);
            *out.entry(f).or_default() += if i % 2 == 0 { *c } else { -c };
        }
    }
    let mut v: Vec<_> = out.into_iter().filter(|(_, c)| *c != 0).collect();
    v.sort();
    v
}

pub fn one() -> BigInt {
    BigInt::one()
}
