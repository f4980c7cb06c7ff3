//! Formal sums of tuples with integer coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::deltasys::strings;
use crate::error::{Error, Result};

/// An element of the free abelian group on finite tuples, the empty tuple
/// included. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FormalExpr<K: Ord> {
    terms: BTreeMap<Vec<K>, BigInt>,
}

impl<K: Ord> Default for FormalExpr<K> {
    fn default() -> Self {
        FormalExpr { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> FormalExpr<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `e(tuple)`.
    pub fn basis(tuple: Vec<K>) -> Self {
        Self::term(tuple, BigInt::one())
    }

    pub fn term(tuple: Vec<K>, coefficient: BigInt) -> Self {
        let mut x = Self::zero();
        x.add_term(tuple, coefficient);
        x
    }

    pub fn add_term(&mut self, tuple: Vec<K>, coefficient: BigInt) {
        let c = self.terms.entry(tuple).or_insert_with(BigInt::zero);
        *c += coefficient;
        if c.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<K>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, tuple: &[K]) -> BigInt {
        self.terms.get(tuple).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common tuple length, if every term has the same one.
    pub fn homogeneous_length(&self) -> Option<usize> {
        let mut lens = self.terms.keys().map(Vec::len);
        let first = lens.next()?;
        lens.all(|l| l == first).then_some(first)
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FormalExpr {
            terms: self.terms.iter().map(|(t, v)| (t.clone(), v * c)).collect(),
        }
    }
}

impl<K: Ord + Clone> Add for &FormalExpr<K> {
    type Output = FormalExpr<K>;

    fn add(self, rhs: &FormalExpr<K>) -> FormalExpr<K> {
        let mut out = self.clone();
        for (t, c) in &rhs.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }
}

impl<K: Ord + Clone> Sub for &FormalExpr<K> {
    type Output = FormalExpr<K>;

    fn sub(self, rhs: &FormalExpr<K>) -> FormalExpr<K> {
        self + &-rhs
    }
}

impl<K: Ord + Clone> Neg for &FormalExpr<K> {
    type Output = FormalExpr<K>;

    fn neg(self) -> FormalExpr<K> {
        self.scaled(&-BigInt::one())
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for FormalExpr<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·e{t:?}")?;
        }
        Ok(())
    }
}

fn sign(i: usize) -> BigInt {
    if i % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `d e(f_0, …, f_s) = Σ (−1)^i e(f_0, …, f̂_i, …, f_s)`, so `d e(f) = e(∅)`
/// and `d e(∅) = 0`.
pub fn formal_d<K: Ord + Clone>(x: &FormalExpr<K>) -> FormalExpr<K> {
    let mut out = FormalExpr::zero();
    for (t, c) in &x.terms {
        for i in 0..t.len() {
            let mut face = t.clone();
            face.remove(i);
            out.add_term(face, c * sign(i));
        }
    }
    out
}

/// Append `g` to every tuple.
pub fn formal_star<K: Ord + Clone>(x: &FormalExpr<K>, g: &K) -> FormalExpr<K> {
    let mut out = FormalExpr::zero();
    for (t, c) in &x.terms {
        let mut t = t.clone();
        t.push(g.clone());
        out.add_term(t, c.clone());
    }
    out
}

/// `d(x * g) = d(x) * g + (−1)^s x` for `x` of pure tuple length `s`.
pub fn star_relation_check<K: Ord + Clone>(x: &FormalExpr<K>, g: &K) -> Result<bool> {
    let s = match x.homogeneous_length() {
        Some(s) => s,
        None if x.is_zero() => 0,
        None => return Err(Error::Contract("star relation needs a homogeneous expression".into())),
    };
    let lhs = formal_d(&formal_star(x, g));
    let rhs = &formal_star(&formal_d(x), g) + &x.scaled(&sign(s));
    Ok(lhs == rhs)
}

/// The sequences `A_s`, `C_s`, `S_s` of the extraction recursion, each keyed
/// by the subsequence of `τ` it was evaluated at: `A_{|σ|}(σ)` for every
/// nonempty `σ`, and `C_{|σ|−1}(σ)`, `S_{|σ|−1}(σ)` for `|σ| ≥ 2`.
#[derive(Clone, Debug)]
pub struct Recursion<K: Ord> {
    pub a: BTreeMap<Vec<K>, FormalExpr<K>>,
    pub c: BTreeMap<Vec<K>, FormalExpr<K>>,
    pub s: BTreeMap<Vec<K>, FormalExpr<K>>,
}

fn subsequences<K: Clone>(tau: &[K], len: usize) -> Vec<Vec<K>> {
    crate::complexes::increasing_tuples(tau.len(), len)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| tau[i].clone()).collect())
        .collect()
}

fn as_set<K: Ord + Clone>(t: &[K]) -> Vec<K> {
    let mut v = t.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Run the recursion on every subsequence of `τ`:
///
/// * `A_1 = 0`;
/// * `C_s(σ) = e(σ) − Σ_{i<s+1} (−1)^i A_s(σ^i)` for `|σ| = s + 1`;
/// * `S_s(σ) = d(C_s(σ) * F(σ))` and `A_{s+1}(σ) = (−1)^{s+1} C_s(σ) * F(σ)`.
///
/// `selector` maps a sorted set of entries of `τ` to `F(σ)`.
pub fn build_recursion<K: Ord + Clone>(tau: &[K], selector: impl Fn(&[K]) -> Option<K>) -> Result<Recursion<K>> {
    if tau.is_empty() || as_set(tau).len() != tau.len() {
        return Err(Error::Contract("the recursion needs a nonempty tuple of distinct entries".into()));
    }
    let mut rec = Recursion {
        a: BTreeMap::new(),
        c: BTreeMap::new(),
        s: BTreeMap::new(),
    };
    for t in subsequences(tau, 1) {
        rec.a.insert(t, FormalExpr::zero());
    }
    for len in 2..=tau.len() {
        let s = len - 1;
        for sigma in subsequences(tau, len) {
            let mut c = FormalExpr::basis(sigma.clone());
            for i in 0..len {
                let mut face = sigma.clone();
                face.remove(i);
                c = &c - &rec.a[&face].scaled(&sign(i));
            }
            let f = selector(&as_set(&sigma))
                .ok_or_else(|| Error::Contract(format!("no selector value on a set of size {len}")))?;
            let star = formal_star(&c, &f);
            rec.s.insert(sigma.clone(), formal_d(&star));
            rec.a.insert(sigma.clone(), star.scaled(&sign(s + 1)));
            rec.c.insert(sigma, c);
        }
    }
    Ok(rec)
}

/// `S_s(σ) = (−1)^{s+1} d(A_{s+1}(σ))` at every stage.
pub fn recursion_identity_holds<K: Ord + Clone>(rec: &Recursion<K>) -> bool {
    rec.s.iter().all(|(sigma, s)| *s == formal_d(&rec.a[sigma]).scaled(&sign(sigma.len())))
}

/// Every basis tuple of `C_s(σ) − (−1)^{s+1} S_s(σ)` has as its set of
/// entries `a_1 ∪ ⋃_{i≥2} F(a_i)` for some string ending at `σ`.
pub fn telescoping_check<K: Ord + Clone>(
    rec: &Recursion<K>,
    sigma: &[K],
    selector: impl Fn(&[K]) -> Option<K>,
) -> Result<bool> {
    let (Some(c), Some(s)) = (rec.c.get(sigma), rec.s.get(sigma)) else {
        return Err(Error::Contract("the recursion was not evaluated at this tuple".into()));
    };
    let residual = c - &s.scaled(&sign(sigma.len()));
    let mut unions: BTreeSet<Vec<K>> = BTreeSet::new();
    let full = as_set(sigma);
    for string in strings(&full, full.len())? {
        let mut u: BTreeSet<K> = string[0].iter().cloned().collect();
        for a in &string[1..] {
            u.insert(selector(a).ok_or_else(|| Error::Contract("missing selector value".into()))?);
        }
        unions.insert(u.into_iter().collect());
    }
    let ok = residual.terms().all(|(t, _)| unions.contains(&as_set(t)));
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(t: &[u32]) -> FormalExpr<u32> {
        FormalExpr::basis(t.to_vec())
    }

    #[test]
    fn differential_conventions() {
        assert_eq!(formal_d(&e(&[0, 1])), &e(&[1]) - &e(&[0]));
        assert_eq!(formal_d(&e(&[7])), e(&[]));
        assert!(formal_d(&e(&[])).is_zero());
        assert!(formal_d(&formal_d(&e(&[0, 1, 2]))).is_zero());
        assert_eq!(formal_star(&e(&[]), &5), e(&[5]));
        let x = &e(&[1]).scaled(&2.into()) - &e(&[3]);
        assert_eq!(formal_star(&x, &9), &e(&[1, 9]).scaled(&2.into()) - &e(&[3, 9]));
    }

    #[test]
    fn star_relation_small_cases() {
        assert!(star_relation_check(&e(&[0]), &1).unwrap());
        assert!(star_relation_check(&e(&[]), &1).unwrap());
        assert!(star_relation_check(&e(&[0, 0]), &0).unwrap());
        assert!(star_relation_check(&(&e(&[0]) + &e(&[1, 2])), &3).is_err());
    }

    #[test]
    fn recursion_on_two_and_three_points() {
        // F(σ) = 100 + (sum of σ) keeps the selector values distinct.
        let sel = |s: &[u32]| Some(if s.len() == 1 { s[0] } else { 100 + s.iter().sum::<u32>() });
        let rec = build_recursion(&[1, 2], sel).unwrap();
        assert!(rec.a[&vec![1]].is_zero());
        assert_eq!(rec.c[&vec![1, 2]], e(&[1, 2]));
        assert_eq!(rec.a[&vec![1, 2]], e(&[1, 2, 103]));
        assert!(recursion_identity_holds(&rec));
        assert!(telescoping_check(&rec, &[1, 2], sel).unwrap());
        let residual = &rec.c[&vec![1, 2]] - &rec.s[&vec![1, 2]];
        assert_eq!(residual, &e(&[1, 103]) - &e(&[2, 103]));

        let rec = build_recursion(&[1, 2, 4], sel).unwrap();
        assert!(recursion_identity_holds(&rec));
        for sigma in [vec![1, 2], vec![1, 4], vec![2, 4], vec![1, 2, 4]] {
            assert!(telescoping_check(&rec, &sigma, sel).unwrap());
        }
        assert!(build_recursion(&[1, 1], sel).is_err());
    }
}
