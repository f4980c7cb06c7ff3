//! Finite combinatorics of higher-dimensional Δ-systems: alignment,
//! k-addability, strings, uniform systems and partition instances.
//!
//! Finite sets of ordinals are sorted, duplicate-free `Vec<usize>`s.

mod partition;
mod uniform;

pub use partition::{fit_colors, validate_partition_instance, Coloring, PartitionInstance, PartitionViolation};
pub use uniform::{
    derived_roots, find_uniform_subsystem, verify_uniform, DerivedRoots, SetFamily, UniformViolation, UniformWitness,
};

use crate::error::{Error, Result};

/// Equal order type, and every common element sits at the same position in
/// both sets.
pub fn aligned(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    a.iter().enumerate().all(|(i, x)| match b.binary_search(x) {
        Ok(j) => i == j,
        Err(_) => true,
    })
}

/// `r(a, b) = {i | a(i) = b(i)}` for aligned sets.
pub fn overlap(a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
    if !aligned(a, b) {
        return Err(Error::Contract(format!("{a:?} and {b:?} are not aligned")));
    }
    Ok((0..a.len()).filter(|&i| a[i] == b[i]).collect())
}

/// `alpha ∉ a` and exactly `k` elements of `a` lie below `alpha`.
pub fn is_k_addable(alpha: usize, a: &[usize], k: usize) -> bool {
    !a.contains(&alpha) && a.iter().filter(|&&x| x < alpha).count() == k
}

/// Sorted subsets of `x` with at most `max` elements, smallest first.
pub fn subsets_upto<T: Ord + Clone>(x: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for len in 1..=max.min(x.len()) {
        for idx in crate::complexes::increasing_tuples(x.len(), len) {
            out.push(idx.into_iter().map(|i| x[i].clone()).collect());
        }
    }
    out
}

fn insert_sorted<T: Ord + Clone>(a: &[T], x: &T) -> Vec<T> {
    let mut v = a.to_vec();
    let pos = v.binary_search(x).unwrap_or_else(|p| p);
    v.insert(pos, x.clone());
    v
}

/// All strings `⟨a_1 ⊊ … ⊊ a_m⟩` of nonempty subsets of `x`, each step adding
/// one element and `|a_m| = n`.
pub fn strings<T: Ord + Clone>(x: &[T], n: usize) -> Result<Vec<Vec<Vec<T>>>> {
    let mut x = x.to_vec();
    x.sort();
    x.dedup();
    if x.len() < n || n == 0 {
        return Err(Error::Contract(format!("strings of length {n} need at least {n} elements, got {}", x.len())));
    }
    let mut out = Vec::new();
    for start in subsets_upto(&x, n).into_iter().filter(|s| !s.is_empty()) {
        extend_strings(&x, n, vec![start], &mut out);
    }
    Ok(out)
}

fn extend_strings<T: Ord + Clone>(x: &[T], n: usize, cur: Vec<Vec<T>>, out: &mut Vec<Vec<Vec<T>>>) {
    let last = cur.last().expect("strings are nonempty");
    if last.len() == n {
        out.push(cur);
        return;
    }
    for e in x.iter().filter(|e| last.binary_search(e).is_err()) {
        let mut next = cur.clone();
        next.push(insert_sorted(last, e));
        extend_strings(x, n, next, out);
    }
}

/// Strings starting at a singleton.
pub fn maximal_strings<T: Ord + Clone>(x: &[T], n: usize) -> Result<Vec<Vec<Vec<T>>>> {
    Ok(strings(x, n)?.into_iter().filter(|s| s[0].len() == 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment() {
        assert!(aligned(&[1, 4], &[2, 4]));
        assert_eq!(overlap(&[1, 4], &[2, 4]).unwrap(), vec![1]);
        assert!(!aligned(&[1, 4], &[4, 6]));
        assert!(overlap(&[1, 4], &[4, 6]).is_err());
        assert_eq!(overlap(&[3, 5, 9], &[3, 5, 9]).unwrap(), vec![0, 1, 2]);
        assert_eq!(overlap(&[0, 1], &[5, 7]).unwrap(), Vec::<usize>::new());
        assert!(!aligned(&[1], &[1, 2]));
    }

    #[test]
    fn addability() {
        assert!(is_k_addable(5, &[3, 7], 1));
        assert!((0..4).all(|k| !is_k_addable(7, &[3, 7], k)));
        assert!(is_k_addable(2, &[3, 7], 0));
        assert!(is_k_addable(9, &[3, 7], 2));
        assert!(!is_k_addable(9, &[3, 7], 1));
    }

    #[test]
    fn strings_on_two_points() {
        let s = strings(&[0, 1], 2).unwrap();
        assert_eq!(s, vec![vec![vec![0], vec![0, 1]], vec![vec![1], vec![0, 1]], vec![vec![0, 1]]]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(&vec![vec![0, 1]]));
        assert_eq!(maximal_strings(&[0, 1], 2).unwrap(), vec![vec![vec![0], vec![0, 1]], vec![vec![1], vec![0, 1]]]);
        assert_eq!(strings(&[4, 5, 6], 1).unwrap(), vec![vec![vec![4]], vec![vec![5]], vec![vec![6]]]);
        assert!(strings(&[1], 2).is_err());
    }
}
