use std::collections::BTreeMap;

use super::{is_k_addable, overlap};
use crate::complexes::increasing_tuples;
use crate::error::{Error, Result};

/// `b ↦ u_b` on increasing `n`-tuples.
pub type SetFamily = BTreeMap<Vec<usize>, Vec<usize>>;

/// The order type `ρ` and the root templates `r_m ⊆ ρ`, keyed by the
/// overlap pattern `m ⊆ {0, …, n−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformWitness {
    pub rho: usize,
    pub roots: BTreeMap<Vec<usize>, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniformViolation {
    TooFewElements { size: usize, n: usize },
    Missing { b: Vec<usize> },
    OrderType { b: Vec<usize>, expected: usize, found: usize },
    NotAligned { a: Vec<usize>, b: Vec<usize> },
    RootMismatch { a: Vec<usize>, b: Vec<usize>, pattern: Vec<usize>, expected: Vec<usize>, found: Vec<usize> },
    NotMeetClosed { m0: Vec<usize>, m1: Vec<usize> },
}

fn tuples_of(h: &[usize], n: usize) -> Vec<Vec<usize>> {
    increasing_tuples(h.len(), n)
        .into_iter()
        .map(|t| t.into_iter().map(|i| h[i]).collect())
        .collect()
}

fn normalized(h: &[usize]) -> Vec<usize> {
    let mut h = h.to_vec();
    h.sort_unstable();
    h.dedup();
    h
}

fn pattern_subsets(n: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect()
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|x| b.binary_search(x).is_ok()).copied().collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Conditions 1 and 2 on every aligned pair; returns `ρ` and the templates
/// of the overlap patterns that occur.
#[allow(clippy::type_complexity)]
fn scan(h: &[usize], n: usize, u: &SetFamily) -> Result<(usize, BTreeMap<Vec<usize>, Vec<usize>>), UniformViolation> {
    let bs = tuples_of(h, n);
    let mut us = Vec::with_capacity(bs.len());
    for b in &bs {
        let ub = u.get(b).ok_or_else(|| UniformViolation::Missing { b: b.clone() })?;
        us.push(normalized(ub));
    }
    let rho = us.first().map_or(0, Vec::len);
    if let Some((b, ub)) = bs.iter().zip(&us).find(|(_, ub)| ub.len() != rho) {
        return Err(UniformViolation::OrderType {
            b: b.clone(),
            expected: rho,
            found: ub.len(),
        });
    }
    let mut roots: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for i in 0..bs.len() {
        for j in i..bs.len() {
            let Ok(pattern) = overlap(&bs[i], &bs[j]) else { continue };
            let Ok(found) = overlap(&us[i], &us[j]) else {
                return Err(UniformViolation::NotAligned {
                    a: bs[i].clone(),
                    b: bs[j].clone(),
                });
            };
            match roots.get(&pattern) {
                Some(expected) if *expected != found => {
                    return Err(UniformViolation::RootMismatch {
                        a: bs[i].clone(),
                        b: bs[j].clone(),
                        pattern,
                        expected: expected.clone(),
                        found,
                    })
                }
                Some(_) => {}
                None => {
                    roots.insert(pattern, found);
                }
            }
        }
    }
    Ok((rho, roots))
}

/// Check the three defining conditions on `⟨u_b | b ∈ [H]^n⟩`.
///
/// Templates are read off the aligned pairs. A pattern that no pair of `H`
/// realizes gets the intersection of the templates of its realized
/// supersets, which is the only choice compatible with condition 3 when the
/// realized patterns are closed under intersection.
pub fn verify_uniform(h: &[usize], n: usize, u: &SetFamily) -> Result<UniformWitness, UniformViolation> {
    let h = normalized(h);
    if n == 0 || h.len() < n {
        return Err(UniformViolation::TooFewElements { size: h.len(), n });
    }
    let (rho, realized) = scan(&h, n, u)?;
    let mut roots = BTreeMap::new();
    for m in pattern_subsets(n) {
        let root = match realized.get(&m) {
            Some(r) => r.clone(),
            None => realized
                .iter()
                .filter(|(p, _)| is_subset(&m, p))
                .map(|(_, r)| r.clone())
                .reduce(|a, b| intersect(&a, &b))
                .expect("the full pattern is realized by b = b"),
        };
        roots.insert(m, root);
    }
    for (m0, r0) in &roots {
        for (m1, r1) in &roots {
            if roots[&intersect(m0, m1)] != intersect(r0, r1) {
                return Err(UniformViolation::NotMeetClosed {
                    m0: m0.clone(),
                    m1: m1.clone(),
                });
            }
        }
    }
    Ok(UniformWitness { rho, roots })
}

/// The derived roots `u_{a,k}` and `u_a`, with the first failure of each
/// conclusion found by exhaustive checking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivedRoots {
    /// `(a, k) ↦ u_{a,k}` for `|a| < n` whenever some `b` realizes it.
    pub by_k: BTreeMap<(Vec<usize>, usize), Vec<usize>>,
    /// `a ↦ u_a`, including `u_b` itself for `|b| = n`.
    pub by_set: BTreeMap<Vec<usize>, Vec<usize>>,
    /// Two choices of `b` giving different `u_{a,k}`: `(a, k, b, b')`.
    pub choice_violation: Option<(Vec<usize>, usize, Vec<usize>, Vec<usize>)>,
    /// `k`-addable `β ≠ β'` with `u_{a∪{β}} ∩ u_{a∪{β'}} ≠ u_{a,k}`.
    pub root_violation: Option<(Vec<usize>, usize, usize, usize)>,
}

impl DerivedRoots {
    pub fn holds(&self) -> bool {
        self.choice_violation.is_none() && self.root_violation.is_none()
    }
}

/// `b ∈ [H]^n` with `b[(m+1) ∖ {k}] = a`, i.e. `b(k)` is `k`-addable for `a`
/// and the rest of `b` lies above `a`.
fn realizers<'a>(bs: &'a [Vec<usize>], a: &'a [usize], k: usize) -> impl Iterator<Item = &'a Vec<usize>> + 'a {
    let m = a.len();
    bs.iter().filter(move |b| {
        (0..=m).filter(|&j| j != k).zip(a).all(|(j, &x)| b[j] == x) && is_k_addable(b[k], a, k)
    })
}

pub fn derived_roots(h: &[usize], n: usize, u: &SetFamily, witness: &UniformWitness) -> Result<DerivedRoots> {
    let h = normalized(h);
    if h.len() < 2 * n {
        return Err(Error::Hypothesis(format!(
            "derived roots need at least {} elements above any set, got |H| = {}",
            2 * n,
            h.len()
        )));
    }
    let bs = tuples_of(&h, n);
    let ub = |b: &Vec<usize>| normalized(&u[b]);
    let mut out = DerivedRoots::default();
    for m in 0..n {
        let template = |k: usize| -> Vec<usize> { (0..=m).filter(|&j| j != k).collect() };
        for a in tuples_of(&h, m) {
            for k in 0..=m {
                let r = &witness.roots[&template(k)];
                let mut first: Option<(&Vec<usize>, Vec<usize>)> = None;
                for b in realizers(&bs, &a, k) {
                    let ubv = ub(b);
                    let v: Vec<usize> = r.iter().map(|&i| ubv[i]).collect();
                    match &first {
                        None => first = Some((b, v)),
                        Some((b0, v0)) => {
                            if *v0 != v && out.choice_violation.is_none() {
                                out.choice_violation = Some((a.clone(), k, (*b0).clone(), b.clone()));
                            }
                        }
                    }
                }
                if let Some((_, v)) = first {
                    if k == m {
                        out.by_set.insert(a.clone(), v.clone());
                    }
                    out.by_k.insert((a.clone(), k), v);
                }
            }
        }
    }
    for b in &bs {
        out.by_set.insert(b.clone(), ub(b));
    }
    for ((a, k), root) in &out.by_k {
        let petals: Vec<(usize, &Vec<usize>)> = h
            .iter()
            .filter(|&&beta| is_k_addable(beta, a, *k))
            .filter_map(|&beta| {
                let mut s = a.clone();
                s.insert(*k, beta);
                out.by_set.get(&s).map(|p| (beta, p))
            })
            .collect();
        for (i, (b0, p0)) in petals.iter().enumerate() {
            for (b1, p1) in &petals[i + 1..] {
                if intersect(p0, p1) != *root && out.root_violation.is_none() {
                    out.root_violation = Some((a.clone(), *k, *b0, *b1));
                }
            }
        }
    }
    Ok(out)
}

/// Lexicographically first `H ⊆ {0, …, μ−1}` of size `target` on which the
/// colouring is constant and `u` is uniform. `None` only means the search
/// found nothing: finite search cannot certify absence of the structures
/// the infinitary statement promises.
pub fn find_uniform_subsystem(
    mu: usize,
    n: usize,
    color: &BTreeMap<Vec<usize>, usize>,
    u: &SetFamily,
    target: usize,
) -> Option<Vec<usize>> {
    if n == 0 || target < n || target > mu {
        return None;
    }
    let mut cur = Vec::new();
    search(mu, n, color, u, target, &mut cur, None)
}

fn search(
    mu: usize,
    n: usize,
    color: &BTreeMap<Vec<usize>, usize>,
    u: &SetFamily,
    target: usize,
    cur: &mut Vec<usize>,
    reference: Option<usize>,
) -> Option<Vec<usize>> {
    if cur.len() == target {
        return verify_uniform(cur, n, u).is_ok().then(|| cur.clone());
    }
    let start = cur.last().map_or(0, |&x| x + 1);
    for x in start..mu {
        if mu - x < target - cur.len() {
            break;
        }
        cur.push(x);
        let mut reference = reference;
        let mut ok = true;
        if cur.len() >= n {
            let prefix = &cur[..cur.len() - 1];
            for t in increasing_tuples(prefix.len(), n - 1) {
                let mut b: Vec<usize> = t.into_iter().map(|i| prefix[i]).collect();
                b.push(x);
                match (color.get(&b), reference) {
                    (None, _) => ok = false,
                    (Some(&c), None) => reference = Some(c),
                    (Some(&c), Some(r)) => ok &= c == r,
                }
                if !ok {
                    break;
                }
            }
            ok = ok && scan(cur, n, u).is_ok();
        }
        if ok {
            if let Some(found) = search(mu, n, color, u, target, cur, reference) {
                return Some(found);
            }
        }
        cur.pop();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(h: &[usize], n: usize, f: impl Fn(&[usize]) -> Vec<usize>) -> SetFamily {
        tuples_of(h, n).into_iter().map(|b| { let v = f(&b); (b, v) }).collect()
    }

    #[test]
    fn constant_family() {
        let h = [0, 1, 2, 3, 4];
        let u = family(&h, 2, |_| vec![10, 20, 30]);
        let w = verify_uniform(&h, 2, &u).unwrap();
        assert_eq!(w.rho, 3);
        assert!(w.roots.values().all(|r| *r == vec![0, 1, 2]));
        let d = derived_roots(&h, 2, &u, &w).unwrap();
        assert!(d.holds());
        assert!(d.by_k.values().all(|r| *r == vec![10, 20, 30]));
    }

    #[test]
    fn classical_delta_system() {
        let h = [0, 1, 2, 3];
        let u = family(&h, 1, |b| vec![100 + 2 * b[0], 101 + 2 * b[0]]);
        let w = verify_uniform(&h, 1, &u).unwrap();
        assert_eq!(w.roots[&vec![]], Vec::<usize>::new());
        assert_eq!(w.roots[&vec![0]], vec![0, 1]);
    }

    #[test]
    fn violations() {
        let h = [0, 1, 2];
        let mut u = family(&h, 1, |b| vec![b[0]]);
        assert!(verify_uniform(&h, 1, &u).is_ok());
        u.insert(vec![2], vec![7, 8]);
        assert!(matches!(verify_uniform(&h, 1, &u), Err(UniformViolation::OrderType { .. })));
        u.insert(vec![2], vec![0]);
        assert!(matches!(verify_uniform(&h, 1, &u), Err(UniformViolation::RootMismatch { .. })));
        assert_eq!(verify_uniform(&h, 4, &u), Err(UniformViolation::TooFewElements { size: 3, n: 4 }));
        let w = verify_uniform(&[0, 1], 1, &u).unwrap();
        assert!(derived_roots(&[0, 1], 2, &u, &w).is_err());
    }

    #[test]
    fn subsystem_search() {
        let mu = 6;
        // Colour by parity of the smallest element; u is constant.
        let color: BTreeMap<Vec<usize>, usize> = tuples_of(&(0..mu).collect::<Vec<_>>(), 2)
            .into_iter()
            .map(|b| { let c = b[0] % 2; (b, c) })
            .collect();
        let u = family(&(0..mu).collect::<Vec<_>>(), 2, |_| vec![1]);
        let found = find_uniform_subsystem(mu, 2, &color, &u, 3).unwrap();
        assert_eq!(found, vec![0, 2, 3]);
        let distinct: BTreeMap<Vec<usize>, usize> = color.keys().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        assert_eq!(find_uniform_subsystem(mu, 2, &distinct, &u, 3), None);
        assert_eq!(find_uniform_subsystem(mu, 2, &distinct, &u, 2), Some(vec![0, 1]));
    }
}
