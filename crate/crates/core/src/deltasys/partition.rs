use std::collections::{BTreeMap, BTreeSet};

use super::{strings, subsets_upto};
use crate::omega::IndexFunction;

/// A colouring of increasing tuples of point positions by column sets.
pub type Coloring = BTreeMap<Vec<usize>, BTreeSet<usize>>;

/// The data of a partition-principle conclusion on a finite ground set.
///
/// Subsets of `A` are written as sorted vectors of positions into
/// `points`, so a string union `a_1 ∪ ⋃ F_α(a_i)` is again a set of
/// positions. Colours are column sets; `beta[a]` plays the role of `T_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionInstance {
    pub kappa: usize,
    pub points: Vec<IndexFunction>,
    pub a: Vec<usize>,
    pub n: usize,
    /// Exceptional column sets; missing entries are empty.
    pub s: BTreeMap<Vec<usize>, BTreeSet<usize>>,
    /// `(α, a) ↦ F_α(a)` for `α ∉ S(∅)` and nonempty `a`.
    pub f: BTreeMap<(usize, Vec<usize>), usize>,
    pub beta: BTreeMap<Vec<usize>, BTreeSet<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionViolation {
    Shape(String),
    MissingSelector { alpha: usize, set: Vec<usize> },
    MissingColor { set: Vec<usize> },
    /// `F_α({t}) ≠ t`.
    SingletonMoved { alpha: usize, element: usize, image: usize },
    /// `F_α(τ)(α) ≥ F_α(σ)(α)` for `τ ⊊ σ`.
    NotIncreasing { alpha: usize, tau: Vec<usize>, sigma: Vec<usize> },
    /// The string union has a colour other than `β_{a_1}` (`None` when the
    /// union has fewer than `n` elements or is uncoloured).
    ColorMismatch {
        alpha: usize,
        string: Vec<Vec<usize>>,
        union: Vec<usize>,
        found: Option<BTreeSet<usize>>,
        expected: BTreeSet<usize>,
    },
}

impl PartitionInstance {
    pub fn exceptional(&self, a: &[usize]) -> BTreeSet<usize> {
        self.s.get(a).cloned().unwrap_or_default()
    }

    pub fn selector(&self, alpha: usize, a: &[usize]) -> Option<usize> {
        self.f.get(&(alpha, a.to_vec())).copied()
    }

    /// Columns `α ∉ S(∅)`, where the selectors are defined.
    pub fn admissible_columns(&self) -> Vec<usize> {
        let s0 = self.exceptional(&[]);
        (0..self.kappa).filter(|a| !s0.contains(a)).collect()
    }

    /// `S(∅) ∪ ⋃_a (S_a ∪ β_a)`.
    pub fn aggregate(&self) -> BTreeSet<usize> {
        self.s.values().chain(self.beta.values()).flatten().copied().collect()
    }

    /// `a_1 ∪ ⋃_{i ≥ 2} F_α(a_i)`, or `None` if a selector is missing.
    pub fn string_union(&self, alpha: usize, string: &[Vec<usize>]) -> Option<Vec<usize>> {
        let mut u: BTreeSet<usize> = string[0].iter().copied().collect();
        for a in &string[1..] {
            u.insert(self.selector(alpha, a)?);
        }
        Some(u.into_iter().collect())
    }

    fn shape(&self) -> Result<(), String> {
        if self.n == 0 {
            return Err("n must be positive".into());
        }
        if let Some(p) = self.points.iter().find(|p| p.len() != self.kappa) {
            return Err(format!("point {p} does not have {} coordinates", self.kappa));
        }
        if self.a.windows(2).any(|w| w[0] >= w[1]) || self.a.last().is_some_and(|&x| x >= self.points.len()) {
            return Err("A must be an increasing list of point positions".into());
        }
        if self.a.len() < self.n {
            return Err(format!("A has {} elements, fewer than n = {}", self.a.len(), self.n));
        }
        let cols = self.s.values().chain(self.beta.values()).flatten();
        if let Some(c) = cols.clone().find(|&&c| c >= self.kappa) {
            return Err(format!("column {c} is out of range"));
        }
        if let Some(((alpha, set), v)) = self.f.iter().find(|((a, _), v)| *a >= self.kappa || **v >= self.points.len()) {
            return Err(format!("selector F_{alpha}({set:?}) = {v} is out of range"));
        }
        Ok(())
    }
}

/// Check the three conclusions, in order, for every admissible column and
/// every string on `[A]^{≤n}`; the first violation is returned.
pub fn validate_partition_instance(p: &PartitionInstance, c: &Coloring) -> Result<(), PartitionViolation> {
    p.shape().map_err(PartitionViolation::Shape)?;
    let cols = p.admissible_columns();
    for &alpha in &cols {
        for &t in &p.a {
            let image = p.selector(alpha, &[t]).ok_or(PartitionViolation::MissingSelector { alpha, set: vec![t] })?;
            if image != t {
                return Err(PartitionViolation::SingletonMoved { alpha, element: t, image });
            }
        }
    }
    let sets: Vec<Vec<usize>> = subsets_upto(&p.a, p.n).into_iter().filter(|s| !s.is_empty()).collect();
    for &alpha in &cols {
        for sigma in &sets {
            let top = p
                .selector(alpha, sigma)
                .ok_or_else(|| PartitionViolation::MissingSelector { alpha, set: sigma.clone() })?;
            // Strictness along one-element removals gives it for all τ ⊊ σ.
            for i in 0..sigma.len() {
                let mut tau = sigma.clone();
                tau.remove(i);
                if tau.is_empty() {
                    continue;
                }
                let low = p
                    .selector(alpha, &tau)
                    .ok_or_else(|| PartitionViolation::MissingSelector { alpha, set: tau.clone() })?;
                if p.points[low].0[alpha] >= p.points[top].0[alpha] {
                    return Err(PartitionViolation::NotIncreasing {
                        alpha,
                        tau,
                        sigma: sigma.clone(),
                    });
                }
            }
        }
    }
    let all = strings(&p.a, p.n).map_err(|e| PartitionViolation::Shape(e.to_string()))?;
    for string in &all {
        let a1 = &string[0];
        let expected = p
            .beta
            .get(a1)
            .ok_or_else(|| PartitionViolation::MissingColor { set: a1.clone() })?;
        let skip = p.exceptional(a1);
        for &alpha in cols.iter().filter(|a| !skip.contains(a)) {
            let union = p.string_union(alpha, string).expect("selectors checked above");
            let found = if union.len() == p.n { c.get(&union) } else { None };
            if found != Some(expected) {
                return Err(PartitionViolation::ColorMismatch {
                    alpha,
                    string: string.clone(),
                    union,
                    found: found.cloned(),
                    expected: expected.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Given `A`, `n` and the selectors, choose colours and exceptional sets so
/// that the instance validates against `c`: `β_{a_1}` is the most frequent
/// colour of the string unions starting at `a_1`, and every column on
/// which some such union disagrees with it goes into `S_{a_1}`. `S(∅)` is
/// kept as given.
pub fn fit_colors(p: &mut PartitionInstance, c: &Coloring) -> Result<(), PartitionViolation> {
    p.shape().map_err(PartitionViolation::Shape)?;
    let all = strings(&p.a, p.n).map_err(|e| PartitionViolation::Shape(e.to_string()))?;
    let cols = p.admissible_columns();
    let mut by_start: BTreeMap<Vec<usize>, Vec<(usize, Option<BTreeSet<usize>>)>> = BTreeMap::new();
    for string in &all {
        for &alpha in &cols {
            let union = p
                .string_union(alpha, string)
                .ok_or_else(|| PartitionViolation::MissingSelector { alpha, set: string[0].clone() })?;
            let color = if union.len() == p.n { c.get(&union).cloned() } else { None };
            by_start.entry(string[0].clone()).or_default().push((alpha, color));
        }
    }
    for (a1, seen) in by_start {
        let mut counts: BTreeMap<&BTreeSet<usize>, usize> = BTreeMap::new();
        for color in seen.iter().filter_map(|(_, c)| c.as_ref()) {
            *counts.entry(color).or_default() += 1;
        }
        let beta = counts
            .iter()
            .max_by(|x, y| x.1.cmp(y.1).then_with(|| y.0.cmp(x.0)))
            .map(|(c, _)| (*c).clone())
            .unwrap_or_default();
        let bad: BTreeSet<usize> = seen.iter().filter(|(_, c)| c.as_ref() != Some(&beta)).map(|(a, _)| *a).collect();
        if !a1.is_empty() {
            p.s.insert(a1.clone(), bad);
        }
        p.beta.insert(a1, beta);
    }
    Ok(())
}
