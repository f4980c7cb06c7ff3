//! Index functions, negligible column sets, and Ω_κ systems.
//!
//! An [`OmegaSystem`] is a family of κ towers of free modules
//! `G_{α,0} ← G_{α,1} ← … ← G_{α,K_α}` with one-step bonding maps. It induces
//! a system over index functions `x : κ → ω` with `G_x = ⊕_α G_{α,x(α)}` and
//! block-diagonal bonds. At finite κ the direct sum and the product agree, so
//! "finitely supported" is expressed through a [`NegligibleIdeal`]: a vector is
//! small when its column support lies inside the ideal's set.
//!
//! The [`InverseSystem`] trait is the interface the complexes, the coherence
//! solvers and the propagation algorithms are written against. Besides
//! [`OmegaSystem`] it is implemented by
//! [`PosetSystem`](crate::complexes::PosetSystem), a system over an explicit
//! finite meet-semilattice.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hash;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{Domain, GroupPresentation, Matrix, Scalar};

pub trait IndexLike: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync + 'static {}

impl<I: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync + 'static> IndexLike for I {}

/// An inverse system of free modules over a finite meet-semilattice, with a
/// fixed decomposition of every group into κ column blocks that all bonds
/// respect.
pub trait InverseSystem: Sync {
    type Scalar: Scalar;
    type Index: IndexLike;

    /// Number of column blocks.
    fn kappa(&self) -> usize;

    fn leq(&self, x: &Self::Index, y: &Self::Index) -> bool;

    fn meet(&self, x: &Self::Index, y: &Self::Index) -> Self::Index;

    /// Rank of each column block of `G_x`.
    fn block_ranks(&self, x: &Self::Index) -> Vec<usize>;

    /// The bonding map `p_{y,x} : G_y → G_x` for `x ≤ y`.
    fn bond(&self, y: &Self::Index, x: &Self::Index) -> Result<Matrix<Self::Scalar>>;

    /// All indices below some member of `xs`, sorted.
    fn downward_closure(&self, xs: &[Self::Index]) -> Vec<Self::Index>;

    fn describe(&self, x: &Self::Index) -> String {
        format!("{x:?}")
    }

    fn domain(&self) -> Domain {
        Self::Scalar::DOMAIN
    }

    fn rank(&self, x: &Self::Index) -> usize {
        self.block_ranks(x).iter().sum()
    }

    /// Prefix sums of the block ranks; block `α` occupies
    /// `offsets[α]..offsets[α + 1]`.
    fn block_offsets(&self, x: &Self::Index) -> Vec<usize> {
        let mut offsets = vec![0];
        for r in self.block_ranks(x) {
            offsets.push(offsets.last().unwrap() + r);
        }
        offsets
    }

    fn meet_all<'a>(&self, xs: impl IntoIterator<Item = &'a Self::Index>) -> Option<Self::Index>
    where
        Self::Index: 'a,
    {
        let mut it = xs.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, x| self.meet(&acc, x)))
    }

    fn group_at(&self, x: &Self::Index) -> BlockGroup {
        let block_ranks = self.block_ranks(x);
        BlockGroup {
            presentation: GroupPresentation::free(self.domain(), block_ranks.iter().sum()),
            block_ranks,
        }
    }

    /// Columns whose block of `v ∈ G_x` is nonzero.
    fn column_support(&self, x: &Self::Index, v: &[Self::Scalar]) -> Result<BTreeSet<usize>> {
        let offsets = self.block_offsets(x);
        let dim = *offsets.last().unwrap();
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "group element",
                expected: dim,
                found: v.len(),
            });
        }
        Ok((0..self.kappa())
            .filter(|&a| v[offsets[a]..offsets[a + 1]].iter().any(|e| !e.is_zero()))
            .collect())
    }

    /// Whether `v − w` is supported inside the ideal.
    fn agrees_mod_ideal(
        &self,
        x: &Self::Index,
        v: &[Self::Scalar],
        w: &[Self::Scalar],
        ideal: &NegligibleIdeal,
    ) -> Result<bool> {
        if v.len() != w.len() {
            return Err(Error::DimensionMismatch {
                context: "compared elements",
                expected: v.len(),
                found: w.len(),
            });
        }
        let diff: Vec<Self::Scalar> = v.iter().zip(w).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(ideal.covers(&self.column_support(x, &diff)?))
    }
}

/// `G_x` as a free module together with its column block structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGroup {
    pub presentation: GroupPresentation,
    pub block_ranks: Vec<usize>,
}

/// An element of `ω^κ`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexFunction(pub Vec<usize>);

impl IndexFunction {
    pub fn new(values: Vec<usize>) -> Self {
        IndexFunction(values)
    }

    pub fn zeros(kappa: usize) -> Self {
        IndexFunction(vec![0; kappa])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// Pointwise minimum.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                context: "index function length",
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(IndexFunction(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect()))
    }

    /// Pointwise `≤`; functions of different lengths are incomparable.
    pub fn leq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Debug for IndexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IndexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<usize>> for IndexFunction {
    fn from(v: Vec<usize>) -> Self {
        IndexFunction(v)
    }
}

/// `{y | y ≤ x for some x ∈ xs}`, sorted lexicographically.
pub fn downward_closure(xs: &[IndexFunction]) -> Vec<IndexFunction> {
    let mut out = BTreeSet::new();
    for x in xs {
        let mut current = vec![0usize; x.len()];
        loop {
            out.insert(IndexFunction(current.clone()));
            // Odometer over the box below x.
            let mut a = 0;
            while a < x.len() && current[a] == x.0[a] {
                current[a] = 0;
                a += 1;
            }
            if a == x.len() {
                break;
            }
            current[a] += 1;
        }
    }
    out.into_iter().collect()
}

/// A set `N` of columns; a column set is negligible iff it is contained in `N`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NegligibleIdeal {
    set: BTreeSet<usize>,
}

impl NegligibleIdeal {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(columns: impl IntoIterator<Item = usize>, kappa: usize) -> Result<Self> {
        let set: BTreeSet<usize> = columns.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&a| a >= kappa) {
            return Err(Error::Contract(format!("ideal column {bad} outside 0..{kappa}")));
        }
        Ok(NegligibleIdeal { set })
    }

    pub fn contains(&self, column: usize) -> bool {
        self.set.contains(&column)
    }

    pub fn covers(&self, columns: &BTreeSet<usize>) -> bool {
        columns.is_subset(&self.set)
    }

    pub fn columns(&self) -> &BTreeSet<usize> {
        &self.set
    }

    pub fn union(&self, other: &Self) -> Self {
        NegligibleIdeal {
            set: self.set.union(&other.set).copied().collect(),
        }
    }

    pub fn with_columns(&self, columns: impl IntoIterator<Item = usize>) -> Self {
        let mut set = self.set.clone();
        set.extend(columns);
        NegligibleIdeal { set }
    }
}

/// κ towers of free modules with one-step bonds.
#[derive(Clone, Debug)]
pub struct OmegaSystem<T: Scalar> {
    ranks: Vec<Vec<usize>>,
    bonds: Vec<Vec<Matrix<T>>>,
    // composites[α][j][k] = p_{α,j,k} for k ≤ j.
    composites: Vec<Vec<Vec<Matrix<T>>>>,
}

impl<T: Scalar> OmegaSystem<T> {
    /// `ranks[α][k]` is the rank of `G_{α,k}` for `k ≤ K_α`, and
    /// `bonds[α][k] : G_{α,k+1} → G_{α,k}` is a `ranks[α][k] × ranks[α][k+1]`
    /// matrix.
    pub fn new(ranks: Vec<Vec<usize>>, bonds: Vec<Vec<Matrix<T>>>) -> Result<Self> {
        validate_parts(&ranks, &bonds)?;
        let composites = ranks
            .iter()
            .zip(&bonds)
            .map(|(r, b)| {
                (0..r.len())
                    .map(|j| {
                        let mut col = vec![Matrix::identity(r[j]); j + 1];
                        for k in (0..j).rev() {
                            col[k] = &b[k] * &col[k + 1];
                        }
                        col
                    })
                    .collect()
            })
            .collect();
        Ok(OmegaSystem { ranks, bonds, composites })
    }

    /// κ towers of height `height` with `G_{α,k} = Z^k` (or `Q^k`) and bonds
    /// dropping the last coordinate.
    pub fn truncated_projection_system(kappa: usize, height: usize) -> Self {
        let ranks = vec![(0..=height).collect::<Vec<_>>(); kappa];
        let tower: Vec<Matrix<T>> = (0..height)
            .map(|k| {
                let mut m = Matrix::zeros(k, k + 1);
                for i in 0..k {
                    m[(i, i)] = T::one();
                }
                m
            })
            .collect();
        Self::new(ranks, vec![tower; kappa]).expect("projection towers are valid")
    }

    pub fn heights(&self) -> Vec<usize> {
        self.ranks.iter().map(|r| r.len() - 1).collect()
    }

    pub fn ranks(&self) -> &[Vec<usize>] {
        &self.ranks
    }

    pub fn one_step_bonds(&self) -> &[Vec<Matrix<T>>] {
        &self.bonds
    }

    pub fn group(&self, alpha: usize, level: usize) -> GroupPresentation {
        GroupPresentation::free(T::DOMAIN, self.ranks[alpha][level])
    }

    /// `p_{α,j,k}` for `k ≤ j`.
    pub fn tower_bond(&self, alpha: usize, j: usize, k: usize) -> &Matrix<T> {
        &self.composites[alpha][j][k]
    }

    /// The top index function `(K_0, …, K_{κ−1})`.
    pub fn top(&self) -> IndexFunction {
        IndexFunction(self.heights())
    }

    pub fn check_index(&self, x: &IndexFunction) -> Result<()> {
        if x.len() != self.ranks.len() {
            return Err(Error::DimensionMismatch {
                context: "index function length",
                expected: self.ranks.len(),
                found: x.len(),
            });
        }
        for (column, (&level, r)) in x.0.iter().zip(&self.ranks).enumerate() {
            if level >= r.len() {
                return Err(Error::HeightExceeded {
                    column,
                    level,
                    height: r.len() - 1,
                });
            }
        }
        Ok(())
    }

    /// Re-run the structural checks on an existing system.
    pub fn validate(&self) -> Result<()> {
        validate_parts(&self.ranks, &self.bonds)
    }

    /// The same towers with every bond replaced through `f(α, k, bond)`.
    pub fn map_bonds(&self, mut f: impl FnMut(usize, usize, &Matrix<T>) -> Matrix<T>) -> Result<Self> {
        let bonds = self
            .bonds
            .iter()
            .enumerate()
            .map(|(a, tower)| tower.iter().enumerate().map(|(k, b)| f(a, k, b)).collect())
            .collect();
        Self::new(self.ranks.clone(), bonds)
    }
}

/// Check tower shapes: one bond per level step, each of shape
/// `ranks[k] × ranks[k+1]`.
pub fn validate_parts<T: Scalar>(ranks: &[Vec<usize>], bonds: &[Vec<Matrix<T>>]) -> Result<()> {
    if ranks.len() != bonds.len() {
        return Err(Error::InvalidSystem(format!(
            "{} towers of groups but {} towers of bonds",
            ranks.len(),
            bonds.len()
        )));
    }
    for (alpha, (r, b)) in ranks.iter().zip(bonds).enumerate() {
        if r.is_empty() {
            return Err(Error::InvalidSystem(format!("column {alpha} has no levels")));
        }
        if b.len() + 1 != r.len() {
            return Err(Error::InvalidSystem(format!(
                "column {alpha}: {} levels need {} bonds, found {}",
                r.len(),
                r.len() - 1,
                b.len()
            )));
        }
        for (k, m) in b.iter().enumerate() {
            if m.rows() != r[k] || m.cols() != r[k + 1] {
                return Err(Error::InvalidSystem(format!(
                    "bond at (alpha={alpha}, k={k}) has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    r[k],
                    r[k + 1]
                )));
            }
        }
    }
    Ok(())
}

impl<T: Scalar> InverseSystem for OmegaSystem<T> {
    type Scalar = T;
    type Index = IndexFunction;

    fn kappa(&self) -> usize {
        self.ranks.len()
    }

    fn leq(&self, x: &IndexFunction, y: &IndexFunction) -> bool {
        x.leq(y)
    }

    fn meet(&self, x: &IndexFunction, y: &IndexFunction) -> IndexFunction {
        x.meet(y).expect("indices of one system have equal length")
    }

    fn block_ranks(&self, x: &IndexFunction) -> Vec<usize> {
        x.0.iter().zip(&self.ranks).map(|(&k, r)| r[k]).collect()
    }

    fn bond(&self, y: &IndexFunction, x: &IndexFunction) -> Result<Matrix<T>> {
        self.check_index(x)?;
        self.check_index(y)?;
        if !x.leq(y) {
            return Err(Error::NotBelow {
                lower: x.to_string(),
                upper: y.to_string(),
            });
        }
        let blocks: Vec<Matrix<T>> = (0..self.kappa())
            .map(|a| self.composites[a][y.0[a]][x.0[a]].clone())
            .collect();
        Ok(Matrix::block_diag(&blocks))
    }

    fn downward_closure(&self, xs: &[IndexFunction]) -> Vec<IndexFunction> {
        downward_closure(xs)
    }

    fn describe(&self, x: &IndexFunction) -> String {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;

    fn f(v: &[usize]) -> IndexFunction {
        IndexFunction(v.to_vec())
    }

    #[test]
    fn meets() {
        assert_eq!(f(&[2, 3]).meet(&f(&[3, 1])).unwrap(), f(&[2, 1]));
        assert_eq!(f(&[0, 5]).meet(&f(&[4, 0])).unwrap(), f(&[0, 0]));
        assert!(f(&[1]).meet(&f(&[1, 2])).is_err());
    }

    #[test]
    fn closures() {
        assert_eq!(
            downward_closure(&[f(&[1, 1])]),
            vec![f(&[0, 0]), f(&[0, 1]), f(&[1, 0]), f(&[1, 1])]
        );
        assert_eq!(downward_closure(&[f(&[1, 0]), f(&[0, 1])]), vec![f(&[0, 0]), f(&[0, 1]), f(&[1, 0])]);
        assert_eq!(downward_closure(&[f(&[2, 0, 3])]).len(), 12);
    }

    #[test]
    fn projection_system_groups_and_bonds() {
        let s = OmegaSystem::<BigInt>::truncated_projection_system(2, 3);
        s.validate().unwrap();
        let g = s.group_at(&f(&[2, 3]));
        assert_eq!(g.presentation, GroupPresentation::free(Domain::Int, 5));
        assert_eq!(g.block_ranks, vec![2, 3]);
        assert!(s.group_at(&f(&[0, 0])).presentation.is_trivial());
        let b = s.bond(&f(&[1, 0]), &f(&[0, 0])).unwrap();
        assert_eq!((b.rows(), b.cols()), (0, 1));
        assert_eq!(s.bond(&f(&[2, 1]), &f(&[2, 1])).unwrap(), Matrix::identity(3));
        assert!(matches!(s.bond(&f(&[0, 1]), &f(&[1, 0])), Err(Error::NotBelow { .. })));
        assert!(matches!(s.bond(&f(&[4, 0]), &f(&[0, 0])), Err(Error::HeightExceeded { column: 0, .. })));
    }

    #[test]
    fn wrong_bond_shape_is_reported() {
        let bad = vec![vec![Matrix::<BigInt>::zeros(1, 1)]];
        let err = OmegaSystem::new(vec![vec![1, 2]], bad).unwrap_err();
        assert!(err.to_string().contains("alpha=0, k=0"), "{err}");
    }

    #[test]
    fn supports_and_agreement() {
        let s = OmegaSystem::<BigInt>::truncated_projection_system(3, 2);
        let x = f(&[1, 1, 1]);
        let v = |xs: [i64; 3]| xs.iter().map(|&a| BigInt::from(a)).collect::<Vec<_>>();
        assert!(s.column_support(&x, &v([0, 0, 0])).unwrap().is_empty());
        assert_eq!(s.column_support(&x, &v([0, 4, 0])).unwrap(), BTreeSet::from([1]));
        assert_eq!(s.column_support(&x, &v([1, 0, -1])).unwrap(), BTreeSet::from([0, 2]));
        let n0 = NegligibleIdeal::new([0], 3).unwrap();
        assert!(s.agrees_mod_ideal(&x, &v([5, 1, 1]), &v([2, 1, 1]), &n0).unwrap());
        assert!(!s.agrees_mod_ideal(&x, &v([1, 5, 1]), &v([1, 2, 1]), &n0).unwrap());
        assert!(s.column_support(&x, &v([1, 0, 0])[..2]).is_err());
    }
}
