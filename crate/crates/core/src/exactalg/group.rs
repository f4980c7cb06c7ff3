use std::fmt;

use num_bigint::BigInt;
use super::sparse::{invariant_factors, SparseMatrix};
use super::{Domain, Matrix, Scalar};
use crate::error::{Error, Result};

/// A finitely generated abelian group `Z^r ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with
/// `d_i | d_{i+1}`, or a rational vector space `Q^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupPresentation {
    pub domain: Domain,
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl GroupPresentation {
    pub fn free(domain: Domain, rank: usize) -> Self {
        GroupPresentation {
            domain,
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    pub fn trivial(domain: Domain) -> Self {
        Self::free(domain, 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Check the divisibility chain and the empty-torsion rule for `Q`.
    pub fn is_well_formed(&self) -> bool {
        let two = BigInt::from(2);
        match self.domain {
            Domain::Rat => self.invariant_factors.is_empty(),
            Domain::Int => {
                self.invariant_factors.iter().all(|d| d >= &two)
                    && self
                        .invariant_factors
                        .windows(2)
                        .all(|w| (&w[1] % &w[0]) == BigInt::from(0))
            }
        }
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.domain {
            Domain::Int => "Z",
            Domain::Rat => "Q",
        };
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push(base.to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("{base}^{}", self.free_rank));
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `ker(d_next) / im(d_prev)` for a composable pair of differentials.
pub fn cohomology_at<T: Scalar>(d_prev: &Matrix<T>, d_next: &Matrix<T>) -> Result<GroupPresentation> {
    cohomology_at_sparse(&SparseMatrix::from_dense(d_prev), &SparseMatrix::from_dense(d_next))
}

/// Sparse form of [`cohomology_at`].
///
/// The kernel of `d_next` is saturated, so the torsion of the quotient is the
/// torsion of `coker(d_prev)` and its free rank is
/// `dim − rank(d_prev) − rank(d_next)`.
pub fn cohomology_at_sparse<T: Scalar>(d_prev: &SparseMatrix<T>, d_next: &SparseMatrix<T>) -> Result<GroupPresentation> {
    if d_prev.rows() != d_next.cols() {
        return Err(Error::DimensionMismatch {
            context: "composable differentials",
            expected: d_next.cols(),
            found: d_prev.rows(),
        });
    }
    if !d_next.checked_mul(d_prev)?.is_zero() {
        return Err(Error::NotComposable);
    }
    let prev = invariant_factors(d_prev);
    let next = invariant_factors(d_next);
    let dim = d_prev.rows();
    Ok(GroupPresentation {
        domain: T::DOMAIN,
        free_rank: dim - prev.rank - next.rank,
        invariant_factors: prev
            .torsion
            .iter()
            .map(|d| d.as_integer().expect("integer torsion factor"))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;

    #[test]
    fn zero_maps_give_the_whole_group() {
        let d_prev = Matrix::<BigInt>::zeros(2, 0);
        let d_next = Matrix::<BigInt>::zeros(0, 2);
        assert_eq!(cohomology_at(&d_prev, &d_next).unwrap(), GroupPresentation::free(Domain::Int, 2));
    }

    #[test]
    fn multiplication_by_two() {
        let d_prev = Matrix::<BigInt>::from_i64(&[&[2]]);
        let d_next = Matrix::<BigInt>::zeros(0, 1);
        let h = cohomology_at(&d_prev, &d_next).unwrap();
        assert_eq!(h.free_rank, 0);
        assert_eq!(h.invariant_factors, vec![BigInt::from(2)]);
        assert_eq!(h.to_string(), "Z/2");
        let q = cohomology_at(&Matrix::<BigRational>::from_i64(&[&[2]]), &Matrix::zeros(0, 1)).unwrap();
        assert!(q.is_trivial());
    }

    #[test]
    fn injective_next_kills_everything() {
        let d_prev = Matrix::<BigInt>::zeros(2, 0);
        let d_next = Matrix::<BigInt>::from_i64(&[&[1, 1], &[0, 3]]);
        assert!(cohomology_at(&d_prev, &d_next).unwrap().is_trivial());
    }

    #[test]
    fn composability_is_checked() {
        let d_prev = Matrix::<BigInt>::from_i64(&[&[1]]);
        let d_next = Matrix::<BigInt>::from_i64(&[&[1]]);
        assert_eq!(cohomology_at(&d_prev, &d_next), Err(Error::NotComposable));
    }
}
