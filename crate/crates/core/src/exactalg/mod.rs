//! Exact integer and rational linear algebra.
//!
//! Dense matrices over [`BigInt`](num_bigint::BigInt) or
//! [`BigRational`](num_rational::BigRational), Smith normal form, exact
//! solving, right sections of split surjections, and cohomology of a
//! composable pair of differentials. Large differentials go through
//! [`SparseMatrix`] and a sparse unit-pivot elimination.

mod group;
mod matrix;
mod scalar;
mod smith;
mod solve;
mod sparse;

pub use group::{cohomology_at, cohomology_at_sparse, GroupPresentation};
pub use matrix::Matrix;
pub use scalar::{Domain, Scalar};
pub use smith::{smith_diagonal, smith_normal_form, SmithDecomposition};
pub use solve::{right_section, solve_linear};
pub use sparse::{invariant_factors, InvariantFactors, SparseMatrix};

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::BigRational;
