use super::{Matrix, Scalar};

/// `U * M * V = S` with `S` diagonal, the diagonal forming a divisibility
/// chain, and `U`, `V` invertible over the domain (determinant `±1` over the
/// integers).
#[derive(Clone, PartialEq, Eq)]
pub struct SmithDecomposition<T> {
    pub u: Matrix<T>,
    pub s: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: std::fmt::Display> std::fmt::Debug for SmithDecomposition<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmithDecomposition")
            .field("u", &self.u)
            .field("s", &self.s)
            .field("v", &self.v)
            .finish()
    }
}

impl<T: Scalar> SmithDecomposition<T> {
    /// Nonzero diagonal entries of `S`, in order.
    pub fn diagonal(&self) -> Vec<T> {
        diagonal_of(&self.s)
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

fn diagonal_of<T: Scalar>(s: &Matrix<T>) -> Vec<T> {
    (0..s.rows().min(s.cols()))
        .map(|i| s[(i, i)].clone())
        .take_while(|x| !x.is_zero())
        .collect()
}

pub fn smith_normal_form<T: Scalar>(m: &Matrix<T>) -> SmithDecomposition<T> {
    let mut s = m.clone();
    let mut u = Matrix::identity(m.rows());
    let mut v = Matrix::identity(m.cols());
    reduce(&mut s, Some(&mut u), Some(&mut v));
    SmithDecomposition { u, s, v }
}

/// Diagonal of the Smith form without tracking the transforms.
pub fn smith_diagonal<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let mut s = m.clone();
    reduce(&mut s, None, None);
    diagonal_of(&s)
}

fn reduce<T: Scalar>(s: &mut Matrix<T>, mut u: Option<&mut Matrix<T>>, mut v: Option<&mut Matrix<T>>) {
    let (rows, cols) = (s.rows(), s.cols());
    for t in 0..rows.min(cols) {
        // Minimal-size pivot limits coefficient growth.
        let mut best: Option<(usize, usize, _)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &s[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let sz = x.size();
                if best.as_ref().map_or(true, |b| sz < b.2) {
                    best = Some((i, j, sz));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        s.swap_rows(t, pi);
        if let Some(u) = u.as_deref_mut() {
            u.swap_rows(t, pi);
        }
        s.swap_cols(t, pj);
        if let Some(v) = v.as_deref_mut() {
            v.swap_cols(t, pj);
        }

        loop {
            let mut moved = false;
            for i in t + 1..rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let (q, r) = s[(i, t)].div_rem_euclid(&s[(t, t)]);
                let neg = -q;
                s.add_row_multiple(i, t, &neg);
                if let Some(u) = u.as_deref_mut() {
                    u.add_row_multiple(i, t, &neg);
                }
                if !r.is_zero() {
                    s.swap_rows(i, t);
                    if let Some(u) = u.as_deref_mut() {
                        u.swap_rows(i, t);
                    }
                    moved = true;
                }
            }
            for j in t + 1..cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let (q, r) = s[(t, j)].div_rem_euclid(&s[(t, t)]);
                let neg = -q;
                s.add_col_multiple(j, t, &neg);
                if let Some(v) = v.as_deref_mut() {
                    v.add_col_multiple(j, t, &neg);
                }
                if !r.is_zero() {
                    s.swap_cols(j, t);
                    if let Some(v) = v.as_deref_mut() {
                        v.swap_cols(j, t);
                    }
                    moved = true;
                }
            }
            if moved {
                continue;
            }
            // Pivot row and column are clear; enforce the divisibility chain.
            let mut offender = None;
            if T::DOMAIN == super::Domain::Int {
                'scan: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if s[(i, j)].exact_div(&s[(t, t)]).is_none() {
                            offender = Some(i);
                            break 'scan;
                        }
                    }
                }
            }
            match offender {
                Some(i) => {
                    let one = T::one();
                    s.add_row_multiple(t, i, &one);
                    if let Some(u) = u.as_deref_mut() {
                        u.add_row_multiple(t, i, &one);
                    }
                }
                None => break,
            }
        }

        let unit = s[(t, t)].normalizing_unit();
        if !unit.is_one() {
            s.scale_row(t, &unit);
            if let Some(u) = u.as_deref_mut() {
                u.scale_row(t, &unit);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use num_rational::BigRational;
use num_traits::{One, Zero};

    use super::*;

    fn det(m: &Matrix<BigInt>) -> BigInt {
        // Bareiss-free cofactor expansion; only used on tiny matrices.
        let n = m.rows();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let minor: Vec<Vec<BigInt>> = (1..n)
                .map(|i| (0..n).filter(|&c| c != j).map(|c| m[(i, c)].clone()).collect())
                .collect();
            let term = m[(0, j)].clone() * det(&Matrix::from_rows(minor).unwrap());
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn two_by_two_example() {
        let m = Matrix::<BigInt>::from_i64(&[&[2, 4], &[6, 8]]);
        let d = smith_normal_form(&m);
        assert_eq!(&(&d.u * &m) * &d.v, d.s);
        assert_eq!(d.s, Matrix::from_i64(&[&[2, 0], &[0, 4]]));
        assert_eq!(det(&d.u).magnitude(), &num_bigint::BigUint::one());
        assert_eq!(det(&d.v).magnitude(), &num_bigint::BigUint::one());
    }

    #[test]
    fn identity_and_zero() {
        let i3 = Matrix::<BigInt>::identity(3);
        assert_eq!(smith_normal_form(&i3).s, i3);
        let z = Matrix::<BigInt>::zeros(2, 3);
        assert_eq!(smith_normal_form(&z).s, z);
    }

    #[test]
    fn rational_diagonal_is_ones() {
        let m = Matrix::<BigRational>::from_i64(&[&[2, 4], &[6, 8]]);
        let d = smith_normal_form(&m);
        assert_eq!(&(&d.u * &m) * &d.v, d.s);
        assert_eq!(d.s, Matrix::identity(2));
    }
}
