use super::smith::smith_normal_form;
use super::{Domain, Matrix, Scalar};
use crate::error::{Error, Result};

/// Solve `M x = b` exactly over the matrix's domain. `Ok(None)` means no
/// solution exists in that domain.
pub fn solve_linear<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Result<Option<Vec<T>>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            context: "right-hand side length",
            expected: m.rows(),
            found: b.len(),
        });
    }
    Ok(match T::DOMAIN {
        Domain::Rat => gauss_jordan(m, b),
        Domain::Int => smith_solve(m, b),
    })
}

fn smith_solve<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let d = smith_normal_form(m);
    let c = d.u.mul_vec(b).expect("U is square of size rows");
    let diag = d.diagonal();
    let mut y = vec![T::zero(); m.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < diag.len() {
            y[i] = ci.exact_div(&diag[i])?;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(d.v.mul_vec(&y).expect("V is square of size cols"))
}

/// Field elimination; only valid where every nonzero element is invertible.
fn gauss_jordan<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.to_rows();
    let mut rhs = b.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].size()) else {
            continue;
        };
        a.swap(r, p);
        rhs.swap(r, p);
        let inv = T::one().exact_div(&a[r][c]).expect("field element is invertible");
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        rhs[r] = rhs[r].clone() * inv;
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..cols {
                if !a[r][j].is_zero() {
                    let d = a[r][j].clone() * f.clone();
                    a[i][j] -= &d;
                }
            }
            let d = rhs[r].clone() * f;
            rhs[i] -= &d;
        }
        pivots.push(c);
        r += 1;
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![T::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}

/// A right inverse `N` with `M N = I`, if `M` is a split surjection over
/// its domain.
pub fn right_section<T: Scalar>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let d = smith_normal_form(m);
    let diag = d.diagonal();
    if diag.len() < m.rows() || !diag.iter().all(Scalar::is_unit) {
        return None;
    }
    // Diagonal entries are normalized to 1, so N = V[:, ..rows] * U.
    let mut vt = Matrix::zeros(m.cols(), m.rows());
    for i in 0..m.cols() {
        for j in 0..m.rows() {
            vt[(i, j)] = d.v[(i, j)].clone();
        }
    }
    Some(&vt * &d.u)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use num_rational::BigRational;

    use super::*;

    #[test]
    fn scalar_cases() {
        let two = Matrix::<BigInt>::from_i64(&[&[2]]);
        assert_eq!(solve_linear(&two, &[BigInt::from(4)]).unwrap(), Some(vec![BigInt::from(2)]));
        assert_eq!(solve_linear(&two, &[BigInt::from(3)]).unwrap(), None);
        let two_q = Matrix::<BigRational>::from_i64(&[&[2]]);
        let x = solve_linear(&two_q, &[BigRational::from_i64(3)]).unwrap().unwrap();
        assert_eq!(x, vec![BigRational::new(3.into(), 2.into())]);
    }

    #[test]
    fn dimension_mismatch() {
        let m = Matrix::<BigInt>::from_i64(&[&[1, 2]]);
        assert!(solve_linear(&m, &[BigInt::from(1), BigInt::from(2)]).is_err());
    }

    #[test]
    fn sections() {
        let m = Matrix::<BigInt>::from_i64(&[&[1, 0]]);
        assert_eq!(right_section(&m), Some(Matrix::from_i64(&[&[1], &[0]])));
        assert_eq!(right_section(&Matrix::<BigInt>::from_i64(&[&[2]])), None);
        let half = right_section(&Matrix::<BigRational>::from_i64(&[&[2]])).unwrap();
        assert_eq!(half[(0, 0)], BigRational::new(1.into(), 2.into()));
    }
}
