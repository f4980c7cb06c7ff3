use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use super::smith::smith_diagonal;
use super::{Matrix, Scalar};
use crate::error::{Error, Result};

/// Row-major sparse matrix. Differentials of the cochain complexes are
/// stored this way; they have a bounded number of blocks per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<BTreeMap<usize, T>>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: vec![BTreeMap::new(); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(BTreeMap::len).sum()
    }

    /// Accumulate `value` at `(i, j)`.
    pub fn add(&mut self, i: usize, j: usize, value: T) {
        assert!(i < self.rows && j < self.cols, "sparse index out of range");
        if value.is_zero() {
            return;
        }
        let row = &mut self.entries[i];
        let slot = row.entry(j).or_insert_with(T::zero);
        *slot += &value;
        if slot.is_zero() {
            row.remove(&j);
        }
    }

    /// Accumulate a dense block with its top-left corner at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &Matrix<T>, sign: &T) {
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                let x = &block[(i, j)];
                if !x.is_zero() {
                    self.add(r0 + i, c0 + j, x.clone() * sign.clone());
                }
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i].get(&j).cloned().unwrap_or_else(T::zero)
    }

    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, &T)> {
        self.entries[i].iter().map(|(&j, v)| (j, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(BTreeMap::is_empty)
    }

    pub fn from_dense(m: &Matrix<T>) -> Self {
        let mut s = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if !m[(i, j)].is_zero() {
                    s.entries[i].insert(j, m[(i, j)].clone());
                }
            }
        }
        s
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for (&j, v) in row {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "sparse product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for (&k, a) in row {
                for (&j, b) in &other.entries[k] {
                    out.add(i, j, a.clone() * b.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "sparse matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .entries
            .iter()
            .map(|row| {
                let mut acc = T::zero();
                for (&j, a) in row {
                    if !v[j].is_zero() {
                        acc += &(a.clone() * v[j].clone());
                    }
                }
                acc
            })
            .collect())
    }
}

/// Rank and the non-unit invariant factors of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFactors<T> {
    pub rank: usize,
    /// Invariant factors that are not units, in divisibility order.
    pub torsion: Vec<T>,
}

/// Invariant factors by sparse unit-pivot elimination followed by a dense
/// Smith reduction of whatever is left.
///
/// Eliminating on a unit pivot is a unimodular row/column operation that
/// splits off a `1` invariant factor, so the remaining Schur complement
/// carries every non-unit factor.
pub fn invariant_factors<T: Scalar>(m: &SparseMatrix<T>) -> InvariantFactors<T> {
    let mut rows: Vec<HashMap<usize, T>> = m
        .entries
        .iter()
        .map(|r| r.iter().map(|(&j, v)| (j, v.clone())).collect())
        .collect();
    let mut col_rows: Vec<HashSet<usize>> = vec![HashSet::new(); m.cols];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.keys() {
            col_rows[j].insert(i);
        }
    }
    let mut alive = vec![true; m.rows];
    let mut rank = 0usize;

    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .map(|(i, r)| Reverse((r.len(), i)))
        .collect();
    let mut deferred: Vec<usize> = Vec::new();

    loop {
        let mut progressed = false;
        while let Some(Reverse((len, p))) = heap.pop() {
            if !alive[p] {
                continue;
            }
            if rows[p].is_empty() {
                alive[p] = false;
                continue;
            }
            if rows[p].len() != len {
                heap.push(Reverse((rows[p].len(), p)));
                continue;
            }
            let pivot_col = rows[p]
                .iter()
                .filter(|(_, v)| v.is_unit())
                .min_by_key(|(&j, _)| (col_rows[j].len(), j))
                .map(|(&j, _)| j);
            let Some(c) = pivot_col else {
                deferred.push(p);
                continue;
            };
            let pivot = rows[p][&c].clone();
            let pivot_row: Vec<(usize, T)> = rows[p].iter().map(|(&j, v)| (j, v.clone())).collect();
            let others: Vec<usize> = col_rows[c].iter().copied().filter(|&i| i != p).collect();
            for i in others {
                let factor = rows[i][&c]
                    .exact_div(&pivot)
                    .expect("unit pivot divides every entry");
                for (j, v) in &pivot_row {
                    let delta = v.clone() * factor.clone();
                    let slot = rows[i].entry(*j).or_insert_with(T::zero);
                    *slot -= &delta;
                    if slot.is_zero() {
                        rows[i].remove(j);
                        col_rows[*j].remove(&i);
                    } else {
                        col_rows[*j].insert(i);
                    }
                }
                heap.push(Reverse((rows[i].len(), i)));
            }
            for (j, _) in &pivot_row {
                col_rows[*j].remove(&p);
            }
            rows[p].clear();
            alive[p] = false;
            rank += 1;
            progressed = true;
        }
        if !progressed || deferred.is_empty() {
            break;
        }
        for p in deferred.drain(..) {
            if alive[p] && !rows[p].is_empty() {
                heap.push(Reverse((rows[p].len(), p)));
            }
        }
    }

    // Dense Smith reduction of the residual block.
    let live_rows: Vec<usize> = (0..m.rows).filter(|&i| alive[i] && !rows[i].is_empty()).collect();
    let mut live_cols: Vec<usize> = live_rows.iter().flat_map(|&i| rows[i].keys().copied()).collect();
    live_cols.sort_unstable();
    live_cols.dedup();
    let mut torsion = Vec::new();
    if !live_rows.is_empty() {
        let col_pos: HashMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let mut dense = Matrix::zeros(live_rows.len(), live_cols.len());
        for (a, &i) in live_rows.iter().enumerate() {
            for (j, v) in &rows[i] {
                dense[(a, col_pos[j])] = v.clone();
            }
        }
        for d in smith_diagonal(&dense) {
            rank += 1;
            if !d.is_unit() {
                torsion.push(d);
            }
        }
    }
    InvariantFactors { rank, torsion }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;

    #[test]
    fn matches_dense_on_small_example() {
        let m = Matrix::<BigInt>::from_i64(&[&[2, 0, -1], &[0, 2, -1]]);
        let f = invariant_factors(&SparseMatrix::from_dense(&m));
        assert_eq!(f.rank, 2);
        assert_eq!(f.torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn no_units_goes_dense() {
        let m = Matrix::<BigInt>::from_i64(&[&[2, 4], &[6, 8]]);
        let f = invariant_factors(&SparseMatrix::from_dense(&m));
        assert_eq!(f.rank, 2);
        assert_eq!(f.torsion, vec![BigInt::from(2), BigInt::from(4)]);
    }
}
