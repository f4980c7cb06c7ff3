//! Cochain complexes of an inverse system restricted to a finite set.
//!
//! Two complexes are built. The alternating complex `K•(G↾X)` has one block
//! `G_{x_0 ∧ … ∧ x_n}` per strictly increasing `(n+1)`-tuple of `X`. The
//! normalized poset complex of a downward-closed `Y` has one block `G_{y_0}`
//! per strict chain `y_0 < … < y_n`; its cohomology is `lim^n` over `Y`, and
//! [`lim_char_check`] compares the two degree by degree.

mod semilattice;

use std::collections::HashMap;

pub use semilattice::{MeetSemilattice, PosetSystem};

use crate::error::{Error, Result};
use crate::exactalg::{cohomology_at_sparse, GroupPresentation, Scalar, SparseMatrix};
use crate::omega::InverseSystem;

/// Strictly increasing tuples of `0..n` of length `len`, in lexicographic
/// order.
pub fn increasing_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn go(start: usize, n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < len - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, len, cur, out);
            cur.pop();
        }
    }
    go(0, n, len, &mut cur, &mut out);
    out
}

/// `t` with entry `i` removed.
pub fn face(t: &[usize], i: usize) -> Vec<usize> {
    let mut f = t.to_vec();
    f.remove(i);
    f
}

/// Basis layout of one degree: an ordered list of cells with block offsets.
#[derive(Clone, Debug)]
pub struct Layout {
    pub cells: Vec<Vec<usize>>,
    pub offsets: Vec<usize>,
    position: HashMap<Vec<usize>, usize>,
}

impl Layout {
    pub fn new(cells: Vec<Vec<usize>>, ranks: &[usize]) -> Self {
        let mut offsets = vec![0];
        for r in ranks {
            offsets.push(offsets.last().unwrap() + r);
        }
        let position = cells.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Layout {
            cells,
            offsets,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn position(&self, cell: &[usize]) -> Option<usize> {
        self.position.get(cell).copied()
    }

    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }
}

/// The system restricted to an ordered point set `X`, optionally capped
/// below `g` (every meet is further met with `g`).
#[derive(Clone, Debug)]
pub struct Restriction<'a, S: InverseSystem> {
    pub system: &'a S,
    pub points: Vec<S::Index>,
    pub cap: Option<S::Index>,
}

impl<'a, S: InverseSystem> Restriction<'a, S> {
    pub fn new(system: &'a S, points: Vec<S::Index>, cap: Option<S::Index>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Contract("index set is empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::Contract(format!("index set repeats {}", system.describe(p))));
            }
        }
        Ok(Restriction { system, points, cap })
    }

    /// `x_{t_0} ∧ … ∧ x_{t_k} (∧ g)`.
    pub fn tuple_meet(&self, t: &[usize]) -> S::Index {
        let m = self
            .system
            .meet_all(t.iter().map(|&i| &self.points[i]))
            .expect("tuples are nonempty");
        match &self.cap {
            Some(g) => self.system.meet(&m, g),
            None => m,
        }
    }

    pub fn layout(&self, len: usize) -> Layout {
        let cells = increasing_tuples(self.points.len(), len);
        let ranks: Vec<usize> = cells.iter().map(|t| self.system.rank(&self.tuple_meet(t))).collect();
        Layout::new(cells, &ranks)
    }

    /// The alternating differential from `len`-tuples to `(len+1)`-tuples.
    pub fn differential(&self, len: usize) -> Result<SparseMatrix<S::Scalar>> {
        let src = self.layout(len);
        let dst = self.layout(len + 1);
        let mut d = SparseMatrix::zeros(dst.dim(), src.dim());
        for (row, tau) in dst.cells.iter().enumerate() {
            let target = self.tuple_meet(tau);
            for i in 0..tau.len() {
                let f = face(tau, i);
                let col = src.position(&f).expect("faces of increasing tuples are increasing");
                let p = self.system.bond(&self.tuple_meet(&f), &target)?;
                let sign = S::Scalar::parity_sign(i);
                d.add_block(dst.offsets[row], src.offsets[col], &p, &sign);
            }
        }
        Ok(d)
    }
}

/// Groups `K^0, …, K^top` with differentials `d^n : K^n → K^{n+1}` for
/// `n < top`.
#[derive(Clone, Debug)]
pub struct CochainComplex<T: Scalar> {
    dims: Vec<usize>,
    differentials: Vec<SparseMatrix<T>>,
}

impl<T: Scalar> CochainComplex<T> {
    pub fn new(dims: Vec<usize>, differentials: Vec<SparseMatrix<T>>) -> Result<Self> {
        if dims.is_empty() || differentials.len() + 1 != dims.len() {
            return Err(Error::Contract(format!(
                "{} groups need {} differentials, found {}",
                dims.len(),
                dims.len().saturating_sub(1),
                differentials.len()
            )));
        }
        for (n, d) in differentials.iter().enumerate() {
            if d.cols() != dims[n] || d.rows() != dims[n + 1] {
                return Err(Error::DimensionMismatch {
                    context: "differential shape",
                    expected: dims[n],
                    found: d.cols(),
                });
            }
        }
        Ok(CochainComplex { dims, differentials })
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    pub fn differential(&self, n: usize) -> Option<&SparseMatrix<T>> {
        self.differentials.get(n)
    }

    /// Whether `d^{n+1} d^n = 0` in every degree.
    pub fn is_complex(&self) -> bool {
        self.differentials
            .windows(2)
            .all(|w| w[1].checked_mul(&w[0]).map(|m| m.is_zero()).unwrap_or(false))
    }

    /// `H^n = ker d^n / im d^{n−1}`; needs `d^n`, so `n < top_degree()`.
    pub fn cohomology(&self, n: usize) -> Result<GroupPresentation> {
        let Some(d_next) = self.differentials.get(n) else {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                max: self.differentials.len().saturating_sub(1),
            });
        };
        let zero = SparseMatrix::zeros(self.dims[n], 0);
        let d_prev = if n == 0 { &zero } else { &self.differentials[n - 1] };
        cohomology_at_sparse(d_prev, d_next)
    }
}

/// `K•(G↾X)` through degree `n_max + 1`, so that `H^n` is available for
/// `n ≤ n_max`.
pub fn alternating_complex<S: InverseSystem>(
    system: &S,
    points: &[S::Index],
    n_max: usize,
) -> Result<CochainComplex<S::Scalar>> {
    capped_alternating_complex(&Restriction::new(system, points.to_vec(), None)?, n_max)
}

pub fn capped_alternating_complex<S: InverseSystem>(
    r: &Restriction<'_, S>,
    n_max: usize,
) -> Result<CochainComplex<S::Scalar>> {
    let dims = (0..=n_max + 1).map(|n| r.layout(n + 1).dim()).collect();
    let ds = (0..=n_max).map(|n| r.differential(n + 1)).collect::<Result<Vec<_>>>()?;
    CochainComplex::new(dims, ds)
}

/// The normalized poset cochain complex of a downward-closed `Y`, through
/// degree `n_max + 1`.
pub fn lim_complex<S: InverseSystem>(system: &S, y: &[S::Index], n_max: usize) -> Result<CochainComplex<S::Scalar>> {
    for e in y {
        for below in system.downward_closure(std::slice::from_ref(e)) {
            if !y.contains(&below) {
                return Err(Error::Contract(format!(
                    "set is not downward closed: {} is below {} but missing",
                    system.describe(&below),
                    system.describe(e)
                )));
            }
        }
    }
    let n = y.len();
    let above: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && system.leq(&y[i], &y[j])).collect())
        .collect();
    let mut chains: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|i| vec![i]).collect()];
    for _ in 0..=n_max {
        let next = chains
            .last()
            .unwrap()
            .iter()
            .flat_map(|c| {
                above[*c.last().unwrap()].iter().map(move |&j| {
                    let mut c2 = c.clone();
                    c2.push(j);
                    c2
                })
            })
            .collect();
        chains.push(next);
    }
    let layouts: Vec<Layout> = chains
        .into_iter()
        .map(|cells| {
            let ranks: Vec<usize> = cells.iter().map(|c| system.rank(&y[c[0]])).collect();
            Layout::new(cells, &ranks)
        })
        .collect();
    let mut ds = Vec::new();
    for deg in 0..=n_max {
        let (src, dst) = (&layouts[deg], &layouts[deg + 1]);
        let mut d = SparseMatrix::zeros(dst.dim(), src.dim());
        for (row, c) in dst.cells.iter().enumerate() {
            let r0 = dst.offsets[row];
            let first = face(c, 0);
            let p = system.bond(&y[c[1]], &y[c[0]])?;
            d.add_block(r0, src.offsets[src.position(&first).unwrap()], &p, &num_traits::One::one());
            for i in 1..c.len() {
                let f = face(c, i);
                let k = src.position(&f).unwrap();
                let sign = S::Scalar::parity_sign(i);
                for t in 0..src.range(k).len() {
                    d.add(r0 + t, src.offsets[k] + t, sign.clone());
                }
            }
        }
        ds.push(d);
    }
    CochainComplex::new(layouts.iter().map(Layout::dim).collect(), ds)
}

/// One degree of a [`lim_char_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeComparison {
    pub degree: usize,
    pub alternating: GroupPresentation,
    pub limit: GroupPresentation,
    pub equal: bool,
}

/// Compare `H^n(K•(G↾X))` with `lim^n` over the downward closure of `X` for
/// `n ≤ n_max`.
pub fn lim_char_check<S: InverseSystem>(
    system: &S,
    points: &[S::Index],
    n_max: usize,
) -> Result<Vec<DegreeComparison>> {
    let alt = alternating_complex(system, points, n_max)?;
    let y = system.downward_closure(points);
    let lim = lim_complex(system, &y, n_max)?;
    (0..=n_max)
        .map(|n| {
            let a = alt.cohomology(n)?;
            let l = lim.cohomology(n)?;
            Ok(DegreeComparison {
                degree: n,
                equal: a == l,
                alternating: a,
                limit: l,
            })
        })
        .collect()
}
