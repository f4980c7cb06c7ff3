//! Families on a finite index set, coherence, and trivializations.
//!
//! A [`Family`] of arity `n` assigns to each strictly increasing `n`-tuple
//! `x⃗` of its points a vector in `G_{⋀x⃗}` (or `G_{⋀x⃗ ∧ g}` when capped
//! below `g`). With a [`NegligibleIdeal`] `J`:
//!
//! * `Φ` is coherent when every value of `dΦ` is supported in `J`;
//! * a type II witness is a `J`-supported `Ψ` of the same arity with
//!   `dΨ = dΦ`;
//! * a type I witness for arity 1 is a compatible family `ψ` (an element of
//!   the limit) with `Φ_f − ψ_f` supported in `J`, and for arity `n > 1` a
//!   family `Ψ` of arity `n − 1` with `Φ − dΨ` supported in `J`.
//!
//! Every bond is block diagonal, so each solver splits into one exact linear
//! system per column.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::complexes::{increasing_tuples, Layout, Restriction};
use crate::error::{Error, Result};
use crate::exactalg::{solve_linear, Matrix, Scalar, SparseMatrix};
use crate::omega::{IndexLike, InverseSystem, NegligibleIdeal};

/// Values on the strictly increasing `arity`-tuples of `points`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family<I, T> {
    points: Vec<I>,
    cap: Option<I>,
    arity: usize,
    values: BTreeMap<Vec<usize>, Vec<T>>,
}

pub type SystemFamily<S> = Family<<S as InverseSystem>::Index, <S as InverseSystem>::Scalar>;

impl<I: IndexLike, T: Scalar> Family<I, T> {
    pub fn zero<S>(system: &S, points: Vec<I>, cap: Option<I>, arity: usize) -> Result<Self>
    where
        S: InverseSystem<Index = I, Scalar = T>,
    {
        let r = Restriction::new(system, points, cap)?;
        if arity == 0 {
            return Err(Error::Contract("families have arity at least 1".into()));
        }
        let values = increasing_tuples(r.points.len(), arity)
            .into_iter()
            .map(|t| {
                let dim = system.rank(&r.tuple_meet(&t));
                (t, vec![T::zero(); dim])
            })
            .collect();
        Ok(Family {
            points: r.points,
            cap: r.cap,
            arity,
            values,
        })
    }

    /// Build from explicit values; tuples not listed are zero.
    pub fn from_values<S>(
        system: &S,
        points: Vec<I>,
        cap: Option<I>,
        arity: usize,
        values: impl IntoIterator<Item = (Vec<usize>, Vec<T>)>,
    ) -> Result<Self>
    where
        S: InverseSystem<Index = I, Scalar = T>,
    {
        let mut fam = Self::zero(system, points, cap, arity)?;
        for (t, v) in values {
            fam.set(&t, v)?;
        }
        Ok(fam)
    }

    pub fn points(&self) -> &[I] {
        &self.points
    }

    pub fn cap(&self) -> Option<&I> {
        self.cap.as_ref()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<T>)> {
        self.values.iter()
    }

    pub fn get(&self, tuple: &[usize]) -> Option<&[T]> {
        self.values.get(tuple).map(Vec::as_slice)
    }

    pub fn set(&mut self, tuple: &[usize], value: Vec<T>) -> Result<()> {
        let slot = self
            .values
            .get_mut(tuple)
            .ok_or_else(|| Error::Contract(format!("{tuple:?} is not an increasing {}-tuple of the index set", self.arity)))?;
        if slot.len() != value.len() {
            return Err(Error::DimensionMismatch {
                context: "family value",
                expected: slot.len(),
                found: value.len(),
            });
        }
        *slot = value;
        Ok(())
    }

    /// The alternating extension to arbitrary tuples: the value at the sorted
    /// tuple times the sign of the sorting permutation, and zero on tuples
    /// with a repeated entry.
    pub fn alternating_value(&self, tuple: &[usize]) -> Option<Vec<T>> {
        let (sign, sorted) = sort_with_sign(tuple)?;
        let v = self.values.get(&sorted)?;
        Some(if sign { v.iter().map(|x| -x.clone()).collect() } else { v.clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.iter().all(Zero::is_zero))
    }

    /// Flatten in lexicographic tuple order.
    pub fn to_vector(&self) -> Vec<T> {
        self.values.values().flat_map(|v| v.iter().cloned()).collect()
    }

    fn from_vector_like(&self, arity: usize, layout: &Layout, v: &[T]) -> Self {
        let values = layout
            .cells
            .iter()
            .enumerate()
            .map(|(k, t)| (t.clone(), v[layout.range(k)].to_vec()))
            .collect();
        Family {
            points: self.points.clone(),
            cap: self.cap.clone(),
            arity,
            values,
        }
    }

    pub fn map_values(&self, mut f: impl FnMut(&[usize], &[T]) -> Vec<T>) -> Self {
        Family {
            points: self.points.clone(),
            cap: self.cap.clone(),
            arity: self.arity,
            values: self.values.iter().map(|(t, v)| (t.clone(), f(t, v))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.map_values(|t, v| v.iter().zip(&other.values[t]).map(|(a, b)| a.clone() + b.clone()).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.map_values(|t, v| v.iter().zip(&other.values[t]).map(|(a, b)| a.clone() - b.clone()).collect()))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.points != other.points || self.cap != other.cap || self.arity != other.arity {
            return Err(Error::Contract("families live on different index sets or arities".into()));
        }
        Ok(())
    }

    /// The subfamily on the points at `positions` (kept in the given order,
    /// which must be increasing).
    pub fn restrict<S>(&self, system: &S, positions: &[usize]) -> Result<Self>
    where
        S: InverseSystem<Index = I, Scalar = T>,
    {
        if positions.windows(2).any(|w| w[0] >= w[1]) || positions.last().is_some_and(|&p| p >= self.points.len()) {
            return Err(Error::Contract("restriction positions must be increasing and in range".into()));
        }
        let points = positions.iter().map(|&p| self.points[p].clone()).collect();
        let mut out = Self::zero(system, points, self.cap.clone(), self.arity)?;
        for t in increasing_tuples(positions.len(), self.arity) {
            let orig: Vec<usize> = t.iter().map(|&i| positions[i]).collect();
            out.values.insert(t, self.values[&orig].clone());
        }
        Ok(out)
    }

    /// Columns where some value is nonzero.
    pub fn support<S>(&self, system: &S) -> Result<BTreeSet<usize>>
    where
        S: InverseSystem<Index = I, Scalar = T>,
    {
        let r = self.restriction(system)?;
        let mut out = BTreeSet::new();
        for (t, v) in &self.values {
            out.extend(system.column_support(&r.tuple_meet(t), v)?);
        }
        Ok(out)
    }

    pub fn restriction<'a, S>(&self, system: &'a S) -> Result<Restriction<'a, S>>
    where
        S: InverseSystem<Index = I, Scalar = T>,
    {
        Restriction::new(system, self.points.clone(), self.cap.clone())
    }

    /// Zero every block in a column outside `keep`.
    pub fn keep_columns<S>(&self, system: &S, keep: &BTreeSet<usize>) -> Result<Self>
    where
        S: InverseSystem<Index = I, Scalar = T>,
    {
        let r = self.restriction(system)?;
        Ok(self.map_values(|t, v| {
            let off = system.block_offsets(&r.tuple_meet(t));
            let mut w = v.to_vec();
            for a in 0..system.kappa() {
                if !keep.contains(&a) {
                    for x in &mut w[off[a]..off[a + 1]] {
                        *x = T::zero();
                    }
                }
            }
            w
        }))
    }
}

/// Sort a tuple, returning whether the permutation was odd; `None` on a
/// repeated entry.
pub fn sort_with_sign(tuple: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut v = tuple.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((odd, v))
}

pub fn family_differential<S: InverseSystem>(system: &S, phi: &SystemFamily<S>) -> Result<SystemFamily<S>> {
    let r = phi.restriction(system)?;
    let d = r.differential(phi.arity)?;
    let out = d.mul_vec(&phi.to_vector())?;
    Ok(phi.from_vector_like(phi.arity + 1, &r.layout(phi.arity + 1), &out))
}

/// Whether every value of `dΦ` is supported in the ideal.
pub fn is_coherent<S: InverseSystem>(system: &S, phi: &SystemFamily<S>, ideal: &NegligibleIdeal) -> Result<bool> {
    Ok(ideal.covers(&family_differential(system, phi)?.support(system)?))
}

/// `x⃗ ↦ column support of dΦ(x⃗)` over all `(n+1)`-tuples.
pub fn coherence_color<S: InverseSystem>(
    system: &S,
    phi: &SystemFamily<S>,
) -> Result<BTreeMap<Vec<usize>, BTreeSet<usize>>> {
    let d = family_differential(system, phi)?;
    let r = d.restriction(system)?;
    d.values
        .iter()
        .map(|(t, v)| Ok((t.clone(), system.column_support(&r.tuple_meet(t), v)?)))
        .collect()
}

/// Global coordinates of the column-`α` blocks in a layout.
fn column_coords<S: InverseSystem>(r: &Restriction<'_, S>, layout: &Layout, alpha: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for (k, t) in layout.cells.iter().enumerate() {
        let off = r.system.block_offsets(&r.tuple_meet(t));
        out.extend((off[alpha]..off[alpha + 1]).map(|i| layout.offsets[k] + i));
    }
    out
}

fn submatrix<T: Scalar>(d: &SparseMatrix<T>, rows: &[usize], cols: &[usize]) -> Matrix<T> {
    let mut m = Matrix::zeros(rows.len(), cols.len());
    let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    for (a, &i) in rows.iter().enumerate() {
        for (j, v) in d.row_entries(i) {
            if let Some(&b) = col_pos.get(&j) {
                m[(a, b)] = v.clone();
            }
        }
    }
    m
}

/// Solve `d y = target` one column at a time. `free(α)` says whether the
/// column-`α` unknowns may be nonzero, and `constrained(α)` whether the
/// column-`α` equations must hold.
fn solve_columnwise<S: InverseSystem>(
    r: &Restriction<'_, S>,
    src_len: usize,
    target: &[S::Scalar],
    free: impl Fn(usize) -> bool,
    constrained: impl Fn(usize) -> bool,
) -> Result<Option<Vec<S::Scalar>>> {
    let d = r.differential(src_len)?;
    let src = r.layout(src_len);
    let dst = r.layout(src_len + 1);
    let mut y = vec![S::Scalar::zero(); src.dim()];
    for alpha in 0..r.system.kappa() {
        if !constrained(alpha) {
            continue;
        }
        let rows = column_coords(r, &dst, alpha);
        let b: Vec<S::Scalar> = rows.iter().map(|&i| target[i].clone()).collect();
        if !free(alpha) {
            if b.iter().any(|x| !x.is_zero()) {
                return Ok(None);
            }
            continue;
        }
        let cols = column_coords(r, &src, alpha);
        let m = submatrix(&d, &rows, &cols);
        match solve_linear(&m, &b)? {
            Some(sol) => {
                for (k, &j) in cols.iter().enumerate() {
                    y[j] = sol[k].clone();
                }
            }
            None => return Ok(None),
        }
    }
    Ok(Some(y))
}

/// A `J`-supported `Ψ` of the same arity with `dΨ = dΦ`.
pub fn find_type2<S: InverseSystem>(
    system: &S,
    phi: &SystemFamily<S>,
    ideal: &NegligibleIdeal,
) -> Result<Option<SystemFamily<S>>> {
    let r = phi.restriction(system)?;
    let target = family_differential(system, phi)?.to_vector();
    let sol = solve_columnwise(&r, phi.arity, &target, |a| ideal.contains(a), |_| true)?;
    Ok(sol.map(|y| phi.from_vector_like(phi.arity, &r.layout(phi.arity), &y)))
}

/// A type I witness: for arity 1 a compatible family `ψ` on the points,
/// otherwise `Ψ` of arity `n − 1`.
pub fn find_type1<S: InverseSystem>(
    system: &S,
    phi: &SystemFamily<S>,
    ideal: &NegligibleIdeal,
) -> Result<Option<SystemFamily<S>>> {
    let r = phi.restriction(system)?;
    if phi.arity == 1 {
        return find_compatible(&r, phi, ideal);
    }
    let target = phi.to_vector();
    let sol = solve_columnwise(&r, phi.arity - 1, &target, |_| true, |a| !ideal.contains(a))?;
    Ok(sol.map(|y| phi.from_vector_like(phi.arity - 1, &r.layout(phi.arity - 1), &y)))
}

/// `ψ` with `dψ = 0` and `ψ = Φ` on the columns outside the ideal.
fn find_compatible<S: InverseSystem>(
    r: &Restriction<'_, S>,
    phi: &SystemFamily<S>,
    ideal: &NegligibleIdeal,
) -> Result<Option<SystemFamily<S>>> {
    let d = r.differential(1)?;
    let src = r.layout(1);
    let dst = r.layout(2);
    let phi_v = phi.to_vector();
    let mut y = vec![S::Scalar::zero(); src.dim()];
    for alpha in 0..r.system.kappa() {
        let cols = column_coords(r, &src, alpha);
        let rows = column_coords(r, &dst, alpha);
        let mut m = submatrix(&d, &rows, &cols).to_rows();
        let mut b = vec![S::Scalar::zero(); rows.len()];
        if !ideal.contains(alpha) {
            for (k, &j) in cols.iter().enumerate() {
                let mut row = vec![S::Scalar::zero(); cols.len()];
                row[k] = S::Scalar::one();
                m.push(row);
                b.push(phi_v[j].clone());
            }
        }
        if cols.is_empty() || m.is_empty() {
            continue;
        }
        let m = Matrix::from_rows(m)?;
        match solve_linear(&m, &b)? {
            Some(sol) => {
                for (k, &j) in cols.iter().enumerate() {
                    y[j] = sol[k].clone();
                }
            }
            None => return Ok(None),
        }
    }
    Ok(Some(phi.from_vector_like(1, &src, &y)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrivialityKind {
    TypeI,
    TypeII,
}

/// Re-check the defining conditions of a trivialization.
pub fn verify_trivialization<S: InverseSystem>(
    system: &S,
    phi: &SystemFamily<S>,
    witness: &SystemFamily<S>,
    kind: TrivialityKind,
    ideal: &NegligibleIdeal,
) -> Result<bool> {
    if witness.points != phi.points || witness.cap != phi.cap {
        return Err(Error::Contract("witness lives on a different index set".into()));
    }
    let expected = match (kind, phi.arity) {
        (TrivialityKind::TypeII, n) | (TrivialityKind::TypeI, n @ 1) => n,
        (TrivialityKind::TypeI, n) => n - 1,
    };
    if witness.arity != expected {
        return Err(Error::DimensionMismatch {
            context: "witness arity",
            expected,
            found: witness.arity,
        });
    }
    match kind {
        TrivialityKind::TypeII => Ok(ideal.covers(&witness.support(system)?)
            && family_differential(system, witness)? == family_differential(system, phi)?),
        TrivialityKind::TypeI if phi.arity == 1 => Ok(family_differential(system, witness)?.is_zero()
            && ideal.covers(&phi.sub(witness)?.support(system)?)),
        TrivialityKind::TypeI => {
            let d = family_differential(system, witness)?;
            Ok(ideal.covers(&phi.sub(&d)?.support(system)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::complexes::{MeetSemilattice, PosetSystem};

    fn v_system() -> PosetSystem<BigInt> {
        let l = MeetSemilattice::from_order(vec!["z".into(), "x".into(), "y".into()], &[(0, 1), (0, 2)]).unwrap();
        let m = Matrix::from_i64(&[&[2]]);
        PosetSystem::from_bonds(l, vec![vec![1]; 3], vec![((1, 0), m.clone()), ((2, 0), m)]).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn sign_of_sorting() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((false, vec![0, 1, 2])));
        assert_eq!(sort_with_sign(&[1, 0]), Some((true, vec![0, 1])));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn two_point_differential() {
        let s = v_system();
        let phi = Family::from_values(&s, vec![1, 2], None, 1, [(vec![0], ints(&[3])), (vec![1], ints(&[5]))]).unwrap();
        let d = family_differential(&s, &phi).unwrap();
        assert_eq!(d.get(&[0, 1]).unwrap(), ints(&[4]).as_slice());
        assert!(!is_coherent(&s, &phi, &NegligibleIdeal::empty()).unwrap());
        assert!(is_coherent(&s, &phi, &NegligibleIdeal::new([0], 1).unwrap()).unwrap());
    }

    #[test]
    fn obstruction_in_arity_two() {
        let s = v_system();
        let phi = Family::from_values(&s, vec![1, 2], None, 2, [(vec![0, 1], ints(&[1]))]).unwrap();
        let j = NegligibleIdeal::empty();
        assert!(is_coherent(&s, &phi, &j).unwrap());
        assert_eq!(find_type1(&s, &phi, &j).unwrap(), None);
        let psi = find_type2(&s, &phi, &j).unwrap().unwrap();
        assert!(verify_trivialization(&s, &phi, &psi, TrivialityKind::TypeII, &j).unwrap());
        let even = Family::from_values(&s, vec![1, 2], None, 2, [(vec![0, 1], ints(&[4]))]).unwrap();
        let w = find_type1(&s, &even, &j).unwrap().unwrap();
        assert!(verify_trivialization(&s, &even, &w, TrivialityKind::TypeI, &j).unwrap());
    }

    #[test]
    fn arity_one_type1_is_a_compatible_family() {
        let s = v_system();
        let phi = Family::from_values(&s, vec![1, 2], None, 1, [(vec![0], ints(&[3])), (vec![1], ints(&[3]))]).unwrap();
        let j = NegligibleIdeal::empty();
        let psi = find_type1(&s, &phi, &j).unwrap().unwrap();
        assert_eq!(psi, phi);
        assert!(verify_trivialization(&s, &phi, &psi, TrivialityKind::TypeI, &j).unwrap());
        let bad = Family::from_values(&s, vec![1, 2], None, 1, [(vec![0], ints(&[3]))]).unwrap();
        assert_eq!(find_type1(&s, &bad, &j).unwrap(), None);
        let corrupted = psi.map_values(|_, v| v.iter().map(|x| x + 1).collect());
        assert!(!verify_trivialization(&s, &bad, &corrupted, TrivialityKind::TypeI, &j).unwrap());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let s = v_system();
        let phi = Family::zero(&s, vec![1, 2], None, 2).unwrap();
        let w = Family::zero(&s, vec![1, 2], None, 2).unwrap();
        assert!(verify_trivialization(&s, &phi, &w, TrivialityKind::TypeI, &NegligibleIdeal::empty()).is_err());
    }
}
