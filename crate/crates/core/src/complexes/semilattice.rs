use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exactalg::{Matrix, Scalar};
use crate::omega::InverseSystem;

/// A finite meet-semilattice given by its meet table. Elements are
/// `0..len()`; `x ≤ y` iff `x ∧ y = x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetSemilattice {
    names: Vec<String>,
    meet: Vec<Vec<usize>>,
}

impl MeetSemilattice {
    /// Checks idempotence, commutativity and associativity.
    pub fn from_meet_table(names: Vec<String>, meet: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidSystem("empty semilattice".into()));
        }
        if meet.len() != n || meet.iter().any(|r| r.len() != n || r.iter().any(|&m| m >= n)) {
            return Err(Error::InvalidSystem("meet table is not an n x n table over the elements".into()));
        }
        for a in 0..n {
            if meet[a][a] != a {
                return Err(Error::InvalidSystem(format!("meet is not idempotent at {}", names[a])));
            }
            for b in 0..n {
                if meet[a][b] != meet[b][a] {
                    return Err(Error::InvalidSystem(format!(
                        "meet is not commutative at ({}, {})",
                        names[a], names[b]
                    )));
                }
                for c in 0..n {
                    if meet[meet[a][b]][c] != meet[a][meet[b][c]] {
                        return Err(Error::InvalidSystem(format!(
                            "meet is not associative at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(MeetSemilattice { names, meet })
    }

    /// Build from generating relations `a ≤ b`; every pair must then have a
    /// greatest lower bound.
    pub fn from_order(names: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut le = vec![vec![false; n]; n];
        for (a, row) in le.iter_mut().enumerate() {
            row[a] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(Error::InvalidSystem(format!("order relation ({a}, {b}) names an unknown element")));
            }
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if le[a][b] && le[b][a] {
                    return Err(Error::InvalidSystem(format!(
                        "order has a cycle through {} and {}",
                        names[a], names[b]
                    )));
                }
            }
        }
        let mut meet = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&c| le[c][a] && le[c][b]).collect();
                let glb = lower.iter().copied().find(|&c| lower.iter().all(|&d| le[d][c]));
                meet[a][b] = glb.ok_or_else(|| {
                    Error::InvalidSystem(format!("{} and {} have no greatest lower bound", names[a], names[b]))
                })?;
            }
        }
        Self::from_meet_table(names, meet)
    }

    /// The family of subsets (bitmasks) closed under intersection, ordered by
    /// inclusion.
    pub fn from_subsets(sets: &[u64]) -> Result<Self> {
        let pos: HashMap<u64, usize> = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        if pos.len() != sets.len() {
            return Err(Error::InvalidSystem("repeated subset".into()));
        }
        let names = sets.iter().map(|s| format!("{s:#b}")).collect();
        let mut meet = vec![vec![0; sets.len()]; sets.len()];
        for (a, &s) in sets.iter().enumerate() {
            for (b, &t) in sets.iter().enumerate() {
                meet[a][b] = *pos
                    .get(&(s & t))
                    .ok_or_else(|| Error::InvalidSystem("subset family is not closed under intersection".into()))?;
            }
        }
        Self::from_meet_table(names, meet)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet[a][b] == a
    }

    /// Pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b
                    && self.leq(a, b)
                    && !(0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// An inverse system of free modules over a [`MeetSemilattice`].
#[derive(Clone, Debug)]
pub struct PosetSystem<T: Scalar> {
    lattice: MeetSemilattice,
    block_ranks: Vec<Vec<usize>>,
    bonds: HashMap<(usize, usize), Matrix<T>>,
}

impl<T: Scalar> PosetSystem<T> {
    /// Build from bonds `p_{y,x}` for some pairs `x < y`; the remaining bonds
    /// are composites. Every path must give the same composite, and every
    /// bond must be block diagonal.
    pub fn from_bonds(
        lattice: MeetSemilattice,
        block_ranks: Vec<Vec<usize>>,
        given: Vec<((usize, usize), Matrix<T>)>,
    ) -> Result<Self> {
        let n = lattice.len();
        check_ranks(&lattice, &block_ranks)?;
        let rank = |e: usize| block_ranks[e].iter().sum::<usize>();
        let mut edges: Vec<Vec<(usize, Matrix<T>)>> = vec![Vec::new(); n];
        for ((y, x), m) in given {
            if y >= n || x >= n || x == y || !lattice.leq(x, y) {
                return Err(Error::InvalidSystem(format!("bond ({y} -> {x}) does not go down the order")));
            }
            if m.rows() != rank(x) || m.cols() != rank(y) {
                return Err(Error::InvalidSystem(format!(
                    "bond {} -> {} has shape {}x{}, expected {}x{}",
                    lattice.names[y],
                    lattice.names[x],
                    m.rows(),
                    m.cols(),
                    rank(x),
                    rank(y)
                )));
            }
            edges[y].push((x, m));
        }
        // Process elements from the bottom up so that every bond out of a
        // lower element is known.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&e| (0..n).filter(|&c| lattice.leq(c, e)).count());
        let mut bonds: HashMap<(usize, usize), Matrix<T>> = HashMap::new();
        for &y in &order {
            bonds.insert((y, y), Matrix::identity(rank(y)));
            for x in 0..n {
                if x == y || !lattice.leq(x, y) {
                    continue;
                }
                let mut found: Option<Matrix<T>> = None;
                for (z, m) in &edges[y] {
                    if !lattice.leq(x, *z) {
                        continue;
                    }
                    let candidate = &bonds[&(*z, x)] * m;
                    match &found {
                        None => found = Some(candidate),
                        Some(prev) if *prev != candidate => {
                            return Err(Error::InvalidSystem(format!(
                                "bonds from {} to {} depend on the path",
                                lattice.names[y], lattice.names[x]
                            )))
                        }
                        Some(_) => {}
                    }
                }
                let m = found.ok_or_else(|| {
                    Error::InvalidSystem(format!(
                        "no bond path from {} down to {}",
                        lattice.names[y], lattice.names[x]
                    ))
                })?;
                bonds.insert((y, x), m);
            }
        }
        let sys = PosetSystem {
            lattice,
            block_ranks,
            bonds,
        };
        sys.check_functorial()?;
        Ok(sys)
    }

    /// Build from a function giving every bond `p_{y,x}` with `x ≤ y`.
    pub fn from_fn(
        lattice: MeetSemilattice,
        block_ranks: Vec<Vec<usize>>,
        mut bond: impl FnMut(usize, usize) -> Matrix<T>,
    ) -> Result<Self> {
        check_ranks(&lattice, &block_ranks)?;
        let n = lattice.len();
        let mut bonds = HashMap::new();
        for y in 0..n {
            for x in 0..n {
                if lattice.leq(x, y) {
                    bonds.insert((y, x), bond(y, x));
                }
            }
        }
        let sys = PosetSystem {
            lattice,
            block_ranks,
            bonds,
        };
        sys.check_functorial()?;
        Ok(sys)
    }

    fn check_functorial(&self) -> Result<()> {
        let n = self.lattice.len();
        let names = &self.lattice.names;
        for (&(y, x), m) in &self.bonds {
            let rows = self.block_ranks[x].iter().sum::<usize>();
            let cols = self.block_ranks[y].iter().sum::<usize>();
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::InvalidSystem(format!(
                    "bond {} -> {} has the wrong shape",
                    names[y], names[x]
                )));
            }
            if x == y && *m != Matrix::identity(rows) {
                return Err(Error::InvalidSystem(format!("bond at {} is not the identity", names[x])));
            }
            let ro = offsets(&self.block_ranks[x]);
            let co = offsets(&self.block_ranks[y]);
            for i in 0..rows {
                for j in 0..cols {
                    let bi = ro.partition_point(|&o| o <= i) - 1;
                    let bj = co.partition_point(|&o| o <= j) - 1;
                    if bi != bj && !m[(i, j)].is_zero() {
                        return Err(Error::InvalidSystem(format!(
                            "bond {} -> {} mixes column blocks",
                            names[y], names[x]
                        )));
                    }
                }
            }
        }
        for z in 0..n {
            for y in 0..n {
                if !self.lattice.leq(y, z) {
                    continue;
                }
                for x in 0..n {
                    if self.lattice.leq(x, y) && self.bonds[&(z, x)] != &self.bonds[&(y, x)] * &self.bonds[&(z, y)] {
                        return Err(Error::InvalidSystem(format!(
                            "bonds {} -> {} -> {} do not compose",
                            names[z], names[y], names[x]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &MeetSemilattice {
        &self.lattice
    }

    pub fn all_block_ranks(&self) -> &[Vec<usize>] {
        &self.block_ranks
    }

    /// The given bonds along cover relations, which determine the system.
    pub fn cover_bonds(&self) -> Vec<((usize, usize), Matrix<T>)> {
        self.lattice
            .covers()
            .into_iter()
            .map(|(x, y)| ((y, x), self.bonds[&(y, x)].clone()))
            .collect()
    }
}

fn offsets(ranks: &[usize]) -> Vec<usize> {
    let mut o = vec![0];
    for r in ranks {
        o.push(o.last().unwrap() + r);
    }
    o
}

fn check_ranks(lattice: &MeetSemilattice, block_ranks: &[Vec<usize>]) -> Result<()> {
    if block_ranks.len() != lattice.len() {
        return Err(Error::InvalidSystem(format!(
            "{} elements but {} groups",
            lattice.len(),
            block_ranks.len()
        )));
    }
    let kappa = block_ranks.first().map_or(0, Vec::len);
    if block_ranks.iter().any(|r| r.len() != kappa) {
        return Err(Error::InvalidSystem("groups have different numbers of column blocks".into()));
    }
    Ok(())
}

impl<T: Scalar> InverseSystem for PosetSystem<T> {
    type Scalar = T;
    type Index = usize;

    fn kappa(&self) -> usize {
        self.block_ranks[0].len()
    }

    fn leq(&self, x: &usize, y: &usize) -> bool {
        self.lattice.leq(*x, *y)
    }

    fn meet(&self, x: &usize, y: &usize) -> usize {
        self.lattice.meet(*x, *y)
    }

    fn block_ranks(&self, x: &usize) -> Vec<usize> {
        self.block_ranks[*x].clone()
    }

    fn bond(&self, y: &usize, x: &usize) -> Result<Matrix<T>> {
        self.bonds.get(&(*y, *x)).cloned().ok_or_else(|| Error::NotBelow {
            lower: self.describe(x),
            upper: self.describe(y),
        })
    }

    fn downward_closure(&self, xs: &[usize]) -> Vec<usize> {
        (0..self.lattice.len())
            .filter(|&e| xs.iter().any(|x| self.lattice.leq(e, *x)))
            .collect()
    }

    fn describe(&self, x: &usize) -> String {
        self.lattice.names.get(*x).cloned().unwrap_or_else(|| format!("#{x}"))
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;

    fn v_lattice() -> MeetSemilattice {
        MeetSemilattice::from_order(vec!["z".into(), "x".into(), "y".into()], &[(0, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn v_shape_meets() {
        let l = v_lattice();
        assert_eq!(l.meet(1, 2), 0);
        assert!(l.leq(0, 1) && !l.leq(1, 2));
        assert_eq!(l.covers().len(), 2);
    }

    #[test]
    fn missing_meet_is_rejected() {
        // Two minimal elements below both tops.
        let names = ["a", "b", "c", "d"].map(String::from).to_vec();
        assert!(MeetSemilattice::from_order(names, &[(0, 2), (0, 3), (1, 2), (1, 3)]).is_err());
    }

    #[test]
    fn subset_family() {
        assert!(MeetSemilattice::from_subsets(&[0b01, 0b10]).is_err());
        let l = MeetSemilattice::from_subsets(&[0b00, 0b01, 0b10, 0b11]).unwrap();
        assert_eq!(l.meet(1, 2), 0);
        assert!(l.leq(1, 3));
    }

    #[test]
    fn bonds_compose_and_paths_must_agree() {
        let l = MeetSemilattice::from_order(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (1, 2)]).unwrap();
        let two = Matrix::<BigInt>::from_i64(&[&[2]]);
        let three = Matrix::<BigInt>::from_i64(&[&[3]]);
        let s = PosetSystem::from_bonds(
            l.clone(),
            vec![vec![1]; 3],
            vec![((1, 0), two.clone()), ((2, 1), three.clone())],
        )
        .unwrap();
        assert_eq!(s.bond(&2, &0).unwrap(), Matrix::from_i64(&[&[6]]));
        let bad = PosetSystem::from_bonds(l, vec![vec![1]; 3], vec![((1, 0), two), ((2, 1), three.clone()), ((2, 0), three)]);
        assert!(bad.is_err());
    }
}
