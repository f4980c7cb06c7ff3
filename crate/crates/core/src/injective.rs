//! Injectivity of Ω_κ systems, sections of the bonds, and vanishing of
//! higher cohomology.
//!
//! A system is injective iff every one-step bond is surjective, every group
//! is divisible, and for each bond `p : I_{n+1} → I_n`, multiplier `m ≠ 0`
//! and `x` with `p(x) = m y`, some `z` has `m z = x` and `p(z) = y`. With
//! free coefficient modules all three conditions are decided exactly: over
//! `Q` the last two always hold, and over `Z` divisibility forces the groups
//! to vanish while the lifting condition says the bond is a split injection.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complexes::alternating_complex;
use crate::error::{Error, Result};
use crate::exactalg::{right_section, smith_normal_form, Domain, Matrix, Scalar};
use crate::omega::{IndexFunction, InverseSystem, OmegaSystem};

/// Why a system fails to be injective.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InjectivityWitness {
    /// The bond `G_{α,k+1} → G_{α,k}` is not surjective.
    NotSurjective { column: usize, level: usize },
    /// The basis vector `e_0` of `G_{α,k}` is not divisible by 2.
    NotDivisible { column: usize, level: usize },
    /// `p(x)` is divisible by `multiplier` but `x` is not.
    LiftingFails {
        column: usize,
        level: usize,
        multiplier: BigInt,
        x: Vec<BigInt>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityReport {
    pub cond1_surjective: bool,
    pub cond2_divisible: bool,
    pub cond3_lifting: bool,
    /// The first failure found, in the order of the three conditions.
    pub witness: Option<InjectivityWitness>,
}

impl InjectivityReport {
    pub fn injective(&self) -> bool {
        self.cond1_surjective && self.cond2_divisible && self.cond3_lifting
    }
}

fn is_split_surjection<T: Scalar>(m: &Matrix<T>) -> bool {
    let diag = smith_normal_form(m).diagonal();
    diag.len() == m.rows() && diag.iter().all(Scalar::is_unit)
}

pub fn check_injective<T: Scalar>(system: &OmegaSystem<T>) -> InjectivityReport {
    let mut witnesses = [None, None, None];
    for (column, tower) in system.one_step_bonds().iter().enumerate() {
        for (level, bond) in tower.iter().enumerate() {
            if witnesses[0].is_none() && !is_split_surjection(bond) {
                witnesses[0] = Some(InjectivityWitness::NotSurjective { column, level });
            }
            if witnesses[2].is_none() && T::DOMAIN == Domain::Int {
                witnesses[2] = lifting_failure(bond, column, level);
            }
        }
    }
    if T::DOMAIN == Domain::Int {
        'outer: for (column, ranks) in system.ranks().iter().enumerate() {
            for (level, &r) in ranks.iter().enumerate() {
                if r > 0 {
                    witnesses[1] = Some(InjectivityWitness::NotDivisible { column, level });
                    break 'outer;
                }
            }
        }
    }
    let [w1, w2, w3] = witnesses;
    InjectivityReport {
        cond1_surjective: w1.is_none(),
        cond2_divisible: w2.is_none(),
        cond3_lifting: w3.is_none(),
        witness: w1.or(w2).or(w3),
    }
}

/// Over `Z`: in Smith coordinates `p = U⁻¹ S V⁻¹`, a zero or non-unit
/// diagonal entry at `i` makes the `i`-th column of `V` a counterexample.
fn lifting_failure<T: Scalar>(bond: &Matrix<T>, column: usize, level: usize) -> Option<InjectivityWitness> {
    let d = smith_normal_form(bond);
    let diag = d.diagonal();
    let bad = (0..bond.cols()).find(|&i| i >= diag.len() || !diag[i].is_unit())?;
    let multiplier = match diag.get(bad) {
        Some(f) => smallest_prime_factor(&f.as_integer().expect("integer factor")),
        None => BigInt::from(2),
    };
    let x = d.v.column(bad).iter().map(|e| e.as_integer().expect("integer entry")).collect();
    Some(InjectivityWitness::LiftingFails {
        column,
        level,
        multiplier,
        x,
    })
}

fn smallest_prime_factor(n: &BigInt) -> BigInt {
    let n = if n < &BigInt::zero() { -n } else { n.clone() };
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            return p;
        }
        p += 1;
    }
    n
}

/// Right inverses `i_{α,k} : G_{α,k} → G_{α,k+1}` of the one-step bonds and
/// their block-diagonal composites `i_{fg}`.
#[derive(Clone, Debug)]
pub struct ExtensionFamily<T: Scalar> {
    sections: Vec<Vec<Matrix<T>>>,
    // composites[α][k][j] = i_{α,k,j} for j ≥ k, indexed by j − k.
    composites: Vec<Vec<Vec<Matrix<T>>>>,
}

impl<T: Scalar> ExtensionFamily<T> {
    pub fn one_step(&self, column: usize, level: usize) -> &Matrix<T> {
        &self.sections[column][level]
    }

    /// `i_{fg} : G_f → G_g` for `f ≤ g`.
    pub fn section(&self, f: &IndexFunction, g: &IndexFunction) -> Result<Matrix<T>> {
        if !f.leq(g) {
            return Err(Error::NotBelow {
                lower: f.to_string(),
                upper: g.to_string(),
            });
        }
        let blocks: Vec<Matrix<T>> = (0..f.len())
            .map(|a| self.composites[a][f.0[a]][g.0[a] - f.0[a]].clone())
            .collect();
        Ok(Matrix::block_diag(&blocks))
    }
}

pub fn extension_family<T: Scalar>(system: &OmegaSystem<T>) -> Result<ExtensionFamily<T>> {
    let mut sections = Vec::new();
    for (column, tower) in system.one_step_bonds().iter().enumerate() {
        let mut col = Vec::new();
        for (level, bond) in tower.iter().enumerate() {
            col.push(right_section(bond).ok_or_else(|| {
                Error::Hypothesis(format!("bond at (alpha={column}, k={level}) has no section"))
            })?);
        }
        sections.push(col);
    }
    let composites = system
        .ranks()
        .iter()
        .zip(&sections)
        .map(|(ranks, secs)| {
            (0..ranks.len())
                .map(|k| {
                    let mut chain = vec![Matrix::identity(ranks[k])];
                    for j in k..ranks.len() - 1 {
                        let next = &secs[j] * chain.last().unwrap();
                        chain.push(next);
                    }
                    chain
                })
                .collect()
        })
        .collect();
    Ok(ExtensionFamily { sections, composites })
}

/// Whether `H^n(K•(I↾X)) = 0` for `1 ≤ n ≤ n_max`; the system must pass
/// [`check_injective`].
pub fn verify_vanishing<T: Scalar>(system: &OmegaSystem<T>, points: &[IndexFunction], n_max: usize) -> Result<bool> {
    let report = check_injective(system);
    if !report.injective() {
        return Err(Error::Hypothesis(format!("system is not injective: {:?}", report.witness)));
    }
    let complex = alternating_complex(system, points, n_max)?;
    for n in 1..=n_max {
        if !complex.cohomology(n)?.is_trivial() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Columns where `v ∈ G_f` is nonzero but `i_{fg}(v)` is not supported in
/// the same columns; empty when sections respect supports.
pub fn support_leak<T: Scalar>(
    system: &OmegaSystem<T>,
    ext: &ExtensionFamily<T>,
    f: &IndexFunction,
    g: &IndexFunction,
    v: &[T],
) -> Result<BTreeSet<usize>> {
    let before = system.column_support(f, v)?;
    let after = system.column_support(g, &ext.section(f, g)?.mul_vec(v)?)?;
    Ok(after.difference(&before).copied().collect())
}

/// The identity map `p_{g,f} · i_{fg}` check.
pub fn section_is_right_inverse<T: Scalar>(
    system: &OmegaSystem<T>,
    ext: &ExtensionFamily<T>,
    f: &IndexFunction,
    g: &IndexFunction,
) -> Result<bool> {
    let p = system.bond(g, f)?;
    let i = ext.section(f, g)?;
    Ok(&p * &i == Matrix::identity(system.rank(f)))
}
