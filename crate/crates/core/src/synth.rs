//! Seeded generators for systems, families, Δ-systems and partition
//! instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coherence::{coherence_color, family_differential, Family};
use crate::complexes::{increasing_tuples, MeetSemilattice, PosetSystem};
use crate::deltasys::{fit_colors, subsets_upto, strings, Coloring, PartitionInstance, SetFamily, UniformWitness};
use crate::error::{Error, Result};
use crate::exactalg::{smith_diagonal, Int, Matrix, Rat, Scalar};
use crate::omega::{IndexFunction, InverseSystem, NegligibleIdeal, OmegaSystem};

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix<T: Scalar>(rng: &mut Rng64, rows: usize, cols: usize, bound: i64) -> Matrix<T> {
    let data = (0..rows * cols).map(|_| T::from_i64(rng.gen_range(-bound..=bound))).collect();
    Matrix::from_vec(rows, cols, data).expect("sizes match")
}

pub fn random_vector<T: Scalar>(rng: &mut Rng64, len: usize, bound: i64) -> Vec<T> {
    (0..len).map(|_| T::from_i64(rng.gen_range(-bound..=bound))).collect()
}

/// Shape bounds for random Ω systems.
#[derive(Clone, Copy, Debug)]
pub struct OmegaParams {
    pub kappa: usize,
    /// Largest level index of a tower.
    pub max_height: usize,
    pub max_rank: usize,
    pub entry_bound: i64,
}

/// Towers of random heights, ranks and bonds.
pub fn random_omega_system<T: Scalar>(rng: &mut Rng64, p: &OmegaParams) -> OmegaSystem<T> {
    let mut ranks = Vec::new();
    let mut bonds = Vec::new();
    for _ in 0..p.kappa {
        let h = rng.gen_range(0..=p.max_height);
        let r: Vec<usize> = (0..=h).map(|_| rng.gen_range(0..=p.max_rank)).collect();
        bonds.push((0..h).map(|k| random_matrix(rng, r[k], r[k + 1], p.entry_bound)).collect());
        ranks.push(r);
    }
    OmegaSystem::new(ranks, bonds).expect("shapes are consistent by construction")
}

/// Towers whose ranks never decrease and whose bonds are surjective, so the
/// rational system is injective. Column 0 has rank at least 1 everywhere.
pub fn random_injective_system(rng: &mut Rng64, kappa: usize, height: usize, max_rank: usize, bound: i64) -> OmegaSystem<Rat> {
    let mut ranks = Vec::new();
    let mut bonds = Vec::new();
    for col in 0..kappa {
        let mut r = vec![rng.gen_range(usize::from(col == 0)..=max_rank)];
        for _ in 0..height {
            let last = *r.last().unwrap();
            r.push(rng.gen_range(last..=max_rank));
        }
        let tower = (0..height).map(|k| surjection(rng, r[k], r[k + 1], bound)).collect();
        ranks.push(r);
        bonds.push(tower);
    }
    OmegaSystem::new(ranks, bonds).expect("shapes are consistent by construction")
}

fn surjection(rng: &mut Rng64, rows: usize, cols: usize, bound: i64) -> Matrix<Rat> {
    loop {
        let m: Matrix<Rat> = random_matrix(rng, rows, cols, bound.max(1));
        if smith_diagonal(&m).len() == rows {
            return m;
        }
    }
}

/// Up to `count` distinct index functions below the top of the system.
pub fn random_points<T: Scalar>(rng: &mut Rng64, system: &OmegaSystem<T>, count: usize) -> Vec<IndexFunction> {
    let heights = system.heights();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..count * 8 {
        if out.len() == count {
            break;
        }
        let p = IndexFunction::new(heights.iter().map(|&h| rng.gen_range(0..=h)).collect());
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

/// A random intersection-closed family of subsets of `{0, …, ground−1}`
/// with at most `max_elems` members, one column, `G_x = Z^{|x|}`, and
/// bonds `U_x D_{y,x} U_y^{-1}` with `D` scaling coordinate `i` by
/// `m_i^{|y|−|x|}` and `U` random unimodular.
pub fn random_subset_system(rng: &mut Rng64, ground: usize, max_elems: usize) -> PosetSystem<Int> {
    let sets = loop {
        let mut sets: BTreeSet<u64> = BTreeSet::new();
        let min_size = 2.min(ground as u32);
        let eligible = (0..1u64 << ground).filter(|s| s.count_ones() >= min_size).count();
        let k = rng.gen_range(1..=max_elems.min(eligible).max(1));
        // Generators with two or more elements make wide meets likely.
        while sets.len() < k {
            let s: u64 = rng.gen_range(0..1u64 << ground);
            if s.count_ones() >= min_size {
                sets.insert(s);
            }
        }
        let mut closed = sets.clone();
        loop {
            let snapshot: Vec<u64> = closed.iter().copied().collect();
            let before = closed.len();
            for &a in &snapshot {
                for &b in &snapshot {
                    closed.insert(a & b);
                }
            }
            if closed.len() == before {
                break;
            }
        }
        if closed.len() <= max_elems {
            break closed.into_iter().collect::<Vec<u64>>();
        }
    };
    let lattice = MeetSemilattice::from_subsets(&sets).expect("closed under intersection");
    let mult: Vec<i64> = (0..ground).map(|_| rng.gen_range(1..=3)).collect();
    let dims: Vec<usize> = sets.iter().map(|s| s.count_ones() as usize).collect();
    let unimodular: Vec<(Matrix<Int>, Matrix<Int>)> = dims.iter().map(|&d| random_unimodular(rng, d)).collect();
    let members = |s: u64| (0..ground).filter(move |i| s >> i & 1 == 1);
    let ranks = dims.iter().map(|&d| vec![d]).collect();
    PosetSystem::from_fn(lattice, ranks, |y, x| {
        let (sy, sx) = (sets[y], sets[x]);
        let gap = (dims[y] - dims[x]) as u32;
        let ys: Vec<usize> = members(sy).collect();
        let mut d = Matrix::zeros(dims[x], dims[y]);
        for (r, i) in members(sx).enumerate() {
            let c = ys.iter().position(|&j| j == i).expect("x ⊆ y");
            d[(r, c)] = Int::from(mult[i].pow(gap));
        }
        &(&unimodular[x].0 * &d) * &unimodular[y].1
    })
    .expect("bonds are functorial by construction")
}

/// A random unimodular integer matrix and its inverse.
fn random_unimodular(rng: &mut Rng64, n: usize) -> (Matrix<Int>, Matrix<Int>) {
    let mut u = Matrix::identity(n);
    let mut inv = Matrix::identity(n);
    if n < 2 {
        return (u, inv);
    }
    for _ in 0..3 {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = rng.gen_range(-1i64..=1);
        let mut e = Matrix::identity(n);
        e[(i, j)] = Int::from(c);
        let mut e_inv = Matrix::identity(n);
        e_inv[(i, j)] = Int::from(-c);
        u = &e * &u;
        inv = &inv * &e_inv;
    }
    (u, inv)
}

/// Random values on every tuple, zero outside `columns`.
pub fn random_family<S: InverseSystem>(
    rng: &mut Rng64,
    system: &S,
    points: Vec<S::Index>,
    cap: Option<S::Index>,
    arity: usize,
    bound: i64,
    columns: impl Fn(usize) -> bool,
) -> Result<Family<S::Index, S::Scalar>> {
    let fam = Family::zero(system, points, cap, arity)?;
    let keep: BTreeSet<usize> = (0..system.kappa()).filter(|&c| columns(c)).collect();
    let random = fam.map_values(|_, v| random_vector(rng, v.len(), bound));
    random.keep_columns(system, &keep)
}

/// `dΘ + Ψ₀` with `Θ` random of arity `n − 1` and `Ψ₀` random and
/// supported in the ideal; for arity 1, the projections of one random
/// element above all points plus ideal-supported noise.
pub fn coherent_family<T: Scalar>(
    rng: &mut Rng64,
    system: &OmegaSystem<T>,
    points: Vec<IndexFunction>,
    arity: usize,
    ideal: &NegligibleIdeal,
    bound: i64,
) -> Result<Family<IndexFunction, T>> {
    let noise = random_family(rng, system, points.clone(), None, arity, bound, |c| ideal.contains(c))?;
    let base = if arity == 1 {
        let kappa = system.kappa();
        let top = IndexFunction::new((0..kappa).map(|c| points.iter().map(|q| q.0[c]).max().unwrap_or(0)).collect());
        let v: Vec<T> = random_vector(rng, system.rank(&top), bound);
        let mut fam = Family::zero(system, points.clone(), None, 1)?;
        for (i, q) in points.iter().enumerate() {
            fam.set(&[i], system.bond(&top, q)?.mul_vec(&v)?)?;
        }
        fam
    } else {
        let theta = random_family(rng, system, points.clone(), None, arity - 1, bound, |_| true)?;
        family_differential(system, &theta)?
    };
    base.add(&noise)
}

/// A uniform `n`-dimensional Δ-system planted on `H`: position `i` of
/// `u_b` carries `i·M + code(b restricted to D(i))` for random
/// `D(i) ⊆ {0, …, n−1}`, so the template of pattern `m` is
/// `{i | D(i) ⊆ m}`.
#[derive(Clone, Debug)]
pub struct PlantedUniform {
    pub h: Vec<usize>,
    pub n: usize,
    pub u: SetFamily,
    pub witness: UniformWitness,
}

pub fn planted_uniform(rng: &mut Rng64, h: Vec<usize>, n: usize, rho: usize) -> PlantedUniform {
    let base = h.iter().max().map_or(1, |m| m + 2);
    let m = base.pow(n as u32) + 1;
    let d: Vec<Vec<usize>> = (0..rho)
        .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    let mut u = SetFamily::new();
    for idx in increasing_tuples(h.len(), n) {
        let b: Vec<usize> = idx.iter().map(|&i| h[i]).collect();
        let ub = (0..rho)
            .map(|i| i * m + d[i].iter().fold(0, |acc, &j| acc * base + b[j] + 1))
            .collect();
        u.insert(b, ub);
    }
    let roots = (0u64..1 << n)
        .map(|mask| {
            let pat: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
            let r = (0..rho).filter(|&i| d[i].iter().all(|j| pat.contains(j))).collect();
            (pat, r)
        })
        .collect();
    PlantedUniform {
        h,
        n,
        u,
        witness: UniformWitness { rho, roots },
    }
}

/// `F(a)(α) = max_{t∈a} t(α) + (|a|−1)·step + r` with `0 ≤ r < step`, the
/// same point for every `α`; singletons map to themselves. New points are
/// appended to `points`.
fn monotone_selectors(
    rng: &mut Rng64,
    points: &mut Vec<IndexFunction>,
    a: &[usize],
    n: usize,
    step: usize,
) -> Result<BTreeMap<Vec<usize>, usize>> {
    let mut out = BTreeMap::new();
    for set in subsets_upto(a, n).into_iter().filter(|s| !s.is_empty()) {
        if set.len() == 1 {
            out.insert(set.clone(), set[0]);
            continue;
        }
        let kappa = points[0].len();
        let mut placed = None;
        for _ in 0..64 {
            let p = IndexFunction::new(
                (0..kappa)
                    .map(|c| set.iter().map(|&t| points[t].0[c]).max().unwrap() + (set.len() - 1) * step + rng.gen_range(0..step))
                    .collect(),
            );
            if !points.contains(&p) {
                placed = Some(p);
                break;
            }
        }
        let p = placed.ok_or_else(|| Error::Contract("could not place distinct selector points".into()))?;
        points.push(p);
        out.insert(set, points.len() - 1);
    }
    Ok(out)
}

/// Bounds for [`synth_partition_instance`].
#[derive(Clone, Copy, Debug)]
pub struct PartitionParams {
    pub kappa: usize,
    pub a_size: usize,
    pub n: usize,
    /// Extra points of `X` beyond `A` and the selector values.
    pub extra: usize,
    /// Coordinates of `A` lie in `0..=base`.
    pub base: usize,
}

/// A valid instance with a colouring that agrees with `β` on every string
/// union and is random elsewhere.
pub fn synth_partition_instance(rng: &mut Rng64, p: &PartitionParams) -> Result<(Vec<IndexFunction>, Coloring, PartitionInstance)> {
    if p.n == 0 || p.a_size < p.n || p.kappa == 0 {
        return Err(Error::Contract("need kappa ≥ 1 and |A| ≥ n ≥ 1".into()));
    }
    let mut points = distinct_points(rng, p.kappa, p.base, p.a_size + p.extra)?;
    let a: Vec<usize> = (0..p.a_size).collect();
    // A wide step leaves room for distinct selector values in one column.
    let step = subsets_upto(&a, p.n).len() + 1;
    let sel = monotone_selectors(rng, &mut points, &a, p.n, step)?;
    let random_cols = |rng: &mut Rng64| -> BTreeSet<usize> { (0..p.kappa).filter(|_| rng.gen_bool(0.3)).collect() };
    let mut s = BTreeMap::new();
    let s0: BTreeSet<usize> = if p.kappa > 1 && rng.gen_bool(0.3) { [rng.gen_range(0..p.kappa)].into() } else { BTreeSet::new() };
    s.insert(Vec::new(), s0.clone());
    let mut beta = BTreeMap::new();
    for set in subsets_upto(&a, p.n).into_iter().filter(|x| !x.is_empty()) {
        s.insert(set.clone(), random_cols(rng));
        beta.insert(set, random_cols(rng));
    }
    let f = (0..p.kappa)
        .filter(|c| !s0.contains(c))
        .flat_map(|c| sel.iter().map(move |(set, &v)| ((c, set.clone()), v)))
        .collect();
    let instance = PartitionInstance {
        kappa: p.kappa,
        points: points.clone(),
        a: a.clone(),
        n: p.n,
        s,
        f,
        beta,
    };
    let mut c = Coloring::new();
    for t in increasing_tuples(points.len(), p.n) {
        c.insert(t, random_cols(rng));
    }
    let alpha = instance.admissible_columns().first().copied();
    if let Some(alpha) = alpha {
        for string in strings(&a, p.n)? {
            let u = instance.string_union(alpha, &string).expect("selectors are total");
            c.insert(u, instance.beta[&string[0]].clone());
        }
    }
    Ok((points, c, instance))
}

fn distinct_points(rng: &mut Rng64, kappa: usize, base: usize, count: usize) -> Result<Vec<IndexFunction>> {
    let mut out: Vec<IndexFunction> = Vec::new();
    for _ in 0..count * 32 {
        if out.len() == count {
            return Ok(out);
        }
        let p = IndexFunction::new((0..kappa).map(|_| rng.gen_range(0..=base)).collect());
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Err(Error::Contract(format!("cannot place {count} distinct points with coordinates up to {base}")))
}

/// An end-to-end scenario: an injective rational system, a coherent `Φ` on
/// `X`, a partition instance fitted to `Φ`'s colouring, and the subset
/// `target ⊇ A` of `X` that `A` reaches in every column.
#[derive(Clone, Debug)]
pub struct PipelineScenario {
    pub system: OmegaSystem<Rat>,
    pub phi: Family<IndexFunction, Rat>,
    pub instance: PartitionInstance,
    pub target: Vec<usize>,
    pub ideal: NegligibleIdeal,
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineParams {
    pub kappa: usize,
    pub a_size: usize,
    pub extra: usize,
    pub arity: usize,
    pub max_rank: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            kappa: 3,
            a_size: 3,
            extra: 2,
            arity: 2,
            max_rank: 2,
        }
    }
}

pub fn pipeline_scenario(rng: &mut Rng64, p: &PipelineParams) -> Result<PipelineScenario> {
    let (base, step) = (2, 2);
    let n = p.arity + 1;
    let height = base + (n - 1) * step + step;
    let system = random_injective_system(rng, p.kappa, height, p.max_rank, 2);
    let mut points = distinct_points(rng, p.kappa, base, p.a_size)?;
    let a: Vec<usize> = (0..p.a_size).collect();
    // Extra points sit below the column-wise maximum of A.
    let top: Vec<usize> = (0..p.kappa).map(|c| points.iter().map(|q| q.0[c]).max().unwrap()).collect();
    for _ in 0..p.extra * 16 {
        if points.len() == p.a_size + p.extra {
            break;
        }
        let q = IndexFunction::new(top.iter().map(|&t| rng.gen_range(0..=t)).collect());
        if !points.contains(&q) {
            points.push(q);
        }
    }
    let target: Vec<usize> = (0..points.len()).collect();
    let sel = monotone_selectors(rng, &mut points, &a, n, step)?;
    let ideal = NegligibleIdeal::new([0], p.kappa)?;
    let phi = coherent_family(rng, &system, points.clone(), p.arity, &ideal, 2)?;
    let colors = coherence_color(&system, &phi)?;
    let f = (0..p.kappa)
        .flat_map(|c| sel.iter().map(move |(set, &v)| ((c, set.clone()), v)))
        .collect();
    let mut instance = PartitionInstance {
        kappa: p.kappa,
        points,
        a,
        n,
        s: BTreeMap::from([(Vec::new(), BTreeSet::new())]),
        f,
        beta: BTreeMap::new(),
    };
    fit_colors(&mut instance, &colors).map_err(|v| Error::Contract(format!("{v:?}")))?;
    Ok(PipelineScenario {
        system,
        phi,
        instance,
        target,
        ideal,
    })
}

/// Shuffle helper for callers that want random subsets.
pub fn sample<T: Clone>(rng: &mut Rng64, xs: &[T], k: usize) -> Vec<T> {
    xs.choose_multiple(rng, k).cloned().collect()
}
