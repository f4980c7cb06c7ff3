use std::collections::BTreeMap;

use super::extract::OmegaFamily;
use crate::coherence::{find_type1, is_coherent, verify_trivialization, TrivialityKind};
use crate::complexes::{alternating_complex, increasing_tuples};
use crate::error::{Error, Result};
use crate::exactalg::Scalar;
use crate::injective::{extension_family, ExtensionFamily};
use crate::omega::{IndexFunction, InverseSystem, NegligibleIdeal, OmegaSystem};

/// A trivialization of a family capped below `g`: a single element of
/// `G_g` for arity 1, otherwise a capped family of one lower arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BelowWitness<T: Scalar> {
    Element(Vec<T>),
    Family(OmegaFamily<T>),
}

fn project<T: Scalar>(system: &OmegaSystem<T>, from: &IndexFunction, to: &IndexFunction, v: &[T]) -> Result<Vec<T>> {
    system.bond(from, to)?.mul_vec(v)
}

fn meet_of(points: &[IndexFunction], t: &[usize]) -> IndexFunction {
    let mut m = points[t[0]].clone();
    for &i in &t[1..] {
        m = m.meet(&points[i]).expect("points of one system");
    }
    m
}

/// Trivialize a family capped below `g`: lift its values along the sections
/// `i`, trivialize the uncapped family, and project back along `p`. For
/// arity 1 the compatible family is glued into one element of `G_g`, column
/// by column, from the point that reaches highest below `g`. `None` when the
/// lifted family has no trivialization.
pub fn trivialize_below<T: Scalar>(
    system: &OmegaSystem<T>,
    ext: &ExtensionFamily<T>,
    zeta: &OmegaFamily<T>,
    ideal: &NegligibleIdeal,
) -> Result<Option<BelowWitness<T>>> {
    let g = zeta
        .cap()
        .ok_or_else(|| Error::Contract("trivialize_below needs a family capped below some g".into()))?
        .clone();
    let points = zeta.points().to_vec();
    let lifted = zeta.map_values(|t, v| {
        let full = meet_of(&points, t);
        let low = full.meet(&g).expect("same kappa");
        ext.section(&low, &full).and_then(|i| i.mul_vec(v)).expect("sections exist on injective systems")
    });
    let lifted = OmegaFamily::from_values(
        system,
        points.clone(),
        None,
        zeta.arity(),
        lifted.values().map(|(t, v)| (t.clone(), v.clone())),
    )?;
    let Some(w) = find_type1(system, &lifted, ideal)? else { return Ok(None) };
    if zeta.arity() > 1 {
        let mut out = OmegaFamily::zero(system, points.clone(), Some(g.clone()), zeta.arity() - 1)?;
        for (t, v) in w.values() {
            let full = meet_of(&points, t);
            out.set(t, project(system, &full, &full.meet(&g)?, v)?)?;
        }
        return Ok(Some(BelowWitness::Family(out)));
    }
    let off = system.block_offsets(&g);
    let mut element = vec![T::zero(); system.rank(&g)];
    for alpha in 0..system.kappa() {
        let (best, _) = points
            .iter()
            .enumerate()
            .max_by_key(|(i, p)| (p.0[alpha].min(g.0[alpha]), std::cmp::Reverse(*i)))
            .expect("families have points");
        let p = &points[best];
        let level = p.0[alpha].min(g.0[alpha]);
        let voff = system.block_offsets(p);
        let value = w.get(&[best]).expect("arity one");
        let down = system.tower_bond(alpha, p.0[alpha], level).mul_vec(&value[voff[alpha]..voff[alpha + 1]])?;
        let mut lo = g.clone();
        lo.0[alpha] = level;
        let up = ext.section(&lo, &g)?;
        let goff = system.block_offsets(&lo);
        let mut full = vec![T::zero(); system.rank(&lo)];
        full[goff[alpha]..goff[alpha + 1]].clone_from_slice(&down);
        let lifted = up.mul_vec(&full)?;
        element[off[alpha]..off[alpha + 1]].clone_from_slice(&lifted[off[alpha]..off[alpha + 1]]);
    }
    Ok(Some(BelowWitness::Element(element)))
}

/// Whether a witness trivializes a family capped below `g`.
pub fn verify_below<T: Scalar>(
    system: &OmegaSystem<T>,
    zeta: &OmegaFamily<T>,
    witness: &BelowWitness<T>,
    ideal: &NegligibleIdeal,
) -> Result<bool> {
    match witness {
        BelowWitness::Family(w) => verify_trivialization(system, zeta, w, TrivialityKind::TypeI, ideal),
        BelowWitness::Element(v) => {
            let g = zeta.cap().ok_or_else(|| Error::Contract("uncapped family".into()))?;
            for (t, z) in zeta.values() {
                let low = zeta.points()[t[0]].meet(g)?;
                let diff: Vec<T> = project(system, g, &low, v)?
                    .into_iter()
                    .zip(z)
                    .map(|(a, b)| a - b.clone())
                    .collect();
                if !ideal.covers(&system.column_support(&low, &diff)?) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// For every `f ∈ X` and column set `E ⊄ N`, some `x ∈ A` has
/// `{α ∈ E | f(α) ≤ x(α)} ⊄ N`. Exhaustive over `E` up to 16 columns;
/// beyond that the equivalent single-column form is used.
pub fn escaping_check(a: &[IndexFunction], x: &[IndexFunction], ideal: &NegligibleIdeal) -> bool {
    let Some(kappa) = x.first().or(a.first()).map(IndexFunction::len) else { return true };
    if kappa > 16 {
        return escaping_by_columns(a, x, ideal);
    }
    x.iter().all(|f| {
        (1u32..1 << kappa).all(|e| {
            let cols = (0..kappa).filter(|&i| e >> i & 1 == 1);
            if cols.clone().all(|c| ideal.contains(c)) {
                return true;
            }
            a.iter()
                .any(|p| cols.clone().any(|c| f.0[c] <= p.0[c] && !ideal.contains(c)))
        })
    })
}

/// Every column outside `N` of every `f ∈ X` is reached by some `x ∈ A`.
pub fn escaping_by_columns(a: &[IndexFunction], x: &[IndexFunction], ideal: &NegligibleIdeal) -> bool {
    x.iter().all(|f| {
        (0..f.len())
            .filter(|&c| !ideal.contains(c))
            .all(|c| a.iter().any(|p| f.0[c] <= p.0[c]))
    })
}

/// Extend a compatible family on `A` to the points `X`: outside the ideal
/// each column is projected down from a point of `A` above it, and the
/// ideal's columns are set to zero.
fn extend_compatible<T: Scalar>(
    system: &OmegaSystem<T>,
    psi: &OmegaFamily<T>,
    x: &[IndexFunction],
    ideal: &NegligibleIdeal,
) -> Result<OmegaFamily<T>> {
    let mut out = OmegaFamily::zero(system, x.to_vec(), None, 1)?;
    for (i, f) in x.iter().enumerate() {
        let off = system.block_offsets(f);
        let mut v = vec![T::zero(); system.rank(f)];
        for alpha in (0..system.kappa()).filter(|&c| !ideal.contains(c)) {
            let (j, p) = psi
                .points()
                .iter()
                .enumerate()
                .find(|(_, p)| p.0[alpha] >= f.0[alpha])
                .ok_or_else(|| Error::Hypothesis(format!("no point of A reaches {f} in column {alpha}")))?;
            let poff = system.block_offsets(p);
            let value = &psi.get(&[j]).expect("arity one")[poff[alpha]..poff[alpha + 1]];
            let block = system.tower_bond(alpha, p.0[alpha], f.0[alpha]).mul_vec(value)?;
            v[off[alpha]..off[alpha + 1]].clone_from_slice(&block);
        }
        out.set(&[i], v)?;
    }
    Ok(out)
}

/// Upgrade a type I trivialization of `Φ↾A` to one of `Φ`.
///
/// `a` lists the positions of `A` among `Φ`'s points. For arity 1 the
/// witness on `A` is extended by projection. For arity `n > 1` the families
/// `C_{n−k}` and trivializations `T_{k+1}` are built in turn, each
/// `T_{k+1}` by [`trivialize_below`], and `T_n` is returned. The
/// hypotheses (coherence, the witness on `A`, vanishing cohomology on `A`
/// in degrees `1..n−1`, escaping) are checked first, and the output is
/// verified on all of `X`.
pub fn propagate<T: Scalar>(
    system: &OmegaSystem<T>,
    phi: &OmegaFamily<T>,
    a: &[usize],
    t1: &OmegaFamily<T>,
    ideal: &NegligibleIdeal,
) -> Result<OmegaFamily<T>> {
    let n = phi.arity();
    let x = phi.points().to_vec();
    let phi_a = phi.restrict(system, a)?;
    if phi.cap().is_some() {
        return Err(Error::Contract("propagate works on uncapped families".into()));
    }
    if !is_coherent(system, phi, ideal)? {
        return Err(Error::Hypothesis("the family is not coherent".into()));
    }
    if !verify_trivialization(system, &phi_a, t1, TrivialityKind::TypeI, ideal)? {
        return Err(Error::Hypothesis("the given witness does not trivialize the family on A".into()));
    }
    let a_points = phi_a.points().to_vec();
    if n > 1 {
        let complex = alternating_complex(system, &a_points, n - 1)?;
        for j in 1..n {
            if !complex.cohomology(j)?.is_trivial() {
                return Err(Error::Hypothesis(format!("H^{j} of the complex on A does not vanish")));
            }
        }
    }
    if !escaping_check(&a_points, &x, ideal) {
        return Err(Error::Hypothesis("A does not reach every point of X outside the ideal".into()));
    }
    let result = if a.len() == x.len() {
        t1.clone()
    } else if n == 1 {
        extend_compatible(system, t1, &x, ideal)?
    } else {
        run_recursion(system, phi, a, t1, ideal)?
    };
    if !verify_trivialization(system, phi, &result, TrivialityKind::TypeI, ideal)? {
        return Err(Error::Contract("propagated witness does not verify on X".into()));
    }
    Ok(result)
}

fn run_recursion<T: Scalar>(
    system: &OmegaSystem<T>,
    phi: &OmegaFamily<T>,
    a: &[usize],
    t1: &OmegaFamily<T>,
    ideal: &NegligibleIdeal,
) -> Result<OmegaFamily<T>> {
    let n = phi.arity();
    let x = phi.points();
    let a_points: Vec<IndexFunction> = a.iter().map(|&i| x[i].clone()).collect();
    let ext = extension_family(system)?;
    // T_k: f⃗ ∈ X^{k−1} ↦ family on A of arity n − k, capped below ⋀f⃗.
    let mut stage: BTreeMap<Vec<usize>, OmegaFamily<T>> = BTreeMap::from([(Vec::new(), t1.clone())]);
    let mut last = OmegaFamily::zero(system, x.to_vec(), None, n - 1)?;
    for k in 1..n {
        let m = n - k;
        let mut next = BTreeMap::new();
        for fs in increasing_tuples(x.len(), k) {
            let g = meet_of(x, &fs);
            let mut zeta = OmegaFamily::zero(system, a_points.clone(), Some(g.clone()), m)?;
            for alphas in increasing_tuples(a.len(), m) {
                let target = meet_of(&a_points, &alphas).meet(&g)?;
                let mut joined: Vec<usize> = alphas.iter().map(|&i| a[i]).collect();
                joined.extend(&fs);
                let mut value = phi
                    .alternating_value(&joined)
                    .unwrap_or_else(|| vec![T::zero(); system.rank(&target)]);
                for i in 0..k {
                    let mut face = fs.clone();
                    face.remove(i);
                    let tau = &stage[&face];
                    let from = match tau.cap() {
                        Some(c) => meet_of(&a_points, &alphas).meet(c)?,
                        None => meet_of(&a_points, &alphas),
                    };
                    let v = project(system, &from, &target, tau.get(&alphas).expect("same tuples"))?;
                    let s = T::parity_sign(i) * T::parity_sign(m + 1);
                    for (o, w) in value.iter_mut().zip(v) {
                        *o = o.clone() + s.clone() * w;
                    }
                }
                zeta.set(&alphas, value)?;
            }
            let witness = trivialize_below(system, &ext, &zeta, ideal)?.ok_or_else(|| {
                Error::Hypothesis(format!("stage {k}: the family C_{m} below {g} has no trivialization"))
            })?;
            match witness {
                BelowWitness::Family(f) => {
                    next.insert(fs, f);
                }
                BelowWitness::Element(v) => last.set(&fs, v)?,
            }
        }
        stage = next;
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{Matrix, Rat};
    use crate::synth::{coherent_family, random_injective_system, seeded};

    fn q(v: i64) -> Rat {
        Rat::from_i64(v)
    }

    fn f(v: &[usize]) -> IndexFunction {
        IndexFunction::new(v.to_vec())
    }

    /// One column, `Q` at every level, identity bonds.
    fn constant_tower() -> OmegaSystem<Rat> {
        let id = Matrix::identity(1);
        OmegaSystem::new(vec![vec![1, 1, 1]], vec![vec![id.clone(), id]]).unwrap()
    }

    #[test]
    fn arity_one_extends_by_projection() {
        let s = constant_tower();
        let phi = OmegaFamily::from_values(&s, vec![f(&[2]), f(&[0])], None, 1, [(vec![0], vec![q(5)]), (vec![1], vec![q(5)])]).unwrap();
        let j = NegligibleIdeal::empty();
        let t1 = find_type1(&s, &phi.restrict(&s, &[0]).unwrap(), &j).unwrap().unwrap();
        let out = propagate(&s, &phi, &[0], &t1, &j).unwrap();
        assert_eq!(out.get(&[1]).unwrap(), &[q(5)]);
    }

    #[test]
    fn a_equal_to_x_returns_the_witness() {
        let s = constant_tower();
        let phi = OmegaFamily::from_values(&s, vec![f(&[1]), f(&[2])], None, 1, [(vec![0], vec![q(3)]), (vec![1], vec![q(3)])]).unwrap();
        let j = NegligibleIdeal::empty();
        let t1 = find_type1(&s, &phi, &j).unwrap().unwrap();
        assert_eq!(propagate(&s, &phi, &[0, 1], &t1, &j).unwrap(), t1);
    }

    #[test]
    fn hypotheses_are_checked() {
        let s = constant_tower();
        // Not compatible: 1 at the top, 2 below.
        let phi = OmegaFamily::from_values(&s, vec![f(&[2]), f(&[0])], None, 1, [(vec![0], vec![q(1)]), (vec![1], vec![q(2)])]).unwrap();
        let j = NegligibleIdeal::empty();
        let t1 = find_type1(&s, &phi.restrict(&s, &[0]).unwrap(), &j).unwrap().unwrap();
        assert!(matches!(propagate(&s, &phi, &[0], &t1, &j), Err(Error::Hypothesis(_))));
        // A below X does not escape.
        let phi = OmegaFamily::zero(&s, vec![f(&[0]), f(&[2])], None, 1).unwrap();
        let t1 = OmegaFamily::zero(&s, vec![f(&[0])], None, 1).unwrap();
        assert!(matches!(propagate(&s, &phi, &[0], &t1, &j), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn escaping_examples() {
        let a = [f(&[1, 0])];
        let x = [f(&[2, 0])];
        assert!(!escaping_check(&a, &x, &NegligibleIdeal::empty()));
        let n = NegligibleIdeal::new([0], 2).unwrap();
        assert!(escaping_check(&a, &x, &n));
        assert!(escaping_by_columns(&a, &x, &n));
        assert!(escaping_check(&[f(&[1, 0]), f(&[0, 3])], &[f(&[1, 2])], &NegligibleIdeal::empty()));
    }

    #[test]
    fn below_the_top_is_ordinary_triviality() {
        let mut rng = seeded(7);
        let s = random_injective_system(&mut rng, 2, 2, 2, 2);
        let pts = vec![f(&[2, 0]), f(&[1, 1]), f(&[0, 2])];
        let j = NegligibleIdeal::empty();
        let ext = extension_family(&s).unwrap();
        for arity in 1..=2 {
            let phi = coherent_family(&mut rng, &s, pts.clone(), arity, &j, 2).unwrap();
            let capped = OmegaFamily::from_values(&s, pts.clone(), Some(s.top()), arity, phi.values().map(|(t, v)| (t.clone(), v.clone()))).unwrap();
            let w = trivialize_below(&s, &ext, &capped, &j).unwrap().unwrap();
            assert!(verify_below(&s, &capped, &w, &j).unwrap());
            assert_eq!(matches!(w, BelowWitness::Element(_)), arity == 1);
        }
    }

    #[test]
    fn arity_two_reaches_lower_points() {
        let mut rng = seeded(11);
        let s = random_injective_system(&mut rng, 2, 3, 2, 2);
        let x = vec![f(&[3, 1]), f(&[1, 3]), f(&[2, 2]), f(&[0, 1]), f(&[1, 0])];
        let j = NegligibleIdeal::empty();
        let phi = coherent_family(&mut rng, &s, x, 2, &j, 2).unwrap();
        let a = [0, 1, 2];
        let t1 = find_type1(&s, &phi.restrict(&s, &a).unwrap(), &j).unwrap().unwrap();
        let out = propagate(&s, &phi, &a, &t1, &j).unwrap();
        assert!(verify_trivialization(&s, &phi, &out, TrivialityKind::TypeI, &j).unwrap());
    }
}
