use std::collections::BTreeSet;

use super::formal::{build_recursion, FormalExpr};
use crate::coherence::{coherence_color, family_differential, is_coherent, verify_trivialization, Family, TrivialityKind};
use crate::complexes::increasing_tuples;
use crate::deltasys::{validate_partition_instance, PartitionInstance};
use crate::error::{Error, Result};
use crate::exactalg::Scalar;
use crate::omega::{IndexFunction, InverseSystem, NegligibleIdeal, OmegaSystem};

pub type OmegaFamily<T> = Family<IndexFunction, T>;

fn tuple_meet(points: &[IndexFunction], t: &[usize]) -> Result<IndexFunction> {
    let mut it = t.iter().map(|&i| points.get(i).ok_or_else(|| Error::Contract(format!("point {i} out of range"))));
    let mut m = it.next().ok_or_else(|| Error::Contract("empty tuple".into()))??.clone();
    for p in it {
        m = m.meet(p?)?;
    }
    Ok(m)
}

/// Interpret each `e(σ)` as `dΦ(σ)` (alternating in `σ`, zero on repeats),
/// project to `target` and sum, keeping only the selected columns.
pub(crate) fn evaluate_columns<T: Scalar>(
    system: &OmegaSystem<T>,
    dphi: &OmegaFamily<T>,
    x: &FormalExpr<usize>,
    target: &IndexFunction,
    keep: impl Fn(usize) -> bool,
) -> Result<Vec<T>> {
    system.check_index(target)?;
    let off = system.block_offsets(target);
    let mut out = vec![T::zero(); system.rank(target)];
    for (sigma, coeff) in x.terms() {
        if sigma.len() != dphi.arity() {
            return Err(Error::DimensionMismatch {
                context: "formal tuple length",
                expected: dphi.arity(),
                found: sigma.len(),
            });
        }
        let meet = tuple_meet(dphi.points(), sigma)?;
        let Some(value) = dphi.alternating_value(sigma) else { continue };
        let voff = system.block_offsets(&meet);
        let c = T::from_bigint(coeff.clone());
        for alpha in (0..system.kappa()).filter(|&a| keep(a)) {
            let (from, to) = (meet.0[alpha], target.0[alpha]);
            if to > from {
                return Err(Error::NotBelow {
                    lower: target.to_string(),
                    upper: meet.to_string(),
                });
            }
            let block = system.tower_bond(alpha, from, to).mul_vec(&value[voff[alpha]..voff[alpha + 1]])?;
            for (o, b) in out[off[alpha]..off[alpha + 1]].iter_mut().zip(block) {
                *o = o.clone() + c.clone() * b;
            }
        }
    }
    Ok(out)
}

/// `E_Φ(x)` at `target`, with the blocks of the first `cutoff` columns set
/// to zero.
pub fn evaluate_e<T: Scalar>(
    system: &OmegaSystem<T>,
    phi: &OmegaFamily<T>,
    x: &FormalExpr<usize>,
    target: &IndexFunction,
    cutoff: usize,
) -> Result<Vec<T>> {
    let dphi = family_differential(system, phi)?;
    evaluate_columns(system, &dphi, x, target, |a| a >= cutoff)
}

/// The result of the type II extraction on `A`.
#[derive(Clone, Debug)]
pub struct Extraction<T: Scalar> {
    /// `τ ↦ E_Φ(A_n(τ))` column by column, zero on `S(∅)`.
    pub formal: OmegaFamily<T>,
    /// `formal + (Φ↾A − formal)↾S`.
    pub witness: OmegaFamily<T>,
    /// The aggregate exceptional set `S`.
    pub ideal: NegligibleIdeal,
    /// `dΦ↾A` and `d(formal)` agree off `S`.
    pub agrees_off_s: bool,
    /// Tuples where `formal(τ)` leaves `⋃_{σ⊆τ} (S_σ ∪ β_σ)`, with the
    /// offending columns.
    pub support_violations: Vec<(Vec<usize>, BTreeSet<usize>)>,
    /// `witness` is a type II trivialization of `Φ↾A` modulo `S`.
    pub verified: bool,
}

/// Build a type II trivialization of `Φ↾A` from a validated partition
/// instance whose colouring is `x⃗ ↦ supp dΦ(x⃗)`.
pub fn extract_type2<T: Scalar>(
    system: &OmegaSystem<T>,
    phi: &OmegaFamily<T>,
    p: &PartitionInstance,
) -> Result<Extraction<T>> {
    if phi.cap().is_some() || p.points != phi.points() || p.n != phi.arity() + 1 || p.kappa != system.kappa() {
        return Err(Error::Contract(
            "the partition instance must live on the family's points with n = arity + 1".into(),
        ));
    }
    let colors = coherence_color(system, phi)?;
    validate_partition_instance(p, &colors).map_err(|v| Error::Hypothesis(format!("partition instance: {v:?}")))?;
    let generated = NegligibleIdeal::new(
        p.exceptional(&[]).into_iter().chain(p.beta.values().flatten().copied()),
        p.kappa,
    )?;
    if !is_coherent(system, phi, &generated)? {
        return Err(Error::Hypothesis("the family is not coherent modulo S(∅) ∪ ⋃β".into()));
    }
    let ideal = NegligibleIdeal::new(p.aggregate(), p.kappa)?;
    let dphi = family_differential(system, phi)?;
    let restricted = phi.restrict(system, &p.a)?;
    let n = phi.arity();
    let cols = p.admissible_columns();

    let mut formal = OmegaFamily::zero(system, restricted.points().to_vec(), None, n)?;
    let mut support_violations = Vec::new();
    for tau in increasing_tuples(p.a.len(), n) {
        let tau_x: Vec<usize> = tau.iter().map(|&i| p.a[i]).collect();
        let target = tuple_meet(&p.points, &tau_x)?;
        let mut value = vec![T::zero(); system.rank(&target)];
        let off = system.block_offsets(&target);
        for &alpha in &cols {
            let rec = build_recursion(&tau_x, |s| p.selector(alpha, s))?;
            let a_n = &rec.a[&tau_x];
            let v = evaluate_columns(system, &dphi, a_n, &target, |a| a == alpha)?;
            value[off[alpha]..off[alpha + 1]].clone_from_slice(&v[off[alpha]..off[alpha + 1]]);
        }
        let allowed: BTreeSet<usize> = crate::deltasys::subsets_upto(&tau_x, tau_x.len())
            .iter()
            .flat_map(|s| p.exceptional(s).into_iter().chain(p.beta.get(s).into_iter().flatten().copied()))
            .collect();
        let leak: BTreeSet<usize> = system
            .column_support(&target, &value)?
            .difference(&allowed)
            .copied()
            .collect();
        if !leak.is_empty() {
            support_violations.push((tau.clone(), leak));
        }
        formal.set(&tau, value)?;
    }

    let outside = restricted.sub(&formal)?.keep_columns(system, ideal.columns())?;
    let witness = formal.add(&outside)?;
    let diff = family_differential(system, &formal)?.sub(&family_differential(system, &restricted)?)?;
    let agrees_off_s = ideal.covers(&diff.support(system)?);
    let verified = verify_trivialization(system, &restricted, &witness, TrivialityKind::TypeII, &ideal)?;
    Ok(Extraction {
        formal,
        witness,
        ideal,
        agrees_off_s,
        support_violations,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{pipeline_scenario, seeded, PipelineParams};
    use num_traits::Zero;

    #[test]
    fn extraction_verifies_on_scenarios() {
        for seed in 0..4 {
            let sc = pipeline_scenario(&mut seeded(seed), &PipelineParams::default()).unwrap();
            let ex = extract_type2(&sc.system, &sc.phi, &sc.instance).unwrap();
            assert!(ex.verified && ex.agrees_off_s, "seed {seed}");
            assert!(verify_trivialization(&sc.system, &sc.phi.restrict(&sc.system, &sc.instance.a).unwrap(), &ex.witness, TrivialityKind::TypeII, &ex.ideal).unwrap());
        }
    }

    #[test]
    fn mismatched_instances_are_rejected() {
        let sc = pipeline_scenario(&mut seeded(1), &PipelineParams::default()).unwrap();
        let mut p = sc.instance.clone();
        p.n += 1;
        assert!(matches!(extract_type2(&sc.system, &sc.phi, &p), Err(Error::Contract(_))));
    }

    #[test]
    fn cutoff_zeroes_leading_blocks() {
        let sc = pipeline_scenario(&mut seeded(2), &PipelineParams::default()).unwrap();
        let tau: Vec<usize> = (0..=sc.phi.arity()).collect();
        let mut x = FormalExpr::zero();
        x.add_term(tau.clone(), 1.into());
        let target = tuple_meet(sc.phi.points(), &tau).unwrap();
        let v = evaluate_e(&sc.system, &sc.phi, &x, &target, 1).unwrap();
        let off = sc.system.block_offsets(&target);
        assert!(v[off[0]..off[1]].iter().all(|e| e.is_zero()));
        let full = evaluate_e(&sc.system, &sc.phi, &x, &target, 0).unwrap();
        assert_eq!(v[off[1]..], full[off[1]..]);
    }
}
