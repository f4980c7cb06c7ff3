use super::{extract_type2, propagate, Extraction, OmegaFamily};
use crate::coherence::{find_type1, verify_trivialization, TrivialityKind};
use crate::deltasys::PartitionInstance;
use crate::error::{Error, Result};
use crate::exactalg::Scalar;
use crate::omega::{NegligibleIdeal, OmegaSystem};

/// Every intermediate object of [`run_pipeline`].
#[derive(Clone, Debug)]
pub struct PipelineReport<T: Scalar> {
    pub extraction: Extraction<T>,
    /// Type I witness of `Φ↾A − Ψ` with no ideal, where `Ψ` is the
    /// extracted type II witness.
    pub t1: OmegaFamily<T>,
    /// Type I witness of `Φ↾target` modulo the aggregate ideal.
    pub result: OmegaFamily<T>,
    pub verified: bool,
}

/// Extract a type II witness on `A`, trivialize the remainder on `A`, and
/// propagate to the points `target` (positions into `Φ`'s points, a
/// superset of `A`).
pub fn run_pipeline<T: Scalar>(
    system: &OmegaSystem<T>,
    phi: &OmegaFamily<T>,
    p: &PartitionInstance,
    target: &[usize],
) -> Result<PipelineReport<T>> {
    let extraction = extract_type2(system, phi, p)?;
    if !extraction.verified {
        return Err(Error::Hypothesis("the extracted family is not a type II witness".into()));
    }
    let remainder = phi.restrict(system, &p.a)?.sub(&extraction.witness)?;
    let t1 = find_type1(system, &remainder, &NegligibleIdeal::empty())?
        .ok_or_else(|| Error::Hypothesis("Φ↾A − Ψ is not trivial on A".into()))?;
    let a_in_target = p
        .a
        .iter()
        .map(|i| target.iter().position(|t| t == i))
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| Error::Contract("target must contain A".into()))?;
    let phi_target = phi.restrict(system, target)?;
    let result = propagate(system, &phi_target, &a_in_target, &t1, &extraction.ideal)?;
    let verified = verify_trivialization(system, &phi_target, &result, TrivialityKind::TypeI, &extraction.ideal)?;
    Ok(PipelineReport {
        extraction,
        t1,
        result,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{pipeline_scenario, seeded, PipelineParams};

    #[test]
    fn pipeline_on_a_single_scenario() {
        let sc = pipeline_scenario(&mut seeded(3), &PipelineParams::default()).unwrap();
        let r = run_pipeline(&sc.system, &sc.phi, &sc.instance, &sc.target).unwrap();
        assert!(r.verified);
        assert_eq!(r.result.points().len(), sc.target.len());
    }
}
