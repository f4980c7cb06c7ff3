use serde_json::{json, Value};

use super::document::{family_doc, AnyProblem, DocSystem, Loaded, Problem};
use crate::coherence::{coherence_color, find_type1, find_type2, is_coherent, verify_trivialization, TrivialityKind};
use crate::complexes::lim_char_check;
use crate::deltasys::{derived_roots, find_uniform_subsystem, validate_partition_instance, verify_uniform};
use crate::error::{Error, Result};
use crate::exactalg::{GroupPresentation, Scalar};
use crate::omega::OmegaSystem;
use crate::propagation::run_pipeline;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The computation finished and the answer is negative.
    Negative,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub status: Status,
    pub json: Value,
    pub text: Vec<String>,
}

impl Report {
    fn new(status: Status, json: Value, text: Vec<String>) -> Self {
        Report { status, json, text }
    }
}

/// A failure tagged with the exit code it maps to.
#[derive(Clone, Debug)]
pub struct Failure {
    pub code: i32,
    pub stage: &'static str,
    pub error: Error,
}

impl Failure {
    pub fn from_error(stage: &'static str, error: Error) -> Self {
        let code = match &error {
            Error::Hypothesis(_) => 1,
            Error::NotComposable | Error::DegreeOutOfRange { .. } => 3,
            _ => 2,
        };
        Failure { code, stage, error }
    }

    pub fn internal(stage: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            stage,
            error: Error::Contract(message.into()),
        }
    }
}

pub type CmdResult = std::result::Result<Report, Failure>;

fn stage<T>(name: &'static str, r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|e| Failure::from_error(name, e))
}

macro_rules! with_problem {
    ($p:expr, $v:ident => $body:expr) => {
        match $p {
            AnyProblem::OmegaInt($v) => $body,
            AnyProblem::OmegaRat($v) => $body,
            AnyProblem::PosetInt($v) => $body,
            AnyProblem::PosetRat($v) => $body,
        }
    };
}

fn need<'a, T>(v: Option<&'a T>, what: &str) -> std::result::Result<&'a T, Failure> {
    v.ok_or_else(|| Failure::from_error("input", Error::parse(what, "section is required for this command")))
}

fn group_json(g: &GroupPresentation) -> Value {
    json!({
        "group": g.to_string(),
        "free_rank": g.free_rank.to_string(),
        "torsion": g.invariant_factors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
    })
}

pub fn cmd_lim(doc: &Loaded, n_max: Option<usize>) -> CmdResult {
    let problem = need(doc.problem.as_ref(), "system")?;
    let n_max = n_max.or(doc.options.n_max).unwrap_or(3);
    let rows = with_problem!(problem, p => stage("lim", lim_char_check(&p.system, &p.index_set, n_max)))?;
    let mut text = Vec::new();
    let mut degrees = Vec::new();
    for r in &rows {
        text.push(format!(
            "H^{}: alternating {} | limit {} | {}",
            r.degree,
            r.alternating,
            r.limit,
            if r.equal { "equal" } else { "DIFFERENT" }
        ));
        degrees.push(json!({
            "degree": r.degree.to_string(),
            "alternating": group_json(&r.alternating),
            "limit": group_json(&r.limit),
            "equal": r.equal,
        }));
    }
    if rows.iter().any(|r| !r.equal) {
        return Err(Failure::internal("lim", "alternating and limit cohomology differ"));
    }
    Ok(Report::new(Status::Success, json!({"command": "lim", "degrees": degrees}), text))
}

fn coherence_for<S: DocSystem>(p: &Problem<S>) -> CmdResult {
    let phi = need(p.family.as_ref(), "family")?;
    let coherent = stage("coherence", is_coherent(&p.system, phi, &p.ideal))?;
    let t1 = stage("type1", find_type1(&p.system, phi, &p.ideal))?;
    let t2 = stage("type2", find_type2(&p.system, phi, &p.ideal))?;
    for (w, kind) in [(&t1, TrivialityKind::TypeI), (&t2, TrivialityKind::TypeII)] {
        if let Some(w) = w {
            if !stage("verify", verify_trivialization(&p.system, phi, w, kind, &p.ideal))? {
                return Err(Failure::internal("verify", format!("{kind:?} witness does not verify")));
            }
        }
    }
    let status = if coherent && t1.is_some() && t2.is_some() { Status::Success } else { Status::Negative };
    let text = vec![
        format!("coherent: {coherent}"),
        format!("type I trivial: {}", t1.is_some()),
        format!("type II trivial: {}", t2.is_some()),
    ];
    let json = json!({
        "command": "coherence",
        "coherent": coherent,
        "type1": t1.is_some(),
        "type2": t2.is_some(),
        "type1_witness": t1.as_ref().map(|w| family_doc(&p.system, w)),
        "type2_witness": t2.as_ref().map(|w| family_doc(&p.system, w)),
    });
    Ok(Report::new(status, json, text))
}

pub fn cmd_coherence(doc: &Loaded) -> CmdResult {
    let problem = need(doc.problem.as_ref(), "system")?;
    with_problem!(problem, p => coherence_for(p))
}

pub fn cmd_delta(doc: &Loaded) -> CmdResult {
    let d = need(doc.delta.as_ref(), "delta")?;
    let mut text = Vec::new();
    let mut out = json!({"command": "delta"});
    let mut ok = true;
    if let Some(target) = d.target {
        let color = d.color.clone().unwrap_or_default();
        let mu = d.h.last().map_or(0, |m| m + 1);
        let found = find_uniform_subsystem(mu, d.n, &color, &d.u, target);
        text.push(match &found {
            Some(h) => format!("uniform homogeneous subset: {h:?}"),
            None => "search found no subset (not a proof of absence)".into(),
        });
        ok &= found.is_some();
        out["search"] = json!(found.map(|h| h.iter().map(usize::to_string).collect::<Vec<_>>()));
    }
    match verify_uniform(&d.h, d.n, &d.u) {
        Ok(w) => {
            let agrees = d.witness.as_ref().is_none_or(|given| *given == w);
            text.push(format!("uniform: true, rho = {}, witness agrees: {agrees}", w.rho));
            out["uniform"] = json!(true);
            out["witness_agrees"] = json!(agrees);
            ok &= agrees;
            if d.h.len() >= 2 * d.n {
                let roots = stage("derived_roots", derived_roots(&d.h, d.n, &d.u, &w))?;
                text.push(format!(
                    "derived roots: choice-independent {}, roots correct {}",
                    roots.choice_violation.is_none(),
                    roots.root_violation.is_none()
                ));
                out["choice_independent"] = json!(roots.choice_violation.is_none());
                out["roots_correct"] = json!(roots.root_violation.is_none());
                ok &= roots.holds();
            }
        }
        Err(v) => {
            text.push(format!("uniform: false ({v:?})"));
            out["uniform"] = json!(false);
            out["violation"] = json!(format!("{v:?}"));
            ok = false;
        }
    }
    Ok(Report::new(if ok { Status::Success } else { Status::Negative }, out, text))
}

fn partition_for<T: Scalar>(p: &Problem<OmegaSystem<T>>, doc: &Loaded) -> CmdResult {
    let inst = need(doc.partition.as_ref(), "partition_instance")?;
    let phi = need(p.family.as_ref(), "family")?;
    let colors = stage("coloring", coherence_color(&p.system, phi))?;
    let (status, json, text) = match validate_partition_instance(inst, &colors) {
        Ok(()) => (Status::Success, json!({"command": "partition", "valid": true}), vec!["partition instance: valid".into()]),
        Err(v) => (
            Status::Negative,
            json!({"command": "partition", "valid": false, "violation": format!("{v:?}")}),
            vec![format!("partition instance: invalid ({v:?})")],
        ),
    };
    Ok(Report::new(status, json, text))
}

pub fn cmd_partition(doc: &Loaded) -> CmdResult {
    match need(doc.problem.as_ref(), "system")? {
        AnyProblem::OmegaInt(p) => partition_for(p, doc),
        AnyProblem::OmegaRat(p) => partition_for(p, doc),
        _ => Err(Failure::from_error("input", Error::parse("system.kind", "partition instances need an omega system"))),
    }
}

fn propagate_for<T: Scalar>(p: &Problem<OmegaSystem<T>>, doc: &Loaded) -> CmdResult {
    let inst = need(doc.partition.as_ref(), "partition_instance")?;
    let phi = need(p.family.as_ref(), "family")?;
    let target = doc.options.target.clone().unwrap_or_else(|| (0..p.index_set.len()).collect());
    let report = stage("pipeline", run_pipeline(&p.system, phi, inst, &target))?;
    if !report.verified {
        return Err(Failure::internal("verify", "the propagated witness does not verify"));
    }
    let ex = &report.extraction;
    let text = vec![
        format!("aggregate ideal: {:?}", ex.ideal.columns()),
        format!("type II witness on A verifies: {}", ex.verified),
        format!("support violations: {}", ex.support_violations.len()),
        format!("type I witness on the target verifies: {}", report.verified),
    ];
    let json = json!({
        "command": "propagate",
        "ideal": ex.ideal.columns().iter().map(usize::to_string).collect::<Vec<_>>(),
        "type2_verified": ex.verified,
        "agrees_off_s": ex.agrees_off_s,
        "support_violations": ex.support_violations.len().to_string(),
        "type2_witness": family_doc(&p.system, &ex.witness),
        "type1_on_a": family_doc(&p.system, &report.t1),
        "target": target.iter().map(usize::to_string).collect::<Vec<_>>(),
        "witness": family_doc(&p.system, &report.result),
        "verified": report.verified,
    });
    Ok(Report::new(Status::Success, json, text))
}

pub fn cmd_propagate(doc: &Loaded) -> CmdResult {
    match need(doc.problem.as_ref(), "system")? {
        AnyProblem::OmegaInt(p) => propagate_for(p, doc),
        AnyProblem::OmegaRat(p) => propagate_for(p, doc),
        _ => Err(Failure::from_error("input", Error::parse("system.kind", "propagation needs an omega system"))),
    }
}
