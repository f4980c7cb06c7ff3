use rand::Rng;

use super::document::{AnyProblem, Document, Loaded, Options, Problem};
use crate::complexes::{lim_char_check, MeetSemilattice, PosetSystem};
use crate::deltasys::{derived_roots, verify_uniform};
use crate::error::Result;
use crate::exactalg::{Int, Matrix, Rat};
use crate::injective::{check_injective, verify_vanishing};
use crate::omega::NegligibleIdeal;
use crate::propagation::{build_recursion, formal_d, recursion_identity_holds, run_pipeline, star_relation_check, FormalExpr};
use crate::synth::{
    pipeline_scenario, planted_uniform, random_injective_system, random_omega_system, random_points,
    random_subset_system, seeded, OmegaParams, PipelineParams,
};

/// One property of the self-test suite.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub error: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.error.is_none()
    }
}

fn check(name: &'static str, cases: usize, mut case: impl FnMut(usize) -> Result<bool>) -> Check {
    let mut failures = 0;
    for i in 0..cases {
        match case(i) {
            Ok(true) => {}
            Ok(false) => failures += 1,
            Err(e) => {
                return Check {
                    name,
                    cases,
                    failures: failures + 1,
                    error: Some(e.to_string()),
                }
            }
        }
    }
    Check {
        name,
        cases,
        failures,
        error: None,
    }
}

/// A quick version of the invariant suite on seeded generators.
pub fn selftest(seed: u64) -> Vec<Check> {
    let mut rng = seeded(seed);
    let mut out = Vec::new();
    let params = OmegaParams {
        kappa: 2,
        max_height: 2,
        max_rank: 2,
        entry_bound: 2,
    };
    out.push(check("lim-char on omega systems", 20, |_| {
        let sys = random_omega_system::<Int>(&mut rng, &params);
        let k = rng.gen_range(1..=3);
        let pts = random_points(&mut rng, &sys, k);
        Ok(lim_char_check(&sys, &pts, 2)?.iter().all(|r| r.equal))
    }));
    out.push(check("lim-char on semilattices", 5, |_| {
        let sys = random_subset_system(&mut rng, 3, 5);
        let n = sys.lattice().len();
        let pts: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        if pts.is_empty() {
            return Ok(true);
        }
        Ok(lim_char_check(&sys, &pts, 2)?.iter().all(|r| r.equal))
    }));
    out.push(check("V-example degree one is Z/2", 1, |_| {
        let l = MeetSemilattice::from_order(vec!["z".into(), "x".into(), "y".into()], &[(0, 1), (0, 2)])?;
        let m = Matrix::from_i64(&[&[2]]);
        let sys = PosetSystem::<Int>::from_bonds(l, vec![vec![1]; 3], vec![((1, 0), m.clone()), ((2, 0), m)])?;
        let rows = lim_char_check(&sys, &[1, 2], 1)?;
        Ok(rows[1].equal && rows[1].alternating.to_string() == "Z/2")
    }));
    out.push(check("injective vanishing", 10, |_| {
        let sys = random_injective_system(&mut rng, 2, 2, 2, 2);
        let pts = random_points(&mut rng, &sys, 3);
        Ok(check_injective(&sys).injective() && verify_vanishing(&sys, &pts, 2)?)
    }));
    out.push(check("formal calculus", 100, |_| {
        let len = rng.gen_range(0..=4);
        let mut x = FormalExpr::zero();
        for _ in 0..3 {
            let t: Vec<u8> = (0..len).map(|_| rng.gen_range(0..5)).collect();
            x.add_term(t, rng.gen_range(-3..=3).into());
        }
        let g = rng.gen_range(0..5u8);
        Ok(formal_d(&formal_d(&x)).is_zero() && star_relation_check(&x, &g)?)
    }));
    out.push(check("recursion identity", 10, |i| {
        let tau: Vec<usize> = (0..=(i % 3)).map(|j| 2 * j + 1).collect();
        let rec = build_recursion(&tau, |s| Some(if s.len() == 1 { s[0] } else { 100 + s.iter().sum::<usize>() }))?;
        Ok(recursion_identity_holds(&rec))
    }));
    out.push(check("planted uniform Δ-systems", 5, |i| {
        let n = 1 + i % 2;
        let h: Vec<usize> = (0..2 * n + 1).collect();
        let p = planted_uniform(&mut rng, h, n, 3);
        let Ok(w) = verify_uniform(&p.h, n, &p.u) else { return Ok(false) };
        Ok(derived_roots(&p.h, n, &p.u, &w)?.holds())
    }));
    out.push(check("end-to-end pipeline", 3, |_| {
        let sc = pipeline_scenario(&mut rng, &PipelineParams::default())?;
        Ok(run_pipeline(&sc.system, &sc.phi, &sc.instance, &sc.target)?.verified)
    }));
    out.push(check("document round trip", 5, |_| {
        let sys = random_omega_system::<Rat>(&mut rng, &params);
        let pts = random_points(&mut rng, &sys, 2);
        let loaded = Loaded {
            problem: Some(AnyProblem::OmegaRat(Problem {
                family: None,
                system: sys,
                index_set: pts,
                ideal: NegligibleIdeal::empty(),
            })),
            partition: None,
            delta: None,
            options: Options::default(),
        };
        let doc = loaded.to_document();
        let again = Document::from_json(&doc.to_json())?.normalized()?;
        Ok(again == doc)
    }));
    out
}
