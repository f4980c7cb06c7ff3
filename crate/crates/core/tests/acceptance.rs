//! The acceptance suite: one PASS/FAIL line per criterion.

mod oracle;

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use dlw::cli::{synth_document, Document, SynthKind};
use dlw::coherence::{find_type1, find_type2, is_coherent, Family};
use dlw::complexes::{alternating_complex, lim_char_check, MeetSemilattice, PosetSystem};
use dlw::deltasys::{derived_roots, subsets_upto, verify_uniform};
use dlw::exactalg::{GroupPresentation, Int, Matrix, Rat, Scalar};
use dlw::injective::{check_injective, verify_vanishing};
use dlw::omega::{InverseSystem, NegligibleIdeal, OmegaSystem};
use dlw::propagation::{
    build_recursion, formal_d, recursion_identity_holds, run_pipeline, star_relation_check, telescoping_check, FormalExpr,
};
use dlw::synth::{
    coherent_family, pipeline_scenario, planted_uniform, random_family, random_injective_system, random_omega_system,
    random_points, random_subset_system, seeded, synth_partition_instance, OmegaParams, PartitionParams,
    PipelineParams, Rng64,
};
use num_bigint::BigInt;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The alternating complex's cohomology in degrees `0..=n_max` by the
/// oracle, as `(free rank, torsion)`.
fn oracle_alternating<S: InverseSystem>(system: &S, points: &[S::Index], n_max: usize, int: impl Fn(&S::Scalar) -> Option<BigInt>) -> Vec<(usize, Vec<BigInt>)>
where
    S::Scalar: Scalar,
{
    let c = alternating_complex(system, points, n_max).unwrap();
    (0..=n_max)
        .map(|n| {
            let next = c.differential(n).unwrap().to_dense();
            let dim = c.dim(n);
            let prev = if n == 0 { Matrix::zeros(dim, 0) } else { c.differential(n - 1).unwrap().to_dense() };
            if S::Scalar::DOMAIN == dlw::exactalg::Domain::Int {
                let conv = |m: &Matrix<S::Scalar>| -> Vec<Vec<BigInt>> {
                    m.to_rows().iter().map(|r| r.iter().map(|x| int(x).unwrap()).collect()).collect()
                };
                oracle::int_cohomology(conv(&prev), conv(&next), dim)
            } else {
                let conv = |m: &Matrix<S::Scalar>| -> Vec<Vec<Rat>> {
                    m.to_rows()
                        .iter()
                        .map(|r| r.iter().map(|x| Rat::parse_decimal(&x.to_string()).unwrap()).collect())
                        .collect()
                };
                (oracle::rat_cohomology(conv(&prev), conv(&next), dim), Vec::new())
            }
        })
        .collect()
}

fn matches(g: &GroupPresentation, o: &(usize, Vec<BigInt>)) -> bool {
    g.free_rank == o.0 && g.invariant_factors == o.1
}

/// Whether some degree ≥ 1 is nonzero.
fn lim_case<S: InverseSystem>(system: &S, points: &[S::Index]) -> Result<bool, String>
where
    S::Scalar: Scalar,
{
    let rows = lim_char_check(system, points, 3).map_err(|e| e.to_string())?;
    let oracle = oracle_alternating(system, points, 3, |x| x.as_integer());
    for (r, o) in rows.iter().zip(&oracle) {
        ensure(r.equal, || format!("degree {}: {} vs {}", r.degree, r.alternating, r.limit))?;
        ensure(matches(&r.alternating, o), || format!("degree {}: {} but oracle {:?}", r.degree, r.alternating, o))?;
    }
    Ok(rows.iter().skip(1).any(|r| !r.alternating.is_trivial()))
}

fn criterion_1(rng: &mut Rng64) -> Outcome {
    let (mut omega, mut higher) = (0, 0);
    for i in 0..220 {
        let params = OmegaParams {
            kappa: rng.gen_range(1..=3),
            max_height: 2,
            max_rank: 2,
            entry_bound: 2,
        };
        let k = rng.gen_range(1..=4);
        if i % 2 == 0 {
            let sys = random_omega_system::<Int>(rng, &params);
            let pts = random_points(rng, &sys, k);
            higher += usize::from(lim_case(&sys, &pts)?);
        } else {
            let sys = random_omega_system::<Rat>(rng, &params);
            let pts = random_points(rng, &sys, k);
            higher += usize::from(lim_case(&sys, &pts)?);
        }
        omega += 1;
    }
    let mut lattices = 0;
    while lattices < 40 {
        let sys = random_subset_system(rng, 4, 6);
        let l = sys.lattice();
        // Maximal elements half of the time, a random subset otherwise.
        let pts: Vec<usize> = if lattices % 2 == 0 {
            (0..l.len()).filter(|&x| (0..l.len()).all(|y| y == x || !l.leq(x, y))).collect()
        } else {
            (0..l.len()).filter(|_| rng.gen_bool(0.6)).collect()
        };
        if pts.is_empty() {
            continue;
        }
        higher += usize::from(lim_case(&sys, &pts)?);
        lattices += 1;
    }
    Ok(format!("{omega} omega systems, {lattices} semilattices, degrees 0..=3, {higher} with nonzero higher cohomology"))
}

fn criterion_2() -> Outcome {
    let l = MeetSemilattice::from_order(vec!["z".into(), "x".into(), "y".into()], &[(0, 1), (0, 2)]).map_err(|e| e.to_string())?;
    let two = Matrix::from_i64(&[&[2]]);
    let sys = PosetSystem::<Int>::from_bonds(l, vec![vec![1]; 3], vec![((1, 0), two.clone()), ((2, 0), two)]).map_err(|e| e.to_string())?;
    let rows = lim_char_check(&sys, &[1, 2], 1).map_err(|e| e.to_string())?;
    // (u, v) ↦ 2v − 2u from Z² to Z has cokernel Z/2.
    let (rank, torsion) = oracle::smith(vec![vec![BigInt::from(-2), BigInt::from(2)]]);
    let expected = (1 - rank, torsion);
    ensure(expected == (0, vec![BigInt::from(2)]), || format!("oracle gives {expected:?}"))?;
    ensure(matches(&rows[1].alternating, &expected) && matches(&rows[1].limit, &expected), || {
        format!("H^1 alternating {} limit {}", rows[1].alternating, rows[1].limit)
    })?;
    Ok(format!("H^1 = {} on both sides", rows[1].alternating))
}

fn injective_corpus(rng: &mut Rng64, count: usize) -> Vec<(OmegaSystem<Rat>, Vec<dlw::omega::IndexFunction>)> {
    let mut out = Vec::new();
    while out.len() < count {
        let kappa = rng.gen_range(1..=3);
        let sys = if out.len() % 4 == 3 {
            // Random towers that happen to pass the check.
            let s = random_omega_system::<Rat>(
                rng,
                &OmegaParams {
                    kappa,
                    max_height: 2,
                    max_rank: 2,
                    entry_bound: 2,
                },
            );
            if !check_injective(&s).injective() {
                continue;
            }
            s
        } else {
            {
            let height = rng.gen_range(0..=2);
            random_injective_system(rng, kappa, height, 2, 2)
        }
        };
        let k = rng.gen_range(1..=4);
        let pts = random_points(rng, &sys, k);
        out.push((sys, pts));
    }
    out
}

fn criterion_3(corpus: &[(OmegaSystem<Rat>, Vec<dlw::omega::IndexFunction>)]) -> Outcome {
    for (i, (sys, pts)) in corpus.iter().enumerate() {
        ensure(check_injective(sys).injective(), || format!("system {i} is not injective"))?;
        let o = oracle_alternating(sys, pts, 3, |_| None);
        for (n, h) in o.iter().enumerate().skip(1) {
            ensure(h.0 == 0, || format!("system {i}: H^{n} has dimension {}", h.0))?;
        }
        ensure(verify_vanishing(sys, pts, 3).map_err(|e| e.to_string())?, || format!("system {i}: library reports nonvanishing"))?;
    }
    Ok(format!("{} injective RAT systems, H^1..H^3 vanish", corpus.len()))
}

fn random_ideal(rng: &mut Rng64, kappa: usize) -> NegligibleIdeal {
    NegligibleIdeal::new((0..kappa).filter(|_| rng.gen_bool(0.3)), kappa).unwrap()
}

/// A coherent family: either `dΘ + noise`, or a random family with the ideal
/// enlarged to cover its differential.
fn some_coherent<T: Scalar>(
    rng: &mut Rng64,
    sys: &OmegaSystem<T>,
    pts: &[dlw::omega::IndexFunction],
    n: usize,
) -> (Family<dlw::omega::IndexFunction, T>, NegligibleIdeal) {
    let ideal = random_ideal(rng, sys.kappa());
    if rng.gen_bool(0.5) {
        (coherent_family(rng, sys, pts.to_vec(), n, &ideal, 2).unwrap(), ideal)
    } else {
        let phi = random_family(rng, sys, pts.to_vec(), None, n, 2, |_| true).unwrap();
        let d = dlw::coherence::family_differential(sys, &phi).unwrap();
        let ideal = ideal.with_columns(d.support(sys).unwrap());
        (phi, ideal)
    }
}

fn criterion_4(rng: &mut Rng64, corpus: &[(OmegaSystem<Rat>, Vec<dlw::omega::IndexFunction>)]) -> Outcome {
    let (mut cases, mut trivial) = (0, 0);
    for (i, (sys, pts)) in corpus.iter().enumerate() {
        for n in 1..=3 {
            let (phi, ideal) = some_coherent(rng, sys, pts, n);
            ensure(is_coherent(sys, &phi, &ideal).unwrap(), || format!("system {i}, n = {n}: generator not coherent"))?;
            let t1 = find_type1(sys, &phi, &ideal).map_err(|e| e.to_string())?;
            let t2 = find_type2(sys, &phi, &ideal).map_err(|e| e.to_string())?;
            ensure(t1.is_some() == t2.is_some(), || format!("system {i}, n = {n}: type I {} type II {}", t1.is_some(), t2.is_some()))?;
            cases += 1;
            trivial += usize::from(t1.is_some());
        }
    }
    let mut int_cases = 0;
    let mut int_trivial = 0;
    for _ in 0..60 {
        let kappa = rng.gen_range(1..=3);
        let sys = random_omega_system::<Int>(
            rng,
            &OmegaParams {
                kappa,
                max_height: 2,
                max_rank: 2,
                entry_bound: 2,
            },
        );
        let k = rng.gen_range(1..=4);
        let pts = random_points(rng, &sys, k);
        let (phi, ideal) = some_coherent(rng, &sys, &pts, 1);
        let t1 = find_type1(&sys, &phi, &ideal).map_err(|e| e.to_string())?;
        let t2 = find_type2(&sys, &phi, &ideal).map_err(|e| e.to_string())?;
        ensure(t1.is_some() == t2.is_some(), || "INT arity 1 disagreement".into())?;
        int_cases += 1;
        int_trivial += usize::from(t1.is_some());
    }
    Ok(format!(
        "{cases} injective cases ({trivial} trivial), {int_cases} INT arity-1 cases ({int_trivial} trivial), full agreement"
    ))
}

fn criterion_5(rng: &mut Rng64) -> Outcome {
    let mut count = 0;
    for i in 0..60 {
        let n = 1 + i % 3;
        let size = rng.gen_range(2 * n..=8);
        let mut h: Vec<usize> = (0..12).collect();
        while h.len() > size {
            h.remove(rng.gen_range(0..h.len()));
        }
        let rho = rng.gen_range(1..=4);
        let p = planted_uniform(rng, h, n, rho);
        let w = verify_uniform(&p.h, n, &p.u).map_err(|v| format!("planted system {i} rejected: {v:?}"))?;
        ensure(w == p.witness, || format!("planted system {i}: witness {w:?} vs planted {:?}", p.witness))?;
        let roots = derived_roots(&p.h, n, &p.u, &w).map_err(|e| e.to_string())?;
        ensure(roots.holds(), || format!("planted system {i}: {roots:?}"))?;
        count += 1;
    }
    Ok(format!("{count} planted systems (n ≤ 3, |H| ≤ 8), both conclusions hold"))
}

fn criterion_6(rng: &mut Rng64) -> Outcome {
    let mut exprs = 0;
    for _ in 0..1200 {
        let len = rng.gen_range(0..=5);
        let terms: Vec<(Vec<u8>, i64)> = (0..rng.gen_range(1..=4))
            .map(|_| ((0..len).map(|_| rng.gen_range(0..6)).collect(), rng.gen_range(-3..=3)))
            .collect();
        let mut x = FormalExpr::zero();
        for (t, c) in &terms {
            x.add_term(t.clone(), (*c).into());
        }
        let d = formal_d(&x);
        let mut got: Vec<(Vec<u8>, i64)> = d.terms().map(|(t, c)| (t.clone(), i64::try_from(c).unwrap())).collect();
        got.sort();
        ensure(got == oracle::formal_d(&terms), || format!("d disagrees with the oracle on {terms:?}"))?;
        ensure(formal_d(&d).is_zero(), || format!("d∘d ≠ 0 on {terms:?}"))?;
        let g = rng.gen_range(0..6u8);
        ensure(star_relation_check(&x, &g).map_err(|e| e.to_string())?, || format!("star relation fails on {terms:?}"))?;
        exprs += 1;
    }
    let mut stages = 0;
    let mut instances = 0;
    for i in 0..40 {
        let n = 1 + i % 3;
        let (kappa, a_size) = (rng.gen_range(1..=3), n + rng.gen_range(0..=1));
        let (_, _, inst) = synth_partition_instance(
            rng,
            &PartitionParams {
                kappa,
                a_size,
                n,
                extra: 1,
                base: 4,
            },
        )
        .map_err(|e| e.to_string())?;
        for alpha in inst.admissible_columns() {
            let sel = |s: &[usize]| inst.selector(alpha, s);
            for tau in subsets_upto(&inst.a, n).into_iter().filter(|t| t.len() >= 2) {
                let rec = build_recursion(&tau, sel).map_err(|e| e.to_string())?;
                ensure(recursion_identity_holds(&rec), || format!("recursion identity fails at {tau:?}"))?;
                for sigma in rec.c.keys() {
                    stages += 1;
                    ensure(telescoping_check(&rec, sigma, sel).map_err(|e| e.to_string())?, || {
                        format!("telescoping fails at {sigma:?}")
                    })?;
                }
            }
        }
        instances += 1;
    }
    Ok(format!("{exprs} expressions, {instances} instances, {stages} recursion stages"))
}

fn criterion_7(rng: &mut Rng64) -> Outcome {
    let (mut count, mut nondegenerate) = (0, 0);
    for i in 0..30 {
        let sc = pipeline_scenario(rng, &PipelineParams::default()).map_err(|e| e.to_string())?;
        let r = run_pipeline(&sc.system, &sc.phi, &sc.instance, &sc.target).map_err(|e| format!("scenario {i}: {e}"))?;
        ensure(r.extraction.verified, || format!("scenario {i}: type II witness does not verify"))?;
        ensure(r.verified, || format!("scenario {i}: type I witness does not verify"))?;
        count += 1;
        nondegenerate += usize::from(r.extraction.ideal.columns().len() < sc.system.kappa());
    }
    Ok(format!("{count} scenarios verified ({nondegenerate} with a proper ideal)"))
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn criterion_8() -> Outcome {
    let mut corpus: Vec<(String, String)> = ["v_lim.json", "v_obstruction.json", "pipeline.json"]
        .iter()
        .map(|n| (n.to_string(), std::fs::read_to_string(golden(n)).unwrap()))
        .collect();
    for seed in 0..8 {
        for kind in [SynthKind::Pipeline, SynthKind::Lim, SynthKind::Delta] {
            let doc = synth_document(kind, seed).map_err(|e| e.to_string())?;
            corpus.push((format!("{kind:?} seed {seed}"), doc.to_json()));
        }
    }
    for (name, text) in &corpus {
        let doc = Document::from_json(text).map_err(|e| format!("{name}: {e}"))?;
        let once = doc.normalized().map_err(|e| format!("{name}: {e}"))?;
        let twice = Document::from_json(&once.to_json()).and_then(|d| d.normalized()).map_err(|e| format!("{name}: {e}"))?;
        ensure(once == twice, || format!("{name}: normalization is not idempotent"))?;
    }
    let bin = env!("CARGO_BIN_EXE_dlw");
    for (cmd, file, code) in [("lim", "v_lim.json", 0), ("coherence", "v_obstruction.json", 1), ("lim", "malformed_bond.json", 2)] {
        let status = Command::new(bin)
            .args([cmd, "--input"])
            .arg(golden(file))
            .output()
            .map_err(|e| e.to_string())?
            .status
            .code();
        ensure(status == Some(code), || format!("{cmd} {file}: exit {status:?}, expected {code}"))?;
    }
    Ok(format!("{} documents round-trip, exit codes 0/1/2 on the golden documents", corpus.len()))
}

fn main() {
    let mut rng = seeded(20_241);
    let corpus = injective_corpus(&mut rng, 110);
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut Rng64) -> Outcome + '_>)> = vec![
        ("1 lim-char equivalence", Box::new(criterion_1)),
        ("2 V-example golden value", Box::new(|_: &mut Rng64| criterion_2())),
        ("3 injective vanishing", Box::new(|_: &mut Rng64| criterion_3(&corpus))),
        ("4 triviality equivalence", Box::new(|r: &mut Rng64| criterion_4(r, &corpus))),
        ("5 Δ-system roots", Box::new(criterion_5)),
        ("6 formal calculus", Box::new(criterion_6)),
        ("7 end-to-end pipeline", Box::new(criterion_7)),
        ("8 CLI contract", Box::new(|_: &mut Rng64| criterion_8())),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let result = run(&mut rng);
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
