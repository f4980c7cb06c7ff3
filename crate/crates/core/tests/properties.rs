mod oracle;

use dlw::cli::{synth_document, Document, SynthKind};
use dlw::coherence::{family_differential, find_type1, find_type2, verify_trivialization, TrivialityKind};
use dlw::complexes::{alternating_complex, lim_char_check};
use dlw::deltasys::{aligned, overlap, strings};
use dlw::exactalg::{smith_diagonal, solve_linear, Int, Matrix, Rat, Scalar};
use dlw::injective::check_injective;
use dlw::omega::{InverseSystem, NegligibleIdeal};
use dlw::propagation::{formal_d, formal_star, star_relation_check, FormalExpr};
use dlw::synth::{
    coherent_family, random_family, random_injective_system, random_matrix, random_omega_system, random_points,
    random_subset_system, seeded, OmegaParams,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn small() -> OmegaParams {
    OmegaParams {
        kappa: 2,
        max_height: 2,
        max_rank: 2,
        entry_bound: 2,
    }
}

fn int_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_matches_the_oracle(rows in int_matrix()) {
        let m = Matrix::<Int>::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()).unwrap();
        let diag = smith_diagonal(&m);
        let (rank, torsion) = oracle::smith(m.to_rows());
        prop_assert_eq!(diag.len(), rank);
        let ours: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_one()).collect();
        prop_assert_eq!(ours, torsion);
    }

    #[test]
    fn solutions_solve(seed: u64) {
        let mut rng = seeded(seed);
        let (r, c) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let m: Matrix<Int> = random_matrix(&mut rng, r, c, 3);
        let x: Vec<Int> = (0..c).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
        let b = m.mul_vec(&x).unwrap();
        let sol = solve_linear(&m, &b).unwrap();
        prop_assert!(sol.is_some());
        prop_assert_eq!(m.mul_vec(&sol.unwrap()).unwrap(), b);
    }

    #[test]
    fn alternating_complexes_are_complexes(seed: u64) {
        let mut rng = seeded(seed);
        let sys = random_omega_system::<Int>(&mut rng, &small());
        let pts = random_points(&mut rng, &sys, 4);
        prop_assert!(alternating_complex(&sys, &pts, 3).unwrap().is_complex());
    }

    #[test]
    fn semilattice_limits_agree(seed: u64) {
        let mut rng = seeded(seed);
        let sys = random_subset_system(&mut rng, 3, 6);
        let pts: Vec<usize> = (0..sys.lattice().len()).collect();
        prop_assert!(lim_char_check(&sys, &pts, 2).unwrap().iter().all(|r| r.equal));
    }

    #[test]
    fn differential_squares_to_zero_on_families(seed: u64, arity in 1usize..3) {
        let mut rng = seeded(seed);
        let sys = random_omega_system::<Int>(&mut rng, &small());
        let pts = random_points(&mut rng, &sys, 4);
        let phi = random_family(&mut rng, &sys, pts, None, arity, 3, |_| true).unwrap();
        let dd = family_differential(&sys, &family_differential(&sys, &phi).unwrap()).unwrap();
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn generated_injective_systems_pass_the_check(seed: u64) {
        let mut rng = seeded(seed);
        let sys = random_injective_system(&mut rng, 3, 2, 2, 2);
        prop_assert!(check_injective(&sys).injective());
    }

    #[test]
    fn witnesses_verify(seed: u64, arity in 1usize..4) {
        let mut rng = seeded(seed);
        let sys = random_injective_system(&mut rng, 2, 2, 2, 2);
        let pts = random_points(&mut rng, &sys, 4);
        let ideal = NegligibleIdeal::new((0..2).filter(|_| rng.gen_bool(0.4)), 2).unwrap();
        let phi = coherent_family(&mut rng, &sys, pts, arity, &ideal, 2).unwrap();
        let t1 = find_type1(&sys, &phi, &ideal).unwrap();
        let t2 = find_type2(&sys, &phi, &ideal).unwrap();
        prop_assert_eq!(t1.is_some(), t2.is_some());
        if let Some(w) = t1 {
            prop_assert!(verify_trivialization(&sys, &phi, &w, TrivialityKind::TypeI, &ideal).unwrap());
        }
        if let Some(w) = t2 {
            prop_assert!(verify_trivialization(&sys, &phi, &w, TrivialityKind::TypeII, &ideal).unwrap());
        }
    }

    #[test]
    fn block_supports_are_columns(seed: u64) {
        let mut rng = seeded(seed);
        let sys = random_omega_system::<Rat>(&mut rng, &small());
        let x = sys.top();
        let v: Vec<Rat> = (0..sys.rank(&x)).map(|_| Rat::from_i64(rng.gen_range(-1..=1))).collect();
        let support = sys.column_support(&x, &v).unwrap();
        let off = sys.block_offsets(&x);
        for c in 0..sys.kappa() {
            let nonzero = v[off[c]..off[c + 1]].iter().any(|e| !e.is_zero());
            prop_assert_eq!(nonzero, support.contains(&c));
        }
    }

    #[test]
    fn formal_relations(terms in prop::collection::vec((prop::collection::vec(0u8..6, 3), -3i64..=3), 1..5), g in 0u8..6) {
        let mut x = FormalExpr::zero();
        for (t, c) in &terms {
            x.add_term(t.clone(), (*c).into());
        }
        prop_assert!(formal_d(&formal_d(&x)).is_zero());
        prop_assert!(star_relation_check(&x, &g).unwrap());
        prop_assert_eq!(formal_star(&x, &g).homogeneous_length().unwrap_or(4), 4);
    }

    #[test]
    fn overlaps_are_symmetric(a in prop::collection::btree_set(0usize..10, 3), b in prop::collection::btree_set(0usize..10, 3)) {
        let (a, b): (Vec<usize>, Vec<usize>) = (a.into_iter().collect(), b.into_iter().collect());
        prop_assert_eq!(aligned(&a, &b), aligned(&b, &a));
        if aligned(&a, &b) {
            prop_assert_eq!(overlap(&a, &b).unwrap(), overlap(&b, &a).unwrap());
        }
    }

    #[test]
    fn strings_are_increasing_chains(x in prop::collection::btree_set(0usize..8, 2..5), n in 1usize..3) {
        let x: Vec<usize> = x.into_iter().collect();
        for s in strings(&x, n).unwrap() {
            prop_assert!(!s[0].is_empty());
            for w in s.windows(2) {
                prop_assert_eq!(w[1].len(), w[0].len() + 1);
                prop_assert!(w[0].iter().all(|e| w[1].contains(e)));
            }
            prop_assert!(s.last().unwrap().len() <= n);
        }
    }

    #[test]
    fn documents_round_trip(seed: u64) {
        let kind = [SynthKind::Pipeline, SynthKind::Lim, SynthKind::Delta][(seed % 3) as usize];
        let text = synth_document(kind, seed).unwrap().to_json();
        let once = Document::from_json(&text).unwrap().normalized().unwrap();
        let twice = Document::from_json(&once.to_json()).unwrap().normalized().unwrap();
        prop_assert_eq!(once, twice);
    }
}
