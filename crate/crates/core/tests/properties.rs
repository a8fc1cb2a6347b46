//! Property tests against the brute-force oracles.

mod common;

use malleq::bdt::{self, Bdt};
use malleq::classical::{check_mall_proof, mall_bdt_slicing, mall_equiv, MallProof};
use malleq::equiv::proof_equiv;
use malleq::generators::{
    bdt_pair, mall_pair, mutate, proof_pair, random_free_bdt, random_line, GenConfig, GenRng,
};
use malleq::proof::{check_proof, Proof};
use malleq::reductions::{ord_solve, ord_to_bdt_pair, ord_to_proof_pair};
use malleq::slicing::{bdt_slicing, expand};
use proptest::prelude::*;
use rand::SeedableRng;

use common::{explicit_equiv, explicit_slicing, truth_table_equiv};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_trees_are_free_and_bounded(seed: u64, vars in 0usize..8, depth in 0usize..8) {
        let cfg = GenConfig::new(seed).vars(vars).depth(depth);
        let t = random_free_bdt(&cfg);
        prop_assert!(t.is_free());
        prop_assert!(t.depth() <= depth);
        prop_assert_eq!(t.to_string(), random_free_bdt(&cfg).to_string());
        prop_assert_eq!(Bdt::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn bdt_equiv_matches_truth_table(seed: u64, vars in 1usize..7, depth in 0usize..7) {
        let (t, u) = bdt_pair(&GenConfig::new(seed).vars(vars).depth(depth));
        prop_assert_eq!(bdt::equiv(&t, &u).unwrap(), truth_table_equiv(&t, &u));
        prop_assert_eq!(bdt::equiv(&u, &t).unwrap(), truth_table_equiv(&t, &u));
        prop_assert!(bdt::equiv(&t, &t).unwrap());
    }

    #[test]
    fn proof_pairs_match_oracle(seed: u64, vars in 1usize..5, muts in 0usize..5) {
        let pp = proof_pair(&GenConfig::new(seed).vars(vars).depth(vars).mutations(muts));
        check_proof(&pp.left).unwrap();
        check_proof(&pp.right).unwrap();
        let oracle = explicit_equiv(&pp.left, &pp.right);
        prop_assert_eq!(oracle, pp.expected);
        prop_assert_eq!(proof_equiv(&pp.left, &pp.right).unwrap().equivalent, oracle);
    }

    #[test]
    fn expand_of_bdt_slicing_is_the_slicing(seed: u64, vars in 1usize..5) {
        let pp = proof_pair(&GenConfig::new(seed).vars(vars).depth(vars));
        for p in [&pp.left, &pp.right] {
            prop_assert_eq!(expand(&bdt_slicing(p)).unwrap(), explicit_slicing(p));
        }
    }

    #[test]
    fn proofs_round_trip_through_text(seed: u64, vars in 1usize..4) {
        let pp = proof_pair(&GenConfig::new(seed).vars(vars).depth(vars));
        let text = pp.right.to_string();
        prop_assert_eq!(Proof::parse(&text).unwrap(), pp.right.clone());
        prop_assert_eq!(Proof::parse(&pp.right.pretty()).unwrap(), pp.right);
    }

    #[test]
    fn mutations_preserve_equivalence(seed: u64, steps in 1usize..6) {
        let pp = proof_pair(&GenConfig::new(seed).vars(3).depth(3).mutations(0));
        let mut rng = GenRng::seed_from_u64(seed);
        let mut q = pp.left.clone();
        for _ in 0..steps {
            q = mutate(&mut rng, &q);
        }
        prop_assert_eq!(q.conclusion(), pp.left.conclusion());
        prop_assert!(proof_equiv(&pp.left, &q).unwrap().equivalent);
    }

    #[test]
    fn lines_validate_and_reduce(seed: u64, n in 4usize..12) {
        let inst = random_line(&GenConfig::new(seed).vars(n));
        prop_assert_eq!(inst.graph.len(), n);
        let truth = ord_solve(&inst);
        let (p, r) = ord_to_proof_pair(&inst).unwrap();
        prop_assert_eq!(proof_equiv(&p, &r).unwrap().equivalent, truth);
        let (t, u) = ord_to_bdt_pair(&inst).unwrap();
        prop_assert_eq!(truth_table_equiv(&t, &u), truth);
    }

    #[test]
    fn mall_equiv_matches_oracle(seed: u64, depth in 1usize..5) {
        let (p, q): (MallProof, MallProof) = mall_pair(&GenConfig::new(seed).depth(depth));
        check_mall_proof(&p).unwrap();
        check_mall_proof(&q).unwrap();
        prop_assert_eq!(expand(&mall_bdt_slicing(&p)).unwrap(), explicit_slicing(&p));
        prop_assert_eq!(mall_equiv(&p, &q).unwrap().equivalent, explicit_equiv(&p, &q));
        prop_assert_eq!(MallProof::parse(&p.to_string()).unwrap(), p);
    }
}
