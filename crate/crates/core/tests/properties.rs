mod common;

use common::*;
use kpcst::exec::Exec;
use kpcst::growth::{gp_run, gp_run_with, GrowthConfig};
use kpcst::instance::{check_tree, edge_cost, penalty_cost};
use kpcst::oracle::exact_solve_with;
use kpcst::pruning::{pp_run, pp_run_ordered, pp_trace_minimal, verify_subset_path, PruneGraph};
use kpcst::report::{check_result, write_solution, WriteOptions};
use kpcst::solver::solve_with;
use kpcst::threshold::gw_run;
use kpcst::{generate_random, parse_instance, serialize_instance, Instance, Rational, SolveOptions};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big(r: &Rational) -> BigRational {
    BigRational::new(r.numer(), r.denom())
}

fn rational() -> impl Strategy<Value = Rational> {
    let small = (-1000i64..1000, 1i64..50).prop_map(|(n, d)| Rational::new(n, d).unwrap());
    let wide = (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Rational::new(n, d).unwrap());
    let huge = (any::<i64>(), any::<i64>(), 1i64..1000).prop_map(|(a, b, d)| {
        Rational::from_bigints(BigInt::from(a) * BigInt::from(b) * 3, BigInt::from(d)).unwrap()
    });
    prop_oneof![4 => small, 2 => wide, 1 => huge]
}

fn instance() -> impl Strategy<Value = Instance> {
    any::<u64>().prop_map(|seed| small_instance(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn costly() -> impl Strategy<Value = Instance> {
    any::<u64>().prop_map(|seed| costly_instance(&mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn arithmetic_agrees_with_bigrational(a in rational(), b in rational()) {
        let (x, y) = (big(&a), big(&b));
        prop_assert_eq!(big(&(&a + &b)), &x + &y);
        prop_assert_eq!(big(&(&a - &b)), &x - &y);
        prop_assert_eq!(big(&(&a * &b)), &x * &y);
        if !b.is_zero() {
            prop_assert_eq!(big(&(&a / &b)), &x / &y);
        }
        prop_assert_eq!(a.cmp(&b), x.cmp(&y));
        prop_assert_eq!(a == b, x == y);
        prop_assert_eq!(big(&a.mul_int(7)), &x * BigRational::from_integer(7.into()));
        prop_assert_eq!(Rational::cmp_scaled(&a, 3, &b, 5), (&x * BigRational::from_integer(3.into())).cmp(&(&y * BigRational::from_integer(5.into()))));
    }

    #[test]
    fn display_parses_back(a in rational()) {
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn instance_text_round_trips(n in 2usize..15, extra in 0usize..20, k in 0usize..15, seed in any::<u64>()) {
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let inst = generate_random(n, m, 30, 30, k.min(n), seed).unwrap();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(serialize_instance(&back), text);
        prop_assert_eq!(back.n(), n);
        prop_assert_eq!(back.m(), m);
    }

    #[test]
    fn pruning_matches_reference(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, sets) = prune_pair(&mut rng);
        let out = pp_run(&h, &sets);
        prop_assert_eq!(&out, &naive_prune(&h, &sets));
        prop_assert!(out.contains(0) && out.is_connected() && out.is_pruned_with(&sets));
        prop_assert!(out.is_subgraph_of(&h));
    }

    #[test]
    fn pruning_ignores_order(seed in any::<u64>(), perm in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, sets) = prune_pair(&mut rng);
        let mut rank: Vec<usize> = (0..sets.len()).collect();
        rank.shuffle(&mut ChaCha8Rng::seed_from_u64(perm));
        prop_assert_eq!(pp_run_ordered(&h, &sets, &rank), pp_run(&h, &sets));
    }

    #[test]
    fn fewer_sets_prune_less(seed in any::<u64>(), keep in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, sets) = prune_pair(&mut rng);
        let sub: Vec<Vec<usize>> = sets.iter().enumerate().filter(|(i, _)| keep >> (i % 64) & 1 == 1).map(|(_, s)| s.clone()).collect();
        prop_assert!(pp_run(&h, &sets).is_subgraph_of(&pp_run(&h, &sub)));
    }

    #[test]
    fn sandwiched_graphs_prune_alike(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, sets) = prune_pair(&mut rng);
        let base = pp_run(&h, &sets);
        let d = between(&mut rng, &base, &h);
        prop_assert_eq!(pp_run(&d, &sets), base.clone());
        // Pruning an already pruned graph changes nothing.
        prop_assert_eq!(pp_run(&base, &sets), base);
    }

    #[test]
    fn pruned_subgraphs_survive_pruning(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, sets) = prune_pair(&mut rng);
        let base = pp_run(&h, &sets);
        let d = between(&mut rng, &base, &h);
        let keep: Vec<usize> = d.vertices().into_iter().filter(|&v| v == 0 || rng.gen_bool(0.7)).collect();
        let d = d.induced(&keep);
        if d.is_connected() && d.contains(0) && d.is_pruned_with(&sets) {
            prop_assert!(d.is_subgraph_of(&pp_run(&h, &sets)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // Growth trees are connected inside every processed set; pruning with the
    // sets that miss `v` gives exactly the input the trace expects.
    #[test]
    fn minimal_first_trace_is_a_subset_path(inst in instance(), num in 0i64..40, pick in any::<u64>()) {
        let out = gp_run(&inst, &Rational::new(num, 3).unwrap(), &[]).unwrap();
        let sets = out.processed_sets();
        let v = (pick % inst.n() as u64) as usize;
        let outside: Vec<Vec<usize>> = sets.iter().filter(|b| b.binary_search(&v).is_err()).cloned().collect();
        let h = pp_run(&PruneGraph::from_edges(&inst, &out.tree.edges), &outside);
        let path = pp_trace_minimal(&h, &sets).unwrap();
        prop_assert!(verify_subset_path(&h, &sets, &path).is_ok());
        prop_assert_eq!(path.parts.last().unwrap(), &pp_run(&h, &sets).vertices());
        prop_assert!(path.parts.iter().flatten().count() == h.num_vertices());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn growth_keeps_duals_feasible(inst in instance(), num in 0i64..60, den in 1i64..8) {
        let lambda = Rational::new(num, den).unwrap();
        let out = gp_run_with(&inst, &lambda, &[], &GrowthConfig { check_invariants: true }).unwrap();
        prop_assert!(out.trace.len() <= 3 * inst.n() - 3);
        prop_assert_eq!(dual_violations(&inst, &out.family, &out.processed, &lambda), Vec::<String>::new());
        for &j in &out.tree.edges {
            prop_assert!(tight(&inst, &out.family, j));
        }
    }

    #[test]
    fn large_potential_spans_everything(inst in instance()) {
        let lambda = inst.total_cost() + Rational::one();
        prop_assert_eq!(gw_run(&inst, &lambda, &[]).unwrap().spans(), inst.n());
    }

    #[test]
    fn solver_output_is_valid(inst in prop_oneof![instance(), costly()]) {
        let sol = solve_with(&inst, &SolveOptions { exec: Exec::Sequential, ..Default::default() }).unwrap();
        check_tree(&inst, &sol.tree).unwrap();
        prop_assert!(sol.tree.vertices.len() >= inst.k());
        prop_assert!(sol.tree.contains(inst.root()));
        prop_assert_eq!(&sol.edge_cost, &edge_cost(&inst, &sol.tree));
        prop_assert_eq!(&sol.penalty_cost, &penalty_cost(&inst, &sol.tree));
        prop_assert!(sol.certificates.iter().all(|c| c.holds()));
        let text = write_solution(&sol, &WriteOptions { certificates: true, decimal: false });
        prop_assert!(check_result(&inst, &text).is_ok());
    }

    #[test]
    fn within_twice_the_optimum(inst in prop_oneof![instance(), costly()]) {
        let sol = solve_with(&inst, &SolveOptions::default()).unwrap();
        let opt = exact_solve_with(&inst, 12, Exec::Sequential).unwrap();
        prop_assert!(bound_lhs(&inst, &sol.tree) <= opt.opt.mul_int(2));
        prop_assert!(opt.opt <= sol.objective);
    }

    #[test]
    fn oracle_is_deterministic_across_modes(inst in instance()) {
        let a = exact_solve_with(&inst, 12, Exec::Sequential).unwrap();
        let b = exact_solve_with(&inst, 12, Exec::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn solver_is_deterministic_across_modes(inst in costly()) {
        let a = solve_with(&inst, &SolveOptions { exec: Exec::Sequential, ..Default::default() }).unwrap();
        let b = solve_with(&inst, &SolveOptions { exec: Exec::Parallel, ..Default::default() }).unwrap();
        prop_assert_eq!(a.tree, b.tree);
        prop_assert_eq!(a.objective, b.objective);
    }
}
