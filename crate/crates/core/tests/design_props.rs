mod common;

use common::{enumerate_binary, lambda_max_of, random_connected, tol};
use pinlock::design::{free_design_cuts, solve_free, solve_identical_bip, DesignProblem, DesignStatus};
use pinlock::network::{coupling_matrix, Topology};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    topology: Topology,
    v: Vec<f64>,
    threshold: f64,
    gain_ratio: f64,
}

fn instance(seed: u64, max_n: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_n);
    let topology = random_connected(&mut rng, n, 0.3);
    let v = (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect();
    let gain_ratio = rng.gen_range(1.0..3.0);
    // Reachable with every node pinned at the given ratio.
    let floor = lambda_max_of(&coupling_matrix(&topology), &vec![gain_ratio; n]);
    let threshold = rng.gen_range(floor * 0.9..-0.02);
    Instance { topology, v, threshold, gain_ratio }
}

fn problem(inst: &Instance) -> DesignProblem {
    DesignProblem::new(coupling_matrix(&inst.topology), inst.v.clone(), inst.threshold)
        .unwrap()
        .with_gain_ratio(inst.gain_ratio)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bip_matches_enumeration(seed in any::<u64>()) {
        let inst = instance(seed, 8);
        let p = problem(&inst);
        let s = solve_identical_bip(&p, &tol()).unwrap();
        let want = enumerate_binary(p.coupling(), &inst.v, inst.threshold, inst.gain_ratio).unwrap();
        prop_assert_eq!(s.status, DesignStatus::Optimal);
        prop_assert!((s.total_cost - want).abs() <= 1e-6, "{} vs {}", s.total_cost, want);
        prop_assert!(s.mu_n <= inst.threshold + 1e-6);
        if let Some(root) = s.lower_bound {
            prop_assert!(root <= s.total_cost + 1e-9);
        }
    }

    #[test]
    fn free_design_is_feasible_and_cuts_are_valid(seed in any::<u64>()) {
        let inst = instance(seed, 8);
        let p = problem(&inst).with_gain_ratio(1.0).unwrap();
        let s = solve_free(&p, &tol()).unwrap();
        prop_assert_eq!(s.status, DesignStatus::Optimal);
        prop_assert!(s.mu_n <= inst.threshold + 1e-6);
        for (b, d) in s.beta.iter().zip(&s.d) {
            prop_assert_eq!(*d, *b > 0.0);
        }
        // Every cut must hold at feasible points: the solution itself, and
        // random feasible schemes built by scaling up gains.
        let cuts = free_design_cuts(&p, &tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut feasible = vec![s.beta.clone()];
        for _ in 0..5 {
            let beta: Vec<f64> = (0..p.n()).map(|_| rng.gen_range(0.0..20.0)).collect();
            if lambda_max_of(p.coupling(), &beta) <= inst.threshold {
                feasible.push(beta);
            }
        }
        for cut in &cuts {
            for beta in &feasible {
                prop_assert!(cut.slack(beta) >= -1e-6, "cut violated by a feasible point");
            }
        }
    }

    #[test]
    fn free_cost_is_label_invariant(seed in any::<u64>()) {
        let inst = instance(seed, 7);
        let n = inst.topology.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let edges = inst.topology.edges().iter().map(|[i, j]| (perm[i - 1] + 1, perm[j - 1] + 1));
        let permuted = Topology::new(n, edges).unwrap();
        let mut v = vec![0.0; n];
        for i in 0..n {
            v[perm[i]] = inst.v[i];
        }
        let base = solve_free(&problem(&inst).with_gain_ratio(1.0).unwrap(), &tol()).unwrap();
        let q = DesignProblem::new(coupling_matrix(&permuted), v, inst.threshold).unwrap();
        let other = solve_free(&q, &tol()).unwrap();
        prop_assert!((base.total_cost - other.total_cost).abs() <= 1e-5 * base.total_cost.max(1e-12));
    }
}

#[test]
fn reduced_support_oracle_agrees_with_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(3..=7);
        let a = coupling_matrix(&random_connected(&mut rng, n, 0.3));
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let theta = -rng.gen_range(0.02..0.3);
        for i in 0..n {
            let by_bisection = common::single_node_gain(&a, i, theta).map(|b| v[i] * b);
            let by_reduction = common::single_support_optimum(&a, &v, i, theta);
            match (by_bisection, by_reduction) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-6 * x.max(1e-9), "{x} vs {y}"),
                (None, None) => {}
                other => panic!("oracles disagree on reachability: {other:?}"),
            }
        }
    }
}
