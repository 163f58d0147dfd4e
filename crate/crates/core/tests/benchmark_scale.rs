//! The benchmark designs are optimal when the threshold uses `c·a_g = 100`.

mod common;

use common::tol;
use pinlock::design::{solve_free, DesignProblem, DesignStatus};
use pinlock::fixtures;
use pinlock::game::{build_m, enumerate_successful_attacks, GameSpec};
use pinlock::network::coupling_matrix;
use pinlock::numerics::{solve_lp, LinearProgram, LpStatus, Relation};
use pinlock::sync::NodeDynamics;

fn dynamics_c100() -> NodeDynamics {
    NodeDynamics::linear(fixtures::chen_jacobian(), 1.0, 100.0).unwrap()
}

fn problem(v: Vec<f64>) -> DesignProblem {
    let a = coupling_matrix(&fixtures::paper_fig2());
    DesignProblem::from_dynamics(a, v, &dynamics_c100(), &tol()).unwrap().with_selectable(&[4, 6]).unwrap()
}

#[test]
fn free_design_reproduces_beta_1() {
    let s = solve_free(&problem(fixtures::benchmark_costs()), &tol()).unwrap();
    assert_eq!(s.status, DesignStatus::Optimal);
    println!("beta = {:?}, cost = {}, cuts = {}", s.beta, s.total_cost, s.cuts);
    assert!((s.beta[3] - fixtures::BETA_1[3]).abs() < 2e-3);
    assert!((s.beta[5] - fixtures::BETA_1[5]).abs() < 2e-3);
}

#[test]
fn expensive_hub_reproduces_beta_2() {
    let mut v = fixtures::benchmark_costs();
    v[3] = 10.1;
    let s = solve_free(&problem(v), &tol()).unwrap();
    assert_eq!(s.status, DesignStatus::Optimal);
    println!("beta = {:?}, cost = {}, cuts = {}", s.beta, s.total_cost, s.cuts);
    assert_eq!(s.beta[3], 0.0);
    assert!((s.beta[5] - fixtures::BETA_2[5]).abs() < 5e-3);
}

/// The published allocation is the cheapest one lifting every row of `M`
/// (with `η = 2`) to at least 1.
#[test]
fn published_allocation_is_unit_row_normalization() {
    let a = coupling_matrix(&fixtures::paper_fig2());
    let spec = GameSpec::new(
        a,
        &fixtures::game_beta_pin(),
        fixtures::KAPPA.to_vec(),
        fixtures::GAME_ETA,
        1.0,
        &dynamics_c100(),
        &tol(),
    )
    .unwrap();
    let attacks = enumerate_successful_attacks(&spec, &tol()).unwrap();
    assert_eq!(attacks.len(), 7);
    let m = build_m(&attacks, spec.kappa(), spec.eta());
    let pinned = spec.pinned();
    let mut lp = LinearProgram::new(vec![1.0; pinned.len()]);
    for r in 0..m.rows() {
        lp.constrain(pinned.iter().map(|&i| m[(r, i - 1)]).collect(), Relation::Ge, 1.0);
    }
    let sol = solve_lp(&lp, &tol()).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    for (k, &i) in pinned.iter().enumerate() {
        assert!((sol.x[k] - fixtures::PI_D_STAR[i - 1]).abs() < 1e-2, "{:?}", sol.x);
    }
}

fn game_c100() -> GameSpec {
    GameSpec::new(
        coupling_matrix(&fixtures::paper_fig2()),
        &fixtures::game_beta_pin(),
        fixtures::KAPPA.to_vec(),
        fixtures::GAME_ETA,
        1.0,
        &dynamics_c100(),
        &tol(),
    )
    .unwrap()
}

/// Every nonempty attack succeeds, so `π = t·(1.5, 2.5, 3)` lifts every row
/// of `M` together and the maximin is unbounded along that ray.
#[test]
fn benchmark_game_is_unbounded_without_cap() {
    let out = pinlock::game::solve_stackelberg(&game_c100(), &tol()).unwrap();
    assert_eq!(out.status, pinlock::game::GameStatus::Unbounded);
    assert_eq!(out.successful_attacks, 7);
    assert_eq!(out.attacks[0].nodes, vec![7]);
    let ray = out.ray.unwrap();
    let m = build_m(&enumerate_successful_attacks(&game_c100(), &tol()).unwrap(), fixtures::KAPPA.as_slice(), 2.0);
    for r in 0..m.rows() {
        let lift: f64 = (0..9).map(|j| m[(r, j)] * ray[j]).sum();
        assert!(lift > 0.0, "row {r} does not grow along the ray");
    }
}

#[test]
fn benchmark_fixed_budgets() {
    let spec = game_c100();
    let total: f64 = fixtures::PI_D_STAR.iter().sum();
    let out = pinlock::game::solve_fixed_defender_budget(&spec, total, &tol()).unwrap();
    assert!(out.attack_cost.unwrap() >= fixtures::ATTACK_COST_STAR);
    let alloc = pinlock::game::solve_fixed_attacker_budget(&spec, fixtures::ATTACK_COST_STAR, &tol()).unwrap();
    assert!(alloc.total <= total);
}
