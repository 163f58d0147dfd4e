//! The nine-node Chen-oscillator benchmark network and its reference designs.

use crate::network::Topology;
use crate::numerics::Matrix;
use crate::sim::ChenParams;
use crate::sync::NodeDynamics;

/// Edges of the nine-node benchmark network (1-based).
pub const BENCHMARK_EDGES: [(usize, usize); 10] =
    [(4, 1), (4, 2), (4, 3), (4, 5), (4, 6), (4, 7), (5, 6), (6, 7), (5, 8), (7, 9)];

/// Reference free design over the selectable set {4, 6}.
pub const BETA_1: [f64; 9] = [0.0, 0.0, 0.0, 1.2411, 0.0, 1.9855, 0.0, 0.0, 0.0];
/// Reference free design once node 4 becomes expensive.
pub const BETA_2: [f64; 9] = [0.0, 0.0, 0.0, 0.0, 0.0, 11.4341, 0.0, 0.0, 0.0];

/// Attack-difficulty coefficients of the benchmark game.
pub const KAPPA: [f64; 9] = [1.0, 1.0, 1.0, 10.0, 5.0, 6.0, 5.0, 1.0, 1.0];
/// Pinned nodes of the benchmark game (1-based).
pub const GAME_PINNED: [usize; 3] = [4, 6, 7];
pub const GAME_ETA: f64 = 2.0;
/// Reference defender allocation and attacker cost.
pub const PI_D_STAR: [f64; 9] = [0.0, 0.0, 0.0, 1.5003, 0.0, 2.5007, 3.0009, 0.0, 0.0];
pub const ATTACK_COST_STAR: f64 = 5.0;

/// Coupling strength of the benchmark.
pub const COUPLING: f64 = 10.0;

pub fn paper_fig2() -> Topology {
    Topology::new(9, BENCHMARK_EDGES).expect("benchmark topology is valid")
}

/// Chen Jacobian at the origin with `c = 10`, `a_g = 1`, `b_g = 0`.
pub fn chen_dynamics() -> NodeDynamics {
    NodeDynamics::linear(chen_jacobian(), 1.0, COUPLING).expect("benchmark dynamics are valid")
}

pub fn chen_jacobian() -> Matrix {
    ChenParams::default().jacobian(&[0.0, 0.0, 0.0])
}

/// Pinning costs `vᵢ = 0.1·kᵢ`.
pub fn benchmark_costs() -> Vec<f64> {
    paper_fig2().degrees().iter().map(|k| 0.1 * *k as f64).collect()
}

/// Binary pinning vector of the benchmark game.
pub fn game_beta_pin() -> Vec<f64> {
    (1..=9).map(|i| if GAME_PINNED.contains(&i) { 1.0 } else { 0.0 }).collect()
}
