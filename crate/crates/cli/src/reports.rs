//! Job schemas and the JSON reports written for each command.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use pinlock::design::DesignSolution;
use pinlock::game::{GameOutcome, GameStatus};
use pinlock::network::Topology;
use pinlock::sim::SimConfig;
use pinlock::sync::{GeneralVerdict, NodeDynamics};
use pinlock::Tolerances;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeJob {
    pub schema: String,
    pub topology: Topology,
    pub dynamics: NodeDynamics,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignMode {
    Free,
    Identical,
    Cardinality,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignJob {
    pub schema: String,
    pub topology: Topology,
    pub dynamics: NodeDynamics,
    pub v: Vec<f64>,
    /// 1-based; every node when absent.
    #[serde(default)]
    pub selectable: Option<Vec<usize>>,
    pub mode: DesignMode,
    #[serde(default = "one")]
    pub gain_ratio: f64,
    #[serde(default)]
    pub n_total: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameMode {
    Stackelberg,
    FixedDefender,
    FixedAttacker,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameJob {
    pub schema: String,
    pub topology: Topology,
    pub dynamics: NodeDynamics,
    pub beta_pin: Vec<f64>,
    pub kappa: Vec<f64>,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "one")]
    pub gain_ratio: f64,
    pub mode: GameMode,
    /// Budget for the fixed-budget modes.
    #[serde(default)]
    pub omega: Option<f64>,
    /// Uniform upper bound on each node's allocation.
    #[serde(default)]
    pub pi_cap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateJob {
    pub schema: String,
    #[serde(flatten)]
    pub sim: SimConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub config: Value,
    pub tolerances: Tolerances,
    /// Eigenvalues of `A − diag β`, non-decreasing.
    pub spectrum: Vec<f64>,
    pub lambda_n: f64,
    pub threshold: f64,
    pub mu_n: f64,
    pub margin: f64,
    pub boundary: bool,
    pub synced: bool,
    /// Per-mode stability test; agrees with `synced` away from the boundary.
    pub modes: GeneralVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub schema: String,
    pub config: Value,
    pub tolerances: Tolerances,
    pub mode: DesignMode,
    pub solution: DesignSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub schema: String,
    pub config: Value,
    pub tolerances: Tolerances,
    pub mode: GameMode,
    pub threshold: f64,
    pub status: GameStatus,
    pub outcome: GameOutcome,
    /// Attack list omitted from `outcome` because `t₀` exceeded the report limit.
    pub attacks_truncated: bool,
    /// Nodes whose κ never enters the game.
    pub unused_kappa_nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub schema: String,
    pub config: Value,
    pub seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub samples: usize,
    pub diverged: bool,
    pub final_time: f64,
    pub final_sync_error: f64,
    /// Exponential rate of the sync error over the second half; absent under exact sync.
    pub convergence_rate: Option<f64>,
    pub exact_sync: bool,
}
