//! Minimum-cost pinning design.
//!
//! All three solvers minimize `vᵀβ` subject to `λ_max(A − s·diag β) ≤ θ`:
//!
//! * [`solve_free`]: continuous gains, `s = 1`, `β ≥ 0` on the selectable set.
//! * [`solve_identical_bip`]: one shared gain `c̄`, so `β` is binary and `s = c̄/c`.
//! * [`solve_cardinality`]: continuous gains with at most `n_total` pinned nodes.

mod branch_bound;
mod cardinality;
mod cutting_plane;

use serde::{Deserialize, Serialize};

use crate::error::{input_err, PinError, Result};
use crate::network::CouplingMatrix;
use crate::numerics::symmetric_eigen;
use crate::sync::{sync_threshold, NodeDynamics};
use crate::tolerances::Tolerances;

pub use branch_bound::solve_identical_bip;
pub use cardinality::solve_cardinality;
pub use cutting_plane::Cut;
use cutting_plane::{CpOutcome, Subproblem};

#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    coupling: CouplingMatrix,
    v: Vec<f64>,
    /// 0-based, sorted.
    selectable: Vec<usize>,
    threshold: f64,
    c: f64,
    gain_ratio: f64,
    n_total: Option<usize>,
}

impl DesignProblem {
    /// Every node selectable, `c = 1`, `gain_ratio = 1`.
    pub fn new(coupling: CouplingMatrix, v: Vec<f64>, threshold: f64) -> Result<Self> {
        coupling.require_connected()?;
        let n = coupling.n();
        if v.len() != n {
            return input_err(format!("cost vector has {} entries for {n} nodes", v.len()));
        }
        if let Some((i, vi)) = v.iter().enumerate().find(|(_, x)| !(**x > 0.0 && x.is_finite())) {
            return input_err(format!("pinning cost of node {} must be positive, got {vi}", i + 1));
        }
        if !threshold.is_finite() {
            return input_err("threshold must be finite");
        }
        Ok(Self { coupling, v, selectable: (0..n).collect(), threshold, c: 1.0, gain_ratio: 1.0, n_total: None })
    }

    /// Threshold and coupling strength taken from node dynamics.
    pub fn from_dynamics(
        coupling: CouplingMatrix,
        v: Vec<f64>,
        dynamics: &NodeDynamics,
        tol: &Tolerances,
    ) -> Result<Self> {
        let mut p = Self::new(coupling, v, sync_threshold(dynamics, tol)?)?;
        p.c = dynamics.c;
        Ok(p)
    }

    /// Restricts pinning to the given 1-based node ids.
    pub fn with_selectable(mut self, ids: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut sel = Vec::with_capacity(ids.len());
        for &id in ids {
            if id == 0 || id > n {
                return input_err(format!("selectable node {id} outside 1..={n}"));
            }
            sel.push(id - 1);
        }
        sel.sort_unstable();
        sel.dedup();
        self.selectable = sel;
        Ok(self)
    }

    pub fn with_gain_ratio(mut self, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return input_err(format!("gain ratio must be positive, got {ratio}"));
        }
        self.gain_ratio = ratio;
        Ok(self)
    }

    pub fn with_coupling_strength(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return input_err(format!("coupling strength must be positive, got {c}"));
        }
        self.c = c;
        Ok(self)
    }

    pub fn with_n_total(mut self, n_total: usize) -> Result<Self> {
        if n_total > self.n() {
            return input_err(format!("n_total = {n_total} exceeds the node count {}", self.n()));
        }
        self.n_total = Some(n_total);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.coupling.n()
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn costs(&self) -> &[f64] {
        &self.v
    }

    /// 1-based ids.
    pub fn selectable(&self) -> Vec<usize> {
        self.selectable.iter().map(|i| i + 1).collect()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn gain_ratio(&self) -> f64 {
        self.gain_ratio
    }

    pub fn n_total(&self) -> Option<usize> {
        self.n_total
    }

    fn subproblem(&self, scale: f64, free: Vec<usize>, upper: f64, fixed: Vec<f64>) -> Subproblem<'_> {
        Subproblem { a: self.coupling.matrix(), threshold: self.threshold, scale, cost: &self.v, free, upper, fixed }
    }

    fn cost(&self, beta: &[f64]) -> f64 {
        self.v.iter().zip(beta).map(|(v, b)| v * b).sum()
    }

    fn mu_n(&self, beta: &[f64], scale: f64, tol: &Tolerances) -> Result<f64> {
        let scaled: Vec<f64> = beta.iter().map(|b| b * scale).collect();
        Ok(symmetric_eigen(&self.coupling.minus_diag(&scaled)?, tol)?.max())
    }

    /// `λ_max(A) = 0 ≤ θ` makes the empty scheme optimal.
    fn zero_is_feasible(&self, tol: &Tolerances) -> Result<bool> {
        Ok(self.mu_n(&vec![0.0; self.n()], 1.0, tol)? <= self.threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignStatus {
    Optimal,
    Infeasible,
    /// A cut or node limit stopped the search; the returned scheme is feasible
    /// but possibly suboptimal.
    ToleranceReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution {
    pub status: DesignStatus,
    pub beta: Vec<f64>,
    /// `dᵢ = 1 ⇔ βᵢ > 0`.
    pub d: Vec<bool>,
    /// Per-node control gains `cᵢ`.
    pub gains: Vec<f64>,
    pub total_cost: f64,
    /// `λ_max(A − s·diag β)` at the returned scheme.
    pub mu_n: f64,
    pub threshold: f64,
    /// `threshold − mu_n`; near zero when the constraint is active.
    pub margin: f64,
    /// Best proven lower bound on the optimal cost, when one was computed.
    pub lower_bound: Option<f64>,
    pub cuts: usize,
    pub bb_nodes: usize,
    pub diagnostic: Option<String>,
}

impl DesignSolution {
    fn feasible(
        p: &DesignProblem,
        status: DesignStatus,
        beta: Vec<f64>,
        scale: f64,
        stats: SearchStats,
        tol: &Tolerances,
    ) -> Result<Self> {
        let mu_n = p.mu_n(&beta, scale, tol)?;
        if status != DesignStatus::Infeasible && mu_n > p.threshold + tol.design_feasibility {
            return Err(PinError::Numerical(format!(
                "designed scheme misses the threshold: λ_max = {mu_n}, threshold = {}",
                p.threshold
            )));
        }
        Ok(Self {
            status,
            d: beta.iter().map(|b| *b > 0.0).collect(),
            gains: beta.iter().map(|b| b * scale * p.c).collect(),
            total_cost: p.cost(&beta),
            mu_n,
            threshold: p.threshold,
            margin: p.threshold - mu_n,
            lower_bound: stats.lower_bound,
            cuts: stats.cuts,
            bb_nodes: stats.nodes,
            diagnostic: None,
            beta,
        })
    }

    fn infeasible(p: &DesignProblem, stats: SearchStats, diagnostic: String, tol: &Tolerances) -> Result<Self> {
        let mut s = Self::feasible(p, DesignStatus::Infeasible, vec![0.0; p.n()], 1.0, stats, tol)?;
        s.diagnostic = Some(diagnostic);
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct SearchStats {
    cuts: usize,
    nodes: usize,
    lower_bound: Option<f64>,
}

/// Best scheme found so far with the deterministic tie rule: lower cost wins,
/// equal cost (relative 1e-9) goes to the lexicographically smallest selection.
#[derive(Debug, Clone, Default)]
struct Incumbent {
    best: Option<(f64, Vec<f64>)>,
}

impl Incumbent {
    fn cost(&self) -> Option<f64> {
        self.best.as_ref().map(|(c, _)| *c)
    }

    fn offer(&mut self, cost: f64, beta: Vec<f64>) {
        let take = match &self.best {
            None => true,
            Some((c, b)) => {
                let eps = 1e-9 * c.abs().max(1.0);
                if cost < c - eps {
                    true
                } else if cost <= c + eps {
                    selection(&beta) < selection(b)
                } else {
                    false
                }
            }
        };
        if take {
            self.best = Some((cost, beta));
        }
    }

    /// A subtree with this lower bound cannot beat (or tie) the incumbent.
    fn prunes(&self, bound: f64) -> bool {
        self.cost().is_some_and(|c| bound > c + 1e-9 * c.abs().max(1.0))
    }
}

fn selection(beta: &[f64]) -> Vec<bool> {
    beta.iter().map(|b| *b > 0.0).collect()
}

/// Sets gains below the zero-gain tolerance to exactly zero.
fn snap_zeros(beta: &mut [f64], tol: &Tolerances) {
    for b in beta.iter_mut() {
        if *b <= tol.zero_gain {
            *b = 0.0;
        }
    }
}

/// Free-gain design over the selectable set by Kelley cutting planes.
pub fn solve_free(p: &DesignProblem, tol: &Tolerances) -> Result<DesignSolution> {
    let mut stats = SearchStats { nodes: 1, ..SearchStats::default() };
    if p.zero_is_feasible(tol)? {
        stats.lower_bound = Some(0.0);
        return DesignSolution::feasible(p, DesignStatus::Optimal, vec![0.0; p.n()], 1.0, stats, tol);
    }
    let sub = p.subproblem(1.0, p.selectable.clone(), f64::INFINITY, vec![0.0; p.n()]);
    let best = sub.best_point(tol.gain_cap);
    if sub.mu_n(&best, tol)? > p.threshold {
        let msg = format!(
            "unreachable threshold: even gains of {:e} on every selectable node leave λ_max above {}",
            tol.gain_cap, p.threshold
        );
        return DesignSolution::infeasible(p, stats, msg, tol);
    }
    let r = sub.solve(tol)?;
    stats.cuts = r.cuts.len();
    match r.outcome {
        CpOutcome::Converged => {
            stats.lower_bound = Some(r.lower_bound);
            let mut beta = r.beta;
            snap_zeros(&mut beta, tol);
            DesignSolution::feasible(p, DesignStatus::Optimal, beta, 1.0, stats, tol)
        }
        CpOutcome::Infeasible => {
            DesignSolution::infeasible(p, stats, "cutting-plane master became infeasible".into(), tol)
        }
        CpOutcome::CapReached => {
            stats.lower_bound = Some(r.lower_bound);
            let mut beta = sub.repair(&r.beta, &best, tol)?;
            snap_zeros(&mut beta, tol);
            let mut s = DesignSolution::feasible(p, DesignStatus::ToleranceReached, beta, 1.0, stats, tol)?;
            s.diagnostic = Some(format!("stopped after {} cuts; scheme repaired toward the all-pinned point", stats.cuts));
            Ok(s)
        }
    }
}

/// Cuts produced while solving the free problem; every one must hold at
/// every feasible scheme. Exposed for soundness checks.
pub fn free_design_cuts(p: &DesignProblem, tol: &Tolerances) -> Result<Vec<Cut>> {
    let sub = p.subproblem(1.0, p.selectable.clone(), f64::INFINITY, vec![0.0; p.n()]);
    Ok(sub.solve(tol)?.cuts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::network::{coupling_matrix, Topology};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn path3(threshold: f64) -> DesignProblem {
        let t = Topology::new(3, [(1, 2), (2, 3)]).unwrap();
        DesignProblem::new(coupling_matrix(&t), vec![1.0; 3], threshold).unwrap()
    }

    #[test]
    fn nonnegative_threshold_gives_zero() {
        let s = solve_free(&path3(0.0), &tol()).unwrap();
        assert_eq!(s.status, DesignStatus::Optimal);
        assert_eq!(s.total_cost, 0.0);
        assert!(s.d.iter().all(|d| !d));
    }

    #[test]
    fn single_node_closed_form() {
        // Two-node chain pinned at node 1 only: λ_max(A − diag(b,0)) = (−(2+b) + √(4+b²))/2.
        let t = Topology::new(2, [(1, 2)]).unwrap();
        let theta = -0.3;
        let p = DesignProblem::new(coupling_matrix(&t), vec![1.0, 1.0], theta).unwrap().with_selectable(&[1]).unwrap();
        let s = solve_free(&p, &tol()).unwrap();
        let m = 2.0 * theta + 2.0;
        let b = (4.0 - m * m) / (2.0 * m);
        let lam = |b: f64| (-(2.0 + b) + (4.0 + b * b).sqrt()) / 2.0;
        assert!((lam(b) - theta).abs() < 1e-12);
        assert!((s.beta[0] - b).abs() < 1e-5, "{} vs {b}", s.beta[0]);
        assert_eq!(s.beta[1], 0.0);
    }

    #[test]
    fn unreachable_threshold_is_infeasible() {
        // Node 3 hangs off node 2; pinning node 1 alone cannot push λ_max below −1.
        let p = path3(-1.0).with_selectable(&[1]).unwrap();
        let s = solve_free(&p, &tol()).unwrap();
        assert_eq!(s.status, DesignStatus::Infeasible);
        assert!(s.diagnostic.is_some());
    }

    #[test]
    fn chen_scale_free_design_is_feasible() {
        let a = coupling_matrix(&fixtures::paper_fig2());
        let dynamics = fixtures::chen_dynamics();
        let p = DesignProblem::from_dynamics(a, fixtures::benchmark_costs(), &dynamics, &tol()).unwrap();
        let s = solve_free(&p, &tol()).unwrap();
        assert_eq!(s.status, DesignStatus::Optimal);
        assert!(s.mu_n <= s.threshold + 1e-6);
        assert!(s.lower_bound.unwrap() <= s.total_cost + 1e-9);
        for (g, b) in s.gains.iter().zip(&s.beta) {
            assert!((g - 10.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn problem_validation() {
        let a = coupling_matrix(&Topology::new(2, [(1, 2)]).unwrap());
        assert!(DesignProblem::new(a.clone(), vec![1.0], -0.1).is_err());
        assert!(DesignProblem::new(a.clone(), vec![1.0, 0.0], -0.1).is_err());
        let p = DesignProblem::new(a.clone(), vec![1.0, 1.0], -0.1).unwrap();
        assert!(p.clone().with_selectable(&[3]).is_err());
        assert!(p.clone().with_gain_ratio(0.0).is_err());
        assert!(p.with_n_total(3).is_err());
        let disconnected = coupling_matrix(&Topology::new(2, []).unwrap());
        assert!(matches!(
            DesignProblem::new(disconnected, vec![1.0, 1.0], -0.1),
            Err(PinError::Disconnected { .. })
        ));
    }
}
