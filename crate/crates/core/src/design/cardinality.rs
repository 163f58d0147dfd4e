//! Cardinality-constrained design: continuous gains on at most `n_total` nodes.
//!
//! Branch-and-bound over sparsity patterns. A node carries an allowed set
//! (nodes that may be nonzero and count toward the cap) and a forbidden set
//! (forced to zero). Its bound is the free-gain relaxation over the
//! selectable, non-forbidden nodes, which ignores the cap.

use crate::error::{PinError, Result};
use crate::tolerances::Tolerances;

use super::cutting_plane::{CpOutcome, CpResult};
use super::{snap_zeros, DesignProblem, DesignSolution, DesignStatus, Incumbent, SearchStats};

struct Search<'a> {
    p: &'a DesignProblem,
    tol: &'a Tolerances,
    n_total: usize,
    incumbent: Incumbent,
    stats: SearchStats,
    truncated: bool,
}

impl Search<'_> {
    /// Free-gain solve over `free`; `None` when the support cannot reach the threshold.
    fn relax(&mut self, free: Vec<usize>) -> Result<Option<CpResult>> {
        let p = self.p;
        let sub = p.subproblem(1.0, free, f64::INFINITY, vec![0.0; p.n()]);
        if sub.mu_n(&sub.best_point(self.tol.gain_cap), self.tol)? > p.threshold {
            return Ok(None);
        }
        let mut r = sub.solve(self.tol)?;
        self.stats.cuts += r.cuts.len();
        match r.outcome {
            CpOutcome::Infeasible => Ok(None),
            CpOutcome::Converged => {
                snap_zeros(&mut r.beta, self.tol);
                Ok(Some(r))
            }
            CpOutcome::CapReached => {
                self.truncated = true;
                r.beta = sub.repair(&r.beta, &sub.best_point(self.tol.gain_cap), self.tol)?;
                snap_zeros(&mut r.beta, self.tol);
                Ok(Some(r))
            }
        }
    }

    fn explore(&mut self, allowed: &mut Vec<bool>, forbidden: &mut Vec<bool>, inherited: Option<CpResult>) -> Result<()> {
        if self.stats.nodes >= self.tol.max_bb_nodes {
            self.truncated = true;
            return Ok(());
        }
        self.stats.nodes += 1;
        let p = self.p;
        let n_allowed = allowed.iter().filter(|a| **a).count();
        if n_allowed == self.n_total {
            let support: Vec<usize> = (0..p.n()).filter(|&i| allowed[i]).collect();
            if let Some(r) = self.relax(support)? {
                self.incumbent.offer(p.cost(&r.beta), r.beta);
            }
            return Ok(());
        }

        let relax = match inherited {
            Some(r) => r,
            None => {
                let free: Vec<usize> = p.selectable.iter().copied().filter(|&i| !forbidden[i]).collect();
                match self.relax(free)? {
                    Some(r) => r,
                    None => return Ok(()),
                }
            }
        };
        if self.stats.nodes == 1 {
            self.stats.lower_bound = Some(relax.lower_bound);
        }
        if self.incumbent.prunes(relax.lower_bound) {
            return Ok(());
        }
        let support: Vec<usize> = (0..p.n()).filter(|&i| relax.beta[i] > 0.0).collect();
        if support.len() <= self.n_total {
            self.incumbent.offer(p.cost(&relax.beta), relax.beta);
            return Ok(());
        }

        // Most expensive support node not yet allowed; smallest index on ties.
        let k = support
            .iter()
            .copied()
            .filter(|&i| !allowed[i])
            .max_by(|&a, &b| {
                let ca = p.v[a] * relax.beta[a];
                let cb = p.v[b] * relax.beta[b];
                ca.total_cmp(&cb).then(b.cmp(&a))
            })
            .expect("support exceeds the cap, so some support node is not yet allowed");
        allowed[k] = true;
        self.explore(allowed, forbidden, Some(relax))?;
        allowed[k] = false;
        forbidden[k] = true;
        self.explore(allowed, forbidden, None)?;
        forbidden[k] = false;
        Ok(())
    }
}

/// Minimizes `vᵀβ` over `β ≥ 0` supported on the selectable set with at most
/// `n_total` nonzeros and `λ_max(A − diag β) ≤ θ`.
pub fn solve_cardinality(p: &DesignProblem, tol: &Tolerances) -> Result<DesignSolution> {
    let n_total = p
        .n_total
        .ok_or_else(|| PinError::Input("cardinality design needs n_total".into()))?;
    let mut stats = SearchStats { nodes: 1, ..SearchStats::default() };
    if p.zero_is_feasible(tol)? {
        stats.lower_bound = Some(0.0);
        return DesignSolution::feasible(p, DesignStatus::Optimal, vec![0.0; p.n()], 1.0, stats, tol);
    }
    if n_total == 0 {
        let msg = format!("no pinned node allowed, and the unpinned network misses the threshold {}", p.threshold);
        return DesignSolution::infeasible(p, stats, msg, tol);
    }

    let mut search =
        Search { p, tol, n_total, incumbent: Incumbent::default(), stats: SearchStats::default(), truncated: false };
    let mut allowed = vec![false; p.n()];
    let mut forbidden = vec![false; p.n()];
    search.explore(&mut allowed, &mut forbidden, None)?;

    let stats = search.stats;
    match search.incumbent.best {
        Some((_, beta)) => {
            let status = if search.truncated { DesignStatus::ToleranceReached } else { DesignStatus::Optimal };
            let mut s = DesignSolution::feasible(p, status, beta, 1.0, stats, tol)?;
            if search.truncated {
                s.diagnostic = Some(format!("search truncated after {} nodes; best incumbent returned", stats.nodes));
            }
            Ok(s)
        }
        None if search.truncated => Err(PinError::Numerical(format!(
            "cardinality search truncated after {} nodes without a feasible scheme",
            stats.nodes
        ))),
        None => {
            let msg = format!("no support of at most {n_total} selectable nodes reaches the threshold {}", p.threshold);
            DesignSolution::infeasible(p, stats, msg, tol)
        }
    }
}
