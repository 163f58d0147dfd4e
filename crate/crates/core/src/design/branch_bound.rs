//! Identical-gain design: binary `β` with one shared gain `c̄`, solved by
//! depth-first branch-and-bound over `[0, 1]` relaxations.

use crate::error::Result;
use crate::tolerances::Tolerances;

use super::cutting_plane::CpOutcome;
use super::{DesignProblem, DesignSolution, DesignStatus, Incumbent, SearchStats};

struct Search<'a> {
    p: &'a DesignProblem,
    tol: &'a Tolerances,
    incumbent: Incumbent,
    stats: SearchStats,
    truncated: bool,
}

impl Search<'_> {
    /// `fixed[i]`: `Some(0|1)` for fixed coordinates, `None` for free selectable ones.
    fn explore(&mut self, fixed: &mut Vec<Option<bool>>) -> Result<()> {
        if self.stats.nodes >= self.tol.max_bb_nodes {
            self.truncated = true;
            return Ok(());
        }
        self.stats.nodes += 1;
        let p = self.p;
        let scale = p.gain_ratio;
        let free: Vec<usize> = p.selectable.iter().copied().filter(|&i| fixed[i].is_none()).collect();
        let base: Vec<f64> = fixed.iter().map(|f| if *f == Some(true) { 1.0 } else { 0.0 }).collect();

        if free.is_empty() {
            if p.mu_n(&base, scale, self.tol)? <= p.threshold + self.tol.cut_violation {
                self.incumbent.offer(p.cost(&base), base);
            }
            return Ok(());
        }
        let sub = p.subproblem(scale, free.clone(), 1.0, base);
        if sub.mu_n(&sub.best_point(1.0), self.tol)? > p.threshold + self.tol.cut_violation {
            return Ok(());
        }
        let relax = sub.solve(self.tol)?;
        self.stats.cuts += relax.cuts.len();
        match relax.outcome {
            CpOutcome::Infeasible => return Ok(()),
            CpOutcome::CapReached => self.truncated = true,
            CpOutcome::Converged => {}
        }
        if self.stats.nodes == 1 {
            self.stats.lower_bound = Some(relax.lower_bound);
        }
        if self.incumbent.prunes(relax.lower_bound) {
            return Ok(());
        }

        let binary = free.iter().all(|&i| {
            let b = relax.beta[i];
            b.abs() <= self.tol.binary || (b - 1.0).abs() <= self.tol.binary
        });
        if binary && relax.outcome == CpOutcome::Converged {
            let rounded: Vec<f64> = relax.beta.iter().map(|b| b.round()).collect();
            if p.mu_n(&rounded, scale, self.tol)? <= p.threshold + self.tol.cut_violation {
                self.incumbent.offer(p.cost(&rounded), rounded);
                return Ok(());
            }
        }

        // Most fractional free coordinate, smallest index on ties.
        let k = free
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let da = (relax.beta[a] - 0.5).abs();
                let db = (relax.beta[b] - 0.5).abs();
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .expect("free is non-empty");
        for value in [true, false] {
            fixed[k] = Some(value);
            self.explore(fixed)?;
        }
        fixed[k] = None;
        Ok(())
    }
}

/// Minimizes `vᵀβ` over binary `β` supported on the selectable set with
/// `λ_max(A − (c̄/c)·diag β) ≤ θ`.
pub fn solve_identical_bip(p: &DesignProblem, tol: &Tolerances) -> Result<DesignSolution> {
    let scale = p.gain_ratio;
    let mut stats = SearchStats { nodes: 1, ..SearchStats::default() };
    if p.zero_is_feasible(tol)? {
        stats.lower_bound = Some(0.0);
        return DesignSolution::feasible(p, DesignStatus::Optimal, vec![0.0; p.n()], scale, stats, tol);
    }
    let mut all = vec![0.0; p.n()];
    for &i in &p.selectable {
        all[i] = 1.0;
    }
    if p.mu_n(&all, scale, tol)? > p.threshold + tol.cut_violation {
        let msg = format!(
            "unreachable threshold: pinning every selectable node with gain ratio {} leaves λ_max above {}",
            scale, p.threshold
        );
        return DesignSolution::infeasible(p, stats, msg, tol);
    }

    let mut search = Search { p, tol, incumbent: Incumbent::default(), stats: SearchStats::default(), truncated: false };
    // The all-pinned scheme is a valid starting incumbent.
    search.incumbent.offer(p.cost(&all), all);
    let mut fixed: Vec<Option<bool>> = vec![Some(false); p.n()];
    for &i in &p.selectable {
        fixed[i] = None;
    }
    search.explore(&mut fixed)?;

    let (_, beta) = search.incumbent.best.expect("seeded with a feasible scheme");
    let status = if search.truncated { DesignStatus::ToleranceReached } else { DesignStatus::Optimal };
    let mut s = DesignSolution::feasible(p, status, beta, scale, search.stats, tol)?;
    if search.truncated {
        s.diagnostic = Some(format!("search truncated after {} nodes; best incumbent returned", search.stats.nodes));
    }
    Ok(s)
}
