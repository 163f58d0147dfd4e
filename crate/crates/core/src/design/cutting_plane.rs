//! Kelley cutting planes for `min cᵀβ  s.t.  λ_max(A − s·diag β) ≤ θ`.
//!
//! For any unit vector `u` and any `β`, `uᵀ(A − s·diag β)u ≤ λ_max(A − s·diag β)`,
//! so every feasible `β` satisfies the linear cut
//! `Σᵢ s·uᵢ²·βᵢ ≥ uᵀAu − θ`. Each iterate contributes cuts built from its
//! top eigenvectors; the master LP over all cuts is an outer approximation,
//! so its optimum is a valid lower bound at every iteration.

use crate::error::{PinError, Result};
use crate::numerics::{solve_lp, symmetric_eigen, LinearProgram, LpStatus, Relation, SymMatrix};
use crate::tolerances::Tolerances;

/// At most this many eigenvectors feed cuts per iteration.
const CUTS_PER_ITERATION: usize = 2;

/// `Σᵢ weights[i]·βᵢ ≥ rhs` over the full node vector.
#[derive(Debug, Clone)]
pub struct Cut {
    pub weights: Vec<f64>,
    pub rhs: f64,
    /// The eigenvector the cut was built from.
    pub u: Vec<f64>,
}

impl Cut {
    pub fn slack(&self, beta: &[f64]) -> f64 {
        self.weights.iter().zip(beta).map(|(w, b)| w * b).sum::<f64>() - self.rhs
    }
}

/// One convex subproblem: some coordinates free in `[0, upper]`, the rest fixed.
#[derive(Debug, Clone)]
pub(crate) struct Subproblem<'a> {
    pub a: &'a SymMatrix,
    pub threshold: f64,
    /// Multiplies `β` inside the matrix (the identical-gain ratio, or 1).
    pub scale: f64,
    pub cost: &'a [f64],
    pub free: Vec<usize>,
    /// Upper bound on free coordinates; `+∞` for unbounded gains.
    pub upper: f64,
    /// Full-length vector; entries at free positions are ignored.
    pub fixed: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CpOutcome {
    Converged,
    Infeasible,
    CapReached,
}

#[derive(Debug, Clone)]
pub(crate) struct CpResult {
    pub outcome: CpOutcome,
    /// Last master solution (full length, fixed entries included).
    pub beta: Vec<f64>,
    /// Master optimum including fixed costs; never above the true optimum.
    pub lower_bound: f64,
    pub cuts: Vec<Cut>,
}

impl Subproblem<'_> {
    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn mu_n(&self, beta: &[f64], tol: &Tolerances) -> Result<f64> {
        let scaled: Vec<f64> = beta.iter().map(|b| b * self.scale).collect();
        Ok(symmetric_eigen(&self.a.minus_diag(&scaled)?, tol)?.max())
    }

    /// The most favourable point: every free coordinate at its upper bound
    /// (or at `gain_cap` when unbounded). `λ_max` is non-increasing in each
    /// `βᵢ`, so the subproblem is feasible only if this point is (up to the cap).
    pub fn best_point(&self, gain_cap: f64) -> Vec<f64> {
        let top = if self.upper.is_finite() { self.upper } else { gain_cap };
        let mut beta = self.fixed.clone();
        for &i in &self.free {
            beta[i] = top;
        }
        beta
    }

    fn start_point(&self) -> Vec<f64> {
        let mut beta = self.fixed.clone();
        for &i in &self.free {
            beta[i] = 0.0;
        }
        beta
    }

    fn cost_of(&self, beta: &[f64]) -> f64 {
        self.cost.iter().zip(beta).map(|(c, b)| c * b).sum()
    }

    /// Solves the master LP through its dual, which has one row per free
    /// coordinate and one column per cut, so the tableau stays tiny however
    /// many cuts accumulate. Returns `None` when the master is infeasible.
    fn solve_master(&self, cuts: &[Cut], tol: &Tolerances) -> Result<Option<Vec<f64>>> {
        let nf = self.free.len();
        let bounded = self.upper.is_finite();
        let ncols = cuts.len() + if bounded { nf } else { 0 };
        let mut objective = Vec::with_capacity(ncols);
        for cut in cuts {
            let fixed_part: f64 = (0..self.n())
                .filter(|i| !self.free.contains(i))
                .map(|i| cut.weights[i] * self.fixed[i])
                .sum();
            objective.push(-(cut.rhs - fixed_part));
        }
        if bounded {
            objective.extend(std::iter::repeat(self.upper).take(nf));
        }
        let mut lp = LinearProgram::new(objective);
        for (r, &i) in self.free.iter().enumerate() {
            let mut row: Vec<f64> = cuts.iter().map(|c| c.weights[i]).collect();
            if bounded {
                row.extend((0..nf).map(|k| if k == r { -1.0 } else { 0.0 }));
            }
            lp.constrain(row, Relation::Le, self.cost[i]);
        }
        let sol = solve_lp(&lp, tol)?;
        match sol.status {
            LpStatus::Optimal => {
                let mut beta = self.fixed.clone();
                for (r, &i) in self.free.iter().enumerate() {
                    beta[i] = (-sol.duals[r]).clamp(0.0, self.upper);
                }
                Ok(Some(beta))
            }
            LpStatus::Unbounded => Ok(None),
            LpStatus::Infeasible => Err(PinError::Numerical(
                "cutting-plane dual master reported infeasible although zero is feasible".into(),
            )),
        }
    }

    pub fn solve(&self, tol: &Tolerances) -> Result<CpResult> {
        let mut cuts: Vec<Cut> = Vec::new();
        let mut beta = self.start_point();
        loop {
            let scaled: Vec<f64> = beta.iter().map(|b| b * self.scale).collect();
            let spec = symmetric_eigen(&self.a.minus_diag(&scaled)?, tol)?;
            let mu_n = spec.max();
            let lower_bound = self.cost_of(&beta);
            if mu_n - self.threshold <= tol.cut_violation {
                return Ok(CpResult { outcome: CpOutcome::Converged, beta, lower_bound, cuts });
            }
            if self.free.is_empty() {
                return Ok(CpResult { outcome: CpOutcome::Infeasible, beta, lower_bound, cuts });
            }
            if cuts.len() >= tol.max_cuts {
                return Ok(CpResult { outcome: CpOutcome::CapReached, beta, lower_bound, cuts });
            }
            let n = self.n();
            for k in (0..n).rev().take(CUTS_PER_ITERATION) {
                if spec.eigenvalues[k] - self.threshold <= tol.cut_violation {
                    break;
                }
                let u = spec.eigenvector(k);
                let weights = u.iter().map(|x| self.scale * x * x).collect();
                let rhs = self.a.as_matrix().quad_form(&u) - self.threshold;
                cuts.push(Cut { weights, rhs, u });
            }
            match self.solve_master(&cuts, tol)? {
                Some(next) => beta = next,
                None => {
                    return Ok(CpResult {
                        outcome: CpOutcome::Infeasible,
                        beta,
                        lower_bound: f64::INFINITY,
                        cuts,
                    })
                }
            }
        }
    }

    /// Moves an infeasible `beta` toward the feasible `anchor` by bisection
    /// until the constraint holds. The feasible set is convex, so the segment
    /// crosses the boundary once.
    pub fn repair(&self, beta: &[f64], anchor: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
        let mix = |t: f64| -> Vec<f64> { beta.iter().zip(anchor).map(|(b, a)| (1.0 - t) * b + t * a).collect() };
        if self.mu_n(anchor, tol)? > self.threshold + tol.cut_violation {
            return Err(PinError::Numerical("no feasible anchor to repair the cutting-plane iterate".into()));
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.mu_n(&mix(mid), tol)? <= self.threshold {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(mix(hi))
    }
}
