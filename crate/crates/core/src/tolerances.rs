use serde::{Deserialize, Serialize};

use crate::error::{PinError, Result};

/// Every numerical tolerance and iteration cap used by the solvers.
///
/// Solvers take a `&Tolerances` so callers can override any of them; the
/// CLI additionally reads overrides from the `PINLOCK_TOL` environment
/// variable (see [`Tolerances::apply_overrides`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Jacobi stops when the off-diagonal Frobenius norm drops below this times `‖M‖_F`.
    pub jacobi_offdiag: f64,
    pub jacobi_max_sweeps: usize,
    /// Shifted-QR iteration cap is this factor times the matrix dimension.
    pub qr_iter_factor: usize,
    /// Pivot / reduced-cost tolerance inside the simplex tableau.
    pub lp_pivot: f64,
    /// Phase-1 objective above this means the LP is infeasible.
    pub lp_feasibility: f64,
    pub lp_max_pivots: usize,
    /// `|margin|` at or below this is reported as a boundary case, not synchronized.
    pub sync_boundary: f64,
    /// Cutting-plane stop: `λ_max − threshold ≤ cut_violation`.
    pub cut_violation: f64,
    pub max_cuts: usize,
    /// A relaxed entry within this of 0 or 1 counts as binary.
    pub binary: f64,
    /// Accepted constraint slack on returned designs.
    pub design_feasibility: f64,
    /// Gain entries below this are snapped to exactly zero (node not pinned).
    pub zero_gain: f64,
    pub max_bb_nodes: usize,
    /// Gain cap used by the infeasibility pre-check of the unbounded design problems.
    pub gain_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            jacobi_offdiag: 1e-12,
            jacobi_max_sweeps: 100,
            qr_iter_factor: 100,
            lp_pivot: 1e-11,
            lp_feasibility: 1e-9,
            lp_max_pivots: 100_000,
            sync_boundary: 1e-9,
            cut_violation: 1e-7,
            max_cuts: 500,
            binary: 1e-6,
            design_feasibility: 1e-6,
            zero_gain: 1e-9,
            max_bb_nodes: 100_000,
            gain_cap: 1e6,
        }
    }
}

impl Tolerances {
    /// Applies a comma separated `key=value` list, e.g.
    /// `cut_violation=1e-8,max_cuts=800`.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| PinError::Input(format!("tolerance override `{item}` is not key=value")))?;
            let key = key.trim();
            let value = value.trim();
            let float = || {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v > 0.0)
                    .ok_or_else(|| PinError::Input(format!("tolerance `{key}` needs a positive number, got `{value}`")))
            };
            let count = || {
                value
                    .parse::<usize>()
                    .ok()
                    .filter(|v| *v > 0)
                    .ok_or_else(|| PinError::Input(format!("`{key}` needs a positive integer, got `{value}`")))
            };
            match key {
                "jacobi_offdiag" => self.jacobi_offdiag = float()?,
                "jacobi_max_sweeps" => self.jacobi_max_sweeps = count()?,
                "qr_iter_factor" => self.qr_iter_factor = count()?,
                "lp_pivot" => self.lp_pivot = float()?,
                "lp_feasibility" => self.lp_feasibility = float()?,
                "lp_max_pivots" => self.lp_max_pivots = count()?,
                "sync_boundary" => self.sync_boundary = float()?,
                "cut_violation" => self.cut_violation = float()?,
                "max_cuts" => self.max_cuts = count()?,
                "binary" => self.binary = float()?,
                "design_feasibility" => self.design_feasibility = float()?,
                "zero_gain" => self.zero_gain = float()?,
                "max_bb_nodes" => self.max_bb_nodes = count()?,
                "gain_cap" => self.gain_cap = float()?,
                other => return Err(PinError::Input(format!("unknown tolerance `{other}`"))),
            }
        }
        Ok(())
    }

    /// Defaults plus whatever `PINLOCK_TOL` specifies.
    pub fn from_env() -> Result<Self> {
        let mut tol = Self::default();
        if let Ok(spec) = std::env::var("PINLOCK_TOL") {
            tol.apply_overrides(&spec)?;
        }
        Ok(tol)
    }
}
