//! Synchronization criteria for pinning-controlled networks.
//!
//! Linearizing the network at the target state decouples the error dynamics
//! into `N` modes `ξ̇ᵢ = (J_f + c·μᵢ·J_g) ξᵢ`, where `μᵢ` are the eigenvalues of
//! `B = A − diag(β)`. [`check_sync_general`] tests every mode directly.
//! With linear inner coupling `g(x) = a_g·x + b_g` this collapses to the scalar
//! test `μ_N < −λ_n(J_f)/(c·a_g)` implemented by [`check_sync_linear`].

use serde::{Deserialize, Serialize};

use crate::error::{input_err, PinError, Result};
use crate::network::CouplingMatrix;
use crate::numerics::{max_real_part, symmetric_eigen, Matrix, SymMatrix};
use crate::tolerances::Tolerances;

/// Which scalar of `J_f` plays `λ_n` in the threshold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaConvention {
    /// Largest real part of the eigenvalues of `J_f`.
    #[default]
    MaxReal,
    /// Largest eigenvalue of `(J_f + J_fᵀ)/2`.
    SymmetricPart,
}

#[derive(Deserialize)]
struct RawDynamics {
    jf: Matrix,
    a_g: f64,
    #[serde(default)]
    b_g: f64,
    c: f64,
    #[serde(default)]
    jg: Option<Matrix>,
    #[serde(default)]
    lambda_convention: LambdaConvention,
}

/// Linearized node dynamics at the target state plus coupling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDynamics")]
pub struct NodeDynamics {
    /// Jacobian of the node vector field at the target state.
    pub jf: Matrix,
    pub a_g: f64,
    pub b_g: f64,
    /// Coupling strength.
    pub c: f64,
    /// Jacobian of the inner coupling; `a_g·I` when absent.
    pub jg: Option<Matrix>,
    pub lambda_convention: LambdaConvention,
}

impl TryFrom<RawDynamics> for NodeDynamics {
    type Error = PinError;
    fn try_from(r: RawDynamics) -> Result<Self> {
        NodeDynamics::new(r.jf, r.a_g, r.b_g, r.c, r.jg, r.lambda_convention)
    }
}

impl NodeDynamics {
    pub fn new(
        jf: Matrix,
        a_g: f64,
        b_g: f64,
        c: f64,
        jg: Option<Matrix>,
        lambda_convention: LambdaConvention,
    ) -> Result<Self> {
        if !jf.is_square() || jf.rows() == 0 || !jf.is_finite() {
            return input_err("jf must be a non-empty finite square matrix");
        }
        if !(c > 0.0 && c.is_finite()) {
            return input_err(format!("coupling strength c must be positive, got {c}"));
        }
        if !(a_g > 0.0 && a_g.is_finite()) {
            return input_err(format!("a_g must be positive, got {a_g}"));
        }
        if !b_g.is_finite() {
            return input_err("b_g must be finite");
        }
        if let Some(g) = &jg {
            if g.rows() != jf.rows() || g.cols() != jf.cols() || !g.is_finite() {
                return input_err("jg must be finite with the same shape as jf");
            }
        }
        Ok(Self { jf, a_g, b_g, c, jg, lambda_convention })
    }

    /// Linear coupling with `b_g = 0` and the default convention.
    pub fn linear(jf: Matrix, a_g: f64, c: f64) -> Result<Self> {
        Self::new(jf, a_g, 0.0, c, None, LambdaConvention::default())
    }

    pub fn with_convention(mut self, convention: LambdaConvention) -> Self {
        self.lambda_convention = convention;
        self
    }

    pub fn state_dim(&self) -> usize {
        self.jf.rows()
    }

    /// `J_g`, defaulting to `a_g·I`.
    pub fn coupling_jacobian(&self) -> Matrix {
        self.jg.clone().unwrap_or_else(|| Matrix::identity(self.state_dim()).scaled(self.a_g))
    }

    /// `λ_n(J_f)` under the configured convention.
    pub fn lambda_n(&self, tol: &Tolerances) -> Result<f64> {
        match self.lambda_convention {
            LambdaConvention::MaxReal => max_real_part(&self.jf, tol),
            LambdaConvention::SymmetricPart => {
                let sym = SymMatrix::new(self.jf.add(&self.jf.transpose())?.scaled(0.5))?;
                Ok(symmetric_eigen(&sym, tol)?.max())
            }
        }
    }
}

/// Per-node normalized gains `βᵢ = cᵢ·dᵢ/c`; zero means the node is not pinned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PinningScheme(Vec<f64>);

impl TryFrom<Vec<f64>> for PinningScheme {
    type Error = PinError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PinningScheme::new(v)
    }
}

impl From<PinningScheme> for Vec<f64> {
    fn from(p: PinningScheme) -> Vec<f64> {
        p.0
    }
}

impl PinningScheme {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if let Some(b) = beta.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return input_err(format!("pinning gains must be finite and non-negative, got {b}"));
        }
        Ok(Self(beta))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn beta(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `dᵢ`: whether node `i` carries a controller.
    pub fn pinned(&self) -> Vec<bool> {
        self.0.iter().map(|b| *b > 0.0).collect()
    }
}

/// `B = A − diag(β)`.
pub fn control_matrix_b(a: &CouplingMatrix, scheme: &PinningScheme) -> Result<SymMatrix> {
    if scheme.len() != a.n() {
        return input_err(format!("scheme has {} entries for a {}-node network", scheme.len(), a.n()));
    }
    a.minus_diag(scheme.beta())
}

/// `−λ_n(J_f)/(c·a_g)`.
pub fn sync_threshold(dynamics: &NodeDynamics, tol: &Tolerances) -> Result<f64> {
    Ok(-dynamics.lambda_n(tol)? / (dynamics.c * dynamics.a_g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearVerdict {
    pub synced: bool,
    /// `λ_max(A − diag β)`.
    pub mu_n: f64,
    pub threshold: f64,
    /// `threshold − μ_N`; positive when synchronized.
    pub margin: f64,
    /// `|margin|` within the boundary tolerance. Boundary cases are never synced.
    pub boundary: bool,
}

/// Scalar threshold test for linear inner coupling.
pub fn check_sync_linear(
    a: &CouplingMatrix,
    scheme: &PinningScheme,
    dynamics: &NodeDynamics,
    tol: &Tolerances,
) -> Result<LinearVerdict> {
    a.require_connected()?;
    let b = control_matrix_b(a, scheme)?;
    let mu_n = symmetric_eigen(&b, tol)?.max();
    let threshold = sync_threshold(dynamics, tol)?;
    Ok(verdict(mu_n, threshold, tol))
}

pub(crate) fn verdict(mu_n: f64, threshold: f64, tol: &Tolerances) -> LinearVerdict {
    let margin = threshold - mu_n;
    let boundary = margin.abs() <= tol.sync_boundary;
    LinearVerdict { synced: margin > 0.0 && !boundary, mu_n, threshold, margin, boundary }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralVerdict {
    pub synced: bool,
    /// Largest real part over all eigenvalues of all `J_f + c·μᵢ·J_g`.
    pub worst_real_part: f64,
    /// Eigenvalues of `B`, non-decreasing.
    pub mu: Vec<f64>,
    /// Largest real part of each mode matrix, aligned with `mu`.
    pub mode_real_parts: Vec<f64>,
}

/// Stability of every decoupled error mode `J_f + c·μᵢ·J_g`.
pub fn check_sync_general(
    a: &CouplingMatrix,
    scheme: &PinningScheme,
    dynamics: &NodeDynamics,
    tol: &Tolerances,
) -> Result<GeneralVerdict> {
    a.require_connected()?;
    let b = control_matrix_b(a, scheme)?;
    let mu = symmetric_eigen(&b, tol)?.eigenvalues;
    let jg = dynamics.coupling_jacobian();
    let mode_real_parts = mu
        .iter()
        .map(|m| max_real_part(&dynamics.jf.add(&jg.scaled(dynamics.c * m))?, tol))
        .collect::<Result<Vec<_>>>()?;
    let worst_real_part = mode_real_parts.iter().fold(f64::NEG_INFINITY, |w, r| w.max(*r));
    Ok(GeneralVerdict { synced: worst_real_part < -tol.sync_boundary, worst_real_part, mu, mode_real_parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::network::{coupling_matrix, Topology};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn scaled_identity(n: usize, s: f64) -> Matrix {
        Matrix::identity(n).scaled(s)
    }

    #[test]
    fn b_matrix_cases() {
        let a = coupling_matrix(&Topology::new(2, [(1, 2)]).unwrap());
        let b = control_matrix_b(&a, &PinningScheme::zeros(2)).unwrap();
        assert_eq!(&b, a.matrix());
        let b = control_matrix_b(&a, &PinningScheme::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(b.as_matrix().to_rows(), vec![vec![-2.0, 1.0], vec![1.0, -1.0]]);
        assert!(control_matrix_b(&a, &PinningScheme::zeros(3)).is_err());
    }

    #[test]
    fn thresholds() {
        let d = NodeDynamics::linear(scaled_identity(3, -1.0), 1.0, 1.0).unwrap();
        assert!((sync_threshold(&d, &tol()).unwrap() - 1.0).abs() < 1e-15);
        let d = NodeDynamics::linear(scaled_identity(3, 2.0), 1.0, 10.0).unwrap();
        assert!((sync_threshold(&d, &tol()).unwrap() + 0.2).abs() < 1e-15);
        let chen = fixtures::chen_dynamics();
        let want = -((-7.0 + 2989f64.sqrt()) / 2.0) / 10.0;
        let got = sync_threshold(&chen, &tol()).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((got + 2.3836).abs() < 1e-4);
    }

    #[test]
    fn symmetric_part_convention() {
        let chen = fixtures::chen_dynamics().with_convention(LambdaConvention::SymmetricPart);
        // (J + Jᵀ)/2 block [[-35, 14], [14, 28]] has top eigenvalue (-7 + sqrt(63² + 28²))/2
        let want = -((-7.0 + (63f64 * 63.0 + 28.0 * 28.0).sqrt()) / 2.0) / 10.0;
        assert!((sync_threshold(&chen, &tol()).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn dynamics_validation() {
        assert!(NodeDynamics::linear(Matrix::identity(2), 1.0, 0.0).is_err());
        assert!(NodeDynamics::linear(Matrix::identity(2), 0.0, 1.0).is_err());
        assert!(NodeDynamics::linear(Matrix::zeros(2, 3), 1.0, 1.0).is_err());
        assert!(PinningScheme::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn unpinned_network_not_synced_below_zero_threshold() {
        let a = coupling_matrix(&fixtures::paper_fig2());
        let v = check_sync_linear(&a, &PinningScheme::zeros(9), &fixtures::chen_dynamics(), &tol()).unwrap();
        assert!(!v.synced);
        assert!(v.mu_n.abs() < 1e-12);
    }

    #[test]
    fn disconnected_rejected() {
        let a = coupling_matrix(&Topology::new(4, [(1, 2), (3, 4)]).unwrap());
        let d = NodeDynamics::linear(scaled_identity(1, -1.0), 1.0, 1.0).unwrap();
        let err = check_sync_linear(&a, &PinningScheme::zeros(4), &d, &tol()).unwrap_err();
        assert_eq!(err, PinError::Disconnected { components: 2 });
    }

    #[test]
    fn general_criterion_cases() {
        let a = coupling_matrix(&fixtures::paper_fig2());
        let stable = NodeDynamics::new(scaled_identity(2, -1.0), 1.0, 0.0, 1.0, Some(Matrix::identity(2)), LambdaConvention::MaxReal).unwrap();
        let v = check_sync_general(&a, &PinningScheme::zeros(9), &stable, &tol()).unwrap();
        assert!(v.synced);
        assert!((v.worst_real_part + 1.0).abs() < 1e-9);

        let unstable = NodeDynamics::new(scaled_identity(2, 2.0), 1.0, 0.0, 10.0, Some(scaled_identity(2, -1.0)), LambdaConvention::MaxReal).unwrap();
        for beta in [vec![0.0; 9], vec![5.0; 9], vec![0.0, 0.0, 0.0, 100.0, 0.0, 0.0, 0.0, 0.0, 0.0]] {
            let v = check_sync_general(&a, &PinningScheme::new(beta).unwrap(), &unstable, &tol()).unwrap();
            assert!(!v.synced);
        }
    }

    #[test]
    fn boundary_is_not_synced() {
        let v = verdict(-1.0, -1.0 + 1e-12, &tol());
        assert!(v.boundary && !v.synced);
        let v = verdict(-1.0, -0.5, &tol());
        assert!(v.synced && !v.boundary);
    }
}
