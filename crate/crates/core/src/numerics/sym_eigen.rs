use crate::error::{PinError, Result};
use crate::tolerances::Tolerances;

use super::matrix::{Matrix, SymMatrix};

/// Eigen-decomposition `M = Φ Λ Φᵀ` of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Non-decreasing.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: Matrix,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }

    /// `Φ Λ Φᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.eigenvalues.len();
        Matrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| self.eigenvectors[(i, k)] * self.eigenvalues[k] * self.eigenvectors[(j, k)]).sum()
        })
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps over every upper-triangular pair `(p, q)` and annihilates `m[p][q]`
/// with a plane rotation until the off-diagonal Frobenius norm falls below
/// `tol.jacobi_offdiag · ‖M‖_F`.
pub fn symmetric_eigen(m: &SymMatrix, tol: &Tolerances) -> Result<Spectrum> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    let target = tol.jacobi_offdiag * scale;

    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps >= tol.jacobi_max_sweeps {
            return Err(PinError::Numerical(format!(
                "Jacobi did not converge in {} sweeps (off-diagonal norm {:e})",
                sweeps,
                off(&a)
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                // A <- Jᵀ A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Largest eigenvalue and a unit eigenvector for it.
pub fn lambda_max(m: &SymMatrix, tol: &Tolerances) -> Result<(f64, Vec<f64>)> {
    if m.dim() == 0 {
        return Err(PinError::Input("lambda_max of an empty matrix".into()));
    }
    let spec = symmetric_eigen(m, tol)?;
    let k = m.dim() - 1;
    Ok((spec.eigenvalues[k], spec.eigenvector(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let s = symmetric_eigen(&SymMatrix::new(Matrix::identity(3)).unwrap(), &tol()).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn two_node_chain() {
        let m = SymMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let s = symmetric_eigen(&m, &tol()).unwrap();
        assert!((s.eigenvalues[0] + 2.0).abs() < 1e-14);
        assert!(s.eigenvalues[1].abs() < 1e-14);
    }

    #[test]
    fn lambda_max_of_zero_and_diagonal() {
        let (l, u) = lambda_max(&SymMatrix::new(Matrix::zeros(3, 3)).unwrap(), &tol()).unwrap();
        assert_eq!(l, 0.0);
        assert!((u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);

        let d = SymMatrix::new(Matrix::from_diag(&[-3.0, -1.0, -2.0])).unwrap();
        let (l, u) = lambda_max(&d, &tol()).unwrap();
        assert_eq!(l, -1.0);
        assert_eq!(u.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn eigenvector_residual_small() {
        let m = SymMatrix::from_rows(&[
            vec![2.0, -1.0, 0.3],
            vec![-1.0, 0.5, 1.2],
            vec![0.3, 1.2, -4.0],
        ])
        .unwrap();
        let (l, u) = lambda_max(&m, &tol()).unwrap();
        let mu = m.as_matrix().matvec(&u);
        let r: f64 = mu.iter().zip(&u).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt();
        assert!(r <= 1e-8);
    }
}
