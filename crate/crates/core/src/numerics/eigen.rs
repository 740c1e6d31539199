//! Cyclic Jacobi eigenvalues for real symmetric matrices.

use crate::error::{Error, Result};

use super::matrix::SymmetricMatrix;

/// Stopping tolerance on ‖offdiag‖_F / ‖M‖_F used throughout the crate.
pub const DEFAULT_EIG_TOL: f64 = 1e-14;

/// Maximum number of full cyclic sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order plus the final off-diagonal norm ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub residual: f64,
    pub sweeps: usize,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a[i * n + j];
            s += 2.0 * v * v;
        }
    }
    s.sqrt()
}

/// Eigenvalues of `m` by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm is at most `tol` times the
/// Frobenius norm of `m`, or fails after [`MAX_SWEEPS`] sweeps.
pub fn symmetric_eigenvalues(m: &SymmetricMatrix, tol: f64) -> Result<Spectrum> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eigensolver tolerance must be positive, got {tol}"
        )));
    }
    let frob = m.frobenius_norm();
    let (n, mut a) = m.clone().into_raw();
    if frob == 0.0 {
        return Ok(Spectrum {
            eigenvalues: vec![0.0; n],
            residual: 0.0,
            sweeps: 0,
        });
    }

    let mut sweeps = 0;
    let mut residual = off_diagonal_norm(&a, n) / frob;
    while residual > tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Once rotations have settled, drop elements below the diagonal's ulp.
                let g = 100.0 * apq.abs();
                if sweeps > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[p * n + k];
                    let akq = a[q * n + k];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[p * n + k] = new_p;
                    a[k * n + p] = new_p;
                    a[q * n + k] = new_q;
                    a[k * n + q] = new_q;
                }
            }
        }
        sweeps += 1;
        residual = off_diagonal_norm(&a, n) / frob;
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    Ok(Spectrum {
        eigenvalues,
        residual,
        sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = SymmetricMatrix::from_row_major(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let s = symmetric_eigenvalues(&m, 1e-12).unwrap();
        assert!((s.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn identity_is_already_diagonal() {
        let s = symmetric_eigenvalues(&SymmetricMatrix::identity(5), 1e-12).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0; 5]);
        assert_eq!(s.sweeps, 0);
    }

    #[test]
    fn zero_matrix() {
        let s = symmetric_eigenvalues(&SymmetricMatrix::zeros(3), 1e-12).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(symmetric_eigenvalues(&SymmetricMatrix::identity(2), 0.0).is_err());
        assert!(symmetric_eigenvalues(&SymmetricMatrix::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn cubic_invariants_oracle() {
        // Eigenvalues of a 3x3 symmetric matrix from the trigonometric solution of
        // its characteristic polynomial.
        let a: [[f64; 3]; 3] = [[4.0, -2.0, 0.5], [-2.0, 1.0, 3.0], [0.5, 3.0, -1.5]];
        let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
        let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let mut b = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
            }
        }
        let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        let phi = (det_b / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        let e2 = 3.0 * q - e1 - e3;

        let m = SymmetricMatrix::from_row_major(3, a.iter().flatten().copied().collect()).unwrap();
        let s = symmetric_eigenvalues(&m, 1e-14).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([e1, e2, e3]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}
