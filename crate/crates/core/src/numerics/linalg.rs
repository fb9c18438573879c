//! Small dense complex matrices: Hermitian spectra and density matrices.

use ndarray::Array2;

use super::C64;
use crate::error::{Error, Result};

pub type CMatrix = Array2<C64>;

/// Largest |A_ij - conj(A_ji)| accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Allowed trace deviation of a state from 1.
pub const STATE_TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated in a state.
pub const STATE_EIG_TOL: f64 = -1e-9;
/// Jacobi sweeps stop once every off-diagonal modulus is below this.
pub const EIGEN_OFFDIAG_THRESHOLD: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;
const MAX_DIM: usize = 16;

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    if m.nrows() == 0 || m.nrows() > MAX_DIM {
        return Err(Error::invalid("matrix", format!("dimension must be in 1..={MAX_DIM}")));
    }
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::invalid("matrix", "entries must be finite"));
    }
    let dev = hermiticity_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// 2x2 matrices use the closed form; larger ones go through cyclic Jacobi.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    match m.nrows() {
        1 => Ok(vec![m[[0, 0]].re]),
        2 => {
            let a = m[[0, 0]].re;
            let d = m[[1, 1]].re;
            let b = m[[0, 1]];
            let mean = 0.5 * (a + d);
            let half_gap = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
            Ok(vec![mean - half_gap, mean + half_gap])
        }
        _ => Ok(jacobi(m).0),
    }
}

/// Eigenvalues (ascending) and the unitary whose columns are the matching
/// eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(m)?;
    Ok(jacobi(m))
}

fn jacobi(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let mut a = m.clone();
    // Enforce exact Hermiticity so the rotations stay unitary similarity maps.
    for i in 0..n {
        a[[i, i]] = C64::new(a[[i, i]].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (a[[i, j]] + a[[j, i]].conj());
            a[[i, j]] = avg;
            a[[j, i]] = avg.conj();
        }
    }
    let mut v = CMatrix::eye(n);

    for _ in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[[p, q]].norm());
            }
        }
        if off < EIGEN_OFFDIAG_THRESHOLD {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * gpp + akq * gqp;
                    a[[k, q]] = akp * gpq + akq * gqq;
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * gpp + vkq * gqp;
                    v[[k, q]] = vkp * gpq + vkq * gqq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[[q, k]] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[[p, q]] = C64::new(0.0, 0.0);
                a[[q, p]] = C64::new(0.0, 0.0);
                a[[p, p]] = C64::new(a[[p, p]].re, 0.0);
                a[[q, q]] = C64::new(a[[q, q]].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].re.total_cmp(&a[[j, j]].re));
    let values = order.iter().map(|&i| a[[i, i]].re).collect();
    let mut vectors = CMatrix::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[[k, col]] = v[[k, src]];
        }
    }
    (values, vectors)
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
}

impl DensityMatrix {
    /// Validate `data` as a quantum state.
    pub fn new(data: CMatrix) -> Result<Self> {
        check_hermitian(&data).map_err(|e| match e {
            Error::NotHermitian { deviation } => Error::InvalidState {
                reason: format!("not Hermitian (deviation {deviation:.3e})"),
            },
            other => other,
        })?;
        let tr: f64 = data.diag().iter().map(|z| z.re).sum();
        if (tr - 1.0).abs() > STATE_TRACE_TOL {
            return Err(Error::InvalidState {
                reason: format!("trace {tr} differs from 1"),
            });
        }
        let min_eig = hermitian_eigenvalues(&data)?[0];
        if min_eig < STATE_EIG_TOL {
            return Err(Error::InvalidState {
                reason: format!("negative eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(Self { data })
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let n = populations.len();
        let mut m = CMatrix::zeros((n, n));
        for (i, &p) in populations.iter().enumerate() {
            m[[i, i]] = C64::new(p, 0.0);
        }
        Self::new(m)
    }

    /// Projector onto the normalized pure state `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState {
                reason: "zero or non-finite state vector".into(),
            });
        }
        let n = psi.len();
        let mut m = CMatrix::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = psi[i] * psi[j].conj() / (norm * norm);
            }
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.diag().iter().map(|z| z.re).sum()
    }

    pub fn population(&self, i: usize) -> f64 {
        self.data[[i, i]].re
    }
}

/// Half the trace norm of `rho1 - rho2`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            left: rho1.dim(),
            right: rho2.dim(),
        });
    }
    let diff = rho1.matrix() - rho2.matrix();
    let eig = hermitian_eigenvalues(&diff)?;
    Ok((0.5 * eig.iter().map(|x| x.abs()).sum::<f64>()).min(1.0))
}
