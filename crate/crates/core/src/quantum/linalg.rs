//! Spectral routines on [`ComplexMatrix`], backed by nalgebra's dense
//! decompositions.

use nalgebra::{SymmetricEigen, SVD};

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Hermitian input tolerance accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, aligned with `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// Rebuilds `sum_k f(lambda_k) |v_k><v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * (1.0 + m.max_abs()) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(hermitian_eig_unchecked(&m.hermitian_part()))
}

/// Like [`hermitian_eig`] but assumes the input is Hermitian.
pub fn hermitian_eig_unchecked(m: &ComplexMatrix) -> HermitianEig {
    let n = m.rows();
    if n == 0 {
        return HermitianEig {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(m.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEig { values, vectors }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    if n == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    eig.eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    if n == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    eig.eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    eig.eigenvalues.iter().map(|v| v.abs()).sum()
}

/// Projection onto the PSD cone by eigenvalue clipping.
pub fn psd_part(m: &ComplexMatrix) -> ComplexMatrix {
    hermitian_eig_unchecked(m).map(|v| v.max(0.0))
}

/// Principal square root of a PSD matrix (negative eigenvalues clipped).
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    hermitian_eig_unchecked(m).map(|v| v.max(0.0).sqrt())
}

/// Singular value decomposition `M = U diag(s) V^dagger` with square `U`, `V`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular: Vec<f64>,
    pub v_adjoint: ComplexMatrix,
}

/// Full SVD of a square matrix.
pub fn svd_square(m: &ComplexMatrix) -> Result<Svd> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let svd = SVD::new(m.to_nalgebra(), true, true);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| Error::Precondition("SVD did not converge".into()))?;
    let vt = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::Precondition("SVD did not converge".into()))?;
    Ok(Svd {
        u: ComplexMatrix::from_nalgebra(u),
        singular: svd.singular_values.iter().copied().collect(),
        v_adjoint: ComplexMatrix::from_nalgebra(vt),
    })
}

/// Unitary polar factor `W V^dagger` of a square matrix.
pub fn unitary_polar_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let svd = svd_square(m)?;
    Ok(svd.u.matmul(&svd.v_adjoint))
}

/// `||U^dagger U - I||_F`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    (&u.adjoint().matmul(u) - &ComplexMatrix::identity(u.cols())).frobenius_norm()
}
