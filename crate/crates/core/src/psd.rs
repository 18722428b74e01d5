//! Projection onto the cone of positive semidefinite matrices.

use nalgebra::DMatrix;

use crate::error::{OcoError, Result};

/// Frobenius-nearest PSD matrix: symmetrize, eigendecompose, clamp negative eigenvalues.
pub fn project_psd(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !matrix.is_square() {
        return Err(OcoError::InvalidArgument(format!(
            "project_psd needs a square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(OcoError::Numeric("non-finite entry in project_psd input".into()));
    }
    let sym = (matrix + matrix.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return Ok(sym);
    }
    let clamped = eig.eigenvalues.map(|l| l.max(0.0));
    let v = &eig.eigenvectors;
    let out = v * DMatrix::from_diagonal(&clamped) * v.transpose();
    // re-symmetrize to remove rounding asymmetry of the reconstruction
    Ok((&out + out.transpose()) * 0.5)
}

/// Smallest eigenvalue of the symmetric part of `matrix`.
pub fn min_eigenvalue(matrix: &DMatrix<f64>) -> f64 {
    let sym = (matrix + matrix.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// Largest absolute eigenvalue (spectral norm) of the symmetric part of `matrix`.
pub fn spectral_norm_sym(matrix: &DMatrix<f64>) -> f64 {
    let sym = (matrix + matrix.transpose()) * 0.5;
    sym.symmetric_eigenvalues().amax()
}
