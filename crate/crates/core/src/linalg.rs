//! Small dense linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest absolute off-diagonal entry of a square matrix.
pub fn max_abs_off_diagonal(m: &DMatrix<f64>) -> f64 {
    let d = m.nrows();
    let mut best = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            if i != j {
                best = best.max(m[(i, j)].abs());
            }
        }
    }
    best
}

pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..j {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn ensure_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub fn ensure_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    ensure_square(m)?;
    let a = asymmetry(m);
    if a > tol {
        return Err(Error::NotSymmetric(a));
    }
    Ok(())
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted in
/// decreasing order (columns of the returned vectors follow the same order).
pub fn sorted_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let d = m.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
pub fn spectral_norm_sym(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .fold(0.0, |a, &b| a.max(b.abs()))
}

/// `V diag(f(λ)) Vᵀ`.
pub fn spectral_map(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let v = &eig.eigenvectors;
    let mapped = DVector::from_iterator(m.nrows(), eig.eigenvalues.iter().map(|&l| f(l)));
    let out = v * DMatrix::from_diagonal(&mapped) * v.transpose();
    symmetrize(&out)
}

/// Frobenius projection onto the PSD cone (negative eigenvalues zeroed).
pub fn clip_negative_eigenvalues(m: &DMatrix<f64>) -> DMatrix<f64> {
    spectral_map(m, |l| l.max(0.0))
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = nalgebra::Cholesky::new(symmetrize(m)).ok_or_else(|| Error::NotPsd {
        min_eigenvalue: min_eigenvalue(m),
    })?;
    Ok(symmetrize(&chol.inverse()))
}

/// `log det` of a symmetric positive-definite matrix.
pub fn spd_log_det(m: &DMatrix<f64>) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(symmetrize(m)).ok_or_else(|| Error::NotPsd {
        min_eigenvalue: min_eigenvalue(m),
    })?;
    Ok(2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>())
}

/// `P m Pᵀ` for the permutation sending index `i` to `perm[i]`.
pub fn permute_sym(m: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
    let d = m.nrows();
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(perm[i], perm[j])] = m[(i, j)];
        }
    }
    out
}
