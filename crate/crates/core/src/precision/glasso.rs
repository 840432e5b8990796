//! Graphical lasso by block coordinate descent over columns of the
//! covariance estimate `W = Ω⁻¹`, with an entrywise penalty matrix and an
//! unpenalized diagonal.

use nalgebra::DMatrix;

use super::{Method, PrecisionEstimate};
use crate::error::{Error, Result};
use crate::linalg::{ensure_symmetric, min_eigenvalue, spd_inverse, symmetrize};

#[derive(Debug, Clone, Copy)]
pub struct GlassoConfig {
    /// Sweeps stop once no entry of `W` moves by more than this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Convergence tolerance of the inner lasso coordinate descent.
    pub inner_tol: f64,
    pub max_inner: usize,
}

impl Default for GlassoConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_sweeps: 500,
            inner_tol: 1e-9,
            max_inner: 5000,
        }
    }
}

/// Entries above this magnitude in a penalty matrix behave as hard zeros.
pub const HARD_ZERO_WEIGHT: f64 = 1e8;

/// Penalized log-likelihood solution with penalty `Σ_{j≠k} ρ_jk |Ω_jk|`.
pub fn glasso(rp: &DMatrix<f64>, lambda: f64) -> Result<PrecisionEstimate> {
    glasso_with(rp, lambda, None, &GlassoConfig::default())
}

/// [`glasso`] with an optional warm start (the `W` of a nearby solution).
pub fn glasso_with(
    rp: &DMatrix<f64>,
    lambda: f64,
    warm: Option<&DMatrix<f64>>,
    cfg: &GlassoConfig,
) -> Result<PrecisionEstimate> {
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("lambda must be nonnegative, got {lambda}")));
    }
    let d = rp.nrows();
    let weights = DMatrix::from_fn(d, d, |i, j| if i == j { 0.0 } else { lambda });
    let mut est = solve(rp, &weights, warm, cfg)?;
    est.lambda = lambda;
    est.method = Method::Glasso;
    Ok(est)
}

/// Graphical lasso with an entrywise penalty matrix (diagonal ignored).
pub fn glasso_weighted(rp: &DMatrix<f64>, weights: &DMatrix<f64>) -> Result<PrecisionEstimate> {
    glasso_weighted_with(rp, weights, None, &GlassoConfig::default())
}

pub fn glasso_weighted_with(
    rp: &DMatrix<f64>,
    weights: &DMatrix<f64>,
    warm: Option<&DMatrix<f64>>,
    cfg: &GlassoConfig,
) -> Result<PrecisionEstimate> {
    if weights.shape() != rp.shape() {
        return Err(Error::Dimension("weight matrix shape differs from input".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::Parameter(format!("penalty weights must be nonnegative, got {w}")));
    }
    ensure_symmetric(weights, 1e-12)?;
    solve(rp, weights, warm, cfg)
}

fn soft(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

fn solve(
    s: &DMatrix<f64>,
    rho: &DMatrix<f64>,
    warm: Option<&DMatrix<f64>>,
    cfg: &GlassoConfig,
) -> Result<PrecisionEstimate> {
    ensure_symmetric(s, 1e-10)?;
    let d = s.nrows();
    let lam_min = min_eigenvalue(s);
    if lam_min < -1e-8 {
        return Err(Error::NotPsd {
            min_eigenvalue: lam_min,
        });
    }
    if (0..d).any(|i| s[(i, i)] <= 0.0) {
        return Err(Error::Degenerate("input has a nonpositive diagonal entry".into()));
    }

    let mut w = match warm {
        Some(w0) if w0.shape() == s.shape() => {
            let mut w = w0.clone();
            for i in 0..d {
                w[(i, i)] = s[(i, i)];
            }
            w
        }
        _ => s.clone(),
    };
    // beta[:, j] holds the lasso coefficients of column j (entry j unused)
    let mut beta = DMatrix::<f64>::zeros(d, d);
    if let Some(w0) = warm {
        if w0.shape() == s.shape() {
            if let Ok(omega0) = spd_inverse(w0) {
                for j in 0..d {
                    for k in 0..d {
                        if k != j {
                            beta[(k, j)] = -omega0[(k, j)] / omega0[(j, j)];
                        }
                    }
                }
            }
        }
    }

    let mut grad = vec![0.0; d];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for j in 0..d {
            // grad = W11 β restricted to k ≠ j
            for k in 0..d {
                grad[k] = 0.0;
            }
            for l in 0..d {
                let b = beta[(l, j)];
                if l != j && b != 0.0 {
                    for k in 0..d {
                        grad[k] += w[(k, l)] * b;
                    }
                }
            }
            for _ in 0..cfg.max_inner {
                let mut inner_change = 0.0f64;
                for k in 0..d {
                    if k == j {
                        continue;
                    }
                    let wkk = w[(k, k)];
                    let old = beta[(k, j)];
                    let partial = s[(k, j)] - (grad[k] - wkk * old);
                    let new = soft(partial, rho[(k, j)]) / wkk;
                    let delta = new - old;
                    if delta != 0.0 {
                        beta[(k, j)] = new;
                        for l in 0..d {
                            grad[l] += w[(l, k)] * delta;
                        }
                        inner_change = inner_change.max(delta.abs() * wkk.sqrt());
                    }
                }
                if inner_change < cfg.inner_tol {
                    break;
                }
            }
            for k in 0..d {
                if k == j {
                    continue;
                }
                let new = grad[k];
                max_change = max_change.max((new - w[(k, j)]).abs());
                w[(k, j)] = new;
                w[(j, k)] = new;
            }
        }
        if !max_change.is_finite() {
            return Err(Error::Solver("graphical lasso diverged".into()));
        }
        if max_change < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("graphical lasso hit {} sweeps without converging", cfg.max_sweeps);
    }

    let mut omega = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        let mut quad = 0.0;
        for k in 0..d {
            if k != j {
                quad += w[(k, j)] * beta[(k, j)];
            }
        }
        let denom = w[(j, j)] - quad;
        if !(denom > 0.0) {
            return Err(Error::Solver(format!(
                "graphical lasso produced a non-positive Schur complement in column {j}; \
                 the input may be singular for this penalty"
            )));
        }
        let ojj = 1.0 / denom;
        omega[(j, j)] = ojj;
        for k in 0..d {
            if k != j {
                omega[(k, j)] = -beta[(k, j)] * ojj;
            }
        }
    }
    let omega = symmetrize(&omega);
    let kkt = kkt_residual(s, &omega, rho)?;
    Ok(PrecisionEstimate {
        omega,
        lambda: f64::NAN,
        method: Method::Glasso,
        kkt_residual: Some(kkt),
        covariance: Some(w),
        converged,
    })
}

/// Largest violation of the stationarity conditions of the weighted
/// graphical lasso: `(Ω⁻¹ − S)_jk = ρ_jk sign(Ω_jk)` on nonzeros,
/// `|(Ω⁻¹ − S)_jk| ≤ ρ_jk` on zeros and `(Ω⁻¹ − S)_jj = 0`.
pub fn kkt_residual(s: &DMatrix<f64>, omega: &DMatrix<f64>, rho: &DMatrix<f64>) -> Result<f64> {
    let inv = spd_inverse(omega).map_err(|_| {
        Error::Solver("graphical lasso estimate is not positive definite".into())
    })?;
    let d = s.nrows();
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let g = inv[(k, j)] - s[(k, j)];
            let v = if k == j {
                g.abs()
            } else if omega[(k, j)].abs() > super::NONZERO_TOL {
                (g - rho[(k, j)] * omega[(k, j)].signum()).abs()
            } else {
                (g.abs() - rho[(k, j)]).max(0.0)
            };
            worst = worst.max(v);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_fixed_point() {
        let s = DMatrix::<f64>::identity(4, 4);
        for lambda in [0.0, 0.1, 1.0] {
            let est = glasso(&s, lambda).unwrap();
            assert!((&est.omega - &s).abs().max() < 1e-12);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let r = 0.6;
        let lambda = 0.2;
        let s = DMatrix::from_row_slice(2, 2, &[1.0, r, r, 1.0]);
        let est = glasso(&s, lambda).unwrap();
        let w12 = r.signum() * (r.abs() - lambda);
        let expected = spd_inverse(&DMatrix::from_row_slice(2, 2, &[1.0, w12, w12, 1.0])).unwrap();
        assert!((&est.omega - &expected).abs().max() < 1e-8);
        assert!(est.kkt_residual.unwrap() < 1e-8);
    }

    #[test]
    fn large_lambda_gives_diagonal() {
        let s = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, -0.3, 0.5, 1.0, 0.2, -0.3, 0.2, 0.5]);
        let est = glasso(&s, 0.5).unwrap();
        for i in 0..3 {
            assert!((est.omega[(i, i)] - 1.0 / s[(i, i)]).abs() < 1e-12);
            for j in 0..3 {
                if i != j {
                    assert_eq!(est.omega[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn zero_weights_give_inverse() {
        let s = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0]);
        let est = glasso_weighted(&s, &DMatrix::zeros(3, 3)).unwrap();
        let inv = spd_inverse(&s).unwrap();
        assert!((&est.omega - &inv).abs().max() < 1e-6);
    }

    #[test]
    fn rejects_indefinite_and_negative_weights() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 1.5, 1.5, 1.0]);
        assert!(matches!(glasso(&s, 0.1), Err(Error::NotPsd { .. })));
        let good = DMatrix::<f64>::identity(2, 2);
        let w = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        assert!(matches!(glasso_weighted(&good, &w), Err(Error::Parameter(_))));
        assert!(glasso(&good, -0.1).is_err());
    }
}
