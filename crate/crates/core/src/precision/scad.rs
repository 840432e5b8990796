//! SCAD penalty and the local linear approximation (LLA) refinement of a
//! graphical lasso estimate.

use nalgebra::DMatrix;

use super::glasso::{glasso_weighted_with, GlassoConfig};
use super::{Method, PrecisionEstimate};
use crate::error::{Error, Result};
use crate::linalg::spd_log_det;

/// Default SCAD shape parameter.
pub const SCAD_A: f64 = 3.7;

fn check_a(a: f64) -> Result<()> {
    if !(a > 2.0) {
        return Err(Error::Parameter(format!("SCAD parameter a must exceed 2, got {a}")));
    }
    Ok(())
}

/// SCAD derivative `p′λ(θ) = λ 1{θ ≤ λ} + (aλ − θ)₊/(a − 1) 1{θ > λ}`.
pub fn scad_derivative(theta: f64, lambda: f64, a: f64) -> Result<f64> {
    check_a(a)?;
    if !(theta >= 0.0) || !(lambda >= 0.0) {
        return Err(Error::Parameter(format!(
            "SCAD derivative needs theta, lambda >= 0, got ({theta}, {lambda})"
        )));
    }
    Ok(if theta <= lambda {
        lambda
    } else {
        (a * lambda - theta).max(0.0) / (a - 1.0)
    })
}

/// SCAD penalty value `pλ(θ)` for `θ ≥ 0`.
pub fn scad_penalty(theta: f64, lambda: f64, a: f64) -> Result<f64> {
    check_a(a)?;
    let theta = theta.abs();
    Ok(if theta <= lambda {
        lambda * theta
    } else if theta <= a * lambda {
        (2.0 * a * lambda * theta - theta * theta - lambda * lambda) / (2.0 * (a - 1.0))
    } else {
        lambda * lambda * (a + 1.0) / 2.0
    })
}

/// `Tr(S Ω) − log|Ω| + Σ_{j≠k} pλ(|Ω_jk|)`, the folded-concave objective the
/// LLA steps majorize.
pub fn scad_objective(s: &DMatrix<f64>, omega: &DMatrix<f64>, lambda: f64, a: f64) -> Result<f64> {
    let d = s.nrows();
    let trace: f64 = (0..d).map(|j| s.column(j).dot(&omega.column(j))).sum();
    let mut penalty = 0.0;
    for j in 0..d {
        for k in 0..d {
            if j != k {
                penalty += scad_penalty(omega[(k, j)], lambda, a)?;
            }
        }
    }
    Ok(trace - spd_log_det(omega)? + penalty)
}

/// LLA weights `p′λ(|Ω_jk|)` with a zero diagonal.
pub fn lla_weights(omega: &DMatrix<f64>, lambda: f64, a: f64) -> Result<DMatrix<f64>> {
    let d = omega.nrows();
    let mut w = DMatrix::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            if j != k {
                w[(k, j)] = scad_derivative(omega[(k, j)].abs(), lambda, a)?;
            }
        }
    }
    // average the two triangles so CLIME inits (not exactly symmetric) still work
    Ok((&w + w.transpose()) * 0.5)
}

/// Adaptive graphical lasso: `n_steps` weighted graphical lasso solves with
/// SCAD-derivative weights taken from the previous iterate.
pub fn adaptive_glasso_lla(
    rp: &DMatrix<f64>,
    lambda: f64,
    a: f64,
    init: &PrecisionEstimate,
    n_steps: usize,
) -> Result<PrecisionEstimate> {
    adaptive_glasso_lla_with(rp, lambda, a, init, n_steps, &GlassoConfig::default())
}

pub fn adaptive_glasso_lla_with(
    rp: &DMatrix<f64>,
    lambda: f64,
    a: f64,
    init: &PrecisionEstimate,
    n_steps: usize,
    cfg: &GlassoConfig,
) -> Result<PrecisionEstimate> {
    check_a(a)?;
    if n_steps == 0 {
        return Err(Error::Parameter("LLA needs at least one step".into()));
    }
    if init.omega.shape() != rp.shape() {
        return Err(Error::Dimension("initial estimate has the wrong shape".into()));
    }
    let mut current = init.omega.clone();
    let mut warm = init.covariance.clone();
    let mut est = None;
    for _ in 0..n_steps {
        let weights = lla_weights(&current, lambda, a)?;
        let step = glasso_weighted_with(rp, &weights, warm.as_ref(), cfg)?;
        current = step.omega.clone();
        warm = step.covariance.clone();
        est = Some(step);
    }
    let mut est = est.expect("at least one step ran");
    est.lambda = lambda;
    est.method = Method::ScadLla;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::glasso::glasso;

    #[test]
    fn derivative_examples() {
        let lambda = 0.3;
        assert_eq!(scad_derivative(0.0, lambda, 3.7).unwrap(), lambda);
        assert_eq!(scad_derivative(3.7 * lambda, lambda, 3.7).unwrap(), 0.0);
        assert_eq!(scad_derivative(5.0, lambda, 3.7).unwrap(), 0.0);
        let v = scad_derivative(2.0 * lambda, lambda, 3.7).unwrap();
        assert!((v - 1.7 / 2.7 * lambda).abs() < 1e-15);
        assert!((v / lambda - 0.6296).abs() < 1e-4);
        assert!(matches!(scad_derivative(0.1, 0.1, 2.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn derivative_is_continuous_at_lambda() {
        let lambda = 0.25;
        let left = scad_derivative(lambda, lambda, 3.7).unwrap();
        let right = scad_derivative(lambda + 1e-12, lambda, 3.7).unwrap();
        assert!((left - right).abs() < 1e-10);
    }

    #[test]
    fn penalty_is_continuous() {
        let (l, a) = (0.4, 3.7);
        for &t in &[l, a * l] {
            let lo = scad_penalty(t, l, a).unwrap();
            let hi = scad_penalty(t + 1e-12, l, a).unwrap();
            assert!((lo - hi).abs() < 1e-10);
        }
    }

    #[test]
    fn lla_from_large_init_is_unpenalized() {
        let s = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0]);
        let lambda = 0.05;
        let init = PrecisionEstimate::from_omega(DMatrix::from_element(3, 3, 10.0), Method::Glasso);
        let est = adaptive_glasso_lla(&s, lambda, SCAD_A, &init, 1).unwrap();
        let inv = crate::linalg::spd_inverse(&s).unwrap();
        assert!((&est.omega - &inv).abs().max() < 1e-6);
    }

    #[test]
    fn lla_from_zero_init_is_glasso() {
        let s = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0]);
        let lambda = 0.1;
        let init = PrecisionEstimate::from_omega(DMatrix::zeros(3, 3), Method::Glasso);
        let est = adaptive_glasso_lla(&s, lambda, SCAD_A, &init, 1).unwrap();
        let plain = glasso(&s, lambda).unwrap();
        assert!((&est.omega - &plain.omega).abs().max() < 1e-8);
        assert_eq!(est.method, Method::ScadLla);
    }
}
