//! Projection of an indefinite correlation estimate onto the PSD cone under
//! the elementwise max-norm.
//!
//! The radius of the smallest max-norm ball around `R` that meets the PSD cone
//! is located by bisection. Each trial radius is tested by alternating
//! projections between the ball (elementwise clipping) and the cone (negative
//! eigenvalues zeroed). The eigenvalue-clipping projection seeds the upper
//! end, so the result is never worse than that baseline.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::latent_corr::LatentCorrelationMatrix;
use crate::linalg::{clip_negative_eigenvalues, ensure_symmetric, max_abs, min_eigenvalue};

#[derive(Debug, Clone, Copy)]
pub struct PsdConfig {
    /// Bisection stops when the radius bracket is narrower than this.
    pub tol: f64,
    /// Budget of alternating-projection steps across the whole bisection.
    pub max_iter: usize,
    /// Rescale the result to unit diagonal.
    pub unit_diagonal: bool,
}

impl Default for PsdConfig {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iter: 1000,
            unit_diagonal: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PsdProjection {
    pub matrix: LatentCorrelationMatrix,
    /// `||S − R||max` of the returned matrix.
    pub distance: f64,
    /// `||E − R||max` of the eigenvalue-clipping baseline `E`.
    pub baseline_distance: f64,
    pub converged: bool,
}

// trial radii get this many alternating steps before being declared infeasible
const INNER_STEPS: usize = 60;

fn clip_to_ball(x: &DMatrix<f64>, center: &DMatrix<f64>, radius: f64) -> DMatrix<f64> {
    x.zip_map(center, |v, c| v.clamp(c - radius, c + radius))
}

/// Projects `r` onto the PSD cone, approximately minimizing `||S − r||max`.
pub fn project_psd_maxnorm(r: &LatentCorrelationMatrix, cfg: &PsdConfig) -> Result<PsdProjection> {
    let target = &r.r;
    ensure_symmetric(target, 1e-10)?;
    let d = target.nrows();
    let lam_min = min_eigenvalue(target);
    if lam_min >= -1e-10 {
        return Ok(PsdProjection {
            matrix: LatentCorrelationMatrix {
                r: target.clone(),
                psd_projected: true,
            },
            distance: 0.0,
            baseline_distance: 0.0,
            converged: true,
        });
    }

    let baseline = clip_negative_eigenvalues(target);
    let baseline_distance = max_abs(&(&baseline - target));
    let mut best = baseline.clone();
    let mut hi = baseline_distance;
    // ||S − R||₂ ≥ −λmin(R) for PSD S, and ||·||₂ ≤ d ||·||max
    let mut lo = -lam_min / d as f64;
    let mut budget = cfg.max_iter;

    while hi - lo > cfg.tol && budget > 0 {
        let radius = 0.5 * (lo + hi);
        let mut x = best.clone();
        let mut found = None;
        for _ in 0..INNER_STEPS.min(budget) {
            budget -= 1;
            x = clip_negative_eigenvalues(&clip_to_ball(&x, target, radius));
            let dist = max_abs(&(&x - target));
            if dist <= radius {
                found = Some(dist);
                break;
            }
        }
        match found {
            Some(dist) => {
                hi = dist;
                best = x;
            }
            None => lo = radius,
        }
    }
    let converged = hi - lo <= cfg.tol;
    if !converged {
        log::warn!("max-norm PSD projection stopped with bracket [{lo:.3e}, {hi:.3e}]");
    }

    let mut s = best;
    if cfg.unit_diagonal {
        let scale: Vec<f64> = (0..d).map(|i| s[(i, i)].max(1e-12).sqrt().recip()).collect();
        s = DMatrix::from_fn(d, d, |i, j| s[(i, j)] * scale[i] * scale[j]);
    }
    let distance = max_abs(&(&s - target));
    Ok(PsdProjection {
        matrix: LatentCorrelationMatrix {
            r: s,
            psd_projected: true,
        },
        distance,
        baseline_distance,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn psd_input_is_unchanged() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
        let out = project_psd_maxnorm(&LatentCorrelationMatrix::new(m.clone()), &PsdConfig::default()).unwrap();
        assert_eq!(out.matrix.r, m);
        assert_eq!(out.distance, 0.0);
        assert!(out.matrix.psd_projected);
    }

    #[test]
    fn two_by_two_closed_form() {
        // the 2×2 optimum moves every entry by 0.1: diag up, off-diagonal down
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.2, 1.2, 1.0]);
        let out = project_psd_maxnorm(&LatentCorrelationMatrix::new(m.clone()), &PsdConfig::default()).unwrap();
        let brute = {
            // 1-D search over a common shift s: diag 1 + s, off-diag 1.2 − s
            let mut best = f64::INFINITY;
            for i in 0..=20000 {
                let s = i as f64 * 1e-5;
                if 1.2 - s <= 1.0 + s {
                    best = best.min(s);
                }
            }
            best
        };
        assert!((brute - 0.1).abs() < 1e-9);
        assert!(out.distance <= brute + 1e-4, "{}", out.distance);
        assert!(min_eigenvalue(&out.matrix.r) >= -1e-8);
        assert!(out.distance <= out.baseline_distance + 1e-12);
    }

    #[test]
    fn two_by_two_with_unit_diagonal() {
        // with the diagonal pinned at 1, PSD requires |s12| <= 1
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.2, 1.2, 1.0]);
        let cfg = PsdConfig {
            unit_diagonal: true,
            ..PsdConfig::default()
        };
        let out = project_psd_maxnorm(&LatentCorrelationMatrix::new(m), &cfg).unwrap();
        assert!((out.matrix.r[(0, 1)] - 1.0).abs() < 1e-4);
        assert!((out.distance - 0.2).abs() < 1e-4);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.5, 1.0]);
        assert!(matches!(
            project_psd_maxnorm(&LatentCorrelationMatrix::new(m), &PsdConfig::default()),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn unit_diagonal_option() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0]);
        let cfg = PsdConfig {
            unit_diagonal: true,
            ..PsdConfig::default()
        };
        let out = project_psd_maxnorm(&LatentCorrelationMatrix::new(m), &cfg).unwrap();
        for i in 0..3 {
            assert!((out.matrix.r[(i, i)] - 1.0).abs() < 1e-12);
        }
        assert!(min_eigenvalue(&out.matrix.r) >= -1e-8);
    }
}
