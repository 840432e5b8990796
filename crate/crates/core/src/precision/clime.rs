//! CLIME: column-wise `min ||ω||₁ s.t. ||R ω − e_j||∞ ≤ λ`, each column a
//! linear program, followed by min-magnitude symmetrization.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::simplex::{solve_lp, LpOutcome};
use super::{Method, PrecisionEstimate};
use crate::error::{Error, Result};
use crate::linalg::ensure_symmetric;

const MAX_PIVOTS: usize = 200_000;

/// Solves one CLIME column; `ω = u − v` with `u, v ≥ 0`.
pub fn clime_column(r: &DMatrix<f64>, j: usize, lambda: f64) -> Result<Vec<f64>> {
    let d = r.nrows();
    let mut a = Vec::with_capacity(2 * d);
    let mut b = Vec::with_capacity(2 * d);
    for sign in [1.0, -1.0] {
        for i in 0..d {
            let mut row = Vec::with_capacity(2 * d);
            row.extend((0..d).map(|k| sign * r[(i, k)]));
            row.extend((0..d).map(|k| -sign * r[(i, k)]));
            a.push(row);
            let e = if i == j { 1.0 } else { 0.0 };
            b.push(lambda + sign * e);
        }
    }
    let c = vec![1.0; 2 * d];
    match solve_lp(&c, &a, &b, MAX_PIVOTS) {
        LpOutcome::Optimal { x, .. } => Ok((0..d).map(|k| x[k] - x[d + k]).collect()),
        LpOutcome::Infeasible => Err(Error::Infeasible {
            column: j,
            lambda,
            min_feasible: min_feasible_lambda(r, j)?,
        }),
        LpOutcome::Unbounded => Err(Error::Solver(format!("CLIME column {j} LP is unbounded"))),
        LpOutcome::IterationLimit => Err(Error::Solver(format!(
            "CLIME column {j} LP hit the pivot limit"
        ))),
    }
}

/// `min_ω ||R ω − e_j||∞`, the smallest λ for which column `j` is feasible.
pub fn min_feasible_lambda(r: &DMatrix<f64>, j: usize) -> Result<f64> {
    let d = r.nrows();
    // variables (u, v, t): min t s.t. ±(R(u − v) − e_j) ≤ t
    let mut a = Vec::with_capacity(2 * d);
    let mut b = Vec::with_capacity(2 * d);
    for sign in [1.0, -1.0] {
        for i in 0..d {
            let mut row = Vec::with_capacity(2 * d + 1);
            row.extend((0..d).map(|k| sign * r[(i, k)]));
            row.extend((0..d).map(|k| -sign * r[(i, k)]));
            row.push(-1.0);
            a.push(row);
            let e = if i == j { 1.0 } else { 0.0 };
            b.push(sign * e);
        }
    }
    let mut c = vec![0.0; 2 * d + 1];
    c[2 * d] = 1.0;
    match solve_lp(&c, &a, &b, MAX_PIVOTS) {
        LpOutcome::Optimal { objective, .. } => Ok(objective),
        other => Err(Error::Solver(format!("minimal-lambda LP failed: {other:?}"))),
    }
}

/// Unsymmetrized CLIME solution: column `j` solves the `j`-th LP.
pub fn clime_columns(r: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    ensure_symmetric(r, 1e-10)?;
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("lambda must be nonnegative, got {lambda}")));
    }
    let d = r.nrows();
    let cols: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|j| clime_column(r, j, lambda))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(d, d, |i, j| cols[j][i]))
}

/// Keeps, for each pair, whichever of `ω_ij`, `ω_ji` is smaller in magnitude.
pub fn symmetrize_min_magnitude(w: &DMatrix<f64>) -> DMatrix<f64> {
    let d = w.nrows();
    DMatrix::from_fn(d, d, |i, j| {
        let (a, b) = (w[(i, j)], w[(j, i)]);
        if a.abs() <= b.abs() {
            a
        } else {
            b
        }
    })
}

/// CLIME estimate of the precision matrix from a (not necessarily PSD)
/// correlation estimate.
pub fn clime(r: &DMatrix<f64>, lambda: f64) -> Result<PrecisionEstimate> {
    let raw = clime_columns(r, lambda)?;
    let mut est = PrecisionEstimate::from_omega(symmetrize_min_magnitude(&raw), Method::Clime);
    est.lambda = lambda;
    Ok(est)
}

/// Hard-thresholds off-diagonal entries below `tau_thresh` in magnitude.
pub fn clime_threshold(est: &PrecisionEstimate, tau_thresh: f64) -> Result<PrecisionEstimate> {
    if !(tau_thresh >= 0.0) {
        return Err(Error::Parameter(format!("threshold must be nonnegative, got {tau_thresh}")));
    }
    let mut out = est.clone();
    let d = out.omega.nrows();
    for i in 0..d {
        for j in 0..d {
            if i != j && out.omega[(i, j)].abs() < tau_thresh {
                out.omega[(i, j)] = 0.0;
            }
        }
    }
    Ok(out)
}

/// Smallest λ at which every CLIME column is a multiple of `e_j`, assuming
/// `|r_jk| ≤ r_jj`.
pub fn clime_lambda_max(r: &DMatrix<f64>) -> f64 {
    let d = r.nrows();
    (0..d)
        .map(|j| {
            let m = (0..d)
                .filter(|&k| k != j)
                .fold(0.0f64, |acc, k| acc.max(r[(k, j)].abs()));
            m / (r[(j, j)] + m)
        })
        .fold(0.0, f64::max)
}
