//! Sparse precision-matrix estimation from a latent correlation estimate:
//! graphical lasso, CLIME, SCAD via local linear approximation, and the
//! support-constrained maximum likelihood estimator.

mod clime;
mod glasso;
mod scad;
pub mod simplex;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use clime::{
    clime, clime_column, clime_columns, clime_lambda_max, clime_threshold, min_feasible_lambda,
    symmetrize_min_magnitude,
};
pub use glasso::{
    glasso, glasso_weighted, glasso_weighted_with, glasso_with, kkt_residual, GlassoConfig,
    HARD_ZERO_WEIGHT,
};
pub use scad::{
    adaptive_glasso_lla, adaptive_glasso_lla_with, lla_weights, scad_derivative, scad_objective,
    scad_penalty, SCAD_A,
};

/// Entries at or below this magnitude count as zeros in support and edge
/// computations.
pub const NONZERO_TOL: f64 = 1e-8;

/// Default number of weighted solves in the SCAD refinement.
pub const DEFAULT_LLA_STEPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Glasso,
    Clime,
    #[serde(rename = "scad")]
    ScadLla,
    Oracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Glasso => "glasso",
            Method::Clime => "clime",
            Method::ScadLla => "scad",
            Method::Oracle => "oracle",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "glasso" => Ok(Method::Glasso),
            "clime" => Ok(Method::Clime),
            "scad" | "scadlla" | "scad-lla" => Ok(Method::ScadLla),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::Parse(format!("unknown precision method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrecisionEstimate {
    pub omega: DMatrix<f64>,
    pub lambda: f64,
    pub method: Method,
    /// Stationarity residual of the penalized likelihood (likelihood-based
    /// methods only).
    pub kkt_residual: Option<f64>,
    /// Final `W = Ω⁻¹` iterate, reused to warm-start nearby solves.
    pub covariance: Option<DMatrix<f64>>,
    pub converged: bool,
}

impl PrecisionEstimate {
    pub fn from_omega(omega: DMatrix<f64>, method: Method) -> Self {
        Self {
            omega,
            lambda: 0.0,
            method,
            kkt_residual: None,
            covariance: None,
            converged: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn edges(&self) -> EdgeSet {
        EdgeSet::from_matrix(&self.omega)
    }
}

/// Undirected edge list with `i < j`, sorted and free of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSet {
    pairs: Vec<(usize, usize)>,
}

impl EdgeSet {
    /// Normalizes orientation, sorts and drops duplicates; rejects self-loops.
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (i, j) in pairs {
            if i == j {
                return Err(Error::Parameter(format!("self-loop ({i}, {i}) in edge set")));
            }
            out.push((i.min(j), i.max(j)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { pairs: out })
    }

    /// Off-diagonal pairs whose entry exceeds [`NONZERO_TOL`] in magnitude in
    /// either triangle.
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let d = m.nrows();
        let mut pairs = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                if m[(i, j)].abs() > NONZERO_TOL || m[(j, i)].abs() > NONZERO_TOL {
                    pairs.push((i, j));
                }
            }
        }
        Self { pairs }
    }

    pub fn complete(d: usize) -> Self {
        let pairs = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    /// Boolean adjacency matrix without self-loops.
    pub fn adjacency(&self, d: usize) -> Result<DMatrix<bool>> {
        let mut a = DMatrix::from_element(d, d, false);
        for &(i, j) in &self.pairs {
            if j >= d {
                return Err(Error::Dimension(format!("edge ({i}, {j}) out of range for d = {d}")));
            }
            a[(i, j)] = true;
            a[(j, i)] = true;
        }
        Ok(a)
    }
}

/// Maximum likelihood estimate with the sparsity pattern fixed to `support`.
pub fn oracle_precision(rp: &DMatrix<f64>, support: &EdgeSet) -> Result<PrecisionEstimate> {
    let d = rp.nrows();
    let allowed = support.adjacency(d)?;
    let weights = DMatrix::from_fn(d, d, |i, j| {
        if i == j || allowed[(i, j)] {
            0.0
        } else {
            HARD_ZERO_WEIGHT
        }
    });
    let cfg = GlassoConfig {
        tol: 1e-9,
        max_sweeps: 5000,
        inner_tol: 1e-12,
        ..GlassoConfig::default()
    };
    let mut est = glasso_weighted_with(rp, &weights, None, &cfg)?;
    for i in 0..d {
        for j in 0..d {
            if i != j && !allowed[(i, j)] {
                est.omega[(i, j)] = 0.0;
            }
        }
    }
    est.method = Method::Oracle;
    est.lambda = 0.0;
    Ok(est)
}

/// Smallest λ giving an empty graph for `method`.
pub fn lambda_max(r: &DMatrix<f64>, method: Method) -> Result<f64> {
    match method {
        Method::Glasso | Method::ScadLla => Ok(crate::linalg::max_abs_off_diagonal(r)),
        Method::Clime => Ok(clime_lambda_max(r)),
        Method::Oracle => Err(Error::Parameter("the oracle estimator has no λ path".into())),
    }
}

/// Log-spaced grid from `lambda_max` down to `lambda_max / 100`.
pub fn lambda_grid(lambda_max: f64, n_lambdas: usize) -> Result<Vec<f64>> {
    if n_lambdas < 2 {
        return Err(Error::Parameter(format!("a λ path needs at least 2 points, got {n_lambdas}")));
    }
    if !(lambda_max > 0.0) {
        return Err(Error::Degenerate(format!("λmax must be positive, got {lambda_max}")));
    }
    let (hi, lo) = (lambda_max.ln(), (lambda_max / 100.0).ln());
    Ok((0..n_lambdas)
        .map(|i| (hi + (lo - hi) * i as f64 / (n_lambdas - 1) as f64).exp())
        .collect())
}

/// Estimates along a decreasing λ grid, each solve warm-started from the
/// previous one. SCAD points use the graphical lasso at the same λ as their
/// initial estimate; on a singular input the SCAD path ends early at the
/// first λ whose weighted problem has no maximizer.
pub fn lambda_path(r: &DMatrix<f64>, n_lambdas: usize, method: Method) -> Result<Vec<PrecisionEstimate>> {
    let lmax = lambda_max(r, method)?;
    let grid = lambda_grid(lmax, n_lambdas)?;
    let cfg = GlassoConfig::default();
    match method {
        Method::Clime => {
            use rayon::prelude::*;
            grid.par_iter().map(|&l| clime(r, l)).collect()
        }
        Method::Glasso => {
            let mut out: Vec<PrecisionEstimate> = Vec::with_capacity(grid.len());
            for &l in &grid {
                let warm = out.last().and_then(|e| e.covariance.as_ref());
                out.push(glasso_with(r, l, warm, &cfg)?);
            }
            Ok(out)
        }
        Method::ScadLla => {
            let mut out = Vec::with_capacity(grid.len());
            let mut warm: Option<DMatrix<f64>> = None;
            for &l in &grid {
                let init = glasso_with(r, l, warm.as_ref(), &cfg)?;
                warm = init.covariance.clone();
                match adaptive_glasso_lla_with(r, l, SCAD_A, &init, DEFAULT_LLA_STEPS, &cfg) {
                    Ok(est) => out.push(est),
                    // zero weights on a singular input leave the likelihood unbounded
                    Err(Error::Solver(msg)) if !out.is_empty() => {
                        log::warn!("SCAD path stopped at λ = {l:.4e} after {} points: {msg}", out.len());
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        }
        Method::Oracle => unreachable!("rejected by lambda_max"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DMatrix<f64> {
        DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.5, 0.2, 0.1, 0.5, 1.0, 0.4, 0.0, 0.2, 0.4, 1.0, 0.3, 0.1, 0.0, 0.3, 1.0,
            ],
        )
    }

    #[test]
    fn edge_set_normalizes() {
        let e = EdgeSet::new([(2, 0), (0, 2), (1, 3)]).unwrap();
        assert_eq!(e.pairs(), &[(0, 2), (1, 3)]);
        assert!(e.contains(3, 1));
        assert!(EdgeSet::new([(1, 1)]).is_err());
    }

    #[test]
    fn oracle_full_and_empty_support() {
        let s = sample();
        let full = oracle_precision(&s, &EdgeSet::complete(4)).unwrap();
        let inv = crate::linalg::spd_inverse(&s).unwrap();
        assert!((&full.omega - &inv).abs().max() < 1e-6);
        let empty = oracle_precision(&s, &EdgeSet::default()).unwrap();
        for i in 0..4 {
            assert!((empty.omega[(i, i)] - 1.0).abs() < 1e-9);
        }
        assert!(empty.edges().is_empty());
    }

    #[test]
    fn weights_zero_on_support_match_oracle() {
        let s = sample();
        let support = EdgeSet::new([(0, 1), (1, 2), (2, 3)]).unwrap();
        let orc = oracle_precision(&s, &support).unwrap();
        assert_eq!(orc.edges(), support);
        // the gradient vanishes on the support and the diagonal
        let inv = crate::linalg::spd_inverse(&orc.omega).unwrap();
        for &(i, j) in support.pairs() {
            assert!((inv[(i, j)] - s[(i, j)]).abs() < 1e-6);
        }
        for i in 0..4 {
            assert!((inv[(i, i)] - s[(i, i)]).abs() < 1e-6);
        }
    }

    #[test]
    fn path_rejects_single_point_and_starts_empty() {
        let s = sample();
        assert!(lambda_path(&s, 1, Method::Glasso).is_err());
        for m in [Method::Glasso, Method::Clime, Method::ScadLla] {
            let path = lambda_path(&s, 5, m).unwrap();
            assert_eq!(path.len(), 5);
            assert!(path[0].edges().is_empty(), "{m}: {}", path[0].omega);
            assert!(path.windows(2).all(|w| w[0].lambda > w[1].lambda));
        }
    }

    #[test]
    fn method_round_trip() {
        for m in [Method::Glasso, Method::Clime, Method::ScadLla, Method::Oracle] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
    }
}
