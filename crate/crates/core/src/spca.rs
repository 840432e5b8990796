//! Sparse leading eigenvector of a latent correlation matrix.
//!
//! Two stages: a convex relaxation over the spectraplex
//! `{W ⪰ 0, tr W = 1}` with an entrywise ℓ1 penalty, solved by ADMM, gives an
//! initial direction; the truncated power method then refines it to a
//! `k`-sparse unit vector.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ensure_symmetric, sorted_eigen};

#[derive(Debug, Clone, Copy)]
pub struct AdmmConfig {
    pub rho: f64,
    /// Stop once primal and dual residuals (Frobenius) are both below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            tol: 1e-5,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxationSolution {
    pub w: DMatrix<f64>,
    pub lambda: f64,
    /// `⟨R, W⟩ − λ ||W||₁,₁` at `w`.
    pub objective: f64,
    /// Certified upper bound on the optimum minus `objective`.
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// The top two eigenvalues of `w` or of the input are within 1e−8, so
    /// the leading direction is not identified.
    pub degenerate: bool,
}

impl RelaxationSolution {
    pub fn trace(&self) -> f64 {
        self.w.trace()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SparseEigenvector {
    pub v: Vec<f64>,
    pub k: usize,
    pub support: Vec<usize>,
    /// `vᵀ R v` after each iteration.
    pub rayleigh: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl SparseEigenvector {
    fn from_vector(v: &DVector<f64>, k: usize, rayleigh: Vec<f64>, iterations: usize, converged: bool) -> Self {
        let support = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
        Self {
            v: v.iter().copied().collect(),
            k,
            support,
            rayleigh,
            iterations,
            converged,
        }
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.v)
    }

    /// True when the Rayleigh quotient never decreased by more than `slack`.
    pub fn rayleigh_monotone(&self, slack: f64) -> bool {
        self.rayleigh.windows(2).all(|w| w[1] >= w[0] - slack)
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(x: &[f64]) -> Vec<f64> {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    x.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Frobenius projection onto `{W ⪰ 0, tr W = 1}`.
pub fn project_spectraplex(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sorted_eigen(m);
    let theta = project_simplex(vals.as_slice());
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, &t) in theta.iter().enumerate() {
        if t > 0.0 {
            let v = vecs.column(i);
            out += t * &v * v.transpose();
        }
    }
    (&out + out.transpose()) * 0.5
}

fn soft(m: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    m.map(|v| v.signum() * (v.abs() - t).max(0.0))
}

fn l11(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

fn eigengap(m: &DMatrix<f64>) -> f64 {
    let (vals, _) = sorted_eigen(m);
    if vals.len() < 2 {
        f64::INFINITY
    } else {
        vals[0] - vals[1]
    }
}

/// Relaxation objective `⟨R, W⟩ − λ ||W||₁,₁`.
pub fn relaxation_objective(r: &DMatrix<f64>, w: &DMatrix<f64>, lambda: f64) -> f64 {
    r.dot(w) - lambda * l11(w)
}

/// Upper bound `λmax(R − Z)` on the relaxation optimum for any `|Z_ij| ≤ λ`.
pub fn relaxation_dual_bound(r: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    sorted_eigen(&(r - z)).0[0]
}

pub fn sdp_relaxation(r: &DMatrix<f64>, lambda: f64) -> Result<RelaxationSolution> {
    sdp_relaxation_with(r, lambda, &AdmmConfig::default())
}

pub fn sdp_relaxation_with(r: &DMatrix<f64>, lambda: f64, cfg: &AdmmConfig) -> Result<RelaxationSolution> {
    ensure_symmetric(r, 1e-10)?;
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("lambda must be nonnegative, got {lambda}")));
    }
    if !(cfg.rho > 0.0) {
        return Err(Error::Parameter(format!("ADMM rho must be positive, got {}", cfg.rho)));
    }
    let d = r.nrows();
    let rho = cfg.rho;
    let mut x = DMatrix::<f64>::identity(d, d) / d as f64;
    let mut y = x.clone();
    let mut u = DMatrix::<f64>::zeros(d, d);
    let r_scaled = r / rho;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        x = project_spectraplex(&(&y - &u + &r_scaled));
        let y_old = y;
        y = soft(&(&x + &u), lambda / rho);
        let primal = &x - &y;
        u += &primal;
        let dual = rho * (&y - &y_old).norm();
        if primal.norm() < cfg.tol && dual < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("sparse PCA relaxation stopped after {} iterations", cfg.max_iter);
    }
    let objective = relaxation_objective(r, &x, lambda);
    let z = (&u * rho).map(|v| v.clamp(-lambda, lambda));
    let duality_gap = (relaxation_dual_bound(r, &z) - objective).max(0.0);
    let degenerate = eigengap(&x) < 1e-8 || (lambda == 0.0 && eigengap(r) < 1e-8);
    if degenerate {
        log::warn!("leading eigengap below 1e-8; the leading direction is not identified");
    }
    Ok(RelaxationSolution {
        w: x,
        lambda,
        objective,
        duality_gap,
        iterations,
        converged,
        degenerate,
    })
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is positive.
pub fn orient(v: &mut DVector<f64>) {
    let top = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if let Some(i) = v.iter().position(|x| x.abs() >= top * (1.0 - 1e-12)) {
        if v[i] < 0.0 {
            v.neg_mut();
        }
    }
}

/// Unit eigenvector of the largest eigenvalue, oriented by [`orient`].
pub fn leading_eigenvector(w: &DMatrix<f64>) -> Result<DVector<f64>> {
    ensure_symmetric(w, 1e-8)?;
    if w.nrows() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let (_, vecs) = sorted_eigen(w);
    let mut v: DVector<f64> = vecs.column(0).into_owned();
    v /= v.norm();
    orient(&mut v);
    Ok(v)
}

/// Keeps the `k` largest-magnitude entries (lowest index on ties).
fn truncate_top_k(x: &DVector<f64>, k: usize) -> DVector<f64> {
    let nnz = x.iter().filter(|v| **v != 0.0).count();
    if nnz <= k {
        return x.clone();
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
    let mut out = DVector::zeros(x.len());
    for &i in &idx[..k] {
        out[i] = x[i];
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct PowerConfig {
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            max_iter: 1000,
        }
    }
}

const MAX_RESTARTS: usize = 3;

fn perturb(v0: &DVector<f64>, attempt: usize) -> DVector<f64> {
    let d = v0.len();
    let scale = 1e-3 * attempt as f64;
    let mut v = DVector::from_fn(d, |i, _| {
        v0[i] + scale * ((((i + attempt) * 7919) % 13) as f64 - 6.0) / 6.0
    });
    let n = v.norm();
    if n > 0.0 {
        v /= n;
    }
    v
}

pub fn truncated_power(r: &DMatrix<f64>, v0: &DVector<f64>, k: usize) -> Result<SparseEigenvector> {
    truncated_power_with(r, v0, k, &PowerConfig::default())
}

pub fn truncated_power_with(
    r: &DMatrix<f64>,
    v0: &DVector<f64>,
    k: usize,
    cfg: &PowerConfig,
) -> Result<SparseEigenvector> {
    ensure_symmetric(r, 1e-10)?;
    let d = r.nrows();
    if k == 0 {
        return Err(Error::Parameter("cardinality k must be at least 1".into()));
    }
    if v0.len() != d {
        return Err(Error::Dimension(format!("start vector has length {}, expected {d}", v0.len())));
    }
    if (v0.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Parameter(format!("start vector must be unit norm, got {}", v0.norm())));
    }
    let k = k.min(d);
    'restart: for attempt in 0..=MAX_RESTARTS {
        let mut v = if attempt == 0 { v0.clone() } else { perturb(v0, attempt) };
        let mut rayleigh = Vec::new();
        for it in 1..=cfg.max_iter {
            let x = truncate_top_k(&(r * &v), k);
            let norm = x.norm();
            if !(norm > 1e-300) {
                log::warn!("truncated power iterate vanished; restarting from a perturbed start");
                continue 'restart;
            }
            let next = x / norm;
            rayleigh.push(next.dot(&(r * &next)));
            let step = (&next - &v).norm();
            v = next;
            if step <= cfg.eps {
                orient(&mut v);
                return Ok(SparseEigenvector::from_vector(&v, k, rayleigh, it, true));
            }
        }
        log::warn!("truncated power method hit {} iterations", cfg.max_iter);
        orient(&mut v);
        return Ok(SparseEigenvector::from_vector(&v, k, rayleigh, cfg.max_iter, false));
    }
    Err(Error::Degenerate(format!(
        "truncated power iterate vanished after {MAX_RESTARTS} restarts"
    )))
}

/// Default relaxation penalty `√(log d / n)`.
pub fn default_relaxation_lambda(d: usize, n: usize) -> f64 {
    ((d as f64).ln() / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SpcaConfig {
    pub admm: AdmmConfig,
    pub power: PowerConfig,
}

#[derive(Debug, Clone)]
pub struct SpcaResult {
    pub estimate: SparseEigenvector,
    pub relaxation: RelaxationSolution,
    pub initial: DVector<f64>,
}

impl SpcaResult {
    pub fn converged(&self) -> bool {
        self.estimate.converged && self.relaxation.converged
    }
}

/// Relaxation, its leading eigenvector, then truncated power refinement.
pub fn two_stage_spca(r: &DMatrix<f64>, k: usize, lambda: f64) -> Result<SpcaResult> {
    two_stage_spca_with(r, k, lambda, &SpcaConfig::default())
}

pub fn two_stage_spca_with(r: &DMatrix<f64>, k: usize, lambda: f64, cfg: &SpcaConfig) -> Result<SpcaResult> {
    let relaxation = sdp_relaxation_with(r, lambda, &cfg.admm)?;
    let initial = leading_eigenvector(&relaxation.w)?;
    let estimate = truncated_power_with(r, &initial, k, &cfg.power)?;
    Ok(SpcaResult {
        estimate,
        relaxation,
        initial,
    })
}

/// `√(1 − (uᵀv)²)` after normalizing both vectors.
pub fn sin_angle(u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension("vectors differ in length".into()));
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Degenerate("zero vector has no direction".into()));
    }
    if (nu - 1.0).abs() > 1e-8 || (nv - 1.0).abs() > 1e-8 {
        log::warn!("sin_angle input not unit norm; normalizing");
    }
    let c = (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok((1.0 - c * c).max(0.0).sqrt())
}
