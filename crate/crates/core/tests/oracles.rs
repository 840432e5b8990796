//! Worked examples checked against independent oracles: series expansions,
//! quadrature, generic LP / SDP solvers, proximal gradient and simulation.

extern crate openblas_src;

use std::f64::consts::PI;

use latent_copula::dists::{bivariate_normal_cdf, std_normal_cdf, std_normal_quantile};
use latent_copula::evaluate::{matrix_errors, oracle_lambda, ErrorNorm};
use latent_copula::latent_corr::{estimate_latent_correlation, ColumnType, LatentCorrConfig, MixedDataset};
use latent_copula::linalg::{max_abs, spd_inverse};
use latent_copula::precision::{
    adaptive_glasso_lla_with, clime, clime_column, clime_threshold, glasso, glasso_weighted, lambda_path,
    GlassoConfig, Method, HARD_ZERO_WEIGHT, SCAD_A,
};
use latent_copula::simgen::{generate_spiked_sigma, generate_truth, sample_scenario, Design, Scenario, ScenarioSpec};
use latent_copula::spca::{leading_eigenvector, sdp_relaxation, sin_angle, truncated_power};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Φ(x)` from the Taylor series of erf, summed until terms vanish.
fn phi_series(x: f64) -> f64 {
    let z = x / 2f64.sqrt();
    let (mut term, mut sum, mut k) = (z, z, 0.0);
    while term.abs() > 1e-18 {
        k += 1.0;
        term *= -z * z / k;
        sum += term / (2.0 * k + 1.0);
    }
    0.5 + sum / PI.sqrt()
}

#[test]
fn normal_cdf_against_series() {
    assert!((std_normal_cdf(1.0) - 0.841345).abs() < 1e-6);
    for x in [-3.0, -1.0, -0.2, 0.0, 0.5, 1.0, 2.5] {
        assert!((std_normal_cdf(x) - phi_series(x)).abs() < 1e-14, "x = {x}");
    }
    assert!((std_normal_quantile(0.841345).unwrap() - 1.0).abs() < 1e-5);
    assert!((std_normal_quantile(std_normal_cdf(1.0)).unwrap() - 1.0).abs() < 1e-12);
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            let dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                break;
            }
        }
    }
    (x, w)
}

/// Tensor-product Gauss–Legendre over `[−10, h] × [−10, k]` of the joint
/// density, 200 panels of 10 nodes per axis.
fn bvn_tensor(h: f64, k: f64, r: f64) -> f64 {
    let (gx, gw) = gauss_legendre(10);
    let axis = |hi: f64| {
        let (lo, panels) = (-10.0, 200);
        let width = (hi - lo) / panels as f64;
        let mut pts = Vec::new();
        for p in 0..panels {
            let a = lo + p as f64 * width;
            for (x, w) in gx.iter().zip(&gw) {
                pts.push((a + 0.5 * width * (x + 1.0), 0.5 * width * w));
            }
        }
        pts
    };
    let (xs, ys) = (axis(h), axis(k));
    let det = 1.0 - r * r;
    let mut total = 0.0;
    for &(x, wx) in &xs {
        for &(y, wy) in &ys {
            total += wx * wy * (-(x * x - 2.0 * r * x * y + y * y) / (2.0 * det)).exp();
        }
    }
    total / (2.0 * PI * det.sqrt())
}

#[test]
fn bivariate_cdf_against_quadrature() {
    let want = 0.25 + (0.5f64).asin() / (2.0 * PI);
    assert!((bivariate_normal_cdf(0.0, 0.0, 0.5).unwrap() - want).abs() < 1e-12);
    let got = bivariate_normal_cdf(0.7, -0.3, 0.4).unwrap();
    assert!((got - bvn_tensor(0.7, -0.3, 0.4)).abs() < 1e-7);
}

fn correlated_normals(sigma: &DMatrix<f64>, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let l = sigma.clone().cholesky().unwrap().unpack();
    let g = DMatrix::<f64>::from_fn(sigma.nrows(), n, |_, _| rng.sample(StandardNormal));
    (l * g).transpose()
}

#[test]
fn binary_pair_recovers_latent_correlation() {
    let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
    let z = correlated_normals(&sigma, 50_000, &mut rng(1));
    let x = z.map(|v| f64::from(v > 0.0));
    let data = MixedDataset::from_matrix(&x, vec![ColumnType::Binary; 2]).unwrap();
    let r = estimate_latent_correlation(&data, &LatentCorrConfig::default()).unwrap().r;
    assert!((r[(0, 1)] - 0.5).abs() < 0.02, "{}", r[(0, 1)]);
}

#[test]
fn mixed_triple_recovers_latent_correlation() {
    let sigma = DMatrix::from_row_slice(3, 3, &[1.0, 0.6, -0.3, 0.6, 1.0, 0.2, -0.3, 0.2, 1.0]);
    let z = correlated_normals(&sigma, 50_000, &mut rng(2));
    let mut x = z.clone();
    x.column_mut(0).apply(|v| *v = f64::from(*v > 0.4));
    x.column_mut(2).apply(|v| *v = v.exp());
    let data =
        MixedDataset::from_matrix(&x, vec![ColumnType::Binary, ColumnType::Continuous, ColumnType::Continuous]).unwrap();
    let r = estimate_latent_correlation(&data, &LatentCorrConfig::default()).unwrap().r;
    assert!(max_abs(&(&r - &sigma)) <= 0.03, "{r}");
}

/// Weighted graphical lasso by proximal gradient with backtracking: an
/// algorithm independent of block coordinate descent.
fn prox_gradient_glasso(s: &DMatrix<f64>, weights: &DMatrix<f64>) -> DMatrix<f64> {
    let d = s.nrows();
    let objective = |o: &DMatrix<f64>| -> Option<f64> {
        let chol = o.clone().cholesky()?;
        let logdet: f64 = chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
        Some(-logdet + s.dot(o) + weights.component_mul(o).abs().sum())
    };
    let smooth = |o: &DMatrix<f64>| -> Option<f64> {
        let chol = o.clone().cholesky()?;
        let logdet: f64 = chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
        Some(-logdet + s.dot(o))
    };
    let prox = |m: &DMatrix<f64>, step: f64| {
        DMatrix::from_fn(d, d, |i, j| {
            let t = step * weights[(i, j)];
            let v = m[(i, j)];
            v.signum() * (v.abs() - t).max(0.0)
        })
    };
    let mut o = DMatrix::from_diagonal(&s.diagonal().map(|v| 1.0 / v));
    let mut step = 1.0;
    for _ in 0..200_000 {
        let grad = s - o.clone().try_inverse().unwrap();
        let f0 = smooth(&o).unwrap();
        let next = loop {
            let cand = prox(&(&o - &grad * step), step);
            let diff = &cand - &o;
            if let Some(f1) = smooth(&cand) {
                if f1 <= f0 + grad.dot(&diff) + diff.norm_squared() / (2.0 * step) {
                    break cand;
                }
            }
            step *= 0.5;
        };
        let moved = max_abs(&(&next - &o));
        o = next;
        step *= 1.2;
        if moved < 1e-12 {
            break;
        }
    }
    assert!(objective(&o).is_some());
    o
}

fn random_correlation(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let x = DMatrix::<f64>::from_fn(4 * d, d, |_, _| rng.sample(StandardNormal));
    let mix = DMatrix::<f64>::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.4 * rng.sample::<f64, _>(StandardNormal) });
    latent_copula::baseline::pearson_correlation(&(x * mix)).unwrap()
}

#[test]
fn two_by_two_glasso_closed_form_and_generic_solver() {
    for (r, lambda) in [(0.6, 0.2), (-0.7, 0.1), (0.3, 0.29)] {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, r, r, 1.0]);
        let est = glasso(&s, lambda).unwrap();
        let off = r.signum() * (r.abs() - lambda);
        let want = spd_inverse(&DMatrix::from_row_slice(2, 2, &[1.0, off, off, 1.0])).unwrap();
        assert!(max_abs(&(&est.omega - &want)) < 1e-6);
        let w = DMatrix::from_row_slice(2, 2, &[0.0, lambda, lambda, 0.0]);
        assert!(max_abs(&(prox_gradient_glasso(&s, &w) - &want)) < 1e-6);
    }
}

#[test]
fn weighted_lla_step_matches_generic_solver() {
    let mut g = rng(5);
    let s = random_correlation(5, &mut g);
    let lambda = 0.1;
    let cfg = GlassoConfig {
        tol: 1e-10,
        max_sweeps: 5000,
        ..GlassoConfig::default()
    };
    let init = glasso(&s, lambda).unwrap();
    let est = adaptive_glasso_lla_with(&s, lambda, SCAD_A, &init, 1, &cfg).unwrap();
    let weights = latent_copula::precision::lla_weights(&init.omega, lambda, SCAD_A).unwrap();
    let oracle = prox_gradient_glasso(&s, &weights);
    assert!(max_abs(&(&est.omega - &oracle)) < 1e-5, "{}", max_abs(&(&est.omega - &oracle)));
}

#[test]
fn weights_pin_the_support() {
    let mut g = rng(6);
    let s = random_correlation(5, &mut g);
    let support = [(0, 1), (1, 2), (3, 4)];
    let w = DMatrix::from_fn(5, 5, |i, j| {
        if i == j || support.contains(&(i.min(j), i.max(j))) {
            0.0
        } else {
            HARD_ZERO_WEIGHT
        }
    });
    let est = glasso_weighted(&s, &w).unwrap();
    let orc = latent_copula::precision::oracle_precision(
        &s,
        &latent_copula::precision::EdgeSet::new(support).unwrap(),
    )
    .unwrap();
    assert!(max_abs(&(&est.omega - &orc.omega)) < 1e-5);
}

fn clime_lp(r: &DMatrix<f64>, j: usize, lambda: f64) -> (f64, Vec<f64>) {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let d = r.nrows();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<_> = (0..d).map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let t: Vec<_> = (0..d).map(|_| p.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for i in 0..d {
        p.add_constraint(&[(t[i], 1.0), (w[i], -1.0)], ComparisonOp::Ge, 0.0);
        p.add_constraint(&[(t[i], 1.0), (w[i], 1.0)], ComparisonOp::Ge, 0.0);
        let row: Vec<_> = (0..d).map(|k| (w[k], r[(i, k)])).collect();
        let e = if i == j { 1.0 } else { 0.0 };
        p.add_constraint(row.as_slice(), ComparisonOp::Le, e + lambda);
        p.add_constraint(row.as_slice(), ComparisonOp::Ge, e - lambda);
    }
    let sol = p.solve().unwrap();
    (sol.objective(), w.iter().map(|v| *sol.var_value(*v)).collect())
}

#[test]
fn clime_matches_lp_oracle() {
    let r = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
    let est = clime(&r, 0.0).unwrap();
    let want = DMatrix::from_row_slice(2, 2, &[4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0]);
    assert!(max_abs(&(&est.omega - &want)) < 1e-9);
    for j in 0..2 {
        let (obj, _) = clime_lp(&r, j, 0.0);
        assert!((obj - 2.0).abs() < 1e-9);
    }

    let r = random_correlation(4, &mut rng(7));
    for j in 0..4 {
        let col = clime_column(&r, j, 0.1).unwrap();
        let ours: f64 = col.iter().map(|v| v.abs()).sum();
        let (obj, _) = clime_lp(&r, j, 0.1);
        assert!((ours - obj).abs() < 1e-5);
        let resid = &r * DVector::from_vec(col) - DVector::from_fn(4, |i, _| f64::from(i == j));
        assert!(resid.amax() <= 0.1 + 1e-6);
    }
}

fn chain_precision(d: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            1.0
        } else if i.abs_diff(j) == 1 {
            rho
        } else {
            0.0
        }
    })
}

#[test]
fn thresholded_clime_recovers_a_chain() {
    let d = 10;
    let omega = chain_precision(d, 0.4);
    let sigma = spd_inverse(&omega).unwrap();
    let z = correlated_normals(&sigma, 2000, &mut rng(8));
    let data = MixedDataset::from_matrix(&z, vec![ColumnType::Continuous; d]).unwrap();
    let r = estimate_latent_correlation(&data, &LatentCorrConfig::default()).unwrap().r;
    // the threshold 4Kλ with K the largest absolute column sum of Ω
    let k = (0..d).map(|j| omega.column(j).abs().sum()).fold(0.0, f64::max);
    let lambda = 0.02;
    let est = clime_threshold(&clime(&r, lambda).unwrap(), 4.0 * k * lambda).unwrap();
    assert_eq!(est.edges(), latent_copula::precision::EdgeSet::from_matrix(&omega));
}

#[test]
fn path_sparsity_grows_as_lambda_falls() {
    let mut g = rng(9);
    let mut steps = 0;
    let mut monotone = 0;
    for _ in 0..5 {
        let r = random_correlation(8, &mut g);
        for method in [Method::Glasso, Method::Clime, Method::ScadLla] {
            let path = lambda_path(&r, 15, method).unwrap();
            for w in path.windows(2) {
                steps += 1;
                if w[1].edges().len() >= w[0].edges().len() {
                    monotone += 1;
                }
            }
        }
    }
    assert!(monotone as f64 >= 0.9 * steps as f64, "{monotone}/{steps}");
}

fn sdp_oracle(r: &DMatrix<f64>, lambda: f64) -> f64 {
    use clarabel::algebra::CscMatrix;
    use clarabel::solver::*;
    let d = r.nrows();
    let m = d * (d + 1) / 2;
    let idx: Vec<(usize, usize)> = (0..d).flat_map(|j| (0..=j).map(move |i| (i, j))).collect();
    let nv = 2 * m;
    let mut q = vec![0.0; nv];
    for (p, &(i, j)) in idx.iter().enumerate() {
        let mult = if i == j { 1.0 } else { 2.0 };
        q[p] = -mult * r[(i, j)];
        q[m + p] = mult * lambda;
    }
    let mut a = vec![vec![0.0; nv]; 1 + 3 * m];
    let mut b = vec![0.0; 1 + 3 * m];
    for (p, &(i, j)) in idx.iter().enumerate() {
        if i == j {
            a[0][p] = 1.0;
        }
        a[1 + 2 * p][p] = 1.0;
        a[1 + 2 * p][m + p] = -1.0;
        a[2 + 2 * p][p] = -1.0;
        a[2 + 2 * p][m + p] = -1.0;
        a[1 + 2 * m + p][p] = if i == j { -1.0 } else { -2f64.sqrt() };
    }
    b[0] = 1.0;
    let settings = DefaultSettingsBuilder::default().verbose(false).build().unwrap();
    let cones = vec![ZeroConeT(1), NonnegativeConeT(2 * m), PSDTriangleConeT(d)];
    let mut solver =
        DefaultSolver::new(&CscMatrix::zeros((nv, nv)), &q, &CscMatrix::from(&a), &b, &cones, settings).unwrap();
    solver.solve();
    assert_eq!(solver.solution.status, SolverStatus::Solved);
    -solver.solution.obj_val
}

fn spiked(d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::identity(d, d);
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] += 0.8;
        }
    }
    latent_copula::simgen::to_correlation(&m)
}

#[test]
fn relaxation_matches_sdp_oracle() {
    let r = spiked(6);
    let sol = sdp_relaxation(&r, 0.1).unwrap();
    assert!((sol.objective - sdp_oracle(&r, 0.1)).abs() < 1e-4);
}

#[test]
fn leading_eigenvector_matches_dense_solver() {
    let mut g = rng(10);
    let a = DMatrix::<f64>::from_fn(8, 8, |_, _| g.sample(StandardNormal));
    let m = &a + a.transpose();
    let eig = SymmetricEigen::new(m.clone());
    let top = eig.eigenvectors.column(eig.eigenvalues.imax()).into_owned();
    let v = leading_eigenvector(&m).unwrap();
    let err = (&v - &top).amax().min((&v + &top).amax());
    assert!(err < 1e-8);
}

#[test]
fn truncated_power_on_block_truth() {
    let truth = generate_spiked_sigma(50, 1).unwrap();
    let eig = SymmetricEigen::new(truth.sigma.clone());
    let top = eig.eigenvectors.column(eig.eigenvalues.imax()).into_owned();
    assert!((eig.eigenvalues.max() - 5.0 / 1.4).abs() < 1e-10);
    let est = truncated_power(&truth.sigma, &top, 10).unwrap();
    assert!(sin_angle(&est.to_dvector(), &top).unwrap() <= 1e-6);
    assert_eq!(est.support, (0..10).collect::<Vec<_>>());
}

#[test]
fn cubed_continuous_columns_are_normal() {
    let spec = ScenarioSpec {
        scenario: Scenario::D,
        n: 10_000,
        d: 20,
        seed: 4,
        design: Design::RandomGraph,
    };
    let truth = generate_truth(&spec).unwrap();
    let data = sample_scenario(&truth, &spec).unwrap();
    let w: Vec<f64> = data.column(0).iter().map(|v| v.powi(3)).collect();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let m2 = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let skew = w.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n / m2.powf(1.5);
    let kurt = w.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n / (m2 * m2);
    assert!(skew.abs() < 0.1 && (kurt - 3.0).abs() < 0.2, "skew {skew}, kurtosis {kurt}");
}

#[test]
fn matrix_norms_match_direct_formulas() {
    let mut g = rng(12);
    let a = DMatrix::<f64>::from_fn(5, 5, |_, _| g.sample(StandardNormal));
    let b = DMatrix::<f64>::from_fn(5, 5, |_, _| g.sample(StandardNormal));
    let e = matrix_errors(&a, &b).unwrap();
    let diff = &a - &b;
    let fro: f64 = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    let spec = SymmetricEigen::new(diff.transpose() * &diff).eigenvalues.max().sqrt();
    let maxn = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!((e.frobenius - fro).abs() < 1e-12);
    assert!((e.spectral - spec).abs() < 1e-12);
    assert!((e.maxnorm - maxn).abs() < 1e-12);
}

#[test]
fn oracle_lambda_lands_inside_a_bracketing_path() {
    let d = 10;
    let omega = chain_precision(d, 0.35);
    let sigma = spd_inverse(&omega).unwrap();
    let z = correlated_normals(&sigma, 500, &mut rng(13));
    let s = latent_copula::baseline::pearson_correlation(&z).unwrap();
    let path = lambda_path(&s, 50, Method::Glasso).unwrap();
    for norm in [ErrorNorm::Frobenius, ErrorNorm::Spectral] {
        let (best, _) = oracle_lambda(&path, &omega, norm).unwrap();
        let pos = path.iter().position(|e| e.lambda == best.lambda).unwrap();
        assert!(pos > 0 && pos + 1 < path.len(), "{norm:?} picked endpoint {pos}");
    }
}
