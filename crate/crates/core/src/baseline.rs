//! Moment-based inputs used as comparison baselines: the sample covariance
//! of the observed data and the Pearson correlation of the latent scores.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::latent_corr::{ColumnType, LatentCorrConfig, MixedDataset, estimate_latent_correlation};

/// Unbiased sample covariance of the rows of `x` (`n × d`).
pub fn sample_covariance(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::Dimension("need at least 2 observations".into()));
    }
    let means = x.row_mean();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= &means;
    }
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    Ok((&cov + cov.transpose()) * 0.5)
}

/// Pearson correlation of the rows of `x`; constant columns get a zero
/// off-diagonal row and a unit diagonal.
pub fn pearson_correlation(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let cov = sample_covariance(x)?;
    let d = cov.nrows();
    let s: Vec<f64> = (0..d)
        .map(|i| if cov[(i, i)] > 0.0 { cov[(i, i)].sqrt().recip() } else { 0.0 })
        .collect();
    Ok(DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { cov[(i, j)] * s[i] * s[j] }))
}

/// Kendall-based latent correlation treating every column as continuous.
pub fn rank_correlation(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let data = MixedDataset::from_matrix(x, vec![ColumnType::Continuous; x.ncols()])?;
    Ok(estimate_latent_correlation(&data, &LatentCorrConfig::default())?.r)
}
