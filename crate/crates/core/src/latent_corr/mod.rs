//! Rank-based estimation of the latent correlation matrix for binary,
//! continuous and mixed columns.
//!
//! Each off-diagonal entry is obtained from the pairwise Kendall's tau by
//! inverting the bridge function that matches the pair type:
//!
//! | pair                | bridge                          |
//! |---------------------|---------------------------------|
//! | binary / binary     | [`bridge_f_inverse`]            |
//! | binary / continuous | [`bridge_h_inverse`]            |
//! | continuous pair     | [`continuous_pair_transform`]   |
//!
//! Binary cutoffs are estimated from column means, Winsorized to
//! `[1/(2n), 1 − 1/(2n)]` so constant columns still get a finite cutoff.

mod bridge;
mod kendall;

pub use bridge::{
    bridge_f, bridge_f_inverse, bridge_f_inverse_with, bridge_h, bridge_h_inverse,
    bridge_h_inverse_with, continuous_pair_transform, invert_increasing, InversionConfig,
};
pub use kendall::{contingency, kendall_tau_binary, kendall_tau_continuous, kendall_tau_mixed};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dists::std_normal_quantile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Binary,
    Continuous,
}

/// An `n × d` table of observations with a type tag per column.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDataset {
    columns: Vec<Vec<f64>>,
    column_types: Vec<ColumnType>,
    n: usize,
}

impl MixedDataset {
    /// Builds a dataset from column vectors.
    pub fn from_columns(columns: Vec<Vec<f64>>, column_types: Vec<ColumnType>) -> Result<Self> {
        if columns.len() != column_types.len() {
            return Err(Error::Dimension(format!(
                "{} columns but {} type tags",
                columns.len(),
                column_types.len()
            )));
        }
        if columns.is_empty() {
            return Err(Error::Dimension("dataset has no columns".into()));
        }
        let n = columns[0].len();
        if n < 2 {
            return Err(Error::Dimension(format!("need at least 2 observations, got {n}")));
        }
        for (j, (col, ty)) in columns.iter().zip(&column_types).enumerate() {
            if col.len() != n {
                return Err(Error::Dimension(format!(
                    "column {j} has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(v) = col.iter().find(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("column {j} has non-finite value {v}")));
            }
            if *ty == ColumnType::Binary {
                if let Some(v) = col.iter().find(|&&v| v != 0.0 && v != 1.0) {
                    return Err(Error::Domain(format!("binary column {j} has value {v}")));
                }
            }
        }
        Ok(Self {
            columns,
            column_types,
            n,
        })
    }

    /// Builds a dataset from an `n × d` matrix (rows are observations).
    pub fn from_matrix(values: &DMatrix<f64>, column_types: Vec<ColumnType>) -> Result<Self> {
        let columns = (0..values.ncols())
            .map(|j| values.column(j).iter().copied().collect())
            .collect();
        Self::from_columns(columns, column_types)
    }

    /// Like [`from_matrix`](Self::from_matrix), tagging a column binary iff
    /// every value is 0 or 1.
    pub fn from_matrix_inferred(values: &DMatrix<f64>) -> Result<Self> {
        let types = (0..values.ncols())
            .map(|j| infer_column_type(values.column(j).iter().copied()))
            .collect();
        Self::from_matrix(values, types)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn column_types(&self) -> &[ColumnType] {
        &self.column_types
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.d(), |i, j| self.columns[j][i])
    }

    /// Applies `f` to every value of column `j`, keeping its type tag.
    pub fn map_column(&self, j: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut columns = self.columns.clone();
        columns[j] = columns[j].iter().map(|&v| f(v)).collect();
        Self::from_columns(columns, self.column_types.clone())
    }

    /// Reorders columns so that new column `i` is old column `order[i]`.
    pub fn select_columns(&self, order: &[usize]) -> Result<Self> {
        let columns = order.iter().map(|&j| self.columns[j].clone()).collect();
        let types = order.iter().map(|&j| self.column_types[j]).collect();
        Self::from_columns(columns, types)
    }
}

pub fn infer_column_type(values: impl IntoIterator<Item = f64>) -> ColumnType {
    if values.into_iter().all(|v| v == 0.0 || v == 1.0) {
        ColumnType::Binary
    } else {
        ColumnType::Continuous
    }
}

/// Configuration for [`estimate_latent_correlation`].
#[derive(Debug, Clone, Copy)]
pub struct LatentCorrConfig {
    /// Off-diagonal entries are clamped to `[−1 + delta, 1 − delta]`.
    pub delta: f64,
    /// Cutoffs are clamped to `[−2 m_bound, 2 m_bound]`.
    pub m_bound: f64,
    pub inversion: InversionConfig,
}

impl Default for LatentCorrConfig {
    fn default() -> Self {
        Self {
            delta: 0.01,
            m_bound: 4.0,
            inversion: InversionConfig::default(),
        }
    }
}

/// Estimated cutoffs on the standard-normal scale; `None` for continuous
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffEstimate {
    pub delta_hat: Vec<Option<f64>>,
}

/// The estimated latent correlation matrix `R̂` (or its PSD projection).
#[derive(Debug, Clone, PartialEq)]
pub struct LatentCorrelationMatrix {
    pub r: DMatrix<f64>,
    pub psd_projected: bool,
}

impl LatentCorrelationMatrix {
    pub fn new(r: DMatrix<f64>) -> Self {
        Self {
            r,
            psd_projected: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }
}

/// `Φ⁻¹(1 − X̄)` with `X̄` Winsorized into `[1/(2n), 1 − 1/(2n)]`, clamped to
/// `[−2 m_bound, 2 m_bound]`.
pub fn estimate_cutoff(x: &[f64], m_bound: f64) -> Result<f64> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Dimension("empty column".into()));
    }
    if let Some(v) = x.iter().find(|&&v| v != 0.0 && v != 1.0) {
        return Err(Error::Domain(format!("cutoff needs binary data, got {v}")));
    }
    let eps = 1.0 / (2.0 * n as f64);
    let mean = (x.iter().sum::<f64>() / n as f64).clamp(eps, 1.0 - eps);
    let cut = std_normal_quantile(1.0 - mean)?;
    Ok(cut.clamp(-2.0 * m_bound, 2.0 * m_bound))
}

pub fn estimate_cutoffs(data: &MixedDataset, m_bound: f64) -> Result<CutoffEstimate> {
    let delta_hat = (0..data.d())
        .map(|j| match data.column_types()[j] {
            ColumnType::Binary => {
                let col = data.column(j);
                if col.iter().all(|&v| v == col[0]) {
                    log::warn!("binary column {j} is constant; its cutoff is Winsorized");
                }
                estimate_cutoff(col, m_bound).map(Some)
            }
            ColumnType::Continuous => Ok(None),
        })
        .collect::<Result<_>>()?;
    Ok(CutoffEstimate { delta_hat })
}

/// Pairwise Kendall's tau matrix with the kernel chosen by column type.
pub fn kendall_tau_matrix(data: &MixedDataset) -> DMatrix<f64> {
    let d = data.d();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    let taus: Vec<f64> = pairs
        .par_iter()
        .map(|&(j, k)| pair_tau(data, j, k))
        .collect();
    let mut out = DMatrix::identity(d, d);
    for (&(j, k), &t) in pairs.iter().zip(&taus) {
        out[(j, k)] = t;
        out[(k, j)] = t;
    }
    out
}

fn pair_tau(data: &MixedDataset, j: usize, k: usize) -> f64 {
    let (x, y) = (data.column(j), data.column(k));
    let pc = data.n() as f64 * (data.n() as f64 - 1.0) / 2.0;
    match (data.column_types()[j], data.column_types()[k]) {
        (ColumnType::Binary, ColumnType::Binary) => kendall::tau_binary_unchecked(x, y),
        _ => kendall::concordance_sum(x, y) / pc,
    }
}

/// Estimates `R̂` from a mixed dataset.
pub fn estimate_latent_correlation(
    data: &MixedDataset,
    cfg: &LatentCorrConfig,
) -> Result<LatentCorrelationMatrix> {
    if data.n() < 2 {
        return Err(Error::Dimension("need at least 2 observations".into()));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0, 1), got {}", cfg.delta)));
    }
    let cutoffs = estimate_cutoffs(data, cfg.m_bound)?;
    let tau = kendall_tau_matrix(data);
    Ok(LatentCorrelationMatrix::new(correlation_from_tau(
        &tau,
        data.column_types(),
        &cutoffs,
        cfg,
    )))
}

/// Maps a Kendall's tau matrix to latent correlations through the bridge
/// matching each pair's column types.
pub fn correlation_from_tau(
    tau: &DMatrix<f64>,
    types: &[ColumnType],
    cutoffs: &CutoffEstimate,
    cfg: &LatentCorrConfig,
) -> DMatrix<f64> {
    let d = tau.nrows();
    let bound = 1.0 - cfg.delta;
    let inv = InversionConfig {
        delta: cfg.delta,
        ..cfg.inversion
    };
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let t = tau[(j, k)];
            let r = match (types[j], types[k]) {
                (ColumnType::Binary, ColumnType::Binary) => {
                    let dj = cutoffs.delta_hat[j].expect("binary column has a cutoff");
                    let dk = cutoffs.delta_hat[k].expect("binary column has a cutoff");
                    bridge_f_inverse_with(t, dj, dk, &inv).value()
                }
                (ColumnType::Binary, ColumnType::Continuous) => {
                    let dj = cutoffs.delta_hat[j].expect("binary column has a cutoff");
                    bridge_h_inverse_with(t, dj, &inv).value()
                }
                (ColumnType::Continuous, ColumnType::Binary) => {
                    let dk = cutoffs.delta_hat[k].expect("binary column has a cutoff");
                    bridge_h_inverse_with(t, dk, &inv).value()
                }
                (ColumnType::Continuous, ColumnType::Continuous) => continuous_pair_transform(t),
            };
            r.clamp(-bound, bound)
        })
        .collect();
    let mut out = DMatrix::identity(d, d);
    for (&(j, k), &v) in pairs.iter().zip(&values) {
        out[(j, k)] = v;
        out[(k, j)] = v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_examples() {
        let half: Vec<f64> = (0..10).map(|i| (i % 2) as f64).collect();
        assert_eq!(estimate_cutoff(&half, 4.0).unwrap(), 0.0);

        // X̄ = 0.158655 gives Δ̂ ≈ 1
        let n = 1_000_000;
        let ones = (0.158655 * n as f64).round() as usize;
        let x: Vec<f64> = (0..n).map(|i| (i < ones) as u8 as f64).collect();
        assert!((estimate_cutoff(&x, 4.0).unwrap() - 1.0).abs() < 1e-3);

        let zeros = vec![0.0; 100];
        assert!((estimate_cutoff(&zeros, 4.0).unwrap() - 2.5758293035489).abs() < 1e-9);
        let ones = vec![1.0; 100];
        assert!((estimate_cutoff(&ones, 4.0).unwrap() + 2.5758293035489).abs() < 1e-9);
    }

    #[test]
    fn cutoff_clamps_to_bound() {
        let zeros = vec![0.0; 1_000_000];
        assert_eq!(estimate_cutoff(&zeros, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn dataset_validation() {
        assert!(MixedDataset::from_columns(vec![vec![0.0, 2.0]], vec![ColumnType::Binary]).is_err());
        assert!(MixedDataset::from_columns(vec![vec![0.0]], vec![ColumnType::Binary]).is_err());
        assert!(MixedDataset::from_columns(vec![vec![0.0, 1.0]], vec![]).is_err());
        assert!(MixedDataset::from_columns(
            vec![vec![0.0, f64::NAN]],
            vec![ColumnType::Continuous]
        )
        .is_err());
        let m = DMatrix::from_row_slice(3, 2, &[0.0, 1.5, 1.0, 2.5, 1.0, -1.0]);
        let ds = MixedDataset::from_matrix_inferred(&m).unwrap();
        assert_eq!(ds.column_types(), &[ColumnType::Binary, ColumnType::Continuous]);
        assert_eq!(ds.to_matrix(), m);
    }

    #[test]
    fn estimate_has_unit_diagonal_and_symmetry() {
        let cols = vec![
            vec![0., 1., 1., 0., 1., 0., 1., 1.],
            vec![0., 1., 0., 0., 1., 1., 1., 1.],
            vec![0.3, 2.1, -0.4, 0.0, 1.7, 0.9, 3.3, 1.1],
        ];
        let ds = MixedDataset::from_columns(
            cols,
            vec![ColumnType::Binary, ColumnType::Binary, ColumnType::Continuous],
        )
        .unwrap();
        let r = estimate_latent_correlation(&ds, &LatentCorrConfig::default()).unwrap();
        for j in 0..3 {
            assert_eq!(r.r[(j, j)], 1.0);
            for k in 0..3 {
                assert_eq!(r.r[(j, k)], r.r[(k, j)]);
                assert!(r.r[(j, k)].abs() <= 1.0);
            }
        }
        assert!(!r.psd_projected);
    }
}
