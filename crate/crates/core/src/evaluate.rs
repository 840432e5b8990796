//! Support-recovery rates, ROC curves, matrix-norm errors, oracle tuning and
//! the group match rate.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, spectral_norm_sym};
use crate::precision::{EdgeSet, PrecisionEstimate};
use crate::spca::SparseEigenvector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// False and true positive rates of an estimated edge set over the
/// `d(d − 1)/2` off-diagonal slots.
pub fn edge_fpr_tpr(est: &EdgeSet, truth: &EdgeSet, d: usize) -> Result<RocPoint> {
    let slots = d * d.saturating_sub(1) / 2;
    let positives = truth.len();
    if positives == 0 {
        return Err(Error::Degenerate("true graph has no edges, TPR is undefined".into()));
    }
    if positives >= slots {
        return Err(Error::Degenerate("true graph is complete, FPR is undefined".into()));
    }
    let mut tp = 0;
    let mut fp = 0;
    for &(i, j) in est.pairs() {
        if j >= d {
            return Err(Error::Dimension(format!("edge ({i}, {j}) out of range for d = {d}")));
        }
        if truth.contains(i, j) {
            tp += 1;
        } else {
            fp += 1;
        }
    }
    Ok(RocPoint {
        fpr: fp as f64 / (slots - positives) as f64,
        tpr: tp as f64 / positives as f64,
    })
}

pub fn graph_fpr_tpr(est: &PrecisionEstimate, truth: &EdgeSet, d: usize) -> Result<RocPoint> {
    edge_fpr_tpr(&est.edges(), truth, d)
}

/// Rates over coordinates for an estimated support of a sparse vector.
pub fn support_fpr_tpr(est: &[usize], truth: &[usize], d: usize) -> Result<RocPoint> {
    let positives = truth.len();
    if positives == 0 {
        return Err(Error::Degenerate("true support is empty, TPR is undefined".into()));
    }
    if positives >= d {
        return Err(Error::Degenerate("true support is everything, FPR is undefined".into()));
    }
    let mut in_truth = vec![false; d];
    for &i in truth {
        *in_truth
            .get_mut(i)
            .ok_or_else(|| Error::Dimension(format!("index {i} out of range for d = {d}")))? = true;
    }
    let mut seen = vec![false; d];
    let (mut tp, mut fp) = (0, 0);
    for &i in est {
        if i >= d {
            return Err(Error::Dimension(format!("index {i} out of range for d = {d}")));
        }
        if std::mem::replace(&mut seen[i], true) {
            continue;
        }
        if in_truth[i] {
            tp += 1;
        } else {
            fp += 1;
        }
    }
    Ok(RocPoint {
        fpr: fp as f64 / (d - positives) as f64,
        tpr: tp as f64 / positives as f64,
    })
}

pub fn eigvec_fpr_tpr(est: &SparseEigenvector, truth: &[usize], d: usize) -> Result<RocPoint> {
    support_fpr_tpr(&est.support, truth, d)
}

/// Sorts by FPR and keeps the largest TPR at each repeated FPR.
pub fn roc_curve(points: impl IntoIterator<Item = RocPoint>) -> Vec<RocPoint> {
    let mut pts: Vec<RocPoint> = points.into_iter().collect();
    pts.sort_by(|a, b| a.fpr.total_cmp(&b.fpr).then(b.tpr.total_cmp(&a.tpr)));
    pts.dedup_by(|later, first| later.fpr == first.fpr);
    pts
}

pub fn graph_roc(path: &[PrecisionEstimate], truth: &EdgeSet, d: usize) -> Result<Vec<RocPoint>> {
    let pts = path
        .iter()
        .map(|e| graph_fpr_tpr(e, truth, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(roc_curve(pts))
}

pub fn eigvec_roc(path: &[SparseEigenvector], truth: &[usize], d: usize) -> Result<Vec<RocPoint>> {
    let pts = path
        .iter()
        .map(|e| eigvec_fpr_tpr(e, truth, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(roc_curve(pts))
}

/// TPR at `fpr` by linear interpolation along a curve anchored at (0, 0)
/// and (1, 1), after taking the running maximum of TPR.
pub fn tpr_at_fpr(curve: &[RocPoint], fpr: f64) -> f64 {
    let mut pts = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    pts.extend_from_slice(&roc_curve(curve.iter().copied()));
    pts.push(RocPoint { fpr: 1.0, tpr: 1.0 });
    let mut best = 0.0f64;
    for p in pts.iter_mut() {
        best = best.max(p.tpr);
        p.tpr = best;
    }
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if fpr <= b.fpr {
            if b.fpr == a.fpr {
                return b.tpr;
            }
            let s = ((fpr - a.fpr) / (b.fpr - a.fpr)).clamp(0.0, 1.0);
            return a.tpr + s * (b.tpr - a.tpr);
        }
    }
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixErrors {
    pub frobenius: f64,
    pub spectral: f64,
    pub maxnorm: f64,
}

pub fn matrix_errors(est: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<MatrixErrors> {
    if est.shape() != truth.shape() {
        return Err(Error::Dimension(format!(
            "estimate is {:?} but truth is {:?}",
            est.shape(),
            truth.shape()
        )));
    }
    let diff = est - truth;
    let sym = (&diff + diff.transpose()) * 0.5;
    let spectral = if (&diff - &sym).abs().max() == 0.0 {
        spectral_norm_sym(&diff)
    } else {
        diff.clone().svd(false, false).singular_values.max()
    };
    Ok(MatrixErrors {
        frobenius: diff.norm(),
        spectral,
        maxnorm: max_abs(&diff),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorNorm {
    #[serde(rename = "F")]
    Frobenius,
    #[serde(rename = "S")]
    Spectral,
}

impl ErrorNorm {
    pub fn pick(self, e: &MatrixErrors) -> f64 {
        match self {
            ErrorNorm::Frobenius => e.frobenius,
            ErrorNorm::Spectral => e.spectral,
        }
    }
}

/// Path element with the smallest error in `norm`; ties go to the smaller λ.
pub fn oracle_lambda<'a>(
    path: &'a [PrecisionEstimate],
    truth: &DMatrix<f64>,
    norm: ErrorNorm,
) -> Result<(&'a PrecisionEstimate, MatrixErrors)> {
    let mut best: Option<(&PrecisionEstimate, MatrixErrors)> = None;
    for est in path {
        let err = matrix_errors(&est.omega, truth)?;
        let replace = match &best {
            None => true,
            Some((b, be)) => {
                let (v, bv) = (norm.pick(&err), norm.pick(be));
                v < bv || (v == bv && est.lambda < b.lambda)
            }
        };
        if replace {
            best = Some((est, err));
        }
    }
    best.ok_or_else(|| Error::Parameter("empty path".into()))
}

/// Share of `support` in the better-represented of two groups.
pub fn match_rate(support: &[usize], in_first_group: &[bool]) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::Degenerate("match rate of an empty support".into()));
    }
    let mut first = 0;
    for &i in support {
        if *in_first_group
            .get(i)
            .ok_or_else(|| Error::Dimension(format!("index {i} has no group label")))?
        {
            first += 1;
        }
    }
    let share = first as f64 / support.len() as f64;
    Ok(share.max(1.0 - share))
}
