//! Replicated end-to-end simulation runs with mean(sd) summaries per method.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{pearson_correlation, rank_correlation, sample_covariance};
use crate::error::{Error, Result};
use crate::evaluate::{graph_roc, oracle_lambda, ErrorNorm, RocPoint};
use crate::latent_corr::{estimate_latent_correlation, LatentCorrConfig, LatentCorrelationMatrix};
use crate::precision::{lambda_path, Method};
use crate::psd::{project_psd_maxnorm, PsdConfig};
use crate::simgen::{
    generate_truth_with, sample_scenario_with_latent, truth_v1, Design, GraphConfig, Scenario, ScenarioSpec, ScenarioTruth,
    SimulatedSample,
};
use crate::spca::{default_relaxation_lambda, sin_angle, two_stage_spca};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchMethod {
    LGlasso,
    LGscad,
    LClime,
    Naive,
    ZrGlasso,
    ZpGlasso,
    LPca,
    NaivePca,
    ZrPca,
    ZpPca,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 10] = [
        BenchMethod::LGlasso,
        BenchMethod::LGscad,
        BenchMethod::LClime,
        BenchMethod::Naive,
        BenchMethod::ZrGlasso,
        BenchMethod::ZpGlasso,
        BenchMethod::LPca,
        BenchMethod::NaivePca,
        BenchMethod::ZrPca,
        BenchMethod::ZpPca,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::LGlasso => "lglasso",
            BenchMethod::LGscad => "lgscad",
            BenchMethod::LClime => "lclime",
            BenchMethod::Naive => "naive",
            BenchMethod::ZrGlasso => "zrglasso",
            BenchMethod::ZpGlasso => "zpglasso",
            BenchMethod::LPca => "lpca",
            BenchMethod::NaivePca => "naivepca",
            BenchMethod::ZrPca => "zrpca",
            BenchMethod::ZpPca => "zppca",
        }
    }

    pub fn is_pca(self) -> bool {
        matches!(
            self,
            BenchMethod::LPca | BenchMethod::NaivePca | BenchMethod::ZrPca | BenchMethod::ZpPca
        )
    }
}

impl std::fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BenchMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        BenchMethod::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown bench method '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub d: usize,
    pub reps: usize,
    pub seed: u64,
    pub methods: Vec<BenchMethod>,
    /// Points on each λ path.
    pub n_lambdas: usize,
    /// Cardinality for the sparse PCA methods.
    pub k: usize,
    pub graph: GraphConfig,
}

impl BenchConfig {
    pub fn new(scenario: Scenario, n: usize, d: usize, reps: usize, seed: u64, methods: Vec<BenchMethod>) -> Self {
        Self {
            scenario,
            n,
            d,
            reps,
            seed,
            methods,
            n_lambdas: 50,
            k: 10,
            graph: GraphConfig::default(),
        }
    }
}

/// One method on one replicate.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub method: BenchMethod,
    pub rep: usize,
    /// Frobenius error at the Frobenius-oracle λ (graph methods).
    pub frobenius: Option<f64>,
    /// Spectral error at the spectral-oracle λ (graph methods).
    pub spectral: Option<f64>,
    pub lambda_f: Option<f64>,
    pub lambda_s: Option<f64>,
    /// `sin²` of the angle to the planted eigenvector (PCA methods).
    pub sin2: Option<f64>,
    pub support: Option<Vec<usize>>,
    /// Largest stationarity residual over the λ path (likelihood methods).
    pub max_kkt: Option<f64>,
    pub roc: Vec<RocPoint>,
    pub converged: bool,
}

impl BenchRecord {
    fn empty(method: BenchMethod, rep: usize) -> Self {
        Self {
            method,
            rep,
            frobenius: None,
            spectral: None,
            lambda_f: None,
            lambda_s: None,
            sin2: None,
            support: None,
            max_kkt: None,
            roc: Vec::new(),
            converged: true,
        }
    }
}

/// Stream-separated seed for replicate `rep`.
pub fn replicate_seed(root: u64, rep: usize) -> u64 {
    root.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(rep as u64 + 1)
}

fn design_for(methods: &[BenchMethod]) -> Result<Design> {
    let pca = methods.iter().filter(|m| m.is_pca()).count();
    match (pca, methods.len() - pca) {
        (0, 0) => Err(Error::Parameter("no methods selected".into())),
        (0, _) => Ok(Design::RandomGraph),
        (_, 0) => Ok(Design::Spiked),
        _ => Err(Error::Parameter(
            "graph and PCA methods use different truth designs; run them separately".into(),
        )),
    }
}

fn psd_input(r: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let out = project_psd_maxnorm(&LatentCorrelationMatrix::new(r), &PsdConfig::default())?;
    Ok(out.matrix.r)
}

struct Inputs {
    latent: Option<DMatrix<f64>>,
    latent_psd: Option<DMatrix<f64>>,
    naive: Option<DMatrix<f64>>,
    zr: Option<DMatrix<f64>>,
    zp: Option<DMatrix<f64>>,
}

fn build_inputs(sample: &SimulatedSample, methods: &[BenchMethod]) -> Result<Inputs> {
    use BenchMethod::*;
    let wants = |ms: &[BenchMethod]| methods.iter().any(|m| ms.contains(m));
    let latent = if wants(&[LGlasso, LGscad, LClime, LPca]) {
        Some(estimate_latent_correlation(&sample.data, &LatentCorrConfig::default())?.r)
    } else {
        None
    };
    let latent_psd = match (&latent, wants(&[LGlasso, LGscad, LPca])) {
        (Some(r), true) => Some(psd_input(r.clone())?),
        _ => None,
    };
    let naive = if wants(&[Naive, NaivePca]) {
        Some(sample_covariance(&sample.data.to_matrix())?)
    } else {
        None
    };
    let zr = if wants(&[ZrGlasso, ZrPca]) {
        Some(psd_input(rank_correlation(&sample.latent)?)?)
    } else {
        None
    };
    let zp = if wants(&[ZpGlasso, ZpPca]) {
        Some(pearson_correlation(&sample.latent)?)
    } else {
        None
    };
    Ok(Inputs {
        latent,
        latent_psd,
        naive,
        zr,
        zp,
    })
}

fn run_graph(
    method: BenchMethod,
    rep: usize,
    input: &DMatrix<f64>,
    solver: Method,
    truth: &ScenarioTruth,
    n_lambdas: usize,
) -> Result<BenchRecord> {
    let path = lambda_path(input, n_lambdas, solver)?;
    let (best_f, err_f) = oracle_lambda(&path, &truth.omega, ErrorNorm::Frobenius)?;
    let (best_s, err_s) = oracle_lambda(&path, &truth.omega, ErrorNorm::Spectral)?;
    let mut rec = BenchRecord::empty(method, rep);
    rec.frobenius = Some(err_f.frobenius);
    rec.spectral = Some(err_s.spectral);
    rec.lambda_f = Some(best_f.lambda);
    rec.lambda_s = Some(best_s.lambda);
    rec.max_kkt = path
        .iter()
        .filter_map(|e| e.kkt_residual)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    rec.roc = graph_roc(&path, &truth.edges, truth.d())?;
    rec.converged = path.iter().all(|e| e.converged);
    Ok(rec)
}

fn run_pca(
    method: BenchMethod,
    rep: usize,
    input: &DMatrix<f64>,
    truth: &ScenarioTruth,
    n: usize,
    k: usize,
) -> Result<BenchRecord> {
    let d = input.nrows();
    let res = two_stage_spca(input, k, default_relaxation_lambda(d, n))?;
    let s = sin_angle(&res.estimate.to_dvector(), &truth_v1(truth)?)?;
    let mut rec = BenchRecord::empty(method, rep);
    rec.sin2 = Some(s * s);
    rec.support = Some(res.estimate.support.clone());
    rec.converged = res.converged();
    Ok(rec)
}

fn run_replicate(cfg: &BenchConfig, truth: &ScenarioTruth, design: Design, rep: usize) -> Result<Vec<BenchRecord>> {
    use BenchMethod::*;
    let spec = ScenarioSpec {
        scenario: cfg.scenario,
        n: cfg.n,
        d: cfg.d,
        seed: replicate_seed(cfg.seed, rep),
        design,
    };
    let sample = sample_scenario_with_latent(truth, &spec)?;
    let inputs = build_inputs(&sample, &cfg.methods)?;
    let need = |m: &Option<DMatrix<f64>>| -> Result<DMatrix<f64>> {
        m.clone().ok_or_else(|| Error::Solver("bench input was not prepared".into()))
    };
    cfg.methods
        .iter()
        .map(|&m| match m {
            LGlasso => run_graph(m, rep, &need(&inputs.latent_psd)?, Method::Glasso, truth, cfg.n_lambdas),
            LGscad => run_graph(m, rep, &need(&inputs.latent_psd)?, Method::ScadLla, truth, cfg.n_lambdas),
            LClime => run_graph(m, rep, &need(&inputs.latent)?, Method::Clime, truth, cfg.n_lambdas),
            Naive => run_graph(m, rep, &need(&inputs.naive)?, Method::Glasso, truth, cfg.n_lambdas),
            ZrGlasso => run_graph(m, rep, &need(&inputs.zr)?, Method::Glasso, truth, cfg.n_lambdas),
            ZpGlasso => run_graph(m, rep, &need(&inputs.zp)?, Method::Glasso, truth, cfg.n_lambdas),
            LPca => run_pca(m, rep, &need(&inputs.latent_psd)?, truth, cfg.n, cfg.k),
            NaivePca => run_pca(m, rep, &need(&inputs.naive)?, truth, cfg.n, cfg.k),
            ZrPca => run_pca(m, rep, &need(&inputs.zr)?, truth, cfg.n, cfg.k),
            ZpPca => run_pca(m, rep, &need(&inputs.zp)?, truth, cfg.n, cfg.k),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub truth: ScenarioTruth,
    pub records: Vec<BenchRecord>,
}

impl BenchOutput {
    pub fn records_for(&self, method: BenchMethod) -> impl Iterator<Item = &BenchRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }

    pub fn all_converged(&self) -> bool {
        self.records.iter().all(|r| r.converged)
    }
}

/// Runs `cfg.reps` replicates against one truth drawn from `cfg.seed`;
/// replicates run in parallel.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutput> {
    if cfg.reps == 0 {
        return Err(Error::Parameter("reps must be at least 1".into()));
    }
    let design = design_for(&cfg.methods)?;
    let spec = ScenarioSpec {
        scenario: cfg.scenario,
        n: cfg.n,
        d: cfg.d,
        seed: cfg.seed,
        design,
    };
    let truth = generate_truth_with(&spec, &cfg.graph)?;
    let per_rep: Vec<Vec<BenchRecord>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| run_replicate(cfg, &truth, design, rep))
        .collect::<Result<_>>()?;
    Ok(BenchOutput {
        truth,
        records: per_rep.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    /// `None` with a single replicate.
    pub sd: Option<f64>,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = (values.len() > 1)
            .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
        Some(Self { mean, sd })
    }
}

impl std::fmt::Display for MeanSd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.sd {
            Some(sd) => write!(f, "{:.2}({:.2})", self.mean, sd),
            None => write!(f, "{:.2}", self.mean),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub method: BenchMethod,
    pub reps: usize,
    pub frobenius: Option<MeanSd>,
    pub spectral: Option<MeanSd>,
    pub sin2: Option<MeanSd>,
}

pub fn summarize(out: &BenchOutput) -> Vec<SummaryRow> {
    let mut by_method: BTreeMap<BenchMethod, Vec<&BenchRecord>> = BTreeMap::new();
    for r in &out.records {
        by_method.entry(r.method).or_default().push(r);
    }
    by_method
        .into_iter()
        .map(|(method, recs)| {
            let col = |f: fn(&BenchRecord) -> Option<f64>| {
                let v: Vec<f64> = recs.iter().filter_map(|r| f(r)).collect();
                MeanSd::of(&v)
            };
            SummaryRow {
                method,
                reps: recs.len(),
                frobenius: col(|r| r.frobenius),
                spectral: col(|r| r.spectral),
                sin2: col(|r| r.sin2),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in BenchMethod::ALL {
            assert_eq!(m.name().parse::<BenchMethod>().unwrap(), m);
        }
        assert_eq!("ZR-GLASSO".parse::<BenchMethod>().unwrap(), BenchMethod::ZrGlasso);
    }

    #[test]
    fn mixed_designs_rejected() {
        assert!(design_for(&[BenchMethod::LGlasso, BenchMethod::LPca]).is_err());
        assert_eq!(design_for(&[BenchMethod::LPca]).unwrap(), Design::Spiked);
    }

    #[test]
    fn single_rep_has_no_sd() {
        let m = MeanSd::of(&[1.5]).unwrap();
        assert!(m.sd.is_none());
        assert_eq!(m.to_string(), "1.50");
        let m = MeanSd::of(&[1.0, 3.0]).unwrap();
        assert_eq!(m.to_string(), "2.00(1.41)");
    }

    #[test]
    fn small_run_is_deterministic() {
        let cfg = BenchConfig {
            n_lambdas: 5,
            ..BenchConfig::new(Scenario::A, 60, 10, 2, 4, vec![BenchMethod::LGlasso, BenchMethod::Naive])
        };
        let a = run_bench(&cfg).unwrap();
        let b = run_bench(&cfg).unwrap();
        assert_eq!(a.records.len(), 4);
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.frobenius, y.frobenius);
        }
        assert!(a.records.iter().all(|r| r.max_kkt.unwrap() <= 1e-4));
    }
}
