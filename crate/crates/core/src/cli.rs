//! Command-line front end behind the `lgc` binary.
//!
//! Every command reads and writes plain files (see [`crate::io`]) and is
//! deterministic given its flags. [`main_with_args`] maps outcomes to exit
//! codes: 0 when everything converged, 2 when outputs were written but some
//! solver reported non-convergence, 1 on errors and 64 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bench::{run_bench, summarize, BenchConfig, BenchMethod, MeanSd};
use crate::error::{Error, Result};
use crate::evaluate::{edge_fpr_tpr, graph_roc, matrix_errors, support_fpr_tpr, tpr_at_fpr, RocPoint};
use crate::io::{self, Manifest};
use crate::latent_corr::{estimate_latent_correlation, LatentCorrConfig, LatentCorrelationMatrix, MixedDataset};
use crate::linalg::min_eigenvalue;
use crate::precision::{
    adaptive_glasso_lla_with, clime, clime_threshold, glasso, lambda_path, EdgeSet, GlassoConfig, Method,
    PrecisionEstimate, DEFAULT_LLA_STEPS, NONZERO_TOL, SCAD_A,
};
use crate::psd::{project_psd_maxnorm, PsdConfig};
use crate::simgen::{generate_truth, sample_scenario, Design, Scenario, ScenarioSpec};
use crate::spca::{default_relaxation_lambda, leading_eigenvector, sin_angle, two_stage_spca};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "LGC_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// FPR values at which `eval roc` and `bench` report interpolated TPR.
pub const FPR_GRID: [f64; 4] = [0.05, 0.1, 0.2, 0.3];

#[derive(Debug, Parser)]
#[command(name = "lgc", version, about = "Latent Gaussian copula graphs and sparse PCA for binary and mixed data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a ground truth and a dataset from one of the simulation scenarios.
    Simulate(SimulateArgs),
    /// Estimate the latent correlation matrix of a dataset.
    Corr(CorrArgs),
    /// Estimate a sparse precision matrix at one λ or along a λ path.
    Graph(GraphArgs),
    /// Estimate a k-sparse leading eigenvector.
    Spca(SpcaArgs),
    /// Compare estimates with a ground truth.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Run replicated simulations and tabulate mean(sd) errors per method.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scenario: Scenario,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// `graph` or `spiked`.
    #[arg(long, default_value = "graph")]
    pub design: Design,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Column types (binary/continuous, one per column) overriding inference.
    #[arg(long)]
    pub types: Option<PathBuf>,
    /// Also write the PSD projection as Rp.csv.
    #[arg(long)]
    pub psd: bool,
    /// Rescale the projection to unit diagonal.
    #[arg(long, requires = "psd")]
    pub unit_diagonal: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Where a command gets its correlation matrix from.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// Correlation matrix CSV.
    #[arg(long)]
    pub corr: Option<PathBuf>,
    /// Data CSV; the latent correlation is estimated first.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct LambdaArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of points on a log-spaced path from λmax to λmax/100.
    #[arg(long)]
    pub path: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub types: Option<PathBuf>,
    /// glasso, clime or scad.
    #[arg(long, default_value = "glasso")]
    pub method: Method,
    #[command(flatten)]
    pub lambda: LambdaArgs,
    /// CLIME hard threshold; defaults to 2λ.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = SCAD_A)]
    pub scad_a: f64,
    #[arg(long, default_value_t = DEFAULT_LLA_STEPS)]
    pub lla_steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpcaArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub types: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    /// Relaxation penalty; defaults to √(ln d / n) when n is known, else 0.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Sample size behind `--corr`, used for the default penalty.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Edge rates and matrix errors of a precision estimate.
    Graph {
        #[arg(long)]
        est: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Angle and support rates of an eigenvector estimate.
    Spca {
        #[arg(long)]
        est: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// ROC points of a λ path written by `graph --path`.
    Roc {
        /// index.csv of the path.
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub scenario: Scenario,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated: lglasso, lgscad, lclime, naive, zrglasso, zpglasso,
    /// lpca, naivepca, zrpca, zppca.
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<BenchMethod>,
    #[arg(long, default_value_t = 50)]
    pub n_lambdas: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// What a successful command reports back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub converged: bool,
}

impl Outcome {
    fn clean() -> Self {
        Self { converged: true }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match run(cli) {
        Ok(o) if o.converged => EXIT_OK,
        Ok(_) => {
            eprintln!("warning: some solvers did not converge; outputs were written");
            EXIT_NOT_CONVERGED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool may already exist when called more than once in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Corr(a) => cmd_corr(&a),
        Command::Graph(a) => cmd_graph(&a),
        Command::Spca(a) => cmd_spca(&a),
        Command::Eval(e) => cmd_eval(&e),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn create_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    Ok(())
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome> {
    let spec = ScenarioSpec {
        scenario: a.scenario,
        n: a.n,
        d: a.d,
        seed: a.seed,
        design: a.design,
    };
    spec.validate()?;
    let truth = generate_truth(&spec)?;
    let data = sample_scenario(&truth, &spec)?;
    create_dir(&a.out)?;
    let v1 = match &truth.v1 {
        Some(v) => v.clone(),
        None => leading_eigenvector(&truth.sigma)?.iter().copied().collect(),
    };
    io::write_matrix_csv(&a.out.join("data.csv"), &data.to_matrix(), None)?;
    io::write_matrix_csv(&a.out.join("sigma.csv"), &truth.sigma, None)?;
    io::write_matrix_csv(&a.out.join("omega.csv"), &truth.omega, None)?;
    io::write_vector_csv(&a.out.join("v1.csv"), &v1)?;
    io::write_vector_csv(&a.out.join("cutoffs.csv"), &truth.cutoffs)?;
    let mut manifest = Manifest::new(&truth, a.scenario, a.n, data.column_types().to_vec());
    manifest.files = ["data.csv", "sigma.csv", "omega.csv", "v1.csv", "cutoffs.csv", "manifest.json"]
        .map(String::from)
        .to_vec();
    io::write_json(&a.out.join("manifest.json"), &manifest)?;
    Ok(Outcome::clean())
}

fn load_dataset(data: &Path, types: Option<&Path>) -> Result<(Vec<String>, MixedDataset)> {
    let (header, m) = io::read_matrix_csv(data)?;
    let ds = match types {
        Some(t) => {
            let types = io::read_column_types(t)?;
            if types.len() != m.ncols() {
                return Err(Error::Dimension(format!(
                    "{} column types for {} columns",
                    types.len(),
                    m.ncols()
                )));
            }
            MixedDataset::from_matrix(&m, types)?
        }
        None => MixedDataset::from_matrix_inferred(&m)?,
    };
    Ok((header, ds))
}

fn project(r: &DMatrix<f64>, unit_diagonal: bool) -> Result<(DMatrix<f64>, bool)> {
    let cfg = PsdConfig {
        unit_diagonal,
        ..PsdConfig::default()
    };
    let p = project_psd_maxnorm(&LatentCorrelationMatrix::new(r.clone()), &cfg)?;
    log::info!(
        "PSD projection: max-norm distance {:.3e} (eigenvalue clipping {:.3e})",
        p.distance,
        p.baseline_distance
    );
    Ok((p.matrix.r, p.converged))
}

pub fn cmd_corr(a: &CorrArgs) -> Result<Outcome> {
    let (header, ds) = load_dataset(&a.data, a.types.as_deref())?;
    let r = estimate_latent_correlation(&ds, &LatentCorrConfig::default())?.r;
    create_dir(&a.out)?;
    io::write_matrix_csv(&a.out.join("R.csv"), &r, Some(&header))?;
    let mut out = Outcome::clean();
    if a.psd {
        let (rp, converged) = project(&r, a.unit_diagonal)?;
        io::write_matrix_csv(&a.out.join("Rp.csv"), &rp, Some(&header))?;
        out.converged = converged;
    }
    Ok(out)
}

/// The raw correlation matrix and the sample size when it is known.
fn load_correlation(input: &InputArgs, types: Option<&Path>) -> Result<(DMatrix<f64>, Option<usize>)> {
    match (&input.corr, &input.data) {
        (Some(c), _) => Ok((io::read_matrix_csv(c)?.1, None)),
        (None, Some(d)) => {
            let (_, ds) = load_dataset(d, types)?;
            Ok((estimate_latent_correlation(&ds, &LatentCorrConfig::default())?.r, Some(ds.n())))
        }
        (None, None) => Err(Error::Parameter("one of --corr or --data is required".into())),
    }
}

/// Leaves PSD inputs alone and projects the rest.
fn psd_or_project(r: &DMatrix<f64>) -> Result<(DMatrix<f64>, bool)> {
    if min_eigenvalue(r) >= -1e-10 {
        Ok((r.clone(), true))
    } else {
        project(r, false)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathIndexRow {
    pub index: usize,
    pub lambda: f64,
    pub edges: usize,
    pub kkt_residual: Option<f64>,
    pub converged: bool,
    pub omega_file: String,
    pub edges_file: String,
}

#[derive(Debug, Clone, Serialize)]
struct GraphSummary {
    method: Method,
    lambdas: Vec<f64>,
    edges: Vec<usize>,
    converged: bool,
}

fn single_graph(r: &DMatrix<f64>, a: &GraphArgs, lambda: f64) -> Result<PrecisionEstimate> {
    match a.method {
        Method::Glasso => glasso(r, lambda),
        Method::ScadLla => {
            let init = glasso(r, lambda)?;
            adaptive_glasso_lla_with(r, lambda, a.scad_a, &init, a.lla_steps, &GlassoConfig::default())
        }
        Method::Clime => clime_threshold(&clime(r, lambda)?, a.tau.unwrap_or(2.0 * lambda)),
        Method::Oracle => Err(Error::Parameter(
            "the oracle estimator needs the true support; use glasso, clime or scad".into(),
        )),
    }
}

pub fn cmd_graph(a: &GraphArgs) -> Result<Outcome> {
    let (raw, _) = load_correlation(&a.input, a.types.as_deref())?;
    let (r, mut converged) = match a.method {
        Method::Clime => (raw, true),
        _ => psd_or_project(&raw)?,
    };
    let path: Vec<PrecisionEstimate> = match (a.lambda.lambda, a.lambda.path) {
        (Some(l), _) => vec![single_graph(&r, a, l)?],
        (None, Some(n)) => {
            let mut path = if a.method == Method::ScadLla && (a.scad_a != SCAD_A || a.lla_steps != DEFAULT_LLA_STEPS) {
                let grid = crate::precision::lambda_grid(crate::precision::lambda_max(&r, a.method)?, n)?;
                grid.iter().map(|&l| single_graph(&r, a, l)).collect::<Result<Vec<_>>>()?
            } else {
                lambda_path(&r, n, a.method)?
            };
            if a.method == Method::Clime {
                path = path
                    .iter()
                    .map(|e| clime_threshold(e, a.tau.unwrap_or(2.0 * e.lambda)))
                    .collect::<Result<_>>()?;
            }
            path
        }
        (None, None) => return Err(Error::Parameter("one of --lambda or --path is required".into())),
    };
    create_dir(&a.out)?;
    converged &= path.iter().all(|e| e.converged);
    let last = path.last().ok_or_else(|| Error::Solver("empty λ path".into()))?;
    io::write_matrix_csv(&a.out.join("omega.csv"), &last.omega, None)?;
    io::write_edges_csv(&a.out.join("edges.csv"), &last.edges())?;
    if a.lambda.path.is_some() {
        let mut w = csv::Writer::from_path(a.out.join("index.csv"))?;
        for (i, e) in path.iter().enumerate() {
            let row = PathIndexRow {
                index: i,
                lambda: e.lambda,
                edges: e.edges().len(),
                kkt_residual: e.kkt_residual,
                converged: e.converged,
                omega_file: format!("omega_{i:03}.csv"),
                edges_file: format!("edges_{i:03}.csv"),
            };
            io::write_matrix_csv(&a.out.join(&row.omega_file), &e.omega, None)?;
            io::write_edges_csv(&a.out.join(&row.edges_file), &e.edges())?;
            w.serialize(&row)?;
        }
        w.flush()?;
    }
    let summary = GraphSummary {
        method: a.method,
        lambdas: path.iter().map(|e| e.lambda).collect(),
        edges: path.iter().map(|e| e.edges().len()).collect(),
        converged,
    };
    io::write_json(&a.out.join("summary.json"), &summary)?;
    Ok(Outcome { converged })
}

#[derive(Debug, Clone, Serialize)]
struct SpcaSummary {
    k: usize,
    lambda: f64,
    support: Vec<usize>,
    rayleigh: Option<f64>,
    duality_gap: f64,
    converged: bool,
}

pub fn cmd_spca(a: &SpcaArgs) -> Result<Outcome> {
    let (raw, n_data) = load_correlation(&a.input, a.types.as_deref())?;
    let (r, psd_ok) = if a.input.data.is_some() { psd_or_project(&raw)? } else { (raw, true) };
    let d = r.nrows();
    let lambda = match (a.lambda, n_data.or(a.n)) {
        (Some(l), _) => l,
        (None, Some(n)) => default_relaxation_lambda(d, n),
        (None, None) => 0.0,
    };
    let res = two_stage_spca(&r, a.k, lambda)?;
    create_dir(&a.out)?;
    io::write_vector_csv(&a.out.join("v.csv"), &res.estimate.v)?;
    io::write_index_list(&a.out.join("support.txt"), &res.estimate.support)?;
    let converged = psd_ok && res.converged();
    let summary = SpcaSummary {
        k: res.estimate.k,
        lambda,
        support: res.estimate.support.clone(),
        rayleigh: res.estimate.rayleigh.last().copied(),
        duality_gap: res.relaxation.duality_gap,
        converged,
    };
    io::write_json(&a.out.join("spca.json"), &summary)?;
    Ok(Outcome { converged })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphMetrics {
    pub fpr: Option<f64>,
    pub tpr: Option<f64>,
    pub frobenius: f64,
    pub spectral: f64,
    pub maxnorm: f64,
    pub estimated_edges: usize,
    pub true_edges: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpcaMetrics {
    pub sin_angle: f64,
    pub sin2: f64,
    pub fpr: Option<f64>,
    pub tpr: Option<f64>,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RocMetrics {
    pub points: Vec<RocPoint>,
    pub tpr_at: Vec<RocPoint>,
}

fn nonzero_support(v: &[f64]) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i].abs() > NONZERO_TOL).collect()
}

pub fn cmd_eval(e: &EvalCommand) -> Result<Outcome> {
    match e {
        EvalCommand::Graph { est, truth, out } => {
            let (_, est) = io::read_matrix_csv(est)?;
            let (_, truth) = io::read_matrix_csv(truth)?;
            let errs = matrix_errors(&est, &truth)?;
            let (ee, te) = (EdgeSet::from_matrix(&est), EdgeSet::from_matrix(&truth));
            let rates = edge_fpr_tpr(&ee, &te, truth.nrows()).ok();
            create_dir(out)?;
            io::write_json(
                &out.join("metrics.json"),
                &GraphMetrics {
                    fpr: rates.map(|p| p.fpr),
                    tpr: rates.map(|p| p.tpr),
                    frobenius: errs.frobenius,
                    spectral: errs.spectral,
                    maxnorm: errs.maxnorm,
                    estimated_edges: ee.len(),
                    true_edges: te.len(),
                },
            )?;
        }
        EvalCommand::Spca { est, truth, out } => {
            let est = io::read_vector_csv(est)?;
            let truth = io::read_vector_csv(truth)?;
            let s = sin_angle(&DVector::from_vec(est.clone()), &DVector::from_vec(truth.clone()))?;
            let support = nonzero_support(&est);
            let rates = support_fpr_tpr(&support, &nonzero_support(&truth), truth.len()).ok();
            create_dir(out)?;
            io::write_json(
                &out.join("metrics.json"),
                &SpcaMetrics {
                    sin_angle: s,
                    sin2: s * s,
                    fpr: rates.map(|p| p.fpr),
                    tpr: rates.map(|p| p.tpr),
                    support,
                },
            )?;
        }
        EvalCommand::Roc { index, truth, out } => {
            let dir = index.parent().unwrap_or(Path::new("."));
            let (_, truth) = io::read_matrix_csv(truth)?;
            let mut path = Vec::new();
            for row in csv::Reader::from_path(index)?.deserialize() {
                let row: PathIndexRow = row?;
                let (_, omega) = io::read_matrix_csv(&dir.join(&row.omega_file))?;
                let mut est = PrecisionEstimate::from_omega(omega, Method::Glasso);
                est.lambda = row.lambda;
                path.push(est);
            }
            let points = graph_roc(&path, &EdgeSet::from_matrix(&truth), truth.nrows())?;
            let tpr_at = FPR_GRID
                .iter()
                .map(|&fpr| RocPoint {
                    fpr,
                    tpr: tpr_at_fpr(&points, fpr),
                })
                .collect();
            create_dir(out)?;
            io::write_json(&out.join("metrics.json"), &RocMetrics { points, tpr_at })?;
        }
    }
    Ok(Outcome::clean())
}

fn mean_sd_fields(m: Option<MeanSd>) -> [String; 2] {
    match m {
        Some(m) => [io::format_value(m.mean), m.sd.map(io::format_value).unwrap_or_default()],
        None => [String::new(), String::new()],
    }
}

pub fn cmd_bench(a: &BenchArgs) -> Result<Outcome> {
    let mut cfg = BenchConfig::new(a.scenario, a.n, a.d, a.reps, a.seed, a.methods.clone());
    cfg.n_lambdas = a.n_lambdas;
    cfg.k = a.k;
    let out = run_bench(&cfg)?;
    let rows = summarize(&out);
    let pca = a.methods.iter().all(|m| m.is_pca());
    create_dir(&a.out)?;

    let mut w = csv::Writer::from_path(a.out.join("bench.csv"))?;
    if pca {
        w.write_record(["method", "reps", "sin2", "sin2_sd"])?;
    } else {
        w.write_record(["method", "reps", "F", "F_sd", "S", "S_sd"])?;
    }
    println!("scenario {} n {} d {} reps {} mean degree {:.2}", a.scenario, a.n, a.d, a.reps, out.truth.mean_degree());
    for row in &rows {
        let mut rec = vec![row.method.name().to_owned(), row.reps.to_string()];
        if pca {
            rec.extend(mean_sd_fields(row.sin2));
            println!("{:<10} {}", row.method.name(), fmt_cell(row.sin2));
        } else {
            rec.extend(mean_sd_fields(row.frobenius));
            rec.extend(mean_sd_fields(row.spectral));
            println!("{:<10} F {:<12} S {}", row.method.name(), fmt_cell(row.frobenius), fmt_cell(row.spectral));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;

    if !pca {
        let mut w = csv::Writer::from_path(a.out.join("roc.csv"))?;
        w.write_record(["method", "fpr", "tpr"])?;
        for row in &rows {
            for i in 0..=100 {
                let fpr = i as f64 / 100.0;
                let tprs: Vec<f64> = out.records_for(row.method).map(|r| tpr_at_fpr(&r.roc, fpr)).collect();
                let mean = tprs.iter().sum::<f64>() / tprs.len() as f64;
                w.write_record([row.method.name().to_owned(), io::format_value(fpr), io::format_value(mean)])?;
            }
        }
        w.flush()?;
    }
    io::write_json(&a.out.join("records.json"), &out.records)?;
    Ok(Outcome {
        converged: out.all_converged(),
    })
}

fn fmt_cell(m: Option<MeanSd>) -> String {
    m.map(|m| m.to_string()).unwrap_or_else(|| "-".into())
}
