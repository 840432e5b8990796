//! Ground-truth correlation structures and simulated binary / mixed datasets.
//!
//! Two designs: a random geometric graph for the precision matrix, and a
//! two-spike covariance whose leading eigenvector is supported on the first
//! ten coordinates. Four observation maps turn latent normal scores into
//! data: all binary, binary with gross outliers in the latent scores, half
//! continuous, and half continuous through a cubic transform.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent_corr::{ColumnType, MixedDataset};
use crate::linalg::{min_eigenvalue, spd_inverse, symmetrize};
use crate::precision::EdgeSet;
use crate::spca::leading_eigenvector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    A,
    B,
    C,
    D,
}

impl Scenario {
    pub fn is_mixed(self) -> bool {
        matches!(self, Scenario::C | Scenario::D)
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Scenario::A),
            "b" => Ok(Scenario::B),
            "c" => Ok(Scenario::C),
            "d" => Ok(Scenario::D),
            other => Err(Error::Parse(format!("unknown scenario '{other}' (expected a, b, c or d)"))),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::A => "a",
            Scenario::B => "b",
            Scenario::C => "c",
            Scenario::D => "d",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    RandomGraph,
    Spiked,
}

impl std::str::FromStr for Design {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "randomgraph" | "graph" => Ok(Design::RandomGraph),
            "spiked" | "spike" => Ok(Design::Spiked),
            other => Err(Error::Parse(format!("unknown design '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub design: Design,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter(format!("n must be at least 2, got {}", self.n)));
        }
        if self.d < 2 {
            return Err(Error::Parameter(format!("d must be at least 2, got {}", self.d)));
        }
        if self.scenario.is_mixed() && self.d % 2 != 0 {
            return Err(Error::Parameter(format!(
                "scenario {} splits columns in half and needs an even d, got {}",
                self.scenario, self.d
            )));
        }
        if self.design == Design::Spiked && self.d < 20 {
            return Err(Error::Parameter(format!("the spiked design needs d >= 20, got {}", self.d)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioTruth {
    #[serde(skip)]
    pub sigma: DMatrix<f64>,
    #[serde(skip)]
    pub omega: DMatrix<f64>,
    pub edges: EdgeSet,
    pub v1: Option<Vec<f64>>,
    /// Latent-scale thresholds `C_j ~ Unif[−1, 1]`.
    pub cutoffs: Vec<f64>,
    pub seed: u64,
    pub design: Design,
    /// Off-diagonal magnitude of the unscaled precision matrix (graph design).
    pub t: Option<f64>,
}

impl ScenarioTruth {
    pub fn d(&self) -> usize {
        self.sigma.nrows()
    }

    /// Support of the leading eigenvector (spiked design).
    pub fn v1_support(&self) -> Option<Vec<usize>> {
        self.v1
            .as_ref()
            .map(|v| (0..v.len()).filter(|&i| v[i].abs() > crate::precision::NONZERO_TOL).collect())
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.d() as f64
    }
}

/// Seeded generator for stream `stream` of root seed `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const TRUTH_STREAM: u64 = 0;
const CUTOFF_STREAM: u64 = 1;
const SAMPLE_STREAM: u64 = 2;

/// Functional form of the edge probability in the distance between the two
/// node positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeExponent {
    /// `exp(−||z_j − z_k||² / (2 c1))`
    NegSquaredDistance,
    /// `exp(−||z_j − z_k|| / (2 c1))`
    NegDistance,
    /// `exp(+||z_j − z_k|| / (2 c1))`
    PosDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FloorScale {
    Rescaled,
    Unscaled,
}

#[derive(Debug, Clone, Copy)]
pub struct GraphConfig {
    pub c1: f64,
    pub exponent: EdgeExponent,
    /// Smallest eigenvalue of the precision matrix.
    pub eigen_floor: f64,
    /// Whether the floor applies to the returned precision matrix or to
    /// `I + tA` before rescaling.
    pub floor_scale: FloorScale,
    /// Redraws allowed when a draw has no edges.
    pub max_redraws: u64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            c1: 3.0,
            exponent: EdgeExponent::NegSquaredDistance,
            eigen_floor: 0.1,
            floor_scale: FloorScale::Unscaled,
            max_redraws: 100,
        }
    }
}

fn edge_probability(dist2: f64, cfg: &GraphConfig) -> f64 {
    let scale = (2.0 * std::f64::consts::PI).sqrt().recip();
    let e = match cfg.exponent {
        EdgeExponent::NegSquaredDistance => -dist2 / (2.0 * cfg.c1),
        EdgeExponent::NegDistance => -dist2.sqrt() / (2.0 * cfg.c1),
        EdgeExponent::PosDistance => dist2.sqrt() / (2.0 * cfg.c1),
    };
    (scale * e.exp()).min(1.0)
}

fn draw_cutoffs(d: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, CUTOFF_STREAM);
    (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Rescales a covariance to unit diagonal.
pub fn to_correlation(cov: &DMatrix<f64>) -> DMatrix<f64> {
    let d = cov.nrows();
    let s: Vec<f64> = (0..d).map(|i| cov[(i, i)].sqrt().recip()).collect();
    let mut out = DMatrix::from_fn(d, d, |i, j| cov[(i, j)] * s[i] * s[j]);
    for i in 0..d {
        out[(i, i)] = 1.0;
    }
    symmetrize(&out)
}

/// `Σ` and `Ω = Σ⁻¹` for off-diagonal value `t` on the edges of `adj`.
fn rescaled_pair(adj: &DMatrix<f64>, t: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let d = adj.nrows();
    let omega0 = DMatrix::<f64>::identity(d, d) + adj * t;
    let sigma = to_correlation(&spd_inverse(&omega0)?);
    let omega = symmetrize(&spd_inverse(&sigma)?);
    Ok((sigma, omega))
}

const FLOOR_TOL: f64 = 1e-7;

/// Largest `t` whose precision matrix keeps its smallest eigenvalue at the
/// configured floor.
fn calibrate_t(adj: &DMatrix<f64>, cfg: &GraphConfig) -> Result<(f64, DMatrix<f64>, DMatrix<f64>)> {
    // I + tA is PD exactly for t < 1 / −λmin(A)
    let t_pd = 1.0 / -min_eigenvalue(adj);
    if cfg.floor_scale == FloorScale::Unscaled {
        let t = (1.0 - cfg.eigen_floor) * t_pd;
        let (sigma, omega) = rescaled_pair(adj, t)?;
        return Ok((t, sigma, omega));
    }
    let floor = cfg.eigen_floor;
    let (mut lo, mut hi) = (0.0, t_pd * (1.0 - 1e-9));
    let (sigma_hi, omega_hi) = rescaled_pair(adj, hi)?;
    if min_eigenvalue(&omega_hi) >= floor {
        return Ok((hi, sigma_hi, omega_hi));
    }
    let mut best = rescaled_pair(adj, lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let pair = rescaled_pair(adj, mid)?;
        let m = min_eigenvalue(&pair.1);
        if m >= floor {
            lo = mid;
            best = pair;
            if m - floor <= FLOOR_TOL {
                break;
            }
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * t_pd {
            break;
        }
    }
    Ok((lo, best.0, best.1))
}

pub fn generate_random_graph_omega(d: usize, seed: u64) -> Result<ScenarioTruth> {
    generate_random_graph_omega_with(d, &GraphConfig::default(), seed)
}

/// Random geometric graph: node positions uniform on the unit square, each
/// pair joined with a distance-dependent probability, off-diagonal entries
/// `t` on edges. The inverse is rescaled to a correlation matrix, with `t`
/// the largest value keeping the smallest eigenvalue of the precision matrix
/// at `eigen_floor`.
pub fn generate_random_graph_omega_with(d: usize, cfg: &GraphConfig, seed: u64) -> Result<ScenarioTruth> {
    if d < 2 {
        return Err(Error::Parameter(format!("d must be at least 2, got {d}")));
    }
    if !(cfg.c1 > 0.0) {
        return Err(Error::Parameter(format!("c1 must be positive, got {}", cfg.c1)));
    }
    if !(cfg.eigen_floor > 0.0 && cfg.eigen_floor < 1.0) {
        return Err(Error::Parameter(format!("eigenvalue floor must lie in (0, 1), got {}", cfg.eigen_floor)));
    }
    for attempt in 0..=cfg.max_redraws {
        let draw_seed = seed.wrapping_add(attempt);
        let mut rng = rng_for(draw_seed, TRUTH_STREAM);
        let z: Vec<[f64; 2]> = (0..d).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        let mut adj = DMatrix::<f64>::zeros(d, d);
        let mut n_edges = 0;
        for j in 0..d {
            for k in j + 1..d {
                let dist2 = (z[j][0] - z[k][0]).powi(2) + (z[j][1] - z[k][1]).powi(2);
                if rng.random_bool(edge_probability(dist2, cfg)) {
                    adj[(j, k)] = 1.0;
                    adj[(k, j)] = 1.0;
                    n_edges += 1;
                }
            }
        }
        if n_edges == 0 {
            log::warn!("random graph draw with seed {draw_seed} has no edges; redrawing");
            continue;
        }
        let (t, sigma, omega) = calibrate_t(&adj, cfg)?;
        let edges = EdgeSet::from_matrix(&adj);
        return Ok(ScenarioTruth {
            sigma,
            omega,
            edges,
            v1: None,
            cutoffs: draw_cutoffs(d, seed),
            seed: draw_seed,
            design: Design::RandomGraph,
            t: Some(t),
        });
    }
    Err(Error::Degenerate(format!(
        "no random graph with edges after {} redraws",
        cfg.max_redraws
    )))
}

/// Spike strengths of the two planted components.
pub const SPIKES: [f64; 2] = [5.0, 4.0];

/// Two spikes on coordinates `0..10` and `10..20` over an identity
/// background, rescaled to unit diagonal. `seed` only drives the cutoffs.
pub fn generate_spiked_sigma(d: usize, seed: u64) -> Result<ScenarioTruth> {
    if d < 20 {
        return Err(Error::Parameter(format!("the spiked design needs d >= 20, got {d}")));
    }
    let mut cov = DMatrix::<f64>::identity(d, d);
    for (block, &w) in SPIKES.iter().enumerate() {
        let lo = 10 * block;
        // (ω − 1) u uᵀ with u = 1/√10 on the block
        let v = (w - 1.0) / 10.0;
        for i in lo..lo + 10 {
            for j in lo..lo + 10 {
                cov[(i, j)] += v;
            }
        }
    }
    let sigma = to_correlation(&cov);
    let omega = symmetrize(&spd_inverse(&sigma)?);
    let v1 = leading_eigenvector(&sigma)?;
    let v1: Vec<f64> = v1.iter().map(|&x| if x.abs() < 1e-12 { 0.0 } else { x }).collect();
    Ok(ScenarioTruth {
        edges: EdgeSet::from_matrix(&omega),
        sigma,
        omega,
        v1: Some(v1),
        cutoffs: draw_cutoffs(d, seed),
        seed,
        design: Design::Spiked,
        t: None,
    })
}

/// Truth for `spec.design`, drawn from `spec.seed`.
pub fn generate_truth(spec: &ScenarioSpec) -> Result<ScenarioTruth> {
    generate_truth_with(spec, &GraphConfig::default())
}

pub fn generate_truth_with(spec: &ScenarioSpec, graph: &GraphConfig) -> Result<ScenarioTruth> {
    spec.validate()?;
    match spec.design {
        Design::RandomGraph => generate_random_graph_omega_with(spec.d, graph, spec.seed),
        Design::Spiked => generate_spiked_sigma(spec.d, spec.seed),
    }
}

/// Number of latent scores per row replaced by ±5 in scenario (b).
pub const OUTLIERS_PER_ROW: usize = 5;
pub const OUTLIER_MAGNITUDE: f64 = 5.0;

#[derive(Debug, Clone)]
pub struct SimulatedSample {
    pub data: MixedDataset,
    /// The latent scores as an oracle observer would see them (`n × d`):
    /// after outlier replacement in (b), on the transformed scale in (d).
    pub latent: DMatrix<f64>,
}

pub fn sample_scenario(truth: &ScenarioTruth, spec: &ScenarioSpec) -> Result<MixedDataset> {
    Ok(sample_scenario_with_latent(truth, spec)?.data)
}

pub fn sample_scenario_with_latent(truth: &ScenarioTruth, spec: &ScenarioSpec) -> Result<SimulatedSample> {
    spec.validate()?;
    let d = truth.d();
    if spec.d != d || truth.cutoffs.len() != d {
        return Err(Error::Dimension(format!(
            "spec has d = {} but the truth has dimension {d}",
            spec.d
        )));
    }
    if spec.design != truth.design {
        return Err(Error::Parameter(format!(
            "spec design {:?} does not match truth design {:?}",
            spec.design, truth.design
        )));
    }
    let n = spec.n;
    let chol = nalgebra::Cholesky::new(truth.sigma.clone())
        .ok_or_else(|| Error::NotPsd {
            min_eigenvalue: min_eigenvalue(&truth.sigma),
        })?
        .unpack();
    let mut rng = rng_for(spec.seed, SAMPLE_STREAM);
    let g = DMatrix::<f64>::from_fn(d, n, |_, _| rng.sample(StandardNormal));
    // row i of z is the i-th latent draw
    let mut z = (&chol * g).transpose();

    if spec.scenario == Scenario::B {
        let m = OUTLIERS_PER_ROW.min(d);
        for i in 0..n {
            for j in sample_indices(&mut rng, d, m) {
                z[(i, j)] = if rng.random_bool(0.5) {
                    OUTLIER_MAGNITUDE
                } else {
                    -OUTLIER_MAGNITUDE
                };
            }
        }
    }

    let half = d / 2;
    let mut columns = Vec::with_capacity(d);
    let mut types = Vec::with_capacity(d);
    let mut latent = z.clone();
    for j in 0..d {
        let c = truth.cutoffs[j];
        let col = z.column(j);
        let continuous = spec.scenario.is_mixed() && j < half;
        let values: Vec<f64> = match (spec.scenario, continuous) {
            (Scenario::D, true) => col.iter().map(|&w| w.cbrt()).collect(),
            (Scenario::D, false) => col.iter().map(|&w| f64::from(w > c * c * c)).collect(),
            (_, true) => col.iter().copied().collect(),
            (_, false) => col.iter().map(|&w| f64::from(w > c)).collect(),
        };
        if spec.scenario == Scenario::D {
            latent.column_mut(j).apply(|w| *w = w.cbrt());
        }
        columns.push(values);
        types.push(if continuous {
            ColumnType::Continuous
        } else {
            ColumnType::Binary
        });
    }
    Ok(SimulatedSample {
        data: MixedDataset::from_columns(columns, types)?,
        latent,
    })
}

/// Leading eigenvector of the truth as a vector (spiked design).
pub fn truth_v1(truth: &ScenarioTruth) -> Result<DVector<f64>> {
    truth
        .v1
        .as_ref()
        .map(|v| DVector::from_column_slice(v))
        .ok_or_else(|| Error::Parameter("truth has no planted eigenvector".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sorted_eigen;

    #[test]
    fn graph_truth_invariants() {
        let truth = generate_random_graph_omega(30, 11).unwrap();
        for i in 0..30 {
            assert!((truth.sigma[(i, i)] - 1.0).abs() < 1e-12);
        }
        let adj = truth.edges.adjacency(30).unwrap().map(|b| if b { 1.0 } else { 0.0 });
        let omega0 = DMatrix::<f64>::identity(30, 30) + adj * truth.t.unwrap();
        assert!((min_eigenvalue(&omega0) - 0.1).abs() < 1e-9);
        let cfg = GraphConfig {
            floor_scale: FloorScale::Rescaled,
            ..GraphConfig::default()
        };
        let rescaled = generate_random_graph_omega_with(30, &cfg, 11).unwrap();
        let m = min_eigenvalue(&rescaled.omega);
        assert!((0.1..=0.1 + 1e-6).contains(&m), "{m}");
        let prod = &truth.sigma * &truth.omega;
        assert!((prod - DMatrix::<f64>::identity(30, 30)).abs().max() < 1e-9);
        assert_eq!(EdgeSet::from_matrix(&truth.omega), truth.edges);
        assert!(truth.cutoffs.iter().all(|c| (-1.0..=1.0).contains(c)));
    }

    #[test]
    fn spiked_truth_structure() {
        let truth = generate_spiked_sigma(50, 1).unwrap();
        let (vals, _) = sorted_eigen(&truth.sigma);
        assert!((vals[0] - 5.0 / 1.4).abs() < 1e-12);
        assert_eq!(truth.v1_support().unwrap(), (0..10).collect::<Vec<_>>());
        assert!(generate_spiked_sigma(19, 1).is_err());
    }

    #[test]
    fn reproducible() {
        let spec = ScenarioSpec {
            scenario: Scenario::B,
            n: 50,
            d: 20,
            seed: 3,
            design: Design::RandomGraph,
        };
        let truth = generate_truth(&spec).unwrap();
        let a = sample_scenario(&truth, &spec).unwrap().to_matrix();
        let b = sample_scenario(&truth, &spec).unwrap().to_matrix();
        assert_eq!(a, b);
    }

    #[test]
    fn outliers_touch_exactly_five_entries() {
        let mut spec = ScenarioSpec {
            scenario: Scenario::A,
            n: 40,
            d: 20,
            seed: 5,
            design: Design::RandomGraph,
        };
        let truth = generate_truth(&spec).unwrap();
        let clean = sample_scenario_with_latent(&truth, &spec).unwrap().latent;
        spec.scenario = Scenario::B;
        let dirty = sample_scenario_with_latent(&truth, &spec).unwrap().latent;
        for i in 0..40 {
            let changed = (0..20).filter(|&j| clean[(i, j)] != dirty[(i, j)]).count();
            assert_eq!(changed, 5);
        }
    }

    #[test]
    fn mixed_needs_even_d() {
        let spec = ScenarioSpec {
            scenario: Scenario::C,
            n: 10,
            d: 21,
            seed: 0,
            design: Design::RandomGraph,
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn mixed_column_layout() {
        let spec = ScenarioSpec {
            scenario: Scenario::D,
            n: 30,
            d: 10,
            seed: 2,
            design: Design::RandomGraph,
        };
        let truth = generate_truth(&spec).unwrap();
        let data = sample_scenario(&truth, &spec).unwrap();
        assert!(data.column_types()[..5].iter().all(|t| *t == ColumnType::Continuous));
        assert!(data.column_types()[5..].iter().all(|t| *t == ColumnType::Binary));
    }
}
