//! ROC curves over a lambda path for the latent estimate and for glasso on
//! the sample covariance of the raw binary data.

use latent_copula::baseline::sample_covariance;
use latent_copula::evaluate::{graph_roc, tpr_at_fpr};
use latent_copula::latent_corr::{estimate_latent_correlation, LatentCorrConfig};
use latent_copula::precision::{lambda_path, Method};
use latent_copula::psd::{project_psd_maxnorm, PsdConfig};
use latent_copula::simgen::{generate_truth, sample_scenario, Design, Scenario, ScenarioSpec};

fn main() -> latent_copula::Result<()> {
    let spec = ScenarioSpec {
        scenario: Scenario::B,
        n: 300,
        d: 30,
        seed: 21,
        design: Design::RandomGraph,
    };
    let truth = generate_truth(&spec)?;
    let data = sample_scenario(&truth, &spec)?;

    let r = estimate_latent_correlation(&data, &LatentCorrConfig::default())?;
    let latent = project_psd_maxnorm(&r, &PsdConfig::default())?.matrix.r;
    let naive = sample_covariance(&data.to_matrix())?;

    println!("{:>6} {:>8} {:>8}", "FPR", "latent", "naive");
    let curves: Vec<_> = [latent, naive]
        .iter()
        .map(|m| graph_roc(&lambda_path(m, 40, Method::Glasso)?, &truth.edges, spec.d))
        .collect::<latent_copula::Result<_>>()?;
    for fpr in [0.02, 0.05, 0.1, 0.2, 0.3, 0.5] {
        println!("{fpr:>6.2} {:>8.3} {:>8.3}", tpr_at_fpr(&curves[0], fpr), tpr_at_fpr(&curves[1], fpr));
    }
    Ok(())
}
