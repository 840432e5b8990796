//! Estimates the latent correlation of a half-binary, half-continuous
//! dataset and compares it with the truth and with Pearson's correlation.

use latent_copula::baseline::pearson_correlation;
use latent_copula::latent_corr::{estimate_cutoffs, estimate_latent_correlation, LatentCorrConfig};
use latent_copula::linalg::{max_abs, min_eigenvalue};
use latent_copula::simgen::{generate_truth, sample_scenario, Design, Scenario, ScenarioSpec};

fn main() -> latent_copula::Result<()> {
    let spec = ScenarioSpec {
        scenario: Scenario::D,
        n: 500,
        d: 20,
        seed: 3,
        design: Design::RandomGraph,
    };
    let truth = generate_truth(&spec)?;
    let data = sample_scenario(&truth, &spec)?;

    let cutoffs = estimate_cutoffs(&data, LatentCorrConfig::default().m_bound)?;
    let first_binary = spec.d / 2;
    println!(
        "cutoff of column {first_binary}: true {:.3}, estimated {:.3}",
        // binary columns threshold the cubed score
        truth.cutoffs[first_binary].powi(3),
        cutoffs.delta_hat[first_binary].unwrap()
    );

    let r = estimate_latent_correlation(&data, &LatentCorrConfig::default())?;
    let pearson = pearson_correlation(&data.to_matrix())?;
    println!("max error, rank-based latent estimate: {:.4}", max_abs(&(&r.r - &truth.sigma)));
    println!("max error, Pearson on observed data:   {:.4}", max_abs(&(&pearson - &truth.sigma)));
    println!("smallest eigenvalue of the estimate:   {:.4}", min_eigenvalue(&r.r));
    Ok(())
}
