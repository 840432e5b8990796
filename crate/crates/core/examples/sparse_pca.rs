//! Sparse leading eigenvector of the latent correlation of binary data:
//! convex relaxation for the start, truncated power iterations after.

use latent_copula::latent_corr::{estimate_latent_correlation, LatentCorrConfig};
use latent_copula::psd::{project_psd_maxnorm, PsdConfig};
use latent_copula::simgen::{generate_truth, sample_scenario, truth_v1, Design, Scenario, ScenarioSpec};
use latent_copula::spca::{default_relaxation_lambda, sin_angle, two_stage_spca};

fn main() -> latent_copula::Result<()> {
    let spec = ScenarioSpec {
        scenario: Scenario::A,
        n: 300,
        d: 40,
        seed: 8,
        design: Design::Spiked,
    };
    let truth = generate_truth(&spec)?;
    let v1 = truth_v1(&truth)?;

    // on the true correlation the support comes back exactly
    let exact = two_stage_spca(&truth.sigma, 10, 0.0)?;
    println!("noiseless support {:?}", exact.estimate.support);

    let data = sample_scenario(&truth, &spec)?;
    let r = estimate_latent_correlation(&data, &LatentCorrConfig::default())?;
    let rp = project_psd_maxnorm(&r, &PsdConfig::default())?.matrix.r;
    let lambda = default_relaxation_lambda(spec.d, spec.n);
    for k in [5, 10, 20] {
        let res = two_stage_spca(&rp, k, lambda)?;
        let s = sin_angle(&res.estimate.to_dvector(), &v1)?;
        println!(
            "k = {k:>2}: sin^2 = {:.4}, {} iterations, relaxation gap {:.1e}, support {:?}",
            s * s,
            res.estimate.iterations,
            res.relaxation.duality_gap,
            res.estimate.support
        );
    }
    Ok(())
}
