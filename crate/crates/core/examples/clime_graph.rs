//! Column-wise l1 minimization for the precision matrix, followed by
//! symmetrization and hard thresholding.

use latent_copula::evaluate::edge_fpr_tpr;
use latent_copula::latent_corr::{estimate_latent_correlation, LatentCorrConfig};
use latent_copula::precision::{clime, clime_threshold, min_feasible_lambda};
use latent_copula::simgen::{generate_truth, sample_scenario, Design, Scenario, ScenarioSpec};
use latent_copula::Error;

fn main() -> latent_copula::Result<()> {
    let spec = ScenarioSpec {
        scenario: Scenario::C,
        n: 300,
        d: 16,
        seed: 5,
        design: Design::RandomGraph,
    };
    let truth = generate_truth(&spec)?;
    let data = sample_scenario(&truth, &spec)?;
    // the raw estimate is fine here; no projection needed
    let r = estimate_latent_correlation(&data, &LatentCorrConfig::default())?.r;

    for lambda in [0.3, 0.15, 0.08] {
        let est = match clime(&r, lambda) {
            Ok(e) => e,
            Err(Error::Infeasible { column, min_feasible, .. }) => {
                println!("lambda {lambda}: column {column} needs lambda >= {min_feasible:.4}");
                continue;
            }
            Err(e) => return Err(e),
        };
        let thr = clime_threshold(&est, 2.0 * lambda)?;
        let p = edge_fpr_tpr(&thr.edges(), &truth.edges, spec.d)?;
        println!(
            "lambda {lambda:.2}: {} raw edges, {} after thresholding, FPR {:.3} TPR {:.3}",
            est.edges().len(),
            thr.edges().len(),
            p.fpr,
            p.tpr
        );
    }
    println!("column 0 is feasible from lambda = {:.4}", min_feasible_lambda(&r, 0)?);
    Ok(())
}
