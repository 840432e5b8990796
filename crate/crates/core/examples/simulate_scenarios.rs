//! Draws a truth and one dataset per observation scenario.

use latent_copula::latent_corr::ColumnType;
use latent_copula::simgen::{generate_truth, sample_scenario_with_latent, Design, Scenario, ScenarioSpec};

fn main() -> latent_copula::Result<()> {
    for scenario in [Scenario::A, Scenario::B, Scenario::C, Scenario::D] {
        let spec = ScenarioSpec {
            scenario,
            n: 200,
            d: 50,
            seed: 2024,
            design: Design::RandomGraph,
        };
        let truth = generate_truth(&spec)?;
        let sample = sample_scenario_with_latent(&truth, &spec)?;
        let binary = sample.data.column_types().iter().filter(|&&t| t == ColumnType::Binary).count();
        let ones: f64 = (0..spec.d)
            .filter(|&j| sample.data.column_types()[j] == ColumnType::Binary)
            .map(|j| sample.data.column(j).iter().sum::<f64>())
            .sum();
        println!(
            "scenario {scenario}: {} edges (t = {:.4}), {binary} binary columns, share of ones {:.3}",
            truth.edges.len(),
            truth.t.unwrap_or(f64::NAN),
            ones / (binary * spec.n) as f64
        );
    }
    Ok(())
}
