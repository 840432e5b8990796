//! Replicated simulation benchmark printed as a mean(sd) table.
//!
//! cargo run --release --example benchmark_table -- a 200 50 20 lglasso,lgscad,naive

use latent_copula::bench::{run_bench, summarize, BenchConfig, BenchMethod};
use latent_copula::simgen::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let get = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let scenario: Scenario = get(0, "a").parse()?;
    let n: usize = get(1, "200").parse()?;
    let d: usize = get(2, "50").parse()?;
    let reps: usize = get(3, "5").parse()?;
    let methods = get(4, "lglasso,lgscad,naive")
        .split(',')
        .map(str::parse)
        .collect::<Result<Vec<BenchMethod>, _>>()?;

    let cfg = BenchConfig::new(scenario, n, d, reps, 2024, methods);
    let out = run_bench(&cfg)?;
    println!(
        "scenario {scenario}, n = {n}, d = {d}, {reps} replicates, true mean degree {:.2}",
        out.truth.mean_degree()
    );
    println!("{:<10} {:>14} {:>14} {:>14}", "method", "F", "S", "sin2");
    let show = |m: Option<latent_copula::bench::MeanSd>| m.map_or("-".to_string(), |v| v.to_string());
    for row in summarize(&out) {
        println!(
            "{:<10} {:>14} {:>14} {:>14}",
            row.method.to_string(),
            show(row.frobenius),
            show(row.spectral),
            show(row.sin2)
        );
    }
    Ok(())
}
