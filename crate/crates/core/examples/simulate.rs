//! The simulation oracle next to the exact results.
//!
//! ```bash
//! cargo run --release --example simulate
//! ```

use mginf_polling::analytic::{polling_means, sojourn_mean};
use mginf_polling::simulator::{run, SimConfig};
use mginf_polling::{Distribution, QuadratureConfig, QueueSpec, Result, SystemSpec};

fn main() -> Result<()> {
    let exp = Distribution::exponential;
    let det = Distribution::deterministic;
    let sys = SystemSpec::new(vec![
        QueueSpec::new(0.8, exp(1.0)?, exp(1.0)?, det(0.25)?),
        QueueSpec::new(0.5, exp(1.5)?, exp(1.5)?, det(0.25)?),
    ])?;
    let cfg = QuadratureConfig::default();
    let sim = SimConfig {
        master_seed: 42,
        ..SimConfig::default()
    };
    let started = std::time::Instant::now();
    let report = run(&sys, &sim)?;
    println!(
        "{} x {} cycles in {:.2?}\n",
        sim.replications,
        sim.measured_cycles,
        started.elapsed()
    );

    let means = polling_means(&sys, &cfg)?;
    println!("{:<10} {:>10} {:>10} {:>10}", "", "exact", "simulated", "stderr");
    let row = |name: String, exact: f64, e: mginf_polling::simulator::Estimate| {
        println!("{name:<10} {exact:>10.5} {:>10.5} {:>10.5}", e.mean, e.stderr);
    };
    for i in 0..2 {
        for j in 0..2 {
            row(format!("X_{}^{}", i + 1, j + 1), means.at_polling[i][j], report.polling_mean(i, j));
        }
    }
    for i in 0..2 {
        row(format!("S_{}", i + 1), sojourn_mean(&sys, i, &cfg)?, report.sojourn_mean(i));
        row(
            format!("p_{}", i + 1),
            means.derived[i].completion_probability,
            report.completion_fraction(i),
        );
    }
    println!("\nthroughput per cycle: {:.4}", report.throughput().mean);
    Ok(())
}
