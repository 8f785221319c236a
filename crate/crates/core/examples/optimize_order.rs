//! Visiting orders that maximize or minimize the services completed in one
//! cycle, checked against exhaustive search and simulation.
//!
//! ```bash
//! cargo run --release --example optimize_order
//! ```

use mginf_polling::optimizer::{
    brute_force_order, expected_throughput, one_based, optimal_order, Objective, TourState,
};
use mginf_polling::simulator::single_cycle_throughput;
use mginf_polling::{Distribution, QuadratureConfig, QueueSpec, Result, SystemSpec};

fn main() -> Result<()> {
    let exp = Distribution::exponential;
    let det = Distribution::deterministic;
    let sys = SystemSpec::new(vec![
        QueueSpec::new(0.5, exp(1.0)?, exp(1.0)?, det(0.5)?).with_central_point(det(0.3)?, det(0.3)?),
        QueueSpec::new(1.2, exp(2.0)?, exp(0.5)?, det(0.2)?).with_central_point(exp(2.0)?, det(0.2)?),
        QueueSpec::new(0.9, exp(3.0)?, det(1.0)?, det(0.1)?).with_central_point(det(0.1)?, exp(4.0)?),
    ])?;
    let cfg = QuadratureConfig::default();

    for state in [TourState::serial(vec![2, 0, 5]), TourState::central_point(vec![2, 0, 5])] {
        println!("{:?} mode, n = {:?}", state.mode, state.n);
        for objective in [Objective::Max, Objective::Min] {
            let best = optimal_order(&sys, &state, objective, &cfg)?;
            let brute = brute_force_order(&sys, &state, objective, &cfg)?;
            println!(
                "  {objective}: index rule {} E[theta] = {:.6}; exhaustive optimum {} (agrees: {})",
                one_based(&best.order),
                best.expected,
                one_based(&brute.best.order),
                brute.contains_optimum(&best.order)
            );
        }
    }

    println!("\nserial orders, formula against 20000 simulated cycles:");
    let state = TourState::serial(vec![2, 0, 5]);
    for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let exact = expected_throughput(&sys, &state, &order, &cfg)?.expected;
        let sim = single_cycle_throughput(&sys, &state, &order, 20_000, 1)?;
        println!("  {:<10} {exact:.4}  {:.4} +- {:.4}", one_based(&order), sim.mean, sim.stderr);
    }
    Ok(())
}
