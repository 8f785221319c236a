//! Exact queue-length means and sojourn times of a two-queue system.
//!
//! ```bash
//! cargo run --example analyze
//! ```

use mginf_polling::analytic::{
    cycle_moments, exponential, polling_means, sojourn_lst, sojourn_mean, sojourn_phases,
};
use mginf_polling::{Distribution, QuadratureConfig, QueueSpec, Result, SystemSpec};

fn main() -> Result<()> {
    let exp = Distribution::exponential;
    let det = Distribution::deterministic;
    let sys = SystemSpec::new(vec![
        QueueSpec::new(0.8, exp(1.0)?, exp(1.0)?, det(0.25)?),
        QueueSpec::new(0.5, Distribution::erlang(2, 3.0)?, exp(1.5)?, det(0.25)?),
    ])?;
    let cfg = QuadratureConfig::default();

    let c = cycle_moments(&sys);
    println!("E[C] = {:.6}", c.mean);

    let means = polling_means(&sys, &cfg)?;
    for (i, d) in means.derived.iter().enumerate() {
        println!(
            "queue {}: p = {:.6}, E[Lambda(V)] = {:.6}, E[X] = {:?}",
            i + 1,
            d.completion_probability,
            d.mean_leftover,
            means.at_polling[i]
        );
    }

    for i in 0..sys.len() {
        let es = sojourn_mean(&sys, i, &cfg)?;
        println!("\nE[S_{}] = {es:.10}", i + 1);
        if let Some(closed) = exponential::sojourn_mean(&sys, i) {
            println!("  closed form  {closed:.10}");
        }
        let ph = sojourn_phases(&sys, i, &cfg)?;
        for (name, t) in [
            ("served on arrival", ph.served_on_arrival),
            ("missed on arrival", ph.missed_on_arrival),
            ("arrived elsewhere", ph.arrived_elsewhere),
        ] {
            println!("  {name:<18} P = {:.6}  E[S | case] = {:.6}", t.probability, t.conditional_mean);
        }
        for s in [0.1, 0.5, 1.0, 2.0] {
            println!("  E[exp(-{s} S)] = {:.8}", sojourn_lst(&sys, i, s, &cfg)?);
        }
    }
    Ok(())
}
