//! Joint generating function of the queue lengths at polling instants, for
//! deterministic and discrete visit times.
//!
//! ```bash
//! cargo run --release --example generating_function
//! ```

use mginf_polling::analytic::{pgf_eval, polling_means};
use mginf_polling::simulator::{run, SimConfig};
use mginf_polling::{Distribution, QuadratureConfig, QueueSpec, Result, SystemSpec};

fn main() -> Result<()> {
    let sys = SystemSpec::new(vec![
        QueueSpec::new(
            0.8,
            Distribution::exponential(1.0)?,
            Distribution::deterministic(1.0)?,
            Distribution::deterministic(0.25)?,
        ),
        QueueSpec::new(
            0.5,
            Distribution::erlang(2, 3.0)?,
            Distribution::discrete(vec![(0.4, 0.5), (1.0, 0.5)])?,
            Distribution::deterministic(0.25)?,
        ),
    ])?;
    let cfg = QuadratureConfig::default();
    let means = polling_means(&sys, &cfg)?;

    let sim = run(
        &sys,
        &SimConfig {
            measured_cycles: 20_000,
            pgf_probe: Some(vec![0.5, 0.5]),
            ..SimConfig::default()
        },
    )?;

    for i in 0..sys.len() {
        println!("queue {} polled", i + 1);
        for z in [[1.0, 1.0], [0.9, 0.9], [0.5, 0.5], [0.5, 1.0], [0.0, 0.0]] {
            println!("  G({:?}) = {:.10}", z, pgf_eval(&sys, i, &z, &cfg)?);
        }
        let h = 1e-5;
        for j in 0..sys.len() {
            let at = |t: f64| {
                let mut z = vec![1.0; sys.len()];
                z[j] = 1.0 - t;
                pgf_eval(&sys, i, &z, &cfg)
            };
            let slope = (3.0 * at(0.0)? - 4.0 * at(h)? + at(2.0 * h)?) / (2.0 * h);
            println!("  dG/dz_{} at 1 = {slope:.6}, E[X] = {:.6}", j + 1, means.at_polling[i][j]);
        }
        let e = sim.pgf(i);
        println!("  simulated G(0.5, 0.5) = {:.6} +- {:.6}", e.mean, e.stderr);
    }
    Ok(())
}
