//! Laws, their moments and transforms, and two-moment fitting.
//!
//! ```bash
//! cargo run --example distributions
//! ```

use mginf_polling::distributions::{expected_min, fit_two_moments, min_lst};
use mginf_polling::{Distribution, QuadratureConfig, Result};

fn main() -> Result<()> {
    let cfg = QuadratureConfig::default();
    let laws = [
        Distribution::exponential(1.5)?,
        Distribution::deterministic(0.25)?,
        Distribution::erlang(3, 4.0)?,
        Distribution::mixed_erlang(0.4, 3, 2.0)?,
        Distribution::hyperexponential(0.3, 0.8, 5.0)?,
        Distribution::discrete(vec![(0.4, 0.5), (1.0, 0.5)])?,
    ];
    println!("{:<34} {:>9} {:>9} {:>9} {:>10}", "law", "mean", "scv", "P[>1]", "lst(1)");
    for d in &laws {
        println!(
            "{:<34} {:>9.5} {:>9.5} {:>9.5} {:>10.6}",
            d.label(),
            d.mean(),
            d.scv()?,
            d.survival(1.0),
            d.lst(1.0)?
        );
    }

    // min(B, V) drives everything that happens within one visit.
    let b = &laws[2];
    let v = &laws[0];
    println!("\nB = {}, V = {}", b.label(), v.label());
    println!("E[min(B, V)]       = {:.10}", expected_min(b, v, &cfg)?);
    println!("E[exp(-min(B, V))] = {:.10}", min_lst(b, v, 1.0, &cfg)?);

    println!("\ntwo-moment fits with mean 2");
    for scv in [0.25, 0.4, 0.75, 1.0, 1.5, 3.0] {
        let f = fit_two_moments(2.0, scv)?;
        println!("  scv {scv:<5} -> {:<40} mean {:.12} scv {:.12}", f.label(), f.mean(), f.scv()?);
    }
    Ok(())
}
