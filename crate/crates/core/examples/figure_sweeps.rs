//! Mean sojourn time of an arbitrary customer against one moment of the
//! second queue's service or visit law. Writes one CSV per sweep.
//!
//! ```bash
//! cargo run --release --example figure_sweeps -- /tmp/sweeps
//! ```

use std::path::PathBuf;

use mginf_polling::config::ConfigFile;
use mginf_polling::sweep::{jump_at, run_sweep};
use mginf_polling::{QuadratureConfig, Result};

fn main() -> Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from);
    let configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["fig1_service_mean", "fig2_service_scv", "fig3_visit_mean", "fig4_visit_scv"] {
        let config = ConfigFile::load(configs.join(format!("{name}.json")))?;
        let sweep = config.sweep.as_ref().expect("sweep block");
        let table = run_sweep(&config.system, sweep, &QuadratureConfig::default())?;
        let (grid, es) = (table.grid(), table.weighted());
        let argmin = (0..es.len()).min_by(|&a, &b| es[a].total_cmp(&es[b])).unwrap_or(0);
        println!(
            "{name}: {} points, E[S] from {:.4} to {:.4}, minimum {:.4} at {:.3}",
            grid.len(),
            es[0],
            es[es.len() - 1],
            es[argmin],
            grid[argmin]
        );
        if name.ends_with("scv") {
            match jump_at(&grid, &es, 1.0, 3.0) {
                Some(k) => println!("  jump between scv {} and {}", grid[k], grid[k + 1]),
                None => println!("  no jump at scv = 1"),
            }
        }
        if let Some(dir) = &dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{name}.csv")), table.to_csv())?;
        }
    }
    Ok(())
}
