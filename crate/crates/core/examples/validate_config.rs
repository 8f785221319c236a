//! Loads a config file and runs the validation table on it.
//!
//! ```bash
//! cargo run --release --example validate_config -- crates/core/configs/base.json
//! ```

use std::path::PathBuf;

use mginf_polling::commands::{format_checks, validation_checks};
use mginf_polling::config::ConfigFile;
use mginf_polling::Result;

fn main() -> Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/base.json")
    });
    let config = ConfigFile::load(&path)?;
    let mut sim = config.sim.clone();
    sim.measured_cycles = sim.measured_cycles.min(20_000);
    let checks = validation_checks(&config.system, &sim, 1.0)?;
    print!("{}", format_checks(&checks));
    Ok(())
}
