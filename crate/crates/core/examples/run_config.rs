//! Run `verify` programmatically on one of the bundled configurations.

use std::path::Path;

use gradbound::cli::{cmd_verify, ExperimentConfig};

fn main() -> gradbound::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/verify.json");
    let mut config = ExperimentConfig::load(&path)?;
    config.output_dir = std::env::temp_dir().join("gradbound-example");
    let outcome = cmd_verify(&config)?;
    println!("{outcome:?}; results in {}", config.output_dir.display());
    Ok(())
}
