//! Load a JSON config, run it, then summarize the result file.
//!
//! cargo run --release --example harness -- configs/wegner1.json

use std::path::PathBuf;

use anderson_lab::harness::{self, ExperimentConfig};

fn main() -> anderson_lab::Result<()> {
    let path = std::env::args().nth(1).map_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/wegner1.json")), PathBuf::from);
    let mut cfg = ExperimentConfig::load(&path)?;
    let dir = std::env::temp_dir().join("anderson-lab-example");
    cfg.output = dir.join("result.csv");
    println!("{} config, hash {}", cfg.experiment.tag(), cfg.hash()?);
    let rec = harness::run(&cfg)?;
    println!("wrote {} ({} rows, content id {})", cfg.output.display(), rec.rows.len(), rec.content_id);
    let rep = harness::report(&[cfg.output.clone()], Some(&dir.join("report")))?;
    print!("{}", rep.table());
    Ok(())
}
