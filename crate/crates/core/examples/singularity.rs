//! Scale parameters and the frequency of singular cubes.
//!
//! cargo run --release --example singularity

use anderson_lab::msa::{self, ScaleParams};
use anderson_lab::ModelSpec;

fn main() -> anderson_lab::Result<()> {
    let params = ScaleParams::default();
    let report = msa::validate_params(&params);
    println!("scales {:?}", params.scale_sequence(3));
    println!("masses {:?}, rates {:?}", report.masses, report.rates);
    for c in report.failures() {
        println!("  violated: {} ({})", c.name, c.detail);
    }
    let spec = ModelSpec::new(1, 1).with_coupling(50.0).with_window(50.0);
    let est = msa::estimate_singularity_prob(1, 0, 20.0, &params, &spec, 200, 5, Some(0.5))?;
    println!(
        "L = {}: {} of {} singular, p = {:.3} in [{:.3}, {:.3}], bound {:.3}",
        est.radius, est.singular, est.trials, est.p_hat, est.interval.0, est.interval.1, est.bound
    );
    Ok(())
}
