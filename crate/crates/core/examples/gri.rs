//! Measure the geometric resolvent inequality constant and the
//! center-to-boundary decay of a cube.
//!
//! cargo run --release --example gri

use anderson_lab::geometry::{Configuration, Cube};
use anderson_lab::spectral::{self, LocalOperator};
use anderson_lab::{model, ModelSpec};

fn main() -> anderson_lab::Result<()> {
    let spec = ModelSpec::new(1, 1).with_coupling(50.0).with_window(50.0);
    let u = Configuration::line(&[0]);
    let outer = Cube::new(u.clone(), 8);
    let w = model::sample_disorder(outer.lattice_box().site_region(), 2, &spec)?;
    let inner = LocalOperator::new(Cube::new(u, 4), &w, &spec)?;
    let outer = LocalOperator::new(outer, &w, &spec)?;
    let m = spectral::gri_verify(&inner, &outer, 20.0)?;
    println!("C = {:.4} over {} pairs", m.constant, m.pairs);
    println!("dnorm(inner) = {:.3e}", spectral::dnorm(&inner, 20.0)?);
    println!("dnorm(outer) = {:.3e}", spectral::dnorm(&outer, 20.0)?);
    Ok(())
}
