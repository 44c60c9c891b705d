//! Assemble the finite-volume Hamiltonian for two particles and look at
//! its lowest eigenvalues.
//!
//! cargo run --example hamiltonian

use anderson_lab::geometry::{Configuration, Cube};
use anderson_lab::{model, spectral, ModelSpec};

fn main() -> anderson_lab::Result<()> {
    let spec = ModelSpec::new(2, 1).with_coupling(2.0).with_interaction(1.0, 0.5);
    let cube = Cube::new(Configuration::line(&[0, 3]), 4);
    let w = model::sample_disorder(cube.lattice_box().site_region(), 42, &spec)?;
    let h = model::assemble_hamiltonian(&cube, &w, &spec)?;
    println!("dimension {}", h.dim());
    let sp = spectral::eigensolve(&h);
    let (res, orth) = sp.residuals(h.matrix());
    println!("lowest eigenvalues {:?}", &sp.eigenvalues()[..5]);
    println!("residual {res:.1e}, orthogonality {orth:.1e}");
    println!("U(1) = {:.4}, U(5) = {:.4}", model::pair_interaction(1, &spec), model::pair_interaction(5, &spec));
    Ok(())
}
