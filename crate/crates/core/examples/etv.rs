//! Energies where the boundary Green function is large sit next to
//! eigenvalues.
//!
//! cargo run --release --example etv

use anderson_lab::geometry::{Configuration, Cube};
use anderson_lab::msa::etv::{self, EtvScales};
use anderson_lab::msa::ScaleParams;
use anderson_lab::spectral::LocalOperator;
use anderson_lab::{model, ModelSpec};

fn main() -> anderson_lab::Result<()> {
    let params = ScaleParams { nu_star: 2.0, ..ScaleParams::default() };
    let spec = ModelSpec::new(1, 1).with_coupling(20.0).with_window(20.0);
    let nu = params.rate(1);
    let scales = EtvScales::new(nu, 8, params.kappa);
    println!("{scales:?}");

    let cube = Cube::new(Configuration::line(&[0]), 8);
    let w = model::sample_disorder(cube.lattice_box().site_region(), 1, &spec)?;
    let op = LocalOperator::new(cube, &w, &spec)?;
    let grid = etv::energy_grid(0.0, 20.0, scales.c);
    let v = etv::etv_energy_sweep(&op, &grid, scales.a, scales.c)?;
    println!("{} grid energies, {} above 2a, covered {}", v.grid_points, v.exceedances, v.covered);

    let exp = etv::etv_experiment(&spec, 8, nu, params.kappa, 100, 8)?;
    println!("{} of {} samples uncovered, budget {:.3}", exp.violations, exp.samples, exp.budget);
    Ok(())
}
