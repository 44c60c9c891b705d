//! A weakly interactive cube splits into two clusters; without the cross
//! interaction the spectrum is the sum of the cluster spectra.
//!
//! cargo run --example wi_tensor

use anderson_lab::geometry::{self, Configuration, Cube};
use anderson_lab::msa;
use anderson_lab::{model, ModelSpec};

fn main() -> anderson_lab::Result<()> {
    let spec = ModelSpec::new(3, 1).with_coupling(5.0);
    let cube = Cube::new(Configuration::line(&[0, 1, 40]), 2);
    println!("{:?}", geometry::classify_wi_si(&cube));
    let w = model::sample_disorder(cube.lattice_box().site_region(), 3, &spec)?;
    let rep = msa::wi_tensor_check(&cube, &w, &spec)?;
    println!("clusters {:?} | {:?}, gap {}", rep.cluster, rep.rest, rep.gap);
    println!("cross norm {:.3e} <= bound {:.3e}: {}", rep.cross_norm, rep.bound, rep.within_bound());
    println!("eigenvalue sum error {:.1e}", rep.eigen_sum_error);
    Ok(())
}
