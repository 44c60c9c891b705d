//! Eigenfunction correlator decay in the symmetrized distance, including
//! the family where the Hausdorff distance stays zero.
//!
//! cargo run --release --example efc_decay

use anderson_lab::msa::efc::{self, DecayOptions};
use anderson_lab::ModelSpec;

fn main() -> anderson_lab::Result<()> {
    let opts = DecayOptions { trials: 40, seed: 9, gk_energies: 50, gk_quantile: 0.9 };

    let spec = ModelSpec::new(2, 1).with_coupling(50.0).with_window(100.0);
    let prof = efc::efc_decay_experiment(&spec, &efc::two_particle_family(&[2, 4, 6, 8])?, &opts)?;
    println!("two particles:");
    for r in &prof.rows {
        println!("  d_S {:>2}  d_H {:>2}  E = {:.3e} +- {:.1e}  gk {}", r.d_s, r.d_h, r.mean, r.stderr, r.gk_holds());
    }
    if let Some(f) = &prof.stretched {
        println!("  nu = {:.3}, kappa = {:.3}", f.nu, f.kappa);
    }

    let spec = ModelSpec::new(3, 1).with_coupling(50.0).with_window(150.0);
    let prof = efc::efc_decay_experiment(&spec, &efc::hausdorff_blind_family(&[1, 2, 3])?, &opts)?;
    println!("three particles, same sites:");
    for r in &prof.rows {
        println!("  d_S {:>2}  d_H {:>2}  E = {:.3e}", r.d_s, r.d_h, r.mean);
    }
    Ok(())
}
