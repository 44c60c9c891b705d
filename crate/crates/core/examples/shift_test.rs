//! Shifting the disorder on a separating set by c moves every eigenvalue
//! of a cube by n g c.
//!
//! cargo run --example shift_test

use anderson_lab::{evc, ModelSpec};

fn main() -> anderson_lab::Result<()> {
    let spec = ModelSpec::new(1, 1).with_coupling(1.5);
    let checks = evc::shift_test_batch(&spec, 3, 4, 20, 0.37, 11)?;
    for c in checks.iter().take(5) {
        println!("n_x = {}, n_y = {}, residual {:.1e}", c.n_x, c.n_y, c.residual);
    }
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    println!("{} pairs, worst residual {worst:.1e}", checks.len());
    Ok(())
}
