//! One- and two-volume eigenvalue concentration.
//!
//! cargo run --release --example wegner

use anderson_lab::geometry::{Configuration, Cube};
use anderson_lab::{evc, stats, ModelSpec};

fn main() -> anderson_lab::Result<()> {
    let grid = stats::log_grid(1e-4, 1.0, 41);

    let cube = Cube::new(Configuration::line(&[0]), 8);
    let one = evc::wegner_one_volume(&cube, 0.5, &ModelSpec::new(1, 1), &grid, 2000, 3)?;
    if let Some(f) = &one.fit {
        println!("one volume: theta = {:.3} +- {:.3}", f.slope, f.half_width);
    }

    let cx = Cube::new(Configuration::line(&[0, 0]), 4);
    let cy = Cube::new(Configuration::line(&[0, 40]), 4);
    let two = evc::wegner_two_volume(&cx, &cy, &ModelSpec::new(2, 1), &grid, 1000, 4)?;
    if let Some(f) = &two.fit {
        println!("two volumes: theta = {:.3} +- {:.3}", f.slope, f.half_width);
    }
    println!("max p(s) / s^(2/3) = {:.3}", two.max_ratio(2.0 / 3.0));
    for row in two.rows().iter().step_by(8) {
        println!("  {}", row.join(", "));
    }
    Ok(())
}
