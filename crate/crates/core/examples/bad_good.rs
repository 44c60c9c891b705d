//! Bad/good classification of a big cube and the good-and-nonresonant
//! implies nonsingular check.
//!
//! cargo run --release --example bad_good

use anderson_lab::geometry::{Configuration, Cube};
use anderson_lab::msa::{self, badgood, ScaleParams};
use anderson_lab::{model, ModelSpec};

fn main() -> anderson_lab::Result<()> {
    let params = ScaleParams::default();
    let spec = ModelSpec::new(1, 1).with_coupling(50.0).with_window(50.0);
    let big = Cube::new(Configuration::line(&[0]), params.scale(1));
    let region = big.lattice_box().site_region();
    let (mut premises, mut violations) = (0, 0);
    for seed in 0..50 {
        let w = model::sample_disorder(region.iter().cloned(), seed, &spec)?;
        let bg = msa::classify_bad_good(&big, 20.0, &params, &w, &spec, Some(0.5))?;
        let s = badgood::good_nr_implies_ns(&big, 20.0, &params, &w, &spec, 0.5)?;
        if seed < 3 {
            println!("seed {seed}: good {}, {} of {} subcubes singular", bg.is_good(), bg.singular_subcubes, bg.subcubes);
        }
        premises += usize::from(s.premises());
        violations += usize::from(s.violated());
    }
    println!("{premises} of 50 samples good and nonresonant, {violations} singular among them");
    Ok(())
}
