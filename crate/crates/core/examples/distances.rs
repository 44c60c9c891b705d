//! Symmetrized and Hausdorff distances, weak/strong interaction and a
//! weak-separation certificate.
//!
//! cargo run --example distances

use anderson_lab::geometry::{self, Configuration, Cube};

fn main() -> anderson_lab::Result<()> {
    let x = Configuration::line(&[0, 0, 10]);
    let y = Configuration::line(&[0, 10, 10]);
    let m = geometry::sym_match(&x, &y)?;
    println!("x = {:?}, y = {:?}", x.coords(), y.coords());
    println!("d_S = {} (permutation {:?})", m.distance, m.permutation);
    println!("d_H = {}", geometry::hausdorff_distance(&x, &y)?);

    for center in [[0, 1], [0, 30]] {
        let cube = Cube::new(Configuration::line(&center), 3);
        println!("cube at {center:?}, L = 3: {:?}", geometry::classify_wi_si(&cube));
    }

    let cx = Cube::new(Configuration::line(&[0, 0]), 2);
    let cy = Cube::new(Configuration::line(&[0, 40]), 2);
    match geometry::weakly_separated(&cx, &cy)? {
        Some(sep) => println!("weakly separated, Q = {:?}, counts {:?}", sep.q, sep.counts()),
        None => println!("no certificate"),
    }
    Ok(())
}
