//! Decay of a dominated function on a graph from its regular points.
//!
//! cargo run --example dominated

use anderson_lab::msa::dominated::{self, AnnuliCover};
use anderson_lab::rng;

fn main() -> anderson_lab::Result<()> {
    let mut r = rng::trial_rng(1);
    let (mut tried, mut shown) = (0, 0);
    while shown < 5 {
        tried += 1;
        let gf = dominated::random_instance(&mut r);
        if !gf.check_domination()?.dominated {
            continue;
        }
        let b = dominated::dominated_bound(&gf, &AnnuliCover::minimal(&gf))?;
        println!("{} vertices: bound holds {} ({:?})", gf.graph.len(), b.holds(), b);
        shown += 1;
    }
    println!("{tried} instances drawn");
    Ok(())
}
