//! The full turn `exp(2π t J)` ends at the identity, so its index at 1 goes
//! through the rotated ladder and the neighbour check.

use maslovkit::circle::UnitCirclePoint;
use maslovkit::index::{IndexEngine, IndexOutcome};
use maslovkit::path::SymplecticPath;
use std::f64::consts::TAU;

pub fn run_example() -> IndexOutcome {
    let engine = IndexEngine::default();
    let path = SymplecticPath::rotation(1, TAU, 1.0);
    let out = engine
        .omega_index_detailed(&path, &UnitCirclePoint::one())
        .expect("ladder settles");
    println!("(i, nu) = ({}, {})", out.pair.index, out.pair.nullity);
    if let Some(d) = &out.degenerate {
        for (s, v) in &d.ladder {
            println!("    s = {s:.2e}: {v}");
        }
        println!(
            "{} rungs, {} neighbours, smallest neighbour index {:?}",
            d.rungs_used, d.neighbors_checked, d.neighbor_min
        );
    }
    out
}

fn main() {
    run_example();
}
