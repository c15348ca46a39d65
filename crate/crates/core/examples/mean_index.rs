//! Mean index as an integral over the circle, next to its two witnesses.

use maslovkit::index::IndexEngine;
use maslovkit::iteration::{mean_index, MeanIndex};
use maslovkit::path::SymplecticPath;
use std::f64::consts::TAU;

pub fn run_example() -> Vec<MeanIndex> {
    let engine = IndexEngine::default();
    let paths = [
        ("quarter turn", SymplecticPath::rotation(1, TAU / 4.0, 1.0)),
        ("hyperbolic", SymplecticPath::hyperbolic(1, 1.0, 1.0)),
        ("1.3 turns", SymplecticPath::rotation(1, 1.3 * TAU, 1.0)),
    ];
    paths
        .iter()
        .map(|(name, p)| {
            let m = mean_index(&engine, p).unwrap();
            println!(
                "{name}: {:.6} (exact {:?}), i(64)/64 = {:.6}, grid average {:.6}",
                m.value, m.exact, m.by_iteration, m.by_average
            );
            m
        })
        .collect()
}

fn main() {
    run_example();
}
