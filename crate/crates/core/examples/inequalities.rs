//! The three iteration inequalities for the full turn, tight at `m = 3`.

use maslovkit::index::IndexEngine;
use maslovkit::iteration::{check_inequalities, mean_index, IndexSequence, InequalityReport};
use maslovkit::path::SymplecticPath;
use std::f64::consts::TAU;

pub fn run_example() -> Vec<InequalityReport> {
    let engine = IndexEngine::default();
    let path = SymplecticPath::rotation(1, TAU, 1.0);
    let mean = mean_index(&engine, &path).unwrap();
    let mut seq = IndexSequence::new(&engine, &path);
    (1..=5)
        .map(|m| {
            let r = check_inequalities(&mut seq, &mean, m).unwrap();
            let e = &r.mean_estimate;
            println!(
                "m = {m}: {} <= {} <= {}   initial {}   successive {}",
                e.lower, e.value, e.upper, r.initial_estimate.pass, r.successive_estimate.pass
            );
            r
        })
        .collect()
}

fn main() {
    run_example();
}
