//! Index of an iterate against the sum over roots of unity.

use maslovkit::circle::UnitCirclePoint;
use maslovkit::index::{IndexEngine, IndexPair};
use maslovkit::iteration::bott_sum;
use maslovkit::path::SymplecticPath;
use std::f64::consts::TAU;

/// `(m, direct, sum)` at `z = 1` for a rotation by a third of a turn.
pub fn run_example() -> Vec<(u32, IndexPair, IndexPair)> {
    let engine = IndexEngine::default();
    let path = SymplecticPath::rotation(1, TAU / 3.0, 1.0);
    let z = UnitCirclePoint::one();
    (1..=6)
        .map(|m| {
            let direct = engine.omega_index(&path.iterate(m), &z).unwrap();
            let sum = bott_sum(&engine, &path, m, &z).unwrap();
            println!("m = {m}: direct {direct:?}  sum {sum:?}");
            (m, direct, sum)
        })
        .collect()
}

fn main() {
    run_example();
}
