//! Iterated indices from the splitting numbers of the endpoint, checked
//! against direct computation.

use maslovkit::index::IndexEngine;
use maslovkit::iteration::{splitting_table, precise_index, IndexSequence};
use maslovkit::path::SymplecticPath;
use std::f64::consts::TAU;

/// `(m, formula, direct)` for `exp(2π t J) ⋄ exp(2π/3 t J)`.
pub fn run_example() -> Vec<(u32, i64, i64)> {
    let engine = IndexEngine::default();
    let full = SymplecticPath::rotation(1, TAU, 1.0);
    let third = SymplecticPath::rotation(1, TAU / 3.0, 1.0);
    let path = full.diamond(&third).unwrap();
    let table = splitting_table(&engine, &path.endpoint(), &path).unwrap();
    let mut seq = IndexSequence::new(&engine, &path);
    let i1 = seq.index(1).unwrap();
    (1..=8)
        .map(|m| {
            let formula = precise_index(i1, &table, m).unwrap();
            let direct = seq.index(m).unwrap();
            println!("m = {m}: formula {formula}, direct {direct}");
            (m, formula, direct)
        })
        .collect()
}

fn main() {
    run_example();
}
