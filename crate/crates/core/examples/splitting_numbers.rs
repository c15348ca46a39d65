//! Splitting numbers of a few endpoints, read off the jumps of `ω ↦ i_ω`.

use maslovkit::index::IndexEngine;
use maslovkit::iteration::{splitting_table, SplittingData};
use maslovkit::path::SymplecticPath;
use std::f64::consts::TAU;

pub fn run_example() -> Vec<(String, SplittingData)> {
    let engine = IndexEngine::default();
    let third = SymplecticPath::rotation(1, TAU / 3.0, 1.0);
    let paths = [
        ("identity", SymplecticPath::identity(1, 1.0)),
        ("third turn", third.clone()),
        ("third + hyperbolic", third.diamond(&SymplecticPath::hyperbolic(1, 0.5, 1.0)).unwrap()),
    ];
    let mut out = Vec::new();
    for (name, p) in paths {
        let table = splitting_table(&engine, &p.endpoint(), &p).unwrap();
        println!("{name}:");
        for e in &table.entries {
            println!("    {}: S+ = {}, S- = {}", e.point(), e.plus, e.minus);
        }
        out.push((name.to_string(), table));
    }
    out
}

fn main() {
    run_example();
}
