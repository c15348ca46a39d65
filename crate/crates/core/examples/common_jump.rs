//! Common index jump tuples shared by one full turn and a turn and a
//! quarter.

use maslovkit::index::IndexEngine;
use maslovkit::jump::{search_common_jumps, JumpSearch};
use maslovkit::path::SymplecticPath;
use std::f64::consts::TAU;

pub fn run_example() -> JumpSearch {
    let engine = IndexEngine::default();
    let paths = [
        SymplecticPath::rotation(1, TAU, 1.0),
        SymplecticPath::rotation(1, 1.25 * TAU, 1.0),
    ];
    let search = search_common_jumps(&engine, &paths, 20, 5).unwrap();
    println!("kappa = ({}, {})", search.kappa1, search.kappa2);
    for t in &search.tuples {
        println!("N = {:3}  m = {:?}", t.n_value, t.m);
    }
    search
}

fn main() {
    run_example();
}
