//! ω-index of the rotation paths `t ↦ exp(θ t J)`, with the crossings the
//! scan found.

use maslovkit::circle::UnitCirclePoint;
use maslovkit::index::IndexEngine;
use maslovkit::path::SymplecticPath;
use std::f64::consts::PI;

/// `(θ, i_1)` for a few rotation angles.
pub fn run_example() -> Vec<(f64, i64)> {
    let engine = IndexEngine::default();
    let one = UnitCirclePoint::one();
    let mut out = Vec::new();
    for theta in [0.5 * PI, 1.5 * PI, 3.0 * PI, 4.5 * PI] {
        let path = SymplecticPath::rotation(1, theta, 1.0);
        let scan = engine.scan(&path, &one).expect("nondegenerate at 1");
        println!("theta = {theta:.4}: i_1 = {}", scan.index);
        for c in &scan.crossings {
            println!("    t = {:.6}  sign {:+}", c.time, c.sign);
        }
        out.push((theta, scan.index));
    }
    out
}

fn main() {
    run_example();
}
