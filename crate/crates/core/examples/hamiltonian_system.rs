//! Fundamental solution of a time-periodic linear Hamiltonian system and
//! the index of a few of its iterates.

use maslovkit::circle::UnitCirclePoint;
use maslovkit::index::IndexEngine;
use maslovkit::path::{integrate, HamiltonianData, HamiltonianDescriptor, TrigTerm};
use maslovkit::symplectic::{spectrum_on_unit_circle, Mat, EIG_TOL};

/// `(m, i(γ, m), ν(γ, m))` for `B(t) = I + 0.4 cos(2πt) diag(1, −1)`.
pub fn run_example() -> Vec<(u32, i64, usize)> {
    let data = HamiltonianData::TrigPolynomial {
        terms: vec![
            TrigTerm {
                frequency: 0,
                cos: Mat::identity(2, 2),
                sin: Mat::zeros(2, 2),
            },
            TrigTerm {
                frequency: 1,
                cos: Mat::from_row_slice(2, 2, &[0.4, 0.0, 0.0, -0.4]),
                sin: Mat::zeros(2, 2),
            },
        ],
    };
    let desc = HamiltonianDescriptor::new(1, 1.0, data).unwrap();
    let path = integrate(&desc, 64).unwrap();
    let spectrum = spectrum_on_unit_circle(&path.endpoint(), EIG_TOL);
    println!("monodromy eigenvalues on U: {:?}", spectrum.angles().iter().map(|a| a.to_string()).collect::<Vec<_>>());
    let engine = IndexEngine::default();
    let mut out = Vec::new();
    for m in 1..=4 {
        let p = engine.omega_index(&path.iterate(m), &UnitCirclePoint::one()).unwrap();
        println!("m = {m}: i = {}, nu = {}", p.index, p.nullity);
        out.push((m, p.index, p.nullity));
    }
    out
}

fn main() {
    run_example();
}
