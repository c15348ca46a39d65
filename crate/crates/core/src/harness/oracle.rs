//! Brute-force crossing count on a uniform grid, kept separate from the
//! engine's adaptive isolation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::{angular_distance, UnitCirclePoint};
use crate::error::{Error, Result};
use crate::path::SymplecticPath;
use crate::symplectic::{complex_nullity, expm, structure, Mat, EIG_TOL};

const ORACLE_SEED: u64 = 0x0a_c1e5;
const ORACLE_AMPLITUDE: f64 = 0.05;
const ORACLE_CLEARANCE: f64 = 0.3;

fn det_real(m: &Mat, omega: Complex64) -> f64 {
    let dim = m.nrows();
    let mut a = m.map(|x| Complex64::new(x, 0.0));
    for i in 0..dim {
        a[(i, i)] -= omega;
    }
    (a.determinant() * omega.powi(-((dim / 2) as i32))).re
}

fn unit_angles(m: &Mat) -> Vec<f64> {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .filter(|z| (z.norm() - 1.0).abs() < 1e-6)
        .map(|z| z.arg().rem_euclid(2.0 * PI))
        .collect()
}

fn pick_omega(angle: f64, eigen: &[f64]) -> f64 {
    let clear = |x: f64| angular_distance(x, 0.0).min(angular_distance(x, PI));
    if clear(angle) >= ORACLE_CLEARANCE {
        return angle;
    }
    let others: Vec<f64> = eigen
        .iter()
        .copied()
        .filter(|&e| angular_distance(e, angle) > 1e-9)
        .collect();
    let (back, ahead) = if others.is_empty() {
        (PI, PI)
    } else {
        (
            others
                .iter()
                .map(|&e| (angle - e).rem_euclid(2.0 * PI))
                .fold(f64::INFINITY, f64::min),
            others
                .iter()
                .map(|&e| (e - angle).rem_euclid(2.0 * PI))
                .fold(f64::INFINITY, f64::min),
        )
    };
    let ends = [angle - back, angle + ahead];
    let score = |x: f64| {
        let mut s = clear(x);
        if !others.is_empty() {
            s = s.min(angular_distance(x, ends[0])).min(angular_distance(x, ends[1]));
        }
        s
    };
    let span = back + ahead;
    let mut best = angle;
    for frac in [0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875] {
        let x = angle - back + span * frac;
        if score(x) > score(best) {
            best = x;
        }
    }
    best
}

/// Signed crossing count of `D_ω` along a generically perturbed `γ∗ζ`,
/// sampled at `grid` uniform nodes. Requires `ν_ω(γ) = 0`.
pub fn oracle_index(gamma: &SymplecticPath, omega: &UnitCirclePoint, grid: usize) -> Result<i64> {
    if grid < 2 {
        return Err(Error::InvalidInput("oracle grid needs at least 2 nodes".into()));
    }
    let end = gamma.end();
    let nullity = complex_nullity(&end, omega.to_complex(), EIG_TOL);
    if nullity > 0 {
        return Err(Error::DegenerateEndpoint { nullity });
    }
    let target = pick_omega(omega.radians(), &unit_angles(&end));
    let w = Complex64::from_polar(1.0, target);
    let ext = gamma.extended()?;
    let n = gamma.n();
    let dim = 2 * n;
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let mut s = Mat::identity(dim, dim);
    for i in 0..dim {
        for k in i..dim {
            let v: f64 = rng.random_range(-0.3..=0.3);
            s[(i, k)] += v;
            if i != k {
                s[(k, i)] += v;
            }
        }
    }
    let x = structure(n) * s * (-ORACLE_AMPLITUDE);
    let duration = ext.duration();
    let matrix = |t: f64| ext.at(t) * expm(&(&x * (PI * t / duration).sin()));
    let f = |t: f64| det_real(&matrix(t), w);

    let h = 1e-6;
    let j = structure(n);
    let mut total = 0i64;
    let mut t_prev = 0.0;
    let mut f_prev = f(0.0);
    for k in 1..=grid {
        let t = duration * k as f64 / grid as f64;
        let fk = f(t);
        if (f_prev > 0.0) != (fk > 0.0) {
            let (mut a, mut b, mut fa) = (t_prev, t, f_prev);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if (fm > 0.0) == (fa > 0.0) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            let m = matrix(0.5 * (a + b));
            let up = det_real(&(&m * expm(&(&j * h))), w);
            let down = det_real(&(&m * expm(&(&j * -h))), w);
            let coorient = up - down;
            let travel = fk - f_prev;
            total += if (coorient > 0.0) == (travel > 0.0) { 1 } else { -1 };
        }
        t_prev = t;
        f_prev = fk;
    }
    Ok(total)
}
