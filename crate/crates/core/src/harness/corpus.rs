//! Seeded test corpus: random piecewise-constant systems plus the analytic
//! rotation, hyperbolic and direct-sum families.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::document::{BlockRecord, SystemDocument, SCHEMA_VERSION};
use crate::error::Result;
use crate::path::{HamiltonianKind, SymplecticPath};

/// Integration steps used for random corpus systems.
pub const CORPUS_STEPS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Random,
    /// `exp(2πp/q · tJ)` on `[0, 1]`.
    Rotation { p: i64, q: i64 },
    Hyperbolic,
    DirectSum,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub label: String,
    pub family: Family,
    pub path: SymplecticPath,
    /// Present for integrated systems; analytic paths are built directly.
    pub document: Option<SystemDocument>,
}

impl CorpusEntry {
    /// Every unit-circle eigenvalue of the endpoint has a rational angle.
    pub fn has_rational_spectrum(&self) -> bool {
        !matches!(self.family, Family::Random)
    }

    /// Same system with twice the samples: re-integrated at double the step
    /// count, or every mesh piece split for analytic paths.
    pub fn doubled(&self) -> Result<SymplecticPath> {
        match &self.document {
            Some(doc) => {
                let mut doc = doc.clone();
                doc.steps = Some(2 * doc.steps.unwrap_or(CORPUS_STEPS));
                doc.path()
            }
            None => Ok(self.path.doubled()),
        }
    }
}

fn rotation(p: i64, q: i64) -> CorpusEntry {
    let theta = TAU * p as f64 / q as f64;
    CorpusEntry {
        label: format!("rotation(2pi*{p}/{q})"),
        family: Family::Rotation { p, q },
        path: SymplecticPath::rotation(1, theta, 1.0),
        document: None,
    }
}

fn hyperbolic(n: usize, a: f64) -> CorpusEntry {
    CorpusEntry {
        label: format!("hyperbolic(n={n}, a={a})"),
        family: Family::Hyperbolic,
        path: SymplecticPath::hyperbolic(n, a, 1.0),
        document: None,
    }
}

fn direct_sum(a: &CorpusEntry, b: &CorpusEntry) -> CorpusEntry {
    CorpusEntry {
        label: format!("{} <> {}", a.label, b.label),
        family: Family::DirectSum,
        path: a.path.diamond(&b.path).expect("equal durations"),
        document: None,
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Rotations by `2πp/q` with `q ≤ 8` and `0 < p/q ≤ 2`.
pub fn rotation_family() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for q in 1..=8 {
        for p in 1..=2 * q {
            if gcd(p, q) == 1 {
                out.push(rotation(p, q));
            }
        }
    }
    out
}

fn hyperbolic_family() -> Vec<CorpusEntry> {
    vec![hyperbolic(1, 1.0), hyperbolic(1, 0.5), hyperbolic(2, 0.7)]
}

fn direct_sum_family() -> Vec<CorpusEntry> {
    let half = rotation(1, 2);
    let full = rotation(1, 1);
    let third = rotation(1, 3);
    let quarter = rotation(1, 4);
    let three_quarters = rotation(3, 4);
    let hyp = hyperbolic(1, 1.0);
    vec![
        direct_sum(&half, &hyp),
        direct_sum(&full, &third),
        direct_sum(&quarter, &three_quarters),
        direct_sum(&full, &hyp),
        direct_sum(&third, &third),
    ]
}

/// Rotations, hyperbolic paths and direct sums, interleaved so that any
/// prefix mixes the three kinds.
pub fn analytic_family() -> Vec<CorpusEntry> {
    let lists = [rotation_family(), hyperbolic_family(), direct_sum_family()];
    let longest = lists.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = Vec::new();
    for k in 0..longest {
        for list in &lists {
            if let Some(e) = list.get(k) {
                out.push(e.clone());
            }
        }
    }
    out
}

fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let v: f64 = rng.random_range(-2.0..=2.0);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// A random piecewise-constant system: `n ∈ {1, 2}`, 1 to 4 pieces, block
/// entries uniform in `[−2, 2]`, `τ ∈ [0.5, 2]`.
pub fn random_document(rng: &mut ChaCha8Rng, label: String) -> SystemDocument {
    let n = rng.random_range(1..=2usize);
    let tau: f64 = rng.random_range(0.5..=2.0);
    let pieces = rng.random_range(1..=4usize);
    let mut cuts: Vec<f64> = (0..pieces - 1)
        .map(|_| rng.random_range(0.1..0.9) * tau)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(tau);
    let blocks = cuts
        .into_iter()
        .map(|until| BlockRecord {
            until,
            matrix: random_symmetric(rng, 2 * n),
        })
        .collect();
    SystemDocument {
        schema_version: SCHEMA_VERSION.into(),
        n,
        tau,
        kind: HamiltonianKind::PiecewiseConstant,
        matrix: None,
        blocks,
        terms: Vec::new(),
        steps: Some(CORPUS_STEPS),
        label: Some(label),
    }
}

/// `size` entries: every fifth drawn from [`analytic_family`], the rest
/// random systems from a ChaCha stream seeded with `seed`.
pub fn corpus(size: usize, seed: u64) -> Result<Vec<CorpusEntry>> {
    let analytic = analytic_family();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(size);
    let mut next_analytic = 0;
    for k in 0..size {
        if k % 5 == 0 {
            out.push(analytic[next_analytic % analytic.len()].clone());
            next_analytic += 1;
        } else {
            let doc = random_document(&mut rng, format!("random[{seed}:{k}]"));
            let path = doc.path()?;
            out.push(CorpusEntry {
                label: doc.label.clone().unwrap_or_default(),
                family: Family::Random,
                path,
                document: Some(doc),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_mixed() {
        let a = corpus(20, 3).unwrap();
        let b = corpus(20, 3).unwrap();
        assert_eq!(a.len(), 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.path.end(), y.path.end());
        }
        assert_eq!(a.iter().filter(|e| e.family != Family::Random).count(), 4);
        assert!(a.iter().all(|e| e.path.n() <= 2));
    }

    #[test]
    fn rotation_family_size() {
        assert_eq!(rotation_family().len(), 44);
        assert!(analytic_family().len() > 44);
    }
}
