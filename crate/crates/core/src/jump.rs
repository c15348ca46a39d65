//! Index jumps, the common index jump search and the minimal-period
//! predicate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexEngine;
use crate::iteration::{mean_index, IndexSequence, MeanIndex};
use crate::path::SymplecticPath;

/// The open interval `(i(γ,m) + ν(γ,m) − 1, i(γ,m+2))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpInterval {
    pub m: u32,
    pub lo: i64,
    pub hi: i64,
}

impl JumpInterval {
    /// Whether the closed integer range `[a, b]` lies inside `(lo, hi)`.
    pub fn contains_closed(&self, a: i64, b: i64) -> bool {
        a <= b && self.lo < a && b < self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo + 1 >= self.hi
    }
}

pub fn jump_interval(seq: &mut IndexSequence<'_>, m: u32) -> Result<JumpInterval> {
    if m == 0 {
        return Err(Error::InvalidInput("iteration count must be positive".into()));
    }
    let at = seq.get(m)?;
    let hi = seq.index(m + 2)?;
    Ok(JumpInterval {
        m,
        lo: at.index + at.nullity as i64 - 1,
        hi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathHypotheses {
    pub mean_index: f64,
    pub initial_index: i64,
    pub initial_nullity: usize,
    pub plus_at_one: u32,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesesReport {
    pub n: usize,
    pub paths: Vec<PathHypotheses>,
    pub pass: bool,
}

impl HypothesesReport {
    pub fn first_failure(&self) -> Option<(usize, &PathHypotheses)> {
        self.paths.iter().enumerate().find(|(_, p)| !p.pass)
    }
}

/// `î(γⱼ) > 0` and `i(γⱼ, 1) ≥ n` for every path.
pub fn jump_hypotheses(engine: &IndexEngine, paths: &[SymplecticPath]) -> Result<HypothesesReport> {
    let (n, means) = prepare(engine, paths)?;
    let mut out = Vec::with_capacity(paths.len());
    for (p, mean) in paths.iter().zip(&means) {
        out.push(path_hypotheses(engine, p, mean, n)?);
    }
    let pass = out.iter().all(|p| p.pass);
    Ok(HypothesesReport { n, paths: out, pass })
}

fn prepare(engine: &IndexEngine, paths: &[SymplecticPath]) -> Result<(usize, Vec<MeanIndex>)> {
    let first = paths
        .first()
        .ok_or_else(|| Error::InvalidInput("empty path list".into()))?;
    let n = first.n();
    if let Some(p) = paths.iter().find(|p| p.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.n(),
        });
    }
    let means = paths
        .iter()
        .map(|p| mean_index(engine, p))
        .collect::<Result<Vec<_>>>()?;
    Ok((n, means))
}

fn path_hypotheses(
    engine: &IndexEngine,
    path: &SymplecticPath,
    mean: &MeanIndex,
    n: usize,
) -> Result<PathHypotheses> {
    let one = engine.index_pair(path, 1)?;
    let plus = crate::iteration::splitting_numbers(
        engine,
        &path.endpoint(),
        &crate::circle::UnitCirclePoint::one(),
        path,
    )?
    .0;
    let positive = match mean.ratio() {
        Some(r) => r > num_rational::Ratio::from_integer(0),
        None => mean.value > 0.0,
    };
    Ok(PathHypotheses {
        mean_index: mean.value,
        initial_index: one.index,
        initial_nullity: one.nullity,
        plus_at_one: plus,
        pass: positive && one.index >= n as i64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpTuple {
    #[serde(rename = "N")]
    pub n_value: u64,
    pub m: Vec<u32>,
    pub kappa1: i64,
    pub kappa2: i64,
    pub interval: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSearch {
    pub hypotheses: HypothesesReport,
    pub kappa1: i64,
    pub kappa2: i64,
    pub tuples: Vec<JumpTuple>,
}

/// Scans `N = 1..=n_max` for tuples `(N, m₁, …, m_q)` with
/// `[2N − κ₁, 2N + κ₂] ⊂ 𝒢_{2mⱼ−1}(γⱼ)` for every `j`, stopping after
/// `count` tuples.
pub fn search_common_jumps(
    engine: &IndexEngine,
    paths: &[SymplecticPath],
    n_max: u64,
    count: usize,
) -> Result<JumpSearch> {
    let (n, means) = prepare(engine, paths)?;
    let mut hyps = Vec::with_capacity(paths.len());
    for (p, mean) in paths.iter().zip(&means) {
        hyps.push(path_hypotheses(engine, p, mean, n)?);
    }
    let hypotheses = HypothesesReport {
        n,
        pass: hyps.iter().all(|p| p.pass),
        paths: hyps,
    };
    if let Some((index, h)) = hypotheses.first_failure() {
        return Err(Error::HypothesesFailed {
            index,
            mean_index: h.mean_index,
            initial_index: h.initial_index,
        });
    }
    let kappa1 = hypotheses
        .paths
        .iter()
        .map(|h| h.initial_index + 2 * i64::from(h.plus_at_one) - h.initial_nullity as i64)
        .min()
        .unwrap_or(0);
    let kappa2 = hypotheses
        .paths
        .iter()
        .map(|h| h.initial_index - 1)
        .min()
        .unwrap_or(0);

    let mut seqs: Vec<IndexSequence<'_>> =
        paths.iter().map(|p| IndexSequence::new(engine, p)).collect();
    let mut tuples = Vec::new();
    for big_n in 1..=n_max {
        if tuples.len() >= count {
            break;
        }
        let a = 2 * big_n as i64 - kappa1;
        let b = 2 * big_n as i64 + kappa2;
        if a > b {
            continue;
        }
        let mut ms = Vec::with_capacity(paths.len());
        for (seq, mean) in seqs.iter_mut().zip(&means) {
            match find_m(seq, mean.value, n, kappa1, kappa2, big_n, a, b)? {
                Some(m) => ms.push(m),
                None => break,
            }
        }
        if ms.len() == paths.len() {
            tuples.push(JumpTuple {
                n_value: big_n,
                m: ms,
                kappa1,
                kappa2,
                interval: (a, b),
            });
        }
    }
    if tuples.is_empty() {
        return Err(Error::NoneFoundWithinBound { n_max });
    }
    for t in &tuples {
        for (seq, &m) in seqs.iter_mut().zip(&t.m) {
            let at = seq.get(2 * m - 1)?;
            let hi = seq.index(2 * m + 1)?;
            let g = JumpInterval {
                m: 2 * m - 1,
                lo: at.index + at.nullity as i64 - 1,
                hi,
            };
            if !g.contains_closed(t.interval.0, t.interval.1) {
                return Err(Error::InvalidInput(format!(
                    "tuple N = {} failed re-verification for m = {m}",
                    t.n_value
                )));
            }
        }
    }
    Ok(JumpSearch {
        hypotheses,
        kappa1,
        kappa2,
        tuples,
    })
}

#[allow(clippy::too_many_arguments)]
fn find_m(
    seq: &mut IndexSequence<'_>,
    mean: f64,
    n: usize,
    kappa1: i64,
    kappa2: i64,
    big_n: u64,
    a: i64,
    b: i64,
) -> Result<Option<u32>> {
    let centre = big_n as f64 / mean;
    let radius = ((2 * n as i64 + kappa1.abs() + kappa2.abs()) as f64 / mean).ceil() as i64 + 2;
    let lo = ((centre.round() as i64) - radius).max(1);
    let hi = (centre.round() as i64) + radius;
    for m in lo..=hi {
        let m = m as u32;
        if jump_interval(seq, 2 * m - 1)?.contains_closed(a, b) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `i_m ≤ n + 1`, `i_1 ≥ n` and `ν_1 ≥ 1`: the iterate must be the path itself.
pub fn minimal_period_forced(i_m: i64, i_1: i64, nu_1: i64, n: usize) -> bool {
    let n = n as i64;
    i_m <= n + 1 && i_1 >= n && nu_1 >= 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn intervals() {
        let e = IndexEngine::default();
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        let mut seq = IndexSequence::new(&e, &full);
        for k in 1..=3i64 {
            let g = jump_interval(&mut seq, (2 * k - 1) as u32).unwrap();
            assert_eq!((g.lo, g.hi), (4 * k - 2, 4 * k + 1));
        }
        let hyp = SymplecticPath::hyperbolic(1, 1.0, 1.0);
        let mut seq = IndexSequence::new(&e, &hyp);
        let g = jump_interval(&mut seq, 2).unwrap();
        assert_eq!((g.lo, g.hi), (-1, 0));
        assert!(g.is_empty());
        let half = SymplecticPath::rotation(1, PI, 1.0);
        let mut seq = IndexSequence::new(&e, &half);
        let g = jump_interval(&mut seq, 1).unwrap();
        assert_eq!((g.lo, g.hi), (0, 3));
    }

    #[test]
    fn hypotheses() {
        let e = IndexEngine::default();
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        let three = SymplecticPath::rotation(1, 3.0 * PI, 1.0);
        let hyp = SymplecticPath::hyperbolic(1, 1.0, 1.0);
        assert!(jump_hypotheses(&e, std::slice::from_ref(&full)).unwrap().pass);
        assert!(!jump_hypotheses(&e, std::slice::from_ref(&hyp)).unwrap().pass);
        let r = jump_hypotheses(&e, &[full, three]).unwrap();
        assert!(r.pass);
        assert_eq!(r.paths[1].mean_index, 3.0);
    }

    #[test]
    fn search_full_rotation() {
        let e = IndexEngine::default();
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        let s = search_common_jumps(&e, std::slice::from_ref(&full), 12, usize::MAX).unwrap();
        assert_eq!((s.kappa1, s.kappa2), (1, 0));
        let got: Vec<(u64, Vec<u32>)> = s.tuples.iter().map(|t| (t.n_value, t.m.clone())).collect();
        let want: Vec<(u64, Vec<u32>)> = (1..=6).map(|m| (2 * m as u64, vec![m])).collect();
        assert_eq!(got, want);
        let twice = search_common_jumps(&e, &[full.clone(), full], 6, usize::MAX).unwrap();
        assert!(twice.tuples.iter().all(|t| t.m[0] == t.m[1]));
        let hyp = SymplecticPath::hyperbolic(1, 1.0, 1.0);
        assert!(matches!(
            search_common_jumps(&e, &[hyp], 10, 5),
            Err(Error::HypothesesFailed { .. })
        ));
    }

    #[test]
    fn period_predicate() {
        assert!(minimal_period_forced(2, 1, 2, 1));
        assert!(!minimal_period_forced(5, 1, 2, 1));
        assert!(!minimal_period_forced(2, 0, 2, 1));
    }
}
