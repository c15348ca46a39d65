//! Iteration calculus: Bott-type sums over roots of unity, the mean index,
//! splitting numbers, the precise iteration formula and the iteration
//! inequalities.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{AngleRecord, Turns, UnitCirclePoint};
use crate::error::{Error, Result};
use crate::index::{IndexEngine, IndexPair};
use crate::path::SymplecticPath;
use crate::symplectic::{spectrum_on_unit_circle, SymplecticMatrix};

/// `(Σ_{ωᵐ=z} i_ω(γ), Σ_{ωᵐ=z} ν_ω(γ))`.
pub fn bott_sum(
    engine: &IndexEngine,
    gamma: &SymplecticPath,
    m: u32,
    z: &UnitCirclePoint,
) -> Result<IndexPair> {
    if m == 0 {
        return Err(Error::InvalidInput("iteration count must be positive".into()));
    }
    let mut index = 0;
    let mut nullity = 0;
    for omega in z.roots(m) {
        let pair = engine.omega_index(gamma, &omega)?;
        index += pair.index;
        nullity += pair.nullity;
    }
    Ok(IndexPair::new(index, nullity))
}

/// Memoized `m ↦ (i(γ, m), ν(γ, m))`.
pub struct IndexSequence<'a> {
    engine: &'a IndexEngine,
    path: &'a SymplecticPath,
    cache: BTreeMap<u32, IndexPair>,
}

impl<'a> IndexSequence<'a> {
    pub fn new(engine: &'a IndexEngine, path: &'a SymplecticPath) -> Self {
        Self {
            engine,
            path,
            cache: BTreeMap::new(),
        }
    }

    pub fn path(&self) -> &SymplecticPath {
        self.path
    }

    pub fn engine(&self) -> &IndexEngine {
        self.engine
    }

    pub fn get(&mut self, m: u32) -> Result<IndexPair> {
        if let Some(p) = self.cache.get(&m) {
            return Ok(*p);
        }
        let p = self.engine.index_pair(self.path, m)?;
        self.cache.insert(m, p);
        Ok(p)
    }

    pub fn index(&mut self, m: u32) -> Result<i64> {
        self.get(m).map(|p| p.index)
    }

    pub fn nullity(&mut self, m: u32) -> Result<usize> {
        self.get(m).map(|p| p.nullity)
    }

    /// Values computed so far, in increasing `m`.
    pub fn known(&self) -> Vec<(u32, IndexPair)> {
        self.cache.iter().map(|(m, p)| (*m, *p)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanIndex {
    pub value: f64,
    /// Exact value when every unit-circle eigenvalue has a rational angle.
    pub exact: Option<String>,
    /// `i(γ, M)/M`.
    pub by_iteration: f64,
    /// Average of `i_ω` over a uniform angle grid.
    pub by_average: f64,
    #[serde(skip)]
    ratio: Option<Turns>,
}

impl MeanIndex {
    pub fn ratio(&self) -> Option<Turns> {
        self.ratio
    }
}

/// Iteration count for the `i(γ, M)/M` witness.
pub const MEAN_INDEX_ITERATIONS: u32 = 64;
/// Grid size for the averaged witness.
pub const MEAN_INDEX_GRID: usize = 256;

/// `î(γ)`: integral of `ω ↦ i_ω(γ)` over the circle, evaluated arc by arc,
/// with the iterate quotient and a grid average as witnesses.
pub fn mean_index(engine: &IndexEngine, gamma: &SymplecticPath) -> Result<MeanIndex> {
    mean_index_with(engine, gamma, MEAN_INDEX_ITERATIONS, MEAN_INDEX_GRID)
}

pub fn mean_index_with(
    engine: &IndexEngine,
    gamma: &SymplecticPath,
    iterations: u32,
    grid: usize,
) -> Result<MeanIndex> {
    let n = gamma.n() as f64;
    let spectrum = spectrum_on_unit_circle(&gamma.endpoint(), engine.config().eig_tol);
    let angles = spectrum.angles();

    let (value, ratio) = arc_integral(engine, gamma, &angles)?;

    let by_iteration = engine.index_pair(gamma, iterations)?.index as f64 / f64::from(iterations);

    let values = (0..grid)
        .into_par_iter()
        .map(|k| {
            let mut theta = (k as f64 + 0.5) / grid as f64 * TAU;
            // stay off the spectrum; the index is constant on each arc
            for _ in 0..8 {
                let close = angles
                    .iter()
                    .any(|a| crate::circle::angular_distance(a.radians(), theta) < 1e-6);
                if !close {
                    break;
                }
                theta += 0.25 * TAU / grid as f64;
            }
            engine.omega_index_nondegenerate(gamma, &UnitCirclePoint::from_radians(theta))
        })
        .collect::<Result<Vec<i64>>>()?;
    let by_average = values.iter().sum::<i64>() as f64 / grid as f64;

    let bound = 2.0 * n / f64::from(iterations) + 2.0 * n / grid as f64;
    if (by_iteration - by_average).abs() > bound {
        return Err(Error::MeanIndexInconsistent {
            by_iteration,
            by_average,
        });
    }
    Ok(MeanIndex {
        value,
        exact: ratio.map(|r| r.to_string()),
        by_iteration,
        by_average,
        ratio,
    })
}

fn arc_integral(
    engine: &IndexEngine,
    gamma: &SymplecticPath,
    angles: &[UnitCirclePoint],
) -> Result<(f64, Option<Turns>)> {
    if angles.is_empty() {
        let v = engine.omega_index_nondegenerate(gamma, &UnitCirclePoint::from_fraction(1, 4))?;
        return Ok((v as f64, Some(Ratio::from_integer(v))));
    }
    let exact = angles.iter().all(UnitCirclePoint::is_exact);
    let mut value = 0.0;
    let mut ratio = Ratio::zero();
    for (k, a) in angles.iter().enumerate() {
        let b = &angles[(k + 1) % angles.len()];
        let mut len = b.radians() - a.radians();
        if len <= 0.0 {
            len += TAU;
        }
        let mid = UnitCirclePoint::from_radians(a.radians() + 0.5 * len);
        let v = engine.omega_index_nondegenerate(gamma, &mid)?;
        value += v as f64 * len / TAU;
        if exact {
            let (ta, tb) = (a.turns().unwrap(), b.turns().unwrap());
            let mut lt = tb - ta;
            if lt <= Ratio::zero() {
                lt += Ratio::from_integer(1);
            }
            ratio += lt * v;
        }
    }
    if exact {
        Ok((ratio.to_f64().unwrap_or(value), Some(ratio)))
    } else {
        Ok((value, None))
    }
}

/// Splitting numbers `(S⁺, S⁻)` of `M` at `ω`, computed from the jumps of
/// `i_ω(witness)` where `witness(τ) = M`.
pub fn splitting_numbers(
    engine: &IndexEngine,
    m: &SymplecticMatrix,
    omega: &UnitCirclePoint,
    witness: &SymplecticPath,
) -> Result<(u32, u32)> {
    let gap = witness.endpoint().distance(m);
    if gap > 1e-8 {
        return Err(Error::WitnessMismatch { gap });
    }
    let spectrum = spectrum_on_unit_circle(m, engine.config().eig_tol);
    let others = spectrum
        .angles()
        .into_iter()
        .map(|a| a.distance(omega))
        .filter(|&d| d > 1e-9)
        .fold(f64::INFINITY, f64::min);
    let eps = (0.5 * others).min(1e-2);
    let base = engine.omega_index(witness, omega)?;
    let jumps = |e: f64| -> Result<(i64, i64)> {
        let up = engine.omega_index(witness, &omega.rotated(e))?.index;
        let down = engine.omega_index(witness, &omega.rotated(-e))?.index;
        Ok((up - base.index, down - base.index))
    };
    let first = jumps(eps)?;
    let second = jumps(0.5 * eps)?;
    if first != second {
        return Err(Error::EpsilonUnstable {
            eps,
            half: 0.5 * eps,
        });
    }
    let (plus, minus) = first;
    let nullity = base.nullity as i64;
    for s in [plus, minus] {
        if s < 0 || s > nullity {
            return Err(Error::InvalidInput(format!(
                "splitting number {s} outside [0, {nullity}] at {omega}"
            )));
        }
    }
    Ok((plus as u32, minus as u32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingEntry {
    pub angle: AngleRecord,
    pub plus: u32,
    pub minus: u32,
    #[serde(skip)]
    point: Option<UnitCirclePoint>,
}

impl SplittingEntry {
    pub fn point(&self) -> UnitCirclePoint {
        self.point
            .unwrap_or_else(|| UnitCirclePoint::from_radians(self.angle.radians))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingData {
    pub entries: Vec<SplittingEntry>,
    pub c: u32,
}

impl SplittingData {
    /// `S⁺_M(1)`, zero when 1 is not an eigenvalue.
    pub fn plus_at_one(&self) -> u32 {
        self.entries
            .iter()
            .find(|e| e.point().is_one())
            .map_or(0, |e| e.plus)
    }

    pub fn entry_at(&self, omega: &UnitCirclePoint) -> Option<&SplittingEntry> {
        self.entries.iter().find(|e| e.point().distance(omega) < 1e-9)
    }
}

/// One entry per unit-circle eigenvalue angle of `M`, and
/// `C(M) = Σ_{0<θ<2π} S⁻(e^{iθ})`.
pub fn splitting_table(
    engine: &IndexEngine,
    m: &SymplecticMatrix,
    witness: &SymplecticPath,
) -> Result<SplittingData> {
    let spectrum = spectrum_on_unit_circle(m, engine.config().eig_tol);
    let mut entries = Vec::new();
    let mut c = 0;
    for angle in spectrum.angles() {
        let (plus, minus) = splitting_numbers(engine, m, &angle, witness)?;
        if !angle.is_one() {
            c += minus;
        }
        entries.push(SplittingEntry {
            angle: AngleRecord::from(&angle),
            plus,
            minus,
            point: Some(angle),
        });
    }
    Ok(SplittingData { entries, c })
}

/// `E(a) = ⌈a⌉` for `a = mθ/2π`.
pub fn ceiling_of_turns(angle: &UnitCirclePoint, m: u32) -> Result<i64> {
    if let Some(t) = angle.turns() {
        return Ok((t * i64::from(m)).ceil().to_integer());
    }
    let value = f64::from(m) * angle.radians() / TAU;
    if (value - value.round()).abs() < 1e-12 {
        return Err(Error::AmbiguousCeiling { value });
    }
    Ok(value.ceil() as i64)
}

/// `i(γ, m)` from `i(γ, 1)` and the splitting table of `γ(τ)`:
/// `m(i₁ + S⁺(1) − C) + 2 Σ_{0<θ<2π} E(mθ/2π) S⁻(e^{iθ}) − (S⁺(1) + C)`.
pub fn precise_index(i1: i64, table: &SplittingData, m: u32) -> Result<i64> {
    if m == 0 {
        return Err(Error::InvalidInput("iteration count must be positive".into()));
    }
    let s1 = i64::from(table.plus_at_one());
    let c = i64::from(table.c);
    let mut sum = 0;
    for e in &table.entries {
        let point = e.point();
        if point.is_one() || e.minus == 0 {
            continue;
        }
        sum += ceiling_of_turns(&point, m)? * i64::from(e.minus);
    }
    Ok(i64::from(m) * (i1 + s1 - c) + 2 * sum - (s1 + c))
}

/// One inequality `lower ≤ value ≤ upper`; bounds are stored doubled so that
/// half-integers stay exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lower: f64,
    pub value: i64,
    pub upper: f64,
    pub pass: bool,
}

impl InequalityCheck {
    fn exact(lower2: i64, value: i64, upper2: i64) -> Self {
        Self {
            lower: lower2 as f64 / 2.0,
            value,
            upper: upper2 as f64 / 2.0,
            pass: lower2 <= 2 * value && 2 * value <= upper2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub m: u32,
    pub n: usize,
    pub i1: i64,
    pub nu1: usize,
    pub im: i64,
    pub num: usize,
    pub im1: i64,
    pub num1: usize,
    pub mean_index: f64,
    pub elliptic_height: usize,
    pub mean_estimate: InequalityCheck,
    pub initial_estimate: InequalityCheck,
    pub successive_estimate: InequalityCheck,
}

impl InequalityReport {
    pub fn all_pass(&self) -> bool {
        self.mean_estimate.pass && self.initial_estimate.pass && self.successive_estimate.pass
    }
}

/// Evaluates the three iteration inequalities at `m`.
pub fn check_inequalities(
    seq: &mut IndexSequence<'_>,
    mean: &MeanIndex,
    m: u32,
) -> Result<InequalityReport> {
    if m == 0 {
        return Err(Error::InvalidInput("iteration count must be positive".into()));
    }
    let n = seq.path().n();
    let ni = n as i64;
    let e = spectrum_on_unit_circle(&seq.path().endpoint(), seq.engine().config().eig_tol)
        .elliptic_height;
    let one = seq.get(1)?;
    let at_m = seq.get(m)?;
    let next = seq.get(m + 1)?;
    let (i1, nu1) = (one.index, one.nullity as i64);
    let (im, num) = (at_m.index, at_m.nullity as i64);
    let (im1, num1) = (next.index, next.nullity as i64);
    let mi = i64::from(m);

    let mean_estimate = match mean.ratio() {
        Some(r) => {
            let lo = r * mi - ni;
            let hi = r * mi + ni - num;
            let v = Ratio::from_integer(im);
            InequalityCheck {
                lower: lo.to_f64().unwrap_or(f64::NAN),
                value: im,
                upper: hi.to_f64().unwrap_or(f64::NAN),
                pass: lo <= v && v <= hi,
            }
        }
        None => {
            let lo = m as f64 * mean.value - n as f64;
            let hi = m as f64 * mean.value + n as f64 - num as f64;
            let v = im as f64;
            InequalityCheck {
                lower: lo,
                value: im,
                upper: hi,
                pass: lo - 1e-9 <= v && v <= hi + 1e-9,
            }
        }
    };
    let initial_estimate = InequalityCheck::exact(
        2 * (mi * (i1 + nu1 - ni) + ni - nu1),
        im,
        2 * (mi * (i1 + ni) - ni - (num - nu1)),
    );
    let e = e as i64;
    let successive_estimate =
        InequalityCheck::exact(2 * num - e, im1 - im - i1, 2 * (nu1 - num1) + e);

    Ok(InequalityReport {
        m,
        n,
        i1,
        nu1: nu1 as usize,
        im,
        num: num as usize,
        im1,
        num1: num1 as usize,
        mean_index: mean.value,
        elliptic_height: e as usize,
        mean_estimate,
        initial_estimate,
        successive_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn engine() -> IndexEngine {
        IndexEngine::default()
    }

    #[test]
    fn bott_single_root_and_nullity() {
        let e = engine();
        let half = SymplecticPath::rotation(1, PI, 1.0);
        let one = UnitCirclePoint::one();
        assert_eq!(bott_sum(&e, &half, 1, &one).unwrap(), e.omega_index(&half, &one).unwrap());
        let b = bott_sum(&e, &half, 2, &one).unwrap();
        assert_eq!(b.nullity, 2);
        assert_eq!(b, e.index_pair(&half, 2).unwrap());
        let quarter = SymplecticPath::rotation(1, PI / 2.0, 1.0);
        assert_eq!(bott_sum(&e, &quarter, 4, &one).unwrap(), e.index_pair(&quarter, 4).unwrap());
    }

    #[test]
    fn mean_index_examples() {
        let e = engine();
        let g = SymplecticPath::rotation(1, 2.0 * PI / 3.0, 1.0);
        let mi = mean_index(&e, &g).unwrap();
        assert_eq!(mi.ratio(), Some(Ratio::new(2, 3)));
        let hyp = SymplecticPath::hyperbolic(1, 1.0, 1.0);
        assert_eq!(mean_index(&e, &hyp).unwrap().value, 0.0);
    }

    #[test]
    fn splitting_examples() {
        let e = engine();
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        let id = SymplecticMatrix::identity(1);
        assert_eq!(splitting_numbers(&e, &id, &UnitCirclePoint::one(), &full).unwrap(), (1, 1));
        let quarter = SymplecticPath::rotation(1, PI / 2.0, 1.0);
        let r = quarter.endpoint();
        assert_eq!(
            splitting_numbers(&e, &r, &UnitCirclePoint::from_fraction(1, 4), &quarter).unwrap(),
            (0, 1)
        );
        let third = SymplecticPath::rotation(1, TAU / 3.0, 1.0);
        let table = splitting_table(&e, &third.endpoint(), &third).unwrap();
        assert_eq!(table.c, 1);
        let a = table.entry_at(&UnitCirclePoint::from_fraction(1, 3)).unwrap();
        assert_eq!((a.plus, a.minus), (0, 1));
        let b = table.entry_at(&UnitCirclePoint::from_fraction(2, 3)).unwrap();
        assert_eq!((b.plus, b.minus), (1, 0));
        let wrong = SymplecticPath::rotation(1, PI, 1.0);
        assert!(matches!(
            splitting_numbers(&e, &id, &UnitCirclePoint::one(), &wrong),
            Err(Error::WitnessMismatch { .. })
        ));
    }

    #[test]
    fn precise_formula_examples() {
        let e = engine();
        let third = SymplecticPath::rotation(1, TAU / 3.0, 1.0);
        let table = splitting_table(&e, &third.endpoint(), &third).unwrap();
        let seq: Vec<i64> = (1..=4).map(|m| precise_index(1, &table, m).unwrap()).collect();
        assert_eq!(seq, vec![1, 1, 1, 3]);
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        let table = splitting_table(&e, &full.endpoint(), &full).unwrap();
        for m in 1..=12 {
            assert_eq!(precise_index(1, &table, m).unwrap(), 2 * i64::from(m) - 1);
        }
        let empty = SplittingData { entries: vec![], c: 0 };
        assert_eq!(precise_index(0, &empty, 7).unwrap(), 0);
    }

    #[test]
    fn ambiguous_ceiling_is_reported() {
        let loose = UnitCirclePoint::from_radians(TAU / 97.0);
        assert!(matches!(
            ceiling_of_turns(&loose, 97),
            Err(Error::AmbiguousCeiling { .. })
        ));
        assert_eq!(ceiling_of_turns(&UnitCirclePoint::from_radians(1.0), 3).unwrap(), 1);
        let snapped = UnitCirclePoint::snapped(TAU / 3.0 + 1e-14);
        assert_eq!(ceiling_of_turns(&snapped, 3).unwrap(), 1);
        assert_eq!(ceiling_of_turns(&snapped, 4).unwrap(), 2);
    }

    #[test]
    fn inequalities_tight_case() {
        let e = engine();
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        let mean = mean_index(&e, &full).unwrap();
        let mut seq = IndexSequence::new(&e, &full);
        let r = check_inequalities(&mut seq, &mean, 3).unwrap();
        assert_eq!((r.mean_estimate.lower, r.im as f64, r.mean_estimate.upper), (5.0, 5.0, 5.0));
        assert!(r.all_pass());
        let hyp = SymplecticPath::hyperbolic(1, 1.0, 1.0);
        let mean = mean_index(&e, &hyp).unwrap();
        let mut seq = IndexSequence::new(&e, &hyp);
        for m in 1..4 {
            assert!(check_inequalities(&mut seq, &mean, m).unwrap().all_pass());
        }
    }
}
