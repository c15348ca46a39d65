//! The ω-index and ω-nullity of symplectic paths.
//!
//! For an ω-nondegenerate path the index is the signed number of times the
//! extended path `γ∗ζ` crosses the zero set of `D_ω(M) = ω^{-n} det(M − ωI)`.
//! A crossing counts `+1` when the path moves to the side that
//! `s ↦ M exp(sJ)` points to, `−1` otherwise.
//!
//! The index is constant in ω on each arc of the unit circle that avoids the
//! spectrum of `γ(τ)`. The scan therefore runs at a point of ω's arc that
//! keeps clear of `±1`, where the singular set has its cone points (`I`
//! always lies on it when ω = 1).
//!
//! Crossings are isolated by recursive bisection of the mesh: an interval is
//! accepted as root-free when its end values exceed what a local Lipschitz
//! estimate allows, and as a single crossing when the detector is monotone on
//! it. Intervals that never certify are tangential; the scan is then redone
//! on a generic endpoint-fixing perturbation `γ(t)·exp(σ sin(πt/T) X)` with
//! two amplitudes that must agree.
//!
//! Degenerate paths use the rotated family `γ(t)·exp(−s (t/τ) J)` on a
//! halving ladder of `s`, and every result is checked against random
//! nondegenerate neighbours.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::UnitCirclePoint;
use crate::error::{Error, Result};
use crate::path::{PowerSplit, SymplecticPath, Trajectory, FACTOR_BOUND};
use crate::symplectic::{
    complex_nullity, detector_complex, detector_with_derivative, expm, factored_nullity,
    factored_unit_angles, spectrum_on_unit_circle, structure, CyclicReduction, Mat, EIG_TOL,
};

/// Largest accumulated generator rate between consecutive scan samples.
const SCAN_PHASE: f64 = 0.25;

fn end_factors(traj: &Trajectory) -> Option<Vec<Mat>> {
    (traj.power_norm() > FACTOR_BOUND).then(|| traj.factors_at(traj.duration()))
}

/// `(i_ω(γ), ν_ω(γ))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexPair {
    pub index: i64,
    pub nullity: usize,
}

impl IndexPair {
    pub fn new(index: i64, nullity: usize) -> Self {
        Self { index, nullity }
    }
}

/// One transversal crossing of the ω-singular set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingRecord {
    /// Crossing time in the `γ∗ζ` parametrization on `[0, τ]`.
    pub time: f64,
    pub sign: i8,
    pub tangential: bool,
    pub d_slope: f64,
    pub coorient_slope: f64,
}

/// How crossings are signed. `PathSlope` ignores the coorientation and is
/// only there as a deliberately wrong rule for mutation checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignRule {
    Coorientation,
    PathSlope,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub eig_tol: f64,
    /// A crossing is tangential unless `f(±h)` have opposite signs and
    /// comparable sizes, within this ratio, along the path and along
    /// `s ↦ M exp(sJ)`.
    pub transversality_floor: f64,
    pub bisection_tol: f64,
    pub fd_step: f64,
    /// Angular distance from `±1` below which the scan moves within ω's arc.
    pub clearance: f64,
    pub ladder_start: f64,
    pub ladder_agree: usize,
    pub ladder_max_rungs: usize,
    pub attainment_samples: usize,
    pub neighbor_radius: f64,
    pub bump_amplitudes: [f64; 2],
    pub seed: u64,
    pub sign_rule: SignRule,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            eig_tol: EIG_TOL,
            transversality_floor: 1e-3,
            bisection_tol: 1e-10,
            fd_step: 1e-6,
            clearance: 0.2,
            ladder_start: 1e-3,
            ladder_agree: 3,
            ladder_max_rungs: 12,
            attainment_samples: 50,
            neighbor_radius: 1e-3,
            bump_amplitudes: [0.2, 0.1],
            seed: 0x6d61_736c_6f76,
            sign_rule: SignRule::Coorientation,
        }
    }
}

/// Result of a crossing scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingScan {
    /// ω actually used for the scan (same arc as the requested ω).
    pub scanned_radians: f64,
    pub crossings: Vec<CrossingRecord>,
    pub index: i64,
    /// Amplitudes of the endpoint-fixing perturbation, empty when the raw
    /// path was transversal.
    pub perturbation: Vec<f64>,
}

/// Diagnostics of the degenerate-case computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerateOutcome {
    /// `(s, i_ω(γ_s))` for every rung evaluated.
    pub ladder: Vec<(f64, i64)>,
    pub rungs_used: usize,
    pub neighbors_checked: usize,
    pub neighbor_min: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexOutcome {
    pub pair: IndexPair,
    pub degenerate: Option<DegenerateOutcome>,
}

/// Index computations with a fixed numeric configuration.
#[derive(Clone, Debug, Default)]
pub struct IndexEngine {
    config: EngineConfig,
}

impl IndexEngine {
    pub fn new(config: EngineConfig) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// `ν_ω(γ) = dim_C ker(γ(τ) − ωI)`.
    pub fn omega_nullity(&self, gamma: &SymplecticPath, omega: &UnitCirclePoint) -> usize {
        let tol = self.config.eig_tol;
        match end_factors(gamma.trajectory()) {
            Some(f) => factored_nullity(&f, omega.to_complex(), tol),
            None => complex_nullity(&gamma.end(), omega.to_complex(), tol),
        }
    }

    /// Signed crossing count for an ω-nondegenerate path.
    pub fn omega_index_nondegenerate(
        &self,
        gamma: &SymplecticPath,
        omega: &UnitCirclePoint,
    ) -> Result<i64> {
        self.scan(gamma, omega).map(|s| s.index)
    }

    /// Full crossing scan with per-crossing records.
    pub fn scan(&self, gamma: &SymplecticPath, omega: &UnitCirclePoint) -> Result<CrossingScan> {
        let nullity = self.omega_nullity(gamma, omega);
        if nullity > 0 {
            return Err(Error::DegenerateEndpoint { nullity });
        }
        let eigen_angles: Vec<f64> = match end_factors(gamma.trajectory()) {
            Some(f) => factored_unit_angles(&f, self.config.eig_tol),
            None => spectrum_on_unit_circle(&gamma.endpoint(), self.config.eig_tol)
                .entries
                .iter()
                .map(|e| e.angle.radians())
                .collect(),
        };
        let target = arc_representative(omega.radians(), &eigen_angles, self.config.clearance);
        let extended = gamma.extended()?;
        let w = Complex64::from_polar(1.0, target);

        match self.scan_trajectory(&extended, w, None) {
            Ok(crossings) => Ok(CrossingScan {
                scanned_radians: target,
                index: crossings.iter().map(|c| i64::from(c.sign)).sum(),
                crossings,
                perturbation: Vec::new(),
            }),
            Err(Error::TangentialCrossing { time }) => {
                self.scan_perturbed(&extended, w, target, time)
            }
            Err(e) => Err(e),
        }
    }

    fn scan_perturbed(
        &self,
        extended: &Trajectory,
        w: Complex64,
        target: f64,
        first_time: f64,
    ) -> Result<CrossingScan> {
        let n = extended.n();
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ 0xb0b5);
        let mut last_time = first_time;
        // a few generic directions in case one happens to be tangential again
        for _attempt in 0..4 {
            let dir = -(structure(n) * (Mat::identity(2 * n, 2 * n) + random_symmetric(&mut rng, n, 0.5)));
            let mut results = Vec::with_capacity(2);
            for &amp in &self.config.bump_amplitudes {
                match self.scan_trajectory(extended, w, Some((&dir, amp))) {
                    Ok(c) => results.push(c),
                    Err(Error::TangentialCrossing { time }) => {
                        last_time = time;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if results.len() == self.config.bump_amplitudes.len() {
                let totals: Vec<i64> = results
                    .iter()
                    .map(|c| c.iter().map(|r| i64::from(r.sign)).sum())
                    .collect();
                if totals.windows(2).all(|p| p[0] == p[1]) {
                    let crossings = results.swap_remove(0);
                    return Ok(CrossingScan {
                        scanned_radians: target,
                        index: totals[0],
                        crossings,
                        perturbation: self.config.bump_amplitudes.to_vec(),
                    });
                }
            }
        }
        Err(Error::TangentialCrossing { time: last_time })
    }

    fn scan_trajectory(
        &self,
        traj: &Trajectory,
        w: Complex64,
        bump: Option<(&Mat, f64)>,
    ) -> Result<Vec<CrossingRecord>> {
        let det = Detector::new(traj, w, bump);
        let times = traj.scan_times(SCAN_PHASE);
        let min_len = 1e-11 * traj.duration().max(1.0);
        let mut out = Vec::new();
        let mut prev = det.sample(times[0]);
        for &t in &times[1..] {
            let next = det.sample(t);
            self.isolate(&det, prev, next, min_len, &mut out)?;
            prev = next;
        }
        Ok(out)
    }

    fn isolate(
        &self,
        det: &Detector<'_>,
        a: Sample,
        b: Sample,
        min_len: f64,
        out: &mut Vec<CrossingRecord>,
    ) -> Result<()> {
        if a.f == 0.0 {
            return Err(Error::TangentialCrossing { time: a.t });
        }
        let len = b.t - a.t;
        if len <= 0.0 {
            return Ok(());
        }
        if len < min_len {
            return Err(Error::TangentialCrossing { time: a.t });
        }
        let c = det.sample(0.5 * (a.t + b.t));
        if c.f == 0.0 || b.f == 0.0 {
            return Err(Error::TangentialCrossing { time: c.t });
        }
        let half = 0.5 * len;
        let lip = 1.5 * a.d.abs().max(b.d.abs()).max(c.d.abs())
            + ((c.f - a.f).abs().max((b.f - c.f).abs())) / half;
        let (sa, sb, sc) = (a.f > 0.0, b.f > 0.0, c.f > 0.0);
        if sa == sb && sb == sc {
            if a.f.abs() + c.f.abs() > lip * half && c.f.abs() + b.f.abs() > lip * half {
                return Ok(());
            }
        } else if sa != sb && monotone(&a, &c, &b) {
            out.push(self.locate(det, a, b)?);
            return Ok(());
        }
        self.isolate(det, a, c, min_len, out)?;
        self.isolate(det, c, b, min_len, out)
    }

    fn locate(&self, det: &Detector<'_>, mut a: Sample, mut b: Sample) -> Result<CrossingRecord> {
        let rising = b.f > a.f;
        while b.t - a.t > self.config.bisection_tol {
            let m = 0.5 * (a.t + b.t);
            let fm = det.value_times(m, None);
            if fm == 0.0 {
                a.t = m;
                b.t = m;
                break;
            }
            if (fm > 0.0) == (b.f > 0.0) {
                b.t = m;
                b.f = fm;
            } else {
                a.t = m;
                a.f = fm;
            }
        }
        let t = 0.5 * (a.t + b.t);
        let h = self.config.fd_step;
        let n = det.traj.n();
        let (cp, cm) = (
            det.value_times(t, Some(&rotation(n, h))),
            det.value_times(t, Some(&rotation(n, -h))),
        );
        let coorient = (cp - cm) / (2.0 * h);
        let (lo, hi) = ((t - h).max(0.0), (t + h).min(det.duration));
        let (dp, dm) = (det.value_times(hi, None), det.value_times(lo, None));
        let d_slope = (dp - dm) / (hi - lo);
        let floor = self.config.transversality_floor;
        if !straddles(cp, cm, floor) || !straddles(dp, dm, floor) {
            return Err(Error::TangentialCrossing { time: t });
        }
        // direction of travel is taken from the bracket, which is exact
        let path_sign: i8 = if rising { 1 } else { -1 };
        let sign = match self.config.sign_rule {
            SignRule::Coorientation => {
                if coorient > 0.0 {
                    path_sign
                } else {
                    -path_sign
                }
            }
            SignRule::PathSlope => path_sign,
        };
        Ok(CrossingRecord {
            time: t,
            sign,
            tangential: false,
            d_slope,
            coorient_slope: coorient,
        })
    }

    /// `(i_ω(γ), ν_ω(γ))`; degenerate paths go through the perturbation ladder.
    pub fn omega_index(&self, gamma: &SymplecticPath, omega: &UnitCirclePoint) -> Result<IndexPair> {
        self.omega_index_detailed(gamma, omega).map(|o| o.pair)
    }

    pub fn omega_index_detailed(
        &self,
        gamma: &SymplecticPath,
        omega: &UnitCirclePoint,
    ) -> Result<IndexOutcome> {
        let nullity = self.omega_nullity(gamma, omega);
        if nullity == 0 {
            let index = self.omega_index_nondegenerate(gamma, omega)?;
            return Ok(IndexOutcome {
                pair: IndexPair::new(index, 0),
                degenerate: None,
            });
        }
        let n = gamma.n();
        let j = structure(n);
        let cfg = &self.config;
        let mut ladder: Vec<(f64, i64)> = Vec::new();
        let mut s = cfg.ladder_start;
        let mut stable = None;
        let mut rungs = 0;
        for _ in 0..cfg.ladder_max_rungs {
            rungs += 1;
            let family = gamma.right_rotated(&(&j * -s), "ladder");
            if self.omega_nullity(&family, omega) == 0 {
                let v = self.omega_index_nondegenerate(&family, omega)?;
                ladder.push((s, v));
                if ladder.len() >= cfg.ladder_agree {
                    let tail = &ladder[ladder.len() - cfg.ladder_agree..];
                    if tail.iter().all(|(_, x)| *x == v) {
                        stable = Some(v);
                        break;
                    }
                }
            }
            s *= 0.5;
        }
        let family_value = match stable {
            Some(v) => v,
            None => return Err(Error::PerturbationUnstable { ladder }),
        };

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5a5a);
        let mut checked = 0;
        let mut neighbor_min: Option<i64> = None;
        let mut attempts = 0;
        while checked < cfg.attainment_samples && attempts < 4 * cfg.attainment_samples + 8 {
            attempts += 1;
            let rho = random_symmetric(&mut rng, n, 1.0);
            let eps = cfg.neighbor_radius * 0.5f64.powi((attempts % 4) as i32);
            let beta = gamma.right_rotated(&(&j * rho * eps), "neighbor");
            if self.omega_nullity(&beta, omega) > 0 {
                continue;
            }
            let v = self.omega_index_nondegenerate(&beta, omega)?;
            checked += 1;
            neighbor_min = Some(neighbor_min.map_or(v, |m: i64| m.min(v)));
            if v < family_value {
                return Err(Error::InfNotAttained {
                    family: family_value,
                    neighbor: v,
                });
            }
        }
        Ok(IndexOutcome {
            pair: IndexPair::new(family_value, nullity),
            degenerate: Some(DegenerateOutcome {
                ladder,
                rungs_used: rungs,
                neighbors_checked: checked,
                neighbor_min,
            }),
        })
    }

    /// `(i(γ, m), ν(γ, m)) = (i_1(γᵐ), ν_1(γᵐ))`.
    pub fn index_pair(&self, gamma: &SymplecticPath, m: u32) -> Result<IndexPair> {
        if m == 0 {
            return Err(Error::InvalidInput("iteration count must be positive".into()));
        }
        self.omega_index(&gamma.iterate(m), &UnitCirclePoint::one())
    }
}

fn monotone(a: &Sample, c: &Sample, b: &Sample) -> bool {
    let rising = b.f > a.f;
    let ds = [a.d, c.d, b.d];
    if !ds.iter().all(|d| (*d > 0.0) == rising && *d != 0.0) {
        return false;
    }
    // the detector must also sit on the right side at the midpoint
    let mid_ok = if rising {
        (c.f > a.f) && (c.f < b.f)
    } else {
        (c.f < a.f) && (c.f > b.f)
    };
    // |f''| ≤ 1.5 · (largest derivative step) / half keeps f' away from zero
    let swing = (c.d - a.d).abs().max((b.d - c.d).abs());
    let floor = 0.5 * (a.d.abs() + c.d.abs()).min(c.d.abs() + b.d.abs());
    mid_ok && floor > 0.75 * swing && secant_fits(a, c) && secant_fits(c, b)
}

/// The secant over `[x, y]` lies near the endpoint slopes. A secant far
/// below them means f' changes sign in between.
fn secant_fits(x: &Sample, y: &Sample) -> bool {
    let s = ((y.f - x.f) / (y.t - x.t)).abs();
    s >= 0.5 * x.d.abs().min(y.d.abs()) && s <= 2.0 * x.d.abs().max(y.d.abs())
}

/// Opposite signs with `min(|a|, |b|) ≥ floor · max(|a|, |b|)`: a simple
/// root resolved at the sampling step. Values on one side mean the step
/// also spans a neighbouring root or a touching point.
fn straddles(a: f64, b: f64, floor: f64) -> bool {
    (a > 0.0) != (b > 0.0) && a != 0.0 && b != 0.0 && a.abs().min(b.abs()) >= floor * a.abs().max(b.abs())
}

fn rotation(n: usize, theta: f64) -> Mat {
    let (s, c) = theta.sin_cos();
    let mut r = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        r[(i, i)] = c;
        r[(n + i, n + i)] = c;
        r[(i, n + i)] = -s;
        r[(n + i, i)] = s;
    }
    r
}

pub(crate) fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, amplitude: f64) -> Mat {
    let dim = 2 * n;
    let mut m = Mat::zeros(dim, dim);
    for i in 0..dim {
        for k in i..dim {
            let v = rng.random_range(-amplitude..=amplitude);
            m[(i, k)] = v;
            m[(k, i)] = v;
        }
    }
    m
}

/// A point of the arc of `U \ σ` containing `angle`, at least `clearance`
/// away from `±1` when the arc allows it.
pub(crate) fn arc_representative(angle: f64, eigen_angles: &[f64], clearance: f64) -> f64 {
    let d1 = crate::circle::angular_distance(angle, 0.0);
    let dm1 = crate::circle::angular_distance(angle, PI);
    if d1 >= clearance && dm1 >= clearance {
        return angle;
    }
    let others: Vec<f64> = eigen_angles
        .iter()
        .copied()
        .filter(|&e| crate::circle::angular_distance(e, angle) > 1e-12)
        .collect();
    // arc (lo, hi) measured as offsets from `angle`
    let (back, ahead) = if others.is_empty() {
        (PI, PI)
    } else {
        let ahead = others
            .iter()
            .map(|&e| (e - angle).rem_euclid(TAU))
            .fold(f64::INFINITY, f64::min);
        let back = others
            .iter()
            .map(|&e| (angle - e).rem_euclid(TAU))
            .fold(f64::INFINITY, f64::min);
        (back, ahead)
    };
    let whole = others.is_empty();
    let score = |x: f64| {
        let mut s = crate::circle::angular_distance(x, 0.0).min(crate::circle::angular_distance(x, PI));
        if !whole {
            let off = x - angle;
            s = s.min(off + back).min(ahead - off);
        }
        s
    };
    let mut best = angle;
    let mut best_score = score(angle);
    const CANDIDATES: usize = 512;
    for k in 1..CANDIDATES {
        let off = -back + (back + ahead) * k as f64 / CANDIDATES as f64;
        let x = angle + off;
        let s = score(x);
        if s > best_score + 1e-15 || (s > best_score - 1e-15 && off.abs() < (best - angle).abs()) {
            best = x;
            best_score = s;
        }
    }
    best.rem_euclid(TAU)
}

#[derive(Clone, Copy, Debug)]
struct Sample {
    t: f64,
    f: f64,
    d: f64,
}

struct Detector<'a> {
    traj: &'a Trajectory,
    omega: Complex64,
    bump: Option<(&'a Mat, f64)>,
    duration: f64,
    /// Reductions over the stiff powers of `traj`, keyed by their chunks.
    reductions: RefCell<HashMap<usize, CyclicReduction>>,
}

impl<'a> Detector<'a> {
    fn new(traj: &'a Trajectory, omega: Complex64, bump: Option<(&'a Mat, f64)>) -> Self {
        Self {
            traj,
            omega,
            bump,
            duration: traj.duration(),
            reductions: RefCell::new(HashMap::new()),
        }
    }

    fn bump_factor(&self, t: f64) -> Option<(Mat, Mat)> {
        self.bump.map(|(x, amp)| {
            let arg = PI * t / self.duration;
            let e = expm(&(x * (amp * arg.sin())));
            let rate = amp * arg.cos() * PI / self.duration;
            let de = &e * x * rate;
            (e, de)
        })
    }

    fn reduced<T>(
        &self,
        split: &PowerSplit,
        eval: impl FnOnce(&CyclicReduction) -> T,
    ) -> T {
        let key = Arc::as_ptr(&split.chunks) as usize;
        let mut cache = self.reductions.borrow_mut();
        let dim = split.left.nrows();
        let reduction = cache
            .entry(key)
            .or_insert_with(|| CyclicReduction::new(&split.chunks, dim, self.omega));
        eval(reduction)
    }

    /// The detector at `γ(t)·bump(t)·right`.
    fn value_times(&self, t: f64, right: Option<&Mat>) -> f64 {
        let mut tail = self.bump_factor(t).map(|(e, _)| e);
        if let Some(r) = right {
            tail = Some(match tail {
                Some(e) => e * r,
                None => r.clone(),
            });
        }
        if let Some(split) = self.traj.power_split(t) {
            let outer = match &tail {
                Some(m) => &split.right * m,
                None => split.right.clone(),
            };
            let x = outer * &split.left;
            return self.reduced(&split, |r| r.detector(&x).re);
        }
        let mut m = self.traj.at(t);
        if let Some(r) = tail {
            m *= r;
        }
        detector_complex(&m, self.omega).re
    }

    fn sample(&self, t: f64) -> Sample {
        let bump = self.bump_factor(t);
        if let Some(split) = self.traj.power_split(t) {
            let (outer, d_outer) = match &bump {
                Some((e, de)) => (&split.right * e, &split.d_right * e + &split.right * de),
                None => (split.right.clone(), split.d_right.clone()),
            };
            let x = &outer * &split.left;
            let dx = d_outer * &split.left + &outer * &split.d_left;
            let (f, d) = self.reduced(&split, |r| r.detector_with_derivative(&x, &dx));
            return Sample { t, f, d };
        }
        let (m, dm) = self.traj.at_with_derivative(t);
        let (m, dm) = match bump {
            None => (m, dm),
            Some((e, de)) => {
                let d = &dm * &e + &m * de;
                (m * e, d)
            }
        };
        let (f, d) = detector_with_derivative(&m, &dm, self.omega);
        Sample { t, f, d }
    }
}

/// Free-function forms using the default engine.
pub fn omega_nullity(gamma: &SymplecticPath, omega: &UnitCirclePoint) -> usize {
    IndexEngine::default().omega_nullity(gamma, omega)
}

pub fn omega_index_nondegenerate(gamma: &SymplecticPath, omega: &UnitCirclePoint) -> Result<i64> {
    IndexEngine::default().omega_index_nondegenerate(gamma, omega)
}

pub fn omega_index(gamma: &SymplecticPath, omega: &UnitCirclePoint) -> Result<IndexPair> {
    IndexEngine::default().omega_index(gamma, omega)
}

pub fn index_pair(gamma: &SymplecticPath, m: u32) -> Result<IndexPair> {
    IndexEngine::default().index_pair(gamma, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> UnitCirclePoint {
        UnitCirclePoint::one()
    }

    #[test]
    fn nullity_examples() {
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        assert_eq!(omega_nullity(&full, &one()), 2);
        let half = SymplecticPath::rotation(1, PI, 1.0);
        assert_eq!(omega_nullity(&half, &UnitCirclePoint::minus_one()), 2);
        assert_eq!(omega_nullity(&half, &one()), 0);
        let hyp = SymplecticPath::hyperbolic(1, 1.0, 1.0);
        assert_eq!(omega_nullity(&hyp, &one()), 0);
    }

    #[test]
    fn nondegenerate_golden_values() {
        let engine = IndexEngine::default();
        let half = SymplecticPath::rotation(1, PI, 1.0);
        assert_eq!(engine.omega_index_nondegenerate(&half, &one()).unwrap(), 1);
        let hyp = SymplecticPath::hyperbolic(1, 1.0, 1.0);
        assert_eq!(engine.omega_index_nondegenerate(&hyp, &one()).unwrap(), 0);
        let three = SymplecticPath::rotation(1, 3.0 * PI, 1.0);
        assert_eq!(engine.omega_index_nondegenerate(&three, &one()).unwrap(), 3);
    }

    #[test]
    fn nondegenerate_rejects_degenerate() {
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        assert!(matches!(
            omega_index_nondegenerate(&full, &one()),
            Err(Error::DegenerateEndpoint { nullity: 2 })
        ));
    }

    #[test]
    fn degenerate_full_rotation() {
        let engine = IndexEngine::default();
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        let out = engine.omega_index_detailed(&full, &one()).unwrap();
        assert_eq!(out.pair, IndexPair::new(1, 2));
        let d = out.degenerate.unwrap();
        assert!(d.rungs_used <= 6);
        assert_eq!(d.neighbors_checked, 50);
        assert!(d.neighbor_min.unwrap() >= 1);
    }

    #[test]
    fn delegation_and_hyperbolic() {
        let half = SymplecticPath::rotation(1, PI, 1.0);
        assert_eq!(omega_index(&half, &one()).unwrap(), IndexPair::new(1, 0));
        let hyp = SymplecticPath::hyperbolic(1, 1.0, 1.0);
        assert_eq!(omega_index(&hyp, &one()).unwrap(), IndexPair::new(0, 0));
    }

    #[test]
    fn index_pair_examples() {
        let full = SymplecticPath::rotation(1, TAU, 1.0);
        assert_eq!(index_pair(&full, 3).unwrap(), IndexPair::new(5, 2));
        assert_eq!(index_pair(&full, 1).unwrap(), omega_index(&full, &one()).unwrap());
        let hyp = SymplecticPath::hyperbolic(1, 0.7, 1.0);
        for m in 1..4 {
            assert_eq!(index_pair(&hyp, m).unwrap(), IndexPair::new(0, 0));
        }
    }

    #[test]
    fn equal_blocks_need_the_perturbation() {
        let engine = IndexEngine::default();
        let g = SymplecticPath::rotation(2, 3.0 * PI, 1.0);
        let scan = engine.scan(&g, &UnitCirclePoint::from_radians(1.0)).unwrap();
        assert!(!scan.perturbation.is_empty());
        // two copies of a path with index 2 at this ω
        let single = SymplecticPath::rotation(1, 3.0 * PI, 1.0);
        let one_block = engine.omega_index_nondegenerate(&single, &UnitCirclePoint::from_radians(1.0)).unwrap();
        assert_eq!(scan.index, 2 * one_block);
    }

    #[test]
    fn crossing_records_are_consistent() {
        let engine = IndexEngine::default();
        let g = SymplecticPath::rotation(1, 5.0 * PI, 1.0);
        let scan = engine.scan(&g, &UnitCirclePoint::from_radians(1.1)).unwrap();
        for c in &scan.crossings {
            assert!(!c.tangential);
            let expected = if c.d_slope * c.coorient_slope > 0.0 { 1 } else { -1 };
            assert_eq!(c.sign, expected);
            assert!(c.time >= 0.5 && c.time <= 1.0);
        }
        assert_eq!(scan.index, scan.crossings.len() as i64);
    }

    #[test]
    fn representative_stays_in_arc() {
        // no spectrum: move to ±π/2
        let r = arc_representative(0.0, &[], 0.2);
        assert!((crate::circle::angular_distance(r, 0.0) - PI / 2.0).abs() < 1e-2);
        let r = arc_representative(0.1, &[], 0.2);
        assert!((r - PI / 2.0).abs() < 1e-2);
        // eigenvalues at ±0.1: arc (-0.1, 0.1) around 1
        let r = arc_representative(0.0, &[0.1, TAU - 0.1], 0.2);
        assert!(crate::circle::angular_distance(r, 0.0) < 0.1);
        assert!(crate::circle::angular_distance(r, 0.0) > 0.04);
        // far from ±1: unchanged
        assert_eq!(arc_representative(1.0, &[0.5], 0.2), 1.0);
    }

    #[test]
    fn canary_rule_changes_values() {
        let cfg = EngineConfig {
            sign_rule: SignRule::PathSlope,
            ..EngineConfig::default()
        };
        let engine = IndexEngine::new(cfg);
        let three = SymplecticPath::rotation(1, 3.0 * PI, 1.0);
        assert_ne!(engine.omega_index_nondegenerate(&three, &one()).unwrap(), 3);
    }
}
