//! Symplectic matrix paths.
//!
//! A path is a sequence of pieces covering `[0, duration]`. Each piece holds
//! a product of terms that are closed-form functions of the absolute time
//! (constant factors, matrix exponential flows, the diagonal stretch of the
//! extension path). Splitting a piece for mesh refinement never recomputes
//! any value, so refining a fine path changes no existing node.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{
    diamond, expm, mat_pow, max_norm, structure, symplectic_defect, Mat, SymplecticMatrix,
    SYMPLECTIC_TOL,
};

/// Default bound on `‖M_{k+1} − M_k‖_max` between consecutive nodes.
pub const MESH_BOUND: f64 = 0.2;
const MAX_SPLIT_DEPTH: u32 = 40;
const SYMMETRY_TOL: f64 = 1e-12;
const STEP_CAP: usize = 1 << 20;
/// Powers above this max-norm are evaluated through factors grouped up to
/// the same bound.
pub(crate) const FACTOR_BOUND: f64 = 1e3;

#[derive(Clone, Debug, PartialEq)]
enum Term {
    Const(Mat),
    /// `exp((t − origin) · generator)`
    Flow { generator: Mat, origin: f64 },
    /// `diag(a, …, a, 1/a, …, 1/a)` with `a` affine in `t`, `a(t0)=a0`, `a(t1)=a1`.
    Stretch {
        n: usize,
        t0: f64,
        t1: f64,
        a0: f64,
        a1: f64,
    },
    /// Symplectic direct sum of two term products.
    Sum(Vec<Term>, Vec<Term>),
    /// `base^exponent`, kept factored for well-conditioned evaluation.
    Power {
        exponent: u32,
        dense: Mat,
        /// Neighbouring copies of the base multiplied out up to `FACTOR_BOUND`.
        chunks: Arc<Vec<Mat>>,
    },
}

impl Term {
    fn power(base: &Mat, exponent: u32) -> Term {
        let copies = std::iter::repeat_n(base, exponent as usize).cloned().collect();
        Term::Power {
            exponent,
            dense: mat_pow(base, exponent),
            chunks: Arc::new(group_factors(copies, FACTOR_BOUND)),
        }
    }

    fn eval(&self, t: f64) -> Mat {
        match self {
            Term::Const(m) => m.clone(),
            Term::Flow { generator, origin } => expm(&(generator * (t - origin))),
            Term::Stretch { n, t0, t1, a0, a1 } => {
                let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
                let a = a0 + (a1 - a0) * s;
                let mut m = Mat::zeros(2 * n, 2 * n);
                for i in 0..*n {
                    m[(i, i)] = a;
                    m[(n + i, n + i)] = 1.0 / a;
                }
                m
            }
            Term::Sum(a, b) => diamond(&eval_terms(a, t), &eval_terms(b, t)),
            Term::Power { dense, .. } => dense.clone(),
        }
    }

    /// Value and time derivative; `None` stands for a zero derivative.
    fn eval_d(&self, t: f64) -> (Mat, Option<Mat>) {
        match self {
            Term::Const(m) | Term::Power { dense: m, .. } => (m.clone(), None),
            Term::Flow { generator, origin } => {
                let e = expm(&(generator * (t - origin)));
                let d = generator * &e;
                (e, Some(d))
            }
            Term::Stretch { n, t0, t1, a0, a1 } => {
                let (s, rate) = if t1 > t0 {
                    ((t - t0) / (t1 - t0), (a1 - a0) / (t1 - t0))
                } else {
                    (0.0, 0.0)
                };
                let a = a0 + (a1 - a0) * s;
                let mut m = Mat::zeros(2 * n, 2 * n);
                let mut d = Mat::zeros(2 * n, 2 * n);
                for i in 0..*n {
                    m[(i, i)] = a;
                    m[(n + i, n + i)] = 1.0 / a;
                    d[(i, i)] = rate;
                    d[(n + i, n + i)] = -rate / (a * a);
                }
                (m, Some(d))
            }
            Term::Sum(a, b) => {
                let (ma, da) = eval_terms_d(a, t);
                let (mb, db) = eval_terms_d(b, t);
                let d = match (da, db) {
                    (None, None) => None,
                    (da, db) => {
                        let za = da.unwrap_or_else(|| Mat::zeros(ma.nrows(), ma.ncols()));
                        let zb = db.unwrap_or_else(|| Mat::zeros(mb.nrows(), mb.ncols()));
                        Some(diamond(&za, &zb))
                    }
                };
                (diamond(&ma, &mb), d)
            }
        }
    }

    /// Bound on the rate of change of the factor, `‖M⁻¹ M'‖`.
    fn rate(&self, t: f64) -> f64 {
        match self {
            Term::Const(_) | Term::Power { .. } => 0.0,
            Term::Flow { generator, .. } => generator.norm(),
            Term::Stretch { t0, t1, a0, a1, .. } => {
                if t1 > t0 {
                    let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                    let a = a0 + (a1 - a0) * s;
                    std::f64::consts::SQRT_2 * ((a1 - a0) / (t1 - t0) / a).abs()
                } else {
                    0.0
                }
            }
            Term::Sum(a, b) => {
                let r = |terms: &[Term]| terms.iter().map(|x| x.rate(t)).sum::<f64>();
                r(a).max(r(b))
            }
        }
    }

    fn retime(&self, offset: f64, factor: f64) -> Term {
        match self {
            Term::Const(m) => Term::Const(m.clone()),
            Term::Flow { generator, origin } => Term::Flow {
                generator: generator / factor,
                origin: offset + origin * factor,
            },
            Term::Stretch { n, t0, t1, a0, a1 } => Term::Stretch {
                n: *n,
                t0: offset + t0 * factor,
                t1: offset + t1 * factor,
                a0: *a0,
                a1: *a1,
            },
            Term::Sum(a, b) => Term::Sum(
                a.iter().map(|x| x.retime(offset, factor)).collect(),
                b.iter().map(|x| x.retime(offset, factor)).collect(),
            ),
            Term::Power { .. } => self.clone(),
        }
    }
}

fn eval_terms(terms: &[Term], t: f64) -> Mat {
    let mut iter = terms.iter();
    let mut acc = match iter.next() {
        Some(first) => first.eval(t),
        None => unreachable!("pieces always carry at least one term"),
    };
    for term in iter {
        acc = acc * term.eval(t);
    }
    acc
}

fn eval_terms_d(terms: &[Term], t: f64) -> (Mat, Option<Mat>) {
    let mut iter = terms.iter();
    let (mut acc, mut dacc) = match iter.next() {
        Some(first) => first.eval_d(t),
        None => unreachable!("pieces always carry at least one term"),
    };
    for term in iter {
        let (b, db) = term.eval_d(t);
        dacc = match (dacc, db) {
            (None, None) => None,
            (Some(da), None) => Some(da * &b),
            (None, Some(db)) => Some(&acc * db),
            (Some(da), Some(db)) => Some(da * &b + &acc * db),
        };
        acc *= b;
    }
    (acc, dacc)
}

/// Merge neighbouring constant factors.
fn compact(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for term in terms {
        match (out.last_mut(), term) {
            (Some(Term::Const(prev)), Term::Const(next)) => *prev = &*prev * next,
            (_, term) => out.push(term),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
struct Piece {
    t0: f64,
    t1: f64,
    terms: Vec<Term>,
}

impl Piece {
    fn eval(&self, t: f64) -> Mat {
        eval_terms(&self.terms, t)
    }

    fn retime(&self, offset: f64, factor: f64) -> Piece {
        Piece {
            t0: offset + self.t0 * factor,
            t1: offset + self.t1 * factor,
            terms: self.terms.iter().map(|x| x.retime(offset, factor)).collect(),
        }
    }

    fn with_terms(&self, front: Option<&Mat>, back: Option<Term>) -> Piece {
        let mut terms = Vec::with_capacity(self.terms.len() + 2);
        if let Some(f) = front {
            terms.push(Term::Const(f.clone()));
        }
        terms.extend(self.terms.iter().cloned());
        terms.extend(back);
        Piece {
            t0: self.t0,
            t1: self.t1,
            terms: compact(terms),
        }
    }
}

/// A continuous path `[0, duration] → Sp(2n)` with no constraint on its start.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    n: usize,
    duration: f64,
    pieces: Vec<Piece>,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Value at time `t`, clamped into `[0, duration]`.
    pub fn at(&self, t: f64) -> Mat {
        let t = t.clamp(0.0, self.duration);
        let idx = self
            .pieces
            .partition_point(|p| p.t1 < t)
            .min(self.pieces.len() - 1);
        self.pieces[idx].eval(t)
    }

    /// `(γ(t), γ'(t))`, one-sided at mesh nodes.
    pub fn at_with_derivative(&self, t: f64) -> (Mat, Mat) {
        let t = t.clamp(0.0, self.duration);
        let idx = self
            .pieces
            .partition_point(|p| p.t1 < t)
            .min(self.pieces.len() - 1);
        let (m, d) = eval_terms_d(&self.pieces[idx].terms, t);
        let d = d.unwrap_or_else(|| Mat::zeros(m.nrows(), m.ncols()));
        (m, d)
    }

    pub fn start(&self) -> Mat {
        self.pieces[0].eval(self.pieces[0].t0)
    }

    pub fn end(&self) -> Mat {
        let last = &self.pieces[self.pieces.len() - 1];
        last.eval(last.t1)
    }

    /// Mesh nodes `t_0 = 0 < t_1 < … < t_K = duration`.
    pub fn node_times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self.pieces.iter().map(|p| p.t0).collect();
        times.push(self.duration);
        times
    }

    /// Mesh nodes with every piece subdivided so that no interval carries
    /// more than `phase` of accumulated factor rate.
    pub(crate) fn scan_times(&self, phase: f64) -> Vec<f64> {
        let mut times = Vec::with_capacity(self.pieces.len() + 1);
        for p in &self.pieces {
            let rate = p
                .terms
                .iter()
                .map(|x| x.rate(p.t0).max(x.rate(p.t1)))
                .sum::<f64>();
            let parts = ((rate * (p.t1 - p.t0) / phase).ceil() as usize).clamp(1, 1 << 16);
            for k in 0..parts {
                times.push(p.t0 + (p.t1 - p.t0) * k as f64 / parts as f64);
            }
        }
        times.push(self.duration);
        times
    }

    /// Samples `(t_k, M_k)` at the mesh nodes.
    pub fn samples(&self) -> Vec<(f64, Mat)> {
        let mut out: Vec<(f64, Mat)> = self.pieces.iter().map(|p| (p.t0, p.eval(p.t0))).collect();
        out.push((self.duration, self.end()));
        out
    }

    pub fn node_count(&self) -> usize {
        self.pieces.len() + 1
    }

    /// Largest `‖M_{k+1} − M_k‖_max` over the mesh.
    pub fn mesh_fineness(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| max_norm(&(p.eval(p.t1) - p.eval(p.t0))))
            .fold(0.0, f64::max)
    }

    /// Split pieces until consecutive nodes differ by at most `bound`.
    pub fn refine(&mut self, bound: f64) {
        let mut out = Vec::with_capacity(self.pieces.len());
        for piece in self.pieces.drain(..) {
            split_until(piece, bound, 0, &mut out);
        }
        self.pieces = out;
    }

    /// Halve every piece, doubling the sample count.
    pub fn doubled(&self) -> Trajectory {
        let mut pieces = Vec::with_capacity(2 * self.pieces.len());
        for p in &self.pieces {
            let c = 0.5 * (p.t0 + p.t1);
            pieces.push(Piece {
                t0: p.t0,
                t1: c,
                terms: p.terms.clone(),
            });
            pieces.push(Piece {
                t0: c,
                t1: p.t1,
                terms: p.terms.clone(),
            });
        }
        Trajectory {
            n: self.n,
            duration: self.duration,
            pieces,
        }
    }

    /// Largest max-norm of a factored power; large values call for the
    /// factored evaluation of [`Trajectory::factors_at`].
    pub(crate) fn power_norm(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.terms.iter())
            .filter_map(|term| match term {
                Term::Power { dense, .. } => Some(max_norm(dense)),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    /// Factors whose product is `self.at(t)`, left to right, with powers
    /// left in their grouped form.
    pub(crate) fn factors_at(&self, t: f64) -> Vec<Mat> {
        let piece = self.piece_at(t);
        let t = t.clamp(0.0, self.duration);
        let mut raw: Vec<Mat> = Vec::new();
        for term in &piece.terms {
            match term {
                Term::Power { chunks, dense, .. } if max_norm(dense) > FACTOR_BOUND => {
                    raw.extend(chunks.iter().cloned())
                }
                other => raw.push(other.eval(t)),
            }
        }
        group_factors(raw, FACTOR_BOUND)
    }

    /// `γ(t) = L(t)·K·R(t)` around the largest power `K` of the piece at `t`,
    /// when that power exceeds `FACTOR_BOUND`.
    pub(crate) fn power_split(&self, t: f64) -> Option<PowerSplit> {
        let piece = self.piece_at(t);
        let t = t.clamp(0.0, self.duration);
        let (at, chunks) = piece
            .terms
            .iter()
            .enumerate()
            .filter_map(|(k, term)| match term {
                Term::Power { dense, chunks, .. } => Some((k, max_norm(dense), chunks)),
                _ => None,
            })
            .filter(|(_, norm, _)| *norm > FACTOR_BOUND)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _, chunks)| (k, Arc::clone(chunks)))?;
        let dim = 2 * self.n;
        let side = |terms: &[Term]| {
            if terms.is_empty() {
                (Mat::identity(dim, dim), Mat::zeros(dim, dim))
            } else {
                let (m, d) = eval_terms_d(terms, t);
                (m, d.unwrap_or_else(|| Mat::zeros(dim, dim)))
            }
        };
        let (left, d_left) = side(&piece.terms[..at]);
        let (right, d_right) = side(&piece.terms[at + 1..]);
        Some(PowerSplit {
            left,
            d_left,
            right,
            d_right,
            chunks,
        })
    }

    fn piece_at(&self, t: f64) -> &Piece {
        let t = t.clamp(0.0, self.duration);
        let idx = self
            .pieces
            .partition_point(|p| p.t1 < t)
            .min(self.pieces.len() - 1);
        &self.pieces[idx]
    }

    /// Maximum symplectic defect over the nodes.
    pub fn max_defect(&self) -> f64 {
        self.samples()
            .iter()
            .map(|(_, m)| symplectic_defect(m))
            .fold(0.0, f64::max)
    }

    /// Pointwise product `self(t) · factor(t)` where the factor is supplied
    /// as right terms; used by perturbation families.
    fn right_terms(&self, extra: &[Term]) -> Trajectory {
        Trajectory {
            n: self.n,
            duration: self.duration,
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    let mut terms = p.terms.clone();
                    terms.extend(extra.iter().cloned());
                    Piece {
                        t0: p.t0,
                        t1: p.t1,
                        terms: compact(terms),
                    }
                })
                .collect(),
        }
    }

    /// Break times of the pieces (exclusive of the ends).
    pub(crate) fn interior_breaks(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.t0).collect()
    }

    /// Split pieces at the given times (no-op for times already on the mesh).
    fn split_at(&self, times: &[f64]) -> Trajectory {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let mut cuts: Vec<f64> = times
                .iter()
                .copied()
                .filter(|&t| t > p.t0 + 1e-14 && t < p.t1 - 1e-14)
                .collect();
            cuts.sort_by(f64::total_cmp);
            let mut start = p.t0;
            for c in cuts {
                pieces.push(Piece {
                    t0: start,
                    t1: c,
                    terms: p.terms.clone(),
                });
                start = c;
            }
            pieces.push(Piece {
                t0: start,
                t1: p.t1,
                terms: p.terms.clone(),
            });
        }
        Trajectory {
            n: self.n,
            duration: self.duration,
            pieces,
        }
    }
}

/// See [`Trajectory::power_split`]; `chunks` multiply out to `K`.
pub(crate) struct PowerSplit {
    pub left: Mat,
    pub d_left: Mat,
    pub right: Mat,
    pub d_right: Mat,
    pub chunks: Arc<Vec<Mat>>,
}

/// Multiply neighbouring factors while the product stays below `bound`.
pub(crate) fn group_factors(raw: Vec<Mat>, bound: f64) -> Vec<Mat> {
    let mut out: Vec<Mat> = Vec::with_capacity(raw.len());
    for f in raw {
        if let Some(last) = out.last_mut() {
            let joined = &*last * &f;
            if max_norm(&joined) <= bound {
                *last = joined;
                continue;
            }
        }
        out.push(f);
    }
    out
}

fn split_until(piece: Piece, bound: f64, depth: u32, out: &mut Vec<Piece>) {
    let jump = max_norm(&(piece.eval(piece.t1) - piece.eval(piece.t0)));
    if jump <= bound || depth >= MAX_SPLIT_DEPTH {
        out.push(piece);
        return;
    }
    let c = 0.5 * (piece.t0 + piece.t1);
    let left = Piece {
        t0: piece.t0,
        t1: c,
        terms: piece.terms.clone(),
    };
    let right = Piece {
        t0: c,
        t1: piece.t1,
        terms: piece.terms,
    };
    split_until(left, bound, depth + 1, out);
    split_until(right, bound, depth + 1, out);
}

/// `η∗ξ`: `first` on the first half of `[0, τ]`, `second` on the second half,
/// where `τ` is the common duration.
pub fn concatenate(first: &Trajectory, second: &Trajectory) -> Result<Trajectory> {
    if first.n != second.n {
        return Err(Error::DimensionMismatch {
            expected: first.n,
            found: second.n,
        });
    }
    let gap = max_norm(&(first.end() - second.start()));
    if gap > 1e-8 {
        return Err(Error::EndpointMismatch { gap });
    }
    let tau = first.duration.max(second.duration);
    let f1 = 0.5 * tau / first.duration;
    let f2 = 0.5 * tau / second.duration;
    let mut pieces: Vec<Piece> = first.pieces.iter().map(|p| p.retime(0.0, f1)).collect();
    pieces.extend(second.pieces.iter().map(|p| p.retime(0.5 * tau, f2)));
    // make the junction exact
    let mid = pieces.len() - second.pieces.len();
    pieces[mid - 1].t1 = 0.5 * tau;
    pieces[mid].t0 = 0.5 * tau;
    let last = pieces.len() - 1;
    pieces[last].t1 = tau;
    Ok(Trajectory {
        n: first.n,
        duration: tau,
        pieces,
    })
}

fn flow_piece(t0: f64, t1: f64, generator: Mat, right: Mat) -> Piece {
    Piece {
        t0,
        t1,
        terms: compact(vec![
            Term::Flow {
                generator,
                origin: t0,
            },
            Term::Const(right),
        ]),
    }
}

/// How a path was built; carried into reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Provenance {
    Integrated { steps: usize },
    Analytic { label: String },
    Iterated { m: u32, base: Box<Provenance> },
    PIterated { m: u32, base: Box<Provenance> },
    Concatenated,
    DirectSum { left: Box<Provenance>, right: Box<Provenance> },
    Conjugated { base: Box<Provenance> },
    Perturbed { label: String, base: Box<Provenance> },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Integrated { steps } => write!(f, "integrated({steps})"),
            Provenance::Analytic { label } => write!(f, "{label}"),
            Provenance::Iterated { m, base } => write!(f, "({base})^{m}"),
            Provenance::PIterated { m, base } => write!(f, "P-iterate({base}, {m})"),
            Provenance::Concatenated => write!(f, "concatenated"),
            Provenance::DirectSum { left, right } => write!(f, "{left} <> {right}"),
            Provenance::Conjugated { base } => write!(f, "conj({base})"),
            Provenance::Perturbed { label, base } => write!(f, "{label}({base})"),
        }
    }
}

/// Time-dependent symmetric coefficient matrix `B(t)` of `ẋ = J B(t) x`.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianData {
    Constant(Mat),
    /// `blocks[k]` holds on `(ends[k-1], ends[k]]`, with `ends.last() == tau`.
    PiecewiseConstant { ends: Vec<f64>, blocks: Vec<Mat> },
    /// `B(t) = Σ cos_k cos(2πkt/τ) + sin_k sin(2πkt/τ)`.
    TrigPolynomial { terms: Vec<TrigTerm> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrigTerm {
    pub frequency: u32,
    pub cos: Mat,
    pub sin: Mat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianKind {
    Constant,
    PiecewiseConstant,
    TrigPolynomial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianDescriptor {
    n: usize,
    tau: f64,
    data: HamiltonianData,
}

fn check_symmetric(m: &Mat, n: usize, what: &str) -> Result<()> {
    if m.shape() != (2 * n, 2 * n) {
        return Err(Error::InvalidInput(format!(
            "{what}: expected {0}x{0} matrix, got {1}x{2}",
            2 * n,
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what}: non-finite entry")));
    }
    let asym = max_norm(&(m - m.transpose()));
    if asym > SYMMETRY_TOL {
        return Err(Error::InvalidInput(format!(
            "{what}: not symmetric (asymmetry {asym:e})"
        )));
    }
    Ok(())
}

impl HamiltonianDescriptor {
    pub fn new(n: usize, tau: f64, data: HamiltonianData) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        match &data {
            HamiltonianData::Constant(b) => check_symmetric(b, n, "constant block")?,
            HamiltonianData::PiecewiseConstant { ends, blocks } => {
                if ends.is_empty() || ends.len() != blocks.len() {
                    return Err(Error::InvalidInput(
                        "piecewise-constant needs one end time per block".into(),
                    ));
                }
                let mut prev = 0.0;
                for (k, &e) in ends.iter().enumerate() {
                    if !(e > prev) {
                        return Err(Error::InvalidInput(format!(
                            "breakpoints must be strictly increasing (block {k})"
                        )));
                    }
                    prev = e;
                }
                if (prev - tau).abs() > 1e-12 * tau.max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "last breakpoint {prev} must equal tau {tau}"
                    )));
                }
                for (k, b) in blocks.iter().enumerate() {
                    check_symmetric(b, n, &format!("block {k}"))?;
                }
            }
            HamiltonianData::TrigPolynomial { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidInput("trig-polynomial needs a term".into()));
                }
                for t in terms {
                    check_symmetric(&t.cos, n, &format!("cos coefficient (k={})", t.frequency))?;
                    check_symmetric(&t.sin, n, &format!("sin coefficient (k={})", t.frequency))?;
                }
            }
        }
        Ok(Self { n, tau, data })
    }

    pub fn constant(b: Mat, tau: f64) -> Result<Self> {
        let n = b.nrows() / 2;
        Self::new(n, tau, HamiltonianData::Constant(b))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn data(&self) -> &HamiltonianData {
        &self.data
    }

    pub fn kind(&self) -> HamiltonianKind {
        match self.data {
            HamiltonianData::Constant(_) => HamiltonianKind::Constant,
            HamiltonianData::PiecewiseConstant { .. } => HamiltonianKind::PiecewiseConstant,
            HamiltonianData::TrigPolynomial { .. } => HamiltonianKind::TrigPolynomial,
        }
    }

    /// `B(t)`; piecewise blocks are right-continuous at interior breakpoints.
    pub fn value_at(&self, t: f64) -> Mat {
        match &self.data {
            HamiltonianData::Constant(b) => b.clone(),
            HamiltonianData::PiecewiseConstant { ends, blocks } => {
                let k = ends.partition_point(|&e| e <= t).min(blocks.len() - 1);
                blocks[k].clone()
            }
            HamiltonianData::TrigPolynomial { terms } => {
                let dim = 2 * self.n;
                let w = std::f64::consts::TAU * t / self.tau;
                terms.iter().fold(Mat::zeros(dim, dim), |acc, term| {
                    let arg = w * f64::from(term.frequency);
                    acc + &term.cos * arg.cos() + &term.sin * arg.sin()
                })
            }
        }
    }
}

/// Exponential midpoint propagation of `γ̇ = J B(t) γ`.
pub fn integrate(desc: &HamiltonianDescriptor, steps: usize) -> Result<SymplecticPath> {
    integrate_with_mesh(desc, steps, MESH_BOUND)
}

pub fn integrate_with_mesh(
    desc: &HamiltonianDescriptor,
    steps: usize,
    mesh_bound: f64,
) -> Result<SymplecticPath> {
    if steps < 8 {
        return Err(Error::InvalidInput(format!("steps must be at least 8, got {steps}")));
    }
    let n = desc.n;
    let j = structure(n);
    let mut steps_now = steps;
    loop {
        let grid = step_grid(desc, steps_now);
        let mut pieces = Vec::with_capacity(grid.len());
        let mut current = Mat::identity(2 * n, 2 * n);
        for (t0, t1, b) in grid {
            let generator = &j * b;
            let next = expm(&(&generator * (t1 - t0))) * &current;
            pieces.push(flow_piece(t0, t1, generator, current));
            current = next;
        }
        let defect = symplectic_defect(&current);
        if defect <= SYMPLECTIC_TOL {
            let mut traj = Trajectory {
                n,
                duration: desc.tau,
                pieces,
            };
            traj.refine(mesh_bound);
            return Ok(SymplecticPath {
                traj,
                generator: Some(desc.clone()),
                provenance: Provenance::Integrated { steps: steps_now },
            });
        }
        if steps_now >= STEP_CAP {
            return Err(Error::NoConvergence {
                defect,
                steps: steps_now,
            });
        }
        steps_now *= 2;
    }
}

/// Step intervals and the coefficient used on each (midpoint value, exact on
/// constant blocks because blocks are never straddled).
fn step_grid(desc: &HamiltonianDescriptor, steps: usize) -> Vec<(f64, f64, Mat)> {
    let tau = desc.tau;
    match &desc.data {
        HamiltonianData::Constant(b) => uniform(0.0, tau, steps)
            .map(|(a, c)| (a, c, b.clone()))
            .collect(),
        HamiltonianData::PiecewiseConstant { ends, blocks } => {
            let mut out = Vec::new();
            let mut start = 0.0;
            let last = ends.len() - 1;
            for (k, (&end, block)) in ends.iter().zip(blocks).enumerate() {
                let end = if k == last { tau } else { end };
                let share = (((end - start) / tau) * steps as f64).round() as usize;
                for (a, c) in uniform(start, end, share.max(1)) {
                    out.push((a, c, block.clone()));
                }
                start = end;
            }
            out
        }
        HamiltonianData::TrigPolynomial { .. } => uniform(0.0, tau, steps)
            .map(|(a, c)| (a, c, desc.value_at(0.5 * (a + c))))
            .collect(),
    }
}

fn uniform(a: f64, b: f64, k: usize) -> impl Iterator<Item = (f64, f64)> {
    let h = (b - a) / k as f64;
    (0..k).map(move |i| {
        let t0 = a + h * i as f64;
        let t1 = if i + 1 == k { b } else { a + h * (i + 1) as f64 };
        (t0, t1)
    })
}

/// A path `γ ∈ 𝒫_τ(2n)`: continuous, symplectic, `γ(0) = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticPath {
    traj: Trajectory,
    generator: Option<HamiltonianDescriptor>,
    provenance: Provenance,
}

impl std::ops::Deref for SymplecticPath {
    type Target = Trajectory;

    fn deref(&self) -> &Trajectory {
        &self.traj
    }
}

impl SymplecticPath {
    /// Accept a trajectory starting at the identity.
    pub fn from_trajectory(traj: Trajectory, provenance: Provenance) -> Result<Self> {
        let dim = 2 * traj.n;
        let gap = max_norm(&(traj.start() - Mat::identity(dim, dim)));
        if gap > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "path must start at the identity (gap {gap:e})"
            )));
        }
        let defect = traj.max_defect();
        if defect > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic {
                defect,
                tol: SYMPLECTIC_TOL,
            });
        }
        Ok(Self {
            traj,
            generator: None,
            provenance,
        })
    }

    /// `t ↦ exp(t · G)` on `[0, τ]` for a Hamiltonian matrix `G = J B`.
    pub fn flow(generator: Mat, tau: f64, provenance: Provenance) -> Self {
        let n = generator.nrows() / 2;
        let dim = 2 * n;
        let mut traj = Trajectory {
            n,
            duration: tau,
            pieces: vec![flow_piece(0.0, tau, generator, Mat::identity(dim, dim))],
        };
        traj.refine(MESH_BOUND);
        Self {
            traj,
            generator: None,
            provenance,
        }
    }

    /// `γ_θ(t) = exp(tθJ/τ)` on `[0, τ]`, so that `γ_θ(τ) = exp(θJ)`.
    pub fn rotation(n: usize, theta: f64, tau: f64) -> Self {
        let mut p = Self::flow(
            structure(n) * (theta / tau),
            tau,
            Provenance::Analytic {
                label: format!("rotation({theta})"),
            },
        );
        p.generator = Some(
            HamiltonianDescriptor::constant(Mat::identity(2 * n, 2 * n) * (theta / tau), tau)
                .expect("scalar block is symmetric"),
        );
        p
    }

    /// `t ↦ diag(e^{−at}, …, e^{at}, …)` on `[0, τ]`.
    pub fn hyperbolic(n: usize, a: f64, tau: f64) -> Self {
        let mut b = Mat::zeros(2 * n, 2 * n);
        for i in 0..n {
            b[(i, n + i)] = a;
            b[(n + i, i)] = a;
        }
        let mut p = Self::flow(
            structure(n) * &b,
            tau,
            Provenance::Analytic {
                label: format!("hyperbolic({a})"),
            },
        );
        p.generator = Some(HamiltonianDescriptor::constant(b, tau).expect("symmetric"));
        p
    }

    /// The constant path `t ↦ I`.
    pub fn identity(n: usize, tau: f64) -> Self {
        Self::flow(
            Mat::zeros(2 * n, 2 * n),
            tau,
            Provenance::Analytic {
                label: "identity".into(),
            },
        )
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    pub fn tau(&self) -> f64 {
        self.traj.duration
    }

    pub fn generator(&self) -> Option<&HamiltonianDescriptor> {
        self.generator.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn endpoint(&self) -> SymplecticMatrix {
        SymplecticMatrix::trusted(self.traj.end())
    }

    pub fn refined(&self, bound: f64) -> Self {
        let mut out = self.clone();
        out.traj.refine(bound);
        out
    }

    /// Same path with every mesh interval halved.
    pub fn doubled(&self) -> Self {
        Self {
            traj: self.traj.doubled(),
            generator: self.generator.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// `γᵐ(t) = γ(t − jτ) γ(τ)^j` on `[jτ, (j+1)τ]`.
    pub fn iterate(&self, m: u32) -> Self {
        if m <= 1 {
            return self.clone();
        }
        let tau = self.tau();
        let end = self.traj.end();
        let mut pieces = Vec::with_capacity(self.traj.pieces.len() * m as usize);
        for j in 0..m {
            let offset = tau * f64::from(j);
            for p in &self.traj.pieces {
                let shifted = p.retime(offset, 1.0);
                pieces.push(if j == 0 {
                    shifted
                } else {
                    shifted.with_terms(None, Some(Term::power(&end, j)))
                });
            }
        }
        Self {
            traj: Trajectory {
                n: self.traj.n,
                duration: tau * f64::from(m),
                pieces,
            },
            generator: self.generator.clone(),
            provenance: Provenance::Iterated {
                m,
                base: Box::new(self.provenance.clone()),
            },
        }
    }

    /// Iteration by `γ(t + τ) = P γ(t) P γ(τ)`, i.e. `γ(s + jτ) = P^j γ(s) (Pγ(τ))^j`.
    ///
    /// The recursion at `t = 0` forces `P² = I`; other `P` are rejected.
    pub fn p_iterate(&self, p: &SymplecticMatrix, m: u32) -> Result<Self> {
        if p.n() != self.traj.n {
            return Err(Error::DimensionMismatch {
                expected: self.traj.n,
                found: p.n(),
            });
        }
        let dim = 2 * p.n();
        let sq = max_norm(&(p.matrix() * p.matrix() - Mat::identity(dim, dim)));
        if sq > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "P-iteration requires P^2 = I (defect {sq:e})"
            )));
        }
        if m <= 1 {
            return Ok(self.clone());
        }
        let tau = self.tau();
        let step = p.matrix() * self.traj.end();
        let mut pieces = Vec::with_capacity(self.traj.pieces.len() * m as usize);
        let mut left = Mat::identity(dim, dim);
        for j in 0..m {
            let offset = tau * f64::from(j);
            for piece in &self.traj.pieces {
                let shifted = piece.retime(offset, 1.0);
                pieces.push(if j == 0 {
                    shifted
                } else {
                    shifted.with_terms(Some(&left), Some(Term::power(&step, j)))
                });
            }
            left = &left * p.matrix();
        }
        Ok(Self {
            traj: Trajectory {
                n: self.traj.n,
                duration: tau * f64::from(m),
                pieces,
            },
            generator: None,
            provenance: Provenance::PIterated {
                m,
                base: Box::new(self.provenance.clone()),
            },
        })
    }

    /// `t ↦ P⁻¹ γ(t) P`.
    pub fn conjugated(&self, p: &SymplecticMatrix) -> Result<Self> {
        if p.n() != self.traj.n {
            return Err(Error::DimensionMismatch {
                expected: self.traj.n,
                found: p.n(),
            });
        }
        let inv = p.inverse();
        let pieces = self
            .traj
            .pieces
            .iter()
            .map(|x| x.with_terms(Some(inv.matrix()), Some(Term::Const(p.matrix().clone()))))
            .collect();
        Ok(Self {
            traj: Trajectory {
                n: self.traj.n,
                duration: self.traj.duration,
                pieces,
            },
            generator: None,
            provenance: Provenance::Conjugated {
                base: Box::new(self.provenance.clone()),
            },
        })
    }

    /// Block direct sum `γ′ ⋄ γ″` on a common interval.
    pub fn diamond(&self, other: &Self) -> Result<Self> {
        if (self.tau() - other.tau()).abs() > 1e-12 * self.tau().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "direct sum needs equal durations ({} vs {})",
                self.tau(),
                other.tau()
            )));
        }
        let mut cuts = self.traj.interior_breaks();
        cuts.extend(other.traj.interior_breaks());
        let a = self.traj.split_at(&cuts);
        let b = other.traj.split_at(&cuts);
        let pieces = a
            .pieces
            .iter()
            .zip(&b.pieces)
            .map(|(x, y)| Piece {
                t0: x.t0,
                t1: x.t1,
                terms: vec![Term::Sum(x.terms.clone(), y.terms.clone())],
            })
            .collect();
        Ok(Self {
            traj: Trajectory {
                n: self.traj.n + other.traj.n,
                duration: self.tau(),
                pieces,
            },
            generator: None,
            provenance: Provenance::DirectSum {
                left: Box::new(self.provenance.clone()),
                right: Box::new(other.provenance.clone()),
            },
        })
    }

    /// `t ↦ γ(t) · exp((t/τ) · X)` for a Hamiltonian `X`; fixes `γ(0) = I`.
    pub fn right_rotated(&self, x: &Mat, label: &str) -> Self {
        let tau = self.tau();
        let term = Term::Flow {
            generator: x / tau,
            origin: 0.0,
        };
        Self {
            traj: self.traj.right_terms(&[term]),
            generator: None,
            provenance: Provenance::Perturbed {
                label: label.to_string(),
                base: Box::new(self.provenance.clone()),
            },
        }
    }

    /// `γ∗ζ` with `ζ` the extension path on the same interval.
    pub fn extended(&self) -> Result<Trajectory> {
        let zeta = ExtensionPath::new(self.traj.n, self.tau());
        concatenate(zeta.trajectory(), &self.traj)
    }
}

/// `ζ(t) = diag(2 − t/τ, …, (2 − t/τ)^{-1}, …)` from `diag(2, 1/2)` to `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionPath {
    traj: Trajectory,
}

impl ExtensionPath {
    pub fn new(n: usize, tau: f64) -> Self {
        Self {
            traj: Trajectory {
                n,
                duration: tau,
                pieces: vec![Piece {
                    t0: 0.0,
                    t1: tau,
                    terms: vec![Term::Stretch {
                        n,
                        t0: 0.0,
                        t1: tau,
                        a0: 2.0,
                        a1: 1.0,
                    }],
                }],
            },
        }
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    pub fn at(&self, t: f64) -> Mat {
        self.traj.at(t)
    }
}

/// Free-function forms mirroring the operation list.
pub fn iterate(gamma: &SymplecticPath, m: u32) -> SymplecticPath {
    gamma.iterate(m)
}

pub fn p_iterate(gamma: &SymplecticPath, p: &SymplecticMatrix, m: u32) -> Result<SymplecticPath> {
    gamma.p_iterate(p, m)
}

pub fn extension_zeta(n: usize, tau: f64) -> ExtensionPath {
    ExtensionPath::new(n, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        max_norm(&(a - b)) <= tol
    }

    fn sym2(a: f64, b: f64, c: f64) -> Mat {
        Mat::from_row_slice(2, 2, &[a, b, b, c])
    }

    #[test]
    fn constant_rotation_is_exact_at_nodes() {
        let theta = 1.3;
        let desc = HamiltonianDescriptor::constant(Mat::identity(2, 2) * theta, 1.0).unwrap();
        let path = integrate(&desc, 8).unwrap();
        for (t, m) in path.samples() {
            let exact = SymplecticMatrix::rotation(1, theta * t);
            assert!(close(&m, exact.matrix(), 1e-12), "t = {t}");
        }
        assert!(path.mesh_fineness() <= MESH_BOUND);
    }

    #[test]
    fn hyperbolic_closed_form() {
        let a = 0.8;
        let desc = HamiltonianDescriptor::constant(sym2(0.0, a, 0.0), 1.0).unwrap();
        let path = integrate(&desc, 16).unwrap();
        for (t, m) in path.samples() {
            let exact = Mat::from_row_slice(2, 2, &[(-a * t).exp(), 0.0, 0.0, (a * t).exp()]);
            assert!(close(&m, &exact, 1e-10));
        }
    }

    #[test]
    fn piecewise_constant_is_product_of_exponentials() {
        let b1 = sym2(1.0, 0.3, -0.5);
        let b2 = sym2(-0.2, 0.9, 0.4);
        let desc = HamiltonianDescriptor::new(
            1,
            1.0,
            HamiltonianData::PiecewiseConstant {
                ends: vec![0.35, 1.0],
                blocks: vec![b1.clone(), b2.clone()],
            },
        )
        .unwrap();
        let path = integrate(&desc, 8).unwrap();
        let j = structure(1);
        let oracle = expm(&(&j * &b2 * 0.65)) * expm(&(&j * &b1 * 0.35));
        assert!(close(&path.end(), &oracle, 1e-12));
        assert!(close(&path.at(0.2), &expm(&(&j * &b1 * 0.2)), 1e-12));
    }

    #[test]
    fn integrate_rejects_few_steps_and_bad_blocks() {
        let desc = HamiltonianDescriptor::constant(Mat::identity(2, 2), 1.0).unwrap();
        assert!(integrate(&desc, 4).is_err());
        assert!(HamiltonianDescriptor::constant(Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]), 1.0).is_err());
        let bad = HamiltonianDescriptor::new(
            1,
            1.0,
            HamiltonianData::PiecewiseConstant {
                ends: vec![0.6, 0.5],
                blocks: vec![Mat::identity(2, 2), Mat::identity(2, 2)],
            },
        );
        assert!(bad.is_err());
    }

    #[test]
    fn trig_polynomial_converges() {
        let desc = HamiltonianDescriptor::new(
            1,
            1.0,
            HamiltonianData::TrigPolynomial {
                terms: vec![
                    TrigTerm {
                        frequency: 0,
                        cos: Mat::identity(2, 2) * 2.0,
                        sin: Mat::zeros(2, 2),
                    },
                    TrigTerm {
                        frequency: 1,
                        cos: sym2(0.5, 0.0, -0.5),
                        sin: sym2(0.0, 0.4, 0.0),
                    },
                ],
            },
        )
        .unwrap();
        let coarse = integrate(&desc, 64).unwrap();
        let fine = integrate(&desc, 1024).unwrap();
        assert!(close(&coarse.end(), &fine.end(), 1e-3));
        assert!(fine.max_defect() < 1e-10);
    }

    #[test]
    fn iterate_examples() {
        let g = SymplecticPath::rotation(1, 0.9, 1.0);
        assert_eq!(g.iterate(1), g);
        let g3 = g.iterate(3);
        assert!((g3.duration() - 3.0).abs() < 1e-15);
        for k in 0..=30 {
            let t = 0.1 * k as f64;
            assert!(close(&g3.at(t), SymplecticMatrix::rotation(1, 0.9 * t).matrix(), 1e-12));
        }
        let desc = HamiltonianDescriptor::constant(sym2(0.3, 1.1, -0.4), 1.0).unwrap();
        let h = integrate(&desc, 8).unwrap();
        let h2 = h.iterate(2);
        let s = 0.37;
        assert!(close(&h2.at(1.0 + s), &(h.at(s) * h.end()), 1e-12));
        let h4 = h.iterate(4);
        for j in 0..=4u32 {
            assert!(close(&h4.at(f64::from(j)), &mat_pow(&h.end(), j), 1e-8));
        }
    }

    #[test]
    fn p_iterate_examples() {
        let g = SymplecticPath::rotation(1, 0.7, 1.0);
        let id = SymplecticMatrix::identity(1);
        let a = g.p_iterate(&id, 2).unwrap();
        let b = g.iterate(2);
        for k in 0..=20 {
            let t = 0.1 * k as f64;
            assert!(close(&a.at(t), &b.at(t), 1e-12));
        }
        assert_eq!(g.p_iterate(&id, 1).unwrap(), g);
        let minus = SymplecticMatrix::certify(-Mat::identity(2, 2), 1e-12).unwrap();
        let c = g.p_iterate(&minus, 2).unwrap();
        let s = 0.42;
        // direct recursion: γ(1+s) = Pγ(s)Pγ(1)
        let rec = minus.matrix() * g.at(s) * minus.matrix() * g.end();
        assert!(close(&c.at(1.0 + s), &rec, 1e-12));
        let twice = SymplecticMatrix::rotation(1, 0.3);
        assert!(g.p_iterate(&twice, 2).is_err());
        assert!(g.p_iterate(&SymplecticMatrix::identity(2), 2).is_err());
    }

    #[test]
    fn extension_path_formula() {
        let z = extension_zeta(2, 1.0);
        let at0 = z.at(0.0);
        assert!(close(&at0, SymplecticMatrix::stretch(2, 2.0).matrix(), 0.0));
        assert!(close(&z.at(1.0), &Mat::identity(4, 4), 1e-15));
        let z1 = extension_zeta(1, 2.0);
        assert!(close(&z1.at(1.0), &Mat::from_row_slice(2, 2, &[1.5, 0.0, 0.0, 2.0 / 3.0]), 1e-12));
        for k in 0..=10 {
            let t = 0.2 * k as f64;
            let a = 2.0 - t / 2.0;
            assert!(close(&z1.at(t), &Mat::from_row_slice(2, 2, &[a, 0.0, 0.0, 1.0 / a]), 1e-12));
        }
    }

    #[test]
    fn concatenation_examples() {
        let g = SymplecticPath::rotation(1, PI, 1.0);
        let ext = g.extended().unwrap();
        assert!(close(&ext.at(0.5), &Mat::identity(2, 2), 1e-14));
        assert!(close(&ext.at(0.0), SymplecticMatrix::stretch(1, 2.0).matrix(), 0.0));
        assert!(close(&ext.at(0.75), SymplecticMatrix::rotation(1, PI / 2.0).matrix(), 1e-12));

        let xi = SymplecticPath::rotation(1, 2.0 * PI, 1.0);
        let tail = SymplecticPath::identity(1, 1.0);
        let joined = concatenate(&xi, &tail).unwrap();
        assert!(close(&joined.at(0.25), &xi.at(0.5), 1e-12));
        assert!(close(&joined.at(1.0), &xi.end(), 1e-12));

        let other = SymplecticPath::rotation(1, 0.5, 1.0);
        assert!(matches!(
            concatenate(&other, &other),
            Err(Error::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let b = Mat::from_row_slice(4, 4, &[1.0, 0.2, 0.0, 0.3, 0.2, 0.5, 0.1, 0.0, 0.0, 0.1, 2.0, 0.4, 0.3, 0.0, 0.4, 1.0]);
        let base = SymplecticPath::flow(structure(2) * &b, 1.0, Provenance::Analytic { label: "b".into() });
        let other = SymplecticPath::rotation(2, 1.3, 1.0);
        let paths = [
            base.iterate(3).extended().unwrap(),
            base.diamond(&other).unwrap().trajectory().clone(),
            base.right_rotated(&(structure(2) * 0.1), "r").trajectory().clone(),
        ];
        for traj in &paths {
            for k in 1..20 {
                let t = traj.duration() * (k as f64 + 0.37) / 20.0;
                let (m, d) = traj.at_with_derivative(t);
                assert!(max_norm(&(&m - traj.at(t))) < 1e-12);
                let h = 1e-6;
                let fd = (traj.at(t + h) - traj.at(t - h)) / (2.0 * h);
                assert!(max_norm(&(&d - fd)) < 1e-5 * max_norm(&d).max(1.0));
            }
        }
    }

    #[test]
    fn refinement_is_idempotent() {
        let g = SymplecticPath::rotation(2, 7.0, 1.0);
        assert!(g.mesh_fineness() <= MESH_BOUND);
        let nodes = g.samples();
        let again = g.refined(MESH_BOUND);
        assert_eq!(again.samples(), nodes);
        let finer = g.refined(0.05);
        let finer_times = finer.node_times();
        for (t, m) in nodes {
            let k = finer_times.iter().position(|&s| s == t).expect("node kept");
            assert_eq!(finer.samples()[k].1, m);
        }
    }

    #[test]
    fn direct_sum_blocks() {
        let a = SymplecticPath::rotation(1, 2.0, 1.0);
        let b = SymplecticPath::hyperbolic(1, 0.5, 1.0);
        let s = a.diamond(&b).unwrap();
        assert_eq!(s.n(), 2);
        let t = 0.63;
        assert!(close(&s.at(t), &diamond(&a.at(t), &b.at(t)), 1e-13));
        assert!(s.max_defect() < 1e-12);
    }

    #[test]
    fn right_rotation_family_keeps_start() {
        let g = SymplecticPath::rotation(1, 2.0 * PI, 1.0);
        let gs = g.right_rotated(&(structure(1) * -1e-3), "ladder");
        assert!(close(&gs.start(), &Mat::identity(2, 2), 0.0));
        assert!(close(
            &gs.end(),
            SymplecticMatrix::rotation(1, 2.0 * PI - 1e-3).matrix(),
            1e-12
        ));
    }
}
