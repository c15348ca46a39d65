//! Dense symplectic linear algebra on `R^{2n}`.
//!
//! Coordinates are ordered `(q_1..q_n, p_1..p_n)` and the structure matrix is
//! `J = [[0, -I], [I, 0]]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circle::UnitCirclePoint;
use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

/// Default threshold for "eigenvalue lies on the unit circle" and for rank
/// decisions.
pub const EIG_TOL: f64 = 1e-8;
/// Default symplectic defect tolerance used when certifying path samples.
pub const SYMPLECTIC_TOL: f64 = 1e-8;
/// Computed eigenvalues closer than this are treated as one cluster.
const CLUSTER_RADIUS: f64 = 1e-5;

/// The standard structure matrix `J` of half-dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureMatrix {
    n: usize,
    entries: Mat,
}

impl StructureMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: structure(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.entries
    }
}

pub(crate) fn structure(n: usize) -> Mat {
    let mut j = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// Largest absolute entry.
pub fn max_norm(m: &Mat) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// `‖MᵀJM − J‖_max`.
pub fn symplectic_defect(m: &Mat) -> f64 {
    let n = m.nrows() / 2;
    let j = structure(n);
    max_norm(&(m.transpose() * &j * m - j))
}

/// A real `2n×2n` matrix with a recorded symplectic defect.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    entries: Mat,
    defect: f64,
}

impl SymplecticMatrix {
    /// Certify `matrix` as symplectic within `tol` (max-norm of `MᵀJM − J`).
    pub fn certify(matrix: Mat, tol: f64) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows % 2 != 0 || rows == 0 {
            return Err(Error::OddDimension(rows));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
        }
        let defect = symplectic_defect(&matrix);
        if !(defect <= tol) {
            return Err(Error::NotSymplectic { defect, tol });
        }
        Ok(Self {
            n: rows / 2,
            entries: matrix,
            defect,
        })
    }

    /// Wrap a matrix already known to be symplectic up to rounding.
    pub(crate) fn trusted(matrix: Mat) -> Self {
        let defect = symplectic_defect(&matrix);
        Self {
            n: matrix.nrows() / 2,
            entries: matrix,
            defect,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            entries: Mat::identity(2 * n, 2 * n),
            defect: 0.0,
        }
    }

    /// `exp(θJ)`: simultaneous rotation by `θ` in every `(q_i, p_i)` plane.
    pub fn rotation(n: usize, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let mut m = Mat::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, i)] = c;
            m[(n + i, n + i)] = c;
            m[(i, n + i)] = -s;
            m[(n + i, i)] = s;
        }
        Self::trusted(m)
    }

    /// `diag(λ,…,λ, 1/λ,…,1/λ)`.
    pub fn stretch(n: usize, lambda: f64) -> Self {
        let mut m = Mat::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, i)] = lambda;
            m[(n + i, n + i)] = 1.0 / lambda;
        }
        Self::trusted(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.entries
    }

    pub fn into_matrix(self) -> Mat {
        self.entries
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// `M⁻¹ = −J Mᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = structure(self.n);
        Self::trusted(-(&j * self.entries.transpose() * &j))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same(self.n, other.n)?;
        Ok(Self::trusted(&self.entries * &other.entries))
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::trusted(mat_pow(&self.entries, k))
    }

    /// Symplectic direct sum `self ⋄ other` acting on `R^{2(n'+n'')}`.
    pub fn diamond(&self, other: &Self) -> Self {
        Self::trusted(diamond(&self.entries, &other.entries))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        max_norm(&(&self.entries - &other.entries))
    }
}

fn check_same(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

pub(crate) fn mat_pow(m: &Mat, mut k: u32) -> Mat {
    let mut result = Mat::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    result
}

/// Block interleaving for the symplectic direct sum of `2n'` and `2n''` matrices.
pub(crate) fn diamond(a: &Mat, b: &Mat) -> Mat {
    let n1 = a.nrows() / 2;
    let n2 = b.nrows() / 2;
    let n = n1 + n2;
    let mut m = Mat::zeros(2 * n, 2 * n);
    let map1 = |i: usize| if i < n1 { i } else { n + (i - n1) };
    let map2 = |i: usize| if i < n2 { n1 + i } else { n + n1 + (i - n2) };
    for r in 0..2 * n1 {
        for c in 0..2 * n1 {
            m[(map1(r), map1(c))] = a[(r, c)];
        }
    }
    for r in 0..2 * n2 {
        for c in 0..2 * n2 {
            m[(map2(r), map2(c))] = b[(r, c)];
        }
    }
    m
}

/// One unit-circle eigenvalue cluster of a symplectic matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub angle: UnitCirclePoint,
    pub multiplicity: usize,
    pub nullity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumOnU {
    pub entries: Vec<SpectrumEntry>,
    pub elliptic_height: usize,
}

impl SpectrumOnU {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn angles(&self) -> Vec<UnitCirclePoint> {
        self.entries.iter().map(|e| e.angle).collect()
    }

    /// Geometric nullity at `ω`, zero when `ω` is not a listed eigenvalue.
    pub fn nullity_at(&self, omega: &UnitCirclePoint, tol: f64) -> usize {
        self.entries
            .iter()
            .find(|e| e.angle.distance(omega) <= tol)
            .map_or(0, |e| e.nullity)
    }
}

/// Eigenvalues of `M` on the unit circle with algebraic multiplicity and
/// geometric nullity. Angles are snapped to rational turns when they sit
/// within `1e-9` turn of a fraction with denominator at most 64.
pub fn spectrum_on_unit_circle(m: &SymplecticMatrix, eig_tol: f64) -> SpectrumOnU {
    let eigs: Vec<Complex64> = m.entries.clone().complex_eigenvalues().iter().copied().collect();
    let clusters = cluster(&eigs, CLUSTER_RADIUS.max(eig_tol));
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (centre, mult) in clusters {
        if (centre.norm() - 1.0).abs() > eig_tol.max(CLUSTER_RADIUS * mult.saturating_sub(1) as f64) {
            continue;
        }
        let mut angle = centre.arg();
        if angle < 0.0 {
            angle += std::f64::consts::TAU;
        }
        let mut point = UnitCirclePoint::snapped(angle);
        if point.distance(&UnitCirclePoint::one()) <= eig_tol {
            point = UnitCirclePoint::one();
        }
        let lambda = point.to_complex();
        let nullity = complex_nullity(&m.entries, lambda, eig_tol);
        entries.push(SpectrumEntry {
            angle: point,
            multiplicity: mult,
            nullity: nullity.min(mult),
        });
    }
    entries.sort_by(|a, b| a.angle.radians().total_cmp(&b.angle.radians()));
    let elliptic_height = entries.iter().map(|e| e.multiplicity).sum();
    SpectrumOnU {
        entries,
        elliptic_height,
    }
}

/// Greedy clustering of eigenvalues; returns `(mean, count)` per cluster.
fn cluster(eigs: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut used = vec![false; eigs.len()];
    let mut out = Vec::new();
    for i in 0..eigs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![eigs[i]];
        // grow transitively so that a Jordan block's scattered roots stay together
        let mut changed = true;
        while changed {
            changed = false;
            for j in 0..eigs.len() {
                if !used[j] && members.iter().any(|z| (z - eigs[j]).norm() <= radius) {
                    used[j] = true;
                    members.push(eigs[j]);
                    changed = true;
                }
            }
        }
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

pub(crate) fn complexify(m: &Mat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Eigenvalues farther than this from `λ` rule out a kernel of `M − λI`.
const NULLITY_GATE: f64 = 1e-3;

/// `dim_C ker(M − λI)` by singular values below `tol · σ_max`, counted only
/// when some eigenvalue lies near `λ`.
pub fn complex_nullity(m: &Mat, lambda: Complex64, tol: f64) -> usize {
    let dim = m.nrows();
    let near = m
        .clone()
        .complex_eigenvalues()
        .iter()
        .any(|z| (z - lambda).norm() <= NULLITY_GATE);
    if !near {
        return 0;
    }
    let a = complexify(m) - CMat::identity(dim, dim) * lambda;
    let sv = a.singular_values();
    let smax = sv.iter().fold(0.0f64, |acc, s| acc.max(*s));
    if smax == 0.0 {
        return dim;
    }
    sv.iter().filter(|s| **s <= tol * smax.max(1.0)).count()
}

/// `ω^{-n} det(M − ωI)` as a complex number (real for symplectic `M`).
pub(crate) fn detector_complex(m: &Mat, omega: Complex64) -> Complex64 {
    let dim = m.nrows();
    let n = dim / 2;
    let det = match dim {
        2 => {
            let a = Complex64::new(m[(0, 0)], 0.0) - omega;
            let d = Complex64::new(m[(1, 1)], 0.0) - omega;
            a * d - Complex64::new(m[(0, 1)] * m[(1, 0)], 0.0)
        }
        _ => (complexify(m) - CMat::identity(dim, dim) * omega).determinant(),
    };
    det * omega.powi(-(n as i32))
}

/// `D_ω(M)` and its derivative along `dM`, through `d det(A) = tr(adj(A) dA)`.
pub(crate) fn detector_with_derivative(m: &Mat, dm: &Mat, omega: Complex64) -> (f64, f64) {
    let dim = m.nrows();
    let n = dim / 2;
    let factor = omega.powi(-(n as i32));
    if dim == 2 {
        let a = Complex64::new(m[(0, 0)], 0.0) - omega;
        let d = Complex64::new(m[(1, 1)], 0.0) - omega;
        let det = a * d - Complex64::new(m[(0, 1)] * m[(1, 0)], 0.0);
        let ddet = a * dm[(1, 1)] + d * dm[(0, 0)] - m[(0, 1)] * dm[(1, 0)] - m[(1, 0)] * dm[(0, 1)];
        return ((det * factor).re, (ddet * factor).re);
    }
    let a = complexify(m) - CMat::identity(dim, dim) * omega;
    let lu = a.lu();
    let det = lu.determinant();
    let ddet = match lu.try_inverse() {
        Some(inv) => det * (inv * complexify(dm)).trace(),
        None => {
            let h = 1e-7;
            let plus = (complexify(&(m + dm * h)) - CMat::identity(dim, dim) * omega).determinant();
            let minus = (complexify(&(m - dm * h)) - CMat::identity(dim, dim) * omega).determinant();
            (plus - minus) / (2.0 * h)
        }
    };
    ((det * factor).re, (ddet * factor).re)
}

/// `ω^{-n} det(M − ωI)` for `M = f_0 f_1 ⋯ f_{k−1}` without forming `M`.
#[cfg(test)]
pub(crate) fn factored_detector(factors: &[Mat], omega: Complex64) -> Complex64 {
    if factors.len() == 1 {
        return detector_complex(&factors[0], omega);
    }
    CyclicReduction::new(&factors[1..], factors[0].nrows(), omega).detector(&factors[0])
}

/// The block-cyclic system `x_i = A_i x_{i−1}`, `ω x_0 = A_k x_{k−1}` with
/// `A_1 = K_{r}, …, A_{k−1} = K_1` and `A_k = X`, whose determinant is
/// `det(I − ω^{-1} X K_1 ⋯ K_r)`, reduced one block column at a time with
/// Householder reflections. Rounding stays relative to the factors' norms
/// rather than to the norm of the product.
///
/// The reflections never see `X`, and the remaining `2n × 2n` block is
/// affine in it, so a reduction is stored once per `(K, ω)` and
/// `D_ω(X K)` then costs one small determinant.
#[derive(Clone, Debug)]
pub(crate) struct CyclicReduction {
    omega: Complex64,
    /// `ω^n` times the determinant of the eliminated part.
    scale: Complex64,
    alpha: CMat,
    beta: CMat,
}

impl CyclicReduction {
    pub(crate) fn new(chunks: &[Mat], d: usize, omega: Complex64) -> Self {
        let n = d / 2;
        let mut lower = CMat::identity(d, d);
        // two right-hand sides: X = 0 and the identity in place of −ω^{-1}X
        let mut far = CMat::zeros(d, 2 * d);
        far.view_mut((0, d), (d, d)).fill_with_identity();
        if chunks.is_empty() {
            far.view_mut((0, 0), (d, d)).fill_with_identity();
            far *= Complex64::new(2.0, 0.0);
        }
        let mut det = Complex64::new(1.0, 0.0);
        let len = chunks.len();
        for i in 0..len {
            let a = &chunks[len - 1 - i];
            let merged = i + 1 == len;
            let at = if merged { d } else { 2 * d };
            let mut w = CMat::zeros(2 * d, at + 2 * d);
            for r in 0..d {
                for c in 0..d {
                    w[(r, c)] = Complex64::new(-a[(r, c)], 0.0);
                    w[(d + r, c)] = lower[(r, c)];
                }
                if merged {
                    w[(r, d + r)] += 1.0;
                    w[(r, 2 * d + r)] += 1.0;
                } else {
                    w[(r, d + r)] += 1.0;
                }
            }
            w.view_mut((d, at), (d, 2 * d)).copy_from(&far);
            det *= eliminate(&mut w, d);
            if !merged {
                lower = w.view((d, d), (d, d)).into_owned();
            }
            far = w.view((d, at), (d, 2 * d)).into_owned();
        }
        let alpha = far.view((0, 0), (d, d)).into_owned();
        let beta = far.view((0, d), (d, d)) - &alpha;
        Self {
            omega,
            scale: det * omega.powi(n as i32),
            alpha,
            beta,
        }
    }

    /// The remaining block for a given `X`; singular exactly when `X K` has
    /// the eigenvalue ω.
    fn block(&self, x: &Mat) -> CMat {
        &self.alpha - &self.beta * complexify(x) * self.omega.inv()
    }

    pub(crate) fn scale(&self) -> Complex64 {
        self.scale
    }

    /// `D_ω(X K)`.
    pub(crate) fn detector(&self, x: &Mat) -> Complex64 {
        if self.scale == Complex64::new(0.0, 0.0) {
            return self.scale;
        }
        self.scale * self.block(x).determinant()
    }

    /// Real parts of `D_ω(X K)` and of its derivative along `dX`.
    pub(crate) fn detector_with_derivative(&self, x: &Mat, dx: &Mat) -> (f64, f64) {
        let y = self.block(x);
        let dy = &self.beta * complexify(dx) * (-self.omega.inv());
        let lu = y.clone().lu();
        let det = lu.determinant();
        let ddet = match lu.try_inverse() {
            Some(inv) => det * (inv * &dy).trace(),
            None => {
                let h = Complex64::new(1e-7, 0.0);
                ((&y + &dy * h).determinant() - (&y - &dy * h).determinant()) / (h * 2.0)
            }
        };
        ((self.scale * det).re, (self.scale * ddet).re)
    }
}


/// Householder elimination of the first `cols` columns of `w` in place;
/// returns the determinant contribution of the reflections and pivots.
fn eliminate(w: &mut CMat, cols: usize) -> Complex64 {
    let rows = w.nrows();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..cols {
        let norm = (c..rows).map(|r| w[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x0 = w[(c, c)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (c..rows).map(|r| w[(r, c)]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv > 0.0 {
            for j in c..w.ncols() {
                let s: Complex64 = v.iter().enumerate().map(|(r, z)| z.conj() * w[(c + r, j)]).sum();
                let f = s * (2.0 / vv);
                for (r, z) in v.iter().enumerate() {
                    w[(c + r, j)] -= f * z;
                }
            }
            det = -det;
        }
        det *= w[(c, c)];
    }
    det
}

/// Eigenvalues of `f_0 ⋯ f_{k−1}` as `k`-th powers of the eigenvalues of
/// the lifted block-cyclic matrix, each listed once per root.
fn factored_eigenvalues(factors: &[Mat]) -> Vec<Complex64> {
    let k = factors.len();
    if k == 1 {
        return robust_eigenvalues(&factors[0]);
    }
    let d = factors[0].nrows();
    let mut lifted = Mat::zeros(k * d, k * d);
    for i in 0..k {
        let (row, col) = ((i + 1) % k, i);
        lifted
            .view_mut((row * d, col * d), (d, d))
            .copy_from(&factors[k - 1 - i]);
    }
    robust_eigenvalues(&lifted)
        .iter()
        .map(|mu| mu.powi(k as i32))
        .collect()
}

/// Eigenvalues from a Schur decomposition with bounded iterations; a stalled
/// iteration (block-cyclic matrices are prone to it) is restarted after a
/// seeded random orthogonal similarity.
fn robust_eigenvalues(m: &Mat) -> Vec<Complex64> {
    use nalgebra::Schur;
    use rand::{Rng, SeedableRng};
    let dim = m.nrows();
    let budget = 200 * dim.max(4);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5c40);
    let mut current = m.clone();
    for _ in 0..8 {
        if let Some(schur) = Schur::try_new(current.clone(), f64::EPSILON, budget) {
            return schur.complex_eigenvalues().iter().copied().collect();
        }
        let g = Mat::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let q = g.qr().q();
        current = q.transpose() * m * &q;
    }
    m.clone().complex_eigenvalues().iter().copied().collect()
}

/// `dim_C ker(f_0 ⋯ f_{k−1} − λI)`, read off the reduced block of the
/// block-cyclic system.
pub(crate) fn factored_nullity(factors: &[Mat], lambda: Complex64, tol: f64) -> usize {
    if factors.len() == 1 {
        return complex_nullity(&factors[0], lambda, tol);
    }
    let near = factored_eigenvalues(factors)
        .iter()
        .any(|z| (z - lambda).norm() <= NULLITY_GATE);
    if !near {
        return 0;
    }
    let reduction = CyclicReduction::new(&factors[1..], factors[0].nrows(), lambda);
    if reduction.scale() == Complex64::new(0.0, 0.0) {
        return factors[0].nrows();
    }
    let last = reduction.block(&factors[0]);
    let sv = last.singular_values();
    let smax = sv.iter().fold(0.0f64, |acc, s| acc.max(*s));
    sv.iter().filter(|s| **s <= tol * smax.max(1.0)).count()
}

/// Angles in `[0, 2π)` of the eigenvalues of `f_0 ⋯ f_{k−1}` on the unit
/// circle, one per cluster.
pub(crate) fn factored_unit_angles(factors: &[Mat], eig_tol: f64) -> Vec<f64> {
    let k = factors.len();
    let eigs = factored_eigenvalues(factors);
    let mut out = Vec::new();
    for (centre, count) in cluster(&eigs, CLUSTER_RADIUS.max(eig_tol)) {
        let mult = count.div_ceil(k);
        if (centre.norm() - 1.0).abs() > eig_tol.max(CLUSTER_RADIUS * mult.saturating_sub(1) as f64) {
            continue;
        }
        out.push(centre.arg().rem_euclid(std::f64::consts::TAU));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Hadamard-type scale bounding `|det(M − ωI)|`.
pub(crate) fn detector_scale(m: &Mat) -> f64 {
    m.row_iter()
        .map(|r| 1.0 + r.norm())
        .product::<f64>()
        .max(1.0)
}

/// The defining function `D_ω(M) = ω^{-n} det(M − ωI)` of the ω-singular set.
pub fn singular_detector(m: &SymplecticMatrix, omega: &UnitCirclePoint) -> Result<f64> {
    let value = detector_complex(&m.entries, omega.to_complex());
    let scale = detector_scale(&m.entries);
    if value.im.abs() > 1e-8 * scale {
        return Err(Error::RealnessViolated {
            residue: value.im.abs(),
        });
    }
    Ok(value.re)
}

/// `P⁻¹ M P`.
pub fn conjugate(m: &SymplecticMatrix, p: &SymplecticMatrix) -> Result<SymplecticMatrix> {
    check_same(m.n, p.n)?;
    let out = p.inverse().entries * &m.entries * &p.entries;
    SymplecticMatrix::certify(out, SYMPLECTIC_TOL.max(10.0 * (m.defect + p.defect)))
}

/// `exp(A)` for a square matrix: Taylor series on `A / 2^s` with
/// `‖A‖₁ / 2^s ≤ 1/4`, then `s` squarings.
pub(crate) fn expm(a: &Mat) -> Mat {
    let dim = a.nrows();
    let norm = (0..dim)
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    if norm == 0.0 {
        return Mat::identity(dim, dim);
    }
    if !norm.is_finite() {
        return a.clone().exp();
    }
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * 0.5f64.powi(squarings);
    // 0.25^16 / 16! is far below rounding
    let mut result = Mat::identity(dim, dim);
    for k in (1..=16).rev() {
        result = Mat::identity(dim, dim) + &scaled * result / f64::from(k);
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_matches_reference() {
        for scale in [1e-3, 0.3, 2.0, 40.0] {
            let a = Mat::from_fn(4, 4, |i, j| ((i * 4 + j) as f64 * 0.37).sin() * scale);
            let ours = expm(&a);
            let reference = a.clone().exp();
            assert!(max_norm(&(&ours - &reference)) <= 1e-12 * max_norm(&reference).max(1.0));
        }
        let rot = expm(&(structure(1) * 100.0));
        assert!((rot[(0, 0)] - 100f64.cos()).abs() < 1e-11);
    }

    fn sample_factors(count: usize) -> Vec<Mat> {
        (0..count)
            .map(|k| {
                let g = Mat::from_fn(4, 4, |i, j| ((k * 16 + i * 4 + j) as f64 * 0.61).cos() * 0.4);
                let sym = &g + g.transpose();
                expm(&(structure(2) * sym))
            })
            .collect()
    }

    #[test]
    fn factored_detector_matches_product() {
        for count in [1, 2, 3, 5] {
            let factors = sample_factors(count);
            let product = factors.iter().fold(Mat::identity(4, 4), |acc, f| acc * f);
            for w in [0.3, 1.7, 2.9] {
                let omega = Complex64::from_polar(1.0, w);
                let direct = detector_complex(&product, omega);
                let ours = factored_detector(&factors, omega);
                assert!((direct - ours).norm() <= 1e-10 * direct.norm().max(1.0), "{count} {w}: {direct} vs {ours}");
            }
        }
    }

    #[test]
    fn factored_spectrum_and_nullity_of_a_power() {
        // R(2π/5) ⋄ diag(3, 1/3): the twentieth power has norm 3^20
        let r = expm(&(structure(1) * (2.0 * PI / 5.0)));
        let p = diamond(&r, &diag2(3.0, 1.0 / 3.0));
        let factors = vec![p.clone(); 20];
        let angles = factored_unit_angles(&factors, EIG_TOL);
        assert_eq!(angles.len(), 1);
        assert!(angles[0] < 1e-6 || (std::f64::consts::TAU - angles[0]) < 1e-6);
        assert_eq!(factored_nullity(&factors, Complex64::new(1.0, 0.0), EIG_TOL), 2);
        assert_eq!(factored_nullity(&factors, Complex64::new(-1.0, 0.0), EIG_TOL), 0);
        let five = vec![p; 21];
        let w = Complex64::from_polar(1.0, 2.0 * PI / 5.0);
        assert_eq!(factored_nullity(&five, w, EIG_TOL), 1);
        let v = factored_detector(&five, Complex64::from_polar(1.0, 1.0)).re;
        assert!(v.is_finite() && v.abs() > 1.0);
    }

    fn diag2(a: f64, b: f64) -> Mat {
        Mat::from_row_slice(2, 2, &[a, 0.0, 0.0, b])
    }

    #[test]
    fn structure_matrix_identities() {
        for n in 1..4 {
            let j = StructureMatrix::new(n);
            let jm = j.matrix();
            let dim = 2 * n;
            assert_eq!(jm * jm, -Mat::identity(dim, dim));
            assert_eq!(jm.transpose(), -jm.clone());
            assert!((jm.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn certify_examples() {
        let id = SymplecticMatrix::certify(Mat::identity(2, 2), 1e-10).unwrap();
        assert_eq!(id.defect(), 0.0);
        let rot = expm(&(structure(1) * 0.7));
        assert!(SymplecticMatrix::certify(rot, 1e-10).is_ok());
        match SymplecticMatrix::certify(diag2(2.0, 3.0), 1e-10) {
            Err(Error::NotSymplectic { defect, .. }) => assert!((defect - 5.0).abs() < 1e-12),
            other => panic!("expected NotSymplectic, got {other:?}"),
        }
        assert!(matches!(
            SymplecticMatrix::certify(Mat::identity(3, 3), 1e-10),
            Err(Error::OddDimension(3))
        ));
    }

    #[test]
    fn spectrum_examples() {
        let e = std::f64::consts::E;
        let hyp = SymplecticMatrix::certify(diag2(e, 1.0 / e), 1e-10).unwrap();
        let s = spectrum_on_unit_circle(&hyp, EIG_TOL);
        assert!(s.is_empty());
        assert_eq!(s.elliptic_height, 0);

        let quarter = SymplecticMatrix::rotation(1, PI / 2.0);
        let s = spectrum_on_unit_circle(&quarter, EIG_TOL);
        assert_eq!(s.entries.len(), 2);
        assert_eq!(s.entries[0].angle, UnitCirclePoint::from_fraction(1, 4));
        assert_eq!(s.entries[1].angle, UnitCirclePoint::from_fraction(3, 4));
        assert!(s.entries.iter().all(|e| e.multiplicity == 1 && e.nullity == 1));
        assert_eq!(s.elliptic_height, 2);

        let id = SymplecticMatrix::identity(1);
        let s = spectrum_on_unit_circle(&id, EIG_TOL);
        assert_eq!(s.entries.len(), 1);
        assert!(s.entries[0].angle.is_one());
        assert_eq!(s.entries[0].multiplicity, 2);
        assert_eq!(s.entries[0].nullity, 2);
        assert_eq!(s.elliptic_height, 2);
    }

    #[test]
    fn jordan_block_keeps_multiplicity_but_not_nullity() {
        let shear = SymplecticMatrix::certify(Mat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]), 1e-12).unwrap();
        let s = spectrum_on_unit_circle(&shear, EIG_TOL);
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0].multiplicity, 2);
        assert_eq!(s.entries[0].nullity, 1);
    }

    #[test]
    fn detector_examples() {
        let one = UnitCirclePoint::one();
        let id = SymplecticMatrix::identity(1);
        assert_eq!(singular_detector(&id, &one).unwrap(), 0.0);
        let d = SymplecticMatrix::certify(diag2(2.0, 0.5), 1e-12).unwrap();
        assert!((singular_detector(&d, &one).unwrap() + 0.5).abs() < 1e-14);
        let r = SymplecticMatrix::rotation(1, PI / 2.0);
        assert!((singular_detector(&r, &one).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn detector_flags_non_symplectic_input() {
        // a 4x4 matrix far from Sp(4) gives a visibly complex value at generic ω
        let m = Mat::from_row_slice(
            4,
            4,
            &[1.0, 2.0, 0.0, 0.0, 0.0, 1.0, 3.0, 0.0, 0.0, 0.0, 1.0, 4.0, 5.0, 0.0, 0.0, 1.0],
        );
        let fake = SymplecticMatrix::trusted(m);
        let w = UnitCirclePoint::from_radians(0.9);
        assert!(matches!(
            singular_detector(&fake, &w),
            Err(Error::RealnessViolated { .. })
        ));
    }

    #[test]
    fn conjugate_examples() {
        let r = SymplecticMatrix::rotation(1, 0.4);
        let same = conjugate(&r, &SymplecticMatrix::identity(1)).unwrap();
        assert!(same.distance(&r) < 1e-15);
        let commuted = conjugate(&r, &SymplecticMatrix::rotation(1, 1.3)).unwrap();
        assert!(commuted.distance(&r) < 1e-14);
        let h = SymplecticMatrix::certify(diag2(2.0, 0.5), 1e-12).unwrap();
        let p = SymplecticMatrix::trusted(expm(&(structure(1) * Mat::from_row_slice(2, 2, &[0.3, 0.7, 0.7, -0.2]))));
        let c = conjugate(&h, &p).unwrap();
        assert!(spectrum_on_unit_circle(&c, EIG_TOL).is_empty());
        assert!(matches!(
            conjugate(&h, &SymplecticMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn diamond_is_symplectic() {
        let a = SymplecticMatrix::rotation(1, 0.3);
        let b = SymplecticMatrix::stretch(2, 1.7);
        let c = a.diamond(&b);
        assert_eq!(c.n(), 3);
        assert!(c.defect() < 1e-14);
    }

    #[test]
    fn inverse_matches_linear_inverse() {
        let p = SymplecticMatrix::trusted(expm(&(structure(2) * Mat::from_fn(4, 4, |i, j| ((i + j) as f64 * 0.1).sin()))));
        let prod = p.inverse().matrix() * p.matrix();
        assert!(max_norm(&(prod - Mat::identity(4, 4))) < 1e-12);
    }
}
