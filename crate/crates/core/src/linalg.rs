//! Small dense complex linear algebra on top of `nalgebra`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

/// `tr(a b)` without forming the product.
pub fn trace_prod(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut s = C64::zero();
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone().lu().try_inverse().ok_or(Error::Singular)
}

pub fn det(m: &CMat) -> C64 {
    m.clone().lu().determinant()
}

/// `m e m⁻¹`.
pub fn conjugate(m: &CMat, e: &CMat, m_inv: &CMat) -> CMat {
    m * e * m_inv
}

pub fn diag(values: &[C64]) -> CMat {
    let n = values.len();
    let mut m = zeros(n);
    for (k, v) in values.iter().enumerate() {
        m[(k, k)] = *v;
    }
    m
}

/// Eigen-decomposition of a diagonalizable matrix, `m = P diag(λ) P⁻¹`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
    pub vectors_inv: CMat,
}

impl Eigen {
    /// `P diag(f(λ_k)) P⁻¹`.
    pub fn apply(&self, f: impl Fn(C64) -> C64) -> CMat {
        let d: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        &self.vectors * diag(&d) * &self.vectors_inv
    }
}

fn cmp_c64(a: &C64, b: &C64) -> Ordering {
    a.re
        .partial_cmp(&b.re)
        .unwrap_or(Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// Eigenvalues ordered by (re, im); unit eigenvectors whose largest entry is real positive.
pub fn eigen(m: &CMat) -> Result<Eigen> {
    let n = m.nrows();
    let mut values: Vec<C64> = m
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::NoConvergence("Schur decomposition".into()))?
        .iter()
        .copied()
        .collect();
    values.sort_by(cmp_c64);
    let mut vectors = zeros(n);
    for (k, &lambda) in values.iter().enumerate() {
        let shifted = m - identity(n) * lambda;
        let v = smallest_singular_vector(&shifted);
        vectors.set_column(k, &normalize_phase(v));
    }
    let vectors_inv = inverse(&vectors)?;
    // One Rayleigh-style refinement of the eigenvalues.
    let d = &vectors_inv * m * &vectors;
    for (k, v) in values.iter_mut().enumerate() {
        *v = d[(k, k)];
    }
    Ok(Eigen { values, vectors, vectors_inv })
}

fn normalize_phase(v: nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].norm() > v[best].norm() + 1e-12 {
            best = i;
        }
    }
    let phase = v[best] / v[best].norm();
    v.map(|z| z / (phase * nrm))
}

fn smallest_singular_vector(m: &CMat) -> nalgebra::DVector<C64> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut idx = 0;
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] < svd.singular_values[idx] {
            idx = i;
        }
    }
    v_t.row(idx).transpose().map(|z| z.conj())
}

/// Orthonormal basis (columns) of the null space of `m`, singular values below
/// `rel_tol · σ_max` counted as zero.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let (rows, cols) = m.shape();
    let size = rows.max(cols);
    let mut square = CMat::zeros(size, cols);
    square.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let cutoff = rel_tol * smax.max(f64::MIN_POSITIVE);
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .collect();
    let mut out = CMat::zeros(cols, kept.len());
    for (k, &i) in kept.iter().enumerate() {
        for r in 0..cols {
            out[(r, k)] = v_t[(i, r)].conj();
        }
    }
    out
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    s
}

/// Numerical rank with a relative singular-value threshold.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq(a: &CMat, b: &CMat, rel_tol: f64) -> Result<CMat> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    svd.solve(b, rel_tol * smax)
        .map_err(|e| Error::NoConvergence(alloc::string::ToString::to_string(e)))
}

/// Matrix power `(w)^A = exp(A log w)` for diagonalizable `A`, principal log
/// of `w` shifted by `2πi·winding`.
pub fn power(eig: &Eigen, w: C64, winding: i64) -> CMat {
    let log_w = w.ln() + I * (2.0 * core::f64::consts::PI * winding as f64);
    eig.apply(|l| (l * log_w).exp())
}

/// `exp(m)` by scaling and squaring with a Taylor series (nalgebra's `exp`
/// needs its `std` feature).
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let size = norm(m);
    let mut squarings = 0;
    while size / (1u64 << squarings) as f64 > 0.25 {
        squarings += 1;
    }
    let a = m / C64::new((1u64 << squarings) as f64, 0.0);
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..30 {
        term = &term * &a / C64::new(k as f64, 0.0);
        sum += &term;
        if norm(&term) < 1e-18 * norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Columns stacked as a flat vector of length `n²` (column-major, as nalgebra stores).
pub fn flatten(m: &CMat) -> Vec<C64> {
    m.as_slice().to_vec()
}

pub fn unflatten(n: usize, v: &[C64]) -> CMat {
    CMat::from_column_slice(n, n, &v[..n * n])
}
