//! `sl_N` in its fundamental realization: basis, Killing form, dual basis,
//! structure constants, root decompositions and Casimir tensors.
//!
//! The Killing form is the adjoint trace, `⟨E, F⟩ = Tr(ad_E ad_F) = 2N tr(EF)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::ComplexFloat;
use num_traits::Zero;

use crate::linalg::{self, commutator, eigen, inverse, trace, trace_prod, zeros, CMat, Eigen, C64};
use crate::{Error, Result};

/// Traceless tolerance for `killing` inputs.
pub const TRACE_TOL: f64 = 1e-9;
/// Default relative gap used to decide regular semisimplicity.
pub const GENERICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    n: usize,
    basis: Vec<CMat>,
    dual: Vec<CMat>,
    gram: CMat,
    gram_inv: CMat,
    /// `f[a][b][c]` with `[e_a, e_b] = Σ_c f_{ab}^c e_c`.
    structure: Vec<C64>,
}

/// Adjoint normalization factor `2N`.
pub fn killing_factor(n: usize) -> f64 {
    2.0 * n as f64
}

/// `⟨E, F⟩ = 2N tr(EF)`; rejects inputs with trace above [`TRACE_TOL`].
pub fn killing(e: &CMat, f: &CMat) -> Result<C64> {
    for m in [e, f] {
        let t = trace(m).norm();
        if t > TRACE_TOL * (1.0 + linalg::max_abs(m)) {
            return Err(Error::NotTraceless(t));
        }
    }
    Ok(killing_unchecked(e, f))
}

#[inline]
pub fn killing_unchecked(e: &CMat, f: &CMat) -> C64 {
    trace_prod(e, f) * killing_factor(e.nrows())
}

impl LieAlgebra {
    /// Basis of `sl_N`: off-diagonal `E_ij` in row-major order, then `E_ii - E_{i+1,i+1}`.
    pub fn sl(n: usize) -> Result<Self> {
        if !(2..=5).contains(&n) {
            return Err(Error::RankOutOfRange(n));
        }
        let mut basis = Vec::with_capacity(n * n - 1);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut m = zeros(n);
                    m[(i, j)] = C64::new(1.0, 0.0);
                    basis.push(m);
                }
            }
        }
        for i in 0..n - 1 {
            let mut m = zeros(n);
            m[(i, i)] = C64::new(1.0, 0.0);
            m[(i + 1, i + 1)] = C64::new(-1.0, 0.0);
            basis.push(m);
        }
        Self::from_basis(n, basis)
    }

    /// Any basis of traceless `N×N` matrices with an invertible Gram matrix.
    pub fn from_basis(n: usize, basis: Vec<CMat>) -> Result<Self> {
        let dim = n * n - 1;
        if basis.len() != dim {
            return Err(Error::InvalidArgument(format!("expected {dim} basis elements, got {}", basis.len())));
        }
        for b in &basis {
            let t = trace(b).norm();
            if t > 1e-12 * (1.0 + linalg::max_abs(b)) {
                return Err(Error::NotTraceless(t));
            }
        }
        let gram = CMat::from_fn(dim, dim, |a, b| killing_unchecked(&basis[a], &basis[b]));
        let gram_inv = inverse(&gram)?;
        let dual: Vec<CMat> = (0..dim)
            .map(|b| {
                let mut m = zeros(n);
                for (c, e) in basis.iter().enumerate() {
                    m += e * gram_inv[(c, b)];
                }
                m
            })
            .collect();
        let mut structure = vec![C64::zero(); dim * dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let br = commutator(&basis[a], &basis[b]);
                for (cc, d) in dual.iter().enumerate() {
                    structure[(a * dim + b) * dim + cc] = killing_unchecked(&br, d);
                }
            }
        }
        Ok(Self { n, basis, dual, gram, gram_inv, structure })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn dual(&self) -> &[CMat] {
        &self.dual
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn gram_inv(&self) -> &CMat {
        &self.gram_inv
    }

    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> C64 {
        let d = self.dim();
        self.structure[(a * d + b) * d + c]
    }

    pub fn killing(&self, e: &CMat, f: &CMat) -> Result<C64> {
        killing(e, f)
    }

    /// Coordinates `c_a = ⟨F, e^a⟩`, so that `F = Σ c_a e_a`.
    pub fn coords(&self, f: &CMat) -> Vec<C64> {
        self.dual.iter().map(|d| killing_unchecked(f, d)).collect()
    }

    pub fn from_coords(&self, coords: &[C64]) -> CMat {
        let mut m = zeros(self.n);
        for (e, &x) in self.basis.iter().zip(coords) {
            m += e * x;
        }
        m
    }

    /// Matrix of `ad_E` in the basis: `[E, e_a] = Σ_c (ad_E)_{ca} e_c`.
    pub fn ad_matrix(&self, e: &CMat) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for a in 0..d {
            let col = self.coords(&commutator(e, &self.basis[a]));
            for (cc, v) in col.into_iter().enumerate() {
                m[(cc, a)] = v;
            }
        }
        m
    }

    /// Matrix of `Ad_g : E ↦ g E g⁻¹` in the basis.
    pub fn group_ad_matrix(&self, g: &CMat, g_inv: &CMat) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for a in 0..d {
            let col = self.coords(&(g * &self.basis[a] * g_inv));
            for (cc, v) in col.into_iter().enumerate() {
                m[(cc, a)] = v;
            }
        }
        m
    }

    /// Largest Jacobi-identity defect over all basis triples.
    pub fn jacobi_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    for e in 0..d {
                        let mut s = C64::zero();
                        for m in 0..d {
                            s += self.structure_constant(a, b, m) * self.structure_constant(m, cc, e)
                                + self.structure_constant(b, cc, m) * self.structure_constant(m, a, e)
                                + self.structure_constant(cc, a, m) * self.structure_constant(m, b, e);
                        }
                        worst = worst.max(s.norm());
                    }
                }
            }
        }
        worst
    }
}

/// One root space `g_r` of a Cartan decomposition.
#[derive(Debug, Clone)]
pub struct Root {
    /// `r(E)`, the eigenvalue of `ad_E` on this root space.
    pub value: C64,
    /// Indices `(k, l)` of the eigenvalue pair, `r = λ_k - λ_l`.
    pub pair: (usize, usize),
    /// Root vector `P E_kl P⁻¹`.
    pub vector: CMat,
}

/// Cartan subalgebra and root spaces attached to a regular semisimple pivot.
#[derive(Debug, Clone)]
pub struct CartanData {
    pub pivot: CMat,
    pub eigen: Eigen,
    pub cartan_basis: Vec<CMat>,
    pub roots: Vec<Root>,
}

/// Components of `F` along `h ⊕ ⊕_r g_r`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub cartan: CMat,
    /// Component along each root, in the same order as [`CartanData::roots`].
    pub roots: Vec<CMat>,
}

impl Decomposition {
    pub fn reconstruct(&self) -> CMat {
        let mut m = self.cartan.clone();
        for r in &self.roots {
            m += r;
        }
        m
    }

    pub fn root_norm(&self) -> f64 {
        self.roots.iter().map(|r| linalg::norm(r).powi(2)).sum::<f64>().sqrt()
    }
}

/// Eigen-decomposition of `ad_E`, built from the fundamental eigenvectors of `E`:
/// if `E = P diag(λ) P⁻¹` then `ad_E (P E_kl P⁻¹) = (λ_k - λ_l) P E_kl P⁻¹`.
pub fn root_decomposition(e: &CMat, rel_tol: f64) -> Result<CartanData> {
    let n = e.nrows();
    let t = trace(e).norm();
    if t > TRACE_TOL * (1.0 + linalg::max_abs(e)) {
        return Err(Error::NotTraceless(t));
    }
    let eig = eigen(e).map_err(|_| Error::NonGenericElement("not diagonalizable".into()))?;
    let lam = &eig.values;
    let mut scale: f64 = 0.0;
    for k in 0..n {
        for l in 0..n {
            scale = scale.max((lam[k] - lam[l]).abs());
        }
    }
    if scale <= 1e-14 * (1.0 + linalg::max_abs(e)) {
        return Err(Error::NonGenericElement("ad spectrum vanishes".into()));
    }
    let gap = rel_tol * scale;
    let mut pairs = Vec::new();
    for k in 0..n {
        for l in 0..n {
            if k != l {
                pairs.push((k, l, lam[k] - lam[l]));
            }
        }
    }
    for &(k, l, r) in &pairs {
        if r.abs() < gap {
            return Err(Error::NonGenericElement(format!(
                "eigenvalues {k} and {l} coincide: zero eigenspace of ad exceeds the rank"
            )));
        }
    }
    for (i, &(k, l, r)) in pairs.iter().enumerate() {
        for &(m, q, s) in &pairs[i + 1..] {
            if (r - s).abs() < gap {
                return Err(Error::NonGenericElement(format!(
                    "roots ({k},{l}) and ({m},{q}) collide"
                )));
            }
        }
    }
    // A diagonalization error here would mean E is far from semisimple.
    let recon = eig.apply(|z| z);
    if linalg::norm(&(recon - e)) > 1e-8 * (1.0 + linalg::norm(e)) {
        return Err(Error::NonGenericElement("not diagonalizable".into()));
    }
    let p = &eig.vectors;
    let p_inv = &eig.vectors_inv;
    let mut cartan_basis = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let mut d = zeros(n);
        d[(k, k)] = C64::new(1.0, 0.0);
        d[(k + 1, k + 1)] = C64::new(-1.0, 0.0);
        cartan_basis.push(p * d * p_inv);
    }
    let roots = pairs
        .into_iter()
        .map(|(k, l, value)| {
            let mut ekl = zeros(n);
            ekl[(k, l)] = C64::new(1.0, 0.0);
            Root { value, pair: (k, l), vector: p * ekl * p_inv }
        })
        .collect();
    Ok(CartanData { pivot: e.clone(), eigen: eig, cartan_basis, roots })
}

impl CartanData {
    pub fn n(&self) -> usize {
        self.pivot.nrows()
    }

    pub fn decompose(&self, f: &CMat) -> Decomposition {
        let n = self.n();
        let p = &self.eigen.vectors;
        let p_inv = &self.eigen.vectors_inv;
        let g = p_inv * f * p;
        let mut dg = zeros(n);
        for k in 0..n {
            dg[(k, k)] = g[(k, k)];
        }
        let cartan = p * dg * p_inv;
        let roots = self
            .roots
            .iter()
            .map(|r| {
                let (k, l) = r.pair;
                &r.vector * g[(k, l)]
            })
            .collect();
        Decomposition { cartan, roots }
    }

    /// True when `f` lies in the Cartan subalgebra (root part below `tol · |f|`).
    pub fn in_cartan(&self, f: &CMat, tol: f64) -> bool {
        self.decompose(f).root_norm() <= tol * (1.0 + linalg::norm(f))
    }

    pub fn rank(&self) -> usize {
        self.n() - 1
    }
}

/// Invariant tensor `Σ c^{a_1…a_i} e_{a_1} ⊗ … ⊗ e_{a_i}`.
///
/// Coefficients carry upper indices and contract against basis elements; this
/// is the same element of `g^{⊗i}` as a lower-index tensor contracted against
/// the dual basis. For degree 2 the coefficients are the inverse Gram matrix,
/// i.e. `C₂ = Σ_a e_a ⊗ e^a`.
#[derive(Debug, Clone)]
pub struct CasimirTensor {
    pub degree: usize,
    pub dim: usize,
    pub coeffs: Vec<C64>,
}

impl CasimirTensor {
    pub fn new(algebra: &LieAlgebra, degree: usize) -> Result<Self> {
        let dim = algebra.dim();
        match (degree, algebra.n()) {
            (2, _) => {
                let g = algebra.gram_inv();
                let coeffs = (0..dim * dim).map(|i| g[(i / dim, i % dim)]).collect();
                Ok(Self { degree, dim, coeffs })
            }
            (3, n) if n >= 3 => {
                let dual = algebra.dual();
                let mut coeffs = vec![C64::zero(); dim * dim * dim];
                for a in 0..dim {
                    for b in 0..dim {
                        let ab = &dual[a] * &dual[b];
                        let ba = &dual[b] * &dual[a];
                        for (cc, dc) in dual.iter().enumerate() {
                            coeffs[(a * dim + b) * dim + cc] = (trace_prod(&ab, dc) + trace_prod(&ba, dc)) * 0.5;
                        }
                    }
                }
                // tr(e^a e^b e^c) + tr(e^b e^a e^c) is already symmetric in (a, b);
                // cyclicity of the trace makes it fully symmetric.
                Ok(Self { degree, dim, coeffs })
            }
            (d, n) => Err(Error::UnsupportedDegree { degree: d, n }),
        }
    }

    pub fn coeff(&self, idx: &[usize]) -> C64 {
        let mut flat = 0;
        for &i in idx {
            flat = flat * self.dim + i;
        }
        self.coeffs[flat]
    }

    /// Nonzero terms as `(multi-index, coefficient)`.
    pub fn terms(&self, cutoff: f64) -> Vec<(Vec<usize>, C64)> {
        let scale = self.coeffs.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let mut out = Vec::new();
        for (flat, &v) in self.coeffs.iter().enumerate() {
            if v.norm() > cutoff * scale {
                let mut idx = vec![0; self.degree];
                let mut f = flat;
                for slot in (0..self.degree).rev() {
                    idx[slot] = f % self.dim;
                    f /= self.dim;
                }
                out.push((idx, v));
            }
        }
        out
    }

    /// Largest entry of `Σ_slots ad_{e_d}` applied to the tensor, over all `d`.
    pub fn invariance_defect(&self, algebra: &LieAlgebra) -> f64 {
        let dim = self.dim;
        let total = self.coeffs.len();
        let mut worst: f64 = 0.0;
        for d in 0..dim {
            let ad = algebra.ad_matrix(&algebra.basis()[d]);
            let mut out = vec![C64::zero(); total];
            for (flat, &v) in self.coeffs.iter().enumerate() {
                if v == C64::zero() {
                    continue;
                }
                let mut idx = vec![0; self.degree];
                let mut f = flat;
                for slot in (0..self.degree).rev() {
                    idx[slot] = f % dim;
                    f /= dim;
                }
                for slot in 0..self.degree {
                    let a = idx[slot];
                    for a2 in 0..dim {
                        let w = ad[(a2, a)];
                        if w == C64::zero() {
                            continue;
                        }
                        let mut j = idx.clone();
                        j[slot] = a2;
                        let mut fl = 0;
                        for &i in &j {
                            fl = fl * dim + i;
                        }
                        out[fl] += w * v;
                    }
                }
            }
            worst = out.iter().fold(worst, |m, z| m.max(z.norm()));
        }
        worst
    }
}

/// `e^{2πi A}` for a diagonalizable `A`.
pub fn exp_2pi_i(eig: &Eigen) -> CMat {
    eig.apply(|l| (linalg::I * 2.0 * core::f64::consts::PI * l).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag, norm};
    use crate::testutil::{random_sl, rng};

    /// Adjoint trace computed from explicit ad matrices.
    fn adjoint_trace(alg: &LieAlgebra, e: &CMat, f: &CMat) -> C64 {
        (alg.ad_matrix(e) * alg.ad_matrix(f)).trace()
    }

    #[test]
    fn dimensions() {
        assert_eq!(LieAlgebra::sl(2).unwrap().dim(), 3);
        assert_eq!(LieAlgebra::sl(3).unwrap().dim(), 8);
        assert!(matches!(LieAlgebra::sl(6), Err(Error::RankOutOfRange(6))));
        assert!(matches!(LieAlgebra::sl(1), Err(Error::RankOutOfRange(1))));
    }

    #[test]
    fn dual_basis_pairs_to_delta() {
        for n in 2..=4 {
            let alg = LieAlgebra::sl(n).unwrap();
            for a in 0..alg.dim() {
                for b in 0..alg.dim() {
                    let v = killing(&alg.basis()[a], &alg.dual()[b]).unwrap();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((v - expect).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn killing_of_sl2_cartan_is_eight() {
        let h = diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!((killing(&h, &h).unwrap() - 8.0).norm() < 1e-14);
        let alg = LieAlgebra::sl(2).unwrap();
        assert!((adjoint_trace(&alg, &h, &h) - 8.0).norm() < 1e-12);
    }

    #[test]
    fn killing_matches_adjoint_trace() {
        let mut r = rng(1);
        for n in 2..=4 {
            let alg = LieAlgebra::sl(n).unwrap();
            let e = random_sl(n, &mut r);
            let f = random_sl(n, &mut r);
            let k = killing(&e, &f).unwrap();
            assert!((k - adjoint_trace(&alg, &e, &f)).norm() < 1e-10 * (1.0 + k.norm()));
        }
    }

    #[test]
    fn killing_rejects_trace() {
        let m = linalg::identity(2);
        assert!(matches!(killing(&m, &m), Err(Error::NotTraceless(_))));
        let z = zeros(3);
        let f = random_sl(3, &mut rng(2));
        assert_eq!(killing(&z, &f).unwrap(), C64::zero());
    }

    #[test]
    fn ad_invariance_of_killing_form() {
        let mut r = rng(3);
        let alg = LieAlgebra::sl(3).unwrap();
        for _ in 0..5 {
            let (e, f, g) = (random_sl(3, &mut r), random_sl(3, &mut r), random_sl(3, &mut r));
            let lhs = killing(&commutator(&e, &f), &g).unwrap();
            let rhs = -killing(&f, &commutator(&e, &g)).unwrap();
            assert!((lhs - rhs).norm() < 1e-10);
            // Same identity through explicit adjoint matrices.
            let via_ad = adjoint_trace(&alg, &commutator(&e, &f), &g);
            assert!((via_ad - lhs).norm() < 1e-9);
        }
    }

    #[test]
    fn jacobi_and_reconstruction() {
        let alg = LieAlgebra::sl(3).unwrap();
        assert!(alg.jacobi_defect() < 1e-12);
        for a in 0..alg.dim() {
            let mut m = zeros(3);
            for b in 0..alg.dim() {
                m += &alg.basis()[b] * killing_unchecked(&alg.basis()[a], &alg.dual()[b]);
            }
            assert!(norm(&(m - &alg.basis()[a])) < 1e-10);
        }
    }

    #[test]
    fn sl2_roots_are_plus_minus_two_a() {
        let a = 0.7;
        let e = diag(&[c(a, 0.0), c(-a, 0.0)]);
        let cd = root_decomposition(&e, GENERICITY_TOL).unwrap();
        assert_eq!(cd.rank(), 1);
        let mut vals: Vec<f64> = cd.roots.iter().map(|r| r.value.re).collect();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((vals[0] + 1.4).abs() < 1e-12 && (vals[1] - 1.4).abs() < 1e-12);
        // Oracle: eigenvalues of the explicit 3×3 adjoint matrix.
        let alg = LieAlgebra::sl(2).unwrap();
        let ev = alg.ad_matrix(&e).schur().eigenvalues().unwrap();
        let mut adv: Vec<f64> = ev.iter().map(|z| z.re).collect();
        adv.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((adv[0] + 1.4).abs() < 1e-12 && adv[1].abs() < 1e-12 && (adv[2] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn root_vectors_are_eigenvectors_and_paired() {
        let mut r = rng(4);
        for n in 2..=4 {
            let e = random_sl(n, &mut r);
            let cd = root_decomposition(&e, GENERICITY_TOL).unwrap();
            assert_eq!(cd.roots.len() + cd.rank(), n * n - 1);
            for root in &cd.roots {
                let lhs = commutator(&e, &root.vector);
                assert!(norm(&(lhs - &root.vector * root.value)) < 1e-9 * (1.0 + norm(&root.vector)));
                assert!(cd.roots.iter().any(|o| (o.value + root.value).norm() < 1e-9));
            }
            for h in &cd.cartan_basis {
                assert!(norm(&commutator(&e, h)) < 1e-9 * (1.0 + norm(h)));
            }
        }
    }

    #[test]
    fn decomposition_reconstructs_and_is_idempotent() {
        let mut r = rng(5);
        let e = random_sl(3, &mut r);
        let cd = root_decomposition(&e, GENERICITY_TOL).unwrap();
        let f = random_sl(3, &mut r);
        let d = cd.decompose(&f);
        assert!(norm(&(d.reconstruct() - &f)) < 1e-9);
        let again = cd.decompose(&d.cartan);
        assert!(norm(&(&again.cartan - &d.cartan)) < 1e-10);
        assert!(again.root_norm() < 1e-10);
        for (k, comp) in d.roots.iter().enumerate() {
            let dd = cd.decompose(comp);
            assert!(norm(&(&dd.roots[k] - comp)) < 1e-10);
        }
        // Commuting element: pure Cartan.
        let g = &e * c(0.3, 0.2);
        let dg = cd.decompose(&g);
        assert!(norm(&(&dg.cartan - &g)) < 1e-10 && dg.root_norm() < 1e-10);
    }

    #[test]
    fn nilpotent_is_not_generic() {
        let mut e = zeros(2);
        e[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(root_decomposition(&e, GENERICITY_TOL), Err(Error::NonGenericElement(_))));
        // Degenerate spectrum in sl3: diag(1, 1, -2).
        let d = diag(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)]);
        assert!(matches!(root_decomposition(&d, GENERICITY_TOL), Err(Error::NonGenericElement(_))));
    }

    #[test]
    fn quadratic_casimir_is_inverse_gram() {
        let alg = LieAlgebra::sl(2).unwrap();
        let c2 = CasimirTensor::new(&alg, 2).unwrap();
        let g = alg.gram_inv();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(c2.coeff(&[a, b]), g[(a, b)]);
            }
        }
        assert!(c2.invariance_defect(&alg) < 1e-10);
    }

    #[test]
    fn cubic_casimir() {
        let alg2 = LieAlgebra::sl(2).unwrap();
        assert!(matches!(CasimirTensor::new(&alg2, 3), Err(Error::UnsupportedDegree { degree: 3, n: 2 })));
        let alg3 = LieAlgebra::sl(3).unwrap();
        let c3 = CasimirTensor::new(&alg3, 3).unwrap();
        assert!(c3.invariance_defect(&alg3) < 1e-10);
        // Not identically zero for sl3.
        assert!(c3.coeffs.iter().any(|z| z.norm() > 1e-6));
        assert!(matches!(CasimirTensor::new(&alg3, 4), Err(Error::UnsupportedDegree { .. })));
    }
}
