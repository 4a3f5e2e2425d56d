//! Malgrange's form through the cycles `B_δ = Σ_e [e.δS_e S_e⁻¹]`.
//!
//! The graph is a star: one edge from the basepoint along each spoke into its
//! puncture. Near the basepoint the spokes cut the plane into sectors; on the
//! sheet `Σ₀` the solution in the sector clockwise of spoke `o[m]` is
//! `Ψ_loc·C_m` with `C_m = S_{o[m+1]} ⋯ S_{o[N-1]}`, so the jump across that
//! spoke is `S_e = C_m⁻¹ S_{o[m]} C_m`. Each edge element is carried to the
//! straight lift, `E = C_m δS_e S_e⁻¹ C_m⁻¹`, and split as
//! `E = H + F - S F S⁻¹` with `H` in the puncture's Cartan subspace; the chain
//! is `[δ_j.H] + [γ_j.F]`.
//!
//! `F` is fixed only up to the commutant of `S_j`, which shifts `ω` by A-cycle
//! periods. [`Splitting::Analytic`] keeps the root part alone, which is the
//! analytic continuation of the direct edge integral. [`Splitting::Canonical`]
//! takes `F = -Ψ̂⁻¹δΨ̂` from the local connection matrix `Ψ̂ = Ψ_j C_m`,
//! corrected for the rotation of the residue's eigenvectors.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::cycles::{Arc, BoundaryDivisor, Chain, Surface};
use crate::linalg::{self, identity, inverse, norm, CMat, C64, I};
use crate::local::{local_frames, LocalFrame};
use crate::system::FuchsianSystem;
use crate::transport::{Direct, Transporter};
use crate::{Error, Result};

/// Boundary defect allowed at regular points, relative to the edge elements.
pub const BOUNDARY_TOL: f64 = 1e-5;
/// Relative change of `ω` tolerated when the step is halved.
pub const NOISE_TOL: f64 = 1e-3;
pub const DEFAULT_STEP: f64 = 1e-5;

/// Smooth family of systems with fixed punctures.
pub trait Family {
    fn dim(&self) -> usize;
    fn system_at(&self, t: &[C64]) -> Result<FuchsianSystem>;
}

/// `A_j(t) = A_j + Σ_α t_α D_{α,j}`.
#[derive(Debug, Clone)]
pub struct ResidueFamily {
    pub base: FuchsianSystem,
    pub directions: Vec<Vec<CMat>>,
}

impl ResidueFamily {
    pub fn new(base: FuchsianSystem, directions: Vec<Vec<CMat>>) -> Result<Self> {
        let n = base.n();
        let np = base.num_punctures();
        for (a, d) in directions.iter().enumerate() {
            if d.len() != np || d.iter().any(|m| m.nrows() != n || m.ncols() != n) {
                return Err(Error::InvalidArgument(alloc::format!("direction {a} has the wrong shape")));
            }
            let scale = d.iter().map(norm).fold(0.0, f64::max).max(1.0);
            let sum = d.iter().fold(CMat::zeros(n, n), |acc, m| acc + m);
            if norm(&sum) > 1e-12 * scale || d.iter().any(|m| m.trace().norm() > 1e-12 * scale) {
                return Err(Error::InvalidArgument(alloc::format!(
                    "direction {a} must be traceless with vanishing sum"
                )));
            }
        }
        Ok(Self { base, directions })
    }
}

impl Family for ResidueFamily {
    fn dim(&self) -> usize {
        self.directions.len()
    }

    fn system_at(&self, t: &[C64]) -> Result<FuchsianSystem> {
        if t.len() != self.dim() {
            return Err(Error::InvalidArgument("parameter length".into()));
        }
        let mut residues = self.base.residues.clone();
        for (ta, d) in t.iter().zip(&self.directions) {
            for (a, m) in residues.iter_mut().zip(d) {
                *a += m * *ta;
            }
        }
        self.base.with_residues(residues)
    }
}

/// Isospectral family `A_j(t) = e^{X_j} A_j e^{-X_j}` with
/// `X = Σ_α t_α V_α + K u(t)`; the correction `u ∈ C^{dim g}` restores
/// `Σ_j A_j(t) = 0` and is found by a chord iteration on a fixed complement `K`.
#[derive(Debug, Clone)]
pub struct ConjugationFamily {
    pub base: FuchsianSystem,
    pub directions: Vec<Vec<CMat>>,
    correction: Vec<Vec<CMat>>,
    chord: CMat,
}

impl ConjugationFamily {
    pub fn new(base: FuchsianSystem, directions: Vec<Vec<CMat>>) -> Result<Self> {
        let np = base.num_punctures();
        let alg = &base.algebra;
        let d = alg.dim();
        if directions.iter().any(|v| v.len() != np) {
            return Err(Error::InvalidArgument("direction length".into()));
        }
        // J: X ↦ Σ_j [X_j, A_j] in coordinates.
        let mut jac = CMat::zeros(d, np * d);
        for (j, a) in base.residues.iter().enumerate() {
            for (b, e) in alg.basis().iter().enumerate() {
                for (r, v) in alg.coords(&(e * a - a * e)).into_iter().enumerate() {
                    jac[(r, j * d + b)] = v;
                }
            }
        }
        let k = jac.adjoint();
        let jk = &jac * &k;
        if linalg::rank(&jk, 1e-10) < d {
            return Err(Error::InvalidArgument("residues leave no isospectral correction".into()));
        }
        let chord = inverse(&jk)?;
        let correction = (0..d)
            .map(|col| {
                (0..np)
                    .map(|j| alg.from_coords(&(0..d).map(|b| k[(j * d + b, col)]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        Ok(Self { base, directions, correction, chord })
    }

    fn residues(&self, t: &[C64], u: &[C64]) -> Vec<CMat> {
        self.base
            .residues
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let mut x = CMat::zeros(a.nrows(), a.ncols());
                for (ta, v) in t.iter().zip(&self.directions) {
                    x += &v[j] * *ta;
                }
                for (uc, k) in u.iter().zip(&self.correction) {
                    x += &k[j] * *uc;
                }
                let g = linalg::expm(&x);
                let g_inv = linalg::expm(&-x);
                g * a * g_inv
            })
            .collect()
    }
}

impl Family for ConjugationFamily {
    fn dim(&self) -> usize {
        self.directions.len()
    }

    fn system_at(&self, t: &[C64]) -> Result<FuchsianSystem> {
        if t.len() != self.dim() {
            return Err(Error::InvalidArgument("parameter length".into()));
        }
        let alg = &self.base.algebra;
        let scale = self.base.residues.iter().map(norm).fold(0.0, f64::max);
        let mut u: Vec<C64> = alloc::vec![C64::new(0.0, 0.0); alg.dim()];
        for _ in 0..200 {
            let res = self.residues(t, &u);
            let sum = res.iter().fold(CMat::zeros(self.base.n(), self.base.n()), |acc, m| acc + m);
            if norm(&sum) <= 1e-15 * scale {
                return self.base.with_residues(res);
            }
            let f = CMat::from_column_slice(u.len(), 1, &alg.coords(&sum));
            let step = &self.chord * f;
            for (uc, s) in u.iter_mut().zip(step.iter()) {
                *uc -= s;
            }
        }
        Err(Error::NoConvergence("isospectral correction".into()))
    }
}

/// Jump across the spoke of one puncture.
#[derive(Debug, Clone)]
pub struct EdgeJump {
    pub puncture: usize,
    /// `C` with `Ψ = Ψ_loc·C` right of the edge.
    pub sector: CMat,
    /// `S_e = C⁻¹ S_j C`.
    pub jump: CMat,
}

pub fn edge_jumps<T: Transporter + ?Sized>(tr: &T) -> Result<Vec<EdgeJump>> {
    let order = tr.layout().relation_order().to_vec();
    let n = tr.system().n();
    let mut out = Vec::with_capacity(order.len());
    let mut c = identity(n);
    for &j in order.iter().rev() {
        let s = tr.generator(j)?;
        let jump = inverse(&c)? * &s * &c;
        out.push(EdgeJump { puncture: j, sector: c.clone(), jump });
        c = s * c;
    }
    out.sort_by_key(|e| e.puncture);
    Ok(out)
}

fn shifted(t: &[C64], dir: &[C64], h: f64) -> Vec<C64> {
    t.iter().zip(dir).map(|(a, d)| a + d * h).collect()
}

/// Per-puncture elements `C δS_e S_e⁻¹ C⁻¹` on the straight lift.
pub fn edge_elements<F: Family + ?Sized, T: Transporter + ?Sized>(
    family: &F,
    tr: &T,
    t: &[C64],
    dir: &[C64],
    h: f64,
) -> Result<Vec<CMat>> {
    let (plus, minus) = neighbours(family, tr, t, dir, h)?;
    elements_from(tr, &plus, &minus, h)
}

fn neighbours<F: Family + ?Sized, T: Transporter + ?Sized>(
    family: &F,
    tr: &T,
    t: &[C64],
    dir: &[C64],
    h: f64,
) -> Result<(Direct, Direct)> {
    if dir.len() != family.dim() || t.len() != family.dim() || h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidArgument("parameter length or step".into()));
    }
    let tol = tr.tol();
    let plus = Direct::new(family.system_at(&shifted(t, dir, h))?, tol)?;
    let minus = Direct::new(family.system_at(&shifted(t, dir, -h))?, tol)?;
    if plus.layout() != tr.layout() || minus.layout() != tr.layout() {
        return Err(Error::InvalidArgument("family moves the loop layout".into()));
    }
    Ok((plus, minus))
}

fn elements_from<T: Transporter + ?Sized>(tr: &T, plus: &Direct, minus: &Direct, h: f64) -> Result<Vec<CMat>> {
    let base = edge_jumps(tr)?;
    let jp = edge_jumps(plus)?;
    let jm = edge_jumps(minus)?;
    base.iter()
        .zip(jp.iter().zip(&jm))
        .map(|(b, (p, m))| {
            let ds = (&p.jump - &m.jump) / C64::new(2.0 * h, 0.0);
            Ok(&b.sector * ds * inverse(&b.jump)? * inverse(&b.sector)?)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Analytic,
    Canonical,
}

/// `(H, F)` for one puncture, on the straight lift.
#[derive(Debug, Clone)]
pub struct EdgeSplit {
    pub cartan: CMat,
    pub f: CMat,
}

fn canonical_splits<T: Transporter + ?Sized>(
    tr: &T,
    frames: &[LocalFrame],
    plus: &Direct,
    minus: &Direct,
    h: f64,
) -> Result<Vec<EdgeSplit>> {
    let sys = tr.system();
    let n = sys.n();
    let fp = local_frames(plus)?;
    let fm = local_frames(minus)?;
    let jb = edge_jumps(tr)?;
    let jp = edge_jumps(plus)?;
    let jm = edge_jumps(minus)?;
    let two_h = C64::new(2.0 * h, 0.0);
    (0..sys.num_punctures())
        .map(|k| {
            let fr = &frames[k];
            let c = &jb[k].sector;
            let hat = &fr.psi_j * c;
            let dhat = (&fp[k].psi_j * &jp[k].sector - &fm[k].psi_j * &jm[k].sector) / two_h;
            let da = (&plus.system().residues[k] - &minus.system().residues[k]) / two_h;
            let dec = fr.cartan.decompose(&da);
            // δ e^{2πiA} e^{-2πiA} = 2πi (δA)_h + Y - e^{2πiA} Y e^{-2πiA}.
            let mut y = linalg::zeros(n);
            for (root, part) in fr.cartan.roots.iter().zip(&dec.roots) {
                y -= part / root.value;
            }
            let f = -(c * inverse(&hat)? * dhat * inverse(c)?) + fr.from_local(&y);
            let cartan = fr.from_local(&(dec.cartan * (I * 2.0 * PI)));
            Ok(EdgeSplit { cartan, f })
        })
        .collect()
}

/// `[δ_j.H] + [γ_j.F]` over all punctures; with `shifted` the loops use the
/// displaced generators, which keeps two such chains in general position.
pub fn realize<T: Transporter + ?Sized>(surface: &Surface<'_, T>, splits: &[EdgeSplit], shifted: bool) -> Result<Chain> {
    let one = C64::new(1.0, 0.0);
    let mut chain = Chain::new();
    for (j, s) in splits.iter().enumerate() {
        let size = norm(&s.cartan).max(norm(&s.f));
        if size == 0.0 {
            continue;
        }
        if norm(&s.cartan) > 1e-14 * size {
            chain.push(one, Arc::to_puncture(surface.tr, j, s.cartan.clone()));
        }
        if norm(&s.f) > 1e-14 * size {
            let arc = if shifted {
                surface.shifted_generator(j, s.f.clone())?
            } else {
                Arc::loop_generator(surface.tr, j, s.f.clone())
            };
            chain.push(one, arc);
        }
    }
    Ok(chain)
}

#[derive(Debug, Clone)]
pub struct MalgrangeCycle {
    /// `C δS_e S_e⁻¹ C⁻¹` per puncture.
    pub elements: Vec<CMat>,
    pub splits: Vec<EdgeSplit>,
    /// Largest `|H + F - S F S⁻¹ - E|/|E|`.
    pub split_defect: f64,
    pub chain: Chain,
    pub boundary: BoundaryDivisor,
    /// Boundary at regular points relative to the largest edge element.
    pub defect: f64,
    pub omega: C64,
    /// `Σ |ω|` over the individual arcs.
    pub magnitude: f64,
}

/// `B_δ` and `ω(δ) = (1/2πi) ∫_{B_δ} W₁` at `t` for the tangent `dir`.
pub fn malgrange_cycle<F: Family + ?Sized, T: Transporter + ?Sized>(
    family: &F,
    surface: &Surface<'_, T>,
    t: &[C64],
    dir: &[C64],
    h: f64,
    splitting: Splitting,
) -> Result<MalgrangeCycle> {
    let tr = surface.tr;
    let (plus, minus) = neighbours(family, tr, t, dir, h)?;
    let elements = elements_from(tr, &plus, &minus, h)?;
    let splits: Vec<EdgeSplit> = match splitting {
        Splitting::Analytic => elements
            .iter()
            .enumerate()
            .map(|(j, e)| {
                if norm(e) == 0.0 {
                    return Ok(EdgeSplit { cartan: e.clone(), f: e.clone() });
                }
                let s = surface.replace_puncture_arc(j, e)?;
                Ok(EdgeSplit { cartan: s.commuting, f: s.f })
            })
            .collect::<Result<_>>()?,
        Splitting::Canonical => canonical_splits(tr, &surface.frames, &plus, &minus, h)?,
    };
    let size = elements.iter().map(norm).fold(0.0, f64::max);
    let mut split_defect: f64 = 0.0;
    for (j, (e, s)) in elements.iter().zip(&splits).enumerate() {
        let g = tr.generator(j)?;
        let recon = &s.cartan + &s.f - &g * &s.f * inverse(&g)?;
        if size > 0.0 {
            split_defect = split_defect.max(norm(&(recon - e)) / size);
        }
    }
    let chain = realize(surface, &splits, false)?;
    let boundary = surface.boundary(&chain)?;
    let defect = if size > 0.0 { boundary.point_defect() / size } else { 0.0 };
    if defect > BOUNDARY_TOL {
        return Err(Error::BoundaryCheck(defect));
    }
    let mut omega = C64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for (c, arc) in &chain.terms {
        let v = surface.integrate_w1(&Chain::single(arc.clone()))? * c / (I * 2.0 * PI);
        omega += v;
        magnitude += v.norm();
    }
    Ok(MalgrangeCycle { elements, splits, split_defect, chain, boundary, defect, omega, magnitude })
}

/// [`malgrange_cycle`] with the step-halving noise check. The change is
/// measured against `|ω|`, or against a thousandth of the arc periods when
/// those cancel further.
pub fn omega_checked<F: Family + ?Sized, T: Transporter + ?Sized>(
    family: &F,
    surface: &Surface<'_, T>,
    t: &[C64],
    dir: &[C64],
    h: f64,
    splitting: Splitting,
) -> Result<MalgrangeCycle> {
    let full = malgrange_cycle(family, surface, t, dir, h, splitting)?;
    let half = malgrange_cycle(family, surface, t, dir, h / 2.0, splitting)?;
    let change = (full.omega - half.omega).norm();
    let scale = full.omega.norm().max(1e-3 * full.magnitude);
    if change > NOISE_TOL * scale && change > 0.0 {
        return Err(Error::FiniteDifferenceNoise(change / scale.max(1e-300)));
    }
    Ok(half)
}

/// `Σ_j ⟨Ψ_j⁻¹A_jΨ_j, [F_j, F'_j]⟩`.
pub fn puncture_term<T: Transporter + ?Sized>(surface: &Surface<'_, T>, a: &[EdgeSplit], b: &[EdgeSplit]) -> C64 {
    let sys = surface.system();
    a.iter()
        .zip(b)
        .zip(&surface.frames)
        .map(|((x, y), fr)| {
            let r = fr.from_local(&fr.residue);
            sys.killing(&r, &(&x.f * &y.f - &y.f * &x.f))
        })
        .sum()
}

#[derive(Debug, Clone)]
pub struct CurvatureReport {
    /// `δ₁ ω(δ₂) - δ₂ ω(δ₁)` by central differences.
    pub domega: C64,
    /// Same with the directions exchanged.
    pub domega_swapped: C64,
    /// `(B_{δ₁}, B_{δ₂})`.
    pub pairing: C64,
    /// [`puncture_term`] of the two cycles.
    pub local: C64,
    /// `|dω - (B_{δ₁},B_{δ₂})|` relative.
    pub rel_error: f64,
    /// `|dω + (B_{δ₁},B_{δ₂})/2πi - local|` relative.
    pub completed_error: f64,
    /// Largest boundary defect seen.
    pub defect: f64,
}

impl CurvatureReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.rel_error <= tol && self.defect <= BOUNDARY_TOL
    }
}

fn relative(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// `dω(δ₁,δ₂)` from central second differences with outer step `outer`,
/// against the intersection of the two cycles at `t`.
#[allow(clippy::too_many_arguments)]
pub fn curvature_check<F: Family + ?Sized>(
    family: &F,
    t: &[C64],
    d1: &[C64],
    d2: &[C64],
    h: f64,
    outer: f64,
    tol: f64,
    splitting: Splitting,
) -> Result<CurvatureReport> {
    let mut defect: f64 = 0.0;
    let mut omega_at = |at: &[C64], dir: &[C64]| -> Result<C64> {
        let tr = Direct::new(family.system_at(at)?, tol)?;
        let surface = Surface::new(&tr)?;
        let c = malgrange_cycle(family, &surface, at, dir, h, splitting)?;
        defect = defect.max(c.defect);
        Ok(c.omega)
    };
    let d1w2 = (omega_at(&shifted(t, d1, outer), d2)? - omega_at(&shifted(t, d1, -outer), d2)?) / (2.0 * outer);
    let d2w1 = (omega_at(&shifted(t, d2, outer), d1)? - omega_at(&shifted(t, d2, -outer), d1)?) / (2.0 * outer);
    let tr = Direct::new(family.system_at(t)?, tol)?;
    let surface = Surface::new(&tr)?;
    let b1 = malgrange_cycle(family, &surface, t, d1, h, splitting)?;
    let b2 = malgrange_cycle(family, &surface, t, d2, h, splitting)?;
    defect = defect.max(b1.defect).max(b2.defect);
    let second = realize(&surface, &b2.splits, true)?;
    let pairing = surface.intersection(&b1.chain, &second)?;
    let local = puncture_term(&surface, &b1.splits, &b2.splits);
    let domega = d1w2 - d2w1;
    Ok(CurvatureReport {
        domega,
        domega_swapped: d2w1 - d1w2,
        pairing,
        local,
        rel_error: relative(domega, pairing),
        completed_error: relative(domega, local - pairing / (I * 2.0 * PI)),
        defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, eigen};
    use crate::testutil::{random_sl, random_system, rng};
    use alloc::vec;

    fn directions(n: usize, np: usize, r: &mut rand_chacha::ChaCha8Rng) -> Vec<Vec<CMat>> {
        (0..2)
            .map(|_| {
                let mut d: Vec<CMat> = (0..np - 1).map(|_| random_sl(n, r) * c(0.1, 0.0)).collect();
                let last = d.iter().fold(CMat::zeros(n, n), |acc, m| acc - m);
                d.push(last);
                d
            })
            .collect()
    }

    fn linear(n: usize, np: usize, seed: u64) -> ResidueFamily {
        let mut r = rng(seed);
        let sys = random_system(n, np, &mut r);
        ResidueFamily::new(sys, directions(n, np, &mut r)).unwrap()
    }

    fn isospectral(n: usize, np: usize, seed: u64) -> ConjugationFamily {
        let mut r = rng(seed);
        let sys = random_system(n, np, &mut r);
        let dirs = (0..2).map(|_| (0..np).map(|_| random_sl(n, &mut r) * c(0.3, 0.0)).collect()).collect();
        ConjugationFamily::new(sys, dirs).unwrap()
    }

    const ORIGIN: [C64; 2] = [C64 { re: 0.0, im: 0.0 }; 2];
    const E1: [C64; 2] = [C64 { re: 1.0, im: 0.0 }, C64 { re: 0.0, im: 0.0 }];
    const E2: [C64; 2] = [C64 { re: 0.0, im: 0.0 }, C64 { re: 1.0, im: 0.0 }];

    #[test]
    fn jumps_recover_generators() {
        let fam = linear(2, 4, 61);
        let tr = Direct::new(fam.base.clone(), 1e-11).unwrap();
        for e in edge_jumps(&tr).unwrap() {
            let s = tr.generator(e.puncture).unwrap();
            let back = &e.sector * &e.jump * inverse(&e.sector).unwrap();
            assert!(norm(&(back - s)) < 1e-10);
        }
    }

    #[test]
    fn constant_family_gives_zero() {
        let fam = linear(2, 3, 62);
        let still = ResidueFamily::new(fam.base.clone(), vec![vec![CMat::zeros(2, 2); 3]]).unwrap();
        let tr = Direct::new(still.base.clone(), 1e-11).unwrap();
        let surface = Surface::new(&tr).unwrap();
        for splitting in [Splitting::Analytic, Splitting::Canonical] {
            let m = omega_checked(&still, &surface, &[c(0.0, 0.0)], &[c(1.0, 0.0)], DEFAULT_STEP, splitting).unwrap();
            assert!(m.chain.is_empty());
            assert_eq!(m.omega, c(0.0, 0.0));
        }
    }

    #[test]
    fn conjugation_family_is_isospectral() {
        let fam = isospectral(3, 4, 69);
        let sys = fam.system_at(&[c(0.02, -0.01), c(0.01, 0.03)]).unwrap();
        for (a, b) in fam.base.residues.iter().zip(&sys.residues) {
            let mut la = eigen(a).unwrap().values;
            let mut lb = eigen(b).unwrap().values;
            let key = |z: &C64| (z.re, z.im);
            la.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            lb.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            for (x, y) in la.iter().zip(&lb) {
                assert!((x - y).norm() < 1e-10);
            }
            assert!(norm(&(a - b)) > 1e-3);
        }
        let sum = sys.residues.iter().fold(CMat::zeros(3, 3), |acc, m| acc + m);
        assert!(norm(&sum) < 1e-13);
    }

    #[test]
    fn cycles_close_at_the_hub_and_splits_reconstruct() {
        let lin = linear(2, 4, 63);
        let iso = isospectral(3, 3, 64);
        let fams: [(&dyn Family, bool); 2] = [(&lin, false), (&iso, true)];
        for (fam, isospectral) in fams {
            let tr = Direct::new(fam.system_at(&ORIGIN).unwrap(), 1e-11).unwrap();
            let surface = Surface::new(&tr).unwrap();
            for splitting in [Splitting::Analytic, Splitting::Canonical] {
                let m = omega_checked(fam, &surface, &ORIGIN, &E1, DEFAULT_STEP, splitting).unwrap();
                assert!(m.defect < 1e-7, "defect {:e}", m.defect);
                assert!(m.split_defect < 1e-6, "split defect {:e}", m.split_defect);
                // With canonical loops ω vanishes along isospectral directions.
                if isospectral && splitting == Splitting::Canonical {
                    assert!(m.omega.norm() < 1e-5, "{}", m.omega);
                } else {
                    assert!(m.omega.norm() > 1e-3);
                }
            }
        }
    }

    #[test]
    fn analytic_and_canonical_differ_by_a_cycle_periods() {
        let fam = isospectral(2, 4, 65);
        let tr = Direct::new(fam.base.clone(), 1e-11).unwrap();
        let surface = Surface::new(&tr).unwrap();
        let a = malgrange_cycle(&fam, &surface, &ORIGIN, &E2, DEFAULT_STEP, Splitting::Analytic).unwrap();
        let b = malgrange_cycle(&fam, &surface, &ORIGIN, &E2, DEFAULT_STEP, Splitting::Canonical).unwrap();
        // F - F' commutes with S_j, so the loops differ by A-cycles with periods ⟨E_j, A_j⟩.
        let mut expected = C64::new(0.0, 0.0);
        for (j, (x, y)) in b.splits.iter().zip(&a.splits).enumerate() {
            let fr = &surface.frames[j];
            let d = fr.cartan.decompose(&fr.to_local(&(&x.f - &y.f)));
            assert!(d.root_norm() < 1e-6 * norm(&x.f));
            expected += surface.system().killing(&d.cartan, &fr.residue);
        }
        assert!((b.omega - a.omega - expected).norm() < 1e-6 * expected.norm().max(1.0));
    }

    #[test]
    fn antisymmetric_by_construction() {
        let fam = linear(2, 3, 66);
        let rep = curvature_check(&fam, &ORIGIN, &E1, &E2, 1e-5, 1e-3, 1e-11, Splitting::Analytic).unwrap();
        assert_eq!(rep.domega, -rep.domega_swapped);
    }

    #[test]
    fn isospectral_curvature_is_pairing_plus_puncture_term() {
        for (n, np, seed) in [(2, 4, 67), (3, 3, 68), (2, 5, 70)] {
            let fam = isospectral(n, np, seed);
            let rep = curvature_check(&fam, &ORIGIN, &E1, &E2, 1e-5, 1e-3, 1e-11, Splitting::Analytic).unwrap();
            assert!(rep.completed_error < 1e-3, "{n} {np}: {rep:?}");
            assert!(rep.defect < 1e-7);
        }
    }

    #[test]
    fn canonical_splitting_gives_a_closed_form() {
        for (fam, scale) in [(linear(2, 4, 71), 1.0), (linear(3, 3, 72), 1.0)] {
            let rep = curvature_check(&fam, &ORIGIN, &E1, &E2, 1e-5, 1e-3, 1e-11, Splitting::Canonical).unwrap();
            let size = rep.pairing.norm().max(scale);
            assert!(rep.domega.norm() < 1e-3 * size, "{rep:?}");
        }
    }
}
