//! Singular behaviour of amplitudes: coinciding points, punctures and charges.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::amplitude::{casimir_amplitude, w_disconnected, Variant};
use crate::lie::CasimirTensor;
use crate::linalg::{self, commutator, zeros, CMat, C64};
use crate::local::LocalFrame;
use crate::path::Segment;
use crate::transport::{evaluate, extend, BundlePoint, Evaluated, Transporter};
use crate::{Error, Result};

fn rel(a: C64, b: C64) -> f64 {
    let d = (a - b).norm();
    if b.norm() > 1e-14 {
        d / b.norm()
    } else {
        d
    }
}

/// Neville extrapolation to `h = 0`.
pub fn extrapolate_to_zero(h: &[f64], v: &[C64]) -> C64 {
    let mut p = v.to_vec();
    for k in 1..p.len() {
        for i in 0..p.len() - k {
            p[i] = (p[i + 1] * h[i] - p[i] * h[i + k]) / (h[i] - h[i + k]);
        }
    }
    p[0]
}

/// Limit at zero with the change between using all samples and dropping the
/// coarsest one.
fn richardson(h: &[f64], v: &[C64]) -> (C64, f64) {
    let all = extrapolate_to_zero(h, v);
    let fewer = extrapolate_to_zero(&h[1..], &v[1..]);
    (all, rel(all, fewer))
}

fn frame_point(frame: &LocalFrame, x: C64, e: CMat) -> Result<Evaluated> {
    Evaluated::new(x, frame.psi(x), e)
}

fn w_or_one(sys: &crate::system::FuchsianSystem, pts: &[Evaluated]) -> Result<C64> {
    if pts.is_empty() {
        Ok(C64::new(1.0, 0.0))
    } else {
        w_disconnected(sys, pts)
    }
}

#[derive(Debug, Clone)]
pub struct ShortDistanceReport {
    pub separations: Vec<f64>,
    pub remainders: Vec<C64>,
    /// `max |R| / min |R|`.
    pub ratio: f64,
}

impl ShortDistanceReport {
    pub fn passed(&self) -> bool {
        self.ratio <= 3.0
    }
}

/// Remainder of `Ŵ_n(X₁, X₂, …)` after removing `⟨E₁,E₂⟩/x₁₂² Ŵ_{n-2}` and
/// `Ŵ_{n-1}(x₂.[E₁,E₂], …)/x₁₂`, with `x₁ = x₂ + s·dir` on the lift of `X₂`
/// for `s = ε, ε/2, ε/4`.
pub fn short_distance_check<T: Transporter + ?Sized>(
    tr: &T,
    x2: &BundlePoint,
    e1: &CMat,
    dir: C64,
    extras: &[BundlePoint],
    eps: Option<f64>,
) -> Result<ShortDistanceReport> {
    let sys = tr.system();
    let eps = eps.unwrap_or(1e-2 * sys.scale());
    let dir = dir / dir.norm();
    let p2 = evaluate(tr, x2)?;
    let rest: Vec<Evaluated> = extras.iter().map(|p| evaluate(tr, p)).collect::<Result<_>>()?;
    let pair = sys.killing(e1, &p2.e);
    let w_rest = w_or_one(sys, &rest)?;
    let mut with_comm = alloc::vec![p2.with_e(commutator(e1, &p2.e))];
    with_comm.extend(rest.iter().cloned());
    let w_comm = w_disconnected(sys, &with_comm)?;
    let mut separations = Vec::new();
    let mut remainders = Vec::new();
    for k in 0..3 {
        let s = eps / f64::from(1u32 << k);
        let x1 = p2.x + dir * s;
        let psi1 = extend(sys, &p2.psi, Segment::Line { a: p2.x, b: x1 }, tr.tol())?;
        let mut pts = alloc::vec![Evaluated::new(x1, psi1, e1.clone())?, p2.clone()];
        pts.extend(rest.iter().cloned());
        let x12 = x1 - p2.x;
        let w = w_disconnected(sys, &pts)?;
        remainders.push(w - pair * w_rest / (x12 * x12) - w_comm / x12);
        separations.push(s);
    }
    let sizes: Vec<f64> = remainders.iter().map(|r| r.norm()).collect();
    let max = sizes.iter().cloned().fold(0.0, f64::max);
    let min = sizes.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = if max == 0.0 { 1.0 } else { max / min };
    Ok(ShortDistanceReport { separations, remainders, ratio })
}

#[derive(Debug, Clone)]
pub struct ExponentFit {
    pub expected: C64,
    pub measured: C64,
    pub rel_error: f64,
}

#[derive(Debug, Clone)]
pub struct AsymptoticsReport {
    /// `⟨A_j, E_j⟩ Ŵ_{n-1}(…)`.
    pub pole_expected: C64,
    /// Extrapolated `(x - z_j) Ŵ_n(x.E^h, …)` with `E^h` the Cartan part.
    pub pole_measured: C64,
    pub pole_rel_error: f64,
    /// One fit per root with a non-negligible component.
    pub exponents: Vec<ExponentFit>,
}

impl AsymptoticsReport {
    pub fn passed(&self) -> bool {
        self.pole_rel_error <= 1e-4 && self.exponents.iter().all(|f| f.rel_error <= 1e-3)
    }
}

/// Splits `Ψ_j E Ψ_j⁻¹ = E_j + Σ_r E_r` and checks each part separately as
/// `x → z_j` along the spoke: the Cartan part gives a simple pole with
/// coefficient `⟨A_j, E_j⟩ Ŵ_{n-1}`, each root part a power `(x - z_j)^{r(A_j)}`.
pub fn puncture_asymptotics_check<T: Transporter + ?Sized>(
    tr: &T,
    frame: &LocalFrame,
    e: &CMat,
    extras: &[Evaluated],
) -> Result<AsymptoticsReport> {
    let sys = tr.system();
    let z = frame.center;
    let rho = tr.layout().radii[frame.j];
    let dir = C64::from_polar(1.0, frame.branch_angle);
    let dec = frame.cartan.decompose(&frame.to_local(e));

    let w_at = |x: C64, f: &CMat| -> Result<C64> {
        let mut pts = alloc::vec![frame_point(frame, x, f.clone())?];
        pts.extend(extras.iter().cloned());
        w_disconnected(sys, &pts)
    };

    let pole_expected = sys.killing(&frame.residue, &dec.cartan) * w_or_one(sys, extras)?;
    let e_h = frame.from_local(&dec.cartan);
    let hs: Vec<f64> = (0..5).map(|k| rho / f64::from(1u32 << k)).collect();
    let vals: Vec<C64> = hs.iter().map(|&h| Ok(w_at(z + dir * h, &e_h)? * dir * h)).collect::<Result<_>>()?;
    let (pole_measured, residual) = richardson(&hs, &vals);
    if residual > 1e-5 * (1.0 + pole_measured.norm()) {
        return Err(Error::NoConvergence(alloc::format!("simple pole at puncture {}: residual {residual:e}", frame.j)));
    }

    let size = linalg::norm(e).max(1e-300);
    let mut exponents = Vec::new();
    for (root, part) in frame.cartan.roots.iter().zip(&dec.roots) {
        if linalg::norm(part) < 1e-8 * size {
            continue;
        }
        let e_r = frame.from_local(part);
        let measured = fit_exponent(rho, |h| w_at(z + dir * h, &e_r))?;
        exponents.push(ExponentFit { expected: root.value, measured, rel_error: rel(measured, root.value) });
    }
    Ok(AsymptoticsReport { pole_expected, pole_measured, pole_rel_error: rel(pole_measured, pole_expected), exponents })
}

/// Slope of `log f` against `log h` over `h ∈ [h_max/100, h_max]`, with a
/// linear correction term.
fn fit_exponent(h_max: f64, mut f: impl FnMut(f64) -> Result<C64>) -> Result<C64> {
    const SAMPLES: usize = 21;
    let mut rows = CMat::zeros(SAMPLES, 3);
    let mut rhs = CMat::zeros(SAMPLES, 1);
    let mut prev: Option<f64> = None;
    for k in 0..SAMPLES {
        let h = h_max * 10f64.powf(-2.0 * k as f64 / (SAMPLES - 1) as f64);
        let v = f(h)?;
        if v.norm() == 0.0 {
            return Err(Error::NoConvergence("root component vanishes identically".into()));
        }
        let mut arg = v.arg();
        if let Some(p) = prev {
            arg += 2.0 * core::f64::consts::PI * ((p - arg) / (2.0 * core::f64::consts::PI)).round();
        }
        prev = Some(arg);
        rows[(k, 0)] = C64::new(h.ln(), 0.0);
        rows[(k, 1)] = C64::new(1.0, 0.0);
        rows[(k, 2)] = C64::new(h / h_max, 0.0);
        rhs[(k, 0)] = C64::new(v.norm().ln(), arg);
    }
    let sol = linalg::lstsq(&rows, &rhs, 1e-14)?;
    Ok(sol[(0, 0)])
}

#[derive(Debug, Clone)]
pub struct ChargeReport {
    pub value: C64,
    pub samples: Vec<(f64, C64)>,
    pub residual: f64,
}

/// `q_j^i = lim (x - z_j)^i Ŵ(C_i(x))` along the spoke, extrapolated from
/// `δ = ρ, ρ/2, ρ/4, ρ/8`.
pub fn extract_charges<T: Transporter + ?Sized>(
    tr: &T,
    frame: &LocalFrame,
    tensor: &CasimirTensor,
    variant: Variant,
) -> Result<ChargeReport> {
    let sys = tr.system();
    let rho = tr.layout().radii[frame.j];
    let dir = C64::from_polar(1.0, frame.branch_angle);
    let mut samples = Vec::new();
    for k in 0..4 {
        let h = rho / f64::from(1u32 << k);
        let w = dir * h;
        let at = frame_point(frame, frame.center + w, zeros(sys.n()))?;
        let v = casimir_amplitude(sys, tensor, &at, &[], variant)? * w.powu(tensor.degree as u32);
        samples.push((h, v));
    }
    let hs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let vs: Vec<C64> = samples.iter().map(|s| s.1).collect();
    let (value, residual) = richardson(&hs, &vs);
    if residual > 1e-5 {
        return Err(Error::NoConvergence(alloc::format!("charge at puncture {}: residual {residual:e}", frame.j)));
    }
    Ok(ChargeReport { value, samples, residual })
}
