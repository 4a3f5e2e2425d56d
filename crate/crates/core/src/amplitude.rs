//! Connected and disconnected amplitudes, the regularized kernel and Casimir
//! amplitudes.
//!
//! Every trace is the fundamental trace times the Killing factor `2N`, applied
//! once per trace.

use alloc::vec::Vec;

use crate::lie::{killing_factor, CasimirTensor};
use crate::linalg::{self, zeros, CMat, C64};
use crate::series::{self, Laurent, Window};
use crate::system::FuchsianSystem;
use crate::transport::Evaluated;
use crate::{Error, Result};

pub const MAX_POINTS: usize = 8;

/// Projections closer than `1e-9 · scale` use the regularized kernel.
pub fn coincide(sys: &FuchsianSystem, x: C64, y: C64) -> bool {
    (x - y).norm() <= 1e-9 * sys.scale()
}

/// `K(x, y) = Ψ(x)⁻¹Ψ(y)/(y - x)`, or `Ψ(x)⁻¹A(x)Ψ(y)` for coinciding projections.
pub fn kernel(sys: &FuchsianSystem, x: &Evaluated, y: &Evaluated) -> CMat {
    if coincide(sys, x.x, y.x) {
        &x.psi_inv * sys.connection_unchecked(x.x) * &y.psi
    } else {
        &x.psi_inv * &y.psi / (y.x - x.x)
    }
}

/// `P[i][k] = E_i K(x_i, x_k)`.
fn blocks(sys: &FuchsianSystem, pts: &[Evaluated]) -> Vec<Vec<CMat>> {
    pts.iter()
        .map(|p| pts.iter().map(|q| &p.e * kernel(sys, p, q)).collect())
        .collect()
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one point required".into()));
    }
    if n > MAX_POINTS {
        return Err(Error::TooManyPoints(n));
    }
    Ok(())
}

/// `κ Tr Π_{i ∈ cycle} P[i][next(i)]` with the cycle given in traversal order.
fn cycle_trace(p: &[Vec<CMat>], cycle: &[usize], kappa: f64) -> C64 {
    let mut m = p[cycle[0]][cycle[1 % cycle.len()]].clone();
    for w in 1..cycle.len() {
        m *= &p[cycle[w]][cycle[(w + 1) % cycle.len()]];
    }
    m.trace() * kappa
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = alloc::vec![a.clone()];
    let mut c = alloc::vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Cycles of `sigma`, each starting at its smallest element.
pub fn cycles_of(sigma: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = alloc::vec![false; sigma.len()];
    let mut out = Vec::new();
    for s in 0..sigma.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            c.push(i);
            i = sigma[i];
        }
        out.push(c);
    }
    out
}

/// `W_n`: `(-1)^{n+1} Σ_{σ circular} Tr Π E_i K(x_i, x_{σ(i)})`.
pub fn w_connected(sys: &FuchsianSystem, pts: &[Evaluated]) -> Result<C64> {
    let n = pts.len();
    check_count(n)?;
    let kappa = killing_factor(sys.n());
    let p = blocks(sys, pts);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    if n == 1 {
        return Ok(cycle_trace(&p, &[0], kappa));
    }
    let mut total = C64::new(0.0, 0.0);
    for rest in permutations(n - 1) {
        let mut cycle = alloc::vec![0];
        cycle.extend(rest.iter().map(|&r| r + 1));
        total += cycle_trace(&p, &cycle, kappa);
    }
    Ok(total * sign)
}

/// `Ŵ_n`: full signed permutation sum of products of cycle traces.
pub fn w_disconnected(sys: &FuchsianSystem, pts: &[Evaluated]) -> Result<C64> {
    let n = pts.len();
    check_count(n)?;
    let kappa = killing_factor(sys.n());
    let p = blocks(sys, pts);
    Ok(signed_permutation_sum(n, |c| cycle_trace(&p, c, kappa)))
}

fn signed_permutation_sum(n: usize, mut trace: impl FnMut(&[usize]) -> C64) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for sigma in permutations(n) {
        let mut term = C64::new(1.0, 0.0);
        for c in cycles_of(&sigma) {
            if c.len() % 2 == 0 {
                term = -term;
            }
            term *= trace(&c);
        }
        total += term;
    }
    total
}

/// All set partitions of `0..n`.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = alloc::vec![Vec::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for part in &out {
            for b in 0..part.len() {
                let mut q = part.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = part.clone();
            q.push(alloc::vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// `Σ_{partitions} Π_k W(I_k)`, built from connected amplitudes only.
pub fn disconnected_from_partitions(sys: &FuchsianSystem, pts: &[Evaluated]) -> Result<C64> {
    check_count(pts.len())?;
    let mut total = C64::new(0.0, 0.0);
    for part in set_partitions(pts.len()) {
        let mut term = C64::new(1.0, 0.0);
        for block in part {
            let sub: Vec<Evaluated> = block.iter().map(|&i| pts[i].clone()).collect();
            term *= w_connected(sys, &sub)?;
        }
        total += term;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// All Casimir legs at the same point, regularized kernel.
    Plain,
    /// Nested contour integrals around the point.
    NormalOrdered,
}

fn check_casimir(tensor: &CasimirTensor, extras: usize) -> Result<()> {
    if tensor.degree + extras > MAX_POINTS {
        return Err(Error::TooManyPoints(tensor.degree + extras));
    }
    Ok(())
}

/// `Ŵ_{i+n}(C_i(x), X_1, …, X_n) = Σ c^{a…} Ŵ(x.e_{a_1}, …, x.e_{a_i}, X_1, …)`.
///
/// `at` carries `Ψ(x)`; its `e` is ignored.
pub fn casimir_plain(sys: &FuchsianSystem, tensor: &CasimirTensor, at: &Evaluated, extras: &[Evaluated]) -> Result<C64> {
    check_casimir(tensor, extras.len())?;
    let basis = sys.algebra.basis();
    let mut total = C64::new(0.0, 0.0);
    let mut pts: Vec<Evaluated> = Vec::with_capacity(tensor.degree + extras.len());
    for (idx, c) in tensor.terms(0.0) {
        pts.clear();
        pts.extend(idx.iter().map(|&a| at.with_e(basis[a].clone())));
        pts.extend(extras.iter().cloned());
        total += w_disconnected(sys, &pts)? * c;
    }
    Ok(total)
}

/// `Σ_a (-⟨f_a A f^a A⟩ + ⟨f_a, A⟩⟨f^a, A⟩)` with traces normalized as above.
pub fn direct_rational_w2c2(sys: &FuchsianSystem, x: C64) -> Result<C64> {
    let a = sys.connection_at(x)?;
    Ok(direct_rational_w2c2_of(sys, &a))
}

pub fn direct_rational_w2c2_of(sys: &FuchsianSystem, a: &CMat) -> C64 {
    let kappa = killing_factor(sys.n());
    let alg = &sys.algebra;
    let mut total = C64::new(0.0, 0.0);
    for (f, g) in alg.basis().iter().zip(alg.dual()) {
        let fa = f * a;
        let ga = g * a;
        total += -(linalg::trace_prod(&fa, &ga)) * kappa + fa.trace() * ga.trace() * (kappa * kappa);
    }
    total
}

/// `Σ_a ⟨A², f_a f^a⟩`-type term separating the two quadratic variants.
pub fn normal_ordering_correction_w2c2(sys: &FuchsianSystem, x: C64) -> Result<C64> {
    let a = sys.connection_at(x)?;
    let kappa = killing_factor(sys.n());
    let alg = &sys.algebra;
    let a2 = &a * &a;
    let mut s = zeros(sys.n());
    for (f, g) in alg.basis().iter().zip(alg.dual()) {
        s += f * g;
    }
    Ok(linalg::trace_prod(&a2, &s) * kappa)
}

/// Position of a leg in the normal-ordered expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Pos {
    /// `x + ε₁`, outer contour.
    Outer,
    /// `x + ε₂`, inner contour.
    Inner,
    /// `x` itself.
    Base,
    /// An extra point, by index.
    Extra(usize),
}

struct Expansion<'a> {
    sys: &'a FuchsianSystem,
    win: Window,
    x: C64,
    a_outer: Laurent,
    a_inner: Laurent,
    extras: &'a [Evaluated],
    extra_m: Vec<CMat>,
}

impl<'a> Expansion<'a> {
    fn edge(&self, u: Pos, v: Pos) -> Laurent {
        let w = self.win;
        let one = |c: C64, p: i32, q: i32| Laurent::scalar(w, c, p, q);
        let unit = C64::new(1.0, 0.0);
        match (u, v) {
            (Pos::Outer, Pos::Outer) => self.a_outer.clone(),
            (Pos::Inner, Pos::Inner) => self.a_inner.clone(),
            (Pos::Base, Pos::Base) => Laurent::constant(w, self.sys.connection_unchecked(self.x)),
            (Pos::Outer, Pos::Base) => one(-unit, -1, 0),
            (Pos::Base, Pos::Outer) => one(unit, -1, 0),
            (Pos::Inner, Pos::Base) => one(-unit, 0, -1),
            (Pos::Base, Pos::Inner) => one(unit, 0, -1),
            (Pos::Outer, Pos::Inner) => series::inverse_difference(w),
            (Pos::Inner, Pos::Outer) => series::inverse_difference(w).scale(-unit),
            (Pos::Outer, Pos::Extra(k)) => series::inverse_shift(w, self.extras[k].x - self.x, false),
            (Pos::Extra(k), Pos::Outer) => series::inverse_shift(w, self.extras[k].x - self.x, false).scale(-unit),
            (Pos::Inner, Pos::Extra(k)) => series::inverse_shift(w, self.extras[k].x - self.x, true),
            (Pos::Extra(k), Pos::Inner) => series::inverse_shift(w, self.extras[k].x - self.x, true).scale(-unit),
            (pu, pv) => {
                let xu = self.position(pu);
                let xv = self.position(pv);
                if coincide(self.sys, xu, xv) {
                    Laurent::constant(w, self.sys.connection_unchecked(xu))
                } else {
                    one(unit / (xv - xu), 0, 0)
                }
            }
        }
    }

    fn position(&self, p: Pos) -> C64 {
        match p {
            Pos::Extra(k) => self.extras[k].x,
            _ => self.x,
        }
    }
}

/// Taylor coefficients `A_m` of `A(x + ε)`.
fn connection_taylor(sys: &FuchsianSystem, x: C64, order: usize) -> Vec<CMat> {
    (0..=order)
        .map(|m| {
            let mut out = zeros(sys.n());
            for (z, a) in sys.punctures.iter().zip(&sys.residues) {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                out += a * (C64::new(sign, 0.0) / (x - z).powu(m as u32 + 1));
            }
            out
        })
        .collect()
}

/// Taylor coefficients of `M(x + ε)` from `M' = [A, M]`.
pub fn m_taylor(a_taylor: &[CMat], m0: &CMat, order: usize) -> Vec<CMat> {
    let mut ms = alloc::vec![m0.clone()];
    for k in 0..order {
        let mut s = zeros(m0.nrows());
        for m in 0..=k {
            s += linalg::commutator(&a_taylor[m], &ms[k - m]);
        }
        ms.push(s / C64::new((k + 1) as f64, 0.0));
    }
    ms
}

/// `Ŵ_{i+n}(𝒞_i(x), X_1, …)` for `i ∈ {2, 3}`: the nested contour integrals are
/// evaluated as the constant term of a truncated Laurent expansion in the
/// displacements of the outer legs, with `M` expanded through `M' = [A, M]`.
pub fn casimir_normal_ordered(
    sys: &FuchsianSystem,
    tensor: &CasimirTensor,
    at: &Evaluated,
    extras: &[Evaluated],
) -> Result<C64> {
    check_casimir(tensor, extras.len())?;
    let win = match tensor.degree {
        2 => Window::univariate(-2, 2),
        3 => Window { lo1: -6, hi1: 6, lo2: -2, hi2: 2 },
        d => return Err(Error::UnsupportedDegree { degree: d, n: sys.n() }),
    };
    for e in extras {
        if coincide(sys, e.x, at.x) {
            return Err(Error::InvalidArgument("extra point coincides with the Casimir location".into()));
        }
    }
    let x = at.x;
    let order = win.hi1.max(win.hi2) as usize;
    let a_tay = connection_taylor(sys, x, order);
    let a_outer = Laurent::taylor(win, &a_tay, false);
    let a_inner = Laurent::taylor(win, &a_tay, true);
    let extra_m: Vec<CMat> = extras.iter().map(Evaluated::m).collect();
    let ex = Expansion { sys, win, x, a_outer, a_inner, extras, extra_m };

    let degree = tensor.degree;
    let legs: Vec<Pos> = match degree {
        2 => alloc::vec![Pos::Outer, Pos::Base],
        _ => alloc::vec![Pos::Outer, Pos::Inner, Pos::Base],
    };
    let mut positions = legs.clone();
    positions.extend((0..extras.len()).map(Pos::Extra));
    let n = positions.len();
    let edges: Vec<Vec<Laurent>> =
        positions.iter().map(|&u| positions.iter().map(|&v| ex.edge(u, v)).collect()).collect();

    // M series per basis element and leg kind.
    let basis = sys.algebra.basis();
    let m_outer: Vec<Laurent> = basis
        .iter()
        .map(|e| Laurent::taylor(win, &m_taylor(&a_tay, &(&at.psi * e * &at.psi_inv), order), false))
        .collect();
    let m_inner: Vec<Laurent> = basis
        .iter()
        .map(|e| Laurent::taylor(win, &m_taylor(&a_tay, &(&at.psi * e * &at.psi_inv), order), true))
        .collect();
    let m_base: Vec<Laurent> = basis.iter().map(|e| Laurent::constant(win, &at.psi * e * &at.psi_inv)).collect();
    let m_extra: Vec<Laurent> = ex.extra_m.iter().map(|m| Laurent::constant(win, m.clone())).collect();

    let kappa = killing_factor(sys.n());
    let perms = permutations(n);
    let cycles: Vec<(f64, Vec<Vec<usize>>)> = perms
        .iter()
        .map(|s| {
            let cs = cycles_of(s);
            let sign = cs.iter().fold(1.0, |acc, c| if c.len() % 2 == 0 { -acc } else { acc });
            (sign, cs)
        })
        .collect();

    let mut total = C64::new(0.0, 0.0);
    let mut ms: Vec<&Laurent> = Vec::with_capacity(n);
    for (idx, coeff) in tensor.terms(0.0) {
        ms.clear();
        for (slot, &a) in idx.iter().enumerate() {
            ms.push(match legs[slot] {
                Pos::Outer => &m_outer[a],
                Pos::Inner => &m_inner[a],
                _ => &m_base[a],
            });
        }
        ms.extend(m_extra.iter());
        let mut amp = Laurent::zero(win, 1);
        for (sign, cs) in &cycles {
            let mut term = Laurent::scalar(win, C64::new(*sign, 0.0), 0, 0);
            for c in cs {
                let mut prod = ms[c[0]].mul(&edges[c[0]][c[1 % c.len()]]);
                for w in 1..c.len() {
                    prod = prod.mul(ms[c[w]]).mul(&edges[c[w]][c[(w + 1) % c.len()]]);
                }
                term = term.mul(&prod.trace().scale(C64::new(kappa, 0.0)));
            }
            amp = amp.add(&term);
        }
        total += amp.scalar_coeff(0, 0) * coeff;
    }
    Ok(total)
}

pub fn casimir_amplitude(
    sys: &FuchsianSystem,
    tensor: &CasimirTensor,
    at: &Evaluated,
    extras: &[Evaluated],
    variant: Variant,
) -> Result<C64> {
    match variant {
        Variant::Plain => casimir_plain(sys, tensor, at, extras),
        Variant::NormalOrdered => casimir_normal_ordered(sys, tensor, at, extras),
    }
}

/// Quadratic normal-ordered amplitude by trapezoidal quadrature of the contour
/// integral on a circle of radius `r`, with `Ψ` on the circle obtained from
/// `psi_at` (used as an independent check of the algebraic expansion).
pub fn casimir_normal_ordered_quadrature(
    sys: &FuchsianSystem,
    tensor: &CasimirTensor,
    at: &Evaluated,
    extras: &[Evaluated],
    r: f64,
    nodes: usize,
    mut psi_at: impl FnMut(C64) -> Result<CMat>,
) -> Result<C64> {
    if tensor.degree != 2 {
        return Err(Error::UnsupportedDegree { degree: tensor.degree, n: sys.n() });
    }
    check_casimir(tensor, extras.len())?;
    let basis = sys.algebra.basis();
    let mut total = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let th = 2.0 * core::f64::consts::PI * k as f64 / nodes as f64;
        let x1 = at.x + C64::from_polar(r, th);
        let outer = Evaluated::new(x1, psi_at(x1)?, zeros(sys.n()))?;
        let mut pts: Vec<Evaluated> = Vec::with_capacity(2 + extras.len());
        for (idx, c) in tensor.terms(0.0) {
            pts.clear();
            pts.push(outer.with_e(basis[idx[0]].clone()));
            pts.push(at.with_e(basis[idx[1]].clone()));
            pts.extend(extras.iter().cloned());
            total += w_disconnected(sys, &pts)? * c;
        }
    }
    Ok(total / nodes as f64)
}
