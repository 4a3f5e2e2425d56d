//! Arcs and chains on the bundle: boundaries, intersections, `W₁` periods and
//! the space of cycles built from loops around the punctures.
//!
//! An [`Arc`] is a path in the plane together with a route from the basepoint
//! that fixes its lift, and an element `E`. Arcs may end at a puncture; the
//! last piece is then a straight tail into `z_j` evaluated through the local
//! frame.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geometry::{crossings, Crossing};
use crate::lie::{exp_2pi_i, killing_factor, LieAlgebra};
use crate::linalg::{self, identity, inverse, norm, zeros, CMat, C64, I};
use crate::local::{local_frames, LocalFrame};
use crate::path::{Path, Segment};
use crate::quad;
use crate::system::FuchsianSystem;
use crate::transport::{extend, flow, Transporter};
use crate::{Error, Result};

const EDGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    Regular,
    /// The path ends inside the local disc of this puncture and continues
    /// straight into it.
    Puncture(usize),
}

#[derive(Debug, Clone)]
pub struct Arc {
    /// Route from the basepoint to the start of `path`.
    pub lift: Path,
    pub path: Path,
    pub e: CMat,
    pub end: Terminal,
}

impl Arc {
    pub fn new(lift: Path, path: Path, e: CMat) -> Self {
        Self { lift, path, e, end: Terminal::Regular }
    }

    /// `[γ_j.E]` on the standard generator.
    pub fn loop_generator<T: Transporter + ?Sized>(tr: &T, j: usize, e: CMat) -> Self {
        let l = tr.layout();
        Self::new(Path::new(l.basepoint), l.generator(tr.system(), j), e)
    }

    /// `[δ_j.E]`: along the spoke and into `z_j`.
    pub fn to_puncture<T: Transporter + ?Sized>(tr: &T, j: usize, e: CMat) -> Self {
        let l = tr.layout();
        Self { lift: Path::new(l.basepoint), path: l.spoke(j), e, end: Terminal::Puncture(j) }
    }

    pub fn start(&self) -> C64 {
        self.path.start
    }

    /// Same arc traversed backwards.
    pub fn reversed(&self) -> Result<Self> {
        if self.end != Terminal::Regular {
            return Err(Error::InvalidArc("cannot reverse an arc ending at a puncture".into()));
        }
        Ok(Self::new(self.lift.clone().then(&self.path), self.path.reversed(), self.e.clone()))
    }

    /// The arc moved by `v`, lifted through the segment from its old start.
    pub fn translated(&self, v: C64) -> Self {
        let lift = self.lift.clone().line_to(self.start() + v);
        Self { lift, path: self.path.translated(v), e: self.e.clone(), end: self.end }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Chain {
    pub terms: Vec<(C64, Arc)>,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(arc: Arc) -> Self {
        Self { terms: alloc::vec![(C64::new(1.0, 0.0), arc)] }
    }

    pub fn push(&mut self, c: C64, arc: Arc) {
        self.terms.push((c, arc));
    }

    pub fn plus(mut self, other: &Chain) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { terms: self.terms.iter().map(|(c, a)| (c * s, a.clone())).collect() }
    }

    pub fn translated(&self, v: C64) -> Self {
        Self { terms: self.terms.iter().map(|(c, a)| (*c, a.translated(v))).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    Point(C64),
    Puncture(usize),
}

/// A `g`-valued divisor.
#[derive(Debug, Clone, Default)]
pub struct BoundaryDivisor {
    pub entries: Vec<(Site, CMat)>,
}

impl BoundaryDivisor {
    /// Largest value norm at regular points.
    pub fn point_defect(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(s, _)| matches!(s, Site::Point(_)))
            .map(|(_, m)| norm(m))
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|(_, m)| norm(m)).fold(0.0, f64::max)
    }

    pub fn is_cycle(&self, tol: f64) -> bool {
        self.max_norm() <= tol
    }
}

/// Solution data along one arc.
struct Trace {
    segments: Vec<Segment>,
    /// `Ψ` at the start of each segment of `path`.
    psi_starts: Vec<CMat>,
    psi_end: CMat,
    /// Index of the tail segment, if any, and its puncture.
    tail: Option<usize>,
}

/// Cycle calculus for a transporter, with local frames at every puncture.
pub struct Surface<'a, T: Transporter + ?Sized> {
    pub tr: &'a T,
    pub frames: Vec<LocalFrame>,
}

impl<'a, T: Transporter + ?Sized> Surface<'a, T> {
    pub fn new(tr: &'a T) -> Result<Self> {
        Ok(Self { tr, frames: local_frames(tr)? })
    }

    pub fn system(&self) -> &FuchsianSystem {
        self.tr.system()
    }

    fn check_puncture_element(&self, j: usize, e: &CMat) -> Result<CMat> {
        let f = &self.frames[j];
        let dec = f.cartan.decompose(&f.to_local(e));
        let size = norm(e).max(1e-300);
        if dec.root_norm() > 1e-8 * size {
            return Err(Error::InvalidArc(alloc::format!(
                "element ending at puncture {j} has root components {:e}",
                dec.root_norm() / size
            )));
        }
        Ok(dec.cartan)
    }

    fn trace(&self, arc: &Arc) -> Result<Trace> {
        let sys = self.system();
        let tol = self.tr.tol();
        let mut psi = self.tr.psi(&arc.lift)?;
        let mut segments = arc.path.segments.clone();
        let mut psi_starts = Vec::with_capacity(segments.len());
        for seg in &segments {
            psi_starts.push(psi.clone());
            psi = extend(sys, &psi, *seg, tol)?;
        }
        let mut tail = None;
        if let Terminal::Puncture(j) = arc.end {
            self.check_puncture_element(j, &arc.e)?;
            let f = &self.frames[j];
            let p = arc.path.end();
            let d = (p - f.center).norm();
            if d < sys.clearance || d > 0.5 * f.series.radius {
                return Err(Error::InvalidArc(alloc::format!("arc ends at distance {d:e} from puncture {j}")));
            }
            let local = f.psi(p);
            let mismatch = norm(&(&local - &psi)) / norm(&psi);
            if mismatch > 1e-6 {
                return Err(Error::InvalidArc(alloc::format!(
                    "arc reaches puncture {j} on a lift different from the local frame ({mismatch:e})"
                )));
            }
            tail = Some(segments.len());
            segments.push(Segment::Line { a: p, b: f.center });
        }
        Ok(Trace { segments, psi_starts, psi_end: psi, tail })
    }

    fn psi_on(&self, arc: &Arc, tr: &Trace, k: usize, t: f64) -> Result<CMat> {
        if Some(k) == tr.tail {
            let Terminal::Puncture(j) = arc.end else { unreachable!() };
            return Ok(self.frames[j].psi(tr.segments[k].point(t)));
        }
        if t == 0.0 {
            return Ok(tr.psi_starts[k].clone());
        }
        extend(self.system(), &tr.psi_starts[k], tr.segments[k].sub(0.0, t), self.tr.tol())
    }

    /// `∂[(x,y).E] = π(y).M(y.E) - π(x).M(x.E)`, merged by site.
    pub fn boundary(&self, chain: &Chain) -> Result<BoundaryDivisor> {
        let sys = self.system();
        let merge = 1e-9 * sys.scale();
        let mut div = BoundaryDivisor::default();
        let mut add = |site: Site, m: CMat| {
            for (s, v) in div.entries.iter_mut() {
                let same = match (*s, site) {
                    (Site::Point(a), Site::Point(b)) => (a - b).norm() <= merge,
                    (Site::Puncture(a), Site::Puncture(b)) => a == b,
                    _ => false,
                };
                if same {
                    *v += m;
                    return;
                }
            }
            div.entries.push((site, m));
        };
        for (c, arc) in &chain.terms {
            let tr = self.trace(arc)?;
            let m0 = &tr.psi_starts.first().cloned().unwrap_or_else(|| tr.psi_end.clone());
            let m_start = m0 * &arc.e * inverse(m0)?;
            add(Site::Point(arc.start()), m_start * (-c));
            match arc.end {
                Terminal::Regular => {
                    let m_end = &tr.psi_end * &arc.e * inverse(&tr.psi_end)?;
                    add(Site::Point(arc.path.end()), m_end * *c);
                }
                Terminal::Puncture(j) => {
                    let h = self.check_puncture_element(j, &arc.e)?;
                    add(Site::Puncture(j), h * *c);
                }
            }
        }
        Ok(div)
    }

    /// `Σ_x (π(Γ),π(Γ'))_x ⟨M(X), M(X')⟩`, evaluated in both argument orders
    /// and antisymmetrized so that `(Γ,Γ') = -(Γ',Γ)` holds exactly.
    pub fn intersection(&self, c1: &Chain, c2: &Chain) -> Result<C64> {
        Ok((self.intersection_raw(c1, c2)? - self.intersection_raw(c2, c1)?) * 0.5)
    }

    /// One-sided evaluation; degenerate configurations are resolved by
    /// translating `c2` by a quarter of the clearance.
    pub fn intersection_raw(&self, c1: &Chain, c2: &Chain) -> Result<C64> {
        let t1: Vec<Trace> = c1.terms.iter().map(|(_, a)| self.trace(a)).collect::<Result<_>>()?;
        let shift = self.system().clearance / 4.0;
        for attempt in 0..5 {
            let moved;
            let c2r = if attempt == 0 {
                c2
            } else {
                moved = c2.translated(C64::from_polar(shift, 0.3 + 1.1 * attempt as f64));
                &moved
            };
            let t2: Vec<Trace> = c2r.terms.iter().map(|(_, a)| self.trace(a)).collect::<Result<_>>()?;
            if let Some(v) = self.intersect_traced(c1, &t1, c2r, &t2)? {
                return Ok(v);
            }
        }
        Err(Error::NonTransversal)
    }

    fn intersect_traced(&self, c1: &Chain, t1: &[Trace], c2: &Chain, t2: &[Trace]) -> Result<Option<C64>> {
        let sys = self.system();
        let mut found: Vec<(usize, usize, usize, usize, Crossing)> = Vec::new();
        for (i, tr1) in t1.iter().enumerate() {
            for (k, tr2) in t2.iter().enumerate() {
                let shared_puncture = tr1.tail.is_some() && c1.terms[i].1.end == c2.terms[k].1.end;
                for (a, s1) in tr1.segments.iter().enumerate() {
                    for (b, s2) in tr2.segments.iter().enumerate() {
                        // Two tails into the same puncture meet only at z_j, which is not in Σ.
                        if shared_puncture && Some(a) == tr1.tail && Some(b) == tr2.tail {
                            continue;
                        }
                        match crossings(s1, s2, EDGE_TOL) {
                            None => return Ok(None),
                            Some(xs) => found.extend(xs.into_iter().map(|x| (i, k, a, b, x))),
                        }
                    }
                }
            }
        }
        let mut total = C64::new(0.0, 0.0);
        for (i, k, a, b, x) in found {
            let (c_1, arc1) = &c1.terms[i];
            let (c_2, arc2) = &c2.terms[k];
            let p1 = self.psi_on(arc1, &t1[i], a, x.t)?;
            let p2 = self.psi_on(arc2, &t2[k], b, x.s)?;
            let m1 = &p1 * &arc1.e * inverse(&p1)?;
            let m2 = &p2 * &arc2.e * inverse(&p2)?;
            total += sys.killing(&m1, &m2) * c_1 * c_2 * f64::from(x.sign);
        }
        Ok(Some(total))
    }

    /// `∫_Γ W₁(X) dX`, with the logarithmic regularization for arcs that end
    /// at a puncture.
    pub fn integrate_w1(&self, chain: &Chain) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for (c, arc) in &chain.terms {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            total += self.integrate_arc(arc)? * c;
        }
        Ok(total)
    }

    fn integrate_arc(&self, arc: &Arc) -> Result<C64> {
        let sys = self.system();
        let psi0 = self.tr.psi(&arc.lift)?;
        let m0 = &psi0 * &arc.e * inverse(&psi0)?;
        let res = flow(sys, &arc.path, &psi0, Some(&m0), self.tr.tol())?;
        let Terminal::Puncture(j) = arc.end else {
            return Ok(res.w1_integral);
        };
        let frame = &self.frames[j];
        let h = self.check_puncture_element(j, &arc.e)?;
        let c = sys.killing(&frame.residue, &h);
        let z = frame.center;
        // Continuous log(x - z_j) along the path, starting on the frame branch.
        let mut log_end = frame.log(arc.start());
        for seg in &arc.path.segments {
            log_end += log_increment(seg, z);
        }
        let p = arc.path.end();
        Ok(res.w1_integral - c * log_end + self.tail_integral(frame, &h, p))
    }

    /// `∫_p^{z_j} (W₁(x.E) - ⟨A_j,E_j⟩/(x - z_j)) dx` on the straight tail,
    /// where `M(x.E) = G(x) E_j G(x)⁻¹`.
    fn tail_integral(&self, frame: &LocalFrame, h: &CMat, p: C64) -> C64 {
        let sys = self.system();
        let kappa = killing_factor(sys.n());
        let z = frame.center;
        let dx = z - p;
        let mut acc = C64::new(0.0, 0.0);
        for (t, w) in quad::on_interval(24, 0.0, 1.0) {
            let x = p + dx * t;
            let g = frame.series.eval(x);
            let gm = &g * h * inverse(&g).unwrap_or_else(|_| identity(sys.n()));
            let mut rest = zeros(sys.n());
            for (i, (zi, ai)) in sys.punctures.iter().zip(&sys.residues).enumerate() {
                if i != frame.j {
                    rest += ai / (x - zi);
                }
            }
            let singular = linalg::trace_prod(&frame.residue, &(&gm - h)) / (x - z);
            let regular = linalg::trace_prod(&rest, &gm);
            acc += (singular + regular) * kappa * w;
        }
        acc * dx
    }

    /// Splits `E = E_comm + (F - S_j F S_j⁻¹)` with `E_comm` commuting with
    /// `S_j`, and returns `[δ_j.E_comm] + [γ_j.F]`.
    pub fn replace_puncture_arc(&self, j: usize, e: &CMat) -> Result<PunctureSplit> {
        let f = &self.frames[j];
        let dec = f.cartan.decompose(&f.to_local(e));
        let n = self.system().n();
        let mut f_loc = zeros(n);
        let mut worst = f64::INFINITY;
        for (root, part) in f.cartan.roots.iter().zip(&dec.roots) {
            let gap = (C64::new(1.0, 0.0) - (I * 2.0 * PI * root.value).exp()).norm();
            worst = worst.min(gap);
            if gap < 1e-10 {
                return Err(Error::IllConditionedSplit(gap));
            }
            f_loc += part / (C64::new(1.0, 0.0) - (I * 2.0 * PI * root.value).exp());
        }
        let commuting = f.from_local(&dec.cartan);
        let f_elt = f.from_local(&f_loc);
        let size = norm(e).max(1e-300);
        let mut chain = Chain::new();
        if norm(&commuting) > 1e-14 * size {
            chain.push(C64::new(1.0, 0.0), Arc::to_puncture(self.tr, j, commuting.clone()));
        }
        if norm(&f_elt) > 1e-14 * size {
            chain.push(C64::new(1.0, 0.0), Arc::loop_generator(self.tr, j, f_elt.clone()));
        }
        Ok(PunctureSplit { commuting, f: f_elt, chain, smallest_gap: worst })
    }

    /// Short arcs crossing the spoke of `z_j` between the basepoint and the
    /// circle, lifted by straight routes from the basepoint.
    pub fn probes(&self, j: usize, count: usize) -> Vec<Arc> {
        let l = self.tr.layout();
        let alg = &self.system().algebra;
        let x0 = l.basepoint;
        let b = l.spoke_ends[j];
        let rho = l.radii[j];
        let golden = 0.618_033_988_749_895;
        (0..count)
            .map(|k| {
                let u = (k as f64 * golden + 0.31).fract();
                let v = (k as f64 * golden * golden + 0.17).fract();
                let q = x0 + (b - x0) * (0.2 + 0.6 * u);
                let angle = (b - x0).arg() + PI / 2.0 + (v - 0.5);
                let half = C64::from_polar(0.5 * rho, angle);
                let coords: Vec<C64> =
                    (0..alg.dim()).map(|a| C64::new(((a + k) % 3) as f64 - 0.7, 0.3 * ((a * 7 + k) % 5) as f64)).collect();
                Arc::new(Path::new(x0).line_to(q - half), Path::new(q - half).line_to(q + half), alg.from_coords(&coords))
            })
            .collect()
    }

    /// Largest difference of intersections with the probes.
    pub fn probe_mismatch(&self, a: &Chain, b: &Chain, probes: &[Arc]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in probes {
            let pc = Chain::single(p.clone());
            let d = self.intersection(a, &pc)? - self.intersection(b, &pc)?;
            worst = worst.max(d.norm());
        }
        Ok(worst)
    }

    /// Loop `γ_j` rebased at a shifted basepoint with a smaller circle entered
    /// from a rotated direction, lifted through the segment between the two
    /// basepoints. Homotopic to `γ_j` conjugated by that segment; used to put
    /// cycles in general position with respect to each other.
    pub fn shifted_generator(&self, j: usize, e: CMat) -> Result<Arc> {
        let sys = self.system();
        let l = self.tr.layout();
        let rho = l.radii[j];
        let x0 = l.basepoint;
        let x1 = x0 + C64::from_polar(0.5 * rho, 0.7);
        let z = sys.punctures[j];
        let theta = (x0 - z).arg() + 0.5;
        let end = z + C64::from_polar(0.6 * rho, theta);
        let spoke = Path::new(x1).line_to(end);
        let path = spoke.clone().arc(z, 2.0 * PI).then(&spoke.reversed());
        let link = Path::new(x0).line_to(x1);
        let t_link = self.tr.transport(&link)?;
        let t_loop = flow(sys, &path, &identity(sys.n()), None, self.tr.tol())?.matrix;
        let expected = &t_link * self.tr.generator(j)?;
        let defect = norm(&(&t_loop * &t_link - &expected)) / norm(&expected);
        if defect > 1e-6 {
            return Err(Error::InvalidArc(alloc::format!("shifted loop around puncture {j} is not homotopic ({defect:e})")));
        }
        Ok(Arc::new(link, path, e))
    }

    /// `Σ_j [γ_j.E_j]` from per-puncture elements.
    pub fn loop_chain(&self, elements: &[CMat]) -> Chain {
        let mut c = Chain::new();
        for (j, e) in elements.iter().enumerate() {
            if norm(e) > 0.0 {
                c.push(C64::new(1.0, 0.0), Arc::loop_generator(self.tr, j, e.clone()));
            }
        }
        c
    }

    fn shifted_loop_chain(&self, elements: &[CMat]) -> Result<Chain> {
        let mut c = Chain::new();
        for (j, e) in elements.iter().enumerate() {
            if norm(e) > 0.0 {
                c.push(C64::new(1.0, 0.0), self.shifted_generator(j, e.clone())?);
            }
        }
        Ok(c)
    }

    /// `(C_a, C_b)` for loop cycles given by per-puncture elements, the second
    /// argument realized on the shifted loops.
    pub fn intersection_matrix(&self, cycles: &[Vec<CMat>]) -> Result<CMat> {
        let k = cycles.len();
        let first: Vec<Chain> = cycles.iter().map(|c| self.loop_chain(c)).collect();
        let second: Vec<Chain> = cycles.iter().map(|c| self.shifted_loop_chain(c)).collect::<Result<_>>()?;
        let mut m = CMat::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                m[(a, b)] = self.intersection(&first[a], &second[b])?;
            }
        }
        Ok(m)
    }

    /// Loop cycles `Σ_j [γ_j.E_j]` with zero boundary, modulo the relation
    /// among the generators, split into A-cycles and a complement.
    pub fn cycle_space(&self) -> Result<CycleSpace> {
        let sys = self.system();
        let alg = &sys.algebra;
        let d = alg.dim();
        let np = sys.num_punctures();
        let gens: Vec<CMat> = (0..np).map(|j| self.tr.generator(j)).collect::<Result<_>>()?;
        let gen_inv: Vec<CMat> = gens.iter().map(inverse).collect::<Result<_>>()?;

        // Boundary map (E_1, …, E_N) ↦ Σ_j (S_j E_j S_j⁻¹ - E_j).
        let mut map = CMat::zeros(d, np * d);
        for j in 0..np {
            for (a, e) in alg.basis().iter().enumerate() {
                let v = alg.coords(&(&gens[j] * e * &gen_inv[j] - e));
                for (r, x) in v.into_iter().enumerate() {
                    map[(r, j * d + a)] = x;
                }
            }
        }
        let singular_values = linalg::singular_values(&map);
        let kernel = linalg::null_space(&map, 1e-8);

        // Topologically trivial combinations from S_{o_0} S_{o_1} ⋯ = Id.
        let order = self.tr.layout().relation_order().to_vec();
        let mut trivial = CMat::zeros(np * d, d);
        for (a, e) in alg.basis().iter().enumerate() {
            for (k, &j) in order.iter().enumerate() {
                let mut before = identity(sys.n());
                for &i in &order[k + 1..] {
                    before *= &gens[i];
                }
                let conj = &before * e * inverse(&before)?;
                for (r, x) in alg.coords(&conj).into_iter().enumerate() {
                    trivial[(j * d + r, a)] = x;
                }
            }
        }
        // A-cycles: Ψ_j⁻¹ h_j Ψ_j at each puncture.
        let mut a_vecs: Vec<Vec<C64>> = Vec::new();
        for (j, f) in self.frames.iter().enumerate() {
            for h in f.cartan_basis() {
                let mut v = alloc::vec![C64::new(0.0, 0.0); np * d];
                for (r, x) in alg.coords(&h).into_iter().enumerate() {
                    v[j * d + r] = x;
                }
                a_vecs.push(v);
            }
        }
        let a_mat = columns(np * d, &a_vecs);
        let rank_t = linalg::rank(&trivial, 1e-8);
        let joined = hcat(&trivial, &a_mat);
        let rank_ta = linalg::rank(&joined, 1e-8);
        let total = kernel.ncols() - rank_t;
        let a_cycles = rank_ta - rank_t;

        // Complement of span(trivial, A) inside the kernel.
        let svd = joined.clone().svd(true, false);
        let u = svd.u.ok_or(Error::Singular)?;
        let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
        let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-8 * smax).collect();
        let mut q = CMat::zeros(np * d, keep.len());
        for (c, &i) in keep.iter().enumerate() {
            q.set_column(c, &u.column(i));
        }
        let projected = &kernel - &q * (q.adjoint() * &kernel);
        let remainder_vecs = leading_columns(&projected, total.saturating_sub(a_cycles));

        let to_elements = |v: &[C64]| -> Vec<CMat> { (0..np).map(|j| alg.from_coords(&v[j * d..(j + 1) * d])).collect() };
        let a_basis: Vec<Vec<CMat>> = a_vecs.iter().map(|v| to_elements(v)).collect();
        let remainder_basis: Vec<Vec<CMat>> = remainder_vecs.iter().map(|v| to_elements(v)).collect();
        let block_parameters = count_block_parameters(np, alg)?;
        Ok(CycleSpace {
            total,
            expected_total: (np - 2) * d,
            a_cycles,
            remainder: total.saturating_sub(a_cycles),
            block_parameters,
            singular_values,
            a_basis,
            remainder_basis,
        })
    }
}

/// Increment of a continuous `log(x - z)` along a segment that avoids `z`.
pub fn log_increment(seg: &Segment, z: C64) -> C64 {
    let dist = seg.distance_to(z).max(1e-300);
    let pieces = ((seg.length() / (0.5 * dist)).ceil() as usize).max(1);
    let mut acc = C64::new(0.0, 0.0);
    let mut prev = seg.start() - z;
    for k in 1..=pieces {
        let cur = seg.point(k as f64 / pieces as f64) - z;
        acc += (cur / prev).ln();
        prev = cur;
    }
    acc
}

fn columns(rows: usize, vecs: &[Vec<C64>]) -> CMat {
    let mut m = CMat::zeros(rows, vecs.len());
    for (c, v) in vecs.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            m[(r, c)] = *x;
        }
    }
    m
}

fn hcat(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    m.columns_mut(0, a.ncols()).copy_from(a);
    m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    m
}

/// Orthonormal basis of the column space (singular values above
/// `rel_tol` of the matrix scale).
/// The `count` leading left singular vectors of `m`.
fn leading_columns(m: &CMat, count: usize) -> Vec<Vec<C64>> {
    if count == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(true, false);
    let Some(u) = svd.u else { return Vec::new() };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    order.into_iter().take(count).map(|i| u.column(i).iter().cloned().collect()).collect()
}

#[derive(Debug, Clone)]
pub struct PunctureSplit {
    pub commuting: CMat,
    pub f: CMat,
    pub chain: Chain,
    /// Smallest `|1 - e^{2πi r}|` over the roots.
    pub smallest_gap: f64,
}

#[derive(Debug, Clone)]
pub struct CycleSpace {
    pub total: usize,
    /// `(N - 2) dim g`.
    pub expected_total: usize,
    pub a_cycles: usize,
    pub remainder: usize,
    /// `𝒩`, so that `remainder = 2𝒩` generically.
    pub block_parameters: usize,
    /// Singular values of the boundary map.
    pub singular_values: Vec<f64>,
    /// Per-puncture elements of each A-cycle.
    pub a_basis: Vec<Vec<CMat>>,
    pub remainder_basis: Vec<Vec<CMat>>,
}

impl CycleSpace {
    pub fn consistent(&self) -> bool {
        self.total == self.expected_total && self.remainder == 2 * self.block_parameters
    }
}

/// `𝒩 = ½((N - 2) dim g - N rank g)`.
pub fn count_block_parameters(np: usize, alg: &LieAlgebra) -> Result<usize> {
    if np < 3 {
        return Err(Error::InvalidArgument(alloc::format!("{np} punctures; at least 3 required")));
    }
    let twice = (np - 2) * alg.dim();
    let sub = np * alg.rank();
    if twice < sub || !(twice - sub).is_multiple_of(2) {
        return Err(Error::InvalidArgument(alloc::format!("non-integral block parameter count for {np} punctures")));
    }
    Ok((twice - sub) / 2)
}

/// Columns `(A_1, …, A_m, B_1, …, B_m)` of coefficient vectors with
/// `(A_α, B_β) = δ_αβ` and `(A_α, A_β) = (B_α, B_β) = 0` for the form `omega`.
pub fn symplectic_basis(omega: &CMat, tol: f64) -> Result<CMat> {
    let k = omega.nrows();
    if !k.is_multiple_of(2) {
        return Err(Error::InvalidArgument("odd-dimensional form".into()));
    }
    let form = |u: &CMat, v: &CMat| (u.transpose() * omega * v)[(0, 0)];
    let scale = omega.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut pool: Vec<CMat> = (0..k).map(|i| CMat::from_fn(k, 1, |r, _| C64::new(if r == i { 1.0 } else { 0.0 }, 0.0))).collect();
    let mut a_cols = Vec::new();
    let mut b_cols = Vec::new();
    while !pool.is_empty() {
        let v = pool.remove(0);
        let (best, val) = pool
            .iter()
            .enumerate()
            .map(|(i, w)| (i, form(&v, w)))
            .fold((usize::MAX, C64::new(0.0, 0.0)), |acc, x| if x.1.norm() > acc.1.norm() { x } else { acc });
        if best == usize::MAX || val.norm() <= tol * scale {
            return Err(Error::IllConditionedSplit(val.norm() / scale.max(1e-300)));
        }
        let w = pool.remove(best) / val;
        for u in pool.iter_mut() {
            let uw = form(u, &w);
            let uv = form(u, &v);
            *u = &*u - &v * uw + &w * uv;
        }
        a_cols.push(v);
        b_cols.push(w);
    }
    let mut out = CMat::zeros(k, k);
    for (i, c) in a_cols.iter().chain(b_cols.iter()).enumerate() {
        out.set_column(i, &c.column(0));
    }
    Ok(out)
}

/// `(1/2πi) ∫ W₁` over `[γ_j.Ψ_j⁻¹ E Ψ_j]` for each Cartan basis element, with
/// the expected values `⟨E, A_j⟩`.
pub fn a_cycle_periods<T: Transporter + ?Sized>(surface: &Surface<'_, T>, j: usize) -> Result<Vec<(C64, C64)>> {
    let f = &surface.frames[j];
    let sys = surface.system();
    let mut out = Vec::new();
    for h in &f.cartan.cartan_basis {
        let chain = Chain::single(Arc::loop_generator(surface.tr, j, f.from_local(h)));
        let v = surface.integrate_w1(&chain)? / (I * 2.0 * PI);
        out.push((v, sys.killing(h, &f.residue)));
    }
    Ok(out)
}

/// `e^{2πiA_j}` conjugated into the frame of the basepoint.
pub fn frame_monodromy(frame: &LocalFrame) -> CMat {
    &frame.psi_j_inv * exp_2pi_i(frame.eigen()) * &frame.psi_j
}
