//! Routes in the punctured plane: line and arc segments, standard loop generators
//! and words over them.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::linalg::{C64, I};
use crate::system::FuchsianSystem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// `x = a + t (b - a)`.
    Line { a: C64, b: C64 },
    /// `x = c + r e^{i(θ₀ + tΔ)}`; positive `sweep` is counterclockwise.
    Arc { center: C64, radius: f64, theta0: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { a, b } => a + (b - a) * t,
            Segment::Arc { center, radius, theta0, sweep } => center + C64::from_polar(radius, theta0 + t * sweep),
        }
    }

    /// `dx/dt`.
    pub fn velocity(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { a, b } => b - a,
            Segment::Arc { radius, theta0, sweep, .. } => I * C64::from_polar(radius * sweep, theta0 + t * sweep),
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { a, b } => Segment::Line { a: b, b: a },
            Segment::Arc { center, radius, theta0, sweep } => {
                Segment::Arc { center, radius, theta0: theta0 + sweep, sweep: -sweep }
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { a, b } => (b - a).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn translated(&self, v: C64) -> Segment {
        match *self {
            Segment::Line { a, b } => Segment::Line { a: a + v, b: b + v },
            Segment::Arc { center, radius, theta0, sweep } => Segment::Arc { center: center + v, radius, theta0, sweep },
        }
    }

    /// The piece between parameters `t0` and `t1`.
    pub fn sub(&self, t0: f64, t1: f64) -> Segment {
        match *self {
            Segment::Line { .. } => Segment::Line { a: self.point(t0), b: self.point(t1) },
            Segment::Arc { center, radius, theta0, sweep } => {
                Segment::Arc { center, radius, theta0: theta0 + t0 * sweep, sweep: (t1 - t0) * sweep }
            }
        }
    }

    /// Euclidean distance from `z` to the segment.
    pub fn distance_to(&self, z: C64) -> f64 {
        match *self {
            Segment::Line { a, b } => {
                let d = b - a;
                let l2 = d.norm_sqr();
                if l2 == 0.0 {
                    return (z - a).norm();
                }
                let t = (((z - a) * d.conj()).re / l2).clamp(0.0, 1.0);
                (z - (a + d * t)).norm()
            }
            Segment::Arc { center, radius, theta0, sweep } => {
                let w = z - center;
                let ends = (z - self.start()).norm().min((z - self.end()).norm());
                if w.norm() == 0.0 {
                    return radius;
                }
                // Angle of w measured from the arc start in the sweep direction.
                let mut rel = (w.arg() - theta0) * sweep.signum();
                rel = crate::geometry::wrap_turn(rel);
                if rel <= sweep.abs() || sweep.abs() >= 2.0 * PI {
                    (w.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
        }
    }
}

/// A route: a start point followed by contiguous segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub start: C64,
    pub segments: Vec<Segment>,
}

impl Path {
    pub fn new(start: C64) -> Self {
        Self { start, segments: Vec::new() }
    }

    pub fn polyline(vertices: &[C64]) -> Self {
        let mut p = Self::new(vertices[0]);
        for v in &vertices[1..] {
            p = p.line_to(*v);
        }
        p
    }

    pub fn end(&self) -> C64 {
        self.segments.last().map_or(self.start, |s| s.end())
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn line_to(mut self, b: C64) -> Self {
        let a = self.end();
        if a != b {
            self.segments.push(Segment::Line { a, b });
        }
        self
    }

    /// Arc about `center` starting from the current end point.
    pub fn arc(mut self, center: C64, sweep: f64) -> Self {
        let w = self.end() - center;
        self.segments.push(Segment::Arc { center, radius: w.norm(), theta0: w.arg(), sweep });
        self
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn then(mut self, other: &Path) -> Self {
        debug_assert!((self.end() - other.start).norm() <= 1e-9 * (1.0 + other.start.norm()));
        self.segments.extend_from_slice(&other.segments);
        self
    }

    pub fn reversed(&self) -> Self {
        Self { start: self.end(), segments: self.segments.iter().rev().map(Segment::reversed).collect() }
    }

    pub fn translated(&self, v: C64) -> Self {
        Self { start: self.start + v, segments: self.segments.iter().map(|s| s.translated(v)).collect() }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Every segment keeps at least the system clearance from every puncture.
    pub fn check_clearance(&self, sys: &FuchsianSystem) -> Result<()> {
        if self.segments.is_empty() {
            let (j, d) = sys.nearest_puncture(self.start);
            if d < sys.clearance {
                return Err(Error::ClearanceViolation { segment: 0, puncture: j, distance: d });
            }
        }
        for (k, s) in self.segments.iter().enumerate() {
            for (j, z) in sys.punctures.iter().enumerate() {
                let d = s.distance_to(*z);
                if d < sys.clearance {
                    return Err(Error::ClearanceViolation { segment: k, puncture: j, distance: d });
                }
            }
        }
        Ok(())
    }
}

/// A word in the standard generators. Letters are `(puncture index, ±1)`.
///
/// The word `g1 g2` denotes the matrix product `S₁ S₂`; as a route the
/// rightmost letter is traversed first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LoopWord {
    pub letters: Vec<(usize, i32)>,
}

impl LoopWord {
    pub fn new(letters: Vec<(usize, i32)>) -> Self {
        Self { letters }
    }

    pub fn generator(j: usize) -> Self {
        Self { letters: alloc::vec![(j, 1)] }
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|&(j, e)| (j, -e)).collect() }
    }

    /// `self · other` as a matrix product.
    pub fn concat(&self, other: &LoopWord) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { letters }
    }

    /// Parses `"g1 g2^-1 g3"` (1-based generator indices).
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let body = tok
                .strip_prefix('g')
                .ok_or_else(|| Error::Parse(format!("expected g<k>, found {tok:?}")))?;
            let (idx, exp) = match body.split_once('^') {
                Some((i, e)) => (i, e.trim_matches(|c| c == '{' || c == '}')),
                None => (body, "1"),
            };
            let j: usize = idx.parse().map_err(|_| Error::Parse(format!("bad generator index in {tok:?}")))?;
            let e: i32 = exp.parse().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?;
            if j == 0 || (e != 1 && e != -1) {
                return Err(Error::Parse(format!("unsupported letter {tok:?}")));
            }
            letters.push((j - 1, e));
        }
        Ok(Self { letters })
    }
}

impl fmt::Display for LoopWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &(j, e) in &self.letters {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "g{}", j + 1)?;
            } else {
                write!(f, "g{}^{}", j + 1, e)?;
            }
        }
        Ok(())
    }
}

/// Basepoint, spokes and circle radii for the standard generators.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopLayout {
    pub basepoint: C64,
    pub radii: Vec<f64>,
    /// Points where each spoke meets its circle.
    pub spoke_ends: Vec<C64>,
    order: Vec<usize>,
}

fn spoke_margin(x0: C64, punctures: &[C64]) -> f64 {
    let mut worst = f64::INFINITY;
    for (j, zj) in punctures.iter().enumerate() {
        let seg = Segment::Line { a: x0, b: *zj };
        for (k, zk) in punctures.iter().enumerate() {
            if k != j {
                worst = worst.min(seg.distance_to(*zk));
            }
        }
        worst = worst.min((x0 - zj).norm());
    }
    worst
}

impl LoopLayout {
    /// Deterministic layout: the basepoint maximizes the smallest distance
    /// between any spoke and the other punctures, over a fixed candidate set
    /// around the centroid (or is taken from the system when given).
    pub fn new(sys: &FuchsianSystem) -> Result<Self> {
        let z = &sys.punctures;
        let np = z.len() as f64;
        let centroid = z.iter().fold(C64::new(0.0, 0.0), |a, b| a + b) / np;
        let spread = z.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max).max(sys.min_separation());
        let basepoint = match sys.basepoint {
            Some(b) => b,
            None => {
                let mut best = (centroid, spoke_margin(centroid, z));
                for ring in [0.35, 0.7, 1.2, 1.8] {
                    for k in 0..72 {
                        let phi = -PI / 2.0 + 2.0 * PI * k as f64 / 72.0;
                        let cand = centroid + C64::from_polar(ring * spread, phi);
                        let m = spoke_margin(cand, z);
                        if m > best.1 * (1.0 + 1e-9) {
                            best = (cand, m);
                        }
                    }
                }
                best.0
            }
        };
        let margin = spoke_margin(basepoint, z);
        let rho = 10.0 * sys.clearance;
        if margin < 2.0 * rho {
            return Err(Error::InvalidSystem(format!(
                "no spoke layout keeps clearance (margin {margin:e})"
            )));
        }
        let radii = alloc::vec![rho; z.len()];
        let spoke_ends = z
            .iter()
            .map(|zj| {
                let d = basepoint - zj;
                zj + d / d.norm() * rho
            })
            .collect();
        // Generators traversed in increasing spoke angle compose to the big
        // counterclockwise loop; as a product that is the reversed sequence.
        let mut order: Vec<usize> = (0..z.len()).collect();
        let angle = |j: usize| (z[j] - basepoint).arg();
        order.sort_by(|&a, &b| angle(a).partial_cmp(&angle(b)).unwrap_or(core::cmp::Ordering::Equal));
        order.reverse();
        Ok(Self { basepoint, radii, spoke_ends, order })
    }

    pub fn num_generators(&self) -> usize {
        self.radii.len()
    }

    /// Indices `o` with `S_{o[0]} S_{o[1]} ⋯ = Id`.
    pub fn relation_order(&self) -> &[usize] {
        &self.order
    }

    pub fn relation_word(&self) -> LoopWord {
        LoopWord::new(self.order.iter().map(|&j| (j, 1)).collect())
    }

    pub fn spoke(&self, j: usize) -> Path {
        Path::new(self.basepoint).line_to(self.spoke_ends[j])
    }

    /// Full circle around `z_j` from the spoke end, counterclockwise when `ccw`.
    pub fn circle(&self, sys: &FuchsianSystem, j: usize, ccw: bool) -> Path {
        let sweep = if ccw { 2.0 * PI } else { -2.0 * PI };
        Path::new(self.spoke_ends[j]).arc(sys.punctures[j], sweep)
    }

    /// `γ_j`: out along the spoke, once around `z_j` counterclockwise, back.
    pub fn generator(&self, sys: &FuchsianSystem, j: usize) -> Path {
        let spoke = self.spoke(j);
        spoke.clone().then(&self.circle(sys, j, true)).then(&spoke.reversed())
    }

    pub fn word_path(&self, sys: &FuchsianSystem, word: &LoopWord) -> Path {
        let mut p = Path::new(self.basepoint);
        for &(j, e) in word.letters.iter().rev() {
            let g = self.generator(sys, j);
            p = if e > 0 { p.then(&g) } else { p.then(&g.reversed()) };
        }
        p
    }
}
