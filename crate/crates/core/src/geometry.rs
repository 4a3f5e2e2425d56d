//! Transversal crossings between line and arc segments.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::C64;
use crate::path::Segment;

/// A crossing at parameters `(t, s)` on the two segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub t: f64,
    pub s: f64,
    pub point: C64,
    /// `+1` when the tangents `(γ', γ'')` form a positively oriented basis.
    pub sign: i32,
}

/// Crossing set of two segments, or `None` when the configuration is not
/// transversal (parallel overlap, tangency, or a crossing within `edge_tol` of
/// a segment end where it cannot be attributed unambiguously).
pub fn crossings(s1: &Segment, s2: &Segment, edge_tol: f64) -> Option<Vec<Crossing>> {
    let raw = match (s1, s2) {
        (Segment::Line { a, b }, Segment::Line { a: c, b: d }) => line_line(*a, *b, *c, *d)?,
        (Segment::Line { a, b }, arc @ Segment::Arc { .. }) => line_arc(*a, *b, arc)?,
        (arc @ Segment::Arc { .. }, Segment::Line { a, b }) => {
            line_arc(*a, *b, arc)?.into_iter().map(|(s, t)| (t, s)).collect()
        }
        (a1 @ Segment::Arc { .. }, a2 @ Segment::Arc { .. }) => arc_arc(a1, a2)?,
    };
    let mut out = Vec::new();
    for (t, s) in raw {
        let outside = |u: f64| u < -edge_tol || u > 1.0 + edge_tol;
        if outside(t) || outside(s) {
            continue;
        }
        let near_edge = |u: f64| u.abs() <= edge_tol || (u - 1.0).abs() <= edge_tol;
        if near_edge(t) || near_edge(s) {
            return None;
        }
        let v1 = s1.velocity(t);
        let v2 = s2.velocity(s);
        let cross = (v1.conj() * v2).im;
        if cross.abs() <= 1e-9 * v1.norm() * v2.norm() {
            return None;
        }
        out.push(Crossing { t, s, point: s1.point(t), sign: if cross > 0.0 { 1 } else { -1 } });
    }
    Some(out)
}

fn cross(u: C64, v: C64) -> f64 {
    (u.conj() * v).im
}

fn line_line(a: C64, b: C64, c: C64, d: C64) -> Option<Vec<(f64, f64)>> {
    let u = b - a;
    let v = d - c;
    let den = cross(u, v);
    if den.abs() <= 1e-9 * u.norm() * v.norm() {
        // Parallel: degenerate only if collinear and overlapping.
        let off = cross(u, c - a).abs() / u.norm();
        if off > 1e-9 * (u.norm() + v.norm()) {
            return Some(Vec::new());
        }
        let l2 = u.norm_sqr();
        let p = ((c - a) * u.conj()).re / l2;
        let q = ((d - a) * u.conj()).re / l2;
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        return if hi < 0.0 || lo > 1.0 { Some(Vec::new()) } else { None };
    }
    let w = c - a;
    let t = cross(w, v) / den;
    let s = cross(w, u) / den;
    Some(alloc::vec![(t, s)])
}

/// `a` reduced to `[0, 2π)`.
pub(crate) fn wrap_turn(a: f64) -> f64 {
    let r = a % (2.0 * PI);
    if r < 0.0 {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Parameter on an arc of the point at angle `alpha`, if within the sweep.
fn arc_param(theta0: f64, sweep: f64, alpha: f64) -> f64 {
    let d = wrap_turn((alpha - theta0) * sweep.signum());
    let s = d / sweep.abs();
    // Points just before the start of a full turn map to the end.
    if sweep.abs() >= 2.0 * PI - 1e-12 && d > 2.0 * PI - 1e-12 {
        return 1.0;
    }
    s
}

fn line_arc(a: C64, b: C64, arc: &Segment) -> Option<Vec<(f64, f64)>> {
    let Segment::Arc { center, radius, theta0, sweep } = *arc else { unreachable!() };
    let u = b - a;
    let w = a - center;
    // |w + t u|² = r²
    let qa = u.norm_sqr();
    let qb = 2.0 * (w * u.conj()).re;
    let qc = w.norm_sqr() - radius * radius;
    let disc = qb * qb - 4.0 * qa * qc;
    let scale = qb * qb + (4.0 * qa * qc).abs();
    if disc.abs() <= 1e-12 * scale {
        // Tangent line: degenerate if the touching point lies on both pieces.
        let t = -qb / (2.0 * qa);
        if (0.0..=1.0).contains(&t) {
            let p = a + u * t;
            if arc_param(theta0, sweep, (p - center).arg()) <= 1.0 {
                return None;
            }
        }
        return Some(Vec::new());
    }
    if disc < 0.0 {
        return Some(Vec::new());
    }
    let sq = disc.sqrt();
    let mut out = Vec::new();
    for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
        let p = a + u * t;
        let s = arc_param(theta0, sweep, (p - center).arg());
        out.push((t, s));
    }
    Some(out)
}

fn arc_arc(s1: &Segment, s2: &Segment) -> Option<Vec<(f64, f64)>> {
    let Segment::Arc { center: c1, radius: r1, theta0: t1, sweep: w1 } = *s1 else { unreachable!() };
    let Segment::Arc { center: c2, radius: r2, theta0: t2, sweep: w2 } = *s2 else { unreachable!() };
    let d = c2 - c1;
    let dist = d.norm();
    let tol = 1e-12 * (r1 + r2);
    if dist <= tol {
        if (r1 - r2).abs() <= tol {
            return None;
        }
        return Some(Vec::new());
    }
    if dist > r1 + r2 + tol || dist < (r1 - r2).abs() - tol {
        return Some(Vec::new());
    }
    if (dist - (r1 + r2)).abs() <= tol || (dist - (r1 - r2).abs()).abs() <= tol {
        return None;
    }
    // Foot of the common chord, measured from c1 along d.
    let x = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
    let h = (r1 * r1 - x * x).max(0.0).sqrt();
    let e = d / dist;
    let mut out = Vec::new();
    for sgn in [1.0, -1.0] {
        let p = c1 + e * x + e * crate::linalg::I * (sgn * h);
        out.push((arc_param(t1, w1, (p - c1).arg()), arc_param(t2, w2, (p - c2).arg())));
    }
    Some(out)
}
