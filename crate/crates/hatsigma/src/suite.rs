//! Invariant suite run by `hatsigma check`.
//!
//! Every check is independent and seeded; they run in parallel against one
//! shared cached transporter. A check that errors is reported as a failure
//! with the error text, never skipped silently.

use std::f64::consts::PI;
use std::time::Instant;

use hatsigma_core::amplitude::{
    casimir_amplitude, direct_rational_w2c2, disconnected_from_partitions, normal_ordering_correction_w2c2,
    w_connected, w_disconnected, Variant,
};
use hatsigma_core::asymptotics::{puncture_asymptotics_check, short_distance_check};
use hatsigma_core::cycles::{a_cycle_periods, Arc, Chain, Surface};
use hatsigma_core::fit::{fit_rational, Pole};
use hatsigma_core::lie::CasimirTensor;
use hatsigma_core::linalg::{eigen, identity, inverse, norm, zeros, CMat, C64};
use hatsigma_core::local::{reconstruction_defect, LocalFrame};
use hatsigma_core::path::{Path, Segment};
use hatsigma_core::transport::{evaluate, BundlePoint, Evaluated, Transporter};
use hatsigma_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::Cached;
use crate::sample::{probe_point, rng, traceless, Rand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub tol: f64,
    pub seed: u64,
    /// Random points per amplitude check.
    pub probes: usize,
    pub fit_threshold: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { tol: 1e-11, seed: 7, probes: 6, fit_threshold: 1e-6 }
    }
}

/// Outcome of one check body: measured value, threshold, detail. `None`
/// measured means the check does not apply to this system.
type Outcome = (Option<f64>, f64, String);
type Body = fn(&Cached, &SuiteConfig, &mut Rand) -> hatsigma_core::Result<Outcome>;

const CHECKS: &[(&str, Body)] = &[
    ("closed_form", closed_form),
    ("monodromy_relation", monodromy_relation),
    ("basepoint_shift", basepoint_shift),
    ("homotopy_invariance", homotopy_invariance),
    ("local_frames", local_frames),
    ("rationality_c2", rationality_c2),
    ("normal_ordering_c2", normal_ordering_c2),
    ("partition_identity", partition_identity),
    ("short_distance", short_distance),
    ("puncture_asymptotics", puncture_asymptotics),
    ("cycle_counts", cycle_counts),
    ("intersection_identity", intersection_identity),
    ("a_cycle_periods", a_cycle_period_check),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

pub fn run(tr: &Cached, cfg: &SuiteConfig) -> Vec<CheckRow> {
    CHECKS
        .par_iter()
        .enumerate()
        .map(|(k, &(name, body))| {
            let mut r = rng(cfg.seed.wrapping_add(k as u64 * 0x9e37_79b9));
            let start = Instant::now();
            let out = body(tr, cfg, &mut r);
            let seconds = start.elapsed().as_secs_f64();
            match out {
                Ok((Some(measured), threshold, detail)) => CheckRow {
                    name,
                    status: if measured <= threshold { Status::Pass } else { Status::Fail },
                    measured,
                    threshold,
                    detail,
                    seconds,
                },
                Ok((None, threshold, detail)) => {
                    CheckRow { name, status: Status::Skip, measured: 0.0, threshold, detail, seconds }
                }
                Err(e) => CheckRow {
                    name,
                    status: Status::Fail,
                    measured: f64::INFINITY,
                    threshold: 0.0,
                    detail: format!("{}: {e}", e.kind()),
                    seconds,
                },
            }
        })
        .collect()
}

pub fn all_passed(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.status != Status::Fail)
}

fn rel(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

fn rel_mat(a: &CMat, b: &CMat) -> f64 {
    norm(&(a - b)) / norm(a).max(norm(b)).max(1e-300)
}

fn point(tr: &Cached, r: &mut Rand, e: CMat) -> hatsigma_core::Result<Evaluated> {
    let l = tr.layout();
    let x = probe_point(tr.system(), l.basepoint, 0.1, r);
    evaluate(tr, &BundlePoint::straight(l, x, e))
}

fn is_diagonal(m: &CMat) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|k| i == k || m[(i, k)] == C64::new(0.0, 0.0)))
}

/// Diagonal residues: `Ψ(x) = Π ((x - z_j)/(x₀ - z_j))^{A_j}`, monodromy
/// spectra `e^{2πiλ}` and `W₁ = ⟨A(x), E⟩` for diagonal `E`.
fn closed_form(tr: &Cached, cfg: &SuiteConfig, r: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    let thr = 1e-8;
    if !sys.residues.iter().all(is_diagonal) {
        return Ok((None, thr, "residues are not all diagonal".into()));
    }
    let n = sys.n();
    let x0 = tr.layout().basepoint;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.probes {
        let x = probe_point(sys, x0, 0.1, r);
        let psi = tr.psi(&Path::new(x0).line_to(x))?;
        let mut oracle = identity(n);
        for (z, a) in sys.punctures.iter().zip(&sys.residues) {
            let l = ((x - z) / (x0 - z)).ln();
            for k in 0..n {
                oracle[(k, k)] *= (a[(k, k)] * l).exp();
            }
        }
        worst = worst.max(rel_mat(&psi, &oracle));
        let e = CMat::from_diagonal(&traceless(n, r).diagonal());
        let p = Evaluated::new(x, psi, e.clone())?;
        let w1 = w_connected(sys, &[p])?;
        worst = worst.max(rel(w1, sys.killing(&sys.connection_at(x)?, &e)));
    }
    for (j, a) in sys.residues.iter().enumerate() {
        let mut got: Vec<C64> = eigen(&tr.generator(j)?)?.values.to_vec();
        for k in 0..n {
            let want = (a[(k, k)] * C64::new(0.0, 2.0 * std::f64::consts::PI)).exp();
            let (idx, d) = got
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - want).norm() / want.norm()))
                .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
            worst = worst.max(d);
            got.remove(idx);
        }
    }
    Ok((Some(worst), thr, "transport, monodromy spectrum, W1 against closed forms".into()))
}

fn monodromy_relation(tr: &Cached, _: &SuiteConfig, _: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let word = tr.layout().relation_word();
    let d = norm(&(tr.monodromy(&word)? - identity(tr.system().n())));
    Ok((Some(d), 1e-8, format!("|S_o0 S_o1 ... - Id|, order {:?}", tr.layout().relation_order())))
}

/// `S'_j = T⁻¹ S_j T` for the basepoint moved to `x₁`, with `T` the transport
/// from `x₁` to `x₀`.
fn basepoint_shift(tr: &Cached, _: &SuiteConfig, _: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    let l = tr.layout();
    let x0 = l.basepoint;
    let sep = sys.min_separation();
    let shift = (0..12)
        .map(|k| C64::from_polar(0.25 * sep, 0.7 + k as f64 * PI / 6.0))
        .find(|&v| {
            let seg = Segment::Line { a: x0, b: x0 + v };
            sys.punctures.iter().all(|&z| seg.distance_to(z) > 0.1 * sep)
        })
        .ok_or_else(|| Error::InvalidArgument("no clear direction to move the basepoint".into()))?;
    let x1 = x0 + shift;
    let t = tr.transport(&Path::new(x1).line_to(x0))?;
    let t_inv = inverse(&t)?;
    let mut worst: f64 = 0.0;
    for j in 0..sys.num_punctures() {
        let loop_path = Path::new(x1).line_to(x0).then(&l.generator(sys, j)).line_to(x1);
        let moved = tr.transport(&loop_path)?;
        worst = worst.max(rel_mat(&moved, &(&t_inv * tr.generator(j)? * &t)));
    }
    Ok((Some(worst), 1e-8, format!("basepoint moved by {:.3e}", shift.norm())))
}

/// Transport to a probe point along the straight route versus a bent polyline
/// in the same homotopy class.
fn homotopy_invariance(tr: &Cached, cfg: &SuiteConfig, r: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    let x0 = tr.layout().basepoint;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.probes {
        let x = probe_point(sys, x0, 0.15, r);
        let straight = tr.transport(&Path::new(x0).line_to(x))?;
        let mid = (x0 + x) / 2.0 + (x - x0) * C64::new(0.0, 0.05);
        let bent = Path::new(x0).line_to(mid).line_to(x);
        if bent.check_clearance(sys).is_err() {
            continue;
        }
        worst = worst.max(rel_mat(&straight, &tr.transport(&bent)?));
    }
    Ok((Some(worst), 10.0 * tr.tol(), "straight vs bent polyline".into()))
}

fn local_frames(tr: &Cached, _: &SuiteConfig, _: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let mut worst: f64 = 0.0;
    for j in 0..tr.system().num_punctures() {
        worst = worst.max(reconstruction_defect(tr, &LocalFrame::new(tr, j)?)?);
    }
    Ok((Some(worst), 1e-6, "|Psi_j^-1 e^{2 pi i A_j} Psi_j - S_j|".into()))
}

fn rationality_c2(tr: &Cached, cfg: &SuiteConfig, r: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    let c2 = CasimirTensor::new(&sys.algebra, 2)?;
    let poles: Vec<Pole> = sys.punctures.iter().map(|&at| Pole { at, order: 2 }).collect();
    let count = 3 * (1 + 2 * poles.len()).max(cfg.probes);
    let mut xs = Vec::with_capacity(count);
    let mut vs = Vec::with_capacity(count);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let at = point(tr, r, zeros(sys.n()))?;
        let v = casimir_amplitude(sys, &c2, &at, &[], Variant::Plain)?;
        worst = worst.max(rel(v, direct_rational_w2c2(sys, at.x)?));
        xs.push(at.x);
        vs.push(v);
    }
    let fit = fit_rational(&xs, &vs, &poles)?;
    let measured = (worst / 1e-7).max(fit.residual / cfg.fit_threshold);
    Ok((
        Some(measured),
        1.0,
        format!("direct rational defect {worst:.2e} (<= 1e-7), fit residual {:.2e}", fit.residual),
    ))
}

fn normal_ordering_c2(tr: &Cached, cfg: &SuiteConfig, r: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    let c2 = CasimirTensor::new(&sys.algebra, 2)?;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.probes {
        let at = point(tr, r, zeros(sys.n()))?;
        let plain = casimir_amplitude(sys, &c2, &at, &[], Variant::Plain)?;
        let ordered = casimir_amplitude(sys, &c2, &at, &[], Variant::NormalOrdered)?;
        worst = worst.max(rel(ordered - plain, normal_ordering_correction_w2c2(sys, at.x)?));
    }
    Ok((Some(worst), 1e-8, "normal-ordered minus plain vs extra trace term".into()))
}

fn partition_identity(tr: &Cached, _: &SuiteConfig, r: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            let e = traceless(sys.n(), r);
            pts.push(point(tr, r, e)?);
        }
        worst = worst.max(rel(w_disconnected(sys, &pts)?, disconnected_from_partitions(sys, &pts)?));
    }
    Ok((Some(worst), 1e-10, "full permutation sum vs partitions of connected, n = 2..4".into()))
}

fn short_distance(tr: &Cached, _: &SuiteConfig, r: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    let l = tr.layout();
    let n = sys.n();
    let x2 = BundlePoint::straight(l, probe_point(sys, l.basepoint, 0.15, r), traceless(n, r));
    let extra = BundlePoint::straight(l, probe_point(sys, l.basepoint, 0.15, r), traceless(n, r));
    let e1 = traceless(n, r);
    let mut worst: f64 = 0.0;
    for extras in [vec![], vec![extra]] {
        let rep = short_distance_check(tr, &x2, &e1, C64::from_polar(1.0, 0.4), &extras, None)?;
        worst = worst.max(rep.ratio);
    }
    Ok((Some(worst), 3.0, "max/min remainder over eps, eps/2, eps/4".into()))
}

fn puncture_asymptotics(tr: &Cached, _: &SuiteConfig, r: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    // One extra point: W₁ of a root component vanishes when A(x) stays in a
    // Cartan subalgebra, as for diagonal residues.
    let e = traceless(sys.n(), r);
    let extra = point(tr, r, e)?;
    let mut pole: f64 = 0.0;
    let mut expo: f64 = 0.0;
    for j in 0..sys.num_punctures() {
        let frame = LocalFrame::new(tr, j)?;
        let rep = puncture_asymptotics_check(tr, &frame, &traceless(sys.n(), r), std::slice::from_ref(&extra))?;
        pole = pole.max(rep.pole_rel_error);
        expo = rep.exponents.iter().map(|f| f.rel_error).fold(expo, f64::max);
    }
    let measured = (pole / 1e-4).max(expo / 1e-3);
    Ok((Some(measured), 1.0, format!("pole coefficient {pole:.2e} (<= 1e-4), exponents {expo:.2e} (<= 1e-3)")))
}

fn cycle_counts(tr: &Cached, _: &SuiteConfig, _: &mut Rand) -> hatsigma_core::Result<Outcome> {
    if tr.system().num_punctures() < 3 {
        return Ok((None, 0.0, "cycle space needs at least 3 punctures".into()));
    }
    let cs = Surface::new(tr)?.cycle_space()?;
    let ok = cs.consistent();
    Ok((
        Some(if ok { 0.0 } else { 1.0 }),
        0.0,
        format!(
            "total {} (expected {}), A-cycles {}, remainder {} = 2 x {}",
            cs.total, cs.expected_total, cs.a_cycles, cs.remainder, cs.block_parameters
        ),
    ))
}

fn intersection_identity(tr: &Cached, _: &SuiteConfig, r: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let sys = tr.system();
    let s = Surface::new(tr)?;
    let mut worst: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for j in 0..sys.num_punctures() {
        let f = traceless(sys.n(), r);
        let gamma = Chain::single(Arc::loop_generator(tr, j, f.clone()));
        let sj = tr.generator(j)?;
        let sfs = &sj * &f * inverse(&sj)?;
        for probe in s.probes(j, 3) {
            let p = Chain::single(probe.clone());
            let lhs = s.intersection(&gamma, &p)?;
            let rhs = sys.killing(&f, &probe.e) - sys.killing(&sfs, &probe.e);
            worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
            anti = anti.max((lhs + s.intersection(&p, &gamma)?).norm());
        }
    }
    Ok((Some(worst.max(anti)), 1e-7, format!("identity defect {worst:.2e}, antisymmetry defect {anti:.1e}")))
}

fn a_cycle_period_check(tr: &Cached, _: &SuiteConfig, _: &mut Rand) -> hatsigma_core::Result<Outcome> {
    let s = Surface::new(tr)?;
    let mut worst: f64 = 0.0;
    for j in 0..tr.system().num_punctures() {
        for (v, want) in a_cycle_periods(&s, j)? {
            worst = worst.max((v - want).norm() / (1.0 + want.norm()));
        }
    }
    Ok((Some(worst), 1e-6, "(1/2 pi i) W1 over Cartan loops vs <E_j, A_j>".into()))
}

/// Formats rows as an aligned text table.
pub fn render(rows: &[CheckRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in rows {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        out.push_str(&format!(
            "{tag}  {:<width$}  {:>10.3e} / {:<9.1e} {:>7.2}s  {}\n",
            r.name, r.measured, r.threshold, r.seconds, r.detail
        ));
    }
    out
}
