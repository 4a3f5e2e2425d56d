//! Command-line runner.
//!
//! [`run`] executes one subcommand, writes its artifacts into the output
//! directory and returns a JSON summary plus a human-readable report. The
//! binary maps [`RunOutcome::passed`] to the exit status and any [`Error`] to
//! an error JSON on stdout with a nonzero exit.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hatsigma_core::amplitude::{
    casimir_amplitude, disconnected_from_partitions, w_connected, w_disconnected, Variant,
};
use hatsigma_core::asymptotics::extract_charges;
use hatsigma_core::cycles::{a_cycle_periods, Surface};
use hatsigma_core::fit::{fit_rational, Pole};
use hatsigma_core::lie::CasimirTensor;
use hatsigma_core::linalg::{eigen, identity, norm, singular_values, zeros, C64};
use hatsigma_core::local::{reconstruction_defect, LocalFrame};
use hatsigma_core::malgrange::{curvature_check, malgrange_cycle, Family, Splitting, BOUNDARY_TOL, DEFAULT_STEP};
use hatsigma_core::path::{LoopWord, Segment};
use hatsigma_core::transport::{evaluate, BundlePoint, Evaluated, Transporter};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cache::Cached;
use crate::error::{Error, Result};
use crate::format::{load_family, load_system, read_json, PointsFile, SystemFile};
use crate::report::{matrix_table, pair, OutDir, Table};
use crate::suite::{self, SuiteConfig};

#[derive(Debug, Clone, Parser)]
#[command(name = "hatsigma", version, about = "Amplitudes, monodromy and cycles of sl_N Fuchsian systems")]
pub struct Cli {
    /// System definition file (JSON).
    #[arg(long, global = true, env = "HATSIGMA_SYSTEM")]
    pub system: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts; nothing is written when absent.
    #[arg(long, global = true, env = "HATSIGMA_OUT")]
    pub out: Option<PathBuf>,
    /// Transport tolerance per unit arclength.
    #[arg(long, global = true, env = "HATSIGMA_TOL", default_value_t = 1e-10)]
    pub tol: f64,
    /// Seed for randomized probes.
    #[arg(long, global = true, env = "HATSIGMA_SEED", default_value_t = 7)]
    pub seed: u64,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true, env = "HATSIGMA_JOBS")]
    pub jobs: Option<usize>,
    /// Largest accepted extrapolation residual for charges.
    #[arg(long, global = true, env = "HATSIGMA_EXTRAPOLATION_TOL", default_value_t = 1e-5)]
    pub extrapolation_tol: f64,
    /// Largest accepted relative residual of rational fits.
    #[arg(long, global = true, env = "HATSIGMA_FIT_THRESHOLD", default_value_t = 1e-6)]
    pub fit_threshold: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Plain,
    Normal,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Normal => Variant::NormalOrdered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplittingArg {
    Analytic,
    Canonical,
}

impl From<SplittingArg> for Splitting {
    fn from(v: SplittingArg) -> Self {
        match v {
            SplittingArg::Analytic => Splitting::Analytic,
            SplittingArg::Canonical => Splitting::Canonical,
        }
    }
}

/// Which curvature identity decides the exit status of `malgrange`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    /// `dω(δ₁,δ₂) = (B_{δ₁}, B_{δ₂})`.
    Literal,
    /// `dω = -(B_{δ₁},B_{δ₂})/2πi + Σ_j ⟨Ψ_j⁻¹A_jΨ_j, [F₁,F₂]⟩`.
    Completed,
    /// `dω = 0`.
    Closed,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Re-run every invariant of the system file.
    Validate,
    /// Generator monodromies, relation defect and local-frame consistency.
    Monodromy {
        /// Extra loop words, e.g. "g1 g2^-1".
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// W_n and Ŵ_n at the point sets of a points file.
    Amplitude {
        #[arg(long)]
        points: PathBuf,
    },
    /// Casimir amplitude on a grid with a rational fit.
    CasimirScan {
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        variant: VariantArg,
        /// Grid points per side.
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Charges at every puncture, both regularizations.
    Charges,
    /// Dimensions of the cycle space and the intersection matrix.
    Cycles,
    /// Periods of W₁ on the cycle basis and A-cycle checks.
    Periods,
    /// Malgrange cycles and the curvature identity on a family file.
    Malgrange {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_enum, default_value_t = SplittingArg::Analytic)]
        splitting: SplittingArg,
        #[arg(long, value_enum, default_value_t = IdentityArg::Literal)]
        identity: IdentityArg,
        /// Relative tolerance of the curvature identity.
        #[arg(long, default_value_t = 1e-2)]
        identity_tol: f64,
    },
    /// Full invariant suite with a pass/fail table.
    Check {
        /// Random points per amplitude check.
        #[arg(long, default_value_t = 6)]
        probes: usize,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub extrapolation_tol: f64,
    pub fit_threshold: f64,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub command: Command,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self {
            system: c.system,
            out: c.out,
            tol: c.tol,
            extrapolation_tol: c.extrapolation_tol,
            fit_threshold: c.fit_threshold,
            seed: c.seed,
            jobs: c.jobs,
            command: c.command,
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol", self.tol),
            ("extrapolation-tol", self.extrapolation_tol),
            ("fit-threshold", self.fit_threshold),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Format(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::Format("--jobs must be at least 1".into()));
        }
        Ok(())
    }

    fn system_path(&self) -> Result<&PathBuf> {
        self.system.as_ref().ok_or_else(|| Error::Format("--system is required for this subcommand".into()))
    }

    fn transporter(&self) -> Result<Cached> {
        Ok(Cached::new(load_system(self.system_path()?)?, self.tol)?)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub passed: bool,
    pub summary: Value,
    pub text: String,
    pub artifacts: Vec<PathBuf>,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Error::Format(e.to_string()))?;
    pool.install(|| dispatch(cfg))
}

/// Machine-readable form of an error.
pub fn error_json(e: &Error) -> Value {
    let mut v = json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::Validation(report) = e {
        v["checks"] = report_json(report);
    }
    v
}

fn report_json(report: &hatsigma_core::system::ValidationReport) -> Value {
    report
        .lines
        .iter()
        .map(|l| json!({ "name": l.name, "passed": l.passed, "defect": l.defect, "detail": l.detail }))
        .collect()
}

fn dispatch(cfg: &RunConfig) -> Result<RunOutcome> {
    let mut out = OutDir::new(cfg.out.clone());
    let start = Instant::now();
    let (passed, mut summary, text) = match &cfg.command {
        Command::Validate => validate(cfg)?,
        Command::Monodromy { words } => monodromy(cfg, &mut out, words)?,
        Command::Amplitude { points } => amplitude(cfg, &mut out, points)?,
        Command::CasimirScan { degree, variant, grid } => casimir_scan(cfg, &mut out, *degree, *variant, *grid)?,
        Command::Charges => charges(cfg, &mut out)?,
        Command::Cycles => cycles(cfg, &mut out)?,
        Command::Periods => periods(cfg, &mut out)?,
        Command::Malgrange { family, splitting, identity, identity_tol } => {
            malgrange(cfg, &mut out, family, *splitting, *identity, *identity_tol)?
        }
        Command::Check { probes } => check(cfg, &mut out, *probes)?,
    };
    summary["passed"] = json!(passed);
    summary["seconds"] = json!(start.elapsed().as_secs_f64());
    out.json("summary.json", &summary)?;
    Ok(RunOutcome { passed, summary, text, artifacts: out.written().to_vec() })
}

type Step = (bool, Value, String);

fn validate(cfg: &RunConfig) -> Result<Step> {
    let file: SystemFile = read_json(cfg.system_path()?)?;
    let report = file.spec()?.validate();
    let mut text = String::new();
    for l in &report.lines {
        let tag = if l.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{tag}  {:<16} {:>10.3e}  {}\n", l.name, l.defect, l.detail));
    }
    Ok((report.passed(), json!({ "command": "validate", "checks": report_json(&report) }), text))
}

fn monodromy(cfg: &RunConfig, out: &mut OutDir, words: &[String]) -> Result<Step> {
    let tr = cfg.transporter()?;
    let sys = tr.system();
    let layout = tr.layout();
    let relation = norm(&(tr.monodromy(&layout.relation_word())? - identity(sys.n())));
    let mut gens = Vec::new();
    let mut frame_defect: f64 = 0.0;
    for j in 0..sys.num_punctures() {
        let s = tr.generator(j)?;
        out.csv(&format!("monodromy_g{}.csv", j + 1), &matrix_table(&s))?;
        let d = reconstruction_defect(&tr, &LocalFrame::new(&tr, j)?)?;
        frame_defect = frame_defect.max(d);
        let ev: Vec<[f64; 2]> = eigen(&s)?.values.iter().map(|&z| pair(z)).collect();
        let expected: Vec<[f64; 2]> = sys.cartan[j]
            .eigen
            .values
            .iter()
            .map(|&l| pair((l * C64::new(0.0, 2.0 * PI)).exp()))
            .collect();
        gens.push(json!({
            "generator": format!("g{}", j + 1),
            "eigenvalues": ev,
            "expected_eigenvalues": expected,
            "frame_defect": d,
        }));
    }
    let mut extra = Vec::new();
    for (k, w) in words.iter().enumerate() {
        let word = LoopWord::parse(w)?;
        let s = tr.monodromy(&word)?;
        out.csv(&format!("monodromy_word{}.csv", k + 1), &matrix_table(&s))?;
        extra.push(json!({ "word": word.to_string(), "trace": pair(s.trace()) }));
    }
    let passed = relation <= 1e-8 && frame_defect <= 1e-6;
    let order: Vec<String> = layout.relation_order().iter().map(|j| format!("g{}", j + 1)).collect();
    let text = format!(
        "basepoint {:.6} {:+.6}i\nrelation {} : defect {relation:.3e}\nlocal-frame defect {frame_defect:.3e}\n",
        layout.basepoint.re,
        layout.basepoint.im,
        order.join(" "),
    );
    let summary = json!({
        "command": "monodromy",
        "basepoint": pair(layout.basepoint),
        "relation_order": order,
        "relation_defect": relation,
        "frame_defect": frame_defect,
        "generators": gens,
        "words": extra,
    });
    Ok((passed, summary, text))
}

fn amplitude(cfg: &RunConfig, out: &mut OutDir, points: &Path) -> Result<Step> {
    let tr = cfg.transporter()?;
    let file: PointsFile = read_json(points)?;
    let sys = tr.system();
    let rows = file
        .sets
        .par_iter()
        .map(|set| -> Result<(C64, usize, C64, C64, f64)> {
            let pts: Vec<Evaluated> = set
                .iter()
                .map(|p| Ok(evaluate(&tr, &p.resolve(&tr)?)?))
                .collect::<Result<_>>()?;
            let x = pts.first().map(|p| p.x).ok_or_else(|| Error::Format("empty point set".into()))?;
            let conn = w_connected(sys, &pts)?;
            let disc = w_disconnected(sys, &pts)?;
            let check = disconnected_from_partitions(sys, &pts)?;
            let residual = (disc - check).norm() / disc.norm().max(check.norm()).max(1e-300);
            Ok((x, pts.len(), conn, disc, residual))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["set", "n", "x*", "connected*", "value*", "residual"]);
    let mut worst: f64 = 0.0;
    for (k, (x, n, conn, disc, res)) in rows.iter().enumerate() {
        table.push(vec![k.into(), (*n).into(), (*x).into(), (*conn).into(), (*disc).into(), (*res).into()]);
        worst = worst.max(*res);
    }
    out.csv("amplitude.csv", &table)?;
    let passed = worst <= 1e-10;
    let text = format!("{} point sets, partition identity defect {worst:.3e}\n", rows.len());
    Ok((passed, json!({ "command": "amplitude", "sets": rows.len(), "partition_defect": worst }), text))
}

fn grid_points<T: Transporter>(tr: &T, side: usize) -> Vec<C64> {
    let sys = tr.system();
    let z = &sys.punctures;
    let (mut lo, mut hi) = (z[0], z[0]);
    for p in z {
        lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let pad = 0.3 * (hi - lo).norm().max(sys.min_separation());
    lo -= C64::new(pad, pad);
    hi += C64::new(pad, pad);
    let keep = 0.05 * sys.min_separation();
    let x0 = tr.layout().basepoint;
    let mut pts = Vec::new();
    for a in 0..side {
        for b in 0..side {
            let u = (a as f64 + 0.5) / side as f64;
            let v = (b as f64 + 0.5) / side as f64;
            let x = C64::new(lo.re + u * (hi.re - lo.re), lo.im + v * (hi.im - lo.im));
            let route = Segment::Line { a: x0, b: x };
            if z.iter().all(|p| route.distance_to(*p) > keep) {
                pts.push(x);
            }
        }
    }
    pts
}

fn casimir_scan(cfg: &RunConfig, out: &mut OutDir, degree: usize, variant: VariantArg, side: usize) -> Result<Step> {
    let tr = cfg.transporter()?;
    let sys = tr.system();
    let tensor = CasimirTensor::new(&sys.algebra, degree)?;
    let xs = grid_points(&tr, side);
    let values = xs
        .par_iter()
        .map(|&x| -> Result<C64> {
            let at = evaluate(&tr, &BundlePoint::straight(tr.layout(), x, zeros(sys.n())))?;
            Ok(casimir_amplitude(sys, &tensor, &at, &[], variant.into())?)
        })
        .collect::<Result<Vec<_>>>()?;
    let poles: Vec<Pole> = sys.punctures.iter().map(|&at| Pole { at, order: degree }).collect();
    let fit = fit_rational(&xs, &values, &poles)?;
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut table = Table::new(&["x*", "value*", "residual"]);
    for (&x, &v) in xs.iter().zip(&values) {
        table.push(vec![x.into(), v.into(), ((v - fit.eval(x)).norm() / scale).into()]);
    }
    out.csv("casimir_scan.csv", &table)?;
    let passed = fit.residual <= cfg.fit_threshold;
    let summary = json!({
        "command": "casimir-scan",
        "degree": degree,
        "variant": format!("{variant:?}").to_lowercase(),
        "points": xs.len(),
        "fit_residual": fit.residual,
        "fit_threshold": cfg.fit_threshold,
        "constant": pair(fit.constant),
    });
    let text = format!(
        "C{degree} {:?}: {} points, rational fit residual {:.3e} (threshold {:.1e})\n",
        variant,
        xs.len(),
        fit.residual,
        cfg.fit_threshold
    );
    Ok((passed, summary, text))
}

fn charges(cfg: &RunConfig, out: &mut OutDir) -> Result<Step> {
    let tr = cfg.transporter()?;
    let sys = tr.system();
    let degrees: Vec<usize> = (2..=sys.n().min(3)).collect();
    let frames: Vec<LocalFrame> = (0..sys.num_punctures()).map(|j| LocalFrame::new(&tr, j)).collect::<hatsigma_core::Result<_>>()?;
    let mut jobs = Vec::new();
    for j in 0..frames.len() {
        for &d in &degrees {
            for v in [VariantArg::Plain, VariantArg::Normal] {
                jobs.push((j, d, v));
            }
        }
    }
    let results = jobs
        .par_iter()
        .map(|&(j, d, v)| -> Result<(C64, f64)> {
            let tensor = CasimirTensor::new(&sys.algebra, d)?;
            let rep = extract_charges(&tr, &frames[j], &tensor, v.into())?;
            Ok((rep.value, rep.residual))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["puncture", "degree", "variant", "value*", "residual"]);
    let mut worst: f64 = 0.0;
    let mut text = String::new();
    for (&(j, d, v), &(value, res)) in jobs.iter().zip(&results) {
        let name = match v {
            VariantArg::Plain => "plain",
            VariantArg::Normal => "normal",
        };
        table.push(vec![(j + 1).into(), d.into(), name.into(), value.into(), res.into()]);
        text.push_str(&format!("z{} C{d} {name:<6} {:+.10e} {:+.10e}i  residual {res:.2e}\n", j + 1, value.re, value.im));
        worst = worst.max(res);
    }
    out.csv("charges.csv", &table)?;
    let passed = worst <= cfg.extrapolation_tol;
    Ok((passed, json!({ "command": "charges", "count": results.len(), "worst_residual": worst }), text))
}

fn cycles(cfg: &RunConfig, out: &mut OutDir) -> Result<Step> {
    let tr = cfg.transporter()?;
    let s = Surface::new(&tr)?;
    let cs = s.cycle_space()?;
    let mut basis = cs.a_basis.clone();
    basis.extend(cs.remainder_basis.iter().cloned());
    let m = s.intersection_matrix(&basis)?;
    out.csv("intersection.csv", &matrix_table(&m))?;
    let anti = norm(&(&m + m.transpose()));
    let (smallest, largest) = if cs.remainder_basis.is_empty() {
        (1.0, 1.0)
    } else {
        let sv = singular_values(&s.intersection_matrix(&cs.remainder_basis)?);
        (sv[sv.len() - 1], sv[0])
    };
    let nondegenerate = smallest >= 1e-6 * largest;
    // Basis cycles are paired against shifted realizations, so the matrix is
    // antisymmetric only to integration accuracy.
    let passed = cs.consistent() && nondegenerate && anti <= 1e-7 * norm(&m).max(1.0);
    let summary = json!({
        "command": "cycles",
        "total": cs.total,
        "expected_total": cs.expected_total,
        "a_cycles": cs.a_cycles,
        "remainder": cs.remainder,
        "block_parameters": cs.block_parameters,
        "boundary_singular_values": cs.singular_values,
        "antisymmetry_defect": anti,
        "remainder_condition": smallest / largest,
    });
    let text = format!(
        "total {} (expected {}), A-cycles {}, remainder {} (2N = {}), condition {:.3e}\n",
        cs.total,
        cs.expected_total,
        cs.a_cycles,
        cs.remainder,
        2 * cs.block_parameters,
        smallest / largest
    );
    Ok((passed, summary, text))
}

fn periods(cfg: &RunConfig, out: &mut OutDir) -> Result<Step> {
    let tr = cfg.transporter()?;
    let s = Surface::new(&tr)?;
    let cs = s.cycle_space()?;
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let mut table = Table::new(&["cycle", "kind", "period*"]);
    let kinds = cs.a_basis.iter().map(|c| ("a", c)).chain(cs.remainder_basis.iter().map(|c| ("loop", c)));
    for (k, (kind, elems)) in kinds.enumerate() {
        let v = s.integrate_w1(&s.loop_chain(elems))? / two_pi_i;
        table.push(vec![k.into(), kind.into(), v.into()]);
    }
    out.csv("periods.csv", &table)?;
    let mut checks = Table::new(&["puncture", "index", "period*", "expected*", "error"]);
    let mut worst: f64 = 0.0;
    for j in 0..tr.system().num_punctures() {
        for (i, (v, want)) in a_cycle_periods(&s, j)?.into_iter().enumerate() {
            let err = (v - want).norm() / (1.0 + want.norm());
            worst = worst.max(err);
            checks.push(vec![(j + 1).into(), i.into(), v.into(), want.into(), err.into()]);
        }
    }
    out.csv("a_cycle_periods.csv", &checks)?;
    let passed = worst <= 1e-6;
    let text = format!("{} cycle periods; A-cycle period error {worst:.3e}\n", table.len());
    Ok((passed, json!({ "command": "periods", "cycles": table.len(), "a_cycle_error": worst }), text))
}

fn malgrange(
    cfg: &RunConfig,
    out: &mut OutDir,
    family: &Path,
    splitting: SplittingArg,
    identity: IdentityArg,
    identity_tol: f64,
) -> Result<Step> {
    let file = load_family(family)?;
    let fam = file.build()?;
    let t = file.point()?;
    let h = file.step.unwrap_or(DEFAULT_STEP);
    let outer = file.outer.unwrap_or(1e-3);
    let dim = fam.dim();
    let unit = |a: usize| -> Vec<C64> {
        (0..dim).map(|b| C64::new(if a == b { 1.0 } else { 0.0 }, 0.0)).collect()
    };
    let tr = Cached::new(fam.system_at(&t)?, cfg.tol)?;
    let surface = Surface::new(&tr)?;
    let mut cycles_table = Table::new(&["direction", "omega*", "defect", "split_defect"]);
    let mut defect: f64 = 0.0;
    let mut text = String::new();
    for a in 0..dim {
        let c = malgrange_cycle(&fam, &surface, &t, &unit(a), h, splitting.into())?;
        defect = defect.max(c.defect);
        cycles_table.push(vec![(a + 1).into(), c.omega.into(), c.defect.into(), c.split_defect.into()]);
        text.push_str(&format!(
            "omega(d{}) = {:+.8e} {:+.8e}i  boundary defect {:.2e}\n",
            a + 1,
            c.omega.re,
            c.omega.im,
            c.defect
        ));
    }
    out.csv("malgrange_cycles.csv", &cycles_table)?;
    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|a| (a + 1..dim).map(move |b| (a, b))).collect();
    let reports = pairs
        .par_iter()
        .map(|&(a, b)| Ok(curvature_check(&fam, &t, &unit(a), &unit(b), h, outer, cfg.tol, splitting.into())?))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "d1",
        "d2",
        "domega*",
        "pairing*",
        "puncture_term*",
        "literal_error",
        "completed_error",
        "closed_error",
    ]);
    let mut worst: f64 = 0.0;
    for (&(a, b), r) in pairs.iter().zip(&reports) {
        let closed = r.domega.norm() / r.pairing.norm().max(1.0);
        table.push(vec![
            (a + 1).into(),
            (b + 1).into(),
            r.domega.into(),
            r.pairing.into(),
            r.local.into(),
            r.rel_error.into(),
            r.completed_error.into(),
            closed.into(),
        ]);
        let e = match identity {
            IdentityArg::Literal => r.rel_error,
            IdentityArg::Completed => r.completed_error,
            IdentityArg::Closed => closed,
        };
        worst = worst.max(e);
        defect = defect.max(r.defect);
        text.push_str(&format!(
            "d{} d{}: domega {:+.6e} {:+.6e}i  pairing {:+.6e} {:+.6e}i  literal {:.2e}  completed {:.2e}  closed {:.2e}\n",
            a + 1,
            b + 1,
            r.domega.re,
            r.domega.im,
            r.pairing.re,
            r.pairing.im,
            r.rel_error,
            r.completed_error,
            closed
        ));
    }
    out.csv("malgrange_curvature.csv", &table)?;
    let passed = defect <= BOUNDARY_TOL && worst <= identity_tol;
    let summary = json!({
        "command": "malgrange",
        "splitting": format!("{splitting:?}").to_lowercase(),
        "identity": format!("{identity:?}").to_lowercase(),
        "identity_tol": identity_tol,
        "identity_error": worst,
        "boundary_defect": defect,
        "step": h,
        "outer_step": outer,
    });
    Ok((passed, summary, text))
}

fn check(cfg: &RunConfig, out: &mut OutDir, probes: usize) -> Result<Step> {
    let tr = cfg.transporter()?;
    let sc = SuiteConfig { tol: cfg.tol, seed: cfg.seed, probes, fit_threshold: cfg.fit_threshold };
    let rows = suite::run(&tr, &sc);
    let mut table = Table::new(&["check", "status", "measured", "threshold"]);
    for r in &rows {
        let status = match r.status {
            suite::Status::Pass => "pass",
            suite::Status::Fail => "fail",
            suite::Status::Skip => "skip",
        };
        table.push(vec![r.name.into(), status.into(), r.measured.into(), r.threshold.into()]);
    }
    out.csv("check.csv", &table)?;
    let passed = suite::all_passed(&rows);
    Ok((passed, json!({ "command": "check", "checks": rows }), suite::render(&rows)))
}
