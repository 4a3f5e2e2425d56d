//! Parallel transport `dΨ/dx = A(x) Ψ` along paths, monodromy, and `M(x.E)`.

use alloc::vec::Vec;

use crate::linalg::{self, det, identity, inverse, CMat, C64};
use crate::ode::{self, Options, Stats};
use crate::path::{LoopLayout, LoopWord, Path, Segment};
use crate::system::FuchsianSystem;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct TransportResult {
    /// `Ψ(end)` given `Ψ(start)`.
    pub matrix: CMat,
    /// `M(end)` when transported alongside.
    pub m: Option<CMat>,
    /// `∫ ⟨A(x), M(x)⟩ dx` when `m` is transported.
    pub w1_integral: C64,
    /// Sum of accepted local error estimates times the tolerance.
    pub error_estimate: f64,
    /// Largest `|det Ψ - det Ψ(start)|` seen at accepted steps.
    pub det_defect: f64,
    pub stats: Stats,
}

/// Integrate along `path` from `psi0`, optionally carrying `M' = [A, M]` and
/// the running integral of `W₁ = ⟨A, M⟩`.
pub fn flow(sys: &FuchsianSystem, path: &Path, psi0: &CMat, m0: Option<&CMat>, tol: f64) -> Result<TransportResult> {
    path.check_clearance(sys)?;
    let n = sys.n();
    let nn = n * n;
    let with_m = m0.is_some();
    let len = if with_m { 2 * nn + 1 } else { nn };
    let mut y = Vec::with_capacity(len);
    y.extend_from_slice(psi0.as_slice());
    if let Some(m) = m0 {
        y.extend_from_slice(m.as_slice());
        y.push(C64::new(0.0, 0.0));
    }
    let det0 = det(psi0);
    let kappa = crate::lie::killing_factor(n);
    let mut det_defect: f64 = 0.0;
    let mut stats = Stats::default();
    let opts = Options::with_tol(tol);

    for (k, seg) in path.segments.iter().enumerate() {
        let seg = *seg;
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
            let a = sys.connection_unchecked(seg.point(t)) * seg.velocity(t);
            let psi = linalg::unflatten(n, &y[..nn]);
            dy[..nn].copy_from_slice((&a * &psi).as_slice());
            if with_m {
                let m = linalg::unflatten(n, &y[nn..2 * nn]);
                dy[nn..2 * nn].copy_from_slice((&a * &m - &m * &a).as_slice());
                dy[2 * nn] = linalg::trace_prod(&a, &m) * kappa;
            }
        };
        let check = |_: f64, y: &[C64]| {
            let d = det(&linalg::unflatten(n, &y[..nn]));
            det_defect = det_defect.max((d - det0).norm());
            Ok(())
        };
        let st = ode::integrate(rhs, check, 0.0, 1.0, &mut y, &opts).map_err(|e| match e {
            Error::StepSizeUnderflow { t, .. } => Error::StepSizeUnderflow { segment: k, t },
            other => other,
        })?;
        stats += st;
    }
    let matrix = linalg::unflatten(n, &y[..nn]);
    let (m, w1_integral) = if with_m {
        (Some(linalg::unflatten(n, &y[nn..2 * nn])), y[2 * nn])
    } else {
        (None, C64::new(0.0, 0.0))
    };
    Ok(TransportResult { matrix, m, w1_integral, error_estimate: stats.error_estimate * tol, det_defect, stats })
}

/// `T` with `dT/dx = A T`, `T(start) = Id`.
pub fn transport(sys: &FuchsianSystem, path: &Path, tol: f64) -> Result<TransportResult> {
    flow(sys, path, &identity(sys.n()), None, tol)
}

/// Source of transports and monodromies for a fixed system and layout.
///
/// Implementations may cache; results must be those of [`transport`].
pub trait Transporter {
    fn system(&self) -> &FuchsianSystem;
    fn layout(&self) -> &LoopLayout;
    fn tol(&self) -> f64;

    /// `Ψ(path.end)` with `Ψ(path.start) = Id`.
    fn transport(&self, path: &Path) -> Result<CMat>;

    /// `S_j`, the transport around the standard generator `γ_j`.
    fn generator(&self, j: usize) -> Result<CMat>;

    fn generator_inverse(&self, j: usize) -> Result<CMat> {
        inverse(&self.generator(j)?)
    }

    /// Product of generator monodromies in the order written.
    fn monodromy(&self, word: &LoopWord) -> Result<CMat> {
        let mut s = identity(self.system().n());
        for &(j, e) in &word.letters {
            let g = if e > 0 { self.generator(j)? } else { self.generator_inverse(j)? };
            s *= g;
        }
        Ok(s)
    }

    /// `Ψ` at the end of a route from the basepoint.
    fn psi(&self, route: &Path) -> Result<CMat> {
        debug_assert!((route.start - self.layout().basepoint).norm() <= 1e-12 * (1.0 + route.start.norm()));
        self.transport(route)
    }
}

/// Transporter without path caching; generator monodromies are computed once.
#[derive(Debug, Clone)]
pub struct Direct {
    sys: FuchsianSystem,
    layout: LoopLayout,
    tol: f64,
    generators: Vec<CMat>,
    inverses: Vec<CMat>,
}

impl Direct {
    pub fn new(sys: FuchsianSystem, tol: f64) -> Result<Self> {
        let layout = LoopLayout::new(&sys)?;
        let mut generators = Vec::with_capacity(sys.num_punctures());
        let mut inverses = Vec::with_capacity(sys.num_punctures());
        for j in 0..sys.num_punctures() {
            let s = transport(&sys, &layout.generator(&sys, j), tol)?.matrix;
            inverses.push(inverse(&s)?);
            generators.push(s);
        }
        Ok(Self { sys, layout, tol, generators, inverses })
    }
}

impl Transporter for Direct {
    fn system(&self) -> &FuchsianSystem {
        &self.sys
    }

    fn layout(&self) -> &LoopLayout {
        &self.layout
    }

    fn tol(&self) -> f64 {
        self.tol
    }

    fn transport(&self, path: &Path) -> Result<CMat> {
        Ok(transport(&self.sys, path, self.tol)?.matrix)
    }

    fn generator(&self, j: usize) -> Result<CMat> {
        self.generators.get(j).cloned().ok_or(Error::InvalidArgument("generator index".into()))
    }

    fn generator_inverse(&self, j: usize) -> Result<CMat> {
        self.inverses.get(j).cloned().ok_or(Error::InvalidArgument("generator index".into()))
    }
}

/// `X = [x.E]`: a route from the basepoint fixing the lift of `x`, and `E ∈ g`.
#[derive(Debug, Clone, PartialEq)]
pub struct BundlePoint {
    pub route: Path,
    pub e: CMat,
}

impl BundlePoint {
    pub fn new(route: Path, e: CMat) -> Self {
        Self { route, e }
    }

    /// Straight route from the basepoint.
    pub fn straight(layout: &LoopLayout, x: C64, e: CMat) -> Self {
        Self { route: Path::new(layout.basepoint).line_to(x), e }
    }

    pub fn x(&self) -> C64 {
        self.route.end()
    }

    /// Same point reached after first running `loop_path` at the basepoint,
    /// with `E` replaced by `S⁻¹ E S`; this represents the same element of `Σ̂`.
    pub fn with_loop(&self, loop_path: &Path, s: &CMat) -> Result<Self> {
        let s_inv = inverse(s)?;
        Ok(Self { route: loop_path.clone().then(&self.route), e: &s_inv * &self.e * s })
    }

    pub fn with_e(&self, e: CMat) -> Self {
        Self { route: self.route.clone(), e }
    }
}

/// A bundle point with its solution matrix evaluated.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub x: C64,
    pub psi: CMat,
    pub psi_inv: CMat,
    pub e: CMat,
}

impl Evaluated {
    pub fn new(x: C64, psi: CMat, e: CMat) -> Result<Self> {
        let psi_inv = inverse(&psi)?;
        Ok(Self { x, psi, psi_inv, e })
    }

    /// `M = Ψ E Ψ⁻¹`.
    pub fn m(&self) -> CMat {
        &self.psi * &self.e * &self.psi_inv
    }

    pub fn with_e(&self, e: CMat) -> Self {
        Self { x: self.x, psi: self.psi.clone(), psi_inv: self.psi_inv.clone(), e }
    }
}

pub fn evaluate<T: Transporter + ?Sized>(tr: &T, p: &BundlePoint) -> Result<Evaluated> {
    Evaluated::new(p.x(), tr.psi(&p.route)?, p.e.clone())
}

/// `M(x.E) = Ψ(x) E Ψ(x)⁻¹`.
pub fn evaluate_m<T: Transporter + ?Sized>(tr: &T, p: &BundlePoint) -> Result<CMat> {
    Ok(evaluate(tr, p)?.m())
}

/// Transport continued from an evaluated point along a further segment.
pub fn extend(sys: &FuchsianSystem, from: &CMat, seg: Segment, tol: f64) -> Result<CMat> {
    let p = Path { start: seg.start(), segments: alloc::vec![seg] };
    Ok(flow(sys, &p, from, None, tol)?.matrix)
}
