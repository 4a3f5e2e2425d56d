//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major lists of
//! rows in the fundamental realization. A system file looks like
//!
//! ```json
//! { "N": 2,
//!   "punctures": [[0, 0], [1, 0]],
//!   "residues": [ [[[0.3, 0], [0, 0]], [[0, 0], [-0.3, 0]]],
//!                 [[[-0.3, 0], [0, 0]], [[0, 0], [0.3, 0]]] ],
//!   "tolerances": { "transport": 1e-10 } }
//! ```
//!
//! Every load re-runs the full validation of the core crate.

use std::fs;
use std::path::Path;

use hatsigma_core::linalg::{CMat, C64};
use hatsigma_core::malgrange::{ConjugationFamily, Family, ResidueFamily};
use hatsigma_core::path::{LoopLayout, LoopWord};
use hatsigma_core::system::{FuchsianSystem, SystemSpec, Tolerances};
use hatsigma_core::transport::{BundlePoint, Transporter};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

pub fn to_c(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

pub fn from_c(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn to_mat(m: &Matrix) -> Result<CMat> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::Format(format!("matrix is not square ({n} rows)")));
    }
    Ok(CMat::from_fn(n, n, |i, k| to_c(m[i][k])))
}

pub fn from_mat(m: &CMat) -> Matrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| from_c(m[(i, k)])).collect()).collect()
}

/// Partial override of [`Tolerances`]; absent fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue_sum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genericity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearance_fraction: Option<f64>,
}

impl ToleranceFile {
    pub fn apply(&self, mut t: Tolerances) -> Result<Tolerances> {
        let fields = [
            (self.residue_sum, &mut t.residue_sum, "residue_sum"),
            (self.genericity, &mut t.genericity, "genericity"),
            (self.resonance, &mut t.resonance, "resonance"),
            (self.transport, &mut t.transport, "transport"),
            (self.clearance_fraction, &mut t.clearance_fraction, "clearance_fraction"),
        ];
        for (v, slot, name) in fields {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Format(format!("tolerance {name} must be positive, got {v}")));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub punctures: Vec<Complex>,
    pub residues: Vec<Matrix>,
    #[serde(default)]
    pub tolerances: ToleranceFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Complex>,
}

impl SystemFile {
    pub fn spec(&self) -> Result<SystemSpec> {
        let residues = self.residues.iter().map(to_mat).collect::<Result<Vec<_>>>()?;
        let mut spec = SystemSpec::new(self.n, self.punctures.iter().copied().map(to_c).collect(), residues);
        spec.tolerances = self.tolerances.apply(Tolerances::default())?;
        spec.clearance = self.clearance;
        spec.basepoint = self.basepoint.map(to_c);
        Ok(spec)
    }

    /// Validated system; a failing report is returned whole.
    pub fn build(&self) -> Result<FuchsianSystem> {
        let spec = self.spec()?;
        let report = spec.validate();
        if !report.passed() {
            return Err(Error::Validation(report));
        }
        Ok(spec.build()?)
    }

    pub fn from_system(sys: &FuchsianSystem) -> Self {
        let d = Tolerances::default();
        let t = sys.tolerances;
        let differs = |a: f64, b: f64| (a != b).then_some(a);
        Self {
            n: sys.n(),
            punctures: sys.punctures.iter().copied().map(from_c).collect(),
            residues: sys.residues.iter().map(from_mat).collect(),
            tolerances: ToleranceFile {
                residue_sum: differs(t.residue_sum, d.residue_sum),
                genericity: differs(t.genericity, d.genericity),
                resonance: differs(t.resonance, d.resonance),
                transport: differs(t.transport, d.transport),
                clearance_fraction: differs(t.clearance_fraction, d.clearance_fraction),
            },
            clearance: Some(sys.clearance),
            basepoint: sys.basepoint.map(from_c),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// `A_j + Σ t_α D_{α,j}`.
    #[default]
    Linear,
    /// `e^{X_j} A_j e^{-X_j}` with `X = Σ t_α V_α` corrected to keep `Σ A_j = 0`.
    Isospectral,
}

/// Base system plus per-puncture perturbation directions, one list per parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub base: SystemFile,
    #[serde(default)]
    pub kind: FamilyKind,
    pub directions: Vec<Vec<Matrix>>,
    /// Parameter point; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<Complex>>,
    /// Inner finite-difference step for `δS`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Outer step for `dω`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<f64>,
}

pub enum AnyFamily {
    Linear(ResidueFamily),
    Isospectral(ConjugationFamily),
}

impl Family for AnyFamily {
    fn dim(&self) -> usize {
        match self {
            AnyFamily::Linear(f) => f.dim(),
            AnyFamily::Isospectral(f) => f.dim(),
        }
    }

    fn system_at(&self, t: &[C64]) -> hatsigma_core::Result<FuchsianSystem> {
        match self {
            AnyFamily::Linear(f) => f.system_at(t),
            AnyFamily::Isospectral(f) => f.system_at(t),
        }
    }
}

impl FamilyFile {
    pub fn build(&self) -> Result<AnyFamily> {
        let base = self.base.build()?;
        let directions = self
            .directions
            .iter()
            .map(|d| d.iter().map(to_mat).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(match self.kind {
            FamilyKind::Linear => AnyFamily::Linear(ResidueFamily::new(base, directions)?),
            FamilyKind::Isospectral => AnyFamily::Isospectral(ConjugationFamily::new(base, directions)?),
        })
    }

    pub fn point(&self) -> Result<Vec<C64>> {
        match &self.point {
            None => Ok(vec![C64::new(0.0, 0.0); self.directions.len()]),
            Some(p) if p.len() == self.directions.len() => Ok(p.iter().copied().map(to_c).collect()),
            Some(p) => Err(Error::Format(format!(
                "point has {} coordinates for {} directions",
                p.len(),
                self.directions.len()
            ))),
        }
    }
}

/// A point of `Σ̂`: `x`, the element `E`, and an optional loop word run at the
/// basepoint before the straight route to `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub x: Complex,
    pub e: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
}

impl PointSpec {
    pub fn resolve<T: Transporter + ?Sized>(&self, tr: &T) -> Result<BundlePoint> {
        let layout: &LoopLayout = tr.layout();
        let p = BundlePoint::straight(layout, to_c(self.x), to_mat(&self.e)?);
        match self.word.as_deref().map(str::trim) {
            None | Some("") => Ok(p),
            Some(w) => {
                let word = LoopWord::parse(w)?;
                let path = layout.word_path(tr.system(), &word);
                Ok(p.with_loop(&path, &tr.monodromy(&word)?)?)
            }
        }
    }
}

/// Input of the `amplitude` subcommand: each set is one amplitude evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsFile {
    pub sets: Vec<Vec<PointSpec>>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_system(path: &Path) -> Result<FuchsianSystem> {
    read_json::<SystemFile>(path)?.build()
}

pub fn load_family(path: &Path) -> Result<FamilyFile> {
    read_json(path)
}
