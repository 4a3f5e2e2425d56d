//! Fuchsian connection `A(x) = Σ_j A_j / (x - z_j)` with `Σ_j A_j = 0`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::lie::{self, root_decomposition, CartanData, LieAlgebra};
use crate::linalg::{self, zeros, CMat, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Residue-sum tolerance (entrywise).
    pub residue_sum: f64,
    /// Relative gap for regular semisimplicity of the residues.
    pub genericity: f64,
    /// Distance of eigenvalue differences from nonzero integers.
    pub resonance: f64,
    /// Local error target for transport.
    pub transport: f64,
    /// Clearance as a fraction of the minimal puncture separation.
    pub clearance_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residue_sum: 1e-12,
            genericity: lie::GENERICITY_TOL,
            resonance: 1e-8,
            transport: 1e-10,
            clearance_fraction: 1e-3,
        }
    }
}

/// One line of a validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub defect: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub lines: Vec<CheckLine>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.lines.iter().filter(|l| !l.passed)
    }
}

/// Unvalidated system data, as read from a file.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub n: usize,
    pub punctures: Vec<C64>,
    pub residues: Vec<CMat>,
    pub tolerances: Tolerances,
    pub clearance: Option<f64>,
    pub basepoint: Option<C64>,
}

impl SystemSpec {
    pub fn new(n: usize, punctures: Vec<C64>, residues: Vec<CMat>) -> Self {
        Self { n, punctures, residues, tolerances: Tolerances::default(), clearance: None, basepoint: None }
    }

    fn min_separation(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.punctures.len() {
            for j in i + 1..self.punctures.len() {
                d = d.min((self.punctures[i] - self.punctures[j]).norm());
            }
        }
        d
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
            .unwrap_or_else(|| self.tolerances.clearance_fraction * self.min_separation())
    }

    /// Report-style validation; never fails.
    pub fn validate(&self) -> ValidationReport {
        let mut lines = Vec::new();
        let np = self.punctures.len();
        let n = self.n;
        let mut push = |name: &str, passed: bool, defect: f64, detail: String| {
            lines.push(CheckLine { name: name.into(), passed, defect, detail });
        };

        let rank_ok = (2..=5).contains(&n);
        push("rank", rank_ok, 0.0, format!("N = {n}"));
        let shape_ok = self.residues.len() == np
            && np >= 2
            && self.residues.iter().all(|r| r.nrows() == n && r.ncols() == n);
        push(
            "shape",
            shape_ok,
            0.0,
            format!("{np} punctures, {} residues", self.residues.len()),
        );
        if !rank_ok || !shape_ok {
            return ValidationReport { lines };
        }

        let mut sum = zeros(n);
        for r in &self.residues {
            sum += r;
        }
        let sum_defect = linalg::max_abs(&sum);
        push(
            "residue_sum",
            sum_defect <= self.tolerances.residue_sum,
            sum_defect,
            format!("max |Σ A_j| = {sum_defect:e}"),
        );

        let trace_defect = self.residues.iter().map(|r| r.trace().norm()).fold(0.0, f64::max);
        push("traceless", trace_defect <= 1e-12, trace_defect, String::new());

        let clearance = self.clearance();
        let sep = self.min_separation();
        push(
            "separation",
            sep.is_finite() && sep >= 10.0 * clearance && clearance > 0.0,
            sep,
            format!("min separation {sep:e}, clearance {clearance:e}"),
        );

        for (j, a) in self.residues.iter().enumerate() {
            match root_decomposition(a, self.tolerances.genericity) {
                Ok(cd) => {
                    push(&format!("generic[{j}]"), true, 0.0, String::new());
                    let lam = &cd.eigen.values;
                    let mut worst = f64::INFINITY;
                    for k in 0..n {
                        for l in 0..n {
                            if k == l {
                                continue;
                            }
                            let d = lam[k] - lam[l];
                            let mut nearest = d.re.round();
                            if nearest == 0.0 {
                                nearest = if d.re < 0.0 { -1.0 } else { 1.0 };
                            }
                            worst = worst.min((d - nearest).norm());
                        }
                    }
                    let ok = worst > self.tolerances.resonance;
                    push(
                        &format!("nonresonant[{j}]"),
                        ok,
                        if worst.is_finite() { worst } else { 1.0 },
                        String::from("distance of eigenvalue differences to nonzero integers"),
                    );
                }
                Err(e) => push(&format!("generic[{j}]"), false, 0.0, format!("{e}")),
            }
        }
        ValidationReport { lines }
    }

    /// Validate and build; any failing check is an error.
    pub fn build(self) -> Result<FuchsianSystem> {
        let report = self.validate();
        if let Some(f) = report.failures().next() {
            if f.name.starts_with("nonresonant[") {
                let j = f.name[12..f.name.len() - 1].parse().unwrap_or(0);
                return Err(Error::ResonantSystem { puncture: j });
            }
            if f.name.starts_with("generic[") {
                return Err(Error::NonGenericElement(f.detail.clone()));
            }
            return Err(Error::InvalidSystem(format!("{}: {}", f.name, f.detail)));
        }
        let algebra = LieAlgebra::sl(self.n)?;
        let cartan = self
            .residues
            .iter()
            .map(|a| root_decomposition(a, self.tolerances.genericity))
            .collect::<Result<Vec<_>>>()?;
        let clearance = self.clearance();
        Ok(FuchsianSystem {
            algebra,
            punctures: self.punctures,
            residues: self.residues,
            cartan,
            clearance,
            tolerances: self.tolerances,
            basepoint: self.basepoint,
        })
    }
}

/// A validated system. Immutable.
#[derive(Debug, Clone)]
pub struct FuchsianSystem {
    pub algebra: LieAlgebra,
    pub punctures: Vec<C64>,
    pub residues: Vec<CMat>,
    pub cartan: Vec<CartanData>,
    pub clearance: f64,
    pub tolerances: Tolerances,
    pub basepoint: Option<C64>,
}

impl FuchsianSystem {
    pub fn n(&self) -> usize {
        self.algebra.n()
    }

    pub fn num_punctures(&self) -> usize {
        self.punctures.len()
    }

    /// Length scale used for relative thresholds: the largest puncture distance.
    pub fn scale(&self) -> f64 {
        let mut s: f64 = 0.0;
        for a in &self.punctures {
            for b in &self.punctures {
                s = s.max((a - b).norm());
            }
        }
        s.max(1e-300)
    }

    pub fn min_separation(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.punctures.len() {
            for j in i + 1..self.punctures.len() {
                d = d.min((self.punctures[i] - self.punctures[j]).norm());
            }
        }
        d
    }

    /// Nearest puncture and its distance.
    pub fn nearest_puncture(&self, x: C64) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (j, z) in self.punctures.iter().enumerate() {
            let d = (x - z).norm();
            if d < best.1 {
                best = (j, d);
            }
        }
        best
    }

    pub fn check_clearance(&self, x: C64) -> Result<()> {
        let (j, d) = self.nearest_puncture(x);
        if d < self.clearance {
            return Err(Error::TooCloseToPuncture { puncture: j, distance: d, clearance: self.clearance });
        }
        Ok(())
    }

    pub fn connection_at(&self, x: C64) -> Result<CMat> {
        self.check_clearance(x)?;
        Ok(self.connection_unchecked(x))
    }

    pub fn connection_unchecked(&self, x: C64) -> CMat {
        let mut m = zeros(self.n());
        for (z, a) in self.punctures.iter().zip(&self.residues) {
            m += a * (C64::new(1.0, 0.0) / (x - z));
        }
        m
    }

    /// `A'(x)`.
    pub fn connection_derivative(&self, x: C64) -> CMat {
        let mut m = zeros(self.n());
        for (z, a) in self.punctures.iter().zip(&self.residues) {
            let d = x - z;
            m -= a * (C64::new(1.0, 0.0) / (d * d));
        }
        m
    }

    /// Same system with every residue conjugated by `g`.
    pub fn conjugated(&self, g: &CMat) -> Result<Self> {
        let g_inv = linalg::inverse(g)?;
        let residues: Vec<CMat> = self.residues.iter().map(|a| g * a * &g_inv).collect();
        self.with_residues(residues)
    }

    pub fn with_residues(&self, residues: Vec<CMat>) -> Result<Self> {
        let mut spec = SystemSpec::new(self.n(), self.punctures.clone(), residues);
        spec.tolerances = self.tolerances;
        spec.clearance = Some(self.clearance);
        spec.basepoint = self.basepoint;
        spec.build()
    }

    pub fn spec(&self) -> SystemSpec {
        SystemSpec {
            n: self.n(),
            punctures: self.punctures.clone(),
            residues: self.residues.clone(),
            tolerances: self.tolerances,
            clearance: Some(self.clearance),
            basepoint: self.basepoint,
        }
    }

    /// Killing form with this system's normalization.
    pub fn killing(&self, a: &CMat, b: &CMat) -> C64 {
        lie::killing_unchecked(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::linalg::{c, diag, norm};
    use crate::testutil::{random_system, rng, two_pole};

    #[test]
    fn two_pole_validates() {
        let sys = two_pole(0.3);
        assert_eq!(sys.num_punctures(), 2);
        assert!((sys.clearance - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn residue_sum_violation_reported() {
        let a = diag(&[c(0.3, 0.0), c(-0.3, 0.0)]);
        let b = diag(&[c(0.2, 0.0), c(-0.2, 0.0)]);
        let spec = SystemSpec::new(2, vec![c(0.0, 0.0), c(1.0, 0.0)], vec![a, b]);
        let rep = spec.validate();
        assert!(!rep.passed());
        let line = rep.lines.iter().find(|l| l.name == "residue_sum").unwrap();
        assert!(!line.passed);
        assert!((line.defect - 0.5).abs() < 1e-14);
        assert!(matches!(spec.build(), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn nilpotent_residue_fails_genericity() {
        let mut a = zeros(2);
        a[(0, 1)] = c(1.0, 0.0);
        let spec = SystemSpec::new(2, vec![c(0.0, 0.0), c(1.0, 0.0)], vec![a.clone(), -a]);
        let rep = spec.validate();
        assert!(rep.lines.iter().any(|l| l.name == "generic[0]" && !l.passed));
        assert!(matches!(spec.build(), Err(Error::NonGenericElement(_))));
    }

    #[test]
    fn resonant_residue_rejected() {
        let a = diag(&[c(0.5, 0.0), c(-0.5, 0.0)]);
        let spec = SystemSpec::new(2, vec![c(0.0, 0.0), c(1.0, 0.0)], vec![a.clone(), -a]);
        assert!(matches!(spec.build(), Err(Error::ResonantSystem { puncture: 0 })));
    }

    #[test]
    fn connection_decays_at_infinity() {
        let sys = two_pole(0.3);
        let n3 = norm(&sys.connection_at(c(1e3, 0.0)).unwrap()) * 1e6;
        let n4 = norm(&sys.connection_at(c(1e4, 0.0)).unwrap()) * 1e8;
        assert!((n3 - n4).abs() / n4 < 1e-2);
    }

    #[test]
    fn connection_at_midpoint_matches_direct_sum() {
        let sys = two_pole(0.3);
        let (z1, z2) = (sys.punctures[0], sys.punctures[1]);
        let x = (z1 + z2) * 0.5;
        let a1 = &sys.residues[0];
        // A(x) = A1/(x-z1) - A1/(x-z2) = 4 A1 / (z2 - z1) at the midpoint.
        let expect = a1 * (C64::new(4.0, 0.0) / (z2 - z1));
        assert!(norm(&(sys.connection_at(x).unwrap() - expect)) < 1e-14);
        let near = z1 + sys.clearance * 0.5;
        assert!(matches!(sys.connection_at(near), Err(Error::TooCloseToPuncture { puncture: 0, .. })));
    }

    #[test]
    fn connection_is_holomorphic_and_has_residues() {
        let mut r = rng(11);
        let sys = random_system(2, 3, &mut r);
        let h = 1e-5;
        let x = c(0.37, 0.61);
        let fx = |p: C64| sys.connection_unchecked(p);
        let dx = (fx(x + h) - fx(x - h)) / C64::new(2.0 * h, 0.0);
        let dy = (fx(x + c(0.0, h)) - fx(x - c(0.0, h))) / C64::new(2.0 * h, 0.0);
        // Cauchy-Riemann: ∂_y f = i ∂_x f.
        assert!(norm(&(dy - dx * c(0.0, 1.0))) < 1e-8);
        // (x - z_j) A(x) → A_j, two Richardson levels on d, d/2, d/4.
        for j in 0..3 {
            let z = sys.punctures[j];
            let g = |d: f64| sys.connection_unchecked(z + d) * C64::new(d, 0.0);
            let d = 1e-3;
            let rich = (g(d / 4.0) * c(8.0, 0.0) - g(d / 2.0) * c(6.0, 0.0) + g(d)) / c(3.0, 0.0);
            assert!(norm(&(rich - &sys.residues[j])) < 1e-8);
        }
    }
}
