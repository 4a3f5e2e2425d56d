//! Local frames `Ψ(x) = G(x) (x - z_j)^{A_j} Ψ_j` at the punctures.
//!
//! `G` is the holomorphic Frobenius factor with `G(z_j) = Id`; its Taylor
//! coefficients solve `k G_k - [A_j, G_k] = Σ_{m<k} B_m G_{k-1-m}` where
//! `Σ_{i≠j} A_i/(x - z_i) = Σ_m B_m (x - z_j)^m`. Non-resonance makes every
//! step solvable in the eigenbasis of `A_j`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::lie::CartanData;
use crate::linalg::{self, identity, inverse, norm, zeros, CMat, Eigen, C64, I};
use crate::path::Path;
use crate::system::FuchsianSystem;
use crate::transport::{self, Transporter};
use crate::{Error, Result};

const MAX_TERMS: usize = 200;

/// Taylor coefficients of `G` at `z_j`.
#[derive(Debug, Clone)]
pub struct FrobeniusSeries {
    pub center: C64,
    pub coeffs: Vec<CMat>,
    /// Distance to the nearest other puncture.
    pub radius: f64,
}

impl FrobeniusSeries {
    /// Coefficients until terms fall below `1e-18` relative at `reach · radius`.
    pub fn new(sys: &FuchsianSystem, j: usize, reach: f64) -> Result<Self> {
        let n = sys.n();
        let z = sys.punctures[j];
        let eig = &sys.cartan[j].eigen;
        let lam = &eig.values;
        let radius = sys
            .punctures
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, zi)| (zi - z).norm())
            .fold(f64::INFINITY, f64::min);
        let r = reach * radius;
        // B_m in the eigenbasis of A_j.
        let p = &eig.vectors;
        let p_inv = &eig.vectors_inv;
        let others: Vec<(C64, CMat)> = sys
            .punctures
            .iter()
            .zip(&sys.residues)
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, (zi, ai))| (zi - z, p_inv * ai * p))
            .collect();
        let b = |m: usize| {
            let mut out = zeros(n);
            for (d, a) in &others {
                out -= a * (C64::new(1.0, 0.0) / d.powu(m as u32 + 1));
            }
            out
        };
        let mut bs: Vec<CMat> = Vec::new();
        let mut gt: Vec<CMat> = alloc::vec![identity(n)];
        let mut small = 0;
        for k in 1..MAX_TERMS {
            bs.push(b(k - 1));
            let mut rhs = zeros(n);
            for m in 0..k {
                rhs += &bs[m] * &gt[k - 1 - m];
            }
            let mut g = zeros(n);
            for a in 0..n {
                for c in 0..n {
                    let den = C64::new(k as f64, 0.0) - (lam[a] - lam[c]);
                    if den.norm() < 1e-12 {
                        return Err(Error::ResonantSystem { puncture: j });
                    }
                    g[(a, c)] = rhs[(a, c)] / den;
                }
            }
            let size = norm(&g) * r.powi(k as i32);
            gt.push(g);
            if size < 1e-18 {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        let coeffs = gt.iter().map(|g| p * g * p_inv).collect();
        Ok(Self { center: z, coeffs, radius })
    }

    pub fn eval(&self, x: C64) -> CMat {
        let w = x - self.center;
        let mut acc = self.coeffs.last().cloned().unwrap_or_else(|| identity(1));
        for g in self.coeffs.iter().rev().skip(1) {
            acc = acc * w + g;
        }
        acc
    }

    pub fn eval_derivative(&self, x: C64) -> CMat {
        let w = x - self.center;
        let n = self.coeffs[0].nrows();
        let mut acc = zeros(n);
        for (k, g) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * w + g * C64::new(k as f64, 0.0);
        }
        acc
    }
}

/// Local frame at puncture `j`.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub j: usize,
    pub center: C64,
    pub residue: CMat,
    pub cartan: CartanData,
    pub series: FrobeniusSeries,
    /// Connection matrix `Ψ_j`.
    pub psi_j: CMat,
    pub psi_j_inv: CMat,
    /// Direction of the spoke seen from `z_j`; logs use `arg ∈ (θ - π, θ + π]`.
    pub branch_angle: f64,
    /// Spoke end point where the frame was matched.
    pub matched_at: C64,
    /// `|Ψ_j - Ψ_j'|/|Ψ_j|` between matching at the spoke end and at half the radius.
    pub matching_defect: f64,
}

impl LocalFrame {
    pub fn new<T: Transporter + ?Sized>(tr: &T, j: usize) -> Result<Self> {
        let sys = tr.system();
        let layout = tr.layout();
        let z = sys.punctures[j];
        let series = FrobeniusSeries::new(sys, j, 0.5)?;
        let p = layout.spoke_ends[j];
        let branch_angle = (layout.basepoint - z).arg();
        let cartan = sys.cartan[j].clone();
        let mut frame = Self {
            j,
            center: z,
            residue: sys.residues[j].clone(),
            cartan,
            series,
            psi_j: identity(sys.n()),
            psi_j_inv: identity(sys.n()),
            branch_angle,
            matched_at: p,
            matching_defect: 0.0,
        };
        let psi_p = tr.psi(&layout.spoke(j))?;
        let psi_j = frame.match_at(p, &psi_p)?;
        let q = z + (p - z) * 0.5;
        let psi_q = transport::flow(sys, &Path::new(p).line_to(q), &psi_p, None, tr.tol())?.matrix;
        let psi_j2 = frame.match_at(q, &psi_q)?;
        let defect = norm(&(&psi_j - &psi_j2)) / norm(&psi_j);
        if defect > 1e-5 {
            return Err(Error::NoConvergence(alloc::format!(
                "local frame at puncture {j}: matching defect {defect:e}"
            )));
        }
        frame.psi_j_inv = inverse(&psi_j)?;
        frame.psi_j = psi_j;
        frame.matching_defect = defect;
        Ok(frame)
    }

    pub fn eigen(&self) -> &Eigen {
        &self.cartan.eigen
    }

    /// `log(x - z_j)` on the branch cut opposite to the spoke.
    pub fn log(&self, x: C64) -> C64 {
        let w = x - self.center;
        let mut rel = w.arg() - self.branch_angle;
        while rel > PI {
            rel -= 2.0 * PI;
        }
        while rel <= -PI {
            rel += 2.0 * PI;
        }
        C64::new(w.norm().ln(), self.branch_angle + rel)
    }

    /// `(x - z_j)^{A_j}` on the frame's branch, shifted by `winding` turns.
    pub fn power(&self, x: C64, winding: i64) -> CMat {
        let l = self.log(x) + I * (2.0 * PI * winding as f64);
        self.eigen().apply(|lam| (lam * l).exp())
    }

    pub fn power_inv(&self, x: C64, winding: i64) -> CMat {
        let l = self.log(x) + I * (2.0 * PI * winding as f64);
        self.eigen().apply(|lam| (-lam * l).exp())
    }

    /// `Ψ_j` implied by a known value `Ψ(x)` on the frame's branch.
    pub fn match_at(&self, x: C64, psi_x: &CMat) -> Result<CMat> {
        let g_inv = inverse(&self.series.eval(x))?;
        Ok(self.power_inv(x, 0) * g_inv * psi_x)
    }

    /// `Ψ(x)` from the local expansion, on the lift continuous with the spoke
    /// without crossing the cut.
    pub fn psi(&self, x: C64) -> CMat {
        self.series.eval(x) * self.power(x, 0) * &self.psi_j
    }

    /// `Ψ_j⁻¹ e^{2πi A_j} Ψ_j`.
    pub fn reconstructed_monodromy(&self) -> CMat {
        let e = crate::lie::exp_2pi_i(self.eigen());
        &self.psi_j_inv * e * &self.psi_j
    }

    /// `Ψ_j E Ψ_j⁻¹`.
    pub fn to_local(&self, e: &CMat) -> CMat {
        &self.psi_j * e * &self.psi_j_inv
    }

    /// `Ψ_j⁻¹ F Ψ_j`.
    pub fn from_local(&self, f: &CMat) -> CMat {
        &self.psi_j_inv * f * &self.psi_j
    }

    /// Basis of `Ψ_j⁻¹ h_j Ψ_j`.
    pub fn cartan_basis(&self) -> Vec<CMat> {
        self.cartan.cartan_basis.iter().map(|h| self.from_local(h)).collect()
    }
}

/// All local frames for a transporter.
pub fn local_frames<T: Transporter + ?Sized>(tr: &T) -> Result<Vec<LocalFrame>> {
    (0..tr.system().num_punctures()).map(|j| LocalFrame::new(tr, j)).collect()
}

/// Defect `|Ψ_j⁻¹ e^{2πiA_j} Ψ_j - S_j|`.
pub fn reconstruction_defect<T: Transporter + ?Sized>(tr: &T, frame: &LocalFrame) -> Result<f64> {
    Ok(linalg::norm(&(frame.reconstructed_monodromy() - tr.generator(frame.j)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag};
    use crate::testutil::{random_system, rng, two_pole};
    use crate::transport::Direct;

    #[test]
    fn series_solves_the_ode() {
        let mut r = rng(21);
        let sys = random_system(3, 4, &mut r);
        let s = FrobeniusSeries::new(&sys, 1, 0.5).unwrap();
        let z = sys.punctures[1];
        let a = &sys.residues[1];
        // G' + G A_j/(x-z) = A(x) G
        let x = z + c(0.05, 0.03);
        let g = s.eval(x);
        let lhs = s.eval_derivative(x) + &g * a / (x - z);
        let rhs = sys.connection_unchecked(x) * &g;
        assert!(norm(&(lhs - rhs)) < 1e-10 * norm(&g));
    }

    #[test]
    fn two_pole_frame_matches_closed_form() {
        // Ψ(x) = exp(A₁ (L(x) - L(x₀))) with L = log x - log(x - 1) continued along
        // the spoke. Near 0, L = log x - log(1 - x) - iπ·sgn(Im x₀), so
        // Ψ₁ = exp(-A₁ (iπ·sgn(Im x₀) + L(x₀))).
        let a = 0.3;
        let tr = Direct::new(two_pole(a), 1e-11).unwrap();
        let frame = LocalFrame::new(&tr, 0).unwrap();
        let x0 = tr.layout().basepoint;
        assert!(x0.im != 0.0);
        let l0 = x0.ln() - (x0 - 1.0).ln() + I * (PI * x0.im.signum());
        let oracle = diag(&[(-l0 * a).exp(), (l0 * a).exp()]);
        assert!(norm(&(&frame.psi_j - &oracle)) < 1e-8);
        assert!(frame.matching_defect < 1e-8);
    }

    #[test]
    fn reconstruction_matches_monodromy() {
        let mut r = rng(22);
        for (n, np) in [(2, 3), (3, 3), (2, 4)] {
            let sys = random_system(n, np, &mut r);
            let tr = Direct::new(sys, 1e-10).unwrap();
            for f in local_frames(&tr).unwrap() {
                assert!(reconstruction_defect(&tr, &f).unwrap() < 1e-6);
            }
        }
    }
}
