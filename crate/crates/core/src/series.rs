//! Truncated bivariate Laurent series `Σ c_{p,q} ε₁^p ε₂^q` with matrix coefficients.
//!
//! A series with `1×1` coefficients acts as a scalar in products. Truncation
//! to a fixed window is exact for a coefficient inside the window as long as
//! every factor's lowest exponents are no lower than the window's.

use alloc::vec::Vec;

use crate::linalg::{zeros, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo1: i32,
    pub hi1: i32,
    pub lo2: i32,
    pub hi2: i32,
}

impl Window {
    pub fn univariate(lo: i32, hi: i32) -> Self {
        Self { lo1: lo, hi1: hi, lo2: 0, hi2: 0 }
    }

    fn len2(&self) -> usize {
        (self.hi2 - self.lo2 + 1) as usize
    }

    fn len(&self) -> usize {
        (self.hi1 - self.lo1 + 1) as usize * self.len2()
    }

    fn index(&self, p: i32, q: i32) -> Option<usize> {
        if p < self.lo1 || p > self.hi1 || q < self.lo2 || q > self.hi2 {
            return None;
        }
        Some((p - self.lo1) as usize * self.len2() + (q - self.lo2) as usize)
    }

    fn exponents(&self, i: usize) -> (i32, i32) {
        let l2 = self.len2();
        (self.lo1 + (i / l2) as i32, self.lo2 + (i % l2) as i32)
    }
}

#[derive(Debug, Clone)]
pub struct Laurent {
    pub win: Window,
    pub dim: usize,
    coeffs: Vec<Option<CMat>>,
}

impl Laurent {
    pub fn zero(win: Window, dim: usize) -> Self {
        Self { win, dim, coeffs: alloc::vec![None; win.len()] }
    }

    /// `m ε₁^p ε₂^q`.
    pub fn monomial(win: Window, m: CMat, p: i32, q: i32) -> Self {
        let mut s = Self::zero(win, m.nrows());
        if let Some(i) = win.index(p, q) {
            s.coeffs[i] = Some(m);
        }
        s
    }

    pub fn scalar(win: Window, c: C64, p: i32, q: i32) -> Self {
        Self::monomial(win, CMat::from_element(1, 1, c), p, q)
    }

    pub fn constant(win: Window, m: CMat) -> Self {
        Self::monomial(win, m, 0, 0)
    }

    /// `Σ_k terms[k] ε₁^k` (or `ε₂^k` when `second`).
    pub fn taylor(win: Window, terms: &[CMat], second: bool) -> Self {
        let dim = terms.first().map_or(1, |m| m.nrows());
        let mut s = Self::zero(win, dim);
        for (k, m) in terms.iter().enumerate() {
            let (p, q) = if second { (0, k as i32) } else { (k as i32, 0) };
            if let Some(i) = win.index(p, q) {
                s.coeffs[i] = Some(m.clone());
            }
        }
        s
    }

    pub fn coeff(&self, p: i32, q: i32) -> CMat {
        self.win
            .index(p, q)
            .and_then(|i| self.coeffs[i].clone())
            .unwrap_or_else(|| zeros(self.dim))
    }

    pub fn set(&mut self, p: i32, q: i32, m: CMat) {
        if let Some(i) = self.win.index(p, q) {
            self.coeffs[i] = Some(m);
        }
    }

    fn add_at(&mut self, i: usize, m: CMat) {
        match &mut self.coeffs[i] {
            Some(c) => *c += m,
            slot => *slot = Some(m),
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (i, c) in other.coeffs.iter().enumerate() {
            if let Some(m) = c {
                out.add_at(i, m.clone());
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Laurent {
        let mut out = self.clone();
        for m in out.coeffs.iter_mut().flatten() {
            *m *= s;
        }
        out
    }

    /// Truncated product; `1×1` coefficients multiply as scalars.
    pub fn mul(&self, other: &Laurent) -> Laurent {
        let dim = if self.dim == 1 { other.dim } else { self.dim };
        let mut out = Laurent::zero(self.win, dim);
        for (i, a) in self.coeffs.iter().enumerate() {
            let Some(a) = a else { continue };
            let (p1, q1) = self.win.exponents(i);
            for (k, b) in other.coeffs.iter().enumerate() {
                let Some(b) = b else { continue };
                let (p2, q2) = other.win.exponents(k);
                let Some(idx) = self.win.index(p1 + p2, q1 + q2) else { continue };
                let prod = if a.nrows() == 1 && b.nrows() != 1 {
                    b * a[(0, 0)]
                } else if b.nrows() == 1 && a.nrows() != 1 {
                    a * b[(0, 0)]
                } else {
                    a * b
                };
                out.add_at(idx, prod);
            }
        }
        out
    }

    /// Coefficientwise trace, as a scalar series.
    pub fn trace(&self) -> Laurent {
        let mut out = Laurent::zero(self.win, 1);
        for (i, c) in self.coeffs.iter().enumerate() {
            if let Some(m) = c {
                out.coeffs[i] = Some(CMat::from_element(1, 1, m.trace()));
            }
        }
        out
    }

    pub fn scalar_coeff(&self, p: i32, q: i32) -> C64 {
        self.win
            .index(p, q)
            .and_then(|i| self.coeffs[i].as_ref())
            .map_or(C64::new(0.0, 0.0), |m| m[(0, 0)])
    }
}

/// `1/(ε₂ - ε₁) = -Σ_k ε₂^k / ε₁^{k+1}` for `|ε₂| < |ε₁|`.
pub fn inverse_difference(win: Window) -> Laurent {
    let mut s = Laurent::zero(win, 1);
    for k in 0..=win.hi2.max(0) {
        s.set(-(k + 1), k, CMat::from_element(1, 1, C64::new(-1.0, 0.0)));
    }
    s
}

/// `1/(c - ε₁)` (or `ε₂`) as a Taylor series, `c ≠ 0`.
pub fn inverse_shift(win: Window, c: C64, second: bool) -> Laurent {
    let hi = if second { win.hi2 } else { win.hi1 };
    let terms: Vec<CMat> = (0..=hi.max(0))
        .map(|k| CMat::from_element(1, 1, C64::new(1.0, 0.0) / c.powu(k as u32 + 1)))
        .collect();
    Laurent::taylor(win, &terms, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn geometric_series_products() {
        let w = Window::univariate(-3, 6);
        // (1/(2-ε)) · (2-ε) = 1.
        let inv = inverse_shift(w, c(2.0, 0.0), false);
        let lin = Laurent::scalar(w, c(2.0, 0.0), 0, 0).add(&Laurent::scalar(w, c(-1.0, 0.0), 1, 0));
        let prod = inv.mul(&lin);
        assert!((prod.scalar_coeff(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        for k in 1..=5 {
            assert!(prod.scalar_coeff(k, 0).norm() < 1e-15);
        }
    }

    #[test]
    fn inverse_difference_matches_evaluation() {
        let w = Window { lo1: -12, hi1: 0, lo2: 0, hi2: 11 };
        let s = inverse_difference(w);
        let (e1, e2) = (c(0.3, 0.1), c(0.02, -0.01));
        let mut sum = c(0.0, 0.0);
        for p in w.lo1..=w.hi1 {
            for q in w.lo2..=w.hi2 {
                sum += s.scalar_coeff(p, q) * e1.powi(p) * e2.powi(q);
            }
        }
        assert!((sum - 1.0 / (e2 - e1)).norm() < 1e-12);
    }

    #[test]
    fn scalar_times_matrix() {
        let w = Window::univariate(-1, 1);
        let m = CMat::from_fn(2, 2, |i, j| c(i as f64, j as f64));
        let s = Laurent::scalar(w, c(0.0, 2.0), -1, 0);
        let p = s.mul(&Laurent::constant(w, m.clone()));
        assert_eq!(p.coeff(-1, 0), &m * c(0.0, 2.0));
        assert_eq!(p.trace().scalar_coeff(-1, 0), m.trace() * c(0.0, 2.0));
    }
}
