//! Linear least-squares fits of rational functions with prescribed poles.

use alloc::vec::Vec;

use crate::linalg::{lstsq, CMat, C64};
use crate::{Error, Result};

/// A pole location with its maximal order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub at: C64,
    pub order: usize,
}

/// `f(x) = c + Σ_p Σ_{k=1..order} a_{p,k} / (x - p)^k`.
#[derive(Debug, Clone)]
pub struct RationalFit {
    pub poles: Vec<Pole>,
    pub constant: C64,
    /// `coeffs[p][k-1]` multiplies `(x - p)^{-k}`.
    pub coeffs: Vec<Vec<C64>>,
    /// `‖f(x_i) - v_i‖₂ / ‖v‖₂`.
    pub residual: f64,
}

impl RationalFit {
    pub fn eval(&self, x: C64) -> C64 {
        let mut v = self.constant;
        for (p, cs) in self.poles.iter().zip(&self.coeffs) {
            let w = C64::new(1.0, 0.0) / (x - p.at);
            let mut wk = w;
            for c in cs {
                v += c * wk;
                wk *= w;
            }
        }
        v
    }
}

fn basis(x: C64, poles: &[Pole], row: &mut Vec<C64>) {
    row.clear();
    row.push(C64::new(1.0, 0.0));
    for p in poles {
        let w = C64::new(1.0, 0.0) / (x - p.at);
        let mut wk = w;
        for _ in 0..p.order {
            row.push(wk);
            wk *= w;
        }
    }
}

/// Fits `values` at `points`; columns are normalized before solving.
pub fn fit_rational(points: &[C64], values: &[C64], poles: &[Pole]) -> Result<RationalFit> {
    let unknowns = 1 + poles.iter().map(|p| p.order).sum::<usize>();
    if points.len() != values.len() || points.len() < unknowns {
        return Err(Error::InvalidArgument(alloc::format!(
            "{} samples for {} unknowns",
            points.len(),
            unknowns
        )));
    }
    let m = points.len();
    let mut a = CMat::zeros(m, unknowns);
    let mut row = Vec::with_capacity(unknowns);
    for (i, &x) in points.iter().enumerate() {
        basis(x, poles, &mut row);
        for (k, v) in row.iter().enumerate() {
            a[(i, k)] = *v;
        }
    }
    let scales: Vec<f64> = (0..unknowns).map(|k| a.column(k).norm().max(1e-300)).collect();
    for (k, s) in scales.iter().enumerate() {
        a.column_mut(k).unscale_mut(*s);
    }
    let b = CMat::from_column_slice(m, 1, values);
    let sol = lstsq(&a, &b, 1e-15)?;
    let fitted = &a * &sol;
    let bn = b.norm();
    let residual = if bn == 0.0 { (fitted - &b).norm() } else { (fitted - &b).norm() / bn };
    let c: Vec<C64> = (0..unknowns).map(|k| sol[(k, 0)] / scales[k]).collect();
    let mut coeffs = Vec::new();
    let mut at = 1;
    for p in poles {
        coeffs.push(c[at..at + p.order].to_vec());
        at += p.order;
    }
    Ok(RationalFit { poles: poles.to_vec(), constant: c[0], coeffs, residual })
}
