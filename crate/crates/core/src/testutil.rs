use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c, diag, zeros, CMat, C64};
use crate::system::{FuchsianSystem, SystemSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_c(r: &mut ChaCha8Rng) -> C64 {
    c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Random traceless matrix with entries in the unit square.
pub fn random_sl(n: usize, r: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::from_fn(n, n, |_, _| random_c(r));
    let t = m.trace() / (n as f64);
    for k in 0..n {
        m[(k, k)] -= t;
    }
    m
}

/// `z = {0, 1}`, `A₁ = diag(a, -a)`, `A₂ = -A₁`.
pub fn two_pole(a: f64) -> FuchsianSystem {
    let a1 = diag(&[c(a, 0.0), c(-a, 0.0)]);
    SystemSpec::new(2, vec![c(0.0, 0.0), c(1.0, 0.0)], vec![a1.clone(), -a1])
        .build()
        .unwrap()
}

/// Punctures on a perturbed circle, residues of size ~0.3 summing to zero.
pub fn random_system(n: usize, np: usize, r: &mut ChaCha8Rng) -> FuchsianSystem {
    loop {
        let punctures: Vec<C64> = (0..np)
            .map(|k| {
                let th = 2.0 * core::f64::consts::PI * (k as f64 + 0.3 * r.gen_range(-1.0..1.0)) / np as f64;
                c(th.cos(), th.sin()) * (1.0 + 0.2 * r.gen_range(-1.0..1.0))
            })
            .collect();
        let mut residues: Vec<CMat> = (0..np - 1).map(|_| random_sl(n, r) * c(0.3, 0.0)).collect();
        let mut last = zeros(n);
        for a in &residues {
            last -= a;
        }
        residues.push(last);
        if let Ok(sys) = SystemSpec::new(n, punctures, residues).build() {
            return sys;
        }
    }
}
