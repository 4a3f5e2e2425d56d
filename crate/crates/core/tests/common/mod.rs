#![allow(dead_code)]

use hatsigma_core::linalg::{diag, zeros, CMat, C64};
use hatsigma_core::system::{FuchsianSystem, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_c(r: &mut ChaCha8Rng) -> C64 {
    c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn random_sl(n: usize, r: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::from_fn(n, n, |_, _| random_c(r));
    let t = m.trace() / n as f64;
    for k in 0..n {
        m[(k, k)] -= t;
    }
    m
}

pub fn random_gl(n: usize, r: &mut ChaCha8Rng) -> CMat {
    CMat::identity(n, n) + CMat::from_fn(n, n, |_, _| random_c(r) * 0.3)
}

pub fn two_pole(a: f64) -> FuchsianSystem {
    let a1 = diag(&[c(a, 0.0), c(-a, 0.0)]);
    SystemSpec::new(2, vec![c(0.0, 0.0), c(1.0, 0.0)], vec![a1.clone(), -a1]).build().unwrap()
}

pub fn random_system(n: usize, np: usize, r: &mut ChaCha8Rng) -> FuchsianSystem {
    loop {
        let punctures: Vec<C64> = (0..np)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.3 * r.gen_range(-1.0..1.0)) / np as f64;
                C64::from_polar(1.0 + 0.2 * r.gen_range(-1.0..1.0), th)
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

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}
