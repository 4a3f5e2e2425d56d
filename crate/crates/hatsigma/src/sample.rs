//! Seeded generators for systems, elements and probe points.

use std::f64::consts::PI;

use hatsigma_core::linalg::{diag, zeros, CMat, C64};
use hatsigma_core::path::Segment;
use hatsigma_core::system::{FuchsianSystem, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(r: &mut Rand) -> C64 {
    C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Traceless matrix with entries in the unit square.
pub fn traceless(n: usize, r: &mut Rand) -> CMat {
    let mut m = CMat::from_fn(n, n, |_, _| complex(r));
    let t = m.trace() / n as f64;
    for k in 0..n {
        m[(k, k)] -= t;
    }
    m
}

/// `z = {0, 1}`, `A₁ = diag(a, -a)`, `A₂ = -A₁`.
pub fn two_pole(a: f64) -> FuchsianSystem {
    let a1 = diag(&[C64::new(a, 0.0), C64::new(-a, 0.0)]);
    SystemSpec::new(2, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], vec![a1.clone(), -a1])
        .build()
        .expect("two-pole system with 0 < a < 1/2 is valid")
}

/// Punctures near the unit circle and residues of size ~`scale` summing to
/// zero. Draws are repeated until the system validates.
pub fn random_system(n: usize, np: usize, scale: f64, r: &mut Rand) -> FuchsianSystem {
    loop {
        let punctures: Vec<C64> = (0..np)
            .map(|k| {
                let th = 2.0 * PI * (k as f64 + 0.3 * r.gen_range(-1.0..1.0)) / np as f64;
                C64::from_polar(1.0 + 0.2 * r.gen_range(-1.0..1.0), th)
            })
            .collect();
        let mut residues: Vec<CMat> = (0..np - 1).map(|_| traceless(n, r) * C64::new(scale, 0.0)).collect();
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

/// Probe point whose straight route from `from` keeps at least `margin`
/// (relative to the puncture spread) from every puncture.
pub fn probe_point(sys: &FuchsianSystem, from: C64, margin: f64, r: &mut Rand) -> C64 {
    let z = &sys.punctures;
    let centre = z.iter().sum::<C64>() / z.len() as f64;
    let spread = z.iter().map(|p| (p - centre).norm()).fold(0.0, f64::max).max(1e-3);
    loop {
        let x = centre + complex(r) * (1.5 * spread);
        let route = Segment::Line { a: from, b: x };
        if z.iter().all(|p| route.distance_to(*p) > margin * spread) {
            return x;
        }
    }
}
