use hatsigma::cache::{fingerprint, Cached, TransportCache};
use hatsigma::sample::{random_system, rng};
use hatsigma_core::linalg::{norm, C64};
use hatsigma_core::path::Path;
use hatsigma_core::transport::{Direct, Transporter};
use rayon::prelude::*;

#[test]
fn cached_transports_equal_direct_ones() {
    let sys = random_system(2, 3, 0.3, &mut rng(11));
    let direct = Direct::new(sys.clone(), 1e-11).unwrap();
    let cached = Cached::new(sys, 1e-11).unwrap();
    assert_eq!(direct.layout(), cached.layout());
    for j in 0..3 {
        assert_eq!(direct.generator(j).unwrap(), cached.generator(j).unwrap());
    }
    let x0 = cached.layout().basepoint;
    let p = Path::new(x0).line_to(x0 + C64::new(0.2, 0.1));
    assert_eq!(direct.transport(&p).unwrap(), cached.transport(&p).unwrap());
    let misses = cached.cache().misses();
    assert_eq!(direct.transport(&p).unwrap(), cached.transport(&p).unwrap());
    assert_eq!(cached.cache().misses(), misses);
    assert!(cached.cache().hits() >= 1);
}

#[test]
fn shared_cache_separates_systems_and_tolerances() {
    let cache = TransportCache::new();
    let a = random_system(2, 3, 0.3, &mut rng(12));
    let b = random_system(2, 3, 0.3, &mut rng(13));
    assert_ne!(fingerprint(&a), fingerprint(&b));
    let ta = Cached::with_cache(a.clone(), 1e-11, cache.clone()).unwrap();
    let tb = Cached::with_cache(b, 1e-11, cache.clone()).unwrap();
    let tc = Cached::with_cache(a, 1e-9, cache.clone()).unwrap();
    assert_eq!(cache.len(), 9);
    let x0 = ta.layout().basepoint;
    let p = Path::new(x0).line_to(x0 + C64::new(0.1, 0.1));
    let (ma, mb, mc) = (ta.transport(&p).unwrap(), tb.transport(&p).unwrap(), tc.transport(&p).unwrap());
    assert!(norm(&(&ma - &mb)) > 1e-6);
    assert!(norm(&(&ma - &mc)) < 1e-8);
    assert_eq!(cache.len(), 12);
}

#[test]
fn concurrent_readers_agree() {
    let tr = Cached::new(random_system(3, 3, 0.3, &mut rng(14)), 1e-10).unwrap();
    let x0 = tr.layout().basepoint;
    let paths: Vec<Path> = (0..8).map(|k| Path::new(x0).line_to(x0 + C64::from_polar(0.15, k as f64))).collect();
    let first: Vec<_> = paths.par_iter().map(|p| tr.transport(p).unwrap()).collect();
    let again: Vec<_> = (0..64).into_par_iter().map(|k| tr.transport(&paths[k % 8]).unwrap()).collect();
    for (k, m) in again.iter().enumerate() {
        assert_eq!(m, &first[k % 8]);
    }
    assert!(tr.cache().hits() >= 64);
}
