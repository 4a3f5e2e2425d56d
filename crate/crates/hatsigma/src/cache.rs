//! Memoizing [`Transporter`].
//!
//! Keys are `(system fingerprint, path bits, tol bits)`, so one
//! [`TransportCache`] can be shared between transporters of different systems.
//! Concurrent readers never block each other; two threads missing on the same
//! key both integrate and the later insert wins, which is harmless because the
//! values are identical.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use hatsigma_core::linalg::{inverse, CMat, C64};
use hatsigma_core::path::{LoopLayout, Path, Segment};
use hatsigma_core::system::FuchsianSystem;
use hatsigma_core::transport::{transport, Transporter};
use hatsigma_core::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    system: u64,
    tol: u64,
    path: Vec<u64>,
}

fn push_c(out: &mut Vec<u64>, z: C64) {
    out.push(z.re.to_bits());
    out.push(z.im.to_bits());
}

fn path_bits(p: &Path) -> Vec<u64> {
    let mut out = Vec::with_capacity(2 + 6 * p.segments.len());
    push_c(&mut out, p.start);
    for s in &p.segments {
        match *s {
            Segment::Line { a, b } => {
                out.push(0);
                push_c(&mut out, a);
                push_c(&mut out, b);
            }
            Segment::Arc { center, radius, theta0, sweep } => {
                out.push(1);
                push_c(&mut out, center);
                out.extend([radius.to_bits(), theta0.to_bits(), sweep.to_bits()]);
            }
        }
    }
    out
}

/// Hash of everything that determines transports of `sys`.
pub fn fingerprint(sys: &FuchsianSystem) -> u64 {
    let mut h = DefaultHasher::new();
    sys.n().hash(&mut h);
    let mut bits = Vec::new();
    for z in &sys.punctures {
        push_c(&mut bits, *z);
    }
    for a in &sys.residues {
        for z in a.iter() {
            push_c(&mut bits, *z);
        }
    }
    bits.push(sys.clearance.to_bits());
    if let Some(b) = sys.basepoint {
        push_c(&mut bits, b);
    }
    bits.hash(&mut h);
    h.finish()
}

/// Shared transport store with hit/miss counters.
#[derive(Debug, Default)]
pub struct TransportCache {
    map: RwLock<HashMap<Key, CMat>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl TransportCache {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    fn get(&self, key: &Key) -> Option<CMat> {
        // A poisoned lock only means another thread panicked mid-insert of an
        // immutable value; the map itself is still valid.
        let map = self.map.read().unwrap_or_else(|e| e.into_inner());
        let v = map.get(key).cloned();
        if v.is_some() {
            self.hits.fetch_add(1, Ordering::Relaxed);
        }
        v
    }

    fn insert(&self, key: Key, value: CMat) {
        self.misses.fetch_add(1, Ordering::Relaxed);
        self.map.write().unwrap_or_else(|e| e.into_inner()).insert(key, value);
    }
}

/// Transporter backed by a [`TransportCache`]. Generator monodromies are
/// computed once at construction.
#[derive(Debug, Clone)]
pub struct Cached {
    sys: FuchsianSystem,
    layout: LoopLayout,
    tol: f64,
    id: u64,
    cache: Arc<TransportCache>,
    generators: Vec<CMat>,
    inverses: Vec<CMat>,
}

impl Cached {
    pub fn new(sys: FuchsianSystem, tol: f64) -> Result<Self> {
        Self::with_cache(sys, tol, TransportCache::new())
    }

    pub fn with_cache(sys: FuchsianSystem, tol: f64, cache: Arc<TransportCache>) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidArgument(format!("transport tolerance must be positive, got {tol}")));
        }
        let layout = LoopLayout::new(&sys)?;
        let mut this = Self {
            id: fingerprint(&sys),
            sys,
            layout,
            tol,
            cache,
            generators: Vec::new(),
            inverses: Vec::new(),
        };
        for j in 0..this.sys.num_punctures() {
            let s = this.transport(&this.layout.generator(&this.sys, j))?;
            this.inverses.push(inverse(&s)?);
            this.generators.push(s);
        }
        Ok(this)
    }

    pub fn cache(&self) -> &Arc<TransportCache> {
        &self.cache
    }
}

impl Transporter for Cached {
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
        let key = Key { system: self.id, tol: self.tol.to_bits(), path: path_bits(path) };
        if let Some(m) = self.cache.get(&key) {
            return Ok(m);
        }
        let m = transport(&self.sys, path, self.tol)?.matrix;
        self.cache.insert(key, m.clone());
        Ok(m)
    }

    fn generator(&self, j: usize) -> Result<CMat> {
        self.generators.get(j).cloned().ok_or(Error::InvalidArgument(format!("no generator {j}")))
    }

    fn generator_inverse(&self, j: usize) -> Result<CMat> {
        self.inverses.get(j).cloned().ok_or(Error::InvalidArgument(format!("no generator {j}")))
    }
}
