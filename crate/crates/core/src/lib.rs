//! Numerical core for `sl_N`-valued Fuchsian systems.
//!
//! The crate is `no_std` (with `alloc`): everything here is a pure function of
//! immutable inputs. File formats, caching and the command line live in the
//! `hatsigma` companion crate.
//!
//! Layout:
//! - [`lie`]: basis of `sl_N`, Killing form, root decompositions, Casimir tensors.
//! - [`system`]: the connection `A(x) = Σ A_j/(x-z_j)` and its validation.
//! - [`path`], [`ode`], [`transport`], [`local`]: parallel transport, monodromy
//!   and local frames at the punctures.
//! - [`amplitude`]: connected/disconnected amplitudes and Casimir amplitudes.
//! - [`cycles`], [`malgrange`]: chains of arcs, boundaries, intersections and
//!   periods of `W_1`.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod amplitude;
pub mod asymptotics;
pub mod cycles;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod lie;
pub mod linalg;
pub mod local;
pub mod malgrange;
pub mod ode;
pub mod path;
pub mod quad;
pub mod series;
pub mod system;
pub mod transport;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
