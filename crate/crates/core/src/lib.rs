//! Haar-wavelet graph convolution and pooling.
//!
//! The crate is `no_std` (it needs `alloc`) and carries every numerical piece
//! of the pipeline:
//!
//! * [`graph`]: graphs, datasets and deterministic 80/10/10 splits.
//! * [`chain`]: coarse-grained chains built by spectral clustering (or
//!   heavy-edge matching for large graphs).
//! * [`basis`]: sparse orthonormal Haar bases along a chain, with padding.
//! * [`transform`]: adjoint, forward and compressive Haar transforms, each
//!   with a matrix route and a chain-aggregation route.
//! * [`nn`]: a small reverse-mode autodiff tape, HaarConv / HaarPool layers,
//!   the HaarNet model, Adam and the early-stopping training loop.
//! * [`pointgen`]: PPP, RSA and hard-disk point patterns turned into graphs.
//! * [`synth`]: random and structured test graphs.
//!
//! File formats, the CLI and anything touching the OS live in the `haarnet`
//! companion crate.
#![no_std]

extern crate alloc;

pub mod basis;
pub mod chain;
pub mod cluster;
pub mod dense;
pub mod eigen;
mod error;
pub mod graph;
pub mod nn;
pub mod pointgen;
pub mod sparse;
pub mod synth;
pub mod transform;

pub use error::{Error, Result};

use rand::SeedableRng;

/// The generator used everywhere a seed appears.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Build the crate's deterministic generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
