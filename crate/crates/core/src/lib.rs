//! Truncated and full contagion maps.
//!
//! A contagion map embeds the nodes of a network by running one Watts
//! threshold contagion per node (seeded at that node's neighbourhood) and
//! recording every node's activation time. Truncating each contagion after
//! `s` synchronous steps gives a cheaper map that often follows the
//! underlying manifold more faithfully.
//!
//! The crate is split by pipeline stage:
//!
//! - [`graph`]: networks, noisy ring lattices, kNN graphs, file formats.
//! - [`contagion`]: the threshold model, telemetry and map assembly.
//! - [`tda`]: Vietoris-Rips persistence in dimensions 0 and 1, ring stability.
//! - [`embed`]: PCA projection and cell-group separation.
//! - [`bench`]: scaling fits, bifurcation sweeps, truncation search.
//!
//! All randomness goes through [`Rng`], a seeded ChaCha8 stream, so every
//! generated network and subsample is reproducible across platforms.

pub mod bench;
pub mod contagion;
pub mod embed;
mod error;
mod fs;
pub mod graph;
mod matrix;
pub mod tda;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;

/// The random number generator used everywhere a seed is accepted.
///
/// ChaCha8 has a documented, platform-independent output stream, which keeps
/// seeded networks bit-identical across machines.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}

/// Crate version, echoed into output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `f` on a dedicated pool of `workers` threads (all logical cores when
/// `None` or zero). Results never depend on the worker count.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let workers = bench::resolve_workers(workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {workers} worker threads: {e}")))?;
    Ok(pool.install(f))
}
