//! Batch driver for the `pdelum` illumination-correction library.
//!
//! Each subcommand takes a validated [`RunConfig`], processes its inputs in
//! parallel, and writes results under `config.out`. Output bytes do not
//! depend on the number of worker threads.

pub mod bench;
pub mod config;
pub mod plot;
mod run;

pub use config::{Baseline, InputSource, RunConfig};
pub use run::{compare, enhance, quantize, BatchOutcome, ImageOutcome};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "PDELUM_THREADS";

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    Ok(pool.install(f))
}
