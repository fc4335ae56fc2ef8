//! Reproducible experiments on random monic integer polynomials.
//!
//! [`run_experiment`] samples polynomials under a coefficient model, applies a
//! detector and writes one CSV row per degree with a 99% Wilson interval and
//! the matching envelope values. [`verify`] re-checks the invariants of every
//! kernel in `polyirr-core`, [`census`] wraps exhaustive enumeration and
//! [`bounds_table`] tabulates the closed-form bounds.

pub mod bounds_table;
pub mod census;
pub mod config;
mod error;
pub mod experiment;
mod io;
pub mod stats;
pub mod verify;

pub use config::{Detector, ExperimentConfig, KRule, MRule};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, run_experiment_with, ExperimentResult, Row, RunOptions};
pub use io::atomic_write;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "POLYIRR_THREADS";

/// Requested worker count, capped by `POLYIRR_THREADS` when set.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    let base = requested.unwrap_or_else(rayon::current_num_threads).max(1);
    cap.map_or(base, |c| base.min(c))
}

/// Runs `f` inside a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
