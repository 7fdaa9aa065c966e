//! Config-driven experiments on top of `nls_core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod run;
pub mod selftest;

use std::path::Path;

use rayon::prelude::*;

pub use config::{ConfigError, ExperimentConfig};
pub use report::{emit_report, Report};
pub use run::{run_experiment, RunError, RunSummary};

/// Thread count from `--threads`, then `NLS_LAB_THREADS`, else rayon's default.
pub fn thread_count(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var("NLS_LAB_THREADS").ok()?.trim().parse().ok())
        .filter(|&n| n > 0)
}

/// Runs independent configs on a work pool of `threads` workers.
pub fn run_all(
    configs: &[ExperimentConfig],
    out_dir: &Path,
    threads: Option<usize>,
) -> Vec<Result<RunSummary, RunError>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().expect("thread pool");
    pool.install(|| configs.par_iter().map(|c| run_experiment(c, out_dir)).collect())
}
