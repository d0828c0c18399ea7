//! Thread-pool executor for the Monte Carlo engine.
//!
//! Strata are fixed before any work is scheduled and the results come back
//! in stratum order, so the worker count never changes a value.

use rayon::prelude::*;
use rayon::ThreadPool;
use wavetrace_core::integrate::{Executor, StratumAcc};

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "WAVETRACE_THREADS";

pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
        Ok(Self { pool })
    }

    /// Honors `WAVETRACE_THREADS` as a cap on the available parallelism.
    pub fn from_env() -> Result<Self> {
        let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        let threads = match std::env::var(THREADS_ENV) {
            Ok(s) => {
                let cap: usize = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}")))?;
                if cap == 0 {
                    return Err(Error::Usage(format!("{THREADS_ENV} must be positive")));
                }
                cap.min(available)
            }
            Err(_) => available,
        };
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Parallel {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> StratumAcc + Sync)) -> Vec<StratumAcc> {
        self.pool.install(|| (0..jobs).into_par_iter().map(job).collect())
    }
}
