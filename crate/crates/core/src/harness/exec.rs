//! Trial scheduling. With the `parallel` feature and more than one worker,
//! trials run on a dedicated rayon pool; otherwise they run in a plain loop.
//! Per-trial tallies are combined with exact integer arithmetic, so the
//! result does not depend on how trials were split across workers.

use crate::error::{Error, Result};

/// Per-trial outcome that can be merged associatively and commutatively.
pub trait Tally: Default + Send {
    fn merge(self, other: Self) -> Self;
}

pub struct Executor {
    threads: usize,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    /// `threads == 0` means all available cores.
    pub fn new(threads: usize) -> Result<Self> {
        let threads = match threads {
            0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
            t => t,
        };
        #[cfg(feature = "parallel")]
        let pool = if threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Self {
            threads,
            #[cfg(feature = "parallel")]
            pool,
        })
    }

    /// Worker count from `AMBC_THREADS` if set, else `requested`.
    pub fn from_env(requested: usize) -> Result<Self> {
        match std::env::var("AMBC_THREADS") {
            Ok(v) => {
                let t = v.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("AMBC_THREADS='{v}' is not a thread count"))
                })?;
                Self::new(t)
            }
            Err(_) => Self::new(requested),
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Runs `trial(i)` for `i in 0..trials` and merges the tallies.
    pub fn run<T, F>(&self, trials: u64, trial: F) -> Result<T>
    where
        T: Tally,
        F: Fn(u64) -> Result<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| {
                (0..trials)
                    .into_par_iter()
                    .map(&trial)
                    .try_reduce(T::default, |a, b| Ok(a.merge(b)))
            });
        }
        (0..trials).try_fold(T::default(), |acc, i| Ok(acc.merge(trial(i)?)))
    }
}
