//! Batch evaluation over a fixed number of workers. Results are gathered by
//! index, so output order does not depend on the worker count.

use rayon::prelude::*;

use crate::error::{Failure, Outcome};

pub const WORKERS_ENV: &str = "HAGKIT_WORKERS";

/// The worker count from `HAGKIT_WORKERS`, else the available parallelism.
pub fn workers_from_env() -> Outcome<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::Usage(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// `f` applied to every item on `workers` threads; the first error by index
/// wins.
pub fn par_map<T, R, F>(items: &[T], workers: usize, f: F) -> Outcome<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Outcome<R> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start {workers} workers: {e}")))?;
    let results: Vec<Outcome<R>> = pool.install(|| items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect());
    results.into_iter().collect()
}
