//! Data-parallel execution of independent runs.
//!
//! With the `parallel` feature the work is spread over a rayon pool;
//! without it, or with a thread cap of 1, items run one after another.
//! Results always come back in input order.

/// Environment variable capping the number of concurrent runs.
pub const THREADS_ENV: &str = "FULLBODY_THREADS";

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n: &usize| n > 0)
}

/// Applies `f` to every item sequentially.
pub fn map_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Applies `f` to every item, concurrently on at most `threads` workers
/// (all available cores when `None`).
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    match threads {
        Some(1) => map_seq(items, f),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => map_seq(items, f),
        },
        None => items.par_iter().map(f).collect(),
    }
}

/// Applies `f` to every item sequentially; the `parallel` feature is off.
#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], _threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_seq(items, f)
}
