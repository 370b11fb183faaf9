//! Data-parallel map helper with a sequential fallback.
//!
//! Built with the default `parallel` feature the work is distributed with
//! rayon; built with `--no-default-features` the same API runs
//! sequentially. `threads = 1` forces the sequential path even in parallel
//! builds, which is what the determinism tests exercise.

/// Number of worker threads requested through the environment, if any.
/// Reads `TGSPECTRA_THREADS`; `0` or an unset/invalid value means "library
/// default" (rayon's global pool in parallel builds, sequential otherwise).
pub fn default_threads() -> usize {
    std::env::var("TGSPECTRA_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

/// Maps `f` over `0..n`, returning results in index order.
///
/// `threads == 1` always runs sequentially. In parallel builds
/// `threads == 0` uses the global rayon pool and `threads > 1` a dedicated
/// pool of that size; sequential builds ignore the thread count.
pub fn map_indexed<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if threads == 0 {
            (0..n).into_par_iter().map(f).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("failed to build thread pool");
            pool.install(|| (0..n).into_par_iter().map(f).collect())
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_index_order() {
        let seq = map_indexed(1000, 1, |i| i * i);
        let par = map_indexed(1000, 0, |i| i * i);
        let par4 = map_indexed(1000, 4, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq, par4);
    }
}
