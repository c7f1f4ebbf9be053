//! Compatibility layer for rayon/sequential execution.
//!
//! With the `parallel` feature (the default) this re-exports rayon's parallel
//! iterators. Without it, a sequential stand-in provides the same API surface
//! used by this crate (`into_par_iter().map(..).collect()`), so the rest of
//! the iterator chain resolves to the standard `Iterator` methods.
//!
//! All call sites map an index range to per-item results and collect into a
//! `Vec`, which preserves index order under rayon; reductions then run
//! sequentially over that `Vec`. Results are therefore identical whether the
//! work ran on one thread, many threads, or the sequential fallback.

#[cfg(feature = "parallel")]
pub use rayon::prelude::*;

#[cfg(not(feature = "parallel"))]
mod sequential {
    /// Sequential stand-in for `rayon::prelude::IntoParallelIterator`.
    pub trait IntoParallelIterator {
        type Iter;
        type Item;
        fn into_par_iter(self) -> Self::Iter;
    }

    impl<I: IntoIterator> IntoParallelIterator for I {
        type Iter = I::IntoIter;
        type Item = I::Item;
        fn into_par_iter(self) -> Self::Iter {
            self.into_iter()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub use sequential::*;

/// Runs `f` inside a pool of exactly `threads` workers (`None` = one worker
/// per available core, never consulting the environment). A no-op without the
/// `parallel` feature; results never depend on the pool size either way.
#[cfg(feature = "parallel")]
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let n = threads.filter(|n| *n > 0).unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|v| v.get())
            .unwrap_or(1)
    });
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool")
        .install(f)
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<T: Send>(_threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    f()
}

/// Maps `f` over `0..n` with a per-index seed derived from `master_seed`,
/// returning results in index order regardless of the execution backend.
pub fn replicate_map<T, F>(n: usize, master_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(|i| f(i, crate::rng::mix64(master_seed, i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::replicate_map;

    #[test]
    fn replicate_map_is_index_ordered() {
        let out = replicate_map(100, 7, |i, seed| (i, seed));
        for (i, (j, seed)) in out.iter().enumerate() {
            assert_eq!(i, *j);
            assert_eq!(*seed, crate::rng::mix64(7, i as u64));
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn replicate_map_is_schedule_independent() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                replicate_map(1000, 42, |i, seed| (i as f64).sqrt() + (seed % 97) as f64)
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
    }
}
