//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the map runs on rayon; otherwise, or when
//! [`Parallelism::Sequential`] is requested, it is a plain iterator. Results
//! are always returned in input order so reductions stay deterministic.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Auto,
    Sequential,
    Threads(usize),
}

pub fn map<T, R, F>(items: &[T], mode: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match mode {
            Parallelism::Sequential => {}
            Parallelism::Auto => return items.par_iter().map(&f).collect(),
            Parallelism::Threads(n) => {
                if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
                    return pool.install(|| items.par_iter().map(&f).collect());
                }
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = mode;
    items.iter().map(f).collect()
}

pub fn is_parallel_build() -> bool {
    cfg!(feature = "parallel")
}
