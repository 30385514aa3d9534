//! Ordered data-parallel map.
//!
//! With the `parallel` feature the work runs on rayon; without it everything
//! runs on the calling thread. Either way the output vector is in index
//! order, so any reduction performed over it afterwards is deterministic.

/// Thread budget for a parallel region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    /// Run on the calling thread.
    Sequential,
    /// A dedicated pool of exactly this many threads.
    Fixed(usize),
    /// Whatever the global rayon pool provides.
    #[default]
    Global,
}

impl Workers {
    pub fn from_count(count: usize) -> Self {
        if count <= 1 {
            Workers::Sequential
        } else {
            Workers::Fixed(count)
        }
    }
}

/// Evaluate `f(0..n)` and return the results in index order.
pub fn ordered_map<T, F>(n: usize, workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    imp::ordered_map(n, workers, f)
}

/// Whether this build can actually run work on more than one thread.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(feature = "parallel")]
mod imp {
    use super::Workers;
    use rayon::prelude::*;

    pub fn ordered_map<T, F>(n: usize, workers: Workers, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match workers {
            Workers::Sequential => (0..n).map(f).collect(),
            Workers::Global => (0..n).into_par_iter().map(f).collect(),
            Workers::Fixed(threads) => {
                match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                    Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                    // Pool creation only fails on resource exhaustion; the result
                    // does not depend on the thread count, so fall back.
                    Err(_) => (0..n).map(f).collect(),
                }
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    use super::Workers;

    pub fn ordered_map<T, F>(n: usize, _workers: Workers, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order_for_any_budget() {
        for workers in [
            Workers::Sequential,
            Workers::Fixed(3),
            Workers::Global,
            Workers::from_count(1),
        ] {
            let out = ordered_map(1000, workers, |i| i * i);
            assert!(out.iter().enumerate().all(|(i, &v)| v == i * i));
        }
        assert!(ordered_map(0, Workers::Global, |i| i).is_empty());
    }
}
