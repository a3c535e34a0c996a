//! Replica-level parallelism.
//!
//! With the `parallel` feature (default) replicas are spread over the rayon
//! pool; without it they run in a plain loop. Output order always follows the
//! replica index, so results are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `f(0..count)` and collects the results in index order.
#[cfg(feature = "parallel")]
pub fn run_replicas<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_replicas<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    run_replicas_sequential(count, f)
}

/// Always sequential; kept public so benchmarks can compare both paths.
pub fn run_replicas_sequential<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let a = run_replicas(100, |i| i * i);
        let b = run_replicas_sequential(100, |i| i * i);
        assert_eq!(a, b);
    }
}
