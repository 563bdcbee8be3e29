//! Replication scheduling.
//!
//! Results always come back in index order, so any reduction over them is
//! independent of how the work was scheduled.

/// How independent replications are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Data-parallel over replications; `threads: None` uses the global
    /// pool. Falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
    ParallelWith { threads: usize },
    Sequential,
}

impl Execution {
    /// Reads a thread cap from `TRADE_LAB_THREADS`; `1` means sequential.
    pub fn from_env() -> Self {
        match std::env::var("TRADE_LAB_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            Some(0) | None => Execution::Parallel,
            Some(1) => Execution::Sequential,
            Some(n) => Execution::ParallelWith { threads: n },
        }
    }
}

/// `(0..n).map(f)` under the given execution policy.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match exec {
            Execution::Sequential => {}
            Execution::Parallel => return (0..n).into_par_iter().map(&f).collect(),
            Execution::ParallelWith { threads } => {
                if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                    return pool.install(|| (0..n).into_par_iter().map(&f).collect());
                }
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = exec;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        for exec in [Execution::Sequential, Execution::Parallel, Execution::ParallelWith { threads: 3 }] {
            assert_eq!(map_indexed(100, exec, |i| i * i), (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
    }
}
