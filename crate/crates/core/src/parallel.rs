//! How independent work items (sweep configurations) are scheduled.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    /// A dedicated rayon pool with `workers` threads.
    #[cfg(feature = "parallel")]
    Parallel { workers: usize },
}

impl Execution {
    /// `Parallel` when the feature is enabled and `workers > 1`.
    pub fn with_workers(workers: usize) -> Self {
        #[cfg(feature = "parallel")]
        if workers > 1 {
            return Execution::Parallel { workers };
        }
        let _ = workers;
        Execution::Sequential
    }

    pub fn workers(self) -> usize {
        match self {
            Execution::Sequential => 1,
            #[cfg(feature = "parallel")]
            Execution::Parallel { workers } => workers,
        }
    }

    /// Applies `f` to every item and returns the results in input order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel { workers } => {
                use rayon::prelude::*;
                pool(workers).install(|| items.par_iter().map(f).collect())
            }
        }
    }

    /// Runs `f` on every item; stops early once `f` returns `false`.
    /// Items may be visited in any order.
    pub fn for_each_while<T, F>(self, items: &[T], f: F)
    where
        T: Sync,
        F: Fn(&T) -> bool + Sync + Send,
    {
        match self {
            Execution::Sequential => {
                for item in items {
                    if !f(item) {
                        break;
                    }
                }
            }
            #[cfg(feature = "parallel")]
            Execution::Parallel { workers } => {
                use rayon::prelude::*;
                pool(workers).install(|| {
                    // `any` short-circuits on the first failure.
                    items.par_iter().any(|item| !f(item));
                })
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .thread_name(|i| format!("sweep-{i}"))
        .build()
        .expect("thread pool")
}

impl fmt::Display for Execution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Execution::Sequential => f.write_str("sequential"),
            #[cfg(feature = "parallel")]
            Execution::Parallel { workers } => write!(f, "parallel({workers})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn map_keeps_order() {
        let items: Vec<u32> = (0..100).collect();
        let seq = Execution::Sequential.map(&items, |x| x * 2);
        assert_eq!(seq, Execution::with_workers(4).map(&items, |x| x * 2));
        assert_eq!(seq[99], 198);
    }

    #[test]
    fn for_each_while_stops() {
        let items: Vec<u32> = (0..10).collect();
        let seen = AtomicUsize::new(0);
        Execution::Sequential.for_each_while(&items, |&x| {
            seen.fetch_add(1, Ordering::SeqCst);
            x < 3
        });
        assert_eq!(seen.load(Ordering::SeqCst), 4);
    }

    #[test]
    fn worker_count() {
        assert_eq!(Execution::with_workers(1), Execution::Sequential);
        assert_eq!(Execution::with_workers(0).workers(), 1);
    }
}
