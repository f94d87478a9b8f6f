//! Deterministic data-parallel helpers.
//!
//! Sums are split into fixed-size chunks independent of the thread count,
//! each chunk is accumulated in order, and chunk totals are combined in chunk
//! order. Sequential and parallel execution therefore produce bit-identical
//! results. Without the `parallel` feature every mode runs sequentially.

use crate::accum::NeumaierSum;

/// Number of summands per chunk.
pub const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually fans out (false when built without `parallel`).
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Compensated sum of `term(i)` for `i` in `0..n`.
pub fn chunked_sum<F>(n: usize, exec: Execution, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunk_total = |c: usize| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        let mut acc = NeumaierSum::new();
        for i in lo..hi {
            acc.add(term(i));
        }
        acc.value()
    };
    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = map_indices(n_chunks, exec, chunk_total);
    let mut acc = NeumaierSum::new();
    for p in partials {
        acc.add(p);
    }
    acc.value()
}

/// `f(i)` for `i` in `0..n`, results in index order.
pub fn map_indices<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(&f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}
