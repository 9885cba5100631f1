//! Execution strategy for the data-parallel loops.
//!
//! Work is always split into the same index-addressed pieces and merged in
//! index order, so a computation returns bit-identical results whether it
//! runs on the rayon pool or on the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of draws generated from one random stream. Fixed so that seeded
/// output does not depend on the thread count or the execution mode.
pub const STREAM_CHUNK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise behaves
    /// like `Sequential`.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map_indices<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Evaluates `f` on every item and returns the results in input order.
    pub fn map_slice<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Fills `out` chunk by chunk; `f` receives the chunk index and the chunk.
    pub fn fill_chunks<T, F>(self, out: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => out
                .par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c)),
            _ => out.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c)),
        }
    }
}

/// Splits `n` items into `STREAM_CHUNK`-sized pieces: `(chunk index, len)`.
pub(crate) fn stream_chunks(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(STREAM_CHUNK))
        .map(|i| (i, STREAM_CHUNK.min(n - i * STREAM_CHUNK)))
        .collect()
}
