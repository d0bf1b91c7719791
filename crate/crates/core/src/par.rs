//! Deterministic fan-out helpers. Work is split into independent pieces,
//! results are collected in index order and merged sequentially, so the
//! output never depends on the number of workers.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(i)` for `i in 0..n` and folds the results left to right.
pub(crate) fn map_reduce<T, F, I, M>(n: usize, f: F, identity: I, merge: M) -> T
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
    I: Fn() -> T,
    M: Fn(T, T) -> T,
{
    #[cfg(feature = "parallel")]
    let parts: Vec<T> = (0..n).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<T> = (0..n).map(f).collect();
    parts.into_iter().fold(identity(), merge)
}

/// Splits `0..len` into fixed-size chunks, maps each chunk, and
/// concatenates the per-chunk outputs in chunk order.
pub(crate) fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> Vec<T> + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let run = |c: usize| f(c * chunk..((c + 1) * chunk).min(len));
    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<T>> = (0..n_chunks).into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<T>> = (0..n_chunks).map(run).collect();
    parts.into_iter().flatten().collect()
}

/// Maps every element of `items`, preserving order.
pub(crate) fn map_vec<A, T, F>(items: &[A], f: F) -> Vec<T>
where
    A: Sync,
    T: Send,
    F: Fn(&A) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}
