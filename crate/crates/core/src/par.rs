//! Row-level data parallelism.
//!
//! With the `parallel` feature the helpers fan rows out over the current
//! rayon pool; without it they run the same closures in order. Each row is
//! computed from read-only inputs only, so results never depend on the
//! thread count.

use crate::error::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `f(y, row)` over every `width`-wide row of `data`.
pub(crate) fn for_each_row<T, F>(data: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(width).enumerate().for_each(|(y, row)| f(y, row));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(width).enumerate().for_each(|(y, row)| f(y, row));
}

/// Fallible variant of [`for_each_row`] over two equally tall outputs.
pub(crate) fn try_for_each_row_pair<T, F>(
    a: &mut [T],
    a_width: usize,
    b: &mut [T],
    b_width: usize,
    f: F,
) -> Result<()>
where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T]) -> Result<()> + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        a.par_chunks_mut(a_width)
            .zip(b.par_chunks_mut(b_width))
            .enumerate()
            .try_for_each(|(y, (ra, rb))| f(y, ra, rb))
    }
    #[cfg(not(feature = "parallel"))]
    {
        a.chunks_mut(a_width)
            .zip(b.chunks_mut(b_width))
            .enumerate()
            .try_for_each(|(y, (ra, rb))| f(y, ra, rb))
    }
}

/// Fallible variant of [`for_each_row`].
pub(crate) fn try_for_each_row<T, F>(data: &mut [T], width: usize, f: F) -> Result<()>
where
    T: Send,
    F: Fn(usize, &mut [T]) -> Result<()> + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(width)
            .enumerate()
            .try_for_each(|(y, row)| f(y, row))
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(width)
            .enumerate()
            .try_for_each(|(y, row)| f(y, row))
    }
}

/// Maps `f` over `items`, preserving order.
pub(crate) fn map_collect<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Runs `f` with at most `jobs` worker threads. `jobs == 0` means "use the
/// global pool". Without the `parallel` feature `f` simply runs inline.
pub fn with_parallelism<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        if jobs == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        f()
    }
}

/// Whether this build fans work out over threads at all.
pub const PARALLEL: bool = cfg!(feature = "parallel");
