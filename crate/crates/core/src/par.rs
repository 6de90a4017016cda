//! Data-parallel map with a sequential fallback.
//!
//! Every sweep in the crate (distribution grids, auxiliary-input families,
//! codebook samples) funnels through [`map_collect`]. With the `parallel`
//! feature enabled the map runs on rayon; without it, or inside
//! [`run_sequential`], it runs on the calling thread. Results are collected
//! in input order, so both paths produce identical output and reductions
//! built on top of them are order-independent by construction.

use std::sync::atomic::{AtomicUsize, Ordering};

static SEQUENTIAL_DEPTH: AtomicUsize = AtomicUsize::new(0);

/// True when a caller has requested sequential execution via
/// [`run_sequential`], or when the crate was built without `parallel`.
pub fn sequential_forced() -> bool {
    SEQUENTIAL_DEPTH.load(Ordering::Relaxed) > 0
}

/// Runs `f` with all [`map_collect`] calls on the current thread.
///
/// Used by the benchmark suite to compare the two execution paths and
/// useful when embedding the crate somewhere a thread pool is unwelcome.
pub fn run_sequential<R>(f: impl FnOnce() -> R) -> R {
    SEQUENTIAL_DEPTH.fetch_add(1, Ordering::Relaxed);
    let out = f();
    SEQUENTIAL_DEPTH.fetch_sub(1, Ordering::Relaxed);
    out
}

#[cfg(feature = "parallel")]
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if sequential_forced() {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Like [`map_collect`] over `0..count` without materializing the indices.
#[cfg(feature = "parallel")]
pub fn map_indices<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if sequential_forced() {
        (0..count).map(f).collect()
    } else {
        (0..count).into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<R, F>(count: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..count).map(f).collect()
}
