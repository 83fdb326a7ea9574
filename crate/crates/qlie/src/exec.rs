//! Batch execution helpers.
//!
//! Sweeps and trial batches in this crate are lists of independent pure
//! computations. [`map`] runs such a batch on the rayon thread pool when the
//! `parallel` feature (default) is enabled and falls back to [`map_seq`]
//! otherwise. Both are exposed so the two paths can be compared directly,
//! e.g. by the criterion benches.

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
/// Output order matches input order either way.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
/// Output order matches input order either way.
#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    map_seq(items, f)
}

/// Sequential twin of [`map`]; always available.
pub fn map_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
