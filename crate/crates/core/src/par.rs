//! Map-reduce over work items, parallel when the `parallel` feature is on.
//!
//! `merge` must be associative and commutative so results do not depend on
//! how the work is split.

#[cfg(feature = "parallel")]
pub(crate) fn map_reduce<T, R, M, F>(
    items: Vec<T>,
    threads: Option<usize>,
    identity: impl Fn() -> R + Sync + Send,
    map: M,
    merge: F,
) -> R
where
    T: Send,
    R: Send,
    M: Fn(T) -> R + Sync + Send,
    F: Fn(R, R) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let run = || items.into_par_iter().map(&map).reduce(&identity, &merge);
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_reduce<T, R, M, F>(
    items: Vec<T>,
    _threads: Option<usize>,
    identity: impl Fn() -> R,
    map: M,
    merge: F,
) -> R
where
    M: Fn(T) -> R,
    F: Fn(R, R) -> R,
{
    items.into_iter().map(map).fold(identity(), merge)
}
