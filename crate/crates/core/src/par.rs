//! Row-parallel helpers. Every caller computes each output slot from
//! immutable inputs only, so results do not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
