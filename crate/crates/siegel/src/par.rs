//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) [`par_map`] fans out over a
//! rayon thread pool; without it the same call runs sequentially. Results
//! are order-preserving and byte-identical in both modes, so every public
//! interface behaves the same way regardless of the feature set.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Install a global thread pool with `n` workers. `0` keeps the default
/// (one worker per logical CPU). Without the `parallel` feature this is a
/// no-op. Calling it twice with nonzero `n` fails, as the pool is global.
pub fn configure_threads(n: usize) -> std::result::Result<(), String> {
    #[cfg(feature = "parallel")]
    {
        if n == 0 {
            return Ok(());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        Ok(())
    }
}

/// Order-preserving map over a slice, parallel when the feature allows.
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let ys = par_map(&xs, |&x| x * x);
        assert_eq!(ys, xs.iter().map(|&x| x * x).collect::<Vec<_>>());
    }
}
