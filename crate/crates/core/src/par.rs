//! Execution strategy for the data-parallel kernels.
//!
//! With the `parallel` feature disabled every strategy runs sequentially, so
//! callers never need their own `cfg` switches.

/// How a kernel distributes its independent work items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    Sequential,
    Parallel,
    /// Parallel once the work exceeds [`AUTO_THRESHOLD`] items, otherwise sequential.
    #[default]
    Auto,
}

/// Work size (rows × columns, simplices, sample points...) at which `Auto` goes parallel.
pub const AUTO_THRESHOLD: usize = 2048;

impl Strategy {
    /// Whether a workload of `work` units runs on the rayon pool.
    pub fn is_parallel(self, work: usize) -> bool {
        if !cfg!(feature = "parallel") {
            return false;
        }
        match self {
            Strategy::Sequential => false,
            Strategy::Parallel => true,
            Strategy::Auto => work >= AUTO_THRESHOLD,
        }
    }
}

/// Map `f` over `items`, in parallel when `strategy` says so.
pub fn map<T, U, F>(strategy: Strategy, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel(items.len()) {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

/// Apply `f` to every `chunk`-sized slice of `data` (with its index), in parallel when asked.
pub fn for_each_chunk_mut<T, F>(strategy: Strategy, work: usize, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if chunk == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if strategy.is_parallel(work) {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = (strategy, work);
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_never_parallel() {
        assert!(!Strategy::Sequential.is_parallel(usize::MAX));
        assert!(!Strategy::Auto.is_parallel(1));
    }

    #[test]
    fn map_preserves_order() {
        let items: Vec<u32> = (0..5000).collect();
        let seq = map(Strategy::Sequential, &items, |x| x * 3);
        let par = map(Strategy::Parallel, &items, |x| x * 3);
        assert_eq!(seq, par);
    }
}
