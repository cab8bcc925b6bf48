use std::ops::Range;

/// Execution strategy for data-parallel loops.
///
/// `Parallel` uses rayon when the `parallel` feature is enabled and falls
/// back to sequential iteration otherwise. Every caller combines partial
/// results in index order, so the strategy never changes a result.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this strategy will actually run on the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over an index range, preserving order.
    pub fn map_range<R, F>(self, range: Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// Splits `0..len` into contiguous chunks of at most `chunk` indices.
    pub fn chunks(len: usize, chunk: usize) -> Vec<Range<usize>> {
        let chunk = chunk.max(1);
        (0..len.div_ceil(chunk))
            .map(|i| i * chunk..((i + 1) * chunk).min(len))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = Exec::Sequential.map(&xs, |x| x * x);
        let b = Exec::Parallel.map(&xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(
            Exec::Sequential.map_range(0..50, |i| i + 1),
            Exec::Parallel.map_range(0..50, |i| i + 1)
        );
    }

    #[test]
    fn chunks_cover_range() {
        let cs = Exec::chunks(10, 4);
        assert_eq!(cs, vec![0..4, 4..8, 8..10]);
        assert!(Exec::chunks(0, 4).is_empty());
    }
}
