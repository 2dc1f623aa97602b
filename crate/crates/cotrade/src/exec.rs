//! Execution-policy switch between the rayon data-parallel path and the
//! sequential fallback.
//!
//! Every parallel stage maps a function over independent work units and
//! reassembles results in input order, so the two policies produce
//! bit-identical output. Without the `parallel` feature the rayon path is
//! compiled out and `Exec::Parallel` degrades to sequential execution.

/// How data-parallel stages run their inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    /// Plain single-threaded iteration.
    Sequential,
    /// rayon work-stealing iteration (requires the `parallel` feature).
    #[default]
    Parallel,
}

/// Maps `f` over `items`, preserving input order in the output.
#[cfg(feature = "parallel")]
pub(crate) fn map_ordered<T, U, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Exec::Sequential => items.into_iter().map(f).collect(),
        Exec::Parallel => items.into_par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_ordered<T, U, F>(_exec: Exec, items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_and_preserve_order() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_ordered(Exec::Sequential, items.clone(), |x| x * x);
        let par = map_ordered(Exec::Parallel, items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[10], 100);
    }
}
