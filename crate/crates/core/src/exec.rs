//! Execution strategy for the data-parallel inner loops.
//!
//! Every parallel loop in the crate is an index-ordered map followed by an
//! ordered collect, so results are identical whichever strategy runs them.

/// How data-parallel loops are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses the rayon global pool. Falls back to [`Exec::Sequential`] when the
    /// crate is built without the `parallel` feature.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluates `f(i)` for `i in 0..n`, returning the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Like [`Exec::map`] over the items of a slice.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Like [`Exec::map`] but short-circuits on the first error in index order.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        // Materialize first so the reported error is the lowest failing index
        // in both modes.
        let results = self.map(n, f);
        results.into_iter().collect()
    }

    /// Fills `data`, viewed as consecutive rows of `width` elements, by calling
    /// `f(row_index, row)`. Returns the error of the lowest failing row.
    pub fn try_fill_rows<T, E, F>(self, data: &mut [T], width: usize, f: F) -> Result<(), E>
    where
        T: Send,
        E: Send,
        F: Fn(usize, &mut [T]) -> Result<(), E> + Sync + Send,
    {
        if width == 0 {
            return Ok(());
        }
        let outcomes: Vec<Result<(), E>> = match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                data.par_chunks_mut(width)
                    .enumerate()
                    .map(|(i, row)| f(i, row))
                    .collect()
            }
            _ => data
                .chunks_mut(width)
                .enumerate()
                .map(|(i, row)| f(i, row))
                .collect(),
        };
        outcomes.into_iter().collect()
    }
}
