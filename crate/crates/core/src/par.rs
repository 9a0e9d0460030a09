//! Deterministic parallel maps over grid points.

use crate::error::Result;
use crate::grid::GridSpec;
use crate::scalar::Real;
use rayon::prelude::*;

/// Evaluates `f(index, coords)` at every grid point. Output order is the grid order and
/// does not depend on the thread count; the first error by index wins.
pub(crate) fn map_points<T, F>(grid: &GridSpec<T>, f: F) -> Result<Vec<T>>
where
    T: Real,
    F: Fn(usize, &[T]) -> Result<T> + Sync,
{
    map_indices(grid, (0..grid.len()).collect(), f)
}

pub(crate) fn map_indices<T, F>(grid: &GridSpec<T>, indices: Vec<usize>, f: F) -> Result<Vec<T>>
where
    T: Real,
    F: Fn(usize, &[T]) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = indices
        .into_par_iter()
        .map(|i| {
            let mut x = [T::zero(); 3];
            grid.coords_into(i, &mut x);
            f(i, &x[..grid.dim()])
        })
        .collect();
    results.into_iter().collect()
}
