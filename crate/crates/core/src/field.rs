use crate::error::{LabError, Result};
use crate::grid::GridSpec;
use crate::params::PdeParams;
use crate::scalar::Real;

/// Scalar samples on a grid at one time slice, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: GridSpec<T>,
    t: T,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    /// Fails if the length does not match the grid or any entry is NaN/Inf.
    pub fn new(grid: GridSpec<T>, t: T, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::invalid(format!(
                "field has {} values but the grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::Domain {
                message: format!("non-finite field value {}", values[i]),
                point: Some(grid.coords(i).into_iter().map(Real::as_f64).collect()),
            });
        }
        Ok(Self { grid, t, values })
    }

    pub fn zeros(grid: GridSpec<T>, t: T) -> Self {
        let n = grid.len();
        Self {
            grid,
            t,
            values: vec![T::zero(); n],
        }
    }

    /// Samples `f` at every grid point; the first failure (in index order) is returned
    /// with its coordinates attached.
    pub fn sample<F>(grid: GridSpec<T>, t: T, f: F) -> Result<Self>
    where
        F: Fn(&[T]) -> Result<T> + Sync,
    {
        let values = crate::par::map_points(&grid, |_, x| f(x).map_err(|e| e.at(to_f64(x))))?;
        Self::new(grid, t, values)
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.grid.clone(), self.t, self.values.iter().map(|&v| c * v).collect())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Max |self - other| over all points. Grids must match.
    pub fn linf_distance(&self, other: &Self) -> Result<T> {
        if !self.grid.same_points(&other.grid) {
            return Err(LabError::invalid("fields live on different grids"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }
}

pub(crate) fn to_f64<T: Real>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.as_f64()).collect()
}

/// Grid-weighted L2 norm `sqrt(sum v^2 * h^dim)` and max norm over the points at least
/// `interior_margin` nodes from every face.
pub fn norms<T: Real>(field: &Field<T>, interior_margin: usize) -> Result<(T, T)> {
    let grid = field.grid();
    if grid.points_per_axis() < 2 * interior_margin + 2 {
        return Err(LabError::domain(format!(
            "interior margin {interior_margin} leaves fewer than 2 points per axis on a {}-point axis",
            grid.points_per_axis()
        )));
    }
    let mut sum_sq = T::zero();
    let mut linf = T::zero();
    for (i, &v) in field.values().iter().enumerate() {
        if grid.is_interior(i, interior_margin) {
            sum_sq = sum_sq + v * v;
            linf = linf.max(v.abs());
        }
    }
    Ok(((sum_sq * grid.cell_volume()).sqrt(), linf))
}

/// Residual field of one candidate under the full operator, with its norms.
#[derive(Debug, Clone)]
pub struct ResidualReport<T> {
    pub params: PdeParams<T>,
    pub candidate: String,
    pub residual: Field<T>,
    pub l2: T,
    pub linf: T,
    pub interior_margin: usize,
}

impl<T: Real> ResidualReport<T> {
    pub fn new(
        params: PdeParams<T>,
        candidate: String,
        residual: Field<T>,
        interior_margin: usize,
    ) -> Result<Self> {
        let (l2, linf) = norms(&residual, interior_margin)?;
        Ok(Self {
            params,
            candidate,
            residual,
            l2,
            linf,
            interior_margin,
        })
    }

    /// `(coordinates, residual)` for every interior point, in row-major order.
    pub fn interior_rows(&self) -> Vec<(Vec<T>, T)> {
        let grid = self.residual.grid();
        (0..grid.len())
            .filter(|&i| grid.is_interior(i, self.interior_margin))
            .map(|i| (grid.coords(i), self.residual.values()[i]))
            .collect()
    }
}
