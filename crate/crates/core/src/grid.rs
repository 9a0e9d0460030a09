//! Uniform tensor grids over 1-3 dimensional boxes.
//!
//! Points are ordered row-major: the last axis varies fastest. Every file
//! output in the workspace uses this ordering.

use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Default cap on the total number of grid points (2^24).
pub const DEFAULT_POINT_CAP: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    dim: usize,
    lo: Vec<T>,
    hi: Vec<T>,
    points_per_axis: usize,
    t0: T,
    t1: T,
    time_steps: usize,
}

impl<T: Real> GridSpec<T> {
    /// Grid with per-axis bounds, time interval `[0, 1]` and one time step.
    pub fn new(lo: &[T], hi: &[T], points_per_axis: usize) -> Result<Self> {
        Self::build(lo, hi, points_per_axis, T::zero(), T::one(), 1, DEFAULT_POINT_CAP)
    }

    /// Same bounds on every axis.
    pub fn cube(dim: usize, lo: T, hi: T, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(LabError::invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        Self::new(&vec![lo; dim], &vec![hi; dim], points_per_axis)
    }

    pub fn with_time(self, t0: T, t1: T, time_steps: usize) -> Result<Self> {
        Self::build(&self.lo, &self.hi, self.points_per_axis, t0, t1, time_steps, DEFAULT_POINT_CAP)
    }

    /// Re-validates the grid against a custom point cap.
    pub fn with_cap(self, cap: usize) -> Result<Self> {
        Self::build(&self.lo, &self.hi, self.points_per_axis, self.t0, self.t1, self.time_steps, cap)
    }

    fn build(
        lo: &[T],
        hi: &[T],
        points_per_axis: usize,
        t0: T,
        t1: T,
        time_steps: usize,
        cap: usize,
    ) -> Result<Self> {
        let dim = lo.len();
        if !(1..=3).contains(&dim) || hi.len() != dim {
            return Err(LabError::invalid(format!(
                "bounds must have 1-3 matching axes, got lo {} / hi {}",
                lo.len(),
                hi.len()
            )));
        }
        for (axis, (&a, &b)) in lo.iter().zip(hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(LabError::invalid(format!("axis {axis}: need finite lo < hi, got [{a}, {b}]")));
            }
        }
        if points_per_axis < 2 {
            return Err(LabError::invalid(format!("need at least 2 points per axis, got {points_per_axis}")));
        }
        let total = points_per_axis
            .checked_pow(dim as u32)
            .filter(|&t| t <= cap)
            .ok_or_else(|| {
                LabError::invalid(format!("{points_per_axis}^{dim} grid points exceed the cap of {cap}"))
            })?;
        debug_assert!(total >= 2);
        if !(t0.is_finite() && t1.is_finite() && t0 >= T::zero() && t0 < t1) {
            return Err(LabError::invalid(format!("need 0 <= t0 < t1, got [{t0}, {t1}]")));
        }
        if time_steps == 0 {
            return Err(LabError::invalid("time_steps must be >= 1"));
        }
        let grid = Self {
            dim,
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            points_per_axis,
            t0,
            t1,
            time_steps,
        };
        for axis in 0..dim {
            if !(grid.spacing(axis) > T::zero()) {
                return Err(LabError::invalid(format!("axis {axis}: spacing underflows")));
            }
        }
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn t1(&self) -> T {
        self.t1
    }

    pub fn time_steps(&self) -> usize {
        self.time_steps
    }

    pub fn spacing(&self, axis: usize) -> T {
        (self.hi[axis] - self.lo[axis]) / T::from_usize_lossy(self.points_per_axis - 1)
    }

    pub fn min_spacing(&self) -> T {
        (0..self.dim).map(|a| self.spacing(a)).fold(T::infinity(), T::min)
    }

    /// Volume element `prod h_axis`.
    pub fn cell_volume(&self) -> T {
        (0..self.dim).map(|a| self.spacing(a)).fold(T::one(), |acc, h| acc * h)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index stride of `axis` in the row-major layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.dim - 1 - axis) as u32)
    }

    /// Coordinate of node `i` on `axis`. Endpoints are exact and the grid is mirror-symmetric.
    pub fn axis_coord(&self, axis: usize, i: usize) -> T {
        let last = self.points_per_axis - 1;
        let (a, b) = (self.lo[axis], self.hi[axis]);
        (a * T::from_usize_lossy(last - i) + b * T::from_usize_lossy(i)) / T::from_usize_lossy(last)
    }

    pub fn multi_index(&self, index: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut rest = index;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % self.points_per_axis;
            rest /= self.points_per_axis;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    /// Writes the coordinates of point `index` into `out[..dim]`.
    pub fn coords_into(&self, index: usize, out: &mut [T]) {
        let m = self.multi_index(index);
        for axis in 0..self.dim {
            out[axis] = self.axis_coord(axis, m[axis]);
        }
    }

    pub fn coords(&self, index: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.coords_into(index, &mut out);
        out
    }

    /// True when the point sits at least `margin` nodes away from every face.
    pub fn is_interior(&self, index: usize, margin: usize) -> bool {
        let m = self.multi_index(index);
        m[..self.dim]
            .iter()
            .all(|&i| i >= margin && i + margin < self.points_per_axis)
    }

    /// Trapezoid weight of point `index` (product of 1D trapezoid weights).
    pub fn trapezoid_weight(&self, index: usize) -> T {
        let m = self.multi_index(index);
        let half = T::lit(0.5);
        (0..self.dim).fold(T::one(), |w, axis| {
            let i = m[axis];
            let edge = i == 0 || i + 1 == self.points_per_axis;
            w * self.spacing(axis) * if edge { half } else { T::one() }
        })
    }

    /// True when both grids sample the same points.
    pub fn same_points(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.points_per_axis == other.points_per_axis
            && self.lo == other.lo
            && self.hi == other.hi
    }
}

/// All grid points in row-major order; first is the `lo` corner, last the `hi` corner.
pub fn grid_points<T: Real>(grid: &GridSpec<T>) -> Vec<Vec<T>> {
    (0..grid.len()).map(|i| grid.coords(i)).collect()
}
