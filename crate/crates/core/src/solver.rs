//! Method-of-lines reference solver for `u_t = nu lap(u) - beta u^n`.
//!
//! Second-order central Laplacian on the tensor grid, classical RK4 in time,
//! diffusive CFL step control with exact landing on every snapshot time.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::candidates::Candidate;
use crate::error::{LabError, Result};
use crate::field::{to_f64, Field};
use crate::grid::GridSpec;
use crate::params::PdeParams;
use crate::quadrature::QuadTolerance;
use crate::scalar::{real_pow, Real};

const PARALLEL_MIN_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// `lo` and `hi` are the same point; the last node duplicates the first.
    Periodic,
    /// Boundary nodes held at zero.
    Dirichlet,
    /// Zero normal derivative through a mirrored ghost node.
    Neumann,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "periodic" => Ok(BoundaryCondition::Periodic),
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            other => Err(LabError::invalid(format!(
                "unknown boundary condition '{other}' (expected periodic, dirichlet or neumann)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep<T> {
    /// `safety * h^2 / (2 dim nu)`.
    Auto,
    Fixed(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub grid: GridSpec<T>,
    pub bc: BoundaryCondition,
    pub dt: TimeStep<T>,
    /// In `(0, 1]`, default 0.4.
    pub safety: T,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(grid: GridSpec<T>, bc: BoundaryCondition) -> Self {
        Self {
            grid,
            bc,
            dt: TimeStep::Auto,
            safety: T::lit(0.4),
        }
    }

    pub fn with_dt(mut self, dt: TimeStep<T>) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_safety(mut self, safety: T) -> Self {
        self.safety = safety;
        self
    }

    /// Diffusive stability bound `h_min^2 / (2 dim nu)`.
    pub fn cfl_bound(&self, nu: T) -> T {
        let h = self.grid.min_spacing();
        h * h / (T::lit(2.0) * T::from_usize_lossy(self.grid.dim()) * nu)
    }

    /// Largest step the integrator may take.
    pub fn max_dt(&self, nu: T) -> Result<T> {
        if !(self.safety > T::zero() && self.safety <= T::one()) {
            return Err(LabError::invalid(format!("safety factor must lie in (0, 1], got {}", self.safety)));
        }
        if self.grid.points_per_axis() < 3 {
            return Err(LabError::invalid("the solver needs at least 3 points per axis"));
        }
        let bound = self.cfl_bound(nu);
        match self.dt {
            TimeStep::Auto => Ok(self.safety * bound),
            TimeStep::Fixed(dt) if !(dt > T::zero() && dt.is_finite()) => {
                Err(LabError::invalid(format!("time step must be positive, got {dt}")))
            }
            TimeStep::Fixed(dt) if dt > bound => Err(LabError::Cfl {
                dt: dt.as_f64(),
                bound: bound.as_f64(),
            }),
            TimeStep::Fixed(dt) => Ok(dt),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostic<T> {
    pub step: usize,
    pub t: T,
    pub max_abs: T,
    pub min: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp<T> {
    pub step: usize,
    pub t: T,
    pub last_good_t: T,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub config: SolverConfig<T>,
    pub params: PdeParams<T>,
    /// Strictly increasing in time; the first is the initial field.
    pub snapshots: Vec<Field<T>>,
    pub diagnostics: Vec<StepDiagnostic<T>>,
    pub blow_up: Option<BlowUp<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &Field<T> {
        self.snapshots.last().expect("trajectory holds the initial field")
    }

    pub fn steps(&self) -> usize {
        self.diagnostics.len()
    }

    /// Turns a blown-up trajectory into [`LabError::BlowUp`].
    pub fn into_result(self) -> Result<Self> {
        match &self.blow_up {
            None => Ok(self),
            Some(b) => Err(LabError::BlowUp {
                step: b.step,
                t: b.t.as_f64(),
                last_good_t: b.last_good_t.as_f64(),
                reason: b.reason.clone(),
            }),
        }
    }
}

/// Per-axis neighbour tables over the 1D index range.
struct Stencil {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Stencil {
    fn new(n: usize, bc: BoundaryCondition) -> Self {
        let mut left: Vec<usize> = (0..n).map(|i| i.saturating_sub(1)).collect();
        let mut right: Vec<usize> = (0..n).map(|i| (i + 1).min(n - 1)).collect();
        match bc {
            BoundaryCondition::Periodic => {
                left[0] = n - 2;
                right[n - 1] = 1;
            }
            BoundaryCondition::Neumann => {
                left[0] = 1;
                right[n - 1] = n - 2;
            }
            BoundaryCondition::Dirichlet => {}
        }
        Self { left, right }
    }
}

struct Rhs<'a, T> {
    grid: &'a GridSpec<T>,
    params: PdeParams<T>,
    bc: BoundaryCondition,
    stencil: Stencil,
    inv_h2: Vec<T>,
}

impl<T: Real> Rhs<'_, T> {
    fn at(&self, u: &[T], i: usize) -> T {
        let m = self.grid.multi_index(i);
        let n = self.grid.points_per_axis();
        let dim = self.grid.dim();
        if self.bc == BoundaryCondition::Dirichlet && m[..dim].iter().any(|&k| k == 0 || k + 1 == n) {
            return T::zero();
        }
        let ui = u[i];
        let mut lap = T::zero();
        for axis in 0..dim {
            let s = self.grid.stride(axis);
            let base = i - m[axis] * s;
            let l = u[base + self.stencil.left[m[axis]] * s];
            let r = u[base + self.stencil.right[m[axis]] * s];
            lap = lap + (l - ui - ui + r) * self.inv_h2[axis];
        }
        let react = real_pow(ui, self.params.n()).map_or(T::nan(), |p| self.params.beta() * p);
        self.params.nu() * lap - react
    }

    fn eval(&self, u: &[T], out: &mut [T]) {
        if u.len() >= PARALLEL_MIN_POINTS {
            out.par_iter_mut().enumerate().for_each(|(i, o)| *o = self.at(u, i));
        } else {
            out.iter_mut().enumerate().for_each(|(i, o)| *o = self.at(u, i));
        }
    }
}

fn extremes<T: Real>(u: &[T]) -> (T, T, bool) {
    let mut max_abs = T::zero();
    let mut min = T::infinity();
    let mut finite = true;
    for &v in u {
        finite &= v.is_finite();
        max_abs = max_abs.max(v.abs());
        min = min.min(v);
    }
    (max_abs, min, finite)
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::invalid("snapshot times must be finite and strictly increasing"));
    }
    Ok(())
}

/// Advances `u0` (given at `snapshot_times[0]`) through every requested snapshot time.
///
/// A non-finite value, or a negative value when `n` is fractional, stops the run;
/// the partial trajectory is returned with [`Trajectory::blow_up`] set.
pub fn solve<T: Real>(
    u0: &Field<T>,
    params: &PdeParams<T>,
    config: &SolverConfig<T>,
    snapshot_times: &[T],
) -> Result<Trajectory<T>> {
    let grid = &config.grid;
    if !u0.grid().same_points(grid) {
        return Err(LabError::invalid("initial field does not live on the solver grid"));
    }
    check_times(snapshot_times)?;
    if u0.t() != snapshot_times[0] {
        return Err(LabError::invalid(format!(
            "first snapshot time {} must equal the initial field time {}",
            snapshot_times[0],
            u0.t()
        )));
    }
    let fractional = !params.has_integer_power();
    if fractional {
        if let Some(i) = u0.values().iter().position(|&v| v < T::zero()) {
            return Err(LabError::Domain {
                message: format!("initial value {} < 0 with fractional n = {}", u0.values()[i], params.n()),
                point: Some(to_f64(&grid.coords(i))),
            });
        }
    }
    let dt_max = config.max_dt(params.nu())?;

    let rhs = Rhs {
        grid,
        params: *params,
        bc: config.bc,
        stencil: Stencil::new(grid.points_per_axis(), config.bc),
        inv_h2: (0..grid.dim()).map(|a| (grid.spacing(a) * grid.spacing(a)).recip()).collect(),
    };

    let len = grid.len();
    let mut u = u0.values().to_vec();
    if config.bc == BoundaryCondition::Dirichlet {
        for (i, v) in u.iter_mut().enumerate() {
            if !grid.is_interior(i, 1) {
                *v = T::zero();
            }
        }
    }
    let mut snapshots = vec![Field::new(grid.clone(), snapshot_times[0], u.clone())?];
    let mut diagnostics = Vec::new();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![T::zero(); len], vec![T::zero(); len], vec![T::zero(); len], vec![T::zero(); len], vec![T::zero(); len]);
    let (half, two, sixth) = (T::lit(0.5), T::lit(2.0), T::one() / T::lit(6.0));
    let mut step = 0;
    let mut last_good_t = snapshot_times[0];

    for w in snapshot_times.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let span = tb - ta;
        let count = (span / dt_max * (T::one() - T::lit(1e-12))).ceil().max(T::one());
        let steps = count.to_usize().ok_or_else(|| LabError::invalid("step count overflow"))?;
        let dt = span / count;
        for j in 1..=steps {
            rhs.eval(&u, &mut k1);
            tmp.iter_mut().zip(&u).zip(&k1).for_each(|((o, &a), &k)| *o = a + half * dt * k);
            rhs.eval(&tmp, &mut k2);
            tmp.iter_mut().zip(&u).zip(&k2).for_each(|((o, &a), &k)| *o = a + half * dt * k);
            rhs.eval(&tmp, &mut k3);
            tmp.iter_mut().zip(&u).zip(&k3).for_each(|((o, &a), &k)| *o = a + dt * k);
            rhs.eval(&tmp, &mut k4);
            for i in 0..len {
                u[i] = u[i] + dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
            }
            step += 1;
            let t = if j == steps { tb } else { ta + T::from_usize_lossy(j) * dt };
            let (max_abs, min, finite) = extremes(&u);
            diagnostics.push(StepDiagnostic { step, t, max_abs, min });
            let reason = if !finite {
                Some("non-finite value".to_string())
            } else if fractional && min < T::zero() {
                Some(format!("negative value {min} with fractional n = {}", params.n()))
            } else {
                None
            };
            if let Some(reason) = reason {
                return Ok(Trajectory {
                    config: config.clone(),
                    params: *params,
                    snapshots,
                    diagnostics,
                    blow_up: Some(BlowUp { step, t, last_good_t, reason }),
                });
            }
            last_good_t = t;
        }
        snapshots.push(Field::new(grid.clone(), tb, u.clone())?);
    }

    Ok(Trajectory {
        config: config.clone(),
        params: *params,
        snapshots,
        diagnostics,
        blow_up: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow<T> {
    pub t: T,
    /// Max |solver - candidate| over all grid points.
    pub gap: T,
}

/// Starts the solver from the candidate at `t_start` and records the max-norm gap at
/// `t_start`, every snapshot time inside `(t_start, t_end)`, and `t_end`.
pub fn track_candidate<T: Real>(
    c: &Candidate<T>,
    params: &PdeParams<T>,
    config: &SolverConfig<T>,
    t_start: T,
    t_end: T,
    snapshot_times: &[T],
) -> Result<Vec<GapRow<T>>> {
    if !(t_end > t_start) {
        return Err(LabError::invalid("tracking window needs t_end > t_start"));
    }
    let mut times = vec![t_start];
    times.extend(snapshot_times.iter().copied().filter(|&t| t > t_start && t < t_end));
    times.push(t_end);
    check_times(&times)?;

    let tol = QuadTolerance::default();
    let u0 = c.sample(&config.grid, t_start, params, tol)?;
    let traj = solve(&u0, params, config, &times)?.into_result()?;
    traj.snapshots
        .iter()
        .map(|snap| {
            let exact = c.sample(&config.grid, snap.t(), params, tol)?;
            Ok(GapRow {
                t: snap.t(),
                gap: snap.linf_distance(&exact)?,
            })
        })
        .collect()
}

/// A problem with a known exact solution, run at several resolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceProblem<T> {
    pub params: PdeParams<T>,
    pub exact: Candidate<T>,
    pub dim: usize,
    pub lo: T,
    pub hi: T,
    pub bc: BoundaryCondition,
    pub t_start: T,
    pub t_end: T,
    pub safety: T,
}

impl<T: Real> ConvergenceProblem<T> {
    /// `n = 1`, `nu = beta = 1`, `u0 = G(x, 0.5)` on `[-10, 10]` with Dirichlet walls, `t` in `[0, 0.5]`.
    pub fn linear_heat() -> Self {
        Self {
            params: PdeParams::new(T::one(), T::one(), T::one()).expect("valid parameters"),
            exact: Candidate::LinearHeat { t_offset: T::lit(0.5) },
            dim: 1,
            lo: T::lit(-10.0),
            hi: T::lit(10.0),
            bc: BoundaryCondition::Dirichlet,
            t_start: T::zero(),
            t_end: T::lit(0.5),
            safety: T::lit(0.4),
        }
    }

    pub fn grid_for(&self, h: T) -> Result<GridSpec<T>> {
        let intervals = ((self.hi - self.lo) / h).round();
        let n = intervals.to_usize().map(|k| k + 1).unwrap_or(0);
        let grid = GridSpec::cube(self.dim, self.lo, self.hi, n)?;
        if ((grid.spacing(0) - h) / h).abs() > T::lit(1e-9) {
            return Err(LabError::invalid(format!(
                "h = {h} does not divide the interval [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow<T> {
    pub h: T,
    pub points_per_axis: usize,
    pub error: T,
    /// `log2(e_prev / e)`; absent on the first level and when an error is zero.
    pub order: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyStatus {
    Measured,
    /// Errors do not decrease with h; orders are reported but not trustworthy.
    NonMonotone,
    /// Every error sits at roundoff or time-integration level; no spatial order exists.
    FloorLimited,
    /// Every error is exactly zero.
    Exact,
}

impl fmt::Display for StudyStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StudyStatus::Measured => "measured",
            StudyStatus::NonMonotone => "non-monotone",
            StudyStatus::FloorLimited => "dt-limited",
            StudyStatus::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy<T> {
    pub rows: Vec<ConvergenceRow<T>>,
    pub status: StudyStatus,
}

impl<T: Real> ConvergenceStudy<T> {
    pub fn min_order(&self) -> Option<T> {
        self.rows.iter().filter_map(|r| r.order).reduce(T::min)
    }
}

/// Runs the problem at each `h` (at least three levels, each half the previous) and
/// measures the observed order from the final-time max-norm error.
pub fn convergence_study<T: Real>(problem: &ConvergenceProblem<T>, levels: &[T]) -> Result<ConvergenceStudy<T>> {
    if levels.len() < 3 {
        return Err(LabError::invalid("a convergence study needs at least 3 levels"));
    }
    if levels.windows(2).any(|w| ((w[0] / w[1]) - T::lit(2.0)).abs() > T::lit(1e-9)) {
        return Err(LabError::invalid("each level must halve h"));
    }
    let tol = QuadTolerance::default();
    let mut rows: Vec<ConvergenceRow<T>> = Vec::with_capacity(levels.len());
    let mut scale = T::zero();
    for &h in levels {
        let grid = problem.grid_for(h)?;
        let config = SolverConfig::new(grid.clone(), problem.bc).with_safety(problem.safety);
        let u0 = problem.exact.sample(&grid, problem.t_start, &problem.params, tol)?;
        let traj = solve(&u0, &problem.params, &config, &[problem.t_start, problem.t_end])?.into_result()?;
        let exact = problem.exact.sample(&grid, problem.t_end, &problem.params, tol)?;
        scale = scale.max(exact.max_abs());
        let error = traj.last().linf_distance(&exact)?;
        let order = rows
            .last()
            .filter(|prev| prev.error > T::zero() && error > T::zero())
            .map(|prev| (prev.error / error).log2());
        rows.push(ConvergenceRow {
            h,
            points_per_axis: grid.points_per_axis(),
            error,
            order,
        });
    }
    let floor = T::lit(1e-10) * scale.max(T::min_positive_value());
    let status = if rows.iter().all(|r| r.error == T::zero()) {
        StudyStatus::Exact
    } else if rows.iter().all(|r| r.error <= floor) {
        StudyStatus::FloorLimited
    } else if rows.windows(2).any(|w| w[1].error >= w[0].error) {
        StudyStatus::NonMonotone
    } else {
        StudyStatus::Measured
    };
    Ok(ConvergenceStudy { rows, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(n: f64) -> PdeParams<f64> {
        PdeParams::new(1.0, 1.0, n).unwrap()
    }

    fn constant_field(grid: &GridSpec<f64>, c: f64) -> Field<f64> {
        Field::new(grid.clone(), 0.0, vec![c; grid.len()]).unwrap()
    }

    #[test]
    fn zero_is_a_fixed_point() {
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let g = GridSpec::cube(2, -1.0, 1.0, 11).unwrap();
            let cfg = SolverConfig::new(g.clone(), bc);
            let tr = solve(&constant_field(&g, 0.0), &params(1.5), &cfg, &[0.0, 0.05, 0.1]).unwrap();
            assert!(tr.snapshots.iter().all(|s| s.values().iter().all(|&v| v == 0.0)));
        }
    }

    #[test]
    fn constant_data_follows_scalar_ode() {
        let g = GridSpec::cube(1, 0.0, 1.0, 21).unwrap();
        let cfg = SolverConfig::new(g.clone(), BoundaryCondition::Periodic);
        let tr = solve(&constant_field(&g, 1.0), &params(2.0), &cfg, &[0.0, 1.0]).unwrap();
        let last = tr.last();
        assert!(last.values().iter().all(|&v| (v - 0.5).abs() < 1e-6));
        let spread = last.values().iter().fold(0.0_f64, |m, &v| m.max((v - last.values()[0]).abs()));
        assert!(spread <= 1e-12);
        assert_eq!(last.t(), 1.0);
    }

    #[test]
    fn snapshots_land_exactly() {
        let g = GridSpec::cube(1, 0.0, 1.0, 11).unwrap();
        let cfg = SolverConfig::new(g.clone(), BoundaryCondition::Neumann);
        let times = [0.0, 0.013, 0.1, 0.3];
        let tr = solve(&constant_field(&g, 1.0), &params(3.0), &cfg, &times).unwrap();
        let got: Vec<f64> = tr.snapshots.iter().map(|s| s.t()).collect();
        assert_eq!(got, times.to_vec());
        assert_eq!(tr.diagnostics.last().unwrap().t, 0.3);
        let dt_max = cfg.max_dt(1.0).unwrap();
        assert!(tr.diagnostics.windows(2).all(|w| w[1].t - w[0].t <= dt_max * (1.0 + 1e-9)));
    }

    #[test]
    fn explicit_dt_above_bound_is_refused() {
        let g = GridSpec::cube(1, 0.0, 1.0, 11).unwrap();
        let cfg = SolverConfig::new(g.clone(), BoundaryCondition::Dirichlet).with_dt(TimeStep::Fixed(0.01));
        match solve(&constant_field(&g, 0.0), &params(2.0), &cfg, &[0.0, 1.0]) {
            Err(LabError::Cfl { bound, .. }) => assert!((bound - 0.005).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(SolverConfig::new(g, BoundaryCondition::Dirichlet).with_safety(1.5).max_dt(1.0).is_err());
    }

    #[test]
    fn fractional_power_rejects_negative_data() {
        let g = GridSpec::cube(1, 0.0, 1.0, 11).unwrap();
        let cfg = SolverConfig::new(g.clone(), BoundaryCondition::Neumann);
        assert!(matches!(
            solve(&constant_field(&g, -1.0), &params(1.5), &cfg, &[0.0, 0.1]),
            Err(LabError::Domain { point: Some(_), .. })
        ));
        assert!(solve(&constant_field(&g, -1.0), &params(3.0), &cfg, &[0.0, 0.1]).is_ok());
    }

    #[test]
    fn blow_up_returns_partial_trajectory() {
        // u' = -u^2 from u(0) = -1 reaches -infinity at t = 1.
        let g = GridSpec::cube(1, 0.0, 1.0, 5).unwrap();
        let cfg = SolverConfig::new(g.clone(), BoundaryCondition::Periodic);
        let tr = solve(&constant_field(&g, -1.0), &params(2.0), &cfg, &[0.0, 0.5, 2.0]).unwrap();
        let b = tr.blow_up.clone().expect("blow-up");
        assert!(b.t > 0.9 && b.t < 1.1, "{b:?}");
        assert_eq!(tr.snapshots.len(), 2);
        assert!(matches!(tr.into_result(), Err(LabError::BlowUp { .. })));
    }

    #[test]
    fn linear_heat_oracle() {
        let g = GridSpec::cube(1, -10.0, 10.0, 801).unwrap();
        let p = params(1.0);
        let c = Candidate::LinearHeat { t_offset: 0.5 };
        let u0 = c.sample(&g, 0.0, &p, QuadTolerance::default()).unwrap();
        let tr = solve(&u0, &p, &SolverConfig::new(g.clone(), BoundaryCondition::Dirichlet), &[0.0, 0.5]).unwrap();
        let exact = c.sample(&g, 0.5, &p, QuadTolerance::default()).unwrap();
        assert!(tr.last().linf_distance(&exact).unwrap() < 1e-4);
    }

    #[test]
    fn tracking_separates_exact_candidates() {
        let g = GridSpec::cube(1, 0.0, 1.0, 21).unwrap();
        let cfg = SolverConfig::new(g, BoundaryCondition::Periodic);
        let rows = track_candidate(&Candidate::constant(1.0), &params(3.0), &cfg, 0.1, 1.1, &[0.6]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.gap <= 1e-6));
    }

    #[test]
    fn study_statuses() {
        let mut trivial = ConvergenceProblem::<f64>::linear_heat();
        trivial.exact = Candidate::Trivial;
        trivial.params = params(2.0);
        trivial.t_end = 0.05;
        let s = convergence_study(&trivial, &[0.5, 0.25, 0.125]).unwrap();
        assert_eq!(s.status, StudyStatus::Exact);
        assert!(s.rows.iter().all(|r| r.error == 0.0 && r.order.is_none()));

        let constant = ConvergenceProblem {
            exact: Candidate::constant(1.0),
            bc: BoundaryCondition::Periodic,
            lo: 0.0,
            hi: 1.0,
            t_end: 0.2,
            params: params(2.0),
            ..trivial
        };
        let s = convergence_study(&constant, &[0.1, 0.05, 0.025]).unwrap();
        assert_eq!(s.status, StudyStatus::FloorLimited);

        assert!(convergence_study(&constant, &[0.1, 0.05]).is_err());
        assert!(convergence_study(&constant, &[0.1, 0.04, 0.02]).is_err());
        assert!(constant.grid_for(0.3).is_err());
    }

    #[test]
    fn boundary_condition_round_trip() {
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            assert_eq!(bc.to_string().parse::<BoundaryCondition>().unwrap(), bc);
        }
        assert!("robin".parse::<BoundaryCondition>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn periodic_homogeneity_is_preserved(c in 0.0..3.0_f64, n in 1.0..4.0_f64, dim in 1usize..=2) {
            let g = GridSpec::cube(dim, 0.0, 1.0, 9).unwrap();
            let cfg = SolverConfig::new(g.clone(), BoundaryCondition::Periodic);
            let tr = solve(&constant_field(&g, c), &params(n), &cfg, &[0.0, 0.2]).unwrap();
            let v = tr.last().values();
            prop_assert!(v.iter().all(|&x| (x - v[0]).abs() <= 1e-12));
            let exact = if n == 1.0 { c * (-0.2_f64).exp() } else { c * (1.0 + (n - 1.0) * c.powf(n - 1.0) * 0.2).powf(-1.0 / (n - 1.0)) };
            prop_assert!((v[0] - exact).abs() <= 1e-8);
        }

        #[test]
        fn ordering_is_preserved(
            base in proptest::collection::vec(0.0..1.0_f64, 17),
            bump in proptest::collection::vec(0.0..0.5_f64, 17),
            odd in proptest::bool::ANY,
        ) {
            let g = GridSpec::cube(1, -1.0, 1.0, 17).unwrap();
            let cfg = SolverConfig::new(g.clone(), BoundaryCondition::Neumann);
            let p = params(if odd { 3.0 } else { 2.0 });
            let lower = Field::new(g.clone(), 0.0, base.clone()).unwrap();
            let upper = Field::new(g.clone(), 0.0, base.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
            let a = solve(&upper, &p, &cfg, &[0.0, 0.1]).unwrap();
            let b = solve(&lower, &p, &cfg, &[0.0, 0.1]).unwrap();
            for (x, y) in a.last().values().iter().zip(b.last().values()) {
                prop_assert!(x - y >= -1e-12);
            }
        }
    }
}
