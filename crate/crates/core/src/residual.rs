//! Full operator `L[u] = u_t - nu lap(u) + beta u^n` applied to candidates, the
//! Green-ansatz remainder `-2 nu G_x dA/dx - nu G d2A/dx2`, and the separable
//! exactness classification.
//!
//! Spatial derivatives use central finite differences of order 2 or 4. The
//! time derivative is analytic where a closed form exists and a centred
//! difference otherwise (Green ansatz only). Residual norms skip a boundary
//! layer of `stencil half-width + 2` nodes.

use crate::candidates::{alpha_factor_with, Candidate};
use crate::error::{LabError, Result};
use crate::field::{to_f64, Field, ResidualReport};
use crate::grid::GridSpec;
use crate::kernel::KernelPoint;
use crate::params::PdeParams;
use crate::quadrature::QuadTolerance;
use crate::scalar::{real_pow, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialOrder {
    Two,
    Four,
}

impl SpatialOrder {
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            2 => Ok(SpatialOrder::Two),
            4 => Ok(SpatialOrder::Four),
            _ => Err(LabError::invalid(format!("spatial order must be 2 or 4, got {order}"))),
        }
    }

    pub fn order(self) -> usize {
        match self {
            SpatialOrder::Two => 2,
            SpatialOrder::Four => 4,
        }
    }

    pub fn half_width(self) -> usize {
        self.order() / 2
    }

    // offsets -2..=2
    fn second<T: Real>(self) -> [T; 5] {
        match self {
            SpatialOrder::Two => [0.0, 1.0, -2.0, 1.0, 0.0].map(T::lit),
            SpatialOrder::Four => [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0].map(T::lit),
        }
    }

    fn first<T: Real>(self) -> [T; 5] {
        match self {
            SpatialOrder::Two => [0.0, -0.5, 0.0, 0.5, 0.0].map(T::lit),
            SpatialOrder::Four => [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0].map(T::lit),
        }
    }

    /// Sum of |coefficients| of the second-derivative stencil (roundoff amplification).
    pub fn second_abs_sum<T: Real>(self) -> T {
        self.second::<T>().iter().fold(T::zero(), |s, c| s + c.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StencilSpec<T> {
    pub spatial_order: SpatialOrder,
    /// Step of the centred time difference; `None` means `min(1e-5, t/100)`.
    pub dt_fd: Option<T>,
    /// Per-axis FD step; `None` uses the grid spacing and the grid neighbours.
    pub h_override: Option<Vec<T>>,
    /// Quadrature tolerance for Green-ansatz evaluations (100x tighter than the default).
    pub quad: QuadTolerance<T>,
}

impl<T: Real> Default for StencilSpec<T> {
    fn default() -> Self {
        Self {
            spatial_order: SpatialOrder::Two,
            dt_fd: None,
            h_override: None,
            quad: QuadTolerance::default().tightened(T::lit(100.0)),
        }
    }
}

impl<T: Real> StencilSpec<T> {
    pub fn order(order: SpatialOrder) -> Self {
        Self {
            spatial_order: order,
            ..Self::default()
        }
    }

    /// Boundary layer excluded from norms: stencil half-width + 2.
    pub fn margin(&self) -> usize {
        self.spatial_order.half_width() + 2
    }

    pub fn dt_for(&self, t: T) -> Result<T> {
        let dt = self.dt_fd.unwrap_or_else(|| T::lit(1e-5).min(t / T::lit(100.0)));
        if dt > T::zero() && dt < t / T::lit(2.0) {
            Ok(dt)
        } else {
            Err(LabError::invalid(format!("time FD step {dt} must lie in (0, t/2) with t = {t}")))
        }
    }

    fn steps(&self, grid: &GridSpec<T>) -> Result<Vec<T>> {
        match &self.h_override {
            None => Ok((0..grid.dim()).map(|a| grid.spacing(a)).collect()),
            Some(h) if h.len() == grid.dim() && h.iter().all(|&v| v > T::zero()) => Ok(h.clone()),
            Some(h) => Err(LabError::invalid(format!(
                "h override needs {} positive entries, got {}",
                grid.dim(),
                h.len()
            ))),
        }
    }
}

/// Applies a stencil along `axis` at point `index`, reading either grid neighbours or
/// fresh samples at `x +- k h e_axis`.
#[allow(clippy::too_many_arguments)]
fn apply_stencil<T, S>(
    coeffs: &[T; 5],
    half_width: usize,
    sample: &S,
    values: &[T],
    grid: &GridSpec<T>,
    index: usize,
    axis: usize,
    h: T,
    off_grid: bool,
) -> Result<T>
where
    T: Real,
    S: Fn(&[T]) -> Result<T>,
{
    let hw = half_width as isize;
    let mut acc = T::zero();
    let mut x = [T::zero(); 3];
    for k in -hw..=hw {
        let c = coeffs[(k + 2) as usize];
        if c == T::zero() {
            continue;
        }
        let v = if off_grid {
            grid.coords_into(index, &mut x);
            x[axis] = x[axis] + T::lit(k as f64) * h;
            sample(&x[..grid.dim()])?
        } else {
            let j = index as isize + k * grid.stride(axis) as isize;
            values[j as usize]
        };
        acc = acc + c * v;
    }
    Ok(acc)
}

fn check_candidate<T: Real>(c: &Candidate<T>, params: &PdeParams<T>, dim: usize) -> Result<()> {
    match c {
        Candidate::LinearHeat { .. } if !params.is_linear() => Err(LabError::domain(format!(
            "the linear-heat candidate is checked against n = 1 only, got n = {}",
            params.n()
        ))),
        Candidate::GreenAnsatz { .. } if dim != 1 => Err(LabError::invalid("the Green ansatz is one-dimensional")),
        Candidate::GreenAnsatz { .. } | Candidate::Separable(_) => params.require_nonlinear("this candidate"),
        _ => Ok(()),
    }
}

fn reaction<T: Real>(u: T, params: &PdeParams<T>) -> Result<T> {
    real_pow(u, params.n())
        .map(|p| params.beta() * p)
        .ok_or_else(|| LabError::domain(format!("u = {u} < 0 has no real power n = {}", params.n())))
}

fn interior_indices<T: Real>(grid: &GridSpec<T>, margin: usize) -> Result<Vec<usize>> {
    if grid.points_per_axis() < 2 * margin + 2 {
        return Err(LabError::domain(format!(
            "grid with {} points per axis is too small for a boundary margin of {margin}",
            grid.points_per_axis()
        )));
    }
    Ok((0..grid.len()).filter(|&i| grid.is_interior(i, margin)).collect())
}

fn scatter<T: Real>(grid: &GridSpec<T>, indices: &[usize], vals: Vec<T>) -> Vec<T> {
    let mut out = vec![T::zero(); grid.len()];
    for (&i, v) in indices.iter().zip(vals) {
        out[i] = v;
    }
    out
}

/// `u_t - nu lap u + beta u^n` for candidate `c` on the interior of `grid` at time `t`.
pub fn apply_operator<T: Real>(
    c: &Candidate<T>,
    grid: &GridSpec<T>,
    t: T,
    params: &PdeParams<T>,
    stencil: &StencilSpec<T>,
) -> Result<ResidualReport<T>> {
    check_candidate(c, params, grid.dim())?;
    let margin = stencil.margin();
    let interior = interior_indices(grid, margin)?;
    let steps = stencil.steps(grid)?;
    let off_grid = stencil.h_override.is_some();
    let tol = stencil.quad;
    let dt = if c.has_analytic_time_derivative() { None } else { Some(stencil.dt_for(t)?) };
    let eval = |x: &[T]| c.eval_with(x, t, params, tol);

    let u = if off_grid {
        vec![T::zero(); grid.len()]
    } else {
        crate::par::map_points(grid, |_, x| eval(x).map_err(|e| e.at(to_f64(x))))?
    };
    let order = stencil.spatial_order;
    let second = order.second::<T>();

    let residual = crate::par::map_indices(grid, interior.clone(), |i, x| {
        let here = || -> Result<T> {
            let ui = if off_grid { eval(x)? } else { u[i] };
            let ut = match dt {
                None => c.time_derivative(x, t, params).expect("analytic derivative")?,
                Some(dt) => {
                    let up = c.eval_with(x, t + dt, params, tol)?;
                    let um = c.eval_with(x, t - dt, params, tol)?;
                    (up - um) / (T::lit(2.0) * dt)
                }
            };
            let mut lap = T::zero();
            for (axis, &h) in steps.iter().enumerate() {
                lap = lap + apply_stencil(&second, order.half_width(), &eval, &u, grid, i, axis, h, off_grid)? / (h * h);
            }
            Ok(ut - params.nu() * lap + reaction(ui, params)?)
        };
        here().map_err(|e| e.at(to_f64(x)))
    })?;

    let field = Field::new(grid.clone(), t, scatter(grid, &interior, residual))?;
    ResidualReport::new(*params, c.to_string(), field, margin)
}

/// Direct operator and remainder formula for the Green ansatz, with their disagreement.
#[derive(Debug, Clone)]
pub struct ResidueComparison<T> {
    pub direct: ResidualReport<T>,
    pub remainder: ResidualReport<T>,
    /// Max pointwise |direct - remainder| over the interior.
    pub gap_linf: T,
    /// Same, skipping nodes whose stencil reaches the origin, where `I(x,t)` is not smooth.
    pub gap_linf_off_origin: T,
    pub gap_l2: T,
}

/// Evaluates the Green ansatz (`B = 1`) two ways: the full operator applied to `u`, and
/// the remainder `-2 nu G_x A_x - nu G A_xx` with `A` the alpha factor.
pub fn green_ansatz_residue<T: Real>(
    grid: &GridSpec<T>,
    t: T,
    params: &PdeParams<T>,
    constant: T,
    stencil: &StencilSpec<T>,
) -> Result<ResidueComparison<T>> {
    if grid.dim() != 1 {
        return Err(LabError::invalid("the remainder formula is one-dimensional"));
    }
    params.require_nonlinear("the Green-ansatz remainder")?;
    let candidate = Candidate::green_ansatz(T::one(), constant);
    let direct = apply_operator(&candidate, grid, t, params, stencil)?;

    let margin = stencil.margin();
    let interior = interior_indices(grid, margin)?;
    let h = stencil.steps(grid)?[0];
    let off_grid = stencil.h_override.is_some();
    let tol = stencil.quad;
    let alpha = |x: &[T]| alpha_factor_with(x, t, params, constant, tol);
    let a = if off_grid {
        vec![T::zero(); grid.len()]
    } else {
        crate::par::map_points(grid, |_, x| alpha(x).map_err(|e| e.at(to_f64(x))))?
    };
    let order = stencil.spatial_order;
    let (first, second) = (order.first::<T>(), order.second::<T>());
    let nu = params.nu();

    let vals = crate::par::map_indices(grid, interior.clone(), |i, x| {
        let here = || -> Result<T> {
            let kp = KernelPoint::new(x, t, nu)?;
            let ax = apply_stencil(&first, order.half_width(), &alpha, &a, grid, i, 0, h, off_grid)? / h;
            let axx = apply_stencil(&second, order.half_width(), &alpha, &a, grid, i, 0, h, off_grid)? / (h * h);
            Ok(-T::lit(2.0) * nu * kp.grad()[0] * ax - nu * kp.value() * axx)
        };
        here().map_err(|e| e.at(to_f64(x)))
    })?;
    let field = Field::new(grid.clone(), t, scatter(grid, &interior, vals))?;
    let remainder = ResidualReport::new(*params, format!("{candidate} remainder"), field, margin)?;

    let reach = T::from_usize_lossy(order.half_width()) * h;
    let mut gap_linf = T::zero();
    let mut gap_off = T::zero();
    let mut sum_sq = T::zero();
    for &i in &interior {
        let d = (direct.residual.values()[i] - remainder.residual.values()[i]).abs();
        gap_linf = gap_linf.max(d);
        sum_sq = sum_sq + d * d;
        if grid.coords(i)[0].abs() > reach * T::lit(1.000_001) {
            gap_off = gap_off.max(d);
        }
    }
    Ok(ResidueComparison {
        direct,
        remainder,
        gap_linf,
        gap_linf_off_origin: gap_off,
        gap_l2: (sum_sq * grid.cell_volume()).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub n: T,
    pub l2: T,
    pub linf: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSweep<T> {
    pub rows: Vec<SweepRow<T>>,
    /// l2 strictly decreases along the sweep.
    pub monotone: bool,
    /// First l2 over last l2.
    pub reduction: T,
}

/// Direct-operator residual norms of the Green ansatz as `n` decreases toward 1.
pub fn residue_scaling_sweep<T: Real>(
    template: &PdeParams<T>,
    ns: &[T],
    grid: &GridSpec<T>,
    t: T,
    constant: T,
    stencil: &StencilSpec<T>,
) -> Result<ScalingSweep<T>> {
    if ns.is_empty() || ns.iter().any(|&n| !(n > T::one())) || ns.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::invalid("powers must exceed 1 and decrease strictly"));
    }
    let candidate = Candidate::green_ansatz(T::one(), constant);
    let rows = ns
        .iter()
        .map(|&n| {
            let params = template.with_n(n)?;
            let r = apply_operator(&candidate, grid, t, &params, stencil)?;
            Ok(SweepRow { n, l2: r.l2, linf: r.linf })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].l2 < w[0].l2);
    let reduction = rows[0].l2 / rows[rows.len() - 1].l2;
    Ok(ScalingSweep { rows, monotone, reduction })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<T> {
    pub candidate: String,
    pub exact: bool,
    pub l2: T,
    pub linf: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T> {
    /// FD noise level: the larger of the constant-profile residual and stencil roundoff.
    pub floor: T,
    /// `100 * floor`.
    pub threshold: T,
    pub verdicts: Vec<Verdict<T>>,
}

/// Marks each separable (or trivial) candidate exact when its residual max norm stays
/// under 100x the FD floor measured on the constant profile.
pub fn separable_classification<T: Real>(
    candidates: &[Candidate<T>],
    params: &PdeParams<T>,
    grid: &GridSpec<T>,
    t: T,
    stencil: &StencilSpec<T>,
) -> Result<Classification<T>> {
    if !(t > T::zero()) {
        return Err(LabError::invalid("classification needs t > 0"));
    }
    if let Some(c) = candidates
        .iter()
        .find(|c| !matches!(c, Candidate::Separable(_) | Candidate::Trivial))
    {
        return Err(LabError::invalid(format!("{c} is not a separable profile")));
    }
    let reference = apply_operator(&Candidate::constant(T::one()), grid, t, params, stencil)?;
    let steps = stencil.steps(grid)?;
    let roundoff = steps.iter().fold(T::zero(), |s, &h| {
        s + params.nu() * stencil.spatial_order.second_abs_sum::<T>() / (h * h) * T::epsilon()
    });
    let floor = reference.linf.max(roundoff);
    let threshold = T::lit(100.0) * floor;
    let verdicts = candidates
        .iter()
        .map(|c| {
            let r = apply_operator(c, grid, t, params, stencil)?;
            Ok(Verdict {
                candidate: c.to_string(),
                exact: r.linf <= threshold,
                l2: r.l2,
                linf: r.linf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Classification { floor, threshold, verdicts })
}
