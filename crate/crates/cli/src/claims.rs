//! The claims table: every checked statement about the equation, one row each.

use nws_core::candidates::initial_mass_check;
use nws_core::kernel::{mass, required_half_width, KernelPoint};
use nws_core::{
    apply_operator, green_ansatz_residue, linear_limit_check, null_interval_check, residue_scaling_sweep,
    separable_classification, solve, BoundaryCondition, Candidate, Field, GridSpec, LabError, PdeParams,
    QuadTolerance, SolverConfig, StencilSpec,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimRow {
    pub id: String,
    pub claim: String,
    pub status: Status,
    pub measured: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub dim: usize,
}

impl ClaimRow {
    fn check(id: impl Into<String>, claim: impl Into<String>, dim: usize, measured: f64, relation: Relation, tolerance: f64) -> Self {
        let ok = match relation {
            Relation::AtMost => measured <= tolerance,
            Relation::AtLeast => measured >= tolerance,
        };
        Self {
            id: id.into(),
            claim: claim.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            relation,
            tolerance,
            dim,
        }
    }

    /// Fails the row when a side condition does not hold.
    fn requiring(mut self, ok: bool) -> Self {
        if !ok {
            self.status = Status::Fail;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimsOptions {
    pub dims: Vec<usize>,
    /// Overrides the relative quadrature tolerance of every check.
    pub rel_tol: Option<f64>,
}

impl Default for ClaimsOptions {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 3],
            rel_tol: None,
        }
    }
}

impl ClaimsOptions {
    fn stencil(&self) -> StencilSpec<f64> {
        let mut s = StencilSpec::default();
        if let Some(rel) = self.rel_tol {
            s.quad.rel = rel;
        }
        s
    }

    fn quad(&self) -> QuadTolerance<f64> {
        let mut q = QuadTolerance::default();
        if let Some(rel) = self.rel_tol {
            q.rel = rel;
        }
        q
    }
}

fn unit_params(n: f64) -> PdeParams<f64> {
    PdeParams::new(1.0, 1.0, n).expect("valid parameters")
}

/// Additive-recurrence low-discrepancy point in `[0,1)^k`.
fn quasi_random(index: usize, k: usize) -> Vec<f64> {
    // root of x^(k+1) = x + 1
    let mut phi = 2.0_f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (k as f64 + 1.0));
    }
    (1..=k)
        .map(|j| (0.5 + (index + 1) as f64 * phi.powi(-(j as i32))).fract())
        .collect()
}

/// Max over 100 sampled `(x, t, nu)` of `|G_t - nu lap G|` relative to `(|x|^2/(4 nu t^2) + d/(2t)) G`.
pub fn kernel_identity_error(dim: usize) -> Result<f64, LabError> {
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let u = quasi_random(i, dim + 2);
        let x: Vec<f64> = u[..dim].iter().map(|v| -3.0 + 6.0 * v).collect();
        let t = 0.05 + 1.95 * u[dim];
        let nu = 0.5 + 1.5 * u[dim + 1];
        let kp = KernelPoint::new(&x, t, nu)?;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let scale = (r2 / (4.0 * nu * t * t) + dim as f64 / (2.0 * t)) * kp.value();
        let err = (kp.time_derivative() - nu * kp.laplacian()).abs();
        if scale > 0.0 {
            worst = worst.max(err / scale);
        }
    }
    Ok(worst)
}

/// Max `|mass(G) - 1|` over `t` in {0.01, 0.1, 1} by tensor trapezoid.
pub fn kernel_mass_error(dim: usize) -> Result<f64, LabError> {
    let points = [0, 801, 161, 65][dim];
    let mut worst = 0.0_f64;
    for t in [0.01_f64, 0.1, 1.0] {
        let w = required_half_width(1.0, t);
        let grid = GridSpec::cube(dim, -w, w, points)?;
        worst = worst.max((mass(1.0, t, &grid)?.value - 1.0).abs());
    }
    Ok(worst)
}

fn one_dimensional_rows(opts: &ClaimsOptions) -> Result<Vec<ClaimRow>, LabError> {
    let mut rows = Vec::new();
    let stencil = opts.stencil();
    let quad = opts.quad();

    let mut worst_ratio = 0.0_f64;
    for beta in [0.5_f64, 1.0, 2.0] {
        for t in [0.5, 1.0] {
            for r in linear_limit_check(t, beta, &[1e-2, 1e-3, 1e-4, 1e-6])? {
                let bound = 2.0 * beta * t * t * r.epsilon * (-beta * t).exp();
                worst_ratio = worst_ratio.max(r.deviation / bound);
            }
        }
    }
    rows.push(ClaimRow::check(
        "linear-limit",
        "(1+beta eps t)^(-1/eps) approaches exp(-beta t) within 2 beta t^2 eps exp(-beta t) (worst deviation/bound)",
        1,
        worst_ratio,
        Relation::AtMost,
        1.0,
    ));

    let sigmas: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let mut last = 0.0_f64;
    let mut monotone = true;
    for n in [2.0, 3.0] {
        for x in [0.5, 1.0, 2.0] {
            let check = null_interval_check(&[x], &unit_params(n), &sigmas, quad)?;
            monotone &= check.monotone;
            last = last.max(check.rows.last().expect("six sigmas").1);
        }
    }
    rows.push(
        ClaimRow::check(
            "null-interval",
            "time integral over [0, sigma] decreases monotonically to below 1e-12 at sigma = 1e-6 (x != 0)",
            1,
            last,
            Relation::AtMost,
            1e-12,
        )
        .requiring(monotone),
    );

    let quad_grid = GridSpec::cube(1, -0.6, 0.6, 24001)?;
    for (b, c, n) in [(1.0, 1.0, 2.0), (2.0, 1.0, 3.0), (1.0, 4.0, 2.0)] {
        let check = initial_mass_check(b, c, &unit_params(n), &[1e-3, 1e-4], &quad_grid, quad)?;
        let m = check.rows.last().expect("two times").1;
        rows.push(ClaimRow::check(
            format!("initial-mass-B{b}-C{c}-n{n}"),
            "Green-ansatz mass at t = 1e-4 within 1e-3 of B/C^(1/(n-1)) (measured |mass - target|)",
            1,
            (m - check.target).abs(),
            Relation::AtMost,
            1e-3,
        ));
    }

    let p2 = unit_params(2.0);
    let coarse = green_ansatz_residue(&GridSpec::cube(1, -6.0, 6.0, 481)?, 1.0, &p2, 1.0, &stencil)?;
    let fine = green_ansatz_residue(&GridSpec::cube(1, -6.0, 6.0, 961)?, 1.0, &p2, 1.0, &stencil)?;
    rows.push(ClaimRow::check(
        "ansatz-not-solution",
        "direct residual l2 of the Green ansatz (n = 2, t = 1, h = 0.025) exceeds 1e-3",
        1,
        coarse.direct.l2,
        Relation::AtLeast,
        1e-3,
    ));
    rows.push(ClaimRow::check(
        "residue-equivalence",
        "direct operator and remainder formula agree in max norm at h = 0.025",
        1,
        coarse.gap_linf,
        Relation::AtMost,
        1e-4,
    ));
    rows.push(ClaimRow::check(
        "residue-equivalence-rate",
        "direct/remainder max gap shrinks by at least 3.5 when h halves",
        1,
        coarse.gap_linf / fine.gap_linf,
        Relation::AtLeast,
        3.5,
    ));
    rows.push(ClaimRow::check(
        "residue-equivalence-off-origin",
        "direct/remainder max gap at h = 0.025 away from the stencil touching x = 0",
        1,
        coarse.gap_linf_off_origin,
        Relation::AtMost,
        1e-4,
    ));

    let sweep = residue_scaling_sweep(
        &p2,
        &[2.0, 1.5, 1.1, 1.01, 1.001],
        &GridSpec::cube(1, -6.0, 6.0, 481)?,
        1.0,
        1.0,
        &stencil,
    )?;
    rows.push(
        ClaimRow::check(
            "scaling-sweep",
            "Green-ansatz residual l2 decreases monotonically as n -> 1; l2(1.001)/l2(2)",
            1,
            1.0 / sweep.reduction,
            Relation::AtMost,
            1e-2,
        )
        .requiring(sweep.monotone),
    );

    let grid = GridSpec::cube(1, 0.0, 2.0, 201)?;
    let r = apply_operator(&Candidate::linear(vec![1.0], 0.0), &grid, 1.0, &p2, &stencil)?;
    let at_one = r.residual.values()[100];
    rows.push(ClaimRow::check(
        "linear-residual-value",
        "linear profile residual at x = 1, t = 1 matches 2 nu t/(x t + 1)^3 = 0.25 (relative error)",
        1,
        (at_one - 0.25).abs() / 0.25,
        Relation::AtMost,
        0.02,
    ));
    Ok(rows)
}

fn classification_row(dim: usize, n: f64, stencil: &StencilSpec<f64>) -> Result<ClaimRow, LabError> {
    let points = [0, 201, 41, 21][dim];
    let grid = GridSpec::cube(dim, 0.0, 2.0, points)?;
    let expected = [
        (Candidate::constant(1.0), true),
        (Candidate::Trivial, true),
        (Candidate::linear(vec![1.0; dim], 0.0), false),
        (Candidate::gaussian(1.0, 1.0), false),
    ];
    let candidates: Vec<_> = expected.iter().map(|(c, _)| c.clone()).collect();
    let c = separable_classification(&candidates, &unit_params(n), &grid, 1.0, stencil)?;
    let wrong = c
        .verdicts
        .iter()
        .zip(&expected)
        .filter(|(v, (_, exact))| v.exact != *exact)
        .count();
    Ok(ClaimRow::check(
        format!("classification-{dim}d-n{n}"),
        "constant and trivial profiles classify exact, linear and Gaussian profiles non-exact (misclassified count)",
        dim,
        wrong as f64,
        Relation::AtMost,
        0.0,
    ))
}

fn fixed_point_row(dim: usize) -> Result<ClaimRow, LabError> {
    let grid = GridSpec::cube(dim, -1.0, 1.0, 11)?;
    let config = SolverConfig::new(grid.clone(), BoundaryCondition::Dirichlet);
    let traj = solve(&Field::zeros(grid, 0.0), &unit_params(2.0), &config, &[0.0, 0.05, 0.1])?.into_result()?;
    let worst = traj.snapshots.iter().map(Field::max_abs).fold(0.0, f64::max);
    Ok(ClaimRow::check(
        format!("trivial-fixed-point-{dim}d"),
        "u = 0 stays exactly 0 under the reference solver (max |u|)",
        dim,
        worst,
        Relation::AtMost,
        0.0,
    ))
}

/// Runs every claim whose dimension is in `opts.dims`, in dimension order.
pub fn run_claims(opts: &ClaimsOptions) -> Result<Vec<ClaimRow>, LabError> {
    if let Some(d) = opts.dims.iter().find(|d| !(1..=3).contains(*d)) {
        return Err(LabError::invalid(format!("dimension {d} is outside 1..=3")));
    }
    let stencil = opts.stencil();
    let mut rows = Vec::new();
    for dim in 1..=3 {
        if !opts.dims.contains(&dim) {
            continue;
        }
        rows.push(ClaimRow::check(
            format!("kernel-identity-{dim}d"),
            "G_t = nu lap G on 100 sampled points (max relative error)",
            dim,
            kernel_identity_error(dim)?,
            Relation::AtMost,
            1e-10,
        ));
        rows.push(ClaimRow::check(
            format!("kernel-mass-{dim}d"),
            "heat kernel mass equals 1 at t = 0.01, 0.1, 1 (max |mass - 1|)",
            dim,
            kernel_mass_error(dim)?,
            Relation::AtMost,
            1e-8,
        ));
        if dim == 1 {
            rows.extend(one_dimensional_rows(opts)?);
        }
        for n in [2.0, 3.0] {
            rows.push(classification_row(dim, n, &stencil)?);
        }
        rows.push(fixed_point_row(dim)?);
    }
    Ok(rows)
}
