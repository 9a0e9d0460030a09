//! One function per subcommand. Each fills unset settings with command defaults,
//! writes the effective settings as `experiment.txt` next to its reports, and returns the first
//! error it meets.

use std::io::Write;
use std::path::Path;

use nws_core::solver::{convergence_study, track_candidate, StudyStatus};
use nws_core::{
    apply_operator, integrate_G_power, linear_limit_check, null_interval_check, separable_classification, solve,
    Candidate, ConvergenceProblem, Field, SolverConfig, TimeStep,
};
use serde_json::{json, Value};

use crate::claims::{run_claims, ClaimsOptions, Status};
use crate::error::{CliError, CliResult};
use crate::experiment::{ExperimentSpec, GridArg};
use crate::output::{coordinate_header, ensure_dir, envelope, num, write_csv, write_json, write_text, SCHEMA_VERSION};

/// Default grid for a candidate: the Gaussian-shaped families get a symmetric box,
/// the separable ones the positive half-line where the linear profile stays regular.
pub fn default_grid(c: &Candidate<f64>) -> GridArg {
    match c {
        Candidate::GreenAnsatz { .. } | Candidate::LinearHeat { .. } => GridArg::new(1, -6.0, 6.0, 481),
        Candidate::Separable(_) | Candidate::Trivial => GridArg::new(1, 0.0, 2.0, 201),
    }
}

fn prepare(spec: &ExperimentSpec) -> CliResult<()> {
    ensure_dir(&spec.out)?;
    write_text(&spec.out.join("experiment.txt"), &spec.to_string())
}

fn grid_of(spec: &ExperimentSpec) -> GridArg {
    spec.grid.expect("defaults resolved")
}

fn rows_with_coords(field: &Field<f64>, indices: impl Iterator<Item = usize>, value: impl Fn(usize) -> f64) -> Vec<Vec<String>> {
    let g = field.grid();
    indices
        .map(|i| {
            let mut row: Vec<String> = g.coords(i).into_iter().map(num).collect();
            row.push(num(value(i)));
            row
        })
        .collect()
}

pub fn residual(mut spec: ExperimentSpec, x0_check: bool, log: &mut dyn Write) -> CliResult<()> {
    if spec.candidates.is_empty() {
        spec.candidates.push(Candidate::green_ansatz(1.0, 1.0));
    }
    if spec.grid.is_none() {
        spec.grid = Some(default_grid(&spec.candidates[0]));
    }
    let params = spec.params()?;
    let stencil = spec.stencil()?;
    let grid = grid_of(&spec).build()?;
    if x0_check && spec.candidates.iter().any(|c| matches!(c, Candidate::GreenAnsatz { .. })) {
        integrate_G_power(&vec![0.0; grid.dim()], spec.t, &params, spec.quad())?.require_converged()?;
    }
    prepare(&spec)?;

    let mut header = coordinate_header(grid.dim());
    header.push("residual");
    let mut reports = Vec::new();
    for (k, c) in spec.candidates.iter().enumerate() {
        let report = apply_operator(c, &grid, spec.t, &params, &stencil)?;
        let file = format!("residual_{k}.csv");
        let interior = (0..grid.len()).filter(|&i| grid.is_interior(i, report.interior_margin));
        let rows = rows_with_coords(&report.residual, interior, |i| report.residual.values()[i]);
        write_csv(&spec.out.join(&file), &header, &rows)?;
        writeln!(log, "{c}: l2 = {}, linf = {} ({file})", num(report.l2), num(report.linf)).ok();
        reports.push(json!({
            "candidate": c.to_string(),
            "csv": file,
            "l2": report.l2,
            "linf": report.linf,
            "interior_margin": report.interior_margin,
            "interior_points": rows.len(),
            "fd_time_step": if c.has_analytic_time_derivative() { Value::Null } else { json!(stencil.dt_for(spec.t)?) },
        }));
    }

    let mut body = json!({ "t": spec.t, "reports": reports });
    let separable = spec
        .candidates
        .iter()
        .all(|c| matches!(c, Candidate::Separable(_) | Candidate::Trivial));
    if separable {
        let cls = separable_classification(&spec.candidates, &params, &grid, spec.t, &stencil)?;
        body["classification"] = json!({
            "floor": cls.floor,
            "threshold": cls.threshold,
            "exact": cls.verdicts.iter().map(|v| v.exact).collect::<Vec<_>>(),
        });
    }
    write_json(&spec.out.join("residual.json"), &envelope("residual", &spec, body))
}

fn snapshot_times(spec: &ExperimentSpec) -> Vec<f64> {
    let mut times = vec![spec.t_start];
    times.extend(spec.snapshots.iter().copied().filter(|&t| t > spec.t_start && t < spec.t_end));
    times.push(spec.t_end);
    times
}

fn solver_config(spec: &ExperimentSpec) -> CliResult<SolverConfig<f64>> {
    let dt = spec.dt.map_or(TimeStep::Auto, TimeStep::Fixed);
    Ok(SolverConfig::new(grid_of(spec).build()?, spec.bc)
        .with_dt(dt)
        .with_safety(spec.safety))
}

pub fn solve_cmd(mut spec: ExperimentSpec, log: &mut dyn Write) -> CliResult<()> {
    if spec.candidates.is_empty() {
        spec.candidates.push(Candidate::Trivial);
    }
    spec.grid.get_or_insert(GridArg::new(1, -10.0, 10.0, 801));
    let params = spec.params()?;
    let config = solver_config(&spec)?;
    let u0 = spec.candidates[0].sample(&config.grid, spec.t_start, &params, spec.quad())?;
    let traj = solve(&u0, &params, &config, &snapshot_times(&spec))?;
    prepare(&spec)?;

    let grid = &config.grid;
    let mut header = coordinate_header(grid.dim());
    header.push("u");
    let mut files = Vec::new();
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let file = format!("snapshot_{k:04}.csv");
        write_csv(&spec.out.join(&file), &header, &rows_with_coords(snap, 0..grid.len(), |i| snap.values()[i]))?;
        files.push(json!({ "t": snap.t(), "csv": file, "max_abs": snap.max_abs() }));
    }
    let diag: Vec<Vec<String>> = traj
        .diagnostics
        .iter()
        .map(|d| vec![d.step.to_string(), num(d.t), num(d.max_abs), num(d.min)])
        .collect();
    write_csv(&spec.out.join("diagnostics.csv"), &["step", "t", "max_abs", "min"], &diag)?;
    let blow_up = traj.blow_up.as_ref().map(|b| {
        json!({ "step": b.step, "t": b.t, "last_good_t": b.last_good_t, "reason": b.reason })
    });
    let body = json!({
        "initial_candidate": spec.candidates[0].to_string(),
        "steps": traj.steps(),
        "max_dt": config.max_dt(params.nu())?,
        "cfl_bound": config.cfl_bound(params.nu()),
        "snapshots": files,
        "blow_up": blow_up,
    });
    write_json(&spec.out.join("solve.json"), &envelope("solve", &spec, body))?;
    writeln!(log, "{} snapshots, {} steps", traj.snapshots.len(), traj.steps()).ok();
    traj.into_result()?;
    Ok(())
}

pub fn track(mut spec: ExperimentSpec, log: &mut dyn Write) -> CliResult<()> {
    if spec.candidates.is_empty() {
        spec.candidates.push(Candidate::constant(1.0));
    }
    spec.grid.get_or_insert(GridArg::new(1, -10.0, 10.0, 801));
    let params = spec.params()?;
    let config = solver_config(&spec)?;
    let c = &spec.candidates[0];
    let gaps = track_candidate(c, &params, &config, spec.t_start, spec.t_end, &spec.snapshots)?;
    prepare(&spec)?;

    let mut running = 0.0_f64;
    let rows: Vec<Vec<String>> = gaps
        .iter()
        .map(|g| {
            running = running.max(g.gap);
            vec![num(g.t), num(g.gap), num(running)]
        })
        .collect();
    write_csv(&spec.out.join("gap.csv"), &["t", "gap", "max_gap"], &rows)?;
    let body = json!({
        "candidate": c.to_string(),
        "max_gap": running,
        "final_gap": gaps.last().map(|g| g.gap),
    });
    write_json(&spec.out.join("track.json"), &envelope("track", &spec, body))?;
    writeln!(log, "{c}: max gap {}", num(running)).ok();
    Ok(())
}

pub fn converge(mut spec: ExperimentSpec, log: &mut dyn Write) -> CliResult<()> {
    if spec.dt.is_some() {
        return Err(CliError::usage("converge always uses the automatic CFL step; drop dt"));
    }
    if spec.candidates.is_empty() {
        spec.candidates.push(Candidate::LinearHeat { t_offset: 0.5 });
    }
    spec.grid.get_or_insert(GridArg::new(1, -10.0, 10.0, 801));
    if spec.levels.is_empty() {
        spec.levels = vec![0.05, 0.025, 0.0125];
    }
    let g = grid_of(&spec);
    let problem = ConvergenceProblem {
        params: spec.params()?,
        exact: spec.candidates[0].clone(),
        dim: g.dim,
        lo: g.lo,
        hi: g.hi,
        bc: spec.bc,
        t_start: spec.t_start,
        t_end: spec.t_end,
        safety: spec.safety,
    };
    let study = convergence_study(&problem, &spec.levels)?;
    prepare(&spec)?;

    let rows: Vec<Vec<String>> = study
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.h),
                r.points_per_axis.to_string(),
                num(r.error),
                r.order.map(num).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(&spec.out.join("convergence.csv"), &["h", "points_per_axis", "error", "observed_order"], &rows)?;
    let body = json!({
        "candidate": problem.exact.to_string(),
        "status": study.status.to_string(),
        "min_order": study.min_order(),
    });
    write_json(&spec.out.join("converge.json"), &envelope("converge", &spec, body))?;
    match (study.status, study.min_order()) {
        (StudyStatus::Measured | StudyStatus::NonMonotone, Some(o)) => {
            writeln!(log, "observed order >= {o:.4} ({})", study.status).ok()
        }
        _ => writeln!(log, "no spatial order measurable ({})", study.status).ok(),
    };
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitsOptions {
    pub betas: Vec<f64>,
    pub times: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// Points `x != 0` for the null-interval table.
    pub points: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl Default for LimitsOptions {
    fn default() -> Self {
        Self {
            betas: vec![0.5, 1.0, 2.0],
            times: vec![0.5, 1.0],
            epsilons: vec![1e-2, 1e-3, 1e-4, 1e-6],
            points: vec![0.5, 1.0, 2.0],
            sigmas: (1..=6).map(|k| 10f64.powi(-k)).collect(),
        }
    }
}

/// Linear-limit table for every `(beta, t, eps)` and, when `n > 1`, the null-interval table.
pub fn limits(spec: ExperimentSpec, opts: &LimitsOptions, log: &mut dyn Write) -> CliResult<()> {
    let params = spec.params()?;
    let mut rows = Vec::new();
    let mut violations = 0;
    for &beta in &opts.betas {
        for &t in &opts.times {
            for r in linear_limit_check(t, beta, &opts.epsilons)? {
                let bound = 2.0 * beta * t * t * r.epsilon * (-beta * t).exp();
                let ok = r.deviation <= bound;
                violations += usize::from(!ok);
                rows.push(vec![
                    num(beta),
                    num(t),
                    num(r.epsilon),
                    num(r.value),
                    num((-beta * t).exp()),
                    num(r.deviation),
                    num(bound),
                    ok.to_string(),
                ]);
            }
        }
    }
    let mut null_rows = Vec::new();
    let mut null_monotone = true;
    if !params.is_linear() {
        for &x in &opts.points {
            let check = null_interval_check(&[x], &params, &opts.sigmas, spec.quad())?;
            null_monotone &= check.monotone;
            null_rows.extend(check.rows.iter().map(|&(s, v)| vec![num(x), num(s), num(v)]));
        }
    }
    prepare(&spec)?;
    write_csv(
        &spec.out.join("limits.csv"),
        &["beta", "t", "epsilon", "value", "limit", "deviation", "bound", "within_bound"],
        &rows,
    )?;
    if !null_rows.is_empty() {
        write_csv(&spec.out.join("null_interval.csv"), &["x", "sigma", "integral"], &null_rows)?;
    }
    let body = json!({
        "limit_rows": rows.len(),
        "violations": violations,
        "null_interval_monotone": if null_rows.is_empty() { Value::Null } else { json!(null_monotone) },
    });
    write_json(&spec.out.join("limits.json"), &envelope("limits", &spec, body))?;
    writeln!(log, "{} limit rows, {violations} outside the bound", rows.len()).ok();
    if violations > 0 || !null_monotone {
        return Err(CliError::Failed(format!(
            "{violations} limit rows exceed the bound; null-interval monotone: {null_monotone}"
        )));
    }
    Ok(())
}

pub fn claims(out: &Path, opts: &ClaimsOptions, log: &mut dyn Write) -> CliResult<()> {
    let rows = run_claims(opts)?;
    ensure_dir(out)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.id.clone(),
                r.claim.clone(),
                r.status.as_str().to_string(),
                num(r.measured),
                r.relation.as_str().to_string(),
                num(r.tolerance),
                r.dim.to_string(),
            ]
        })
        .collect();
    write_csv(
        &out.join("claims.csv"),
        &["id", "claim", "status", "measured", "relation", "tolerance", "dim"],
        &csv_rows,
    )?;
    let failing: Vec<&str> = rows.iter().filter(|r| r.status == Status::Fail).map(|r| r.id.as_str()).collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "claims",
        "settings": { "dims": opts.dims, "rel_tol": opts.rel_tol },
        "result": { "rows": rows, "all_pass": failing.is_empty() },
    });
    write_json(&out.join("claims.json"), &doc)?;
    for r in &rows {
        writeln!(
            log,
            "{}  {:<34} {} {} {}",
            r.status.as_str(),
            r.id,
            num(r.measured),
            r.relation.as_str(),
            num(r.tolerance)
        )
        .ok();
    }
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failing claims: {}", failing.join(", "))))
    }
}
