use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nws_lab::commands::{self, LimitsOptions};
use nws_lab::{ClaimsOptions, CliError, CliResult, ExperimentSpec};

/// Verification lab for u_t - nu lap(u) + beta u^n = 0.
#[derive(Parser)]
#[command(name = "nws-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the full operator to candidates and write residual reports.
    Residual {
        #[command(flatten)]
        common: Common,
        /// Evaluate the time integral at x = 0 first; fails with exit 2 where it diverges.
        #[arg(long)]
        x0_check: bool,
    },
    /// Run the claims suite and write claims.csv / claims.json.
    Claims {
        #[arg(long, default_value = "nws-out")]
        out: PathBuf,
        /// Comma-separated dimensions to keep (default 1,2,3).
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        /// Relative quadrature tolerance for every check.
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Integrate from the first candidate at t_start and write snapshots.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the solver with the first candidate over [t_start, t_end].
    Track {
        #[command(flatten)]
        common: Common,
    },
    /// Grid-refinement study against the first candidate as exact solution.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Linear-limit and null-interval tables.
    Limits {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = LimitsOptions::default().betas)]
        betas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = LimitsOptions::default().times)]
        times: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = LimitsOptions::default().epsilons)]
        epsilons: Vec<f64>,
        /// Points x != 0 for the null-interval table.
        #[arg(long, value_delimiter = ',', default_values_t = LimitsOptions::default().points)]
        points: Vec<f64>,
    },
}

/// Experiment settings; each flag overrides the matching key of `--config`.
#[derive(Args)]
struct Common {
    /// key=value experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    t: Option<String>,
    /// Candidate descriptor; repeatable.
    #[arg(long = "candidate")]
    candidates: Vec<String>,
    /// <dim>d:<lo>:<hi>:<points>
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    rel_tol: Option<String>,
    #[arg(long)]
    abs_tol: Option<String>,
    /// periodic | dirichlet | neumann
    #[arg(long)]
    bc: Option<String>,
    /// Solver step or "auto".
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    safety: Option<String>,
    #[arg(long)]
    t_start: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    /// Comma-separated snapshot times.
    #[arg(long)]
    snapshots: Option<String>,
    /// Comma-separated grid spacings, each half the previous.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn into_spec(self) -> CliResult<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
                ExperimentSpec::parse(&text)?
            }
            None => ExperimentSpec::default(),
        };
        let scalars = [
            ("name", self.name),
            ("nu", self.nu),
            ("beta", self.beta),
            ("n", self.n),
            ("t", self.t),
            ("grid", self.grid),
            ("order", self.order),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("bc", self.bc),
            ("dt", self.dt),
            ("safety", self.safety),
            ("t_start", self.t_start),
            ("t_end", self.t_end),
            ("snapshots", self.snapshots),
            ("levels", self.levels),
        ];
        for (key, value) in scalars {
            if let Some(v) = value {
                spec.set(key, &v)?;
            }
        }
        if !self.candidates.is_empty() {
            spec.candidates.clear();
            for c in &self.candidates {
                spec.set("candidate", c)?;
            }
        }
        if let Some(out) = self.out {
            spec.out = out;
        }
        Ok(spec)
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("NWS_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("NWS_LAB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Residual { common, x0_check } => commands::residual(common.into_spec()?, x0_check, &mut stdout),
        Command::Claims { out, dims, rel_tol } => {
            let opts = ClaimsOptions {
                dims: if dims.is_empty() { vec![1, 2, 3] } else { dims },
                rel_tol,
            };
            commands::claims(&out, &opts, &mut stdout)
        }
        Command::Solve { common } => commands::solve_cmd(common.into_spec()?, &mut stdout),
        Command::Track { common } => commands::track(common.into_spec()?, &mut stdout),
        Command::Converge { common } => commands::converge(common.into_spec()?, &mut stdout),
        Command::Limits {
            common,
            betas,
            times,
            epsilons,
            points,
        } => {
            let opts = LimitsOptions {
                betas,
                times,
                epsilons,
                points,
                ..LimitsOptions::default()
            };
            commands::limits(common.into_spec()?, &opts, &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nws-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
