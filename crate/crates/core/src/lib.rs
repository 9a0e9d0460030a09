//! Numerical core of the NWS verification lab.
//!
//! The equation is `u_t - nu lap(u) + beta u^n = 0` on `R^d`, `d` in 1..=3.
//! The crate provides the heat kernel and its derivatives, the singular time
//! integral `I(x, t; n) = int_0^t G^(n-1) d tau`, closed-form candidates, a
//! finite-difference residual engine, and an explicit reference solver.
//!
//! Everything is generic over the scalar ([`Real`], implemented for `f32` and
//! `f64`); the `*64` and `*32` aliases below fix the precision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod candidates;
pub mod error;
pub mod field;
pub mod grid;
pub mod kernel;
mod par;
pub mod params;
pub mod quadrature;
pub mod residual;
pub mod scalar;
pub mod solver;

pub use candidates::{alpha_factor, initial_mass_check, linear_limit_check, Candidate, Profile};
pub use error::{LabError, Result};
pub use field::{norms, Field, ResidualReport};
pub use grid::GridSpec;
pub use kernel::{heat_kernel, heat_kernel_grad, heat_kernel_laplacian, heat_kernel_time_derivative};
pub use params::{critical_power, PdeParams};
pub use quadrature::{integrate_G_power, null_interval_check, QuadResult, QuadTolerance};
pub use residual::{
    apply_operator, green_ansatz_residue, residue_scaling_sweep, separable_classification, SpatialOrder,
    StencilSpec,
};
pub use scalar::Real;
pub use solver::{
    convergence_study, solve, track_candidate, BoundaryCondition, ConvergenceProblem, SolverConfig, TimeStep,
    Trajectory,
};

pub type Params64 = PdeParams<f64>;
pub type Grid64 = GridSpec<f64>;
pub type Field64 = Field<f64>;
pub type Candidate64 = Candidate<f64>;
pub type Report64 = ResidualReport<f64>;
pub type Stencil64 = StencilSpec<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;

pub type Params32 = PdeParams<f32>;
pub type Grid32 = GridSpec<f32>;
pub type Field32 = Field<f32>;
pub type Candidate32 = Candidate<f32>;
pub type Report32 = ResidualReport<f32>;
pub type SolverConfig32 = SolverConfig<f32>;
