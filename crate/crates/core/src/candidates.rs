//! Closed-form candidate solutions and the limit checks argued for them.
//!
//! * Green ansatz (1D): `u = B G / (beta (n-1) I(x,t) + C)^(1/(n-1))`, where `I` is the
//!   time integral from [`crate::quadrature`].
//! * Separable: `u = k(x) / (beta (n-1) k(x)^(n-1) t + 1)^(1/(n-1))` in 1-3 dimensions.
//!   Its time derivative cancels `beta u^n` exactly, so the full residual is `-nu lap u`.
//! * Linear heat: `u = G(x, t + t_offset) e^(-beta t)`, exact for `n = 1`.
//! * Trivial: `u = 0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{LabError, Result};
use crate::grid::GridSpec;
use crate::kernel::{required_half_width, KernelPoint};
use crate::params::PdeParams;
use crate::quadrature::{integrate_G_power, QuadTolerance};
use crate::scalar::{real_pow, Real};

/// Spatial profile `k(x)` of the separable family.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<T> {
    Constant(T),
    /// `k(x) = sum c_i x_i + offset`; one coefficient per axis.
    Linear { coeffs: Vec<T>, offset: T },
    /// `k(x) = amplitude * exp(-|x|^2 / width^2)`.
    Gaussian { amplitude: T, width: T },
}

impl<T: Real> Profile<T> {
    pub fn value(&self, x: &[T]) -> Result<T> {
        match self {
            Profile::Constant(c) => Ok(*c),
            Profile::Linear { coeffs, offset } => {
                if coeffs.len() != x.len() {
                    return Err(LabError::invalid(format!(
                        "linear profile has {} coefficients but the point has {} coordinates",
                        coeffs.len(),
                        x.len()
                    )));
                }
                Ok(coeffs.iter().zip(x).fold(*offset, |s, (&c, &xi)| s + c * xi))
            }
            Profile::Gaussian { amplitude, width } => {
                if !(*width > T::zero()) {
                    return Err(LabError::invalid(format!("gaussian width must be positive, got {width}")));
                }
                let r2 = x.iter().fold(T::zero(), |s, &v| s + v * v);
                Ok(*amplitude * (-r2 / (*width * *width)).exp())
            }
        }
    }

    /// True for profiles that are constant in space.
    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Constant(_) => true,
            Profile::Linear { coeffs, .. } => coeffs.iter().all(|c| *c == T::zero()),
            Profile::Gaussian { amplitude, .. } => *amplitude == T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Candidate<T> {
    /// Amplitude `B` and constant of integration `C >= 0`. One-dimensional only.
    GreenAnsatz { amplitude: T, constant: T },
    Separable(Profile<T>),
    LinearHeat { t_offset: T },
    Trivial,
}

impl<T: Real> Candidate<T> {
    pub fn green_ansatz(amplitude: T, constant: T) -> Self {
        Candidate::GreenAnsatz { amplitude, constant }
    }

    pub fn constant(c: T) -> Self {
        Candidate::Separable(Profile::Constant(c))
    }

    pub fn linear(coeffs: Vec<T>, offset: T) -> Self {
        Candidate::Separable(Profile::Linear { coeffs, offset })
    }

    pub fn gaussian(amplitude: T, width: T) -> Self {
        Candidate::Separable(Profile::Gaussian { amplitude, width })
    }

    /// Whether `u_t` has a closed form (everything except the Green ansatz).
    pub fn has_analytic_time_derivative(&self) -> bool {
        !matches!(self, Candidate::GreenAnsatz { .. })
    }

    pub fn eval(&self, x: &[T], t: T, params: &PdeParams<T>) -> Result<T> {
        self.eval_with(x, t, params, QuadTolerance::default())
    }

    pub fn eval_with(&self, x: &[T], t: T, params: &PdeParams<T>, tol: QuadTolerance<T>) -> Result<T> {
        match self {
            Candidate::Trivial => {
                require_time(t)?;
                Ok(T::zero())
            }
            Candidate::Separable(profile) => {
                require_time(t)?;
                params.require_nonlinear("the separable candidate")?;
                separable_value(profile.value(x)?, t, params)
            }
            Candidate::LinearHeat { t_offset } => {
                require_time(t)?;
                require_offset(*t_offset)?;
                let g = KernelPoint::new(x, t + *t_offset, params.nu())?.value();
                Ok(g * (-params.beta() * t).exp())
            }
            Candidate::GreenAnsatz { amplitude, constant } => {
                if x.len() != 1 {
                    return Err(LabError::invalid("the Green ansatz is one-dimensional"));
                }
                params.require_nonlinear("the Green ansatz")?;
                let g = KernelPoint::new(x, t, params.nu())?.value();
                Ok(*amplitude * g * alpha_factor_with(x, t, params, *constant, tol)?)
            }
        }
    }

    /// Closed-form `du/dt`, or `None` for the Green ansatz.
    pub fn time_derivative(&self, x: &[T], t: T, params: &PdeParams<T>) -> Option<Result<T>> {
        match self {
            Candidate::Trivial => Some(require_time(t).map(|_| T::zero())),
            Candidate::Separable(profile) => Some((|| {
                require_time(t)?;
                params.require_nonlinear("the separable candidate")?;
                separable_time_derivative(profile.value(x)?, t, params)
            })()),
            Candidate::LinearHeat { t_offset } => Some((|| {
                require_time(t)?;
                require_offset(*t_offset)?;
                let kp = KernelPoint::new(x, t + *t_offset, params.nu())?;
                let beta = params.beta();
                Ok((kp.time_derivative() - beta * kp.value()) * (-beta * t).exp())
            })()),
            Candidate::GreenAnsatz { .. } => None,
        }
    }

    /// Samples the candidate on every grid point at time `t`.
    pub fn sample(&self, grid: &GridSpec<T>, t: T, params: &PdeParams<T>, tol: QuadTolerance<T>) -> Result<crate::field::Field<T>> {
        crate::field::Field::sample(grid.clone(), t, |x| self.eval_with(x, t, params, tol))
    }
}

fn require_time<T: Real>(t: T) -> Result<()> {
    if t.is_finite() && t >= T::zero() {
        Ok(())
    } else {
        Err(LabError::domain(format!("candidate time must be >= 0, got {t}")))
    }
}

fn require_offset<T: Real>(t_offset: T) -> Result<()> {
    if t_offset.is_finite() && t_offset > T::zero() {
        Ok(())
    } else {
        Err(LabError::invalid(format!("linear-heat time offset must be positive, got {t_offset}")))
    }
}

/// Bracket `D = beta (n-1) k^(n-1) t + 1` of the separable family.
fn separable_bracket<T: Real>(k: T, t: T, params: &PdeParams<T>) -> Result<T> {
    let m = params.n() - T::one();
    let km = real_pow(k, m).ok_or_else(|| {
        LabError::domain(format!("negative profile value {k} with fractional n = {}", params.n()))
    })?;
    let d = params.beta() * m * km * t + T::one();
    if d > T::zero() {
        Ok(d)
    } else {
        Err(LabError::domain(format!(
            "separable bracket beta (n-1) k^(n-1) t + 1 = {d} is not positive (k = {k}, t = {t})"
        )))
    }
}

/// `k / D^(1/(n-1))`; equals `k` exactly at `t = 0`.
pub fn separable_value<T: Real>(k: T, t: T, params: &PdeParams<T>) -> Result<T> {
    let d = separable_bracket(k, t, params)?;
    Ok(k * d.powf(-T::one() / (params.n() - T::one())))
}

/// `-beta k^n D^(-n/(n-1))`.
pub fn separable_time_derivative<T: Real>(k: T, t: T, params: &PdeParams<T>) -> Result<T> {
    let d = separable_bracket(k, t, params)?;
    let n = params.n();
    let kn = real_pow(k, n).ok_or_else(|| LabError::domain(format!("negative profile value {k} with fractional n = {n}")))?;
    Ok(-params.beta() * kn * d.powf(-n / (n - T::one())))
}

/// Bracket factor `(beta (n-1) I(x,t) + C)^(-1/(n-1))` with the default tolerance.
pub fn alpha_factor<T: Real>(x: &[T], t: T, params: &PdeParams<T>, constant: T) -> Result<T> {
    alpha_factor_with(x, t, params, constant, QuadTolerance::default())
}

/// At `t = 0` the time integral runs over the null interval and the factor is `C^(-1/(n-1))`.
pub fn alpha_factor_with<T: Real>(
    x: &[T],
    t: T,
    params: &PdeParams<T>,
    constant: T,
    tol: QuadTolerance<T>,
) -> Result<T> {
    params.require_nonlinear("the alpha factor")?;
    if !(constant.is_finite() && constant >= T::zero()) {
        return Err(LabError::invalid(format!("constant of integration must be >= 0, got {constant}")));
    }
    require_time(t)?;
    let m = params.n() - T::one();
    let integral = if t == T::zero() {
        T::zero()
    } else {
        integrate_G_power(x, t, params, tol)?.require_converged()?.value
    };
    let base = params.beta() * m * integral + constant;
    if !(base > T::zero()) {
        return Err(LabError::domain(format!(
            "alpha-factor base beta (n-1) I + C = {base} is not positive; the real branch is undefined"
        )));
    }
    Ok(base.powf(-T::one() / m))
}

/// One row of the linear-limit table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow<T> {
    pub epsilon: T,
    pub value: T,
    pub deviation: T,
}

/// `(1 + beta eps t)^(-1/eps)` against `exp(-beta t)` for each `eps = n - 1`.
pub fn linear_limit_check<T: Real>(t: T, beta: T, epsilons: &[T]) -> Result<Vec<LimitRow<T>>> {
    if !(t.is_finite() && t >= T::zero()) || !(beta.is_finite() && beta > T::zero()) {
        return Err(LabError::invalid(format!("need t >= 0 and beta > 0, got t = {t}, beta = {beta}")));
    }
    if epsilons.iter().any(|&e| !(e > T::zero())) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::invalid("epsilons must be positive and strictly decreasing"));
    }
    let limit = (-beta * t).exp();
    Ok(epsilons
        .iter()
        .map(|&eps| {
            let value = (-(beta * eps * t).ln_1p() / eps).exp();
            LimitRow {
                epsilon: eps,
                value,
                deviation: (value - limit).abs(),
            }
        })
        .collect())
}

/// Trapezoid masses of a Green-ansatz candidate at shrinking times.
#[derive(Debug, Clone, PartialEq)]
pub struct MassCheck<T> {
    pub rows: Vec<(T, T)>,
    /// `B / C^(1/(n-1))`, the mass the delta limit predicts.
    pub target: T,
    /// `h > sqrt(2 nu t_min) / 4`.
    pub under_resolved: bool,
    /// Some face is closer than `8 sqrt(2 nu t_max)` to the origin.
    pub narrow: bool,
    /// The origin node hit the divergent integral and contributed its limit value 0.
    pub origin_limit_used: bool,
}

pub fn initial_mass_check<T: Real>(
    amplitude: T,
    constant: T,
    params: &PdeParams<T>,
    times: &[T],
    quad_grid: &GridSpec<T>,
    tol: QuadTolerance<T>,
) -> Result<MassCheck<T>> {
    params.require_nonlinear("the initial-mass check")?;
    if quad_grid.dim() != 1 {
        return Err(LabError::invalid("the initial-mass check is one-dimensional"));
    }
    if !(constant > T::zero()) {
        return Err(LabError::invalid("the initial-mass check needs C > 0"));
    }
    if times.is_empty() || times.iter().any(|&t| !(t > T::zero())) || times.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::invalid("times must be positive and strictly decreasing"));
    }
    let nu = params.nu();
    let t_min = *times.last().unwrap();
    let under_resolved = quad_grid.spacing(0) > (T::lit(2.0) * nu * t_min).sqrt() / T::lit(4.0);
    let w = required_half_width(nu, times[0]);
    let narrow = -quad_grid.lo()[0] < w || quad_grid.hi()[0] < w;
    let candidate = Candidate::green_ansatz(amplitude, constant);

    let mut origin_limit_used = false;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let terms: Vec<(T, bool)> = {
            let vals = crate::par::map_points(quad_grid, |i, x| {
                let weight = quad_grid.trapezoid_weight(i);
                match candidate.eval_with(x, t, params, tol) {
                    Ok(u) => Ok(weight * u),
                    // bracket diverges, so the factor and the integrand vanish
                    Err(LabError::Divergent { .. }) => Ok(T::nan()),
                    Err(e) => Err(e.at(crate::field::to_f64(x))),
                }
            })?;
            vals.into_iter().map(|v| if v.is_nan() { (T::zero(), true) } else { (v, false) }).collect()
        };
        origin_limit_used |= terms.iter().any(|&(_, hit)| hit);
        rows.push((t, terms.into_iter().fold(T::zero(), |s, (v, _)| s + v)));
    }
    Ok(MassCheck {
        rows,
        target: amplitude * constant.powf(-T::one() / (params.n() - T::one())),
        under_resolved,
        narrow,
        origin_limit_used,
    })
}

impl<T: Real> fmt::Display for Candidate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Candidate::GreenAnsatz { amplitude, constant } => write!(f, "green-ansatz:B={amplitude},C={constant}"),
            Candidate::Separable(Profile::Constant(c)) => write!(f, "separable:constant:{c}"),
            Candidate::Separable(Profile::Linear { coeffs, offset }) => {
                write!(f, "separable:linear:")?;
                for c in coeffs {
                    write!(f, "{c},")?;
                }
                write!(f, "{offset}")
            }
            Candidate::Separable(Profile::Gaussian { amplitude, width }) => {
                write!(f, "separable:gaussian:{amplitude},{width}")
            }
            Candidate::LinearHeat { t_offset } => write!(f, "linear-heat:{t_offset}"),
            Candidate::Trivial => write!(f, "trivial"),
        }
    }
}

fn parse_num<T: Real>(s: &str) -> Result<T> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| LabError::invalid(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(LabError::invalid(format!("not a finite number: {s:?}")));
    }
    T::from_f64(v).ok_or_else(|| LabError::invalid(format!("{s} does not fit the scalar type")))
}

fn parse_list<T: Real>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(parse_num).collect()
}

/// Parses the descriptor text written by `Display`, e.g. `green-ansatz:B=1,C=1`,
/// `separable:linear:1,0`, `separable:gaussian:1,0.5`, `linear-heat:0.5`, `trivial`.
impl<T: Real> FromStr for Candidate<T> {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        match family {
            "trivial" if rest.is_empty() => Ok(Candidate::Trivial),
            "linear-heat" => Ok(Candidate::LinearHeat { t_offset: parse_num(rest)? }),
            "green-ansatz" => {
                let (mut b, mut c) = (T::one(), T::one());
                for part in rest.split(',').filter(|p| !p.is_empty()) {
                    match part.split_once('=') {
                        Some(("B", v)) => b = parse_num(v)?,
                        Some(("C", v)) => c = parse_num(v)?,
                        _ => return Err(LabError::invalid(format!("unknown green-ansatz field {part:?}"))),
                    }
                }
                Ok(Candidate::GreenAnsatz { amplitude: b, constant: c })
            }
            "separable" => {
                let (kind, args) = rest.split_once(':').unwrap_or((rest, ""));
                match kind {
                    "constant" => Ok(Candidate::constant(parse_num(args)?)),
                    "linear" => {
                        let mut v = parse_list(args)?;
                        if !(2..=4).contains(&v.len()) {
                            return Err(LabError::invalid("linear profile needs 1-3 coefficients and an offset"));
                        }
                        let offset = v.pop().unwrap();
                        Ok(Candidate::linear(v, offset))
                    }
                    "gaussian" => match parse_list::<T>(args)?.as_slice() {
                        &[a, w] => Ok(Candidate::gaussian(a, w)),
                        _ => Err(LabError::invalid("gaussian profile needs amplitude,width")),
                    },
                    _ => Err(LabError::invalid(format!("unknown separable profile {kind:?}"))),
                }
            }
            _ => Err(LabError::invalid(format!("unknown candidate descriptor {s:?}"))),
        }
    }
}
