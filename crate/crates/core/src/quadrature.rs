//! `I(x,t;n) = int_0^t G(x,tau)^(n-1) dtau`, the time integral inside the alpha factor.
//!
//! `[0,t]` is split at `t/2`. On `(0, t/2]` the substitution `tau = (t/2) e^(-s)` turns
//! the singular endpoint into an exponentially decaying tail in `s`:
//!
//! * at `x = 0` the `s`-integrand is exactly `c * e^(-(1-p) s)` with
//!   `p = (n-1) dim / 2`, so the tail beyond the cut is added in closed form;
//! * at `x != 0` the factor `exp(-(n-1)|x|^2 / (4 nu tau))` decays
//!   super-exponentially and the range is cut where it underflows.
//!
//! Both pieces are integrated together by one globally adaptive
//! Gauss-Kronrod (10/21) bisection with a shared subdivision budget.

use crate::error::{LabError, Result};
use crate::kernel::KernelPoint;
use crate::params::{critical_power, PdeParams};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance<T> {
    pub rel: T,
    pub abs: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadTolerance<T> {
    fn default() -> Self {
        Self {
            rel: T::lit(1e-10),
            abs: T::lit(1e-14),
            max_subdivisions: 60,
        }
    }
}

impl<T: Real> QuadTolerance<T> {
    pub fn new(rel: T, abs: T) -> Self {
        Self {
            rel,
            abs,
            ..Self::default()
        }
    }

    /// Both tolerances divided by `factor`.
    pub fn tightened(self, factor: T) -> Self {
        Self {
            rel: self.rel / factor,
            abs: self.abs / factor,
            ..self
        }
    }

    fn target(&self, value: T) -> T {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error_estimate: T,
    /// `abs_error_estimate <= max(abs, rel * |value|)` was reached.
    pub converged: bool,
    pub subdivisions: usize,
}

impl<T: Real> QuadResult<T> {
    /// Turns a non-converged result into [`LabError::NonConvergence`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(LabError::NonConvergence {
                value: self.value.as_f64(),
                error: self.abs_error_estimate.as_f64(),
                subdivisions: self.subdivisions,
            })
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

// Gauss weights belong to XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// One 21-point Kronrod evaluation with the QUADPACK error heuristic.
fn gk21<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[10]);
    let mut gauss = T::zero();
    let mut resabs = fc.abs() * T::lit(WGK[10]);
    let mut f1 = [T::zero(); 10];
    let mut f2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let (l, r) = (f(center - dx), f(center + dx));
        f1[j] = l;
        f2[j] = r;
        kronrod = kronrod + T::lit(WGK[j]) * (l + r);
        resabs = resabs + T::lit(WGK[j]) * (l.abs() + r.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * (l + r);
        }
    }
    let mean = kronrod * half;
    let mut resasc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        resasc = resasc + T::lit(WGK[j]) * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = kronrod * half_len;
    let resabs = resabs * half_len.abs();
    let resasc = resasc * half_len.abs();
    let mut error = ((kronrod - gauss) * half_len).abs();
    if resasc != T::zero() && error != T::zero() {
        error = resasc * T::one().min((T::lit(200.0) * error / resasc).powf(T::lit(1.5)));
    }
    let floor = T::lit(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(floor);
    }
    Segment { a, b, value, error }
}

/// Globally adaptive GK21 over `[breaks[0], breaks[last]]`, pre-split at every break.
///
/// `max_subdivisions` bounds the number of bisections. Ties in the error
/// estimate are broken by position, so the result is deterministic.
pub fn adaptive_gk21<T: Real, F: Fn(T) -> T>(f: F, breaks: &[T], tol: QuadTolerance<T>) -> QuadResult<T> {
    let mut segments: Vec<Segment<T>> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21(&f, w[0], w[1]))
        .collect();
    let mut subdivisions = 0;
    loop {
        let value = segments.iter().fold(T::zero(), |s, g| s + g.value);
        let error = segments.iter().fold(T::zero(), |s, g| s + g.error);
        let converged = error <= tol.target(value);
        if converged || subdivisions >= tol.max_subdivisions || segments.is_empty() {
            return QuadResult {
                value,
                abs_error_estimate: error,
                converged: converged || segments.is_empty(),
                subdivisions,
            };
        }
        let worst = segments
            .iter()
            .enumerate()
            .fold(0, |w, (i, g)| if g.error > segments[w].error { i } else { w });
        let g = segments[worst];
        let mid = T::lit(0.5) * (g.a + g.b);
        if !(mid > g.a && mid < g.b) {
            // interval exhausted at machine resolution
            return QuadResult {
                value,
                abs_error_estimate: error,
                converged: false,
                subdivisions,
            };
        }
        segments[worst] = gk21(&f, g.a, mid);
        segments.insert(worst + 1, gk21(&f, mid, g.b));
        subdivisions += 1;
    }
}

/// Cut in `s` for the `x = 0` case; the remainder is added analytically.
const ORIGIN_CUT: f64 = 30.0;

/// `int_0^t G(x,tau)^(n-1) dtau` for `n > 1`, `t > 0`.
///
/// At `x = 0` with `n >= 1 + 2/dim` the integrand behaves like `tau^-p`, `p >= 1`,
/// and the call fails with [`LabError::Divergent`]. A result that misses the
/// tolerance within the subdivision budget is returned with `converged = false`.
#[allow(non_snake_case)]
pub fn integrate_G_power<T: Real>(x: &[T], t: T, params: &PdeParams<T>, tol: QuadTolerance<T>) -> Result<QuadResult<T>> {
    if !(t.is_finite() && t > T::zero()) {
        return Err(LabError::domain(format!("time integral needs t > 0, got {t}")));
    }
    params.require_nonlinear("the alpha-factor time integral")?;
    let nu = params.nu();
    let m = params.n() - T::one();
    let dim = x.len();
    KernelPoint::new(x, t, nu)?;
    let r2 = x.iter().fold(T::zero(), |s, &v| s + v * v);
    let p = m * T::from_usize_lossy(dim) / T::lit(2.0);
    let critical = critical_power::<T>(dim);
    if r2 == T::zero() && params.n() >= critical {
        return Err(LabError::Divergent {
            exponent: p.as_f64(),
            critical_power: critical.as_f64(),
        });
    }

    let half_t = t / T::lit(2.0);
    // m * log G(x, tau)
    let log_gm = |tau: T| -> T {
        let four = T::lit(4.0);
        m * (-r2 / (four * nu * tau)
            - T::from_usize_lossy(dim) / T::lit(2.0) * (four * T::PI() * nu * tau).ln())
    };
    let log_fa = |s: T| -> T {
        let tau = half_t * (-s).exp();
        tau.ln() + log_gm(tau)
    };

    let cut = if r2 == T::zero() {
        T::lit(ORIGIN_CUT)
    } else {
        let k = T::underflow_exponent();
        let tau_s = m * r2 / (T::lit(4.0) * nu * k);
        let mut s = (half_t / tau_s).ln().max(T::zero());
        let limit = k * T::lit(4.0);
        while log_fa(s) > -k && s < limit {
            s = s + T::one();
        }
        if s == T::zero() && log_fa(s) <= -k {
            T::zero()
        } else {
            s
        }
    };

    let integrand = |w: T| -> T {
        if w <= cut {
            log_fa(w).exp()
        } else {
            log_gm(half_t + (w - cut)).exp()
        }
    };
    let mut breaks = Vec::with_capacity(3);
    if cut > T::zero() {
        breaks.push(T::zero());
    }
    breaks.push(cut);
    breaks.push(cut + half_t);
    let mut result = adaptive_gk21(integrand, &breaks, tol);

    if r2 == T::zero() {
        let tail = log_fa(cut).exp() / (T::one() - p);
        result.value = result.value + tail;
        result.converged = result.abs_error_estimate <= tol.target(result.value);
    }
    Ok(result)
}

/// `I(x, sigma)` for a decreasing sequence of `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullIntervalCheck<T> {
    pub rows: Vec<(T, T)>,
    /// Values strictly decrease along the sequence, or are non-increasing once they hit zero.
    pub monotone: bool,
}

/// Evaluates the time integral over shrinking intervals `[0, sigma]`.
pub fn null_interval_check<T: Real>(
    x: &[T],
    params: &PdeParams<T>,
    sigmas: &[T],
    tol: QuadTolerance<T>,
) -> Result<NullIntervalCheck<T>> {
    if sigmas.is_empty() {
        return Err(LabError::invalid("null-interval check needs at least one sigma"));
    }
    if sigmas.iter().any(|&s| !(s > T::zero())) || sigmas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::invalid("sigmas must be positive and strictly decreasing"));
    }
    let rows = sigmas
        .iter()
        .map(|&s| {
            let q = integrate_G_power(x, s, params, tol)?.require_converged()?;
            Ok((s, q.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows
        .windows(2)
        .all(|w| w[1].1 < w[0].1 || (w[1].1 == T::zero() && w[0].1 == T::zero()));
    Ok(NullIntervalCheck { rows, monotone })
}
