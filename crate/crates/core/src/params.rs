use crate::error::{LabError, Result};
use crate::scalar::{integer_power, Real};

/// One instance of `u_t - nu * lap(u) + beta * u^n = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams<T> {
    nu: T,
    beta: T,
    n: T,
}

impl<T: Real> PdeParams<T> {
    /// Rejects `nu <= 0`, `beta <= 0`, `n < 1` and non-finite input. `n = 1` is the linear case.
    pub fn new(nu: T, beta: T, n: T) -> Result<Self> {
        if !(nu.is_finite() && nu > T::zero()) {
            return Err(LabError::invalid(format!("nu must be positive and finite, got {nu}")));
        }
        if !(beta.is_finite() && beta > T::zero()) {
            return Err(LabError::invalid(format!("beta must be positive and finite, got {beta}")));
        }
        if !(n.is_finite() && n >= T::one()) {
            return Err(LabError::invalid(format!("n must be finite and >= 1, got {n}")));
        }
        Ok(Self { nu, beta, n })
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn n(&self) -> T {
        self.n
    }

    pub fn is_linear(&self) -> bool {
        self.n == T::one()
    }

    pub fn has_integer_power(&self) -> bool {
        integer_power(self.n).is_some()
    }

    /// Same `nu` and `beta`, different power.
    pub fn with_n(&self, n: T) -> Result<Self> {
        Self::new(self.nu, self.beta, n)
    }

    pub(crate) fn require_nonlinear(&self, what: &str) -> Result<()> {
        if self.n > T::one() {
            Ok(())
        } else {
            Err(LabError::domain(format!("{what} requires n > 1, got n = {}", self.n)))
        }
    }
}

/// Power at which `G^(n-1)` stops being integrable at the origin: `1 + 2/dim`.
pub fn critical_power<T: Real>(dim: usize) -> T {
    T::one() + T::lit(2.0) / T::from_usize_lossy(dim)
}
