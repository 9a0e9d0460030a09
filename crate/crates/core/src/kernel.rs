//! Heat kernel `G(x,t) = exp(-|x|^2/(4 nu t)) / (4 pi nu t)^(dim/2)` and its derivatives.
//!
//! The multi-dimensional kernel is the product of 1D kernels. Values are
//! computed in log space so far tails underflow to zero instead of producing
//! `0 * inf` artefacts. `t = 0` is the distributional (delta) limit and is
//! rejected rather than special-cased.

use crate::error::{LabError, Result};
use crate::grid::GridSpec;
use crate::scalar::Real;

/// Arguments of the kernel. Construction checks `t > 0`, `nu > 0` and `1 <= dim <= 3`.
#[derive(Debug, Clone, Copy)]
pub struct KernelPoint<'a, T> {
    x: &'a [T],
    t: T,
    nu: T,
    r2: T,
}

impl<'a, T: Real> KernelPoint<'a, T> {
    pub fn new(x: &'a [T], t: T, nu: T) -> Result<Self> {
        if !(1..=3).contains(&x.len()) {
            return Err(LabError::invalid(format!("kernel dimension must be 1-3, got {}", x.len())));
        }
        if !(t > T::zero()) {
            return Err(LabError::domain(format!(
                "heat kernel needs t > 0 (t = {t}); t = 0 is the delta-distribution limit, not a value"
            )));
        }
        if !(nu > T::zero()) {
            return Err(LabError::invalid(format!("nu must be positive, got {nu}")));
        }
        let r2 = x.iter().fold(T::zero(), |s, &v| s + v * v);
        Ok(Self { x, t, nu, r2 })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    fn dim_t(&self) -> T {
        T::from_usize_lossy(self.dim())
    }

    pub fn log_value(&self) -> T {
        let four = T::lit(4.0);
        -self.r2 / (four * self.nu * self.t)
            - self.dim_t() / T::lit(2.0) * (four * T::PI() * self.nu * self.t).ln()
    }

    pub fn value(&self) -> T {
        self.log_value().exp()
    }

    /// `dG/dx_i = -x_i / (2 nu t) * G`.
    pub fn grad(&self) -> Vec<T> {
        let g = self.value();
        let c = T::lit(2.0) * self.nu * self.t;
        self.x.iter().map(|&xi| -xi / c * g).collect()
    }

    /// `lap G = (|x|^2 / (4 nu^2 t^2) - dim / (2 nu t)) * G`.
    pub fn laplacian(&self) -> T {
        let (nu, t) = (self.nu, self.t);
        (self.r2 / (T::lit(4.0) * nu * nu * t * t) - self.dim_t() / (T::lit(2.0) * nu * t)) * self.value()
    }

    /// `dG/dt = (|x|^2 / (4 nu t^2) - dim / (2 t)) * G`.
    pub fn time_derivative(&self) -> T {
        let t = self.t;
        (self.r2 / (T::lit(4.0) * self.nu * t * t) - self.dim_t() / (T::lit(2.0) * t)) * self.value()
    }
}

pub fn heat_kernel<T: Real>(x: &[T], t: T, nu: T) -> Result<T> {
    Ok(KernelPoint::new(x, t, nu)?.value())
}

pub fn heat_kernel_grad<T: Real>(x: &[T], t: T, nu: T) -> Result<Vec<T>> {
    Ok(KernelPoint::new(x, t, nu)?.grad())
}

pub fn heat_kernel_laplacian<T: Real>(x: &[T], t: T, nu: T) -> Result<T> {
    Ok(KernelPoint::new(x, t, nu)?.laplacian())
}

pub fn heat_kernel_time_derivative<T: Real>(x: &[T], t: T, nu: T) -> Result<T> {
    Ok(KernelPoint::new(x, t, nu)?.time_derivative())
}

/// Trapezoid mass of the kernel on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMass<T> {
    pub value: T,
    /// Some face lies closer than `8 sqrt(2 nu t)` to the origin, so tails are cut.
    pub narrow: bool,
}

/// Half-width a quadrature box needs for the kernel at time `t`: `8 sqrt(2 nu t)`.
pub fn required_half_width<T: Real>(nu: T, t: T) -> T {
    T::lit(8.0) * (T::lit(2.0) * nu * t).sqrt()
}

pub fn mass<T: Real>(nu: T, t: T, quad_grid: &GridSpec<T>) -> Result<KernelMass<T>> {
    KernelPoint::new(&vec![T::zero(); quad_grid.dim()], t, nu)?;
    let w = required_half_width(nu, t);
    let narrow = quad_grid
        .lo()
        .iter()
        .zip(quad_grid.hi())
        .any(|(&lo, &hi)| -lo < w || hi < w);
    let terms = crate::par::map_points(quad_grid, |i, x| {
        Ok(quad_grid.trapezoid_weight(i) * KernelPoint::new(x, t, nu)?.value())
    })?;
    let value = terms.into_iter().fold(T::zero(), |s, v| s + v);
    Ok(KernelMass { value, narrow })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let g0 = heat_kernel(&[0.0_f64], 1.0, 1.0).unwrap();
        assert!((g0 - 0.282_094_791_773_878_14).abs() < 1e-15);
        let g2 = heat_kernel(&[2.0_f64], 1.0, 1.0).unwrap();
        assert!((g2 - (-1.0_f64).exp() / (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-16);
        assert!((g2 - 0.103_776_9).abs() < 1e-7);
    }

    #[test]
    fn gradient_values() {
        let g = heat_kernel_grad(&[1.0_f64], 1.0, 1.0).unwrap();
        assert!((g[0] + 0.5 * heat_kernel(&[1.0_f64], 1.0, 1.0).unwrap()).abs() < 1e-16);
        assert!((g[0] + 0.109_847_8).abs() < 1e-7);
        assert_eq!(heat_kernel_grad(&[0.0_f64, 0.0], 0.3, 2.0).unwrap(), vec![0.0, 0.0]);
        assert!((heat_kernel_laplacian(&[0.0_f64], 1.0, 1.0).unwrap() + 0.141_047_4).abs() < 1e-7);
    }

    #[test]
    fn laplacian_sign_change() {
        for dim in 1..=3 {
            let (nu, t) = (0.7, 0.9);
            let zero = vec![0.0_f64; dim];
            assert!(heat_kernel_laplacian(&zero, t, nu).unwrap() < 0.0);
            let r = (2.0 * nu * t * dim as f64).sqrt() * 1.01;
            let mut x = vec![0.0; dim];
            x[0] = r;
            assert!(heat_kernel_laplacian(&x, t, nu).unwrap() > 0.0);
        }
    }

    #[test]
    fn even_symmetry_and_positivity() {
        let x = [0.3_f64, -1.2, 2.0];
        let mx = [-0.3_f64, 1.2, -2.0];
        assert_eq!(heat_kernel(&x, 0.4, 1.3).unwrap(), heat_kernel(&mx, 0.4, 1.3).unwrap());
        assert!(heat_kernel(&[5.0_f64], 0.01, 1.0).unwrap() >= 0.0);
    }

    #[test]
    fn far_tail_underflows_cleanly() {
        let g = heat_kernel(&[1.0e3_f64], 1e-3, 1.0).unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(heat_kernel_laplacian(&[1.0e3_f64], 1e-3, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_time() {
        let e = heat_kernel(&[0.0_f64], 0.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("delta"));
        assert!(heat_kernel(&[0.0_f64], -1.0, 1.0).is_err());
        assert!(heat_kernel_grad(&[0.0_f64], 0.0, 1.0).is_err());
        assert!(heat_kernel_laplacian(&[0.0_f64], 0.0, 1.0).is_err());
    }

    #[test]
    fn mass_is_one() {
        let g = GridSpec::cube(1, -12.0_f64, 12.0, 2001).unwrap();
        let m = mass(1.0, 1.0, &g).unwrap();
        assert!(!m.narrow);
        assert!((m.value - 1.0).abs() < 1e-8);

        let w = 12.0 * (0.01_f64).sqrt();
        let g = GridSpec::cube(1, -w, w, 2001).unwrap();
        assert!((mass(1.0, 0.01, &g).unwrap().value - 1.0).abs() < 1e-8);

        let g = GridSpec::cube(2, -8.0_f64, 8.0, 401).unwrap();
        assert!((mass(1.0, 0.5, &g).unwrap().value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn narrow_grid_is_flagged() {
        let g = GridSpec::cube(1, -2.0_f64, 2.0, 401).unwrap();
        let m = mass(1.0, 1.0, &g).unwrap();
        assert!(m.narrow);
        assert!(m.value < 1.0 - 1e-3);
    }

    #[test]
    fn works_in_single_precision() {
        let g = heat_kernel(&[0.0_f32], 1.0, 1.0).unwrap();
        assert!((g - 0.282_094_8).abs() < 1e-6);
    }
}
