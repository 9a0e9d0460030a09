use nws_core::kernel::KernelPoint;
use nws_core::{heat_kernel, integrate_G_power, PdeParams, QuadTolerance};
use proptest::prelude::*;

/// Richardson-extrapolated central difference, independent of the analytic derivatives.
fn fd_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn fd_second(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// E1(z) by its convergent power series.
fn e1(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -z / k as f64;
        sum -= term / k as f64;
    }
    -0.577_215_664_901_532_9 - z.ln() + sum
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let nu = 0.7;
    for &(x, t) in &[(0.3, 0.5), (-1.2, 1.0), (2.5, 2.0), (0.0, 0.1)] {
        let g = |x: f64, t: f64| heat_kernel(&[x], t, nu).unwrap();
        let kp_x = [x];
        let kp = KernelPoint::new(&kp_x, t, nu).unwrap();
        let gx = fd_derivative(|s| g(s, t), x, 1e-3);
        let gxx = fd_second(|s| g(s, t), x, 1e-2);
        let gt = fd_derivative(|s| g(x, s), t, 1e-4);
        let scale = g(x, t) / t;
        assert!((kp.grad()[0] - gx).abs() < 1e-8 * scale.max(1.0), "grad at {x},{t}");
        assert!((kp.laplacian() - gxx).abs() < 1e-6 * scale.max(1.0), "lap at {x},{t}");
        assert!((kp.time_derivative() - gt).abs() < 1e-7 * scale.max(1.0), "G_t at {x},{t}");
    }
}

#[test]
fn kernel_mass_is_one_by_independent_simpson_rule() {
    for &t in &[0.01_f64, 0.1, 1.0] {
        let half = 12.0 * (2.0 * t).sqrt();
        let n = 4000;
        let h = 2.0 * half / n as f64;
        let s: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * heat_kernel(&[-half + i as f64 * h], t, 1.0).unwrap()
            })
            .sum();
        assert!((s * h / 3.0 - 1.0).abs() < 1e-10, "t = {t}");
    }
}

#[test]
fn time_integral_oracles() {
    let tol = QuadTolerance::default();
    for &t in &[0.1_f64, 1.0, 10.0] {
        let p = PdeParams::new(1.0, 1.0, 2.0).unwrap();
        let v = integrate_G_power(&[0.0], t, &p, tol).unwrap().value;
        let exact = (t / std::f64::consts::PI).sqrt();
        assert!(((v - exact) / exact).abs() < 1e-9);
    }
    let p = PdeParams::new(1.0, 1.0, 3.0).unwrap();
    let v = integrate_G_power(&[1.0], 1.0, &p, tol).unwrap().value;
    let exact = e1(0.5) / (4.0 * std::f64::consts::PI);
    assert!(((v - exact) / exact).abs() < 1e-7);
    assert!(integrate_G_power(&[0.0], 1.0, &p, tol).is_err());
}

#[test]
fn single_precision_tracks_double() {
    let g32 = heat_kernel(&[0.5_f32, -0.25], 0.3, 1.0).unwrap();
    let g64 = heat_kernel(&[0.5_f64, -0.25], 0.3, 1.0).unwrap();
    assert!(((g32 as f64 - g64) / g64).abs() < 1e-6);
    let p32 = PdeParams::new(1.0_f32, 1.0, 2.0).unwrap();
    let i32_ = integrate_G_power(&[0.0_f32], 1.0, &p32, QuadTolerance::new(1e-5, 1e-7)).unwrap().value;
    assert!((i32_ as f64 - std::f64::consts::FRAC_1_PI.sqrt()).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn time_integral_grows_with_t(x in -3.0..3.0_f64, t in 0.05..5.0_f64, n in 1.1..2.9_f64) {
        let p = PdeParams::new(1.0, 1.0, n).unwrap();
        let tol = QuadTolerance::default();
        let a = integrate_G_power(&[x], t, &p, tol).unwrap().value;
        let b = integrate_G_power(&[x], 1.5 * t, &p, tol).unwrap().value;
        prop_assert!(a > 0.0 && b > a);
    }

    #[test]
    fn origin_integral_has_power_law(t in 0.01..50.0_f64, n in 1.05..2.95_f64) {
        // G(0,tau)^(n-1) = (4 pi tau)^(-(n-1)/2): integral is (4 pi)^(-m) t^(1-m)/(1-m), m = (n-1)/2
        let p = PdeParams::new(1.0, 1.0, n).unwrap();
        let v = integrate_G_power(&[0.0], t, &p, QuadTolerance::default()).unwrap().value;
        let m = (n - 1.0) / 2.0;
        let exact = (4.0 * std::f64::consts::PI).powf(-m) * t.powf(1.0 - m) / (1.0 - m);
        prop_assert!(((v - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn kernel_identity_holds(x in -4.0..4.0_f64, y in -4.0..4.0_f64, t in 0.05..4.0_f64, nu in 0.2..3.0_f64) {
        let p = [x, y];
        let kp = KernelPoint::new(&p, t, nu).unwrap();
        let scale = (x * x + y * y) / (4.0 * nu * t * t) + 1.0 / t;
        prop_assert!((kp.time_derivative() - nu * kp.laplacian()).abs() <= 1e-12 * scale * kp.value().max(f64::MIN_POSITIVE));
    }
}
