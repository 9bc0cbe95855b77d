use std::f64::consts::PI;

use hypext::euler_lagrange::{el_lhs_normalized, moment, phi_inverse};
use hypext::exponents::{admissible_range, critical_exponent, critical_exponent_bisection, Signature};
use hypext::extremizer::{SliceConfig, SlicePlan};
use hypext::gaussian_extension::{extension_gaussian_closed, extension_numeric, gaussian};
use hypext::grid::{Axis, GridFunction};
use hypext::quadrature::{integrate_halfline, integrate_line, Tolerance};
use hypext::saddle::{k_apply_line_integral, reflection_r, symmetric_decompose};
use num_complex::Complex64;
use proptest::prelude::*;

fn sig(a: usize, b: usize) -> Signature {
    Signature::new(a, b).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Smooth, decaying and asymmetric in every slot.
fn lopsided(w: [f64; 4]) -> impl Fn(&[f64]) -> Complex64 {
    move |x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let tilt: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
        c(1.0 + tilt, 0.5 * tilt * tilt - x[0]) * (-0.6 * r2).exp()
    }
}

#[test]
fn bisection_matches_closed_form_up_to_ten_dimensions() {
    for d in 2..=10 {
        let a = critical_exponent(d).unwrap();
        let b = critical_exponent_bisection(d).unwrap();
        assert!((a - b).abs() <= 1e-12, "d={d}: {a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn even_integrand_is_twice_the_half_line(w in 0.3f64..3.0, shift in 0.0f64..2.0) {
        let f = move |s: f64| c(1.0 / (1.0 + (w * s).powi(2)), (s * s + shift).cos() * (-s * s).exp());
        let tol = Tolerance::default();
        let full = integrate_line(f, tol).unwrap();
        let half = integrate_halfline(f, tol).unwrap();
        let bound = 10.0 * (full.abs_error + 2.0 * half.abs_error) + 1e-12;
        prop_assert!((full.value - 2.0 * half.value).norm() <= bound);
    }

    #[test]
    fn gaussian_modulus_ignores_the_signature(
        x in proptest::array::uniform3(-4.0f64..4.0),
        t in -5.0f64..5.0,
    ) {
        let a = extension_gaussian_closed(&sig(2, 1), &x, t).unwrap().norm();
        let b = extension_gaussian_closed(&sig(1, 2), &[x[2], x[0], x[1]], t).unwrap().norm();
        prop_assert!((a - b).abs() <= 1e-13 * a);
    }

    #[test]
    fn balanced_moments_are_real_and_positive(k in 1usize..7, frac in 0.05f64..0.95) {
        let (lo, hi) = admissible_range(2);
        let p = lo + frac * (hi - lo);
        let m = moment(k, p, &sig(1, 1), Tolerance::default()).unwrap();
        prop_assert!(m.value.re > 0.0, "{m:?}");
        prop_assert!(m.value.im.abs() <= 10.0 * m.abs_error + 1e-15, "{m:?}");
    }

    #[test]
    fn flipping_the_signature_conjugates(r_plus in 0.0f64..2.0, r_minus in 0.0f64..2.0, frac in 0.1f64..0.9) {
        let (lo, hi) = admissible_range(3);
        let p = lo + frac * (hi - lo);
        let tol = Tolerance::default();
        let a = el_lhs_normalized(r_plus, r_minus, p, &sig(2, 1), tol).unwrap();
        let b = el_lhs_normalized(r_minus, r_plus, p, &sig(1, 2), tol).unwrap();
        prop_assert!((a.value - b.value.conj()).norm() <= 10.0 * (a.abs_error + b.abs_error) + 1e-10 * a.value.norm());
    }

    #[test]
    fn moment_kernel_is_monotone_away_from_the_critical_exponent(d in 2usize..6, frac in 0.02f64..0.98) {
        let pc = critical_exponent(d).unwrap();
        let (_, hi) = admissible_range(d);
        let p = 2.0 + frac * (hi - 2.0);
        prop_assume!((p - pc).abs() > 1e-3);
        let vals: Vec<f64> = (0..50).map(|i| phi_inverse(0.01 * 1.25f64.powi(i), p, d).unwrap()).collect();
        if p < pc {
            prop_assert!(vals.windows(2).all(|w| w[1] > w[0]));
        } else {
            prop_assert!(vals.windows(2).all(|w| w[1] < w[0]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn extension_is_linear(
        a in (-2.0f64..2.0, -2.0f64..2.0),
        b in (-2.0f64..2.0, -2.0f64..2.0),
        x in (-3.0f64..3.0, -3.0f64..3.0),
        t in -0.5f64..0.5,
    ) {
        let axes = vec![Axis::symmetric(5.0, 65).unwrap(); 2];
        let f = GridFunction::from_fn(axes.clone(), |p| c(gaussian(p), 0.0)).unwrap();
        let h = GridFunction::from_fn(axes, |p| c(p[0], p[1] * p[1]) * gaussian(p)).unwrap();
        let (a, b) = (c(a.0, a.1), c(b.0, b.1));
        let combo = f.scaled(a).axpy(b, &h).unwrap();
        let s = sig(1, 1);
        let x = [x.0, x.1];
        let lhs = extension_numeric(&combo, &s, &x, t).unwrap();
        let rhs = a * extension_numeric(&f, &s, &x, t).unwrap() + b * extension_numeric(&h, &s, &x, t).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn kernel_commutes_with_the_reflection(
        w in proptest::array::uniform4(-1.0f64..1.0),
        p in proptest::array::uniform4(-1.2f64..1.2),
    ) {
        let (eta, nu) = ([p[0], p[1]], [p[2], p[3]]);
        let level = ((eta[0] - nu[0]).powi(2) - (eta[1] - nu[1]).powi(2)) / 2.0;
        prop_assume!(level.abs() > 1e-2 && (eta[0] - nu[0]).abs() > 1e-2);
        let f = lopsided(w);
        let f = |q: [f64; 4]| f(&q);
        let tol = Tolerance::new(1e-11, 1e-9);
        let a = k_apply_line_integral(f, eta, nu, 8.0, tol).unwrap();
        let b = k_apply_line_integral(f, [nu[0], eta[1]], [eta[0], nu[1]], 8.0, tol).unwrap();
        prop_assert!((a.value - b.value).norm() <= 10.0 * (a.abs_error + b.abs_error) + 1e-8 * a.value.norm(),
            "{a:?} vs {b:?}");
    }

    #[test]
    fn reflection_algebra(w in proptest::array::uniform4(-1.0f64..1.0), n in 5usize..9) {
        let f = GridFunction::from_fn(vec![Axis::symmetric(2.0, n).unwrap(); 4], lopsided(w)).unwrap();
        prop_assert_eq!(reflection_r(&reflection_r(&f).unwrap()).unwrap(), f.clone());
        let (f1, f2) = symmetric_decompose(&f).unwrap();
        let sum = f1.axpy(c(1.0, 0.0), &f2).unwrap();
        prop_assert!(sum.samples().iter().zip(f.samples()).all(|(a, b)| (a - b).norm() <= 1e-14));
        prop_assert_eq!(reflection_r(&f1).unwrap(), f1.clone());
        let orth = f1.inner(&f2).unwrap().norm();
        prop_assert!(orth <= 1e-10 * f1.norm_l2().unwrap() * f2.norm_l2().unwrap());
    }

    #[test]
    fn quotient_is_invariant_under_swapping_axes(w in proptest::array::uniform4(-1.0f64..1.0)) {
        let axes = vec![Axis::symmetric(6.0, 64).unwrap(); 2];
        let profile = |x: &[f64]| {
            let tilt = w[0] * x[0] + w[1] * x[1] + w[2] * x[0] * x[1];
            c(1.0 + tilt, w[3] * x[0]) * (-PI * (x[0] * x[0] + x[1] * x[1]) / 2.0).exp()
        };
        let f = GridFunction::from_fn(axes.clone(), profile).unwrap();
        let swapped = GridFunction::from_fn(axes, |x| profile(&[x[1], x[0]])).unwrap();
        let plan = SlicePlan::new(f.axes(), SliceConfig::default()).unwrap();
        let a = plan.lambda(&f).unwrap();
        let b = plan.lambda(&swapped).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
    }
}
