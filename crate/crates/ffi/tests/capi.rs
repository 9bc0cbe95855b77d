use std::ffi::CStr;
use std::ptr;

use hypext_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hypext_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn exponents_match_the_library() {
    let mut p = 0.0;
    assert_eq!(unsafe { hypext_critical_exponent(2, &mut p) }, HypextStatus::Ok);
    assert_eq!(p, hypext::exponents::critical_exponent(2).unwrap());
    assert!(last_error().is_empty());

    let mut q = 0.0;
    assert_eq!(unsafe { hypext_strichartz_q(p, 2, &mut q) }, HypextStatus::Ok);
    assert_eq!(q, hypext::exponents::strichartz_q(p, 2).unwrap());

    let mut k = 0.0;
    assert_eq!(unsafe { hypext_kappa(3, &mut k) }, HypextStatus::Ok);
    assert_eq!(k, hypext::exponents::kappa(3).unwrap());
}

#[test]
fn domain_errors_carry_a_message() {
    let mut p = 0.0;
    assert_eq!(unsafe { hypext_critical_exponent(0, &mut p) }, HypextStatus::Domain);
    assert!(!last_error().is_empty());

    let mut v = 0.0;
    assert_eq!(unsafe { hypext_bessel_k0(-1.0, &mut v) }, HypextStatus::Domain);
    assert!(!last_error().is_empty());

    let (mut re, mut im, mut err) = (0.0, 0.0, 0.0);
    let status = unsafe { hypext_moment(0, 4.0, 2, 0, 1e-10, 1e-10, &mut re, &mut im, &mut err) };
    assert_eq!(status, HypextStatus::Paraboloid);
}

#[test]
fn null_outputs_are_reported() {
    assert_eq!(
        unsafe { hypext_critical_exponent(2, ptr::null_mut()) },
        HypextStatus::NullPointer
    );
    assert!(last_error().contains("p_out"));
    let mut len = 0;
    assert_eq!(
        unsafe { hypext_grid_len(ptr::null(), &mut len) },
        HypextStatus::NullPointer
    );
    let (mut re, mut im) = (0.0, 0.0);
    let status = unsafe { hypext_gaussian_extension(1, 1, ptr::null(), 0.0, &mut re, &mut im) };
    assert_eq!(status, HypextStatus::NullPointer);
    unsafe { hypext_grid_free(ptr::null_mut()) };
}

#[test]
fn special_functions_and_closed_forms() {
    let mut k0 = 0.0;
    assert_eq!(unsafe { hypext_bessel_k0(1.0, &mut k0) }, HypextStatus::Ok);
    assert!((k0 - 0.42102443824070834).abs() < 1e-12);

    let mut kg = 0.0;
    assert_eq!(
        unsafe { hypext_kg_closed(0.5, 0.2, -0.3, 0.9, &mut kg) },
        HypextStatus::Ok
    );
    assert_eq!(kg, hypext::saddle::kg_closed([0.5, 0.2], [-0.3, 0.9]).unwrap());

    let sig = hypext::exponents::Signature::new(1, 1).unwrap();
    let x = [0.3, -0.7];
    let (mut re, mut im) = (0.0, 0.0);
    let status = unsafe { hypext_gaussian_extension(1, 1, x.as_ptr(), 0.4, &mut re, &mut im) };
    assert_eq!(status, HypextStatus::Ok);
    let want = hypext::gaussian_extension::extension_gaussian_closed(&sig, &x, 0.4).unwrap();
    assert_eq!((re, im), (want.re, want.im));
}

#[test]
fn grid_round_trip_and_lambda() {
    let n = 64;
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { hypext_grid_gaussian(6.0, n, &mut g) }, HypextStatus::Ok);
    assert!(!g.is_null());

    let mut len = 0;
    assert_eq!(unsafe { hypext_grid_len(g, &mut len) }, HypextStatus::Ok);
    assert_eq!(len, n * n);

    let mut re = vec![0.0; len];
    let mut im = vec![0.0; len];
    assert_eq!(
        unsafe { hypext_grid_samples(g, re.as_mut_ptr(), im.as_mut_ptr(), len) },
        HypextStatus::Ok
    );
    let short = unsafe { hypext_grid_samples(g, re.as_mut_ptr(), im.as_mut_ptr(), len - 1) };
    assert_eq!(short, HypextStatus::Domain);

    let mut copy = ptr::null_mut();
    let status = unsafe { hypext_grid_from_samples(6.0, n, re.as_ptr(), im.as_ptr(), &mut copy) };
    assert_eq!(status, HypextStatus::Ok);

    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(unsafe { hypext_lambda(g, &mut a) }, HypextStatus::Ok);
    assert_eq!(unsafe { hypext_lambda(copy, &mut b) }, HypextStatus::Ok);
    assert_eq!(a, b);
    let exact = 4.0 * std::f64::consts::PI.powi(4);
    assert!((a - exact).abs() / exact < 1e-6, "{a}");

    unsafe {
        hypext_grid_free(copy);
        hypext_grid_free(g);
    }
}

#[test]
fn ascent_with_infinite_tolerance_returns_the_start() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { hypext_grid_gaussian(6.0, 64, &mut g) }, HypextStatus::Ok);
    let (mut lambda, mut iters, mut improved) = (0.0, usize::MAX, true);
    let mut fin = ptr::null_mut();
    let status = unsafe {
        hypext_ascend(
            g,
            10,
            0.05,
            f64::INFINITY,
            &mut lambda,
            &mut iters,
            &mut improved,
            &mut fin,
        )
    };
    assert_eq!(status, HypextStatus::Ok, "{}", last_error());
    assert_eq!(iters, 0);
    assert!(!improved);
    let mut start = 0.0;
    unsafe { hypext_lambda(g, &mut start) };
    assert!((lambda - start).abs() < 1e-9 * start);

    let bad = unsafe { hypext_ascend(g, 10, -1.0, 1e-9, &mut lambda, &mut iters, &mut improved, &mut fin) };
    assert_eq!(bad, HypextStatus::Domain);
    unsafe {
        hypext_grid_free(fin);
        hypext_grid_free(g);
    }
}
