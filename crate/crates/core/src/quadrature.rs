//! Adaptive Gauss-Kronrod quadrature for complex integrands on finite
//! intervals, the half-line and the real line, plus box quadrature for grid
//! samples and the principal branch of `z^{m/2}`.
//!
//! Infinite ranges are compactified with `s = cot(phi)`, `phi` in `(0, pi/2)`,
//! i.e. the `s = tan(theta)` map measured from the endpoint `theta = pi/2`, so
//! that panels near `s = infinity` stay resolvable in floating point. An
//! algebraic tail `|s|^{-a}` with `a > 1` becomes an integrable endpoint
//! singularity `phi^{a-2}` which the adaptive bisection resolves.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::grid::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

/// Termination criteria for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
            max_evals: 1_000_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }

    pub fn with_budget(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

// Kronrod 15-point abscissae and weights; the even entries carry the embedded
// 7-point Gauss rule. Kept at published precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

// QUADPACK error scaling for one real component.
fn scaled_error(diff: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = diff.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_re = WGK[7] * fc.re.abs();
    let mut abs_im = WGK[7] * fc.im.abs();
    let mut f1 = [Complex64::new(0.0, 0.0); 7];
    let mut f2 = [Complex64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(center - dx)?;
        let hi = f(center + dx)?;
        f1[j] = lo;
        f2[j] = hi;
        kronrod += (lo + hi) * WGK[j];
        abs_re += WGK[j] * (lo.re.abs() + hi.re.abs());
        abs_im += WGK[j] * (lo.im.abs() + hi.im.abs());
        if j % 2 == 1 {
            gauss += (lo + hi) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc_re = WGK[7] * (fc.re - mean.re).abs();
    let mut asc_im = WGK[7] * (fc.im - mean.im).abs();
    for j in 0..7 {
        asc_re += WGK[j] * ((f1[j].re - mean.re).abs() + (f2[j].re - mean.re).abs());
        asc_im += WGK[j] * ((f1[j].im - mean.im).abs() + (f2[j].im - mean.im).abs());
    }
    let h = half.abs();
    let diff = (kronrod - gauss) * half;
    let error = scaled_error(diff.re, abs_re * h, asc_re * h) + scaled_error(diff.im, abs_im * h, asc_im * h);
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error,
    })
}

/// Globally adaptive G7-K15 on `[a, b]`: the panel with the largest error is
/// bisected until the total error meets the tolerance.
pub fn integrate_interval<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_interval_checked(|x| Ok(f(x)), a, b, tol)
}

fn integrate_interval_checked<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return domain("integration limits must be finite");
    }
    if a == b {
        return Ok(QuadratureResult {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let evaluations = Cell::new(0usize);
    let mut counted = |x: f64| -> Result<Complex64> {
        evaluations.set(evaluations.get() + 1);
        let v = f(x)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("integrand at {x}")))
        }
    };

    let first = gauss_kronrod(&mut counted, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // panels that can no longer be split in floating point
    let mut frozen: Vec<Panel> = Vec::new();

    while total_err > tol.target(total) && evaluations.get() + 30 <= tol.max_evals {
        let Some(worst) = heap.pop() else {
            break;
        };
        let (lo, hi) = (worst.a.min(worst.b), worst.a.max(worst.b));
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= lo || mid >= hi || hi - lo <= 8.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod(&mut counted, worst.a, mid)?;
        let right = gauss_kronrod(&mut counted, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // fixed summation order by panel position
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.min(p.b).total_cmp(&q.a.min(q.b)));
    let value: Complex64 = panels.iter().map(|p| p.value).sum();
    let abs_error: f64 = panels.iter().map(|p| p.error).sum();
    let result = QuadratureResult {
        value,
        abs_error,
        evaluations: evaluations.get(),
    };
    if abs_error <= tol.target(value) {
        Ok(result)
    } else {
        Err(Error::BudgetExceeded {
            value,
            abs_error,
            evaluations: result.evaluations,
        })
    }
}

/// Integral over `(0, inf)` via `s = cot(phi)`.
pub fn integrate_halfline<F>(f: F, tol: Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_interval_checked(
        |phi| Ok(compactified(&f, phi, 1.0)),
        0.0,
        std::f64::consts::FRAC_PI_2,
        tol,
    )
}

/// Integral over the real line: the two half-lines are folded onto one
/// compactified panel tree so real and imaginary parts share subdivisions.
pub fn integrate_line<F>(f: F, tol: Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_interval_checked(
        |phi| Ok(compactified(&f, phi, 1.0) + compactified(&f, phi, -1.0)),
        0.0,
        std::f64::consts::FRAC_PI_2,
        tol,
    )
}

// Beyond this the tail of any in-scope integrand is below every tolerance;
// values there are taken as zero instead of risking inf * 0.
const FAR_TAIL: f64 = 1e100;

#[inline]
fn compactified<F: Fn(f64) -> Complex64>(f: &F, phi: f64, side: f64) -> Complex64 {
    let s = phi.cos() / phi.sin();
    if !(s < FAR_TAIL) {
        return Complex64::new(0.0, 0.0);
    }
    // ds/dphi = -1/sin^2(phi) = -(1 + s^2)
    f(side * s) * (1.0 + s * s)
}

/// Principal branch of `z^{m/2}`, i.e. `exp((m/2) Log z)`. Arguments on the
/// closed negative real axis are rejected.
pub fn principal_half_power(z: Complex64, m: i32) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCut(z));
    }
    Ok(half_power(z, m))
}

/// Unchecked `exp((m/2) Log z)` for arguments known to be off the cut.
#[inline]
pub(crate) fn half_power(z: Complex64, m: i32) -> Complex64 {
    match m {
        0 => Complex64::new(1.0, 0.0),
        1 => z.sqrt(),
        2 => z,
        _ => (z.ln() * (0.5 * m as f64)).exp(),
    }
}

/// Composite Simpson weights for `n` equally spaced nodes with spacing `h`;
/// an even node count closes with a 3/8 panel. Exact for cubics.
pub fn simpson_weights(n: usize, h: f64) -> Result<Vec<f64>> {
    if n < 3 {
        return domain(format!("Simpson rule needs at least 3 nodes, got {n}"));
    }
    let mut w = vec![0.0; n];
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if n.is_multiple_of(2) {
        let s = n - 4;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    Ok(w)
}

/// Tensor-product Simpson quadrature of grid samples over their box.
pub fn integrate_grid(f: &GridFunction) -> Result<Complex64> {
    let weights = f.quadrature_weights()?;
    Ok(f.samples().iter().zip(weights.iter()).map(|(v, w)| v * w).sum())
}

/// One fixed 7-point Kronrod panel on `[a, b]` with its embedded 3-point
/// Gauss rule; returns `(kronrod, |kronrod - gauss|)`. Exact for degree 11.
pub(crate) fn kronrod7_panel<F>(mut f: F, a: f64, b: f64) -> (Complex64, f64)
where
    F: FnMut(f64) -> Complex64,
{
    const X: [f64; 4] = [
        0.960_491_268_708_020_3,
        0.774_596_669_241_483_4,
        0.434_243_749_346_802_6,
        0.0,
    ];
    const WK: [f64; 4] = [
        0.104_656_226_026_467_27,
        0.268_488_089_868_333_44,
        0.401_397_414_775_962_2,
        0.450_916_538_658_474_14,
    ];
    const WG: [f64; 2] = [5.0 / 9.0, 8.0 / 9.0];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut kronrod = fc * WK[3];
    let mut gauss = fc * WG[1];
    for j in 0..3 {
        let pair = f(mid - half * X[j]) + f(mid + half * X[j]);
        kronrod += pair * WK[j];
        if j == 1 {
            gauss += pair * WG[0];
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn line_examples() {
        let tol = Tolerance::default();
        let r = integrate_line(|s| c(1.0 / (1.0 + s * s)), tol).unwrap();
        assert!((r.value.re - PI).abs() < 1e-10);
        let r = integrate_line(|s| c((-PI * s * s).exp()), tol).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-10);
        let r = integrate_line(|s| c((1.0 + 4.0 * s * s).powf(-1.5)), tol).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-10, "{}", r.value.re);
    }

    #[test]
    fn halfline_examples() {
        let tol = Tolerance::default();
        let r = integrate_halfline(|s| c((-s).exp()), tol).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-10);
        let r = integrate_halfline(|s| c(1.0 / (1.0 + s * s)), tol).unwrap();
        assert!((r.value.re - PI / 2.0).abs() < 1e-10);
        let even = |s: f64| c((1.0 + s * s).powf(-1.3) * (2.0 + 1.0 / (1.0 + s * s)));
        let full = integrate_line(even, tol).unwrap();
        let half = integrate_halfline(even, tol).unwrap();
        assert!((full.value - half.value * 2.0).norm() < 1e-9);
    }

    #[test]
    fn kronrod_rule_is_exact_for_polynomials() {
        let r = integrate_interval(
            |x| c(x.powi(7) - 3.0 * x.powi(4) + 1.0),
            -1.0,
            2.0,
            Tolerance::default(),
        )
        .unwrap();
        let exact = (2f64.powi(8) - 1.0) / 8.0 - 3.0 * (2f64.powi(5) + 1.0) / 5.0 + 3.0;
        assert!((r.value.re - exact).abs() < 1e-12);
    }

    #[test]
    fn complex_integrand_components_share_panels() {
        // int_R e^{-s^2} e^{i s} ds = sqrt(pi) e^{-1/4}
        let r = integrate_line(|s| Complex64::new(0.0, s).exp() * (-s * s).exp(), Tolerance::default()).unwrap();
        assert!((r.value - c(PI.sqrt() * (-0.25f64).exp())).norm() < 1e-10);
    }

    #[test]
    fn budget_exceeded_carries_best_estimate() {
        let tol = Tolerance::new(1e-14, 1e-14).with_budget(100);
        match integrate_line(|s| c((1.0 + s * s).powf(-0.51)), tol) {
            Err(Error::BudgetExceeded { evaluations, .. }) => assert!(evaluations <= 200),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    type Case = (Box<dyn Fn(f64) -> Complex64>, f64);

    #[test]
    fn error_estimates_are_honest() {
        let tol = Tolerance::default();
        let battery: Vec<Case> = vec![
            (Box::new(|s| c(1.0 / (1.0 + s * s))), PI),
            (Box::new(|s| c((1.0 + 4.0 * s * s).powf(-1.5))), 1.0),
            (Box::new(|s| c((-s * s).exp() * s * s)), PI.sqrt() / 2.0),
            (Box::new(|s| c(1.0 / (1.0 + s.powi(4)))), PI / 2f64.sqrt()),
            (Box::new(|s| c((1.0 + s * s).powf(-0.75))), 5.24411510858424),
        ];
        for (i, (f, exact)) in battery.iter().enumerate() {
            let r = integrate_line(f, tol).unwrap();
            let err = (r.value.re - exact).abs();
            assert!(
                err <= 10.0 * r.abs_error.max(1e-15),
                "case {i}: err {err:e} est {:e}",
                r.abs_error
            );
            assert!(r.abs_error <= tol.target(r.value));
        }
    }

    #[test]
    fn half_power_examples() {
        let one = principal_half_power(c(1.0), 1).unwrap();
        assert!((one - c(1.0)).norm() < 1e-15);
        let i = Complex64::new(0.0, 1.0);
        assert!((principal_half_power(i, 2).unwrap() - i).norm() < 1e-15);
        for &(re, im) in &[(0.5, 3.0), (2.0, -7.0), (1e-3, 1.0), (4.0, 0.0)] {
            let z = Complex64::new(re, im);
            for m in [-3, -1, 1, 3, 5] {
                let a = principal_half_power(z.conj(), m).unwrap();
                let b = principal_half_power(z, m).unwrap().conj();
                assert!((a - b).norm() <= 1e-14 * a.norm());
            }
            let r = principal_half_power(z, 1).unwrap();
            assert!((r * r - z).norm() <= 1e-14 * z.norm());
        }
        assert!(matches!(principal_half_power(c(-1.0), 1), Err(Error::BranchCut(_))));
        assert!(matches!(principal_half_power(c(0.0), -1), Err(Error::BranchCut(_))));
    }

    #[test]
    fn simpson_weights_integrate_cubics() {
        for n in [3usize, 4, 5, 6, 9, 10, 128] {
            let h = 2.0 / (n - 1) as f64;
            let w = simpson_weights(n, h).unwrap();
            let s: f64 = (0..n)
                .map(|i| {
                    let x = -1.0 + i as f64 * h;
                    w[i] * (x.powi(3) + 2.0 * x * x - x + 1.0)
                })
                .sum();
            assert!((s - (4.0 / 3.0 + 2.0)).abs() < 1e-13, "n={n}: {s}");
        }
        assert!(simpson_weights(2, 1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.2f64..3.0) {
                let tol = Tolerance::default();
                let f = |s: f64| c(1.0 / (1.0 + s * s));
                let g = |s: f64| Complex64::new(0.0, w * s).exp() * (-(s * s)).exp();
                let rf = integrate_line(f, tol).unwrap();
                let rg = integrate_line(g, tol).unwrap();
                let rc = integrate_line(|s| f(s) * a + g(s) * b, tol).unwrap();
                let bound = rc.abs_error + a.abs() * rf.abs_error + b.abs() * rg.abs_error;
                prop_assert!((rc.value - (rf.value * a + rg.value * b)).norm() <= 10.0 * bound + 1e-13);
            }
        }
    }

    #[test]
    fn kronrod7_panel_is_exact_to_degree_eleven() {
        for deg in 0..=11 {
            let (v, _) = kronrod7_panel(|x| Complex64::new(x.powi(deg), 0.0), -0.5, 1.5);
            let exact = (1.5f64.powi(deg + 1) - (-0.5f64).powi(deg + 1)) / (deg + 1) as f64;
            assert!((v.re - exact).abs() < 1e-13 * exact.abs().max(1.0), "degree {deg}");
        }
        let (_, err) = kronrod7_panel(|x| Complex64::new(x.powi(8), 0.0), 0.0, 1.0);
        assert!(err > 1e-5);
        let (_, err) = kronrod7_panel(|x| Complex64::new(x * x, 0.0), 0.0, 1.0);
        assert!(err < 1e-15);
    }
}
