//! First variation of `Psi(f) = ||Tf||_q / ||f||_p` at the Gaussian, the
//! weight in its Euler-Lagrange identity, the radially reduced identity in the
//! variables `r+ = |xi+|^2`, `r- = |xi-|^2`, and the moment sequences obtained
//! by differentiating it at the origin.
//!
//! All integrals over `s` use the compactified real-line integrator. The
//! common prefactor
//!
//! ```text
//! P(s) = (1+4s^2)^{-d(q-2)/4} ((1+2is)/(q-1+2is))^{d+/2} ((1-2is)/(q-1-2is))^{d-/2}
//! ```
//!
//! satisfies `P(-s) = conj P(s)`, so every moment is real up to quadrature error.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::exponents::{critical_exponent, ExponentTriple, Signature};
use crate::extremizer::{SliceConfig, SlicePlan};
use crate::gaussian_extension::{gaussian, gaussian_strichartz_norm};
use crate::grid::GridFunction;
use crate::quadrature::{half_power, integrate_line, QuadratureResult, Tolerance};

/// Moment sweeps stop at this index unless told otherwise.
pub const DEFAULT_MOMENT_KMAX: usize = 5;
/// Diagonal sweeps stop at this index unless told otherwise.
pub const DEFAULT_DIAGONAL_KMAX: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub k: usize,
    pub value: Complex64,
    pub abs_error: f64,
    pub nonzero_at_tolerance: bool,
}

impl MomentReport {
    fn from_quadrature(k: usize, r: QuadratureResult) -> Self {
        MomentReport {
            k,
            value: r.value,
            abs_error: r.abs_error,
            nonzero_at_tolerance: r.value.norm() > 10.0 * r.abs_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityReport {
    /// Normalized left-hand side at `(r+, r-) = (0, 0)`.
    pub lambda_estimate: Complex64,
    pub lambda_error: f64,
    /// Largest relative deviation from `lambda_estimate` over the samples.
    pub residual: f64,
    /// Propagated quadrature error of `residual`.
    pub residual_error: f64,
    pub sample_points: Vec<(f64, f64)>,
    /// First `k` whose moment is nonzero at tolerance, if any up to the default sweep.
    pub witness_k: Option<usize>,
}

impl CriticalityReport {
    /// The identity fails, i.e. the Gaussian is not a critical point.
    pub fn witnessed(&self) -> bool {
        self.residual > 10.0 * self.residual_error
    }
}

/// Shared exponents for one `(p, signature)` pair.
#[derive(Debug, Clone, Copy)]
struct Setup {
    p: f64,
    q: f64,
    d: f64,
    d_plus: i32,
    d_minus: i32,
    /// `d(q-2)/4`
    decay: f64,
}

impl Setup {
    fn new(p: f64, sig: &Signature) -> Result<Self> {
        let t = ExponentTriple::new(sig.d(), p)?;
        Ok(Setup {
            p,
            q: t.q,
            d: sig.d() as f64,
            d_plus: sig.d_plus() as i32,
            d_minus: sig.d_minus() as i32,
            decay: sig.d() as f64 * (t.q - 2.0) / 4.0,
        })
    }

    /// `P(s)` from the module docs.
    fn prefactor(&self, s: f64) -> Complex64 {
        let plus = Complex64::new(1.0, 2.0 * s) / Complex64::new(self.q - 1.0, 2.0 * s);
        let minus = plus.conj();
        half_power(plus, self.d_plus) * half_power(minus, self.d_minus) * (1.0 + 4.0 * s * s).powf(-self.decay)
    }

    /// Exponent multiplier for `r+`: `(-2p/d + 2is(q-p)) / (q-1+2is)`.
    fn radial_plus(&self, s: f64) -> Complex64 {
        Complex64::new(-2.0 * self.p / self.d, 2.0 * s * (self.q - self.p)) / Complex64::new(self.q - 1.0, 2.0 * s)
    }

    fn lhs_integrand(&self, s: f64, r_plus: f64, r_minus: f64) -> Complex64 {
        let e_plus = self.radial_plus(s);
        let e_minus = self.radial_plus(-s);
        self.prefactor(s) * (-(PI / 2.0) * (r_plus * e_plus + r_minus * e_minus)).exp()
    }

    /// `(p^2/d^2 + s^2 (q-p)^2) / ((q-1)^2 + 4 s^2)`
    fn moment_kernel(&self, s: f64) -> f64 {
        let pd = self.p / self.d;
        (pd * pd + s * s * (self.q - self.p).powi(2)) / ((self.q - 1.0).powi(2) + 4.0 * s * s)
    }
}

/// The t-integral in the Euler-Lagrange identity at the point `xi`.
///
/// After `w = t/pi` the oscillating factor `exp(-itQ(xi))` cancels exactly
/// against the Gaussian factors, leaving a non-oscillatory integrand.
pub fn el_weight(xi: &[f64], p: f64, sig: &Signature, tol: Tolerance) -> Result<QuadratureResult> {
    if xi.len() != sig.d() {
        return domain(format!(
            "point has {} coordinates, signature needs {}",
            xi.len(),
            sig.d()
        ));
    }
    let st = Setup::new(p, sig)?;
    let q = st.q;
    let signs: Vec<f64> = (0..sig.d()).map(|k| sig.sign(k)).collect();
    let integrand = |w: f64| {
        let mut v = Complex64::new((0.25 + w * w).powf(-st.decay), 0.0);
        for (k, &x) in xi.iter().enumerate() {
            let u = Complex64::new(q - 1.0, 2.0 * signs[k] * w);
            let ratio = Complex64::new(1.0, 2.0 * signs[k] * w) / u;
            let expo = (q - 1.0) + (1.0 - (q - 1.0).powi(2)) / u;
            v *= half_power(ratio, 1) * (-(PI * x * x / 2.0) * expo).exp();
        }
        v * PI
    };
    integrate_line(integrand, tol)
}

/// Normalized left-hand side of the radial Euler-Lagrange identity.
pub fn el_lhs_normalized(
    r_plus: f64,
    r_minus: f64,
    p: f64,
    sig: &Signature,
    tol: Tolerance,
) -> Result<QuadratureResult> {
    if !(r_plus >= 0.0 && r_minus >= 0.0) {
        return domain(format!(
            "radial variables must be non-negative, got ({r_plus}, {r_minus})"
        ));
    }
    el_lhs_unchecked(r_plus, r_minus, p, sig, tol)
}

// Also valid for negative radii; used for symmetric finite differences.
fn el_lhs_unchecked(r_plus: f64, r_minus: f64, p: f64, sig: &Signature, tol: Tolerance) -> Result<QuadratureResult> {
    let st = Setup::new(p, sig)?;
    integrate_line(|s| st.lhs_integrand(s, r_plus, r_minus), tol)
}

/// The integrand of [`el_lhs_normalized`] at a single `s`.
pub fn el_lhs_integrand(s: f64, r_plus: f64, r_minus: f64, p: f64, sig: &Signature) -> Result<Complex64> {
    Ok(Setup::new(p, sig)?.lhs_integrand(s, r_plus, r_minus))
}

/// `el_weight(xi) / el_lhs_normalized(|xi+|^2, |xi-|^2)` predicted by the reduction:
/// `pi 4^{d(q-2)/4} g(xi)^{p-1}`.
pub fn el_reduction_factor(xi: &[f64], p: f64, sig: &Signature) -> Result<f64> {
    let st = Setup::new(p, sig)?;
    Ok(PI * 4f64.powf(st.decay) * gaussian(xi).powf(p - 1.0))
}

pub fn criticality_residual(
    p: f64,
    sig: &Signature,
    samples: &[(f64, f64)],
    tol: Tolerance,
) -> Result<CriticalityReport> {
    if samples.is_empty() {
        return domain("criticality residual needs at least one sample point");
    }
    let origin = el_lhs_normalized(0.0, 0.0, p, sig, tol)?;
    let scale = origin.value.norm();
    if scale == 0.0 {
        return Err(Error::NonFinite(
            "normalized left-hand side vanishes at the origin".into(),
        ));
    }
    let mut residual = 0.0;
    let mut residual_error = 0.0;
    for &(rp, rm) in samples {
        let r = el_lhs_normalized(rp, rm, p, sig, tol)?;
        let dev = (r.value - origin.value).norm() / scale;
        if dev >= residual {
            residual = dev;
            residual_error = (r.abs_error + origin.abs_error) / scale + dev * origin.abs_error / scale;
        }
    }
    let witness_k = moment_sweep(DEFAULT_MOMENT_KMAX, p, sig, tol)?
        .into_iter()
        .find(|m| m.nonzero_at_tolerance)
        .map(|m| m.k);
    Ok(CriticalityReport {
        lambda_estimate: origin.value,
        lambda_error: origin.abs_error,
        residual,
        residual_error,
        sample_points: samples.to_vec(),
        witness_k,
    })
}

/// `Re P(s)`.
pub fn a_of_s(s: f64, p: f64, sig: &Signature) -> Result<f64> {
    Ok(Setup::new(p, sig)?.prefactor(s).re)
}

/// `A(s)` times the moment kernel.
pub fn b_of_s(s: f64, p: f64, sig: &Signature) -> Result<f64> {
    let st = Setup::new(p, sig)?;
    Ok(st.moment_kernel(s) * st.prefactor(s).re)
}

/// `M_k = int kernel(s)^k P(s) ds`; the Gaussian is critical only if every `M_k` vanishes.
pub fn moment(k: usize, p: f64, sig: &Signature, tol: Tolerance) -> Result<MomentReport> {
    if k == 0 {
        return domain("moment index starts at 1");
    }
    let st = Setup::new(p, sig)?;
    let r = integrate_line(|s| st.prefactor(s) * st.moment_kernel(s).powi(k as i32), tol)?;
    Ok(MomentReport::from_quadrature(k, r))
}

pub fn moment_sweep(k_max: usize, p: f64, sig: &Signature, tol: Tolerance) -> Result<Vec<MomentReport>> {
    (1..=k_max).map(|k| moment(k, p, sig, tol)).collect()
}

/// The moment kernel as a function of `s`, i.e. the inverse of the change of
/// variables that turns moments into polynomial integrals.
pub fn phi_inverse(s: f64, p: f64, d: usize) -> Result<f64> {
    let p_crit = critical_exponent(d)?;
    if (p - p_crit).abs() < 1e-9 {
        return Err(Error::DegenerateChange { p, p_critical: p_crit });
    }
    let t = ExponentTriple::new(d, p)?;
    let pd = p / d as f64;
    Ok((pd * pd + s * s * (t.q - p).powi(2)) / ((t.q - 1.0).powi(2) + 4.0 * s * s))
}

/// `(s^2 - kappa^2) / (s^2 + kappa^2)`, a bijection from `(0, inf)` onto `(-1, 1)`.
pub fn gamma_inverse(s: f64, kappa: f64) -> f64 {
    (s * s - kappa * kappa) / (s * s + kappa * kappa)
}

/// Moments along the diagonal `r+ = r- ` at the critical exponent of `d`.
pub fn diagonal_moment(k: usize, d: usize, sig: &Signature, tol: Tolerance) -> Result<MomentReport> {
    if sig.d() != d {
        return domain(format!("signature {sig} has dimension {}, expected {d}", sig.d()));
    }
    if k == 0 {
        return domain("moment index starts at 1");
    }
    let t = ExponentTriple::critical(d)?;
    let st = Setup::new(t.p, sig)?;
    let kappa = t.kappa;
    let r = integrate_line(|s| st.prefactor(s) * gamma_inverse(s, kappa).powi(k as i32), tol)?;
    Ok(MomentReport::from_quadrature(k, r))
}

pub fn diagonal_sweep(k_max: usize, d: usize, sig: &Signature, tol: Tolerance) -> Result<Vec<MomentReport>> {
    (1..=k_max).map(|k| diagonal_moment(k, d, sig, tol)).collect()
}

/// `phi - c g^{p-1}` with `c` chosen so that `int g^{p-1} (result) = 0`.
pub fn project_orthogonal(phi: &GridFunction, p: f64) -> Result<GridFunction> {
    let w = phi.quadrature_weights()?;
    let gp: Vec<f64> = (0..phi.len()).map(|i| gaussian(&phi.node(i)).powf(p - 1.0)).collect();
    let num: Complex64 = phi.samples().iter().zip(&gp).zip(&w).map(|((v, g), w)| v * g * w).sum();
    let den: f64 = gp.iter().zip(&w).map(|(g, w)| g * g * w).sum();
    let c = num / den;
    let samples = phi.samples().iter().zip(&gp).map(|(v, g)| v - c * g).collect();
    GridFunction::new(phi.axes().to_vec(), samples)
}

/// `Psi'(0)` together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstVariation {
    pub value: f64,
    pub abs_error: f64,
}

impl FirstVariation {
    pub fn nonzero(&self) -> bool {
        self.value.abs() > 10.0 * self.abs_error
    }
}

/// `Psi'(0)` in the direction `phi`, through the Euler-Lagrange weight:
///
/// `Psi'(0) = (||Tg||_q^{1-q} (2pi)^d Re int conj(phi) W - ||Tg||_q ||g||_p^{-p} Re int g^{p-1} conj(phi)) / ||g||_p`
///
/// where `W` is [`el_weight`]. The second term vanishes for projected `phi`.
/// The error combines per-node quadrature errors with the Simpson-versus-
/// trapezoid discrepancy of the grid pairing.
pub fn first_variation(phi: &GridFunction, p: f64, sig: &Signature, tol: Tolerance) -> Result<FirstVariation> {
    if phi.n_axes() != sig.d() {
        return domain("perturbation dimension does not match the signature");
    }
    let d = sig.d();
    let q = ExponentTriple::new(d, p)?.q;
    let weights = WeightTable::new(phi, p, sig, tol)?;
    let simpson = phi.quadrature_weights()?;
    let trapezoid = trapezoid_weights(phi);
    let mut pair = 0.0;
    let mut pair_trap = 0.0;
    let mut pair_err = 0.0;
    let mut norm_term = 0.0;
    for (i, v) in phi.samples().iter().enumerate() {
        let (wv, we) = weights.at(phi, i);
        let local = (v.conj() * wv).re;
        pair += simpson[i] * local;
        pair_trap += trapezoid[i] * local;
        pair_err += simpson[i] * v.norm() * we;
        norm_term += simpson[i] * gaussian(&phi.node(i)).powf(p - 1.0) * v.re;
    }
    let tg = gaussian_strichartz_norm(d, q)?.powf(1.0 / q);
    let gp = (2.0 / p).powf(d as f64 / (2.0 * p));
    let c1 = tg.powf(1.0 - q) * (2.0 * PI).powi(d as i32) / gp;
    let c2 = tg * gp.powf(-p) / gp;
    Ok(FirstVariation {
        value: c1 * pair - c2 * norm_term,
        abs_error: c1 * (pair_err + (pair - pair_trap).abs()),
    })
}

/// Step of the central differences in [`first_variation_finite_difference`].
pub const VARIATION_STEP: f64 = 1e-4;

/// `Psi'(0)` for the saddle at `p = 2` by central differences of
/// `Psi(eps) = Lambda(g + eps phi)^{1/4}`, with `Lambda` the slice-evaluated
/// ratio of the extremizer search. One Richardson step combines the steps
/// `eps` and `eps/2`; their disagreement is the error estimate.
pub fn first_variation_finite_difference(phi: &GridFunction, sig: &Signature) -> Result<FirstVariation> {
    if sig.d_plus() != 1 || sig.d_minus() != 1 {
        return domain("the finite-difference path is available for the saddle signature (1, 1) only");
    }
    let plan = SlicePlan::new(phi.axes(), SliceConfig::default())?;
    let g = GridFunction::from_fn(phi.axes().to_vec(), |x| Complex64::new(gaussian(x), 0.0))?;
    let psi = |eps: f64| -> Result<f64> { Ok(plan.lambda(&g.axpy(Complex64::new(eps, 0.0), phi)?)?.powf(0.25)) };
    let central = |eps: f64| -> Result<f64> { Ok((psi(eps)? - psi(-eps)?) / (2.0 * eps)) };
    let coarse = central(VARIATION_STEP)?;
    let fine = central(VARIATION_STEP / 2.0)?;
    Ok(FirstVariation {
        value: (4.0 * fine - coarse) / 3.0,
        abs_error: (fine - coarse).abs(),
    })
}

fn trapezoid_weights(f: &GridFunction) -> Vec<f64> {
    let per_axis: Vec<Vec<f64>> = f
        .axes()
        .iter()
        .map(|a| {
            let mut w = vec![a.step(); a.count];
            w[0] *= 0.5;
            w[a.count - 1] *= 0.5;
            w
        })
        .collect();
    (0..f.len())
        .map(|i| {
            f.multi_index(i)
                .iter()
                .enumerate()
                .map(|(k, &j)| per_axis[k][j])
                .product()
        })
        .collect()
}

/// `el_weight` depends on each coordinate only through its square, so on a
/// grid it is tabulated once per distinct tuple of per-axis magnitudes.
struct WeightTable {
    /// Per axis: node index -> slot index in the reduced table.
    slots: Vec<Vec<usize>>,
    dims: Vec<usize>,
    values: Vec<(Complex64, f64)>,
}

impl WeightTable {
    fn new(f: &GridFunction, p: f64, sig: &Signature, tol: Tolerance) -> Result<Self> {
        let mut slots = Vec::new();
        let mut reps: Vec<Vec<f64>> = Vec::new();
        for a in f.axes() {
            let mut mags: Vec<f64> = Vec::new();
            let mut map = Vec::with_capacity(a.count);
            for i in 0..a.count {
                let m = a.node(i).abs();
                let pos = mags.iter().position(|&x| (x - m).abs() <= 1e-12 * m.max(1.0));
                map.push(match pos {
                    Some(j) => j,
                    None => {
                        mags.push(m);
                        mags.len() - 1
                    }
                });
            }
            slots.push(map);
            reps.push(mags);
        }
        let dims: Vec<usize> = reps.iter().map(Vec::len).collect();
        let total: usize = dims.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; dims.len()];
        let mut xi = vec![0.0; dims.len()];
        for _ in 0..total {
            for k in 0..dims.len() {
                xi[k] = reps[k][idx[k]];
            }
            let r = el_weight(&xi, p, sig, tol)?;
            values.push((r.value, r.abs_error));
            for k in (0..dims.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(WeightTable { slots, dims, values })
    }

    fn at(&self, f: &GridFunction, flat: usize) -> (Complex64, f64) {
        let mut pos = 0;
        for (k, i) in f.multi_index(flat).into_iter().enumerate() {
            pos = pos * self.dims[k] + self.slots[k][i];
        }
        self.values[pos]
    }
}

/// Hermite polynomial `H_n` (physicists' normalization).
fn hermite(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Named test perturbations on the grid of `template`, each projected to
/// satisfy the orthogonality condition: even Hermite bumps and radial
/// profiles times the Gaussian.
pub fn phi_dictionary(template: &GridFunction, p: f64) -> Result<Vec<(String, GridFunction)>> {
    if template.n_axes() != 2 {
        return domain("the perturbation dictionary is two-dimensional");
    }
    let sp = PI.sqrt();
    let mut out = Vec::new();
    let mut push = |name: String, f: &dyn Fn(&[f64]) -> f64| -> Result<()> {
        let raw = GridFunction::from_fn(template.axes().to_vec(), |x| Complex64::new(f(x) * gaussian(x), 0.0))?;
        out.push((name, project_orthogonal(&raw, p)?));
        Ok(())
    };
    for (a, b) in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
        push(format!("hermite_{}_{}", 2 * a, 2 * b), &|x| {
            hermite(2 * a, sp * x[0]) * hermite(2 * b, sp * x[1])
        })?;
    }
    push("radial_2".into(), &|x| x[0] * x[0] + x[1] * x[1])?;
    push("radial_4".into(), &|x| (x[0] * x[0] + x[1] * x[1]).powi(2))?;
    push("null_cone_2".into(), &|x| (x[0] * x[0] - x[1] * x[1]).powi(2))?;
    Ok(out)
}
