//! The bilinear kernel of the saddle `Q(xi) = xi_1^2 - xi_2^2` in the plane:
//!
//! ```text
//! KF(eta, nu) = int int delta_2(xi + w - eta - nu) delta_1(Q(xi) + Q(w) - Q(eta) - Q(nu)) F(xi, w)
//! ```
//!
//! With `alpha = xi + w` and `beta = xi - w` the momentum delta fixes `alpha`
//! and the surface delta restricts `beta` to the hyperbola
//! `(beta_1^2 - beta_2^2)/2 = c`, `c = Q(eta - nu)/2`. Parametrizing each
//! branch by `w` with `|beta| = sqrt(2|c| cosh 2w)` turns the co-area weight
//! `dl/|beta|` into `dw`:
//!
//! ```text
//! KF = (1/4) sum_branches int F((alpha+beta(w))/2, (alpha-beta(w))/2) dw
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::grid::{Axis, GridFunction};
use crate::quadrature::{
    integrate_halfline, integrate_interval, kronrod7_panel, simpson_weights, QuadratureResult, Tolerance,
};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `(2 pi)^3`: `||Tf||_4^4 = (2 pi)^3 <K(f (x) f), f (x) f>` for standard Dirac deltas.
pub const PLANCHEREL_FACTOR: f64 = 248.050_213_442_398_56;

/// Default truncation radius `|beta| <= B`.
pub const DEFAULT_CUTOFF: f64 = 12.0;

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("K0 needs a positive argument, got {x}"));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x <= 2.0 {
        Ok(k0_series(x))
    } else {
        Ok(k0_continued_fraction(x))
    }
}

fn k0_series(x: f64) -> f64 {
    let y = x * x / 4.0;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((x / 2.0).ln() + EULER_GAMMA) * i0 + tail
}

// Steed's continued fraction as arranged by Temme, order zero.
fn k0_continued_fraction(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() / s
}

/// `K(g (x) g)(eta, nu) = (1/2) exp(-pi |eta+nu|^2 / 4) K0(pi |Q(eta - nu)| / 4)`.
pub fn kg_closed(eta: [f64; 2], nu: [f64; 2]) -> Result<f64> {
    let a = [eta[0] + nu[0], eta[1] + nu[1]];
    let b = [eta[0] - nu[0], eta[1] - nu[1]];
    let arg = PI * (b[0] * b[0] - b[1] * b[1]).abs() / 4.0;
    if arg < 1e-300 {
        return Err(Error::Singular(format!(
            "(eta, nu) = ({eta:?}, {nu:?}) lies on the null cone Q(eta - nu) = 0"
        )));
    }
    Ok(0.5 * (-PI * (a[0] * a[0] + a[1] * a[1]) / 4.0).exp() * bessel_k0(arg)?)
}

/// The part of `{(beta_1^2 - beta_2^2)/2 = level}` inside `|beta| <= cutoff`.
///
/// For `level > 0` the branches are `beta = (+-sqrt(2c) cosh w, sqrt(2c) sinh w)`,
/// for `level < 0` the roles of the coordinates swap. The degenerate level
/// `0` (the asymptote cross) is rejected: `int dl/|beta|` diverges
/// logarithmically at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolaSlice {
    level: f64,
    cutoff: f64,
}

impl HyperbolaSlice {
    pub fn new(level: f64, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0) {
            return domain(format!("cutoff must be positive, got {cutoff}"));
        }
        if !level.is_finite() {
            return Err(Error::NonFinite(format!("hyperbola level {level}")));
        }
        if level == 0.0 {
            return Err(Error::Singular(
                "level 0: the weight 1/|beta| is not integrable along the asymptotes at the origin".into(),
            ));
        }
        Ok(HyperbolaSlice { level, cutoff })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn branches(&self) -> usize {
        2
    }

    /// Largest `|w|` with `|beta(w)| <= cutoff`; zero when the slice is empty.
    pub fn w_max(&self) -> f64 {
        let ratio = self.cutoff * self.cutoff / (2.0 * self.level.abs());
        if ratio <= 1.0 {
            0.0
        } else {
            0.5 * ratio.acosh()
        }
    }

    /// Point on branch `0` or `1` at parameter `w`.
    pub fn point(&self, branch: usize, w: f64) -> [f64; 2] {
        let r = (2.0 * self.level.abs()).sqrt();
        let side = if branch == 0 { 1.0 } else { -1.0 };
        if self.level > 0.0 {
            [side * r * w.cosh(), r * w.sinh()]
        } else {
            [r * w.sinh(), side * r * w.cosh()]
        }
    }

    /// `sum_branches int_{-W}^{W} G(beta(w)) dw`, folded onto `[0, W]` so the
    /// result is exactly invariant under `beta_1 -> -beta_1` and `beta_2 -> -beta_2`.
    pub fn integrate<G>(&self, w_limit: f64, g: G, tol: Tolerance) -> Result<QuadratureResult>
    where
        G: Fn([f64; 2]) -> Complex64,
    {
        let w_top = w_limit.min(self.w_max());
        if w_top <= 0.0 {
            return Ok(QuadratureResult {
                value: Complex64::new(0.0, 0.0),
                abs_error: 0.0,
                evaluations: 0,
            });
        }
        integrate_interval(
            |w| (g(self.point(0, w)) + g(self.point(0, -w))) + (g(self.point(1, w)) + g(self.point(1, -w))),
            0.0,
            w_top,
            tol,
        )
    }
}

/// `KF(eta, nu)` for a function `F(xi, w)` given as a callable on `R^4`
/// (ordered `xi_1, xi_2, w_1, w_2`), truncated to `|beta| <= cutoff`.
pub fn k_apply_line_integral<F>(
    f: F,
    eta: [f64; 2],
    nu: [f64; 2],
    cutoff: f64,
    tol: Tolerance,
) -> Result<QuadratureResult>
where
    F: Fn([f64; 4]) -> Complex64,
{
    let alpha = [eta[0] + nu[0], eta[1] + nu[1]];
    let diff = [eta[0] - nu[0], eta[1] - nu[1]];
    let slice = HyperbolaSlice::new((diff[0] * diff[0] - diff[1] * diff[1]) / 2.0, cutoff)?;
    let mut r = slice.integrate(
        f64::INFINITY,
        |b| {
            f([
                (alpha[0] + b[0]) / 2.0,
                (alpha[1] + b[1]) / 2.0,
                (alpha[0] - b[0]) / 2.0,
                (alpha[1] - b[1]) / 2.0,
            ])
        },
        tol,
    )?;
    r.value /= 4.0;
    r.abs_error /= 4.0;
    Ok(r)
}

/// `K1(eta, nu)` truncated at `|beta| <= cutoff`. Grows like `ln(cutoff)`.
pub fn truncated_k1(eta: [f64; 2], nu: [f64; 2], cutoff: f64) -> Result<f64> {
    Ok(
        k_apply_line_integral(|_| Complex64::new(1.0, 0.0), eta, nu, cutoff, Tolerance::default())?
            .value
            .re,
    )
}

/// Closed form of [`truncated_k1`]: `(1/2) arccosh(B^2 / (2|c|))`.
pub fn truncated_k1_closed(eta: [f64; 2], nu: [f64; 2], cutoff: f64) -> Result<f64> {
    let diff = [eta[0] - nu[0], eta[1] - nu[1]];
    Ok(HyperbolaSlice::new((diff[0] * diff[0] - diff[1] * diff[1]) / 2.0, cutoff)?.w_max())
}

/// `||K(g (x) g)||_2^2` reduced to one variable with the inner integral cut at `y`:
/// `(1/2) int_{|x| < y} K0(pi|x|/4)^2 (1/4) arccosh(y/|x|) dx`. Grows like `(pi/4) ln y`.
pub fn truncated_kg_l2(y: f64) -> Result<QuadratureResult> {
    if !(y > 1.0) {
        return domain(format!("cutoff must exceed 1, got {y}"));
    }
    // x = y e^{-u}; arccosh(e^u) = u + ln(1 + sqrt(1 - e^{-2u})).
    let integrand = |u: f64| {
        let x = y * (-u).exp();
        if x < 1e-300 {
            return Complex64::new(0.0, 0.0);
        }
        let k = bessel_k0(PI * x / 4.0).unwrap_or(0.0);
        let ach = u + (1.0 + (1.0 - (-2.0 * u).exp()).max(0.0).sqrt()).ln();
        Complex64::new(0.25 * k * k * ach * x, 0.0)
    };
    integrate_halfline(integrand, Tolerance::new(1e-13, 1e-11))
}

/// Log-slope diagnostics of a divergent truncation sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSlopeFit {
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
    /// `(v_{i+1} - v_i) / ln(c_{i+1}/c_i)`
    pub slopes: Vec<f64>,
    /// Least-squares slope of `values` against `ln(cutoffs)`.
    pub fitted_slope: f64,
    /// `(max slope - min slope) / |mean slope|`
    pub dispersion: f64,
    pub strictly_increasing: bool,
}

impl LogSlopeFit {
    pub fn new(cutoffs: &[f64], values: &[f64]) -> Result<Self> {
        if cutoffs.len() != values.len() || cutoffs.len() < 2 {
            return domain("log-slope fit needs at least two matching cutoffs and values");
        }
        let logs: Vec<f64> = cutoffs.iter().map(|c| c.ln()).collect();
        let slopes: Vec<f64> = (1..values.len())
            .map(|i| (values[i] - values[i - 1]) / (logs[i] - logs[i - 1]))
            .collect();
        let n = logs.len() as f64;
        let mx = logs.iter().sum::<f64>() / n;
        let my = values.iter().sum::<f64>() / n;
        let sxy: f64 = logs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = logs.iter().map(|x| (x - mx).powi(2)).sum();
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        let max = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(LogSlopeFit {
            cutoffs: cutoffs.to_vec(),
            values: values.to_vec(),
            fitted_slope: sxy / sxx,
            dispersion: (max - min) / mean.abs(),
            strictly_increasing: values.windows(2).all(|w| w[1] > w[0]),
            slopes,
        })
    }

    /// Positive slope, monotone values and slopes within `max_dispersion` of each other.
    pub fn diverges(&self, max_dispersion: f64) -> bool {
        self.strictly_increasing && self.fitted_slope > 0.0 && self.dispersion <= max_dispersion
    }
}

fn check_reflectable(f: &GridFunction) -> Result<()> {
    if f.n_axes() != 4 {
        return domain(format!(
            "expected a function of four variables, got {} axes",
            f.n_axes()
        ));
    }
    if f.axes()[0] != f.axes()[2] {
        return domain("axes 1 and 3 must coincide for the reflection eta_1 <-> nu_1");
    }
    Ok(())
}

/// `R(F)(eta_1, eta_2, nu_1, nu_2) = F(nu_1, eta_2, eta_1, nu_2)`.
pub fn reflection_r(f: &GridFunction) -> Result<GridFunction> {
    check_reflectable(f)?;
    let strides = f.strides();
    let src = f.samples();
    let samples = (0..f.len())
        .map(|flat| {
            let idx = f.multi_index(flat);
            src[idx[2] * strides[0] + idx[1] * strides[1] + idx[0] * strides[2] + idx[3] * strides[3]]
        })
        .collect();
    GridFunction::new(f.axes().to_vec(), samples)
}

/// `(F_1, F_2) = ((F + RF)/2, (F - RF)/2)`.
pub fn symmetric_decompose(f: &GridFunction) -> Result<(GridFunction, GridFunction)> {
    let r = reflection_r(f)?;
    let half = Complex64::new(0.5, 0.0);
    Ok((
        f.axpy(Complex64::new(1.0, 0.0), &r)?.scaled(half),
        f.axpy(Complex64::new(-1.0, 0.0), &r)?.scaled(half),
    ))
}

/// `F(eta, nu) = f(eta) f(nu)` on the product grid.
pub fn tensor_square(f: &GridFunction) -> Result<GridFunction> {
    if f.n_axes() != 2 {
        return domain("tensor square expects a function of two variables");
    }
    let n = f.len();
    let s = f.samples();
    let mut samples = Vec::with_capacity(n * n);
    for a in s {
        for b in s {
            samples.push(a * b);
        }
    }
    let ax = f.axes();
    GridFunction::new(vec![ax[0], ax[1], ax[0], ax[1]], samples)
}

/// A reproducible smooth complex function on `[-half, half]^4`: three
/// Gaussian bumps with seeded centres, widths and amplitudes.
pub fn seeded_smooth_function(seed: u64, n: usize, half: f64) -> Result<GridFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<([f64; 4], f64, Complex64)> = (0..3)
        .map(|_| {
            let c = [0; 4].map(|_| rng.gen_range(-0.8..0.8));
            (
                c,
                rng.gen_range(0.8..1.6),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    let axis = Axis::symmetric(half, n)?;
    GridFunction::from_fn(vec![axis; 4], |x| {
        bumps
            .iter()
            .map(|(c, s, a)| {
                let r2: f64 = x.iter().zip(c).map(|(u, v)| (u - v) * (u - v)).sum();
                a * (-s * r2).exp()
            })
            .sum()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingConfig {
    pub cutoff: f64,
    /// Levels below `c_min = (h^2/2) e^{-2 depth}` are dropped, `h` the lattice step;
    /// `|KF|^2` only grows like `ln^2 c` there.
    pub log_depth: f64,
}

impl Default for PairingConfig {
    fn default() -> Self {
        PairingConfig {
            cutoff: DEFAULT_CUTOFF,
            log_depth: 18.0,
        }
    }
}

/// `<KF, F>` together with its error estimate and work count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingResult {
    pub value: f64,
    pub abs_error: f64,
    pub line_integrals: usize,
}

/// `<KF, F>` for a sampled `F` on a grid whose axes pair up as
/// `(eta_1, nu_1)` and `(eta_2, nu_2)`.
///
/// Changing variables to `alpha = eta + nu` and the level `c = Q(eta - nu)/2`
/// and applying the co-area formula once more gives
/// `<KF, F> = int dalpha int dc |KF(alpha, c)|^2`.
/// For each `alpha` on the grid of pairwise sums the samples of `F` with
/// `eta + nu = alpha` form a lattice in `beta` of step `2h`; `F` between
/// lattice nodes is bicubic (Catmull-Rom) and vanishes outside.
pub fn k_pairing(f: &GridFunction, config: PairingConfig) -> Result<PairingResult> {
    if f.n_axes() != 4 {
        return domain("k_pairing expects a function of four variables");
    }
    let ax = f.axes();
    if ax[0] != ax[2] || ax[1] != ax[3] {
        return domain("axes must pair up: (eta_1, nu_1) and (eta_2, nu_2) need identical grids");
    }
    let counts = [ax[0].count, ax[1].count];
    let steps = [ax[0].step(), ax[1].step()];
    let alpha_axes = [
        Axis::new(2.0 * ax[0].lower, 2.0 * ax[0].upper, 2 * counts[0] - 1)?,
        Axis::new(2.0 * ax[1].lower, 2.0 * ax[1].upper, 2 * counts[1] - 1)?,
    ];
    let wa = [
        simpson_weights(alpha_axes[0].count, alpha_axes[0].step())?,
        simpson_weights(alpha_axes[1].count, alpha_axes[1].step())?,
    ];
    let mut total = 0.0;
    let mut err = 0.0;
    let mut lines = 0;
    for m1 in 0..alpha_axes[0].count {
        for m2 in 0..alpha_axes[1].count {
            let Some(lattice) = BetaLattice::new(f, [m1, m2], counts, steps) else {
                continue;
            };
            let (v, e, n) = lattice.level_integral(config);
            let w = wa[0][m1] * wa[1][m2];
            total += w * v;
            err += w * e;
            lines += n;
        }
    }
    Ok(PairingResult {
        value: total,
        abs_error: err,
        line_integrals: lines,
    })
}

/// Samples of `beta -> F((alpha+beta)/2, (alpha-beta)/2)` for one `alpha`.
struct BetaLattice {
    /// Lattice half-widths; the lattice is symmetric about `beta = 0`.
    half: [f64; 2],
    step: [f64; 2],
    count: [usize; 2],
    values: Vec<Complex64>,
}

impl BetaLattice {
    fn new(f: &GridFunction, m: [usize; 2], counts: [usize; 2], steps: [f64; 2]) -> Option<Self> {
        let mut lo = [0usize; 2];
        let mut count = [0usize; 2];
        for k in 0..2 {
            lo[k] = m[k].saturating_sub(counts[k] - 1);
            let hi = m[k].min(counts[k] - 1);
            count[k] = hi + 1 - lo[k];
        }
        if count[0] < 2 || count[1] < 2 {
            return None;
        }
        let strides = f.strides();
        let s = f.samples();
        let mut values = Vec::with_capacity(count[0] * count[1]);
        for a in 0..count[0] {
            let i1 = lo[0] + a;
            let j1 = m[0] - i1;
            for b in 0..count[1] {
                let i2 = lo[1] + b;
                let j2 = m[1] - i2;
                values.push(s[i1 * strides[0] + i2 * strides[1] + j1 * strides[2] + j2 * strides[3]]);
            }
        }
        if values.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            return None;
        }
        let step = [2.0 * steps[0], 2.0 * steps[1]];
        let half = [(count[0] - 1) as f64 * steps[0], (count[1] - 1) as f64 * steps[1]];
        Some(BetaLattice {
            half,
            step,
            count,
            values,
        })
    }

    fn sample(&self, beta: [f64; 2]) -> Complex64 {
        let mut idx = [[0usize; 4]; 2];
        let mut wts = [[0.0f64; 4]; 2];
        for k in 0..2 {
            let u = (beta[k] + self.half[k]) / self.step[k];
            let last = (self.count[k] - 1) as f64;
            if !(u >= 0.0 && u <= last) {
                return Complex64::new(0.0, 0.0);
            }
            let i = (u.floor() as isize).min(self.count[k] as isize - 2);
            wts[k] = catmull_rom(u - i as f64);
            for (j, slot) in idx[k].iter_mut().enumerate() {
                *slot = (i + j as isize - 1).clamp(0, self.count[k] as isize - 1) as usize;
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            let row = idx[0][a] * self.count[1];
            let mut inner = Complex64::new(0.0, 0.0);
            for b in 0..4 {
                inner += self.values[row + idx[1][b]] * wts[1][b];
            }
            acc += inner * wts[0][a];
        }
        acc
    }

    /// `KF(alpha, c)` restricted to the lattice rectangle, with an error estimate.
    ///
    /// Panels in `w` follow equal steps of the lattice in the transverse
    /// coordinate, so every panel sees a bounded number of interpolation cells.
    fn kf(&self, c: f64, cutoff: f64) -> (Complex64, f64) {
        let zero = (Complex64::new(0.0, 0.0), 0.0);
        let r = (2.0 * c.abs()).sqrt();
        let (along, across) = if c > 0.0 {
            (self.half[0], self.half[1])
        } else {
            (self.half[1], self.half[0])
        };
        if along <= r || cutoff <= r {
            return zero;
        }
        let w_top = (along / r)
            .acosh()
            .min((across / r).asinh())
            .min(0.5 * (cutoff * cutoff / (r * r)).acosh());
        if !(w_top > 0.0) {
            return zero;
        }
        let point = |side: f64, w: f64| {
            if c > 0.0 {
                [side * r * w.cosh(), r * w.sinh()]
            } else {
                [r * w.sinh(), side * r * w.cosh()]
            }
        };
        let folded = |w: f64| {
            (self.sample(point(1.0, w)) + self.sample(point(1.0, -w)))
                + (self.sample(point(-1.0, w)) + self.sample(point(-1.0, -w)))
        };
        let delta = self.step[0].min(self.step[1]);
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut add = |a: f64, b: f64| {
            let (v, e) = kronrod7_panel(folded, a, b);
            value += v;
            err += e;
        };
        let w_first = (delta / r).asinh().min(w_top);
        let near = (w_first / MAX_W_PANEL).ceil().max(1.0) as usize;
        for j in 0..near {
            add(w_first * j as f64 / near as f64, w_first * (j + 1) as f64 / near as f64);
        }
        let mut lo = w_first;
        let mut j = 2.0;
        while lo < w_top {
            let hi = ((j * delta / r).asinh()).min(w_top);
            add(lo, hi);
            lo = hi;
            j += 1.0;
        }
        (value / 4.0, err / 4.0)
    }

    /// `int |KF(alpha, c)|^2 dc` over both signs of `c`, with an error estimate
    /// and the number of line integrals used.
    ///
    /// With `c = r^2/2` the radius `r` is cut into lattice-sized panels down to
    /// one lattice step; below it `r = h e^{-v}` absorbs the logarithmic growth.
    fn level_integral(&self, config: PairingConfig) -> (f64, f64, usize) {
        let delta = self.step[0].min(self.step[1]);
        let mut value = 0.0;
        let mut err = 0.0;
        let mut lines = 0;
        for (sign, along) in [(1.0, self.half[0]), (-1.0, self.half[1])] {
            let r_max = along.min(config.cutoff);
            let mut level = |r: f64| {
                lines += 1;
                let (k, e) = self.kf(sign * r * r / 2.0, config.cutoff);
                (k.norm_sqr(), 2.0 * k.norm() * e)
            };
            let mut line_err = 0.0;
            let mut add = |v: Complex64, e: f64| {
                value += v.re;
                err += e;
            };
            let mut hi = r_max;
            while hi > delta {
                let lo = (hi - delta).max(delta);
                let (v, e) = kronrod7_panel(
                    |r| {
                        let (k2, ke) = level(r);
                        line_err += ke * r * (hi - lo) / 2.0;
                        Complex64::new(k2 * r, 0.0)
                    },
                    lo,
                    hi,
                );
                add(v, e);
                hi = lo;
            }
            let r0 = hi;
            let panels = config.log_depth.ceil().max(1.0) as usize;
            let width = config.log_depth / panels as f64;
            for j in 0..panels {
                let (v, e) = kronrod7_panel(
                    |t| {
                        let r = r0 * (-t).exp();
                        let (k2, ke) = level(r);
                        line_err += ke * r * r * width / 2.0;
                        Complex64::new(k2 * r * r, 0.0)
                    },
                    j as f64 * width,
                    (j + 1) as f64 * width,
                );
                add(v, e);
            }
            err += line_err;
        }
        (value, err, lines)
    }
}

/// Widest `w` panel allowed before the transverse lattice steps take over.
const MAX_W_PANEL: f64 = 1.0;

fn catmull_rom(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}
