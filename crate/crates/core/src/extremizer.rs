//! Gradient ascent on `Lambda(f) = ||Tf||_4^4 / ||f||_2^4` for the saddle
//! `Q(xi) = xi_1^2 - xi_2^2`.
//!
//! `Tf(., t)` is evaluated slice by slice with one zero-padded FFT each. The
//! time axis is split at `|t| = T`: the near part `|t| <= T` is integrated
//! directly, the far part is folded back through the lens transform
//!
//! ```text
//! |Tf(x, t)| = |TF(-sigma x / 2t, -1/4t)| / (4 pi |t|),   F(z) = int f(xi) e^{-i xi.z} dxi
//! int_{|t| > T} int |Tf|^4 = (1 / 16 pi^4) int_{|tau| < 1/4T} int |TF|^4
//! ```
//!
//! so the whole time line is covered by two compact Simpson stacks. All
//! sums over `xi` use uniform weights `h^2`, and the gradient is the exact
//! gradient of the discrete functional in the inner product
//! `<u, v> = h^2 sum conj(u) v`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gaussian_extension::gaussian;
use crate::grid::{Axis, GridFunction};
use crate::quadrature::simpson_weights;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceConfig {
    /// Split point `T` between the near and the lens-folded far stack.
    pub t_max: f64,
    /// Simpson nodes on `[-T, T]` (odd).
    pub t_slices: usize,
    /// Simpson nodes on `[-1/4T, 1/4T]` (odd).
    pub far_slices: usize,
    /// FFT length per axis as a multiple of the sample count.
    pub pad: usize,
}

impl Default for SliceConfig {
    fn default() -> Self {
        SliceConfig {
            t_max: 1.0,
            t_slices: 65,
            far_slices: 33,
            pad: 2,
        }
    }
}

/// Square 2-D FFT of side `m`, in place, row-major.
struct Fft2 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(m: [usize; 2]) -> Self {
        assert_eq!(m[0], m[1]);
        let mut planner = FftPlanner::new();
        Fft2 {
            m: m[0],
            forward: planner.plan_fft_forward(m[0]),
            inverse: planner.plan_fft_inverse(m[0]),
        }
    }

    fn run(&self, buf: &mut [Complex64], scratch: &mut Vec<Complex64>, inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let m = self.m;
        plan.process(buf);
        scratch.resize(m * m, ZERO);
        transpose(buf, scratch, m);
        plan.process(scratch);
        transpose(scratch, buf, m);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in 0..m {
            dst[j * m + i] = src[i * m + j];
        }
    }
}

/// Signed FFT frequency of slot `j` out of `m`.
fn signed(j: usize, m: usize) -> f64 {
    if j < m.div_ceil(2) {
        j as f64
    } else {
        j as f64 - m as f64
    }
}

/// Everything that depends on the grid but not on `f`.
pub struct SlicePlan {
    axes: [Axis; 2],
    n: [usize; 2],
    m: usize,
    /// `h_1 h_2`.
    cell: f64,
    /// Conjugate spacing `2 pi / (m h_k)`; shared by the `x` and `z` grids.
    dual_step: [f64; 2],
    q_xi: Vec<f64>,
    q_z: Vec<f64>,
    /// `e^{i x_j lower_k}` per axis in FFT order.
    shift: [Vec<Complex64>; 2],
    near: Vec<(f64, f64)>,
    far: Vec<(f64, f64)>,
    fft: Fft2,
}

/// Far-stack constant `1 / (16 pi^4)`.
const LENS: f64 = 1.0 / (16.0 * PI * PI * PI * PI);

impl SlicePlan {
    pub fn new(axes: &[Axis], config: SliceConfig) -> Result<Self> {
        if axes.len() != 2 {
            return domain("the saddle search works in two dimensions");
        }
        let axes = [axes[0], axes[1]];
        for a in &axes {
            if !a.is_symmetric() {
                return domain("the sampling box must be symmetric about the origin");
            }
        }
        if axes[0].count != axes[1].count {
            return domain("both axes need the same sample count");
        }
        if !(config.t_max > 0.0 && config.t_max.is_finite()) {
            return domain(format!("t_max must be positive, got {}", config.t_max));
        }
        for s in [config.t_slices, config.far_slices] {
            if s < 3 || s % 2 == 0 {
                return domain(format!("slice counts must be odd and at least 3, got {s}"));
            }
        }
        if config.pad < 1 {
            return domain("pad factor must be at least 1");
        }
        for a in &axes {
            slice_guard(a, config.t_max)?;
        }
        let n = [axes[0].count, axes[1].count];
        let m = config.pad * n[0];
        let h = [axes[0].step(), axes[1].step()];
        let dual_step = [2.0 * PI / (m as f64 * h[0]), 2.0 * PI / (m as f64 * h[1])];
        let mut q_xi = Vec::with_capacity(n[0] * n[1]);
        for i in 0..n[0] {
            let a = axes[0].node(i);
            for j in 0..n[1] {
                let b = axes[1].node(j);
                q_xi.push(a * a - b * b);
            }
        }
        let mut q_z = Vec::with_capacity(m * m);
        for i in 0..m {
            let a = signed(i, m) * dual_step[0];
            for j in 0..m {
                let b = signed(j, m) * dual_step[1];
                q_z.push(a * a - b * b);
            }
        }
        let shift = [0, 1].map(|k| {
            (0..m)
                .map(|j| Complex64::from_polar(1.0, signed(j, m) * dual_step[k] * axes[k].lower))
                .collect()
        });
        let stack = |half: f64, count: usize| -> Result<Vec<(f64, f64)>> {
            let step = 2.0 * half / (count - 1) as f64;
            let w = simpson_weights(count, step)?;
            Ok((0..count).map(|i| (-half + i as f64 * step, w[i])).collect())
        };
        Ok(SlicePlan {
            axes,
            n,
            m,
            cell: h[0] * h[1],
            dual_step,
            q_xi,
            q_z,
            shift,
            near: stack(config.t_max, config.t_slices)?,
            far: stack(0.25 / config.t_max, config.far_slices)?,
            fft: Fft2::new([m, m]),
        })
    }

    pub fn axes(&self) -> &[Axis; 2] {
        &self.axes
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        if f.axes() != self.axes {
            return domain("function is not sampled on the planned grid");
        }
        Ok(())
    }

    /// `h^2 sum |f|^2`.
    pub fn norm_sq(&self, f: &GridFunction) -> f64 {
        self.cell * f.samples().iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// `h^2 sum conj(u) v`.
    pub fn inner(&self, u: &GridFunction, v: &GridFunction) -> Complex64 {
        self.cell
            * u.samples()
                .iter()
                .zip(v.samples())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
    }

    /// `h^2 f e^{itQ}` zero-padded to the FFT box.
    fn load(&self, f: &GridFunction, t: f64, buf: &mut Vec<Complex64>) {
        buf.clear();
        buf.resize(self.m * self.m, ZERO);
        let s = f.samples();
        for i in 0..self.n[0] {
            for j in 0..self.n[1] {
                let k = i * self.n[1] + j;
                let phase = if t == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, t * self.q_xi[k])
                };
                buf[i * self.m + j] = s[k] * phase * self.cell;
            }
        }
    }

    /// `Tf(x, t)` on the `x` grid in FFT order.
    fn near_slice(&self, f: &GridFunction, t: f64, buf: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        self.load(f, t, buf);
        self.fft.run(buf, scratch, true);
        self.apply_shift(buf, false);
    }

    /// Multiplies by `e^{+-i x.lower}` on the dual grid.
    fn apply_shift(&self, buf: &mut [Complex64], conjugate: bool) {
        for i in 0..self.m {
            for j in 0..self.m {
                let mut s = self.shift[0][i] * self.shift[1][j];
                if conjugate {
                    s = s.conj();
                }
                buf[i * self.m + j] *= s;
            }
        }
    }

    /// `F(z) = h^2 sum f e^{-i xi.z}` on the `z` grid.
    fn fourier(&self, f: &GridFunction, scratch: &mut Vec<Complex64>) -> Vec<Complex64> {
        let mut buf = Vec::new();
        self.load(f, 0.0, &mut buf);
        self.fft.run(&mut buf, scratch, false);
        self.apply_shift(&mut buf, true);
        buf
    }

    /// `TF(y, tau)` on the `y` grid (spacing `h`) in FFT order.
    fn far_slice(&self, big_f: &[Complex64], tau: f64, buf: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        let dz = self.dual_step[0] * self.dual_step[1];
        buf.clear();
        buf.extend(
            big_f
                .iter()
                .zip(&self.q_z)
                .map(|(v, q)| v * Complex64::from_polar(dz, tau * q)),
        );
        self.fft.run(buf, scratch, true);
    }

    /// `int int |Tf|^4 dx dt` over the whole time line.
    pub fn l4_norm4(&self, f: &GridFunction) -> Result<f64> {
        self.check(f)?;
        let mut buf = Vec::new();
        let mut scratch = Vec::new();
        let dx = self.dual_step[0] * self.dual_step[1];
        let mut near = 0.0;
        for &(t, w) in &self.near {
            self.near_slice(f, t, &mut buf, &mut scratch);
            near += w * dx * buf.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum::<f64>();
        }
        let big_f = self.fourier(f, &mut scratch);
        let dy = self.cell;
        let mut far = 0.0;
        for &(tau, w) in &self.far {
            self.far_slice(&big_f, tau, &mut buf, &mut scratch);
            far += w * dy * buf.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum::<f64>();
        }
        finite(near + LENS * far, "||Tf||_4^4")
    }

    pub fn lambda(&self, f: &GridFunction) -> Result<f64> {
        let n2 = self.norm_sq(f);
        if !(n2 > 0.0) {
            return domain("the functional is undefined at f = 0");
        }
        Ok(self.l4_norm4(f)? / (n2 * n2))
    }

    /// `(Lambda(f), grad Lambda(f))`.
    pub fn lambda_and_gradient(&self, f: &GridFunction) -> Result<(f64, GridFunction)> {
        self.check(f)?;
        let n2 = self.norm_sq(f);
        if !(n2 > 0.0) {
            return domain("the functional is undefined at f = 0");
        }
        let (m, n) = (self.m, self.n);
        let mut buf = Vec::new();
        let mut scratch = Vec::new();
        let dx = self.dual_step[0] * self.dual_step[1];
        let mut norm4 = 0.0;
        let mut grad = vec![ZERO; n[0] * n[1]];

        for &(t, w) in &self.near {
            self.near_slice(f, t, &mut buf, &mut scratch);
            let mut slice = 0.0;
            for v in buf.iter_mut() {
                let a2 = v.norm_sqr();
                slice += a2 * a2;
                *v *= a2 * dx;
            }
            norm4 += w * dx * slice;
            self.apply_shift(&mut buf, true);
            self.fft.run(&mut buf, &mut scratch, false);
            for i in 0..n[0] {
                for j in 0..n[1] {
                    let k = i * n[1] + j;
                    grad[k] += buf[i * m + j] * Complex64::from_polar(w, -t * self.q_xi[k]);
                }
            }
        }

        let big_f = self.fourier(f, &mut scratch);
        let dy = self.cell;
        let dz = dx;
        let mut pull = vec![ZERO; m * m];
        for &(tau, w) in &self.far {
            self.far_slice(&big_f, tau, &mut buf, &mut scratch);
            let mut slice = 0.0;
            for v in buf.iter_mut() {
                let a2 = v.norm_sqr();
                slice += a2 * a2;
                *v *= a2;
            }
            norm4 += LENS * w * dy * slice;
            self.fft.run(&mut buf, &mut scratch, false);
            for ((p, v), q) in pull.iter_mut().zip(&buf).zip(&self.q_z) {
                *p += v * Complex64::from_polar(w * dy * dz, -tau * q);
            }
        }
        self.apply_shift(&mut pull, false);
        self.fft.run(&mut pull, &mut scratch, true);
        for i in 0..n[0] {
            for j in 0..n[1] {
                grad[i * n[1] + j] += pull[i * m + j] * LENS;
            }
        }

        let norm4 = finite(norm4, "||Tf||_4^4")?;
        let scale = 4.0 / (n2 * n2);
        for (g, v) in grad.iter_mut().zip(f.samples()) {
            *g = (*g - v * (norm4 / n2)) * scale;
        }
        Ok((norm4 / (n2 * n2), GridFunction::new(self.axes.to_vec(), grad)?))
    }
}

/// The slice transform resolves the phase `t Q(xi)` only while
/// `2 |t| L < pi / h` on every axis.
fn slice_guard(a: &Axis, t: f64) -> Result<()> {
    let need = 2.0 * t.abs() * a.half_width();
    let limit = PI / a.step();
    if need >= limit {
        return Err(Error::Resolution(format!(
            "phase frequency {need:.3} at |t| = {t} exceeds the grid limit {limit:.3}; refine the grid or lower t_max"
        )));
    }
    Ok(())
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{what} = {v}")))
    }
}

/// `Tf(., t)` for each requested `t`, on the conjugate `x` grid
/// (spacing `2 pi / (pad n h)`, ascending, centred at the origin).
pub fn extension_slices(f: &GridFunction, t_samples: &[f64], pad: usize) -> Result<Vec<GridFunction>> {
    let t_max = t_samples
        .iter()
        .fold(0.0f64, |a, t| a.max(t.abs()))
        .max(f64::MIN_POSITIVE);
    let plan = SlicePlan::new(
        f.axes(),
        SliceConfig {
            t_max,
            pad,
            ..SliceConfig::default()
        },
    )?;
    let m = plan.m;
    let half = (m / 2) as f64;
    let x_axes: Vec<Axis> = (0..2)
        .map(|k| Axis::new(-half * plan.dual_step[k], (half - 1.0) * plan.dual_step[k], m))
        .collect::<Result<_>>()?;
    let mut buf = Vec::new();
    let mut scratch = Vec::new();
    t_samples
        .iter()
        .map(|&t| {
            plan.near_slice(f, t, &mut buf, &mut scratch);
            // FFT order -> ascending order.
            let mut out = vec![ZERO; m * m];
            for i in 0..m {
                for j in 0..m {
                    out[((i + m / 2) % m) * m + (j + m / 2) % m] = buf[i * m + j];
                }
            }
            GridFunction::new(x_axes.clone(), out)
        })
        .collect()
}

pub fn lambda_functional(f: &GridFunction) -> Result<f64> {
    SlicePlan::new(f.axes(), SliceConfig::default())?.lambda(f)
}

pub fn lambda_gradient(f: &GridFunction) -> Result<GridFunction> {
    Ok(SlicePlan::new(f.axes(), SliceConfig::default())?
        .lambda_and_gradient(f)?
        .1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub max_iters: usize,
    /// Initial step length on the unit sphere.
    pub step: f64,
    /// Stop once an accepted step raises `Lambda` by less than this fraction.
    pub tol: f64,
    pub slices: SliceConfig,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            max_iters: 200,
            step: 0.05,
            tol: 1e-9,
            slices: SliceConfig::default(),
        }
    }
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AscentStep {
    pub iteration: usize,
    pub lambda: f64,
    pub step: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone)]
pub struct AscentReport {
    pub iterations: usize,
    pub lambda_trace: Vec<f64>,
    pub steps: Vec<AscentStep>,
    pub final_f: GridFunction,
    pub gradient_norm_final: f64,
    /// `Lambda` of the unit Gaussian on the same grid.
    pub lambda_gaussian: f64,
    pub improved_over_gaussian: bool,
}

impl AscentReport {
    pub fn final_lambda(&self) -> f64 {
        *self.lambda_trace.last().unwrap_or(&f64::NAN)
    }

    /// One JSON object per line: iteration, lambda, step, gradient_norm.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("plain numbers serialize"));
            out.push('\n');
        }
        out
    }
}

/// Relative margin a run must clear to count as beating the Gaussian.
pub const IMPROVEMENT_MARGIN: f64 = 1e-3;

const MIN_STEP: f64 = 1e-10;

/// Projected gradient ascent on the unit sphere with a doubling/halving step.
pub fn ascend(f0: &GridFunction, config: AscentConfig) -> Result<AscentReport> {
    if !(config.step > 0.0 && config.step.is_finite()) {
        return domain(format!("initial step must be positive, got {}", config.step));
    }
    if !(config.tol >= 0.0) {
        return domain(format!("tolerance must be non-negative, got {}", config.tol));
    }
    let plan = SlicePlan::new(f0.axes(), config.slices)?;
    let gauss = GridFunction::from_fn(f0.axes().to_vec(), |xi| Complex64::new(gaussian(xi), 0.0))?;
    let lambda_gaussian = plan.lambda(&gauss)?;

    let normalize = |f: &GridFunction| -> Result<GridFunction> {
        let n = plan.norm_sq(f).sqrt();
        if !(n > 0.0) {
            return domain("cannot normalize the zero function");
        }
        Ok(f.scaled(Complex64::new(1.0 / n, 0.0)))
    };
    let mut f = normalize(f0)?;
    let (mut lambda, mut grad) = plan.lambda_and_gradient(&f)?;
    let mut gnorm = plan.norm_sq(&grad).sqrt();
    let mut trace = vec![lambda];
    let mut steps = vec![AscentStep {
        iteration: 0,
        lambda,
        step: 0.0,
        gradient_norm: gnorm,
    }];
    let mut alpha = config.step;
    let mut iterations = 0;

    if config.tol.is_finite() {
        'outer: while iterations < config.max_iters && gnorm > 0.0 {
            let dir = grad.scaled(Complex64::new(1.0 / gnorm, 0.0));
            loop {
                let trial = normalize(&f.axpy(Complex64::new(alpha, 0.0), &dir)?)?;
                let value = plan.lambda(&trial)?;
                if value > lambda {
                    let gain = (value - lambda) / lambda;
                    f = trial;
                    iterations += 1;
                    (lambda, grad) = plan.lambda_and_gradient(&f)?;
                    gnorm = plan.norm_sq(&grad).sqrt();
                    trace.push(lambda);
                    steps.push(AscentStep {
                        iteration: iterations,
                        lambda,
                        step: alpha,
                        gradient_norm: gnorm,
                    });
                    alpha = (2.0 * alpha).min(1.0);
                    if gain < config.tol {
                        break 'outer;
                    }
                    break;
                }
                alpha /= 2.0;
                if alpha < MIN_STEP {
                    break 'outer;
                }
            }
        }
    }

    Ok(AscentReport {
        iterations,
        lambda_trace: trace,
        steps,
        final_f: f,
        gradient_norm_final: gnorm,
        lambda_gaussian,
        improved_over_gaussian: lambda > lambda_gaussian * (1.0 + IMPROVEMENT_MARGIN),
    })
}
