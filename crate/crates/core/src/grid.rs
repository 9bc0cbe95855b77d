//! Uniformly sampled complex functions on boxes in `R^n`, `1 <= n <= 4`.
//!
//! Text format (shared by every module and the CLI):
//!
//! ```text
//! # hypext-grid v1
//! axes 2
//! axis -6 6 128
//! axis -6 6 128
//! index re im
//! 0 1e-25 0e0
//! ...
//! ```
//!
//! Samples are stored row-major (last axis fastest); `index` is the flat
//! position. Floats are written in shortest round-trip form.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::simpson_weights;

const MAGIC: &str = "# hypext-grid v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lower: f64, upper: f64, count: usize) -> Result<Self> {
        if count < 3 {
            return domain(format!("axis needs at least 3 samples, got {count}"));
        }
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return domain(format!("invalid axis bounds [{lower}, {upper}]"));
        }
        Ok(Axis { lower, upper, count })
    }

    /// `[-half_width, half_width]` with `count` nodes.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Axis::new(-half_width, half_width, count)
    }

    pub fn step(&self) -> f64 {
        (self.upper - self.lower) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.upper
        } else {
            self.lower + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.lower == -self.upper
    }

    pub fn half_width(&self) -> f64 {
        self.lower.abs().max(self.upper.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    axes: Vec<Axis>,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(axes: Vec<Axis>, samples: Vec<Complex64>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 4 {
            return domain(format!("grid functions have 1 to 4 axes, got {}", axes.len()));
        }
        if let Some(a) = axes.iter().find(|a| a.count < 3) {
            return domain(format!("axis with {} samples; at least 3 required", a.count));
        }
        let len: usize = axes.iter().map(|a| a.count).product();
        if samples.len() != len {
            return domain(format!("expected {len} samples, got {}", samples.len()));
        }
        Ok(GridFunction { axes, samples })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F>(axes: Vec<Axis>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let len: usize = axes.iter().map(|a| a.count).product();
        let nodes: Vec<Vec<f64>> = axes.iter().map(Axis::nodes).collect();
        let mut point = vec![0.0; axes.len()];
        let mut samples = Vec::with_capacity(len);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..len {
            for (k, &i) in idx.iter().enumerate() {
                point[k] = nodes[k][i];
            }
            samples.push(f(&point));
            for k in (0..axes.len()).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].count {
                    break;
                }
                idx[k] = 0;
            }
        }
        GridFunction::new(axes, samples)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn n_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for k in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.axes[k + 1].count;
        }
        strides
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for k in (0..self.axes.len()).rev() {
            idx[k] = flat % self.axes[k].count;
            flat /= self.axes[k].count;
        }
        idx
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.node(i))
            .collect()
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.axes == other.axes
    }

    /// Tensor-product Simpson weights, one per sample.
    pub fn quadrature_weights(&self) -> Result<Vec<f64>> {
        let per_axis: Vec<Vec<f64>> = self
            .axes
            .iter()
            .map(|a| simpson_weights(a.count, a.step()))
            .collect::<Result<_>>()?;
        Ok((0..self.samples.len())
            .map(|flat| {
                self.multi_index(flat)
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| per_axis[k][i])
                    .product()
            })
            .collect())
    }

    /// `<self, other> = int conj(self) other` with Simpson weights.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        if !self.same_grid(other) {
            return domain("inner product of functions on different grids");
        }
        let w = self.quadrature_weights()?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .zip(&w)
            .map(|((a, b), w)| a.conj() * b * w)
            .sum())
    }

    pub fn norm_l2(&self) -> Result<f64> {
        Ok(self.inner(self)?.re.max(0.0).sqrt())
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> GridFunction {
        GridFunction {
            axes: self.axes.clone(),
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> GridFunction {
        self.map(|v| v * c)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex64, other: &GridFunction) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return domain("sum of functions on different grids");
        }
        Ok(GridFunction {
            axes: self.axes.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b * c)
                .collect(),
        })
    }

    /// Multilinear interpolation; zero outside the box.
    pub fn interpolate(&self, point: &[f64]) -> Complex64 {
        debug_assert_eq!(point.len(), self.axes.len());
        let n = self.axes.len();
        let strides = self.strides();
        let mut base = 0usize;
        let mut frac = [0.0f64; 4];
        for k in 0..n {
            let a = &self.axes[k];
            let u = (point[k] - a.lower) / a.step();
            if !(u >= 0.0 && u <= (a.count - 1) as f64) {
                return Complex64::new(0.0, 0.0);
            }
            let i = (u.floor() as usize).min(a.count - 2);
            frac[k] = u - i as f64;
            base += i * strides[k];
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut off = 0;
            for k in 0..n {
                if corner >> k & 1 == 1 {
                    w *= frac[k];
                    off += strides[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if w != 0.0 {
                acc += self.samples[base + off] * w;
            }
        }
        acc
    }

    /// Tensor Catmull-Rom (cubic convolution) interpolation; zero outside the
    /// box, with the stencil clamped at the edges.
    pub fn interpolate_cubic(&self, point: &[f64]) -> Complex64 {
        let n = self.axes.len();
        let strides = self.strides();
        let mut idx = [[0usize; 4]; 4];
        let mut wts = [[0.0f64; 4]; 4];
        for k in 0..n {
            let a = &self.axes[k];
            let u = (point[k] - a.lower) / a.step();
            let last = (a.count - 1) as f64;
            if !(u >= 0.0 && u <= last) {
                return Complex64::new(0.0, 0.0);
            }
            let i = (u.floor() as isize).min(a.count as isize - 2);
            let t = u - i as f64;
            wts[k] = catmull_rom(t);
            for (j, slot) in idx[k].iter_mut().enumerate() {
                let m = (i + j as isize - 1).clamp(0, a.count as isize - 1);
                *slot = m as usize * strides[k];
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let corners = 4usize.pow(n as u32);
        for corner in 0..corners {
            let mut w = 1.0;
            let mut off = 0;
            let mut c = corner;
            for k in 0..n {
                let j = c & 3;
                c >>= 2;
                w *= wts[k][j];
                off += idx[k][j];
            }
            if w != 0.0 {
                acc += self.samples[off] * w;
            }
        }
        acc
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "axes {}", self.axes.len())?;
        for a in &self.axes {
            writeln!(out, "axis {:e} {:e} {}", a.lower, a.upper, a.count)?;
        }
        writeln!(out, "index re im")?;
        for (i, v) in self.samples.iter().enumerate() {
            writeln!(out, "{i} {:e} {:e}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse("unexpected end of grid file".into()))?
                .map_err(Error::from)
        };
        if next()?.trim() != MAGIC {
            return Err(Error::Parse("missing grid header".into()));
        }
        let n: usize = field(&next()?, "axes", 1)?[0]
            .parse()
            .map_err(|e| Error::Parse(format!("axis count: {e}")))?;
        let mut axes = Vec::with_capacity(n);
        for _ in 0..n {
            let f = field(&next()?, "axis", 3)?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("axis bound {s}: {e}")))
            };
            let count = f[2].parse().map_err(|e| Error::Parse(format!("axis count: {e}")))?;
            axes.push(Axis::new(parse(&f[0])?, parse(&f[1])?, count)?);
        }
        if next()?.trim() != "index re im" {
            return Err(Error::Parse("missing column header".into()));
        }
        let len: usize = axes.iter().map(|a| a.count).product();
        let mut samples = vec![Complex64::new(0.0, 0.0); len];
        let mut seen = vec![false; len];
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("bad sample row: {line}")));
            }
            let i: usize = parts[0].parse().map_err(|e| Error::Parse(format!("index: {e}")))?;
            if i >= len {
                return Err(Error::Parse(format!("index {i} out of range")));
            }
            let re: f64 = parts[1].parse().map_err(|e| Error::Parse(format!("re: {e}")))?;
            let im: f64 = parts[2].parse().map_err(|e| Error::Parse(format!("im: {e}")))?;
            samples[i] = Complex64::new(re, im);
            seen[i] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Parse(format!("sample {missing} missing")));
        }
        GridFunction::new(axes, samples)
    }
}

fn field(line: &str, key: &str, n: usize) -> Result<Vec<String>> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(Error::Parse(format!("expected '{key}' line, got '{line}'")));
    }
    let rest: Vec<String> = parts.map(str::to_owned).collect();
    if rest.len() != n {
        return Err(Error::Parse(format!("'{key}' line needs {n} fields")));
    }
    Ok(rest)
}

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
