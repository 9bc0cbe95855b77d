//! The normalized Gaussian `g(xi) = exp(-pi |xi|^2 / 2)`, its extension in
//! closed form, and a direct-sum extension operator for sampled functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::exponents::{admissible_range, Signature};
use crate::grid::{Axis, GridFunction};
use crate::quadrature::{half_power, integrate_line, simpson_weights, Tolerance};

/// Default half-width of the sampling box for the Gaussian.
pub const GAUSSIAN_BOX: f64 = 6.0;
/// Default samples per axis for the Gaussian in two dimensions.
pub const GAUSSIAN_SAMPLES: usize = 128;

pub fn gaussian(xi: &[f64]) -> f64 {
    (-PI * xi.iter().map(|v| v * v).sum::<f64>() / 2.0).exp()
}

/// `g` sampled on `[-half_width, half_width]^d` with `n` nodes per axis.
pub fn gaussian_grid(d: usize, half_width: f64, n: usize) -> Result<GridFunction> {
    let axis = Axis::symmetric(half_width, n)?;
    GridFunction::from_fn(vec![axis; d], |xi| Complex64::new(gaussian(xi), 0.0))
}

/// `Tg(x, t)` in closed form.
pub fn extension_gaussian_closed(sig: &Signature, x: &[f64], t: f64) -> Result<Complex64> {
    if x.len() != sig.d() {
        return domain(format!(
            "point has {} coordinates, signature needs {}",
            x.len(),
            sig.d()
        ));
    }
    Ok(x.iter()
        .enumerate()
        .map(|(k, &xk)| {
            let a = Complex64::new(0.5, -sig.sign(k) * t / PI);
            half_power(a, -1) * (-(xk * xk) / (4.0 * PI * a)).exp()
        })
        .product())
}

/// `|Tg(x, t)|`; independent of the signature.
pub fn extension_abs_gaussian(d: usize, x: &[f64], t: f64) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (0.25 + t * t / (PI * PI)).powf(-(d as f64) / 4.0) * (-PI * r2 / (2.0 * (PI * PI + 4.0 * t * t))).exp()
}

/// Checks that the phase `x.xi + t Q(xi)` is resolved on the grid of `f`.
pub fn nyquist_check(f: &GridFunction, x: &[f64], t: f64) -> Result<()> {
    for (j, a) in f.axes().iter().enumerate() {
        let need = x[j].abs() + 2.0 * t.abs() * a.half_width();
        let limit = PI / a.step();
        if need > limit {
            return Err(Error::Resolution(format!(
                "axis {j}: phase frequency {need:.3} exceeds grid limit {limit:.3}"
            )));
        }
    }
    Ok(())
}

/// `Tf(x, t) = int exp(i x.xi + i t Q(xi)) f(xi) dxi` by weighted direct sum.
pub fn extension_numeric(f: &GridFunction, sig: &Signature, x: &[f64], t: f64) -> Result<Complex64> {
    if f.n_axes() != sig.d() || x.len() != sig.d() {
        return domain("dimension mismatch between grid, signature and point");
    }
    nyquist_check(f, x, t)?;
    let weights: Vec<Vec<f64>> = f
        .axes()
        .iter()
        .map(|a| simpson_weights(a.count, a.step()))
        .collect::<Result<_>>()?;
    // The phase factorizes across axes: precompute one table per axis.
    let tables: Vec<Vec<Complex64>> = f
        .axes()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            (0..a.count)
                .map(|i| {
                    let xi = a.node(i);
                    Complex64::from_polar(weights[j][i], x[j] * xi + t * sig.sign(j) * xi * xi)
                })
                .collect()
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (flat, v) in f.samples().iter().enumerate() {
        let mut phase = *v;
        for (j, i) in f.multi_index(flat).into_iter().enumerate() {
            phase *= tables[j][i];
        }
        acc += phase;
    }
    Ok(acc)
}

/// Multiplies `f` by `exp(i a.xi)`; this translates `Tf` by `a` in `x`.
pub fn modulate(f: &GridFunction, a: &[f64]) -> Result<GridFunction> {
    if a.len() != f.n_axes() {
        return domain("modulation vector has the wrong dimension");
    }
    let nodes: Vec<Vec<f64>> = (0..f.len()).map(|i| f.node(i)).collect();
    let samples = f
        .samples()
        .iter()
        .zip(&nodes)
        .map(|(v, xi)| v * Complex64::from_polar(1.0, xi.iter().zip(a).map(|(u, w)| u * w).sum()))
        .collect();
    GridFunction::new(f.axes().to_vec(), samples)
}

/// `||Tg||_q^q` via the reduced time integral (the space integral is Gaussian).
pub fn gaussian_strichartz_norm(d: usize, q: f64) -> Result<f64> {
    check_time_integrable(d, q)?;
    let df = d as f64;
    let integrand = |t: f64| {
        let m = PI * PI + 4.0 * t * t;
        let v = (m / (4.0 * PI * PI)).powf(-df * q / 4.0) * (2.0 * m / q).powf(df / 2.0);
        Complex64::new(v, 0.0)
    };
    Ok(integrate_line(integrand, Tolerance::new(1e-14, 1e-13))?.value.re)
}

/// `||Tg||_q^q` by a product grid over `(x, t)` using the closed form of `Tg`.
///
/// Time is compactified by `t = (pi/2) tan(theta)` (midpoint rule on
/// `theta_samples` cells) and space is dilated by the Gaussian width,
/// `x = sqrt(pi^2 + 4 t^2) y`, with Simpson on `[-y_half, y_half]^d`.
pub fn strichartz_norm_grid(
    sig: &Signature,
    q: f64,
    theta_samples: usize,
    y_samples: usize,
    y_half: f64,
) -> Result<f64> {
    let d = sig.d();
    check_time_integrable(d, q)?;
    if theta_samples == 0 {
        return domain("need at least one time cell");
    }
    let axis = Axis::symmetric(y_half, y_samples)?;
    let wy = simpson_weights(y_samples, axis.step())?;
    let ys = axis.nodes();
    let dtheta = PI / theta_samples as f64;
    let mut total = 0.0;
    let mut x = vec![0.0; d];
    let mut idx = vec![0usize; d];
    let cells = y_samples.pow(d as u32);
    for m in 0..theta_samples {
        let theta = -PI / 2.0 + (m as f64 + 0.5) * dtheta;
        let t = PI / 2.0 * theta.tan();
        let width = (PI * PI + 4.0 * t * t).sqrt();
        let jac_t = PI / 2.0 / (theta.cos() * theta.cos());
        let jac_x = width.powi(d as i32);
        let mut slice = 0.0;
        idx.iter_mut().for_each(|i| *i = 0);
        for _ in 0..cells {
            let mut w = 1.0;
            for k in 0..d {
                x[k] = width * ys[idx[k]];
                w *= wy[idx[k]];
            }
            slice += w * extension_gaussian_closed(sig, &x, t)?.norm().powf(q);
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < y_samples {
                    break;
                }
                idx[k] = 0;
            }
        }
        total += slice * jac_x * jac_t * dtheta;
    }
    Ok(total)
}

fn check_time_integrable(d: usize, q: f64) -> Result<()> {
    let (_, threshold) = admissible_range(d);
    if !(q > threshold) {
        return Err(Error::Divergent(format!(
            "the time integral of |Tg|^q diverges for q = {q} <= {threshold}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn saddle() -> Signature {
        Signature::new(1, 1).unwrap()
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian(&[0.0, 0.0]), 1.0);
        let r = (2.0 / PI).sqrt();
        assert!((gaussian(&[r]) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_is_l2_normalized() {
        for d in 1..=3 {
            let g = gaussian_grid(d, GAUSSIAN_BOX, GAUSSIAN_SAMPLES).unwrap();
            let g2 = g.map(|v| v * v);
            let norm = integrate_grid(&g2).unwrap().re;
            assert!((norm - 1.0).abs() < 1e-10, "d={d}: {norm}");
        }
    }

    #[test]
    fn closed_form_at_origin() {
        for (dp, dm) in [(1, 1), (2, 1), (2, 2)] {
            let sig = Signature::new(dp, dm).unwrap();
            let d = sig.d();
            let v = extension_gaussian_closed(&sig, &vec![0.0; d], 0.0).unwrap();
            assert!((v - Complex64::new(2f64.powf(d as f64 / 2.0), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn abs_closed_form_restrictions() {
        let t = 1.7;
        let v = extension_abs_gaussian(3, &[0.0; 3], t);
        assert!((v - (0.25 + t * t / (PI * PI)).powf(-0.75)).abs() < 1e-15);
        let big = extension_abs_gaussian(2, &[0.0, 0.0], 1e3);
        assert!((big / (PI / 1e3) - 1.0).abs() < 0.01);
    }

    #[test]
    fn modulus_matches_closed_form_for_all_signatures() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (dp, dm) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
            let sig = Signature::new(dp, dm).unwrap();
            for _ in 0..50 {
                let x: Vec<f64> = (0..sig.d()).map(|_| rng.gen_range(-4.0..4.0)).collect();
                let t = rng.gen_range(-5.0..5.0);
                let a = extension_gaussian_closed(&sig, &x, t).unwrap().norm();
                let b = extension_abs_gaussian(sig.d(), &x, t);
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn sign_flip_conjugates() {
        let sig = Signature::new(2, 1).unwrap();
        let x = [0.3, -1.2, 0.8];
        let a = extension_gaussian_closed(&sig, &x, 0.9).unwrap();
        let flipped = Signature::new(1, 2).unwrap();
        // (1,2) puts the single plus sign first: mirror the coordinates.
        let b = extension_gaussian_closed(&flipped, &[0.8, 0.3, -1.2], -0.9).unwrap();
        assert!((a - b).norm() < 1e-14);
        let c = extension_gaussian_closed(&sig, &x, -0.9).unwrap();
        assert!((a.conj() - c).norm() < 1e-14);
    }

    #[test]
    fn numeric_matches_closed_form() {
        let g = gaussian_grid(2, GAUSSIAN_BOX, GAUSSIAN_SAMPLES).unwrap();
        let v = extension_numeric(&g, &saddle(), &[0.0, 0.0], 0.0).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-8);
        let w = extension_numeric(&g, &saddle(), &[1.3, -0.4], 1.1).unwrap();
        let exact = extension_gaussian_closed(&saddle(), &[1.3, -0.4], 1.1).unwrap();
        assert!((w - exact).norm() <= 1e-6 * exact.norm());
    }

    #[test]
    fn nyquist_guard_trips() {
        let g = gaussian_grid(2, GAUSSIAN_BOX, 32).unwrap();
        assert!(matches!(
            extension_numeric(&g, &saddle(), &[0.0, 0.0], 3.0),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn swap_symmetric_input_gives_real_value_at_origin() {
        let axis = Axis::symmetric(5.0, 101).unwrap();
        let f = GridFunction::from_fn(vec![axis; 2], |xi| {
            Complex64::new(gaussian(xi) * (1.0 + xi[0] * xi[0] * xi[1] * xi[1]), 0.0)
        })
        .unwrap();
        let v = extension_numeric(&f, &saddle(), &[0.0, 0.0], 0.7).unwrap();
        assert!(v.im.abs() < 1e-12 * v.norm());
    }

    #[test]
    fn modulation_translates_extension() {
        let g = gaussian_grid(2, GAUSSIAN_BOX, 96).unwrap();
        let a = [0.7, -0.4];
        let h = modulate(&g, &a).unwrap();
        let x = [0.2, 0.5];
        let lhs = extension_numeric(&h, &saddle(), &x, 0.6).unwrap();
        let rhs = extension_numeric(&g, &saddle(), &[x[0] + a[0], x[1] + a[1]], 0.6).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn reduced_norm_matches_closed_value() {
        let v = gaussian_strichartz_norm(2, 4.0).unwrap();
        let exact = 4.0 * PI.powi(4);
        assert!((v - exact).abs() <= 1e-10 * exact);
        assert!(matches!(gaussian_strichartz_norm(2, 3.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn grid_norm_matches_reduced_norm() {
        let v = strichartz_norm_grid(&saddle(), 4.0, 32, 49, 4.0).unwrap();
        let exact = 4.0 * PI.powi(4);
        assert!((v - exact).abs() <= 1e-6 * exact, "{v}");
        let mixed = Signature::new(2, 1).unwrap();
        let q = 10.0 / 3.0 * 1.2;
        let a = strichartz_norm_grid(&mixed, q, 48, 61, 4.0).unwrap();
        let b = gaussian_strichartz_norm(3, q).unwrap();
        assert!((a - b).abs() <= 1e-3 * b, "{a} vs {b}");
    }

    #[test]
    fn normalized_norm_is_continuous_in_q() {
        let qs: Vec<f64> = (0..20).map(|i| 3.5 + 0.02 * i as f64).collect();
        let vals: Vec<f64> = qs
            .iter()
            .map(|&q| gaussian_strichartz_norm(2, q).unwrap() / 2f64.powf(q))
            .collect();
        assert!(vals.iter().all(|v| v.is_finite() && *v > 0.0));
        for w in vals.windows(2) {
            assert!((w[1] / w[0] - 1.0).abs() < 0.1);
        }
    }
}
