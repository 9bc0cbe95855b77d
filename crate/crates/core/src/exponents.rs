//! Exponent algebra on the Strichartz scaling line `q = (d+2) p' / d`, and the
//! sign pattern of the quadratic form `Q(xi) = sum_j sigma_j xi_j^2`.

use crate::error::{domain, Error, Result};

/// Sign pattern of a hyperbolic quadratic form, stored in canonical order
/// `(+1, ..., +1, -1, ..., -1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    d_plus: usize,
    d_minus: usize,
}

impl Signature {
    /// Both counts must be at least one; the all-equal (paraboloid) case is rejected.
    pub fn new(d_plus: usize, d_minus: usize) -> Result<Self> {
        if d_plus == 0 || d_minus == 0 {
            return Err(Error::Paraboloid { d_plus, d_minus });
        }
        Ok(Signature { d_plus, d_minus })
    }

    /// Builds a signature from an arbitrary sign vector. Only the counts matter,
    /// so any permutation of the same signs yields the same value.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut plus = 0;
        let mut minus = 0;
        for &s in signs {
            match s {
                1 => plus += 1,
                -1 => minus += 1,
                other => return domain(format!("sign {other} is not +1 or -1")),
            }
        }
        Signature::new(plus, minus)
    }

    pub fn d_plus(&self) -> usize {
        self.d_plus
    }

    pub fn d_minus(&self) -> usize {
        self.d_minus
    }

    pub fn d(&self) -> usize {
        self.d_plus + self.d_minus
    }

    /// The signature of `-Q`.
    pub fn flipped(&self) -> Self {
        Signature {
            d_plus: self.d_minus,
            d_minus: self.d_plus,
        }
    }

    /// Representative with `d_plus >= d_minus`, plus whether `Q` had to be negated.
    /// Negating `Q` conjugates every downstream integrand.
    pub fn canonical(&self) -> (Self, bool) {
        if self.d_plus >= self.d_minus {
            (*self, false)
        } else {
            (self.flipped(), true)
        }
    }

    /// `sigma_j` as floats, in canonical order.
    pub fn signs(&self) -> Vec<f64> {
        std::iter::repeat_n(1.0, self.d_plus)
            .chain(std::iter::repeat_n(-1.0, self.d_minus))
            .collect()
    }

    pub fn sign(&self, j: usize) -> f64 {
        if j < self.d_plus {
            1.0
        } else {
            -1.0
        }
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.d_plus, self.d_minus)
    }
}

/// `(d, p, p', q)` on the scaling line, with `1 < p < 2(d+1)/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTriple {
    pub d: usize,
    pub p: f64,
    pub p_prime: f64,
    pub q: f64,
    /// `(q - 1)/2`. Equals `(p/d)/(q - p)` only at the critical exponent.
    pub kappa: f64,
}

impl ExponentTriple {
    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d < 1 {
            return domain("dimension must be at least 1");
        }
        let (lo, hi) = admissible_range(d);
        if !(p > lo && p < hi) {
            return domain(format!("p = {p} outside the admissible open range ({lo}, {hi})"));
        }
        let p_prime = dual_exponent(p)?;
        let q = strichartz_q(p, d)?;
        Ok(ExponentTriple {
            d,
            p,
            p_prime,
            q,
            kappa: 0.5 * (q - 1.0),
        })
    }

    /// The triple at `p = p_d`.
    pub fn critical(d: usize) -> Result<Self> {
        ExponentTriple::new(d, critical_exponent(d)?)
    }

    /// `1 - (p-1)(q-1)`, which equals `-2p/d` on the scaling line.
    pub fn defect(&self) -> f64 {
        1.0 - (self.p - 1.0) * (self.q - 1.0)
    }

    /// Decay exponent `d(q-2)/2` of the moment integrands; exceeds 1 in range.
    pub fn decay(&self) -> f64 {
        self.d as f64 * (self.q - 2.0) / 2.0
    }
}

/// Hölder dual `p/(p-1)`.
pub fn dual_exponent(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return domain(format!("dual exponent needs p > 1, got {p}"));
    }
    Ok(p / (p - 1.0))
}

/// `q = (d+2) p' / d`.
pub fn strichartz_q(p: f64, d: usize) -> Result<f64> {
    if d < 1 {
        return domain("dimension must be at least 1");
    }
    let d = d as f64;
    Ok((d + 2.0) * dual_exponent(p)? / d)
}

/// Open interval `(1, 2(d+1)/d)`.
pub fn admissible_range(d: usize) -> (f64, f64) {
    let df = d as f64;
    (1.0, 2.0 * (df + 1.0) / df)
}

/// Closed form for `p_d`.
pub fn critical_exponent(d: usize) -> Result<f64> {
    if d < 2 {
        return domain(format!("critical exponent needs d >= 2, got {d}"));
    }
    let d = d as f64;
    let a = d * d - 8.0 * d - 4.0;
    Ok((-a + (a * a + 32.0 * d * d * d).sqrt()) / (8.0 * d))
}

/// Root of `(p/d)/(q(p) - p) - (q(p) - 1)/2` on `(2, 2(d+1)/d)` by bisection.
/// Independent of the closed form; used as its cross-check.
pub fn critical_exponent_bisection(d: usize) -> Result<f64> {
    if d < 2 {
        return domain(format!("critical exponent needs d >= 2, got {d}"));
    }
    let df = d as f64;
    let relation = |p: f64| {
        let q = (df + 2.0) * p / ((p - 1.0) * df);
        (p / df) / (q - p) - (q - 1.0) / 2.0
    };
    let (mut lo, mut hi) = (2.0, admissible_range(d).1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if relation(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `kappa_d = (q_d - 1)/2`.
pub fn kappa(d: usize) -> Result<f64> {
    let p = critical_exponent(d)?;
    Ok(0.5 * (strichartz_q(p, d)? - 1.0))
}

/// `Q(xi) = sum sigma_j xi_j^2`.
pub fn eval_q(sig: &Signature, xi: &[f64]) -> Result<f64> {
    if xi.len() != sig.d() {
        return domain(format!(
            "point has {} coordinates, signature has dimension {}",
            xi.len(),
            sig.d()
        ));
    }
    Ok(xi.iter().enumerate().map(|(j, x)| sig.sign(j) * x * x).sum())
}
