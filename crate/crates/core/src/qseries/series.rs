use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// A point of the upper half-plane together with `q = e^{2πiz}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPoint {
    pub z: Complex64,
    pub q: Complex64,
}

impl EvalPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NotInUpperHalfPlane(crate::format_complex(z)));
        }
        Ok(EvalPoint {
            z,
            q: (TWO_PI_I * z).exp(),
        })
    }

    /// `|q| = e^{-2π Im z}`.
    pub fn q_abs(&self) -> f64 {
        (-2.0 * PI * self.z.im).exp()
    }

    /// Principal `q^{e}` for `e = exponent_24 / 24`, i.e. `exp(2πi z e)`.
    pub fn q_power(&self, exponent_24: i64) -> Complex64 {
        (TWO_PI_I * self.z * (exponent_24 as f64 / 24.0)).exp()
    }
}

/// Value of a truncated series at a point with the tail estimate
/// `B |q|^{N+1} / (1 - |q|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// Exact integer q-expansion `q^{e} Σ a_n q^n` with `e = exponent_24 / 24`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSeries {
    pub exponent_24: i64,
    pub coeffs: Vec<i128>,
}

impl IntSeries {
    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> i128 {
        self.coeffs[n]
    }

    pub fn to_puiseux(&self) -> PuiseuxSeries {
        PuiseuxSeries::new(
            self.exponent_24,
            self.coeffs.iter().map(|&a| Complex64::new(a as f64, 0.0)).collect(),
        )
    }
}

/// Truncated series `Σ_{n=0}^{N} a_n q^{n + e}` with rational leading exponent
/// `e` whose denominator divides 24.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries {
    exponent_24: i64,
    coeffs: Vec<Complex64>,
}

impl PuiseuxSeries {
    pub fn new(exponent_24: i64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        PuiseuxSeries { exponent_24, coeffs }
    }

    pub fn from_real(exponent_24: i64, coeffs: &[f64]) -> Self {
        Self::new(exponent_24, coeffs.iter().map(|&a| a.into()).collect())
    }

    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = 1.0.into();
        Self::new(0, coeffs)
    }

    pub fn exponent_24(&self) -> i64 {
        self.exponent_24
    }

    pub fn leading_exponent(&self) -> f64 {
        self.exponent_24 as f64 / 24.0
    }

    /// `N`: coefficients of `q^{e}` through `q^{e+N}` are known.
    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs[n]
    }

    pub fn truncated(&self, order: usize) -> Self {
        let n = order.min(self.truncation_order());
        Self::new(self.exponent_24, self.coeffs[..=n].to_vec())
    }

    /// Rewrites the series with leading exponent `exponent_24`, which must be
    /// `≤` the current one and differ by a whole number.
    fn aligned_to(&self, exponent_24: i64) -> Result<Self> {
        let shift = self.exponent_24 - exponent_24;
        if shift < 0 || shift % 24 != 0 {
            return Err(Error::IncompatibleExponents(self.exponent_24, exponent_24));
        }
        let shift = (shift / 24) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); shift];
        coeffs.extend_from_slice(&self.coeffs);
        Ok(Self::new(exponent_24, coeffs))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let e = self.exponent_24.min(other.exponent_24);
        let a = self.aligned_to(e)?;
        let b = other.aligned_to(e)?;
        let n = a.truncation_order().min(b.truncation_order());
        Ok(Self::new(e, (0..=n).map(|k| a.coeffs[k] + b.coeffs[k]).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scalar_mul((-1.0).into()))
    }

    pub fn scalar_mul(&self, s: Complex64) -> Self {
        Self::new(self.exponent_24, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Cauchy product; the truncation order is the smaller of the two.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.truncation_order().min(other.truncation_order());
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.exponent_24 + other.exponent_24, out)
    }

    pub fn pow_int(&self, n: u32) -> Self {
        let mut result = Self::one(self.truncation_order());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Series quotient. Leading zeros of the divisor shift the exponent down,
    /// so `(E4^3 - E6^2)/Δ` comes out with leading exponent `-1`.
    pub fn divide(&self, other: &Self) -> Result<Self> {
        let lead = other
            .coeffs
            .iter()
            .position(|c| c.norm() != 0.0)
            .ok_or(Error::ZeroLeadingCoefficient)?;
        let divisor = &other.coeffs[lead..];
        let n = self.truncation_order().min(divisor.len() - 1);
        let b0 = divisor[0];
        let mut out: Vec<Complex64> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = self.coeffs[m];
            for k in 1..=m {
                acc -= divisor[k] * out[m - k];
            }
            out.push(acc / b0);
        }
        Ok(Self::new(self.exponent_24 - other.exponent_24 - 24 * lead as i64, out))
    }

    /// `d/dz = 2πi q d/dq`, applied termwise.
    pub fn differentiate(&self) -> Self {
        let e = self.leading_exponent();
        Self::new(
            self.exponent_24,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| a * TWO_PI_I * (n as f64 + e))
                .collect(),
        )
    }

    /// Horner sum of all stored terms.
    pub fn evaluate(&self, p: &EvalPoint) -> Evaluation {
        self.evaluate_to(p, self.truncation_order())
    }

    /// Horner sum of the terms `0..=n`.
    pub fn evaluate_to(&self, p: &EvalPoint, n: usize) -> Evaluation {
        let n = n.min(self.truncation_order());
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.coeffs[..=n].iter().rev() {
            acc = acc * p.q + a;
        }
        Evaluation {
            value: acc * p.q_power(self.exponent_24),
            tail_bound: self.tail_bound(p, n, 0),
            terms: n + 1,
        }
    }

    /// Evaluation that refuses points below `y_min` and tails above `tolerance`.
    pub fn evaluate_checked(&self, p: &EvalPoint, tolerance: f64, y_min: f64) -> Result<Evaluation> {
        if p.z.im < y_min {
            return Err(Error::BelowMinimumHeight { im: p.z.im, y_min });
        }
        let ev = self.evaluate(p);
        if !(ev.tail_bound <= tolerance) {
            return Err(Error::TruncationInsufficient {
                bound: ev.tail_bound,
                tolerance,
                suggested: self.suggested_order(p, tolerance),
            });
        }
        Ok(ev)
    }

    /// `B |q|^{n+1} / (1 - |q|) · |q^e|`, with `B` the largest weighted
    /// coefficient `|a_k| (2π|k + e|)^m` over the top tenth of `0..=n`.
    pub fn tail_bound(&self, p: &EvalPoint, n: usize, derivative_order: usize) -> f64 {
        let n = n.min(self.truncation_order());
        let b = self.top_weight(n, derivative_order);
        let qa = p.q_abs();
        let prefactor = (-2.0 * PI * p.z.im * self.leading_exponent()).exp();
        b * qa.powf((n + 1) as f64) / (1.0 - qa) * prefactor
    }

    fn top_weight(&self, n: usize, derivative_order: usize) -> f64 {
        let e = self.leading_exponent();
        let start = n - n / 10;
        (start..=n)
            .map(|k| self.coeffs[k].norm() * (2.0 * PI * (k as f64 + e).abs()).powi(derivative_order as i32))
            .fold(0.0, f64::max)
    }

    fn suggested_order(&self, p: &EvalPoint, tolerance: f64) -> usize {
        let n = self.truncation_order();
        let b = self.top_weight(n, 0).max(1.0);
        let qa = p.q_abs();
        let needed = ((tolerance * (1.0 - qa) / b).ln() / qa.ln()).ceil();
        let needed = if needed.is_finite() { needed as usize } else { n };
        (needed + needed / 10 + 1).max(n + 1)
    }

    /// Value and derivatives through `order` from the terms `0..=n`.
    pub fn jet_to(&self, p: &EvalPoint, n: usize, order: usize) -> Jet {
        let n = n.min(self.truncation_order());
        let e = self.leading_exponent();
        let qe = p.q_power(self.exponent_24);
        let mut derivs = Vec::with_capacity(order + 1);
        let mut factor = Complex64::new(1.0, 0.0);
        for m in 0..=order {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, a) in self.coeffs[..=n].iter().enumerate().rev() {
                let w = (k as f64 + e).powi(m as i32);
                acc = acc * p.q + a * w;
            }
            derivs.push(acc * qe * factor);
            factor *= TWO_PI_I;
        }
        Jet::from_derivatives(&derivs)
    }
}
