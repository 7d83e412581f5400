//! Truncated Taylor jets and the [`Holomorphic`] evaluation trait.
//!
//! A [`Jet`] of order `m` at a point holds `f(z), f'(z), ..., f^{(m)}(z)` as
//! Taylor coefficients `f^{(k)}(z)/k!`. Arithmetic on jets is exact up to the
//! stored order, which lets identities and derived functions (quotients,
//! compositions, `f(2z)`) carry derivatives without finite differences.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn from_taylor(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the value");
        Jet { coeffs }
    }

    /// Builds a jet from `[f, f', f'', ...]`.
    pub fn from_derivatives(ds: &[Complex64]) -> Self {
        let mut fact = 1.0;
        let coeffs = ds
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Self::from_taylor(coeffs)
    }

    pub fn constant(v: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = v;
        Jet { coeffs }
    }

    /// The identity function `z` expanded at `z0`.
    pub fn variable(z0: Complex64, order: usize) -> Self {
        let mut j = Self::constant(z0, order);
        if order >= 1 {
            j.coeffs[1] = 1.0.into();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn taylor(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `f^{(m)}(z)`.
    pub fn derivative(&self, m: usize) -> Complex64 {
        let fact: f64 = (1..=m).map(|k| k as f64).product();
        self.coeffs[m] * fact
    }

    pub fn derivatives(&self) -> Vec<Complex64> {
        (0..=self.order()).map(|m| self.derivative(m)).collect()
    }

    pub fn truncate(mut self, order: usize) -> Self {
        self.coeffs.truncate(order + 1);
        self
    }

    /// Drops the value and shifts: the jet of `f'` of one order less.
    pub fn differentiated(&self) -> Self {
        if self.order() == 0 {
            return Jet::constant(0.0.into(), 0);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k + 1) as f64)
            .collect();
        Jet { coeffs }
    }

    /// Jet of `z -> f(a z)` given the jet of `f` at `a z`.
    pub fn chain_scale(&self, a: f64) -> Self {
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let r = c * p;
                p *= a;
                r
            })
            .collect();
        Jet { coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_constant(&self, s: Complex64) -> Self {
        let mut j = self.clone();
        j.coeffs[0] += s;
        j
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        let n = self.order().min(other.order());
        let b0 = other.coeffs[0];
        if b0.norm() == 0.0 {
            return Err(Error::VanishingValue("jet denominator".into()));
        }
        let mut out: Vec<Complex64> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut acc = self.coeffs[m];
            for k in 1..=m {
                acc -= other.coeffs[k] * out[m - k];
            }
            out.push(acc / b0);
        }
        Ok(Jet { coeffs: out })
    }

    pub fn recip(&self) -> Result<Jet> {
        Jet::constant(1.0.into(), self.order()).div(self)
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut result = Jet::constant(1.0.into(), self.order());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `exp(g)` where `self = g`.
    pub fn exp(&self) -> Jet {
        Self::exp_of_log(self.coeffs[0].exp(), self)
    }

    /// Jet of `F` from its value and the jet of `log F` (whose constant term is
    /// ignored). Uses `F' = F (log F)'`.
    pub fn exp_of_log(value: Complex64, log: &Jet) -> Jet {
        let n = log.order();
        let mut out = Vec::with_capacity(n + 1);
        out.push(value);
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=m {
                acc += log.coeffs[k] * out[m - k] * k as f64;
            }
            out.push(acc / m as f64);
        }
        Jet { coeffs: out }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            coeffs: (0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            coeffs: (0..=n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            coeffs: (0..=n)
                .map(|m| (0..=m).map(|k| self.coeffs[k] * rhs.coeffs[m - k]).sum())
                .collect(),
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale((-1.0).into())
    }
}

/// A function holomorphic (or meromorphic) on a region of the upper half-plane
/// that can report its value and derivatives at a point.
pub trait Holomorphic: Send + Sync {
    /// `f` and its first `order` derivatives at `z`.
    fn jet(&self, z: Complex64, order: usize) -> Result<Jet>;

    fn label(&self) -> String {
        "f".to_string()
    }

    fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.jet(z, 0)?.value())
    }
}

impl<T: Holomorphic + ?Sized> Holomorphic for Arc<T> {
    fn jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        (**self).jet(z, order)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: Holomorphic + ?Sized> Holomorphic for &T {
    fn jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        (**self).jet(z, order)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

type JetFn = dyn Fn(Complex64, usize) -> Result<Jet> + Send + Sync;

/// A [`Holomorphic`] function given by a closure producing jets.
#[derive(Clone)]
pub struct FnHolomorphic {
    label: String,
    f: Arc<JetFn>,
}

impl FnHolomorphic {
    pub fn new(label: impl Into<String>, f: impl Fn(Complex64, usize) -> Result<Jet> + Send + Sync + 'static) -> Self {
        FnHolomorphic {
            label: label.into(),
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnHolomorphic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnHolomorphic").field("label", &self.label).finish()
    }
}

impl Holomorphic for FnHolomorphic {
    fn jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        (self.f)(z, order)
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// The derivative `f'` of a function, evaluated through the jet of `f`.
#[derive(Clone, Debug)]
pub struct Derivative<F>(pub F);

impl<F: Holomorphic> Holomorphic for Derivative<F> {
    fn jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        Ok(self.0.jet(z, order + 1)?.differentiated())
    }
    fn label(&self) -> String {
        format!("{}'", self.0.label())
    }
}
