//! Truncated q-expansions: exact coefficient generation, series arithmetic,
//! termwise differentiation and evaluation with a tail estimate.

mod coefficients;
mod series;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

pub use coefficients::{
    delta_series, divisor_sum, eisenstein_series, eta_series, euler_product, j_series_exact, theta_series,
};
pub use series::{EvalPoint, Evaluation, IntSeries, PuiseuxSeries};

/// Default lowest admissible `Im z` for evaluation.
pub const DEFAULT_Y_MIN: f64 = 0.005;

/// Hard cap on the number of q-expansion terms.
pub const MAX_TRUNCATION: usize = 1_000_000;

/// Target for `e^{-2π Im z (N+1)}` in the automatic truncation rule.
const AUTO_TARGET: f64 = 1e-18;

/// Relative tail target used when the coefficients grow.
const RELATIVE_TAIL: f64 = 1e-16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    /// Chosen per evaluation point.
    #[default]
    Auto,
    /// Exactly this many terms beyond the leading one.
    Fixed(usize),
}

/// Smallest `N` with `e^{-2π y (N+1)} < 1e-18`.
pub fn auto_truncation(im: f64) -> Result<usize> {
    if !(im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(format!("Im z = {im}")));
    }
    let needed = (-AUTO_TARGET.ln()) / (2.0 * PI * im);
    // strict inequality: N + 1 > needed
    let n = needed.floor() as usize;
    if n > MAX_TRUNCATION {
        return Err(Error::TruncationCap {
            requested: n,
            cap: MAX_TRUNCATION,
        });
    }
    Ok(n)
}

/// The series known to the evaluator by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    E2,
    E4,
    E6,
    Delta,
    Eta,
    Theta2,
    Theta3,
    Theta4,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 8] = [
        SeriesKind::E2,
        SeriesKind::E4,
        SeriesKind::E6,
        SeriesKind::Delta,
        SeriesKind::Eta,
        SeriesKind::Theta2,
        SeriesKind::Theta3,
        SeriesKind::Theta4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeriesKind::E2 => "E2",
            SeriesKind::E4 => "E4",
            SeriesKind::E6 => "E6",
            SeriesKind::Delta => "Delta",
            SeriesKind::Eta => "eta",
            SeriesKind::Theta2 => "theta2",
            SeriesKind::Theta3 => "theta3",
            SeriesKind::Theta4 => "theta4",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(name))
    }

    pub fn generate(self, order: usize) -> Result<IntSeries> {
        match self {
            SeriesKind::E2 => eisenstein_series(2, order),
            SeriesKind::E4 => eisenstein_series(4, order),
            SeriesKind::E6 => eisenstein_series(6, order),
            SeriesKind::Delta => delta_series(order),
            SeriesKind::Eta => Ok(eta_series(order)),
            SeriesKind::Theta2 => theta_series(2, order),
            SeriesKind::Theta3 => theta_series(3, order),
            SeriesKind::Theta4 => theta_series(4, order),
        }
    }

    /// An upper bound for `|a_n|`, `n ≥ 1`: `σ_1(n) ≤ n(1 + ln n)`,
    /// `σ_{k-1}(n) ≤ ζ(k-1) n^{k-1}`, `|τ(n)| ≤ d(n) n^{11/2} ≤ 2 n^6`, and
    /// `|a_n| ≤ 2` for η and the θ's.
    pub fn coefficient_envelope(self, n: usize) -> f64 {
        const ZETA3: f64 = 1.202_056_903_159_594_3;
        const ZETA5: f64 = 1.036_927_755_143_37;
        let x = n as f64;
        match self {
            SeriesKind::E2 => 24.0 * x * (1.0 + x.ln()),
            SeriesKind::E4 => 240.0 * ZETA3 * x.powi(3),
            SeriesKind::E6 => 504.0 * ZETA5 * x.powi(5),
            SeriesKind::Delta => 2.0 * x.powi(6),
            SeriesKind::Eta | SeriesKind::Theta2 | SeriesKind::Theta3 | SeriesKind::Theta4 => 2.0,
        }
    }

    /// Rigorous bound on `|Σ_{n>N} a_n q^{n+e}|` from the coefficient envelope.
    pub fn tail_bound(self, p: &EvalPoint, n: usize) -> f64 {
        let qa = p.q_abs();
        let exponent = match self {
            SeriesKind::Eta => 1.0 / 24.0,
            SeriesKind::Theta2 => 0.25,
            _ => 0.0,
        };
        let mut sum = 0.0;
        let mut k = n + 1;
        loop {
            let term = self.coefficient_envelope(k) * qa.powf(k as f64);
            let next = self.coefficient_envelope(k + 1) * qa.powf(k as f64 + 1.0);
            let ratio = next / term;
            // once the terms decay geometrically the remainder is a geometric tail
            if ratio < 1.0 && (term <= 1e-20 * sum || k > n + 100_000) {
                sum += term / (1.0 - ratio);
                break;
            }
            sum += term;
            k += 1;
        }
        sum * qa.powf(exponent)
    }

    /// The complex series with at least `order` terms, shared across threads.
    pub fn cached(self, order: usize) -> Result<Arc<PuiseuxSeries>> {
        static CACHE: OnceLock<RwLock<HashMap<SeriesKind, Arc<PuiseuxSeries>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(s) = cache.read().expect("series cache poisoned").get(&self) {
            if s.truncation_order() >= order {
                return Ok(Arc::clone(s));
            }
        }
        let mut guard = cache.write().expect("series cache poisoned");
        let current = match guard.get(&self) {
            Some(s) if s.truncation_order() >= order => return Ok(Arc::clone(s)),
            Some(s) => s.truncation_order(),
            None => 0,
        };
        let target = order.max(2 * current).max(64).min(MAX_TRUNCATION.max(order));
        let s = Arc::new(self.generate(target)?.to_puiseux());
        guard.insert(self, Arc::clone(&s));
        Ok(s)
    }

    /// Jet of the q-expansion at `z` through `order` derivatives.
    pub fn jet(self, z: Complex64, order: usize, truncation: Truncation) -> Result<Jet> {
        let p = EvalPoint::new(z)?;
        match truncation {
            Truncation::Fixed(n) => Ok(self.cached(n)?.jet_to(&p, n, order)),
            Truncation::Auto => {
                let mut n = auto_truncation(z.im)?;
                loop {
                    let s = self.cached(n)?;
                    let jet = s.jet_to(&p, n, order);
                    let top = jet.derivative(order).norm().max(1.0);
                    // coefficient-growth estimate; the rigorous bound is [`SeriesKind::tail_bound`]
                    if s.tail_bound(&p, n, order) <= RELATIVE_TAIL * top {
                        return Ok(jet);
                    }
                    n += n / 4 + 8;
                    if n > MAX_TRUNCATION {
                        return Err(Error::TruncationCap {
                            requested: n,
                            cap: MAX_TRUNCATION,
                        });
                    }
                }
            }
        }
    }
}

/// Number of product factors used for `η` at `p` with `order` derivatives.
pub fn eta_product_factors(p: &EvalPoint, order: usize, truncation: Truncation) -> Result<usize> {
    let qa = p.q_abs();
    Ok(match truncation {
        Truncation::Fixed(n) => n,
        Truncation::Auto => {
            let mut m = auto_truncation(p.z.im)?.max(1);
            while (m as f64).powi(order as i32 + 1) * qa.powf(m as f64 + 1.0) / (1.0 - qa) > AUTO_TARGET {
                m += m / 4 + 8;
                if m > MAX_TRUNCATION {
                    return Err(Error::TruncationCap {
                        requested: m,
                        cap: MAX_TRUNCATION,
                    });
                }
            }
            m
        }
    })
}

/// Jet of `η(z)^power = q^{power/24} Π (1 - q^n)^power` from the product, with
/// derivatives taken through the logarithmic derivative
/// `η'/η = 2πi (1/24 - Σ n q^n / (1 - q^n))`. Supports `order ≤ 3`.
pub fn eta_power_jet(z: Complex64, power: u32, order: usize, truncation: Truncation) -> Result<Jet> {
    if order > 3 {
        return Err(Error::DerivativeOrder(order, "eta product".into()));
    }
    let p = EvalPoint::new(z)?;
    let factors = eta_product_factors(&p, order, truncation)?;
    let mut product = Complex64::new(1.0, 0.0);
    // sums of n^m w_m(q^n): w_1 = u/(1-u), w_2 = u/(1-u)^2, w_3 = u(1+u)/(1-u)^3
    let mut sums = [Complex64::new(0.0, 0.0); 4];
    let mut u = Complex64::new(1.0, 0.0);
    for n in 1..=factors {
        u *= p.q;
        let one_minus = 1.0 - u;
        product *= one_minus;
        if order >= 1 {
            let nf = n as f64;
            let r = one_minus.inv();
            let w1 = u * r;
            sums[1] += w1 * nf;
            if order >= 2 {
                let w2 = w1 * r;
                sums[2] += w2 * nf * nf;
                if order >= 3 {
                    sums[3] += w2 * (1.0 + u) * r * nf * nf * nf;
                }
            }
        }
    }
    let pw = power as f64;
    let value = p.q_power(power as i64) * product.powu(power);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut log_derivs = vec![Complex64::new(0.0, 0.0); order + 1];
    let mut factor = Complex64::new(1.0, 0.0);
    for m in 1..=order {
        factor *= two_pi_i;
        let base = if m == 1 { 1.0 / 24.0 } else { 0.0 };
        log_derivs[m] = factor * pw * (Complex64::new(base, 0.0) - sums[m]);
    }
    Ok(Jet::exp_of_log(value, &Jet::from_derivatives(&log_derivs)))
}
