//! Weighted forms on subgroups of PSL(2,R): the named classical forms, the
//! slash operator with real weight, numerically evaluated multiplier systems,
//! and the closed-form generators for elementary groups.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{FnHolomorphic, Holomorphic, Jet};
use crate::moebius::MoebiusTransform;
use crate::qseries::{auto_truncation, eta_power_jet, eta_product_factors, EvalPoint, SeriesKind, Truncation};

/// Unit-modulus tolerance and probe-independence tolerance for multipliers.
pub const MULTIPLIER_TOL: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Probe offsets added to the caller's probe point when checking that a
/// multiplier does not depend on `z`.
const PROBE_OFFSETS: [Complex64; 4] = [
    Complex64::new(0.13, 0.07),
    Complex64::new(-0.11, 0.05),
    Complex64::new(0.07, 0.21),
    Complex64::new(-0.19, 0.17),
];

/// Generators of the elementary-group catalog: `z^p`, `e^{rz}` and
/// `λ(z)^{n_f} (λ(z) - 1)^k` with `λ` the Cayley transform. Principal branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ClosedForm {
    PowerOfZ { exponent: Complex64 },
    Exponential { rate: Complex64 },
    CayleyProduct { n_f: i64, k: f64 },
}

impl ClosedForm {
    pub fn jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        if !(z.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane(crate::format_complex(z)));
        }
        match *self {
            ClosedForm::PowerOfZ { exponent } => {
                let value = (exponent * z.ln()).exp();
                let log = log_sum_jet(&[(exponent, Complex64::new(0.0, 0.0))], z, order);
                Ok(Jet::exp_of_log(value, &log))
            }
            ClosedForm::Exponential { rate } => {
                let mut ds = Vec::with_capacity(order + 1);
                let v = (rate * z).exp();
                let mut r = Complex64::new(1.0, 0.0);
                for _ in 0..=order {
                    ds.push(v * r);
                    r *= rate;
                }
                Ok(Jet::from_derivatives(&ds))
            }
            ClosedForm::CayleyProduct { n_f, k } => {
                let lambda = (z - I) / (z + I);
                let lm1 = lambda - 1.0;
                let value = lambda.powi(n_f as i32) * (lm1.ln() * k).exp();
                if n_f != 0 && lambda.norm() == 0.0 {
                    return Err(Error::VanishingValue(crate::format_complex(z)));
                }
                // log f = n_f (log(z - i) - log(z + i)) + k (log(-2i) - log(z + i))
                let nf = n_f as f64;
                let log = log_sum_jet(
                    &[(Complex64::new(nf, 0.0), I), (Complex64::new(-nf - k, 0.0), -I)],
                    z,
                    order,
                );
                Ok(Jet::exp_of_log(value, &log))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ClosedForm::PowerOfZ { exponent } => format!("z^({})", crate::format_complex(*exponent)),
            ClosedForm::Exponential { rate } => format!("exp(({}) z)", crate::format_complex(*rate)),
            ClosedForm::CayleyProduct { n_f, k } => format!("lambda^{n_f} (lambda - 1)^{k}"),
        }
    }
}

/// Jet of `Σ c_j log(z - a_j)` at `z`, without the constant term (only the
/// derivatives are used).
fn log_sum_jet(terms: &[(Complex64, Complex64)], z: Complex64, order: usize) -> Jet {
    let mut ds = vec![Complex64::new(0.0, 0.0); order + 1];
    for (coef, a) in terms {
        let w = z - a;
        // d^m/dz^m log(w) = (-1)^{m-1} (m-1)! / w^m
        let mut fact = 1.0;
        for (m, d) in ds.iter_mut().enumerate().skip(1) {
            if m > 1 {
                fact *= (m - 1) as f64;
            }
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            *d += coef * sign * fact / w.powi(m as i32);
        }
    }
    Jet::from_derivatives(&ds)
}

/// A named multiplier-system entry `ν(γ)` on a generator.
#[derive(Clone, Debug, Serialize)]
pub struct Multiplier {
    pub generator: String,
    pub element: MoebiusTransform,
    pub value: Complex64,
}

#[derive(Clone, Debug)]
pub enum FormSource {
    /// Evaluated from its q-expansion.
    Series(SeriesKind),
    /// `η^power` evaluated from the product.
    EtaPower(u32),
    /// `j = E4^3 / Δ`.
    J,
    Closed(ClosedForm),
    Custom(FnHolomorphic),
}

/// A function of weight `k` on the upper half-plane together with its
/// multiplier table on named generators.
#[derive(Clone, Debug)]
pub struct Form {
    name: String,
    weight: f64,
    multipliers: Vec<Multiplier>,
    source: FormSource,
    truncation: Truncation,
}

pub const REGISTRY: [&str; 9] = ["E2", "E4", "E6", "Delta", "j", "eta", "theta2", "theta3", "theta4"];

fn unit(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

impl Form {
    pub fn new(name: impl Into<String>, weight: f64, source: FormSource) -> Self {
        Form {
            name: name.into(),
            weight,
            multipliers: Vec::new(),
            source,
            truncation: Truncation::Auto,
        }
    }

    pub fn closed(cf: ClosedForm, weight: f64) -> Self {
        Self::new(cf.describe(), weight, FormSource::Closed(cf))
    }

    pub fn custom(name: impl Into<String>, weight: f64, f: FnHolomorphic) -> Self {
        Self::new(name, weight, FormSource::Custom(f))
    }

    /// Adds a multiplier entry; `|ν| = 1` is required.
    pub fn with_multiplier(mut self, generator: &str, element: MoebiusTransform, value: Complex64) -> Result<Self> {
        if (value.norm() - 1.0).abs() > MULTIPLIER_TOL {
            return Err(Error::NonUnitMultiplier(generator.to_string(), value.norm()));
        }
        self.multipliers.push(Multiplier {
            generator: generator.to_string(),
            element,
            value,
        });
        Ok(self)
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn multipliers(&self) -> &[Multiplier] {
        &self.multipliers
    }

    pub fn source(&self) -> &FormSource {
        &self.source
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Looks up a form by name: the registry entries, or closed forms written
    /// `power:P`, `exp:R`, `cayley:N,K`.
    pub fn by_name(name: &str) -> Result<Form> {
        let s = MoebiusTransform::s();
        let t = MoebiusTransform::t();
        let t2 = MoebiusTransform::translation(2.0);
        let one = Complex64::new(1.0, 0.0);
        let lower = name.to_ascii_lowercase();
        if let Some(arg) = lower.strip_prefix("power:") {
            let p = crate::parse_complex(arg)?;
            return Ok(Form::closed(ClosedForm::PowerOfZ { exponent: p }, -2.0 * p.re));
        }
        if let Some(arg) = lower.strip_prefix("exp:") {
            let r = crate::parse_complex(arg)?;
            return Ok(Form::closed(ClosedForm::Exponential { rate: r }, 1.0));
        }
        if let Some(arg) = lower.strip_prefix("cayley:") {
            let (n, k) = arg
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected cayley:N,K, got {name}")))?;
            let n_f = n.trim().parse::<i64>().map_err(|e| Error::Parse(e.to_string()))?;
            let k = k.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?;
            return Ok(Form::closed(ClosedForm::CayleyProduct { n_f, k }, k));
        }
        let form = match lower.as_str() {
            "e2" => Form::new("E2", 2.0, FormSource::Series(SeriesKind::E2)).with_multiplier("T", t, one)?,
            "e4" => Form::new("E4", 4.0, FormSource::Series(SeriesKind::E4))
                .with_multiplier("T", t, one)?
                .with_multiplier("S", s, one)?,
            "e6" => Form::new("E6", 6.0, FormSource::Series(SeriesKind::E6))
                .with_multiplier("T", t, one)?
                .with_multiplier("S", s, one)?,
            "delta" => Form::new("Delta", 12.0, FormSource::EtaPower(24))
                .with_multiplier("T", t, one)?
                .with_multiplier("S", s, one)?,
            "j" => Form::new("j", 0.0, FormSource::J)
                .with_multiplier("T", t, one)?
                .with_multiplier("S", s, one)?,
            "eta" => Form::new("eta", 0.5, FormSource::EtaPower(1))
                .with_multiplier("T", t, unit(PI / 12.0))?
                .with_multiplier("S", s, unit(-PI / 4.0))?
                .with_multiplier("P", MoebiusTransform::p(), unit(-PI / 6.0))?,
            "theta2" => Form::new("theta2", 0.5, FormSource::Series(SeriesKind::Theta2))
                .with_multiplier("T", t, I)?
                .with_multiplier("T^2", t2, -one)?,
            "theta3" => Form::new("theta3", 0.5, FormSource::Series(SeriesKind::Theta3))
                .with_multiplier("T", t, one)?
                .with_multiplier("T^2", t2, one)?
                .with_multiplier("W4", fricke4(), unit(-PI / 4.0))?,
            "theta4" => Form::new("theta4", 0.5, FormSource::Series(SeriesKind::Theta4))
                .with_multiplier("T", t, one)?
                .with_multiplier("T^2", t2, one)?,
            _ => return Err(Error::UnknownForm(name.to_string())),
        };
        Ok(form)
    }
}

/// A value with a bound on the truncation error, when one is available.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundedValue {
    pub value: Complex64,
    pub tail_bound: Option<f64>,
    pub terms: Option<usize>,
}

/// Evaluates `f` at `z` together with a truncation bound.
///
/// Series use [`SeriesKind::tail_bound`]. For `η^p` from `m` factors the
/// omitted factors satisfy `|Σ_{n>m} log(1 - q^n)| ≤ t = |q|^{m+1}/(1-|q|)^2`,
/// so the error is at most `|value| (e^{p t} - 1)`. `j` propagates both.
/// Closed forms are exact; custom functions carry no bound.
pub fn evaluate_with_bound(f: &Form, z: Complex64) -> Result<BoundedValue> {
    let p = EvalPoint::new(z)?;
    let series = |kind: SeriesKind| -> Result<BoundedValue> {
        let n = match f.truncation {
            Truncation::Fixed(n) => n,
            Truncation::Auto => auto_truncation(z.im)?,
        };
        let ev = kind.cached(n)?.evaluate_to(&p, n);
        Ok(BoundedValue {
            value: ev.value,
            tail_bound: Some(kind.tail_bound(&p, n)),
            terms: Some(ev.terms),
        })
    };
    let eta_power = |power: u32| -> Result<BoundedValue> {
        let m = eta_product_factors(&p, 0, f.truncation)?;
        let value = eta_power_jet(z, power, 0, Truncation::Fixed(m))?.value();
        let qa = p.q_abs();
        let t = qa.powf(m as f64 + 1.0) / ((1.0 - qa) * (1.0 - qa));
        Ok(BoundedValue {
            value,
            tail_bound: Some(value.norm() * (power as f64 * t).exp_m1()),
            terms: Some(m),
        })
    };
    match &f.source {
        FormSource::Series(kind) => series(*kind),
        FormSource::EtaPower(power) => eta_power(*power),
        FormSource::J => {
            let a = series(SeriesKind::E4)?;
            let d = eta_power(24)?;
            let (ea, ed) = (a.tail_bound.unwrap_or(0.0), d.tail_bound.unwrap_or(0.0));
            let value = a.value.powu(3) / d.value;
            let an = a.value.norm();
            let cube_err = ea * (3.0 * an * an + 3.0 * an * ea + ea * ea);
            let bound = if d.value.norm() > ed {
                (cube_err + value.norm() * ed) / (d.value.norm() - ed)
            } else {
                f64::INFINITY
            };
            Ok(BoundedValue {
                value,
                tail_bound: Some(bound),
                terms: a.terms.max(d.terms),
            })
        }
        FormSource::Closed(cf) => Ok(BoundedValue {
            value: cf.jet(z, 0)?.value(),
            tail_bound: Some(0.0),
            terms: None,
        }),
        FormSource::Custom(g) => Ok(BoundedValue {
            value: g.value(z)?,
            tail_bound: None,
            terms: None,
        }),
    }
}

/// `z -> -1/(4z)` as `(0, -1/2; 2, 0)`: the S-analog for `θ_3` under the
/// `q^{n^2}` normalization.
pub fn fricke4() -> MoebiusTransform {
    MoebiusTransform::real(0.0, -0.5, 2.0, 0.0).expect("det = 1")
}

impl Holomorphic for Form {
    fn jet(&self, z: Complex64, order: usize) -> Result<Jet> {
        match &self.source {
            FormSource::Series(kind) => kind.jet(z, order, self.truncation),
            FormSource::EtaPower(p) => eta_power_jet(z, *p, order, self.truncation),
            FormSource::J => {
                let e4 = SeriesKind::E4.jet(z, order, self.truncation)?;
                let delta = eta_power_jet(z, 24, order, self.truncation)?;
                e4.powi(3).div(&delta)
            }
            FormSource::Closed(cf) => cf.jet(z, order),
            FormSource::Custom(f) => f.jet(z, order),
        }
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (weight {})", self.name, self.weight)
    }
}

/// `(f|_k γ)(z) = j_γ(z)^{-k} f(γz)` with the principal power of `cz + d`.
pub fn slash<F: Holomorphic + ?Sized>(f: &F, k: f64, g: &MoebiusTransform, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(crate::format_complex(z)));
    }
    if !g.real_flag {
        return Err(Error::NotReal);
    }
    let j = g.j(z);
    if j.norm() == 0.0 {
        return Err(Error::SingularAutomorphyFactor);
    }
    let w = g.apply_finite(z).finite().ok_or(Error::SingularAutomorphyFactor)?;
    let factor = (-k * j.ln()).exp();
    Ok(factor * f.value(w)?)
}

/// `ν(γ) = (f|_k γ)(z) / f(z)`, required to have unit modulus and to agree at
/// `z_probe` and four nearby probes within [`MULTIPLIER_TOL`].
pub fn multiplier_of(f: &Form, g: &MoebiusTransform, z_probe: Complex64) -> Result<Complex64> {
    let probes = std::iter::once(z_probe).chain(PROBE_OFFSETS.iter().map(|o| z_probe + o));
    let mut values = Vec::with_capacity(5);
    for z in probes {
        let fz = f.value(z)?;
        if fz.norm() == 0.0 {
            return Err(Error::VanishingValue(crate::format_complex(z)));
        }
        let nu = slash(f, f.weight(), g, z)? / fz;
        if (nu.norm() - 1.0).abs() > MULTIPLIER_TOL {
            return Err(Error::NonUnitMultiplier(crate::format_complex(z), nu.norm()));
        }
        values.push(nu);
    }
    let mut worst: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).norm());
        }
    }
    if worst > MULTIPLIER_TOL {
        return Err(Error::ProbeDependentMultiplier(worst));
    }
    Ok(values[0])
}

/// Evaluates a closed form at `z`.
pub fn closed_form_eval(cf: &ClosedForm, z: Complex64) -> Result<Complex64> {
    Ok(cf.jet(z, 0)?.value())
}

/// `L_f = f'/f`.
pub fn logarithmic_derivative<F: Holomorphic + ?Sized>(f: &F, z: Complex64) -> Result<Complex64> {
    let jet = f.jet(z, 1)?;
    if jet.value().norm() == 0.0 {
        return Err(Error::VanishingValue(crate::format_complex(z)));
    }
    Ok(jet.derivative(1) / jet.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn registry_lookup() {
        for name in REGISTRY {
            assert_eq!(Form::by_name(name).unwrap().name(), name);
        }
        assert!(matches!(Form::by_name("E8"), Err(Error::UnknownForm(_))));
        assert!(Form::by_name("power:-1.5").is_ok());
        assert!(Form::by_name("cayley:2,1").is_ok());
        assert!(Form::by_name("cayley:2").is_err());
    }

    #[test]
    fn bounded_values_cover_the_truncation_error() {
        let z = c(0.13, 0.35);
        for name in ["E2", "E4", "Delta", "eta", "j", "theta3"] {
            for n in [4, 8, 12] {
                let f = Form::by_name(name).unwrap().with_truncation(Truncation::Fixed(n));
                let b = evaluate_with_bound(&f, z).unwrap();
                let reference = Form::by_name(name).unwrap().with_truncation(Truncation::Fixed(200));
                let exact = evaluate_with_bound(&reference, z).unwrap().value;
                let err = (b.value - exact).norm();
                let bound = b.tail_bound.unwrap();
                assert!(
                    err <= bound * (1.0 + 1e-9) + 1e-12 * exact.norm(),
                    "{name} N={n}: {err:e} > {bound:e}"
                );
            }
        }
        let j = evaluate_with_bound(&Form::by_name("j").unwrap(), c(0.0, 1.0)).unwrap();
        assert!((j.value - 1728.0).norm() < 1e-9);
        assert!(j.tail_bound.unwrap() < 1e-9);
    }

    #[test]
    fn non_unit_multiplier_rejected() {
        let f = Form::by_name("E4").unwrap();
        assert!(f.with_multiplier("bad", MoebiusTransform::t(), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn delta_slash_is_trivial() {
        let delta = Form::by_name("Delta").unwrap();
        let z = c(0.17, 1.1);
        let r = slash(&delta, 12.0, &MoebiusTransform::t(), z).unwrap() / delta.value(z).unwrap();
        assert!((r - 1.0).norm() < 1e-12);
        let z = c(0.0, 2.0);
        let r = slash(&delta, 12.0, &MoebiusTransform::s(), z).unwrap() / delta.value(z).unwrap();
        assert!((r - 1.0).norm() < 1e-10, "{r}");
    }

    #[test]
    fn eta_translation_multiplier() {
        let eta = Form::by_name("eta").unwrap();
        let z = c(-0.2, 0.9);
        let r = slash(&eta, 0.5, &MoebiusTransform::t(), z).unwrap() / eta.value(z).unwrap();
        assert!((r - unit(PI / 12.0)).norm() < 1e-12);
    }

    #[test]
    fn registry_tables_match_numerics() {
        for name in REGISTRY {
            let f = Form::by_name(name).unwrap();
            for m in f.multipliers() {
                let nu = multiplier_of(&f, &m.element, c(0.05, 0.9)).unwrap();
                assert!((nu - m.value).norm() < 1e-9, "{name} {}: {nu}", m.generator);
            }
        }
    }

    #[test]
    fn theta3_t2_multiplier_is_one() {
        let th = Form::by_name("theta3").unwrap();
        let nu = multiplier_of(&th, &MoebiusTransform::translation(2.0), c(0.1, 0.7)).unwrap();
        assert!((nu - 1.0).norm() < 1e-12);
    }

    #[test]
    fn multiplier_rejects_non_automorphic_element() {
        // theta3 is not an eigenfunction of S under the q^{n^2} normalization
        let th = Form::by_name("theta3").unwrap();
        assert!(multiplier_of(&th, &MoebiusTransform::s(), c(0.1, 0.9)).is_err());
    }

    #[test]
    fn slash_cocycle_moduli() {
        let eta = Form::by_name("eta").unwrap();
        let g1 = MoebiusTransform::s().compose(&MoebiusTransform::t_power(2));
        let g2 = MoebiusTransform::t().compose(&MoebiusTransform::s());
        let z = c(0.2, 1.3);
        let inner = FnHolomorphic::new("eta|g1", {
            let eta = eta.clone();
            move |w, order| {
                assert_eq!(order, 0);
                Ok(Jet::constant(slash(&eta, 0.5, &g1, w)?, 0))
            }
        });
        let lhs = slash(&inner, 0.5, &g2, z).unwrap();
        let rhs = slash(&eta, 0.5, &g1.compose(&g2), z).unwrap();
        assert!((lhs.norm() - rhs.norm()).abs() < 1e-9 * rhs.norm());
    }

    #[test]
    fn closed_form_examples() {
        let z = c(0.4, 1.2);
        let one = ClosedForm::CayleyProduct { n_f: 0, k: 0.0 };
        assert!((closed_form_eval(&one, z).unwrap() - 1.0).norm() < 1e-15);
        let e = ClosedForm::Exponential { rate: c(0.0, 1.5) };
        assert!((logarithmic_derivative(&Form::closed(e, 1.0), z).unwrap() - c(0.0, 1.5)).norm() < 1e-14);
        let p = ClosedForm::PowerOfZ {
            exponent: c(-0.75, 0.0),
        };
        let l = logarithmic_derivative(&Form::closed(p, 1.5), z).unwrap();
        assert!((l - c(-0.75, 0.0) / z).norm() < 1e-14);
    }

    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let forms = [
            ClosedForm::PowerOfZ { exponent: c(-1.5, 0.3) },
            ClosedForm::Exponential { rate: c(0.5, 2.0) },
            ClosedForm::CayleyProduct { n_f: 2, k: 1.5 },
        ];
        let z = c(0.3, 0.8);
        let h = 1e-5;
        for cf in forms {
            let jet = cf.jet(z, 2).unwrap();
            let fd = (closed_form_eval(&cf, z + h).unwrap() - closed_form_eval(&cf, z - h).unwrap()) / (2.0 * h);
            assert!((jet.derivative(1) - fd).norm() < 1e-7 * (1.0 + fd.norm()), "{cf:?}");
            let fd2 = (cf.jet(z + h, 1).unwrap().derivative(1) - cf.jet(z - h, 1).unwrap().derivative(1)) / (2.0 * h);
            assert!((jet.derivative(2) - fd2).norm() < 1e-6 * (1.0 + fd2.norm()), "{cf:?}");
        }
    }

    #[test]
    fn log_derivative_of_delta_is_e2() {
        let delta = Form::by_name("Delta").unwrap();
        let e2 = Form::by_name("E2").unwrap();
        for z in [c(0.1, 0.6), c(-0.3, 1.4), c(0.5, 0.2)] {
            let l = logarithmic_derivative(&delta, z).unwrap();
            let e = e2.value(z).unwrap() * c(0.0, 2.0 * PI);
            assert!((l - e).norm() < 1e-10 * (1.0 + e.norm()));
        }
    }

    #[test]
    fn log_derivative_transformation_law() {
        // L(γz) (cz+d)^{-2} - L(z) = 12 c/(cz+d) for γ = S
        let delta = Form::by_name("Delta").unwrap();
        let z = c(1.0, 2.0);
        let s = MoebiusTransform::s();
        let w = s.apply_finite(z).finite().unwrap();
        let j = s.j(z);
        let lhs = logarithmic_derivative(&delta, w).unwrap() / (j * j) - logarithmic_derivative(&delta, z).unwrap();
        let rhs = 12.0 * s.c / j;
        assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
    }
}
