//! Equivariant functions `h(γz) = γ h(z)`, the functions `h_f = z + k f/f'`
//! attached to weighted forms, the correspondence `h ↔ ĥ = 1/(h - z)` with
//! weight-2 depth-1 quasi-forms, and seeded randomized equivariance checks.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::Form;
use crate::jet::{FnHolomorphic, Holomorphic};
use crate::moebius::{ExtendedPoint, MoebiusTransform};

/// Denominators below this magnitude are treated as exact zeros.
pub const POLE_TOL: f64 = 1e-13;

/// Default seed for all sampling.
pub const DEFAULT_SEED: u64 = 0x5EED;

type PointFn = dyn Fn(Complex64) -> Result<ExtendedPoint> + Send + Sync;

#[derive(Clone)]
pub enum EquivariantFunction {
    /// `h_f = z + k f/f'`.
    Rational {
        form: Form,
        k: f64,
    },
    /// `h_g = z + 1/g`.
    FromQuasi(QuasiForm21),
    /// `h_0(z) = z`.
    Identity,
    Custom {
        label: String,
        eval: Arc<PointFn>,
    },
}

impl fmt::Debug for EquivariantFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EquivariantFunction({})", self.label())
    }
}

/// `h_f(z) = z + k f(z)/f'(z)`.
pub fn make_h_f(form: Form, k: f64) -> Result<EquivariantFunction> {
    if k == 0.0 {
        return Err(Error::ZeroWeight);
    }
    Ok(EquivariantFunction::Rational { form, k })
}

impl EquivariantFunction {
    pub fn custom(
        label: impl Into<String>,
        eval: impl Fn(Complex64) -> Result<ExtendedPoint> + Send + Sync + 'static,
    ) -> Self {
        EquivariantFunction::Custom {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EquivariantFunction::Rational { form, k } => format!("h[{}, k={k}]", form.name()),
            EquivariantFunction::FromQuasi(g) => format!("z + 1/({})", g.description),
            EquivariantFunction::Identity => "z".to_string(),
            EquivariantFunction::Custom { label, .. } => label.clone(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<ExtendedPoint> {
        if !(z.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane(crate::format_complex(z)));
        }
        match self {
            EquivariantFunction::Identity => Ok(z.into()),
            EquivariantFunction::Custom { eval, .. } => eval(z),
            EquivariantFunction::FromQuasi(g) => Ok(match g.eval(z)? {
                ExtendedPoint::Infinity => z.into(),
                ExtendedPoint::Finite(v) if v.norm() < POLE_TOL => ExtendedPoint::Infinity,
                ExtendedPoint::Finite(v) => (z + v.inv()).into(),
            }),
            EquivariantFunction::Rational { form, k } => {
                let jet = form.jet(z, 1)?;
                let (f, df) = (jet.value(), jet.derivative(1));
                // at a zero of f the limit of k f/f' is 0, also for multiple zeros
                if f.norm() < POLE_TOL {
                    return Ok(z.into());
                }
                if df.norm() < POLE_TOL * (k * f).norm().max(1.0) {
                    return Ok(ExtendedPoint::Infinity);
                }
                Ok((z + *k * f / df).into())
            }
        }
    }
}

enum QuasiSource {
    Infinity,
    Function(Arc<dyn Holomorphic>),
    Custom(Arc<PointFn>),
}

impl Clone for QuasiSource {
    fn clone(&self) -> Self {
        match self {
            QuasiSource::Infinity => QuasiSource::Infinity,
            QuasiSource::Function(f) => QuasiSource::Function(Arc::clone(f)),
            QuasiSource::Custom(f) => QuasiSource::Custom(Arc::clone(f)),
        }
    }
}

/// A function intended to satisfy `(cz+d)^{-2} g(γz) = g(z) + c/(cz+d)`.
/// The law is checked statistically by [`quasi_law_check`], not enforced.
#[derive(Clone)]
pub struct QuasiForm21 {
    pub description: String,
    source: QuasiSource,
}

impl fmt::Debug for QuasiForm21 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuasiForm21({})", self.description)
    }
}

impl QuasiForm21 {
    /// The formal constant `∞`, paired with the identity map. It carries no
    /// arithmetic.
    pub fn infinity() -> Self {
        QuasiForm21 {
            description: "inf".to_string(),
            source: QuasiSource::Infinity,
        }
    }

    pub fn from_holomorphic(description: impl Into<String>, f: Arc<dyn Holomorphic>) -> Self {
        QuasiForm21 {
            description: description.into(),
            source: QuasiSource::Function(f),
        }
    }

    pub fn custom(
        description: impl Into<String>,
        eval: impl Fn(Complex64) -> Result<ExtendedPoint> + Send + Sync + 'static,
    ) -> Self {
        QuasiForm21 {
            description: description.into(),
            source: QuasiSource::Custom(Arc::new(eval)),
        }
    }

    /// `factor · f` for a form `f`.
    pub fn scaled_form(form: Form, factor: Complex64) -> Self {
        let description = format!("({}) {}", crate::format_complex(factor), form.name());
        let f = FnHolomorphic::new(description.clone(), move |z, order| {
            Ok(form.jet(z, order)?.scale(factor))
        });
        Self::from_holomorphic(description, Arc::new(f))
    }

    /// `(iπ/6) E_2`, the image of `h_Δ`.
    pub fn e2_quasi() -> Result<Self> {
        Ok(Self::scaled_form(Form::by_name("E2")?, Complex64::new(0.0, PI / 6.0)))
    }

    /// `L_f = f'/f` of a form, which obeys the law with scale equal to the weight.
    pub fn log_derivative(form: Form) -> Self {
        let description = format!("{}'/{}", form.name(), form.name());
        let f = FnHolomorphic::new(description.clone(), move |z, order| {
            let jet = form.jet(z, order + 1)?;
            jet.differentiated().div(&jet.truncate(order))
        });
        Self::from_holomorphic(description, Arc::new(f))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.source, QuasiSource::Infinity)
    }

    /// The underlying holomorphic function, when there is one.
    pub fn holomorphic(&self) -> Option<Arc<dyn Holomorphic>> {
        match &self.source {
            QuasiSource::Function(f) => Some(Arc::clone(f)),
            _ => None,
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<ExtendedPoint> {
        match &self.source {
            QuasiSource::Infinity => Ok(ExtendedPoint::Infinity),
            QuasiSource::Function(f) => Ok(f.value(z)?.into()),
            QuasiSource::Custom(f) => f(z),
        }
    }
}

/// `ĥ = 1/(h - z)`.
pub fn hat(h: &EquivariantFunction) -> QuasiForm21 {
    match h {
        EquivariantFunction::Identity => QuasiForm21::infinity(),
        EquivariantFunction::FromQuasi(g) => g.clone(),
        EquivariantFunction::Rational { form, k } => {
            // 1/(h_f - z) = f'/(k f)
            let k = *k;
            let form = form.clone();
            let description = format!("{}'/({k} {})", form.name(), form.name());
            let f = FnHolomorphic::new(description.clone(), move |z, order| {
                let jet = form.jet(z, order + 1)?;
                Ok(jet
                    .differentiated()
                    .div(&jet.truncate(order))?
                    .scale(Complex64::new(1.0 / k, 0.0)))
            });
            QuasiForm21::from_holomorphic(description, Arc::new(f))
        }
        EquivariantFunction::Custom { .. } => {
            let h = h.clone();
            QuasiForm21::custom(format!("1/({} - z)", h.label()), move |z| {
                Ok(match h.eval(z)? {
                    ExtendedPoint::Infinity => Complex64::new(0.0, 0.0).into(),
                    ExtendedPoint::Finite(w) if (w - z).norm() < POLE_TOL => ExtendedPoint::Infinity,
                    ExtendedPoint::Finite(w) => (w - z).inv().into(),
                })
            })
        }
    }
}

/// `h_g = z + 1/g`; the constant `∞` goes to the identity.
pub fn unhat(g: &QuasiForm21) -> EquivariantFunction {
    if g.is_infinity() {
        EquivariantFunction::Identity
    } else {
        EquivariantFunction::FromQuasi(g.clone())
    }
}

/// A named generator of the group being sampled.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub element: MoebiusTransform,
}

impl Generator {
    pub fn new(name: impl Into<String>, element: MoebiusTransform) -> Self {
        Generator {
            name: name.into(),
            element,
        }
    }

    /// `{S, T}`, generating PSL(2,Z).
    pub fn modular() -> Vec<Generator> {
        vec![
            Generator::new("S", MoebiusTransform::s()),
            Generator::new("T", MoebiusTransform::t()),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleParams {
    pub n_samples: usize,
    pub word_len: usize,
    pub seed: u64,
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    /// Samples whose image `γz` falls below this height are redrawn.
    pub image_y_min: f64,
    pub tolerance: f64,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            n_samples: 500,
            word_len: 8,
            seed: DEFAULT_SEED,
            re_range: (-0.5, 0.5),
            im_range: (0.3, 3.0),
            image_y_min: 0.05,
            tolerance: 1e-7,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub z: Complex64,
    pub word: String,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub label: String,
    pub n_samples: usize,
    /// Draws discarded because `γz` fell below `image_y_min`.
    pub n_redrawn: usize,
    pub max_dev: f64,
    pub mean_dev: f64,
    pub n_fail: usize,
    pub tolerance: f64,
    pub worst_sample: Option<Sample>,
    /// Up to 20 failing samples, worst first.
    pub failures: Vec<Sample>,
}

struct Draw {
    z: Complex64,
    word: String,
    g: MoebiusTransform,
}

/// Random words of length `1..=word_len` in the generators and their
/// inverses, paired with random points; deterministic in the seed.
fn draw_samples(gens: &[Generator], params: &SampleParams) -> (Vec<Draw>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut draws = Vec::with_capacity(params.n_samples);
    let mut redrawn = 0;
    if gens.is_empty() {
        return (draws, 0);
    }
    while draws.len() < params.n_samples {
        let len = rng.gen_range(1..=params.word_len.max(1));
        let mut g = MoebiusTransform::identity();
        let mut letters = Vec::with_capacity(len);
        for _ in 0..len {
            let gen = &gens[rng.gen_range(0..gens.len())];
            if rng.gen_bool(0.5) {
                g = g.compose(&gen.element);
                letters.push(gen.name.clone());
            } else {
                g = g.compose(&gen.element.inverse());
                letters.push(format!("{}^-1", gen.name));
            }
        }
        let z = Complex64::new(
            rng.gen_range(params.re_range.0..=params.re_range.1),
            rng.gen_range(params.im_range.0..=params.im_range.1),
        );
        let image_ok = g.apply_finite(z).finite().is_some_and(|w| w.im >= params.image_y_min);
        if !image_ok {
            redrawn += 1;
            continue;
        }
        draws.push(Draw {
            z,
            word: letters.join(" "),
            g,
        });
    }
    (draws, redrawn)
}

fn summarize(label: String, params: &SampleParams, redrawn: usize, samples: Vec<Sample>) -> CheckReport {
    let n = samples.len();
    let max_dev = samples.iter().map(|s| s.deviation).fold(0.0, f64::max);
    let mean_dev = if n == 0 {
        0.0
    } else {
        samples.iter().map(|s| s.deviation).sum::<f64>() / n as f64
    };
    let worst_sample = samples
        .iter()
        .max_by(|a, b| a.deviation.total_cmp(&b.deviation))
        .cloned();
    let mut failures: Vec<Sample> = samples
        .into_iter()
        .filter(|s| !(s.deviation < params.tolerance))
        .collect();
    let n_fail = failures.len();
    failures.sort_by(|a, b| b.deviation.total_cmp(&a.deviation));
    failures.truncate(20);
    CheckReport {
        label,
        n_samples: n,
        n_redrawn: redrawn,
        max_dev,
        mean_dev,
        n_fail,
        tolerance: params.tolerance,
        worst_sample,
        failures,
    }
}

/// Chordal distance between `h(γz)` and `γ h(z)` over sampled `(γ, z)`.
/// Evaluation errors count as the maximal chordal deviation 2.
pub fn check_equivariance(h: &EquivariantFunction, gens: &[Generator], params: &SampleParams) -> CheckReport {
    let (draws, redrawn) = draw_samples(gens, params);
    let samples: Vec<Sample> = draws
        .par_iter()
        .map(|d| {
            let deviation = (|| -> Result<f64> {
                let gz = d.g.apply_finite(d.z).finite().ok_or(Error::NonFinite("γz".into()))?;
                let lhs = h.eval(gz)?;
                let rhs = d.g.apply(h.eval(d.z)?);
                Ok(lhs.chordal_distance(rhs))
            })()
            .unwrap_or(2.0);
            Sample {
                z: d.z,
                word: d.word.clone(),
                deviation,
            }
        })
        .collect();
    summarize(h.label(), params, redrawn, samples)
}

/// Residuals `|(cz+d)^{-2} g(γz) - g(z) - scale·c/(cz+d)| / max(1, |g(z)|)`.
pub fn quasi_law_check(g: &QuasiForm21, scale: f64, gens: &[Generator], params: &SampleParams) -> CheckReport {
    let (draws, redrawn) = draw_samples(gens, params);
    let samples: Vec<Sample> = draws
        .par_iter()
        .map(|d| {
            let deviation = (|| -> Result<f64> {
                let gz = d.g.apply_finite(d.z).finite().ok_or(Error::NonFinite("γz".into()))?;
                let j = d.g.j(d.z);
                let (ExtendedPoint::Finite(lhs), ExtendedPoint::Finite(base)) = (g.eval(gz)?, g.eval(d.z)?) else {
                    return Ok(if g.is_infinity() { 0.0 } else { f64::INFINITY });
                };
                let r = lhs / (j * j) - base - scale * d.g.c / j;
                Ok(r.norm() / base.norm().max(1.0))
            })()
            .unwrap_or(f64::INFINITY);
            Sample {
                z: d.z,
                word: d.word.clone(),
                deviation,
            }
        })
        .collect();
    summarize(g.description.clone(), params, redrawn, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small(n: usize) -> SampleParams {
        SampleParams {
            n_samples: n,
            ..SampleParams::default()
        }
    }

    #[test]
    fn zero_weight_rejected() {
        assert_eq!(
            make_h_f(Form::by_name("E4").unwrap(), 0.0).err(),
            Some(Error::ZeroWeight)
        );
    }

    #[test]
    fn h_delta_matches_e2_formula() {
        let h = make_h_f(Form::by_name("Delta").unwrap(), 12.0).unwrap();
        let e2 = Form::by_name("E2").unwrap();
        for z in [c(0.1, 1.2), c(-0.4, 0.7), c(0.3, 2.0)] {
            let want = z + 6.0 / (c(0.0, PI) * e2.value(z).unwrap());
            let got = h.eval(z).unwrap().finite().unwrap();
            assert!((got - want).norm() < 1e-11 * want.norm(), "{got} {want}");
        }
    }

    #[test]
    fn closed_form_h_examples() {
        use crate::forms::ClosedForm;
        let r = c(0.5, 2.0);
        let h = make_h_f(Form::closed(ClosedForm::Exponential { rate: r }, 1.0), 3.0).unwrap();
        let z = c(0.2, 0.9);
        assert!((h.eval(z).unwrap().finite().unwrap() - (z + 3.0 / r)).norm() < 1e-13);
        let p = c(-1.5, 0.0);
        let h = make_h_f(Form::closed(ClosedForm::PowerOfZ { exponent: p }, 3.0), 3.0).unwrap();
        assert!((h.eval(z).unwrap().finite().unwrap() - z * (1.0 + 3.0 / p)).norm() < 1e-13);
    }

    #[test]
    fn zeros_of_f_are_fixed() {
        let rho = c(-0.5, 3f64.sqrt() / 2.0);
        let h = make_h_f(Form::by_name("E4").unwrap(), 4.0).unwrap();
        let v = h.eval(rho).unwrap().finite().unwrap();
        assert!((v - rho).norm() < 1e-6);
    }

    #[test]
    fn identity_and_hat_of_identity() {
        let report = check_equivariance(&EquivariantFunction::Identity, &Generator::modular(), &small(50));
        assert_eq!(report.max_dev, 0.0);
        assert!(hat(&EquivariantFunction::Identity).is_infinity());
        assert!(matches!(unhat(&QuasiForm21::infinity()), EquivariantFunction::Identity));
    }

    #[test]
    fn translation_negative_control() {
        let h = EquivariantFunction::custom("z+1", |z| Ok((z + 1.0).into()));
        let only_t = [Generator::new("T", MoebiusTransform::t())];
        assert!(check_equivariance(&h, &only_t, &small(50)).max_dev < 1e-12);
        let st = check_equivariance(&h, &Generator::modular(), &small(50));
        assert!(st.max_dev > 1e-2);
        assert!(st.n_fail > 0);
    }

    #[test]
    fn hat_round_trips() {
        let h = make_h_f(Form::by_name("Delta").unwrap(), 12.0).unwrap();
        let g = hat(&h);
        let back = unhat(&g);
        let q = QuasiForm21::e2_quasi().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        for _ in 0..50 {
            let z = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..2.0));
            let a = h.eval(z).unwrap();
            let b = back.eval(z).unwrap();
            assert!(a.chordal_distance(b) < 1e-10);
            let (ExtendedPoint::Finite(x), ExtendedPoint::Finite(y)) = (g.eval(z).unwrap(), q.eval(z).unwrap()) else {
                panic!("pole at sample");
            };
            assert!((x - y).norm() < 1e-10 * y.norm().max(1.0));
            let qq = hat(&unhat(&q)).eval(z).unwrap();
            assert!(qq.chordal_distance(y.into()) < 1e-12);
        }
    }

    #[test]
    fn custom_hat_round_trip() {
        let h = EquivariantFunction::custom("z+1/z", |z| Ok((z + z.inv()).into()));
        let back = unhat(&hat(&h));
        let z = c(0.3, 0.8);
        assert!(h.eval(z).unwrap().chordal_distance(back.eval(z).unwrap()) < 1e-12);
    }

    #[test]
    fn quasi_law_examples() {
        let gens = Generator::modular();
        let params = small(60);
        let e2 = quasi_law_check(&QuasiForm21::e2_quasi().unwrap(), 1.0, &gens, &params);
        assert!(e2.max_dev < 1e-8, "{}", e2.max_dev);
        let ld = quasi_law_check(
            &QuasiForm21::log_derivative(Form::by_name("Delta").unwrap()),
            12.0,
            &gens,
            &params,
        );
        assert!(ld.max_dev < 1e-8, "{}", ld.max_dev);
        let e4 = Form::by_name("E4").unwrap();
        let bad = QuasiForm21::scaled_form(e4, c(1.0, 0.0));
        assert!(quasi_law_check(&bad, 1.0, &gens, &params).max_dev > 1e-2);
    }

    #[test]
    fn h_delta_is_equivariant_small_sample() {
        let h = make_h_f(Form::by_name("Delta").unwrap(), 12.0).unwrap();
        let report = check_equivariance(&h, &Generator::modular(), &small(80));
        assert!(report.max_dev < 1e-7, "{report:?}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let h = make_h_f(Form::by_name("E6").unwrap(), 6.0).unwrap();
        let a = check_equivariance(&h, &Generator::modular(), &small(20));
        let b = check_equivariance(&h, &Generator::modular(), &small(20));
        assert_eq!(a.max_dev.to_bits(), b.max_dev.to_bits());
        assert_eq!(a.mean_dev.to_bits(), b.mean_dev.to_bits());
    }
}
