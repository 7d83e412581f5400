//! A catalog of identities between the classical forms, each checked
//! numerically at seeded sample points, and the quasi-modular perturbation
//! `f = j' F'(j) + (iπ/6) E_2` whose zeros are located by the zero finder.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::equivariant::{check_equivariance, unhat, CheckReport, Generator, QuasiForm21, SampleParams};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::jet::{FnHolomorphic, Holomorphic, Jet};
use crate::qseries::{eta_power_jet, EvalPoint, PuiseuxSeries, SeriesKind, Truncation};
use crate::zerofinder::{classify_equivalence, find_zeros_tiled, FinderOptions, Partition, SearchBox, ZeroRecord};

/// Default tolerance for catalog residuals.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Residuals at or below this level count as converged in the doubling test.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

type SideFn = dyn Fn(Complex64, Truncation) -> Result<Complex64> + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMode {
    Absolute,
    /// `|lhs - rhs| / max(1, |rhs|)`.
    Relative,
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplePlan {
    pub n_points: usize,
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub seed: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            n_points: 100,
            re_range: (-0.5, 0.5),
            im_range: (0.4, 2.0),
            seed: crate::equivariant::DEFAULT_SEED,
        }
    }
}

impl SamplePlan {
    pub fn points(&self) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.n_points)
            .map(|_| {
                Complex64::new(
                    rng.gen_range(self.re_range.0..=self.re_range.1),
                    rng.gen_range(self.im_range.0..=self.im_range.1),
                )
            })
            .collect()
    }
}

#[derive(Clone)]
pub struct IdentityCheck {
    pub name: String,
    /// The identity written out, e.g. `(6/πi) E2' = E2^2 - E4`.
    pub formula: String,
    lhs: Arc<SideFn>,
    rhs: Arc<SideFn>,
    pub sample: SamplePlan,
    pub residual_mode: ResidualMode,
}

impl fmt::Debug for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IdentityCheck({}: {})", self.name, self.formula)
    }
}

impl IdentityCheck {
    pub fn new(
        name: &str,
        formula: &str,
        lhs: impl Fn(Complex64, Truncation) -> Result<Complex64> + Send + Sync + 'static,
        rhs: impl Fn(Complex64, Truncation) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        IdentityCheck {
            name: name.to_string(),
            formula: formula.to_string(),
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
            sample: SamplePlan::default(),
            residual_mode: ResidualMode::Relative,
        }
    }

    pub fn with_sample(mut self, sample: SamplePlan) -> Self {
        self.sample = sample;
        self
    }

    pub fn residual_at(&self, z: Complex64, truncation: Truncation) -> Result<f64> {
        let l = (self.lhs)(z, truncation)?;
        let r = (self.rhs)(z, truncation)?;
        let d = (l - r).norm();
        let res = match self.residual_mode {
            ResidualMode::Absolute => d,
            ResidualMode::Relative => d / r.norm().max(1.0),
        };
        if res.is_finite() {
            Ok(res)
        } else {
            Err(Error::NonFinite(format!(
                "{} at {}",
                self.name,
                crate::format_complex(z)
            )))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointError {
    pub z: Complex64,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub formula: String,
    pub n_points: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub worst_point: Option<Complex64>,
    pub errors: Vec<PointError>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Evaluates the check at every sample point. Failures at individual points
/// are recorded and make the check fail; they do not abort the run.
pub fn run_check(c: &IdentityCheck, truncation: Truncation, tolerance: f64) -> CheckResult {
    let points = c.sample.points();
    let results: Vec<Result<f64>> = points.par_iter().map(|&z| c.residual_at(z, truncation)).collect();
    let mut max_residual: f64 = 0.0;
    let mut sum = 0.0;
    let mut ok = 0usize;
    let mut worst_point = None;
    let mut errors = Vec::new();
    for (z, r) in points.iter().zip(results) {
        match r {
            Ok(r) => {
                sum += r;
                ok += 1;
                if r > max_residual || worst_point.is_none() {
                    max_residual = max_residual.max(r);
                    worst_point = Some(*z);
                }
            }
            Err(e) => errors.push(PointError {
                z: *z,
                message: e.to_string(),
            }),
        }
    }
    let mean_residual = if ok == 0 { 0.0 } else { sum / ok as f64 };
    CheckResult {
        name: c.name.clone(),
        formula: c.formula.clone(),
        n_points: points.len(),
        max_residual,
        mean_residual,
        worst_point,
        passed: errors.is_empty() && max_residual < tolerance,
        errors,
        tolerance,
    }
}

fn value(kind: SeriesKind, z: Complex64, t: Truncation) -> Result<Complex64> {
    Ok(kind.jet(z, 0, t)?.value())
}

fn derivative(kind: SeriesKind, z: Complex64, t: Truncation) -> Result<Complex64> {
    Ok(kind.jet(z, 1, t)?.derivative(1))
}

fn log_derivative(kind: SeriesKind, z: Complex64, t: Truncation) -> Result<Complex64> {
    let jet = kind.jet(z, 1, t)?;
    Ok(jet.derivative(1) / jet.value())
}

fn eta(z: Complex64, t: Truncation) -> Result<Complex64> {
    Ok(eta_power_jet(z, 1, 0, t)?.value())
}

fn e2(z: Complex64, t: Truncation) -> Result<Complex64> {
    value(SeriesKind::E2, z, t)
}

const MAX_J_TERMS: usize = 400;

/// `j = E4^3 / Δ` by floating-point division of q-expansions.
pub fn j_series() -> &'static PuiseuxSeries {
    static J: OnceLock<PuiseuxSeries> = OnceLock::new();
    J.get_or_init(|| {
        let n = MAX_J_TERMS + 1;
        let e4 = SeriesKind::E4
            .generate(n)
            .expect("E4 coefficients fit i128")
            .to_puiseux();
        let delta = SeriesKind::Delta
            .generate(n)
            .expect("Δ coefficients fit i128")
            .to_puiseux();
        e4.pow_int(3)
            .divide(&delta)
            .expect("Δ has a nonzero coefficient")
            .truncated(MAX_J_TERMS)
    })
}

fn j_by_series(z: Complex64, t: Truncation) -> Result<Complex64> {
    let n = match t {
        Truncation::Auto => MAX_J_TERMS,
        Truncation::Fixed(n) => n.min(MAX_J_TERMS),
    };
    Ok(j_series().evaluate_to(&EvalPoint::new(z)?, n).value)
}

fn const_mul(c: Complex64, v: Result<Complex64>) -> Result<Complex64> {
    v.map(|v| c * v)
}

fn pi_i() -> Complex64 {
    Complex64::new(0.0, PI)
}

/// The identity catalog.
pub fn full_catalog() -> Vec<IdentityCheck> {
    use SeriesKind::*;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let six_over_pi_i = 6.0 / pi_i();
    vec![
        IdentityCheck::new(
            "log_div",
            "(1/2πi) Δ'/Δ = E2",
            move |z, t| Ok(log_derivative(Delta, z, t)? / two_pi_i),
            e2,
        ),
        IdentityCheck::new(
            "jacobi",
            "θ2^4 + θ4^4 = θ3^4",
            |z, t| Ok(value(Theta2, z, t)?.powu(4) + value(Theta4, z, t)?.powu(4)),
            |z, t| Ok(value(Theta3, z, t)?.powu(4)),
        ),
        IdentityCheck::new(
            "delta_theta",
            "Δ(2z) = (θ2 θ3 θ4 / 2)^8",
            |z, t| value(Delta, 2.0 * z, t),
            |z, t| Ok((value(Theta2, z, t)? * value(Theta3, z, t)? * value(Theta4, z, t)? / 2.0).powu(8)),
        ),
        IdentityCheck::new(
            "e4_theta",
            "E4(2z) = (θ2^8 + θ3^8 + θ4^8) / 2",
            |z, t| value(E4, 2.0 * z, t),
            |z, t| {
                Ok((value(Theta2, z, t)?.powu(8) + value(Theta3, z, t)?.powu(8) + value(Theta4, z, t)?.powu(8)) / 2.0)
            },
        ),
        IdentityCheck::new(
            "theta2_eta",
            "θ2(z) = 2 η(4z)^2 / η(2z)",
            |z, t| value(Theta2, z, t),
            |z, t| Ok(2.0 * eta(4.0 * z, t)?.powu(2) / eta(2.0 * z, t)?),
        ),
        IdentityCheck::new(
            "theta3_eta",
            "θ3(z) = η(2z)^5 / (η(z)^2 η(4z)^2)",
            |z, t| value(Theta3, z, t),
            |z, t| Ok(eta(2.0 * z, t)?.powu(5) / (eta(z, t)?.powu(2) * eta(4.0 * z, t)?.powu(2))),
        ),
        IdentityCheck::new(
            "theta4_eta",
            "θ4(z) = η(z)^2 / η(2z)",
            |z, t| value(Theta4, z, t),
            |z, t| Ok(eta(z, t)?.powu(2) / eta(2.0 * z, t)?),
        ),
        IdentityCheck::new(
            "ram1",
            "(6/πi) E2' = E2^2 - E4",
            move |z, t| const_mul(six_over_pi_i, derivative(E2, z, t)),
            |z, t| Ok(e2(z, t)?.powu(2) - value(E4, z, t)?),
        ),
        IdentityCheck::new(
            "ram2",
            "(3/2πi) E4' = E4 E2 - E6",
            move |z, t| const_mul(3.0 / two_pi_i, derivative(E4, z, t)),
            |z, t| Ok(value(E4, z, t)? * e2(z, t)? - value(E6, z, t)?),
        ),
        IdentityCheck::new(
            "ram3",
            "(1/πi) E6' = E6 E2 - E4^2",
            |z, t| const_mul(1.0 / pi_i(), derivative(E6, z, t)),
            |z, t| Ok(value(E6, z, t)? * e2(z, t)? - value(E4, z, t)?.powu(2)),
        ),
        IdentityCheck::new(
            "theta2_log_derivative",
            "(6/πi) θ2'/θ2 = 4 E2(4z) - E2(2z)",
            move |z, t| const_mul(six_over_pi_i, log_derivative(Theta2, z, t)),
            |z, t| Ok(4.0 * e2(4.0 * z, t)? - e2(2.0 * z, t)?),
        ),
        IdentityCheck::new(
            "theta3_log_derivative",
            "(6/πi) θ3'/θ3 = 5 E2(2z) - E2(z) - 4 E2(4z)",
            move |z, t| const_mul(six_over_pi_i, log_derivative(Theta3, z, t)),
            |z, t| Ok(5.0 * e2(2.0 * z, t)? - e2(z, t)? - 4.0 * e2(4.0 * z, t)?),
        ),
        IdentityCheck::new(
            "theta4_log_derivative",
            "(6/πi) θ4'/θ4 = E2(z) - E2(2z)",
            move |z, t| const_mul(six_over_pi_i, log_derivative(Theta4, z, t)),
            |z, t| Ok(e2(z, t)? - e2(2.0 * z, t)?),
        ),
        IdentityCheck::new(
            "j_consistency",
            "E4^3/Δ (values) = j (series quotient E4^3/Δ)",
            |z, t| Ok(value(E4, z, t)?.powu(3) / value(Delta, z, t)?),
            j_by_series,
        ),
        IdentityCheck::new(
            "j_1728",
            "(E4^3 - E6^2)/Δ = 1728",
            |z, t| Ok((value(E4, z, t)?.powu(3) - value(E6, z, t)?.powu(2)) / value(Delta, z, t)?),
            |_, _| Ok(Complex64::new(1728.0, 0.0)),
        ),
        IdentityCheck::new(
            "eta24_delta",
            "η^24 (product) = Δ (q-expansion)",
            |z, t| Ok(eta_power_jet(z, 24, 0, t)?.value()),
            |z, t| value(Delta, z, t),
        ),
    ]
}

/// Alternative normalizations of the same identities: the `θ` relations for
/// `Δ` and `E4` taken at `z` instead of `2z`, the `θ` log-derivative
/// formulas with constants `1/(4πi)`, `24/(πi)`, `1/(2πi)`, and
/// `j = (E4^3 - E6^2)/Δ` (which is the constant 1728 when `Δ = η^24`). Under the
/// `q = e^{2πiz}`, `θ3 = Σ q^{n^2}` normalization used here these do not hold;
/// they are kept so that the discrepancy stays measurable.
pub fn alternative_normalizations() -> Vec<IdentityCheck> {
    use SeriesKind::*;
    vec![
        IdentityCheck::new(
            "delta_theta_at_z",
            "Δ(z) = (θ2 θ3 θ4 / 2)^8",
            |z, t| value(Delta, z, t),
            |z, t| Ok((value(Theta2, z, t)? * value(Theta3, z, t)? * value(Theta4, z, t)? / 2.0).powu(8)),
        ),
        IdentityCheck::new(
            "e4_theta_at_z",
            "E4(z) = (θ2^8 + θ3^8 + θ4^8) / 2",
            |z, t| value(E4, z, t),
            |z, t| {
                Ok((value(Theta2, z, t)?.powu(8) + value(Theta3, z, t)?.powu(8) + value(Theta4, z, t)?.powu(8)) / 2.0)
            },
        ),
        IdentityCheck::new(
            "j_as_difference_quotient",
            "(E4^3 - E6^2)/Δ = j",
            |z, t| Ok((value(E4, z, t)?.powu(3) - value(E6, z, t)?.powu(2)) / value(Delta, z, t)?),
            j_by_series,
        ),
        IdentityCheck::new(
            "theta2_log_derivative_1_over_4pi_i",
            "(1/4πi) θ2'/θ2 = 4 E2(4z) - E2(2z)",
            |z, t| const_mul(1.0 / (4.0 * pi_i()), log_derivative(Theta2, z, t)),
            |z, t| Ok(4.0 * e2(4.0 * z, t)? - e2(2.0 * z, t)?),
        ),
        IdentityCheck::new(
            "theta3_log_derivative_24_over_pi_i",
            "(24/πi) θ3'/θ3 = 5 E2(2z) - E2(z) - 4 E2(4z)",
            |z, t| const_mul(24.0 / pi_i(), log_derivative(Theta3, z, t)),
            |z, t| Ok(5.0 * e2(2.0 * z, t)? - e2(z, t)? - 4.0 * e2(4.0 * z, t)?),
        ),
        IdentityCheck::new(
            "theta4_log_derivative_1_over_2pi_i",
            "(1/2πi) θ4'/θ4 = E2(z) - E2(2z)",
            |z, t| const_mul(1.0 / (2.0 * pi_i()), log_derivative(Theta4, z, t)),
            |z, t| Ok(e2(z, t)? - e2(2.0 * z, t)?),
        ),
    ]
}

pub fn find_check(name: &str) -> Option<IdentityCheck> {
    full_catalog()
        .into_iter()
        .chain(alternative_normalizations())
        .find(|c| c.name == name)
}

#[derive(Clone, Debug, Serialize)]
pub struct DoublingResult {
    pub name: String,
    pub truncation: usize,
    pub residual: f64,
    pub doubled_residual: f64,
    /// The doubled residual is no larger, or both sit at the floor.
    pub ok: bool,
}

/// Compares the worst residual at a fixed truncation `n` against `2n`.
pub fn truncation_doubling(c: &IdentityCheck, n: usize) -> DoublingResult {
    let a = run_check(c, Truncation::Fixed(n), f64::INFINITY).max_residual;
    let b = run_check(c, Truncation::Fixed(2 * n), f64::INFINITY).max_residual;
    DoublingResult {
        name: c.name.clone(),
        truncation: n,
        residual: a,
        doubled_residual: b,
        ok: b <= a || b <= RESIDUAL_FLOOR,
    }
}

/// `F'` and `F''` for the outer function of the perturbation.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PerturbationRule {
    /// `F(w) = e^w`.
    Exponential,
    /// `F(w) = Σ c_k w^k` with real coefficients, lowest degree first.
    Polynomial { coefficients: Vec<f64> },
    /// `F` constant, so `f` reduces to `(iπ/6) E2`.
    Constant,
}

impl PerturbationRule {
    pub fn parse(text: &str) -> Result<Self> {
        match text.to_ascii_lowercase().as_str() {
            "exp" | "exponential" => Ok(PerturbationRule::Exponential),
            "constant" | "const" => Ok(PerturbationRule::Constant),
            "polynomial" | "poly" => Ok(PerturbationRule::Polynomial {
                coefficients: vec![0.0, 1.0],
            }),
            other => {
                let Some(list) = other.strip_prefix("poly:") else {
                    return Err(Error::Parse(format!("unknown rule {text:?}")));
                };
                let coefficients = list
                    .split(',')
                    .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                Ok(PerturbationRule::Polynomial { coefficients })
            }
        }
    }

    /// `(F'(w), F''(w))` multiplied by the positive real `e^{-shift}`.
    fn derivatives(&self, w: Complex64, shift: f64) -> (Complex64, Complex64) {
        match self {
            PerturbationRule::Exponential => {
                let v = (w - shift).exp();
                (v, v)
            }
            PerturbationRule::Constant => (0.0.into(), 0.0.into()),
            PerturbationRule::Polynomial { coefficients } => {
                let mut d1 = Complex64::new(0.0, 0.0);
                let mut d2 = Complex64::new(0.0, 0.0);
                for (k, &c) in coefficients.iter().enumerate().skip(1).rev() {
                    d1 = d1 * w + c * k as f64;
                }
                for (k, &c) in coefficients.iter().enumerate().skip(2).rev() {
                    d2 = d2 * w + c * (k * (k - 1)) as f64;
                }
                let s = (-shift).exp();
                (d1 * s, d2 * s)
            }
        }
    }
}

/// `f = j' F'(j) + (iπ/6) E2`, a weight-2 depth-1 quasi-form for any entire `F`.
///
/// With `rescaled`, the value and derivative at each point are multiplied by
/// the positive real number `e^{-max(Re j, 0)}` for the exponential rule. This
/// keeps `e^j` finite where `|j|` is large and leaves the zeros, the argument
/// of `f` and the Newton step `f/f'` unchanged, so it is what the zero finder
/// uses; the unscaled function is used for equivariance.
pub fn perturbation_function(rule: PerturbationRule, rescaled: bool) -> Result<FnHolomorphic> {
    let j = Form::by_name("j")?;
    let e2 = Form::by_name("E2")?;
    let c = Complex64::new(0.0, PI / 6.0);
    let label = format!("j' F'(j) + (iπ/6) E2 [{rule:?}]");
    Ok(FnHolomorphic::new(label, move |z, order| {
        if order > 1 {
            return Err(Error::DerivativeOrder(order, "perturbation".into()));
        }
        let e2 = e2.jet(z, order)?;
        if matches!(rule, PerturbationRule::Constant) {
            return Ok(e2.scale(c));
        }
        let jj = j.jet(z, order + 1)?;
        let shift = if rescaled && matches!(rule, PerturbationRule::Exponential) {
            jj.value().re.max(0.0)
        } else {
            0.0
        };
        let (d1, d2) = rule.derivatives(jj.value(), shift);
        let s = (-shift).exp();
        let mut ds = vec![jj.derivative(1) * d1 + c * e2.value() * s];
        if order == 1 {
            ds.push(jj.derivative(2) * d1 + jj.derivative(1).powu(2) * d2 + c * e2.derivative(1) * s);
        }
        Ok(Jet::from_derivatives(&ds))
    }))
}

const DEMO_TILES: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    pub rule: PerturbationRule,
    pub search_box: SearchBox,
    pub zeros: Vec<ZeroRecord>,
    /// Tiles of the box searched before enough zeros were found.
    pub tiles_searched: usize,
    pub tiles_total: usize,
    pub partition: Partition,
    pub threshold: usize,
    pub meets_threshold: bool,
    pub equivariance: CheckReport,
}

/// Builds `f` for the rule, searches the box for zeros (by tiles from the top
/// down, stopping at `opts.max_zeros`, since for the exponential rule `f`
/// winds around zero roughly `|j|` times along the lower edge), partitions
/// them into orbits and checks equivariance of `h = z + 1/f` on the box.
pub fn quasimodular_perturbation_demo(
    rule: PerturbationRule,
    b: &SearchBox,
    threshold: usize,
    opts: &FinderOptions,
) -> Result<PerturbationReport> {
    let scaled = perturbation_function(rule.clone(), true)?;
    let tiled = find_zeros_tiled(&scaled, b, DEMO_TILES, DEMO_TILES, opts)?;
    let search = tiled.search;
    let partition = classify_equivalence(&search.zeros)?;
    let f = perturbation_function(rule.clone(), false)?;
    let h = unhat(&QuasiForm21::from_holomorphic(f.label(), Arc::new(f)));
    let params = SampleParams {
        n_samples: 200,
        re_range: (b.re_min, b.re_max),
        im_range: (b.im_min.max(0.3), b.im_max.max(0.31)),
        ..SampleParams::default()
    };
    let equivariance = check_equivariance(&h, &Generator::modular(), &params);
    Ok(PerturbationReport {
        rule,
        search_box: *b,
        meets_threshold: partition.orbit_count >= threshold,
        zeros: search.zeros,
        tiles_searched: tiled.tiles_searched,
        tiles_total: DEMO_TILES * DEMO_TILES,
        partition,
        threshold,
        equivariance,
    })
}
