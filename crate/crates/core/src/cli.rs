//! Configuration, command implementations and report rendering behind the
//! `mforms` binary. Every command returns a [`Report`]; the binary only parses
//! arguments, prints and exits.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::equivariant::{check_equivariance, make_h_f, EquivariantFunction, Generator, SampleParams};
use crate::error::{Error, Result};
use crate::forms::{evaluate_with_bound, Form};
use crate::identities::{
    find_check, full_catalog, perturbation_function, run_check, truncation_doubling, PerturbationRule, SamplePlan,
};
use crate::jet::{Derivative, Holomorphic};
use crate::moebius::{reduce_to_fundamental_domain, ExtendedPoint, MoebiusTransform};
use crate::qseries::{j_series_exact, IntSeries, SeriesKind, Truncation, DEFAULT_Y_MIN};
use crate::zerofinder::{classify_equivalence, find_zeros, find_zeros_tiled, FinderOptions, SearchBox, ZeroSearch};
use crate::{format_complex, parse_complex};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the truncation order.
pub const TRUNCATION_ENV: &str = "MF_TRUNCATION";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub truncation_override: Option<usize>,
    pub tolerance: f64,
    pub seed: u64,
    pub y_min: f64,
    pub output_format: OutputFormat,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            truncation_override: None,
            tolerance: 1e-9,
            seed: 0x5EED,
            y_min: DEFAULT_Y_MIN,
            output_format: OutputFormat::Json,
        }
    }
}

fn parse_u64(text: &str) -> Result<u64> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse::<u64>(),
    };
    parsed.map_err(|e| Error::Parse(format!("{text:?}: {e}")))
}

fn parse_f64(text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("{text:?}: {e}")))
}

fn parse_truncation(text: &str) -> Result<Option<usize>> {
    let t = text.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    t.parse::<usize>()
        .map(Some)
        .map_err(|e| Error::Parse(format!("truncation {text:?}: {e}")))
}

impl Config {
    /// Applies `key = value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn with_key_values(mut self, text: &str) -> Result<Self> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Config::default().with_key_values(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "truncation_override" | "truncation" => self.truncation_override = parse_truncation(value)?,
            "tolerance" => self.tolerance = parse_f64(value)?,
            "seed" => self.seed = parse_u64(value)?,
            "y_min" => self.y_min = parse_f64(value)?,
            "output_format" | "format" => self.output_format = OutputFormat::parse(value)?,
            other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies the value of `MF_TRUNCATION`, if set.
    pub fn with_env_truncation(mut self, value: Option<&str>) -> Result<Self> {
        if let Some(v) = value {
            self.truncation_override = parse_truncation(v)?;
        }
        Ok(self)
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Parse(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.y_min > 0.0) {
            return Err(Error::Parse(format!("y_min must be positive, got {}", self.y_min)));
        }
        Ok(self)
    }

    pub fn truncation(&self) -> Truncation {
        match self.truncation_override {
            Some(n) => Truncation::Fixed(n),
            None => Truncation::Auto,
        }
    }

    fn finder_options(&self, max_zeros: usize) -> FinderOptions {
        FinderOptions {
            max_zeros,
            y_min: self.y_min,
            ..FinderOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ToleranceBreach,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ToleranceBreach => 2,
        }
    }

    fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::ToleranceBreach
        }
    }
}

/// Exit code for errors raised before a report exists.
pub const INPUT_ERROR_EXIT: i32 = 3;

/// Output of one command: a JSON body and a CSV table with the same content.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub body: Map<String, Value>,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
}

impl Report {
    fn new(command: &'static str, status: Status, body: Value, header: Vec<&'static str>) -> Self {
        let body = match body {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        Report {
            command,
            status,
            body,
            csv_header: header,
            csv_rows: Vec::new(),
        }
    }

    fn row(mut self, row: Vec<String>) -> Self {
        self.csv_rows.push(row);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut m = self.body.clone();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("status".into(), json!(self.status));
        Value::Object(m)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
                s.push('\n');
                s
            }
            OutputFormat::Csv => {
                let mut s = String::new();
                let _ = writeln!(s, "{}", self.csv_header.join(","));
                for row in &self.csv_rows {
                    let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                s
            }
        }
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// JSON error object printed for input errors.
pub fn error_json(e: &Error) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "status": "input_error",
        "error": e.to_string(),
    });
    serde_json::to_string_pretty(&v).expect("errors serialize") + "\n"
}

fn cx(z: Complex64) -> Value {
    json!(format_complex(z))
}

fn ext(p: ExtendedPoint) -> String {
    p.to_string()
}

/// Parses `a,b,c,d` (entries may be complex).
pub fn parse_matrix(text: &str) -> Result<MoebiusTransform> {
    let entries: Vec<Complex64> = text.split(',').map(parse_complex).collect::<Result<_>>()?;
    match entries.as_slice() {
        &[a, b, c, d] => MoebiusTransform::new(a, b, c, d),
        _ => Err(Error::Parse(format!(
            "expected four comma-separated entries, got {text:?}"
        ))),
    }
}

fn form_with_config(name: &str, cfg: &Config) -> Result<Form> {
    Ok(Form::by_name(name)?.with_truncation(cfg.truncation()))
}

/// `eval`: value with a truncation bound. Breach when the bound exceeds
/// `tolerance · max(1, |value|)`.
pub fn cmd_eval(cfg: &Config, form: &str, z: &str) -> Result<Report> {
    let f = form_with_config(form, cfg)?;
    let z = parse_complex(z)?;
    if !(z.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane(format_complex(z)));
    }
    if z.im < cfg.y_min {
        return Err(Error::BelowMinimumHeight {
            im: z.im,
            y_min: cfg.y_min,
        });
    }
    let v = evaluate_with_bound(&f, z)?;
    let ok = v
        .tail_bound
        .is_none_or(|b| b <= cfg.tolerance * v.value.norm().max(1.0));
    let body = json!({
        "form": f.name(),
        "weight": f.weight(),
        "z": cx(z),
        "value": cx(v.value),
        "abs": v.value.norm(),
        "tail_bound": v.tail_bound,
        "terms": v.terms,
    });
    Ok(Report::new(
        "eval",
        Status::from_ok(ok),
        body,
        vec!["form", "z", "value", "tail_bound", "terms"],
    )
    .row(vec![
        f.name().to_string(),
        format_complex(z),
        format_complex(v.value),
        v.tail_bound.map(|b| format!("{b:e}")).unwrap_or_default(),
        v.terms.map(|t| t.to_string()).unwrap_or_default(),
    ]))
}

/// `classify`: class, trace invariant and fixed points.
pub fn cmd_classify(_cfg: &Config, matrix: &str) -> Result<Report> {
    let g = parse_matrix(matrix)?;
    let class = g.classify();
    let fixed = match g.fixed_points() {
        Ok(fps) => fps,
        Err(Error::WholeSphereFixed) => Vec::new(),
        Err(e) => return Err(e),
    };
    let [a, b, c, d] = g.entries();
    let fps: Vec<Value> = fixed
        .iter()
        .map(|fp| {
            json!({
                "point": ext(fp.point),
                "multiplier": cx(fp.multiplier),
                "kind": fp.kind,
            })
        })
        .collect();
    let body = json!({
        "normalized": [cx(a), cx(b), cx(c), cx(d)],
        "class": class.tag,
        "trace_invariant": cx(class.trace_value),
        "fixed_points": fps,
        "whole_sphere_fixed": g.is_identity(),
    });
    let tag = serde_json::to_value(class.tag).expect("tags serialize");
    let points: Vec<String> = fixed.iter().map(|fp| ext(fp.point)).collect();
    Ok(Report::new(
        "classify",
        Status::Ok,
        body,
        vec!["class", "trace_invariant", "fixed_points"],
    )
    .row(vec![
        tag.as_str().unwrap_or_default().to_string(),
        format_complex(class.trace_value),
        points.join(";"),
    ]))
}

/// Functions searchable by `zeros`: registry forms and closed forms by name,
/// or `perturb:RULE` for `j' F'(j) + (iπ/6) E2`.
fn searchable(name: &str, cfg: &Config) -> Result<(Box<dyn Holomorphic>, bool)> {
    if let Some(rule) = name.strip_prefix("perturb:") {
        let rule = PerturbationRule::parse(rule)?;
        return Ok((Box::new(perturbation_function(rule, true)?), true));
    }
    Ok((Box::new(form_with_config(name, cfg)?), false))
}

fn search_report(command: &'static str, function: &str, b: &SearchBox, search: ZeroSearch) -> Result<Report> {
    let partition = classify_equivalence(&search.zeros)?;
    let mut orbit_of = vec![0usize; search.zeros.len()];
    for (k, o) in partition.orbits.iter().enumerate() {
        for &m in &o.members {
            orbit_of[m] = k;
        }
    }
    let ok = search.failures.is_empty() && search.zeros.iter().all(|z| z.certified);
    let zeros: Vec<Value> = search
        .zeros
        .iter()
        .zip(&orbit_of)
        .map(|(z, o)| {
            json!({
                "location": cx(z.location),
                "residual": z.residual,
                "derivative_abs": z.derivative_abs,
                "winding_confirmed": z.winding_confirmed,
                "newton_iters": z.newton_iters,
                "fd_representative": cx(z.fd_representative),
                "reduction_word": z.reduction_word,
                "multiplicity_estimate": z.multiplicity_estimate,
                "fd_derivative_gap": z.fd_derivative_gap,
                "certified": z.certified,
                "orbit": o,
            })
        })
        .collect();
    let orbits: Vec<Value> = partition
        .orbits
        .iter()
        .map(|o| json!({"representative": cx(o.representative), "members": o.members}))
        .collect();
    let failures: Vec<Value> = search
        .failures
        .iter()
        .map(|f| {
            json!({
                "box": [f.search_box.re_min, f.search_box.re_max, f.search_box.im_min, f.search_box.im_max],
                "reason": f.reason,
                "best_point": f.best_point.map(format_complex),
            })
        })
        .collect();
    let body = json!({
        "function": function,
        "box": [b.re_min, b.re_max, b.im_min, b.im_max],
        "total_winding": search.total_winding,
        "truncated": search.truncated,
        "zeros": zeros,
        "orbit_count": partition.orbit_count,
        "orbits": orbits,
        "failures": failures,
    });
    let mut report = Report::new(
        command,
        Status::from_ok(ok),
        body,
        vec!["re", "im", "residual", "certified", "fd_representative", "orbit"],
    );
    for (z, o) in search.zeros.iter().zip(&orbit_of) {
        report = report.row(vec![
            z.location.re.to_string(),
            z.location.im.to_string(),
            format!("{:e}", z.residual),
            z.certified.to_string(),
            format_complex(z.fd_representative),
            o.to_string(),
        ]);
    }
    Ok(report)
}

/// `zeros`: certified zeros in a box with their orbit partition. Breach when
/// a box fails or a zero is not certified.
pub fn cmd_zeros(cfg: &Config, function: &str, search_box: &str, max: usize) -> Result<Report> {
    let b = SearchBox::parse(search_box)?;
    let opts = cfg.finder_options(max);
    let (f, tiled) = searchable(function, cfg)?;
    let search = if tiled {
        find_zeros_tiled(f.as_ref(), &b, 8, 8, &opts)?.search
    } else {
        find_zeros(f.as_ref(), &b, &opts)?
    };
    search_report("zeros", function, &b, search)
}

/// `critical-points`: zeros of `f'`.
pub fn cmd_critical_points(cfg: &Config, function: &str, search_box: &str, max: usize) -> Result<Report> {
    let b = SearchBox::parse(search_box)?;
    let opts = cfg.finder_options(max);
    let f = form_with_config(function, cfg)?;
    let search = find_zeros(&Derivative(f), &b, &opts)?;
    search_report("critical-points", function, &b, search)
}

/// `check-identities`: the catalog (or one entry) at seeded points.
pub fn cmd_check_identities(
    cfg: &Config,
    only: Option<&str>,
    seed: Option<u64>,
    n: Option<usize>,
    doubling: bool,
) -> Result<Report> {
    let checks = match only {
        Some(name) => vec![find_check(name).ok_or_else(|| Error::UnknownForm(format!("identity {name}")))?],
        None => full_catalog(),
    };
    let mut results = Vec::with_capacity(checks.len());
    let mut report_rows = Vec::new();
    let mut all_ok = true;
    for c in checks {
        let plan = SamplePlan {
            n_points: n.unwrap_or(c.sample.n_points),
            seed: seed.unwrap_or(cfg.seed),
            ..c.sample
        };
        let c = c.with_sample(plan);
        let r = run_check(&c, cfg.truncation(), cfg.tolerance);
        let d = doubling.then(|| truncation_doubling(&c, cfg.truncation_override.unwrap_or(40)));
        let ok = r.passed && d.as_ref().is_none_or(|d| d.ok);
        all_ok &= ok;
        report_rows.push(vec![
            r.name.clone(),
            r.n_points.to_string(),
            format!("{:e}", r.max_residual),
            format!("{:e}", r.mean_residual),
            ok.to_string(),
        ]);
        results.push(json!({
            "name": r.name,
            "formula": r.formula,
            "n_points": r.n_points,
            "max_residual": r.max_residual,
            "mean_residual": r.mean_residual,
            "worst_point": r.worst_point.map(format_complex),
            "errors": r.errors.iter().map(|e| json!({"z": cx(e.z), "message": e.message})).collect::<Vec<_>>(),
            "tolerance": r.tolerance,
            "passed": ok,
            "doubling": d.map(|d| json!({
                "truncation": d.truncation,
                "residual": d.residual,
                "doubled_residual": d.doubled_residual,
                "ok": d.ok,
            })),
        }));
    }
    let n_passed = results.iter().filter(|r| r["passed"] == json!(true)).count();
    let body = json!({
        "n_checks": results.len(),
        "n_passed": n_passed,
        "checks": results,
    });
    let mut report = Report::new(
        "check-identities",
        Status::from_ok(all_ok),
        body,
        vec!["name", "n_points", "max_residual", "mean_residual", "passed"],
    );
    report.csv_rows = report_rows;
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct EquivarianceArgs {
    /// A registry name, `z+1` or `identity`.
    pub function: String,
    /// Weight used in `h = z + k f/f'`; defaults to the form's weight.
    pub k: Option<f64>,
    /// `modular` for `{S, T}`, `form` for the generators in the form's
    /// multiplier table.
    pub group: String,
    pub samples: usize,
    pub word_len: usize,
    pub seed: Option<u64>,
    pub tolerance: f64,
}

impl Default for EquivarianceArgs {
    fn default() -> Self {
        let p = SampleParams::default();
        EquivarianceArgs {
            function: "Delta".into(),
            k: None,
            group: "form".into(),
            samples: p.n_samples,
            word_len: p.word_len,
            seed: None,
            tolerance: p.tolerance,
        }
    }
}

/// `equivariance`: chordal deviation of `h(γz)` from `γ h(z)`.
pub fn cmd_equivariance(cfg: &Config, args: &EquivarianceArgs) -> Result<Report> {
    let (h, table) = match args.function.to_ascii_lowercase().as_str() {
        "z+1" | "translate" => (
            EquivariantFunction::custom("z+1", |z| Ok(ExtendedPoint::Finite(z + 1.0))),
            Vec::new(),
        ),
        "identity" | "z" => (EquivariantFunction::Identity, Vec::new()),
        _ => {
            let f = form_with_config(&args.function, cfg)?;
            let k = args.k.unwrap_or(f.weight());
            let table: Vec<Generator> = f
                .multipliers()
                .iter()
                .map(|m| Generator::new(m.generator.clone(), m.element))
                .collect();
            (make_h_f(f, k)?, table)
        }
    };
    let gens = match args.group.as_str() {
        "modular" => Generator::modular(),
        "form" if !table.is_empty() => table,
        "form" => Generator::modular(),
        other => {
            return Err(Error::Parse(format!(
                "unknown group {other:?} (expected modular or form)"
            )))
        }
    };
    let params = SampleParams {
        n_samples: args.samples,
        word_len: args.word_len,
        seed: args.seed.unwrap_or(cfg.seed),
        tolerance: args.tolerance,
        ..SampleParams::default()
    };
    let r = check_equivariance(&h, &gens, &params);
    let worst = r
        .worst_sample
        .as_ref()
        .map(|s| json!({"z": cx(s.z), "word": s.word, "deviation": s.deviation}));
    let body = json!({
        "function": r.label,
        "generators": gens.iter().map(|g| g.name.clone()).collect::<Vec<_>>(),
        "seed": params.seed,
        "n_samples": r.n_samples,
        "n_redrawn": r.n_redrawn,
        "max_dev": r.max_dev,
        "mean_dev": r.mean_dev,
        "n_fail": r.n_fail,
        "tolerance": r.tolerance,
        "worst_sample": worst,
    });
    Ok(Report::new(
        "equivariance",
        Status::from_ok(r.n_fail == 0),
        body,
        vec![
            "function",
            "n_samples",
            "max_dev",
            "mean_dev",
            "n_fail",
            "worst_z",
            "worst_word",
        ],
    )
    .row(vec![
        r.label.clone(),
        r.n_samples.to_string(),
        format!("{:e}", r.max_dev),
        format!("{:e}", r.mean_dev),
        r.n_fail.to_string(),
        r.worst_sample.as_ref().map(|s| format_complex(s.z)).unwrap_or_default(),
        r.worst_sample.as_ref().map(|s| s.word.clone()).unwrap_or_default(),
    ]))
}

/// `reduce`: fundamental-domain representative and the word reaching it.
pub fn cmd_reduce(_cfg: &Config, z: &str) -> Result<Report> {
    let z = parse_complex(z)?;
    let r = reduce_to_fundamental_domain(z)?;
    let [a, b, c, d] = r.word.integer_matrix();
    let body = json!({
        "z": cx(z),
        "z_reduced": cx(r.z_reduced),
        "word": r.word.to_string(),
        "matrix": [a, b, c, d],
    });
    Ok(
        Report::new("reduce", Status::Ok, body, vec!["z", "z_reduced", "word"]).row(vec![
            format_complex(z),
            format_complex(r.z_reduced),
            r.word.to_string(),
        ]),
    )
}

/// `coeffs`: exact coefficients `a_n` of `q^{e} Σ a_n q^n` for `n ≤ N`.
pub fn cmd_coeffs(_cfg: &Config, series: &str, n: usize) -> Result<Report> {
    let s: IntSeries = if series.eq_ignore_ascii_case("j") {
        j_series_exact(n)?
    } else {
        SeriesKind::from_name(series)
            .ok_or_else(|| Error::UnknownForm(series.to_string()))?
            .generate(n)?
    };
    let coeffs: Vec<Value> = s.coeffs.iter().map(|&a| json!(a)).collect();
    let body = json!({
        "series": series,
        "q_exponent_24ths": s.exponent_24,
        "truncation_order": n,
        "coefficients": coeffs,
    });
    let mut report = Report::new("coeffs", Status::Ok, body, vec!["n", "q_exponent", "a_n"]);
    for (k, a) in s.coeffs.iter().enumerate() {
        let e = 24 * k as i64 + s.exponent_24;
        let g = gcd(e.unsigned_abs(), 24) as i64;
        let exponent = if e % 24 == 0 {
            (e / 24).to_string()
        } else {
            format!("{}/{}", e / g, 24 / g)
        };
        report = report.row(vec![k.to_string(), exponent, a.to_string()]);
    }
    Ok(report)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
