//! Zeros of holomorphic functions on rectangles of the upper half-plane.
//!
//! Winding numbers come from summing argument increments of `f` along the
//! boundary, with segments bisected until consecutive values are close. Boxes
//! are quadrisected (off center, so that symmetry axes never become box edges)
//! until each holds at most one zero, then Newton's method refines the zero
//! and a small circle re-certifies it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Derivative, Holomorphic};
use crate::moebius::reduce_to_fundamental_domain;
use crate::qseries::DEFAULT_Y_MIN;

/// Consecutive boundary values may differ by at most this fraction of the
/// smaller modulus, which keeps each argument increment below about 0.3 rad.
const ARG_STEP: f64 = 0.3;

/// Split ratios tried in turn when a quadrant edge passes through a zero.
const SPLIT_RATIOS: [f64; 3] = [0.5173, 0.4709, 0.5417];

/// Outward jitter applied to a box whose boundary meets a zero.
const JITTER: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let b = SearchBox {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        if ![re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite()) || !(re_min < re_max && im_min < im_max) {
            return Err(Error::InvalidBox(format!("{b:?}")));
        }
        if !(im_min > 0.0) {
            return Err(Error::NotInUpperHalfPlane(format!("im_min = {im_min}")));
        }
        Ok(b)
    }

    /// Parses `re_min,re_max,im_min,im_max`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<f64> = text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{text:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            &[a, b, c, d] => Self::new(a, b, c, d),
            _ => Err(Error::Parse(format!("expected four numbers, got {text:?}"))),
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.re_min - margin
            && z.re <= self.re_max + margin
            && z.im >= self.im_min - margin
            && z.im <= self.im_max + margin
    }

    pub fn expanded(&self, by: f64) -> SearchBox {
        SearchBox {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
        }
    }

    /// The four sub-boxes obtained by cutting at the given fractions of the
    /// width and height.
    pub fn quadrants(&self, ratio_re: f64, ratio_im: f64) -> [SearchBox; 4] {
        let xm = self.re_min + ratio_re * self.width();
        let ym = self.im_min + ratio_im * self.height();
        let mk = |a, b, c, d| SearchBox {
            re_min: a,
            re_max: b,
            im_min: c,
            im_max: d,
        };
        [
            mk(self.re_min, xm, self.im_min, ym),
            mk(xm, self.re_max, self.im_min, ym),
            mk(self.re_min, xm, ym, self.im_max),
            mk(xm, self.re_max, ym, self.im_max),
        ]
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

/// Sum of `arg f(b)/f(a)` along the path `t -> path(t)`, `t ∈ [t0, t1]`,
/// starting from `n0` uniform segments and bisecting any segment whose end
/// values are not close.
fn arg_increment<F, P>(f: &F, path: P, t0: f64, t1: f64, n0: usize) -> Result<f64>
where
    F: Holomorphic + ?Sized,
    P: Fn(f64) -> Complex64,
{
    let eval = |t: f64| -> Result<Complex64> {
        let v = f.value(path(t))?;
        if !v.is_finite() {
            return Err(Error::NonFinite(crate::format_complex(path(t))));
        }
        if v.norm() == 0.0 {
            return Err(Error::BoundaryZero);
        }
        Ok(v)
    };
    let min_dt = (t1 - t0) * 1e-12;
    let mut total = 0.0;
    let mut prev_t = t0;
    let mut prev_v = eval(t0)?;
    for i in 1..=n0 {
        let t_end = t0 + (t1 - t0) * i as f64 / n0 as f64;
        let v_end = eval(t_end)?;
        // depth-first bisection of [prev_t, t_end]
        let mut stack = vec![(t_end, v_end)];
        while let Some(&(tb, vb)) = stack.last() {
            if (vb - prev_v).norm() <= ARG_STEP * vb.norm().min(prev_v.norm()) {
                total += (vb / prev_v).arg();
                prev_t = tb;
                prev_v = vb;
                stack.pop();
            } else {
                if tb - prev_t < min_dt {
                    return Err(Error::BoundaryZero);
                }
                let tm = 0.5 * (prev_t + tb);
                stack.push((tm, eval(tm)?));
            }
        }
    }
    Ok(total)
}

fn nodes_per_side(b: &SearchBox) -> usize {
    if b.im_min < 0.1 {
        256
    } else {
        64
    }
}

fn round_winding(total_arg: f64) -> Result<i64> {
    let w = total_arg / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() > 0.25 {
        return Err(Error::NonIntegerWinding(w));
    }
    Ok(r as i64)
}

/// Winding number of `f` around the boundary of exactly this box, without
/// jitter.
fn box_winding<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox) -> Result<i64> {
    let corners = b.corners();
    let n0 = nodes_per_side(b);
    let mut total = 0.0;
    for k in 0..4 {
        let (p, q) = (corners[k], corners[(k + 1) % 4]);
        total += arg_increment(f, |t| p + (q - p) * t, 0.0, 1.0, n0)?;
    }
    round_winding(total)
}

/// Number of zeros of `f` in the box (argument principle). A zero on the
/// boundary triggers up to three outward jitters of `1e-6`.
pub fn winding_count<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox) -> Result<i64> {
    Ok(jittered_winding(f, b)?.1)
}

fn jittered_winding<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox) -> Result<(SearchBox, i64)> {
    let mut last = Error::BoundaryZero;
    for attempt in 0..=3 {
        let trial = b.expanded(JITTER * attempt as f64);
        match box_winding(f, &trial) {
            Ok(w) => return Ok((trial, w)),
            Err(e @ (Error::BoundaryZero | Error::NonIntegerWinding(_))) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Winding number around the circle `|z - center| = radius`.
pub fn circle_winding<F: Holomorphic + ?Sized>(f: &F, center: Complex64, radius: f64) -> Result<i64> {
    let total = arg_increment(
        f,
        |t| center + Complex64::from_polar(radius, 2.0 * PI * t),
        0.0,
        1.0,
        32,
    )?;
    round_winding(total)
}

/// `(1/2πi) ∮ f'/f dz` by the trapezoid rule on the box boundary, doubling
/// the node count until successive values differ by less than `1e-3`.
/// Kept as an independent cross-check of [`winding_count`].
pub fn winding_integral<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox) -> Result<f64> {
    let corners = b.corners();
    let integrate = |n: usize| -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..4 {
            let (p, q) = (corners[k], corners[(k + 1) % 4]);
            let h = (q - p) / n as f64;
            for i in 0..=n {
                let jet = f.jet(p + h * i as f64, 1)?;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                sum += jet.derivative(1) / jet.value() * h * w;
            }
        }
        Ok(sum / Complex64::new(0.0, 2.0 * PI))
    };
    let mut n = 64;
    let mut prev = integrate(n)?;
    while n < 1 << 16 {
        n *= 2;
        let next = integrate(n)?;
        if (next - prev).norm() < 1e-3 {
            return Ok(next.re);
        }
        prev = next;
    }
    Ok(prev.re)
}

#[derive(Clone, Debug, Serialize)]
pub struct FinderOptions {
    pub max_zeros: usize,
    /// Boxes holding one zero are subdivided below this diameter before Newton.
    pub min_diameter: f64,
    pub newton_max_iter: usize,
    pub newton_tol: f64,
    pub dedupe_tol: f64,
    pub certify_radius: f64,
    pub y_min: f64,
}

impl Default for FinderOptions {
    fn default() -> Self {
        FinderOptions {
            max_zeros: 1000,
            min_diameter: 1e-3,
            newton_max_iter: 60,
            newton_tol: 1e-13,
            dedupe_tol: 1e-9,
            certify_radius: 1e-6,
            y_min: DEFAULT_Y_MIN,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroRecord {
    pub location: Complex64,
    /// `|f(location)|`.
    pub residual: f64,
    /// `|f'(location)|` from the series derivative.
    pub derivative_abs: f64,
    /// Winding number on the certification circle.
    pub winding_confirmed: i64,
    pub newton_iters: usize,
    pub fd_representative: Complex64,
    /// Word `γ` with `γ · location = fd_representative`.
    pub reduction_word: String,
    pub multiplicity_estimate: i64,
    /// Relative gap between the series derivative and a central difference.
    pub fd_derivative_gap: f64,
    /// Whether the `|f|/max(1,|f'|) < 1e-9` residual test and the circle
    /// winding both hold.
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailedBox {
    pub search_box: SearchBox,
    pub reason: String,
    pub best_point: Option<Complex64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ZeroSearch {
    pub zeros: Vec<ZeroRecord>,
    pub failures: Vec<FailedBox>,
    /// Winding number of the (possibly jittered) top-level box.
    pub total_winding: i64,
    pub truncated: bool,
}

#[derive(Default)]
struct Partial {
    zeros: Vec<ZeroRecord>,
    failures: Vec<FailedBox>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.zeros.extend(other.zeros);
        self.failures.extend(other.failures);
        self
    }

    fn failure(b: &SearchBox, reason: impl Into<String>, best: Option<Complex64>) -> Partial {
        Partial {
            zeros: vec![],
            failures: vec![FailedBox {
                search_box: *b,
                reason: reason.into(),
                best_point: best,
            }],
        }
    }
}

/// Locates the zeros of `f` in the box. When the box holds more than
/// `max_zeros` zeros the search runs depth first, easiest quadrant first, and
/// stops once `max_zeros` have been refined; `truncated` is then set.
pub fn find_zeros<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox, opts: &FinderOptions) -> Result<ZeroSearch> {
    if b.im_min < opts.y_min {
        return Err(Error::BelowMinimumHeight {
            im: b.im_min,
            y_min: opts.y_min,
        });
    }
    let (top, w) = jittered_winding(f, b)?;
    let partial = if w as usize > opts.max_zeros {
        let mut acc = Partial::default();
        subdivide_limited(f, &top, w, opts, &mut acc);
        acc
    } else {
        subdivide(f, &top, w, opts)
    };
    Ok(finish(partial, w, opts))
}

fn finish(partial: Partial, w: i64, opts: &FinderOptions) -> ZeroSearch {
    let mut zeros = partial.zeros;
    zeros.sort_by(|a, b| {
        a.location
            .im
            .total_cmp(&b.location.im)
            .then(a.location.re.total_cmp(&b.location.re))
    });
    let mut deduped: Vec<ZeroRecord> = Vec::with_capacity(zeros.len());
    for z in zeros {
        if !deduped
            .iter()
            .any(|d| (d.location - z.location).norm() < opts.dedupe_tol)
        {
            deduped.push(z);
        }
    }
    let truncated = w as usize > opts.max_zeros || deduped.len() > opts.max_zeros;
    deduped.truncate(opts.max_zeros);
    let mut failures = partial.failures;
    failures.sort_by(|a, b| {
        (a.search_box.im_min, a.search_box.re_min)
            .partial_cmp(&(b.search_box.im_min, b.search_box.re_min))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    ZeroSearch {
        zeros: deduped,
        failures,
        total_winding: w,
        truncated,
    }
}

/// Splits `b` (winding `w`) into quadrants with consistent winding counts,
/// trying the off-center ratios in turn.
fn split<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox, w: i64) -> std::result::Result<Vec<(SearchBox, i64)>, String> {
    let mut last_reason = String::new();
    for (i, &rx) in SPLIT_RATIOS.iter().enumerate() {
        let ry = SPLIT_RATIOS[(i + 1) % SPLIT_RATIOS.len()];
        let quads = b.quadrants(rx, ry);
        let counts: Vec<Result<i64>> = quads.par_iter().map(|q| box_winding(f, q)).collect();
        let counts: Result<Vec<i64>> = counts.into_iter().collect();
        match counts {
            Ok(c) if c.iter().sum::<i64>() == w => return Ok(quads.into_iter().zip(c).collect()),
            Ok(c) => last_reason = format!("quadrant windings {c:?} do not sum to {w}"),
            Err(e) => last_reason = e.to_string(),
        }
    }
    Err(last_reason)
}

fn subdivide<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox, w: i64, opts: &FinderOptions) -> Partial {
    if w <= 0 {
        return Partial::default();
    }
    if w == 1 && b.diameter() < opts.min_diameter {
        return refine(f, b, 1, opts);
    }
    if b.diameter() < 1e-9 {
        // a multiple zero: the box cannot separate it further
        return refine(f, b, w, opts);
    }
    match split(f, b, w) {
        Ok(children) => children
            .par_iter()
            .map(|(q, cw)| subdivide(f, q, *cw, opts))
            .reduce(Partial::default, Partial::merge),
        Err(reason) => Partial::failure(b, reason, None),
    }
}

/// Sequential variant of [`subdivide`] that stops at `opts.max_zeros` zeros,
/// visiting quadrants with fewer zeros first.
fn subdivide_limited<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox, w: i64, opts: &FinderOptions, acc: &mut Partial) {
    if w <= 0 || acc.zeros.len() >= opts.max_zeros {
        return;
    }
    if w as usize + acc.zeros.len() <= opts.max_zeros {
        let p = subdivide(f, b, w, opts);
        acc.zeros.extend(p.zeros);
        acc.failures.extend(p.failures);
        return;
    }
    if b.diameter() < 1e-9 {
        let p = refine(f, b, w, opts);
        acc.zeros.extend(p.zeros);
        acc.failures.extend(p.failures);
        return;
    }
    match split(f, b, w) {
        Ok(mut children) => {
            children.sort_by_key(|(_, cw)| *cw);
            for (q, cw) in children {
                subdivide_limited(f, &q, cw, opts, acc);
            }
        }
        Err(reason) => acc.failures.push(FailedBox {
            search_box: *b,
            reason,
            best_point: None,
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TiledSearch {
    pub search: ZeroSearch,
    pub rows: usize,
    pub cols: usize,
    /// Tiles whose search completed before `max_zeros` was reached.
    pub tiles_searched: usize,
}

/// Searches a `rows × cols` tiling of the box, top row first, and stops once
/// `max_zeros` zeros are known. Useful when the winding along the lower edge
/// is too large to count.
pub fn find_zeros_tiled<F: Holomorphic + ?Sized>(
    f: &F,
    b: &SearchBox,
    rows: usize,
    cols: usize,
    opts: &FinderOptions,
) -> Result<TiledSearch> {
    if b.im_min < opts.y_min {
        return Err(Error::BelowMinimumHeight {
            im: b.im_min,
            y_min: opts.y_min,
        });
    }
    let (rows, cols) = (rows.max(1), cols.max(1));
    let mut acc = Partial::default();
    let mut total = 0;
    let mut tiles_searched = 0;
    'outer: for r in (0..rows).rev() {
        for c in 0..cols {
            if acc.zeros.len() >= opts.max_zeros {
                break 'outer;
            }
            let tile = SearchBox {
                re_min: b.re_min + b.width() * c as f64 / cols as f64,
                re_max: b.re_min + b.width() * (c + 1) as f64 / cols as f64,
                im_min: b.im_min + b.height() * r as f64 / rows as f64,
                im_max: b.im_min + b.height() * (r + 1) as f64 / rows as f64,
            };
            let (tile, w) = match jittered_winding(f, &tile) {
                Ok(v) => v,
                Err(e) => {
                    acc.failures.push(FailedBox {
                        search_box: tile,
                        reason: e.to_string(),
                        best_point: None,
                    });
                    continue;
                }
            };
            total += w;
            let local = FinderOptions {
                max_zeros: opts.max_zeros - acc.zeros.len(),
                ..opts.clone()
            };
            subdivide_limited(f, &tile, w, &local, &mut acc);
            tiles_searched += 1;
        }
    }
    Ok(TiledSearch {
        search: finish(acc, total, opts),
        rows,
        cols,
        tiles_searched,
    })
}

/// Newton iteration `z -> z - m f/f'`; returns the final point and the
/// iteration count when the step drops below the tolerance.
fn newton<F: Holomorphic + ?Sized>(
    f: &F,
    start: Complex64,
    m: f64,
    b: &SearchBox,
    opts: &FinderOptions,
) -> Option<(Complex64, usize)> {
    let mut z = start;
    let leash = 4.0 * b.diameter().max(1e-6);
    for iter in 1..=opts.newton_max_iter {
        let jet = f.jet(z, 1).ok()?;
        let (v, d) = (jet.value(), jet.derivative(1));
        if v.norm() == 0.0 {
            return Some((z, iter - 1));
        }
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let step = v / d * m;
        z -= step;
        if !z.is_finite() || z.im <= 0.0 || (z - start).norm() > leash {
            return None;
        }
        if step.norm() < opts.newton_tol * z.norm().max(1.0) {
            return Some((z, iter));
        }
    }
    None
}

/// Shrinking-grid minimization of `|f|` over the box.
fn minimize_modulus<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox) -> Option<Complex64> {
    let mut lo = Complex64::new(b.re_min, b.im_min);
    let mut size = Complex64::new(b.width(), b.height());
    let mut best = (f64::INFINITY, b.center());
    for _ in 0..40 {
        for i in 0..=6 {
            for k in 0..=6 {
                let z = lo + Complex64::new(size.re * i as f64 / 6.0, size.im * k as f64 / 6.0);
                if let Ok(v) = f.value(z) {
                    if v.norm() < best.0 {
                        best = (v.norm(), z);
                    }
                }
            }
        }
        size *= 0.5;
        lo = best.1 - size * 0.5;
    }
    best.0.is_finite().then_some(best.1)
}

fn refine<F: Holomorphic + ?Sized>(f: &F, b: &SearchBox, w: i64, opts: &FinderOptions) -> Partial {
    let m = w as f64;
    let margin = 1e-7;
    let accept = |r: Option<(Complex64, usize)>| r.filter(|(z, _)| b.contains(*z, margin));
    let found = accept(newton(f, b.center(), m, b, opts)).or_else(|| {
        let start = minimize_modulus(f, b)?;
        accept(newton(f, start, m, b, opts)).or(Some((start, opts.newton_max_iter)))
    });
    let Some((z, iters)) = found else {
        return Partial::failure(b, "Newton and |f| minimization failed", None);
    };
    match build_record(f, z, iters, opts) {
        Ok(rec) => {
            if !rec.certified && iters >= opts.newton_max_iter {
                let mut p = Partial::failure(b, "Newton did not converge", Some(z));
                p.zeros.push(rec);
                return p;
            }
            Partial {
                zeros: vec![rec],
                failures: vec![],
            }
        }
        Err(e) => Partial::failure(b, e.to_string(), Some(z)),
    }
}

fn build_record<F: Holomorphic + ?Sized>(
    f: &F,
    z: Complex64,
    newton_iters: usize,
    opts: &FinderOptions,
) -> Result<ZeroRecord> {
    let jet = f.jet(z, 1)?;
    let residual = jet.value().norm();
    let derivative = jet.derivative(1);
    let winding = circle_winding(f, z, opts.certify_radius).unwrap_or(0);
    let h = 1e-6 * z.im.min(1.0);
    let fd = (f.value(z + h)? - f.value(z - h)?) / (2.0 * h);
    let fd_derivative_gap = (fd - derivative).norm() / derivative.norm().max(1e-300);
    let reduction = reduce_to_fundamental_domain(z)?;
    let certified = residual < 1e-9 * derivative.norm().max(1.0) && winding >= 1;
    Ok(ZeroRecord {
        location: z,
        residual,
        derivative_abs: derivative.norm(),
        winding_confirmed: winding,
        newton_iters,
        fd_representative: reduction.z_reduced,
        reduction_word: reduction.word.to_string(),
        multiplicity_estimate: winding,
        fd_derivative_gap,
        certified,
    })
}

/// Zeros of `f'`.
pub fn critical_points<F: Holomorphic>(f: F, b: &SearchBox, opts: &FinderOptions) -> Result<ZeroSearch> {
    find_zeros(&Derivative(f), b, opts)
}

/// Orbit tolerance for fundamental-domain representatives.
pub const ORBIT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub representative: Complex64,
    /// Indices into the input list.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Partition {
    pub orbit_count: usize,
    pub orbits: Vec<Orbit>,
}

/// Whether two fundamental-domain representatives describe the same orbit,
/// allowing for the identifications on the boundary (`Re = ±1/2` under `T`,
/// the unit circle under `S`) that rounding can leave on either side.
fn same_orbit(a: Complex64, b: Complex64, tol: f64) -> bool {
    let s = -a.inv();
    [a, a + 1.0, a - 1.0, s, s + 1.0, s - 1.0]
        .iter()
        .any(|x| (x - b).norm() < tol)
}

/// Groups points into PSL(2,Z)-orbits.
pub fn classify_points(points: &[Complex64], tol: f64) -> Result<Partition> {
    let mut orbits: Vec<Orbit> = Vec::new();
    for (i, &z) in points.iter().enumerate() {
        let r = reduce_to_fundamental_domain(z)?.z_reduced;
        match orbits.iter_mut().find(|o| same_orbit(o.representative, r, tol)) {
            Some(o) => o.members.push(i),
            None => orbits.push(Orbit {
                representative: r,
                members: vec![i],
            }),
        }
    }
    Ok(Partition {
        orbit_count: orbits.len(),
        orbits,
    })
}

/// Groups zeros into PSL(2,Z)-orbits by their fundamental-domain representatives.
pub fn classify_equivalence(zeros: &[ZeroRecord]) -> Result<Partition> {
    let points: Vec<Complex64> = zeros.iter().map(|z| z.location).collect();
    classify_points(&points, ORBIT_TOL)
}

/// Threshold below which a Ramanujan partner value is inconclusive.
pub const SIMPLICITY_THRESHOLD: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct Simplicity {
    pub simple: bool,
    pub partner_abs: f64,
}

/// A zero `z0` of `f` is simple when a partner function that is a nonzero
/// multiple of `f'(z0)` there is bounded away from zero: `E_4` for `E_2`,
/// `E_6` for `E_4'`, `E_4^2` for `E_6'`, by the Ramanujan identities.
pub fn simplicity_check<P: Holomorphic + ?Sized>(location: Complex64, partner: &P) -> Result<Simplicity> {
    let v = partner.value(location)?;
    Ok(Simplicity {
        simple: v.norm() > SIMPLICITY_THRESHOLD,
        partner_abs: v.norm(),
    })
}
