//! Numerical conformality checks for candidate Grushin maps.
//!
//! A map passes when, on a grid of regular points, `W̄g` vanishes, `D_α g`
//! has positive determinant and rotation form, `{g₁ = 0}` coincides with the
//! singular line inside the domain, the domain and its image meet the axis in
//! the same number of components, and `D_α g` has a finite nonzero limit at
//! the axis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Alpha, GrushinPoint};
use crate::jet::{d_alpha_matrix, wirtinger, DAlphaMatrix, HorizontalJet};
use crate::map::{analytic_jet, axis_derivative, ext_boundary, GrushinMap, SampledMap};
use crate::scalar::Real;
use crate::topology::{axis_components, Rect, RectilinearDomain};

/// Pass threshold on `|W̄g| / max(1, |Wg|)` for analytic jets.
pub const ANALYTIC_TOL: f64 = 1e-10;
/// Pass threshold on `|W̄g| / max(1, |Wg|)` for finite-difference jets.
pub const FD_TOL: f64 = 1e-5;
/// Smallest admissible norm of the limit of `D_α g` at the axis.
pub const LIMIT_NORM_TOL: f64 = 1e-8;
/// Two images closer than this count as a collision unless their sources are too.
pub const INJECTIVITY_TOL: f64 = 1e-9;
/// Exponents `k` of the probe abscissae `x = ±10^{-k}` for the axis limit.
pub const LIMIT_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JetSource {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitStatus {
    FiniteNonzero,
    Vanishing,
    Divergent,
    Untested,
}

/// Limit of `D_α g` along `x → 0` for one axis component of the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisLimit {
    pub y_min: f64,
    pub y_max: f64,
    pub status: LimitStatus,
    /// Norm of the reference limit `Ext · ∂g̃₁/∂x · I` at the probe heights.
    pub limit_norm: Option<f64>,
    /// Largest `‖D_α g − limit‖` at the innermost probe abscissa.
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    WbarResidual,
    Orientation,
    RotationForm,
    ZeroSetDiscrepancy,
    AxisComponentCount,
    LimitCondition,
    Injectivity,
    NoRegularPoints,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reasons", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail(Vec<FailReason>),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalityReport {
    pub jet_source: JetSource,
    pub regular_points: usize,
    /// Points skipped because `g₁` vanished or the map could not be evaluated.
    pub skipped_points: usize,
    pub max_wbar_abs: f64,
    /// `max |W̄g| / max(1, |Wg|)`.
    pub max_wbar_residual: f64,
    pub wbar_tolerance: f64,
    pub min_det_dalpha: f64,
    /// `max (|m11 − m22| + |m12 + m21|) / ‖D_α g‖`.
    pub max_rotation_defect: f64,
    pub zero_set_discrepancy: f64,
    pub zero_set_tolerance: f64,
    pub axis_component_count_source: usize,
    pub axis_component_count_image: usize,
    pub limit_condition: Vec<AxisLimit>,
    pub injectivity_violations: usize,
    /// `Some(true)` when the map sends `{x > 0}` to `{x < 0}` and back.
    pub side_swap: Option<bool>,
    pub verdict: Verdict,
}

struct Accum {
    regular: usize,
    skipped: usize,
    max_wbar_abs: f64,
    max_wbar_residual: f64,
    min_det: f64,
    max_rotation: f64,
    sides: [[bool; 2]; 2],
    samples: Vec<(GrushinPoint<f64>, GrushinPoint<f64>)>,
}

impl Accum {
    fn new() -> Self {
        Accum {
            regular: 0,
            skipped: 0,
            max_wbar_abs: 0.0,
            max_wbar_residual: 0.0,
            min_det: f64::INFINITY,
            max_rotation: 0.0,
            sides: [[false; 2]; 2],
            samples: Vec::new(),
        }
    }

    fn record<F: Real>(&mut self, alpha: Alpha<F>, jet: &HorizontalJet<F>, p: GrushinPoint<F>) {
        if !jet.is_finite() {
            self.skipped += 1;
            return;
        }
        let dm = match d_alpha_matrix(alpha, jet, p) {
            Ok(m) => m,
            Err(_) => {
                self.skipped += 1;
                return;
            }
        };
        let (w, wbar) = wirtinger(alpha, jet, p);
        let wbar_abs = wbar.norm().as_f64();
        self.regular += 1;
        self.max_wbar_abs = self.max_wbar_abs.max(wbar_abs);
        self.max_wbar_residual = self.max_wbar_residual.max(wbar_abs / w.norm().as_f64().max(1.0));
        self.min_det = self.min_det.min(dm.det().as_f64());
        let norm = dm.norm().as_f64();
        if norm > 0.0 {
            self.max_rotation = self.max_rotation.max(dm.rotation_defect().as_f64() / norm);
        }
        let src_right = p.x > F::zero();
        let img_right = jet.g1 > F::zero();
        self.sides[usize::from(src_right)][usize::from(img_right)] = true;
        self.samples.push((to64(p), GrushinPoint::new(jet.g1.as_f64(), jet.g2.as_f64())));
    }
}

fn to64<F: Real>(p: GrushinPoint<F>) -> GrushinPoint<f64> {
    GrushinPoint::new(p.x.as_f64(), p.y.as_f64())
}

fn lin<F: Real>(lo: F, hi: F, k: usize, n: usize) -> F {
    lo + (hi - lo) * F::from_usize(k).unwrap() / F::from_usize(n).unwrap()
}

/// Rectangles of `domain` cut along `x = 0`, so cell centers never sit on the axis.
fn split_at_axis<F: Real>(domain: &RectilinearDomain<F>) -> Vec<Rect<F>> {
    let mut out = Vec::new();
    for r in domain.rects() {
        if r.xmin < F::zero() && r.xmax > F::zero() {
            out.push(Rect::new(r.xmin, F::zero(), r.ymin, r.ymax));
            out.push(Rect::new(F::zero(), r.xmax, r.ymin, r.ymax));
        } else {
            out.push(r.clone());
        }
    }
    out
}

/// Runs every conformality check on `map` over `domain`.
///
/// Closed-form maps are probed at the centers of a `resolution × resolution`
/// cell grid in each rectangle (split at the axis) with analytic jets. Sampled
/// maps are probed at their own interior nodes with second-order central
/// differences, and their axis limit is reported as untested.
pub fn verify_conformal<F: Real>(
    alpha: Alpha<F>,
    map: &GrushinMap<F>,
    domain: &RectilinearDomain<F>,
    resolution: usize,
) -> Result<ConformalityReport> {
    if map.alpha() != alpha {
        return Err(Error::DomainMismatch(format!(
            "map has alpha = {}, verification requested for {}",
            map.alpha().value(),
            alpha.value()
        )));
    }
    let mut acc = Accum::new();
    let jet_source;
    let cells: Vec<[GrushinPoint<F>; 8]>;
    let zero_set_tolerance;
    let rows;
    match map {
        GrushinMap::Sampled(s) => {
            check_sample_density(s, domain)?;
            jet_source = JetSource::FiniteDifference;
            sampled_jets(alpha, s, domain, &mut acc);
            cells = sampled_cells(s, domain);
            rows = sampled_rows(s, domain);
            let step = s.xs().windows(2).map(|w| (w[1] - w[0]).as_f64()).fold(0.0, f64::max);
            zero_set_tolerance = 0.5 * step;
        }
        _ => {
            if resolution < 4 {
                return Err(Error::GridTooCoarse(format!("resolution {resolution} is below 4 samples per rectangle")));
            }
            jet_source = JetSource::Analytic;
            let mut cs = Vec::new();
            for piece in split_at_axis(domain) {
                for j in 0..resolution {
                    for i in 0..resolution {
                        let x0 = lin(piece.xmin, piece.xmax, i, resolution);
                        let x1 = lin(piece.xmin, piece.xmax, i + 1, resolution);
                        let y0 = lin(piece.ymin, piece.ymax, j, resolution);
                        let y1 = lin(piece.ymin, piece.ymax, j + 1, resolution);
                        let half = F::lit(0.5);
                        let c = GrushinPoint::new(half * (x0 + x1), half * (y0 + y1));
                        match analytic_jet(map, c) {
                            Ok(jet) => acc.record(alpha, &jet, c),
                            Err(_) => acc.skipped += 1,
                        }
                        let (xm, ym) = (c.x, c.y);
                        cs.push([
                            GrushinPoint::new(x0, y0),
                            GrushinPoint::new(xm, y0),
                            GrushinPoint::new(x1, y0),
                            GrushinPoint::new(x1, ym),
                            GrushinPoint::new(x1, y1),
                            GrushinPoint::new(xm, y1),
                            GrushinPoint::new(x0, y1),
                            GrushinPoint::new(x0, ym),
                        ]);
                    }
                }
            }
            cells = cs;
            rows = analytic_rows(domain, resolution);
            let width = domain.bounding_box();
            zero_set_tolerance = 1e-9 * (1.0 + (width.xmax - width.xmin).as_f64());
        }
    }

    let zero_set_discrepancy = zero_set_gap(map, domain, &rows, jet_source);
    let source_axis = axis_components(domain).len();
    let image_axis = image_axis_count(map, &cells);
    let limit_condition = match map {
        GrushinMap::Sampled(_) => axis_components(domain)
            .intervals
            .iter()
            .map(|(lo, hi)| AxisLimit {
                y_min: lo.as_f64(),
                y_max: hi.as_f64(),
                status: LimitStatus::Untested,
                limit_norm: None,
                deviation: None,
            })
            .collect(),
        _ => axis_limits(alpha, map, domain),
    };
    let injectivity_violations = injectivity_violations(&mut acc.samples);
    let side_swap = match acc.sides {
        [[true, false], [false, true]] | [[true, false], [false, false]] | [[false, false], [false, true]] => {
            Some(false)
        }
        [[false, true], [true, false]] | [[false, true], [false, false]] | [[false, false], [true, false]] => {
            Some(true)
        }
        _ => None,
    };

    let (wbar_tol, rotation_tol) = match jet_source {
        JetSource::Analytic => (ANALYTIC_TOL, 1e-8),
        JetSource::FiniteDifference => (FD_TOL, 1e-4),
    };
    let mut reasons = Vec::new();
    if acc.regular == 0 {
        reasons.push(FailReason::NoRegularPoints);
    }
    if acc.max_wbar_residual > wbar_tol {
        reasons.push(FailReason::WbarResidual);
    }
    if acc.regular > 0 && !(acc.min_det > 0.0) {
        reasons.push(FailReason::Orientation);
    }
    if acc.max_rotation > rotation_tol {
        reasons.push(FailReason::RotationForm);
    }
    let zero_set_ok = zero_set_discrepancy <= zero_set_tolerance;
    if !zero_set_ok {
        reasons.push(FailReason::ZeroSetDiscrepancy);
    } else {
        if source_axis != image_axis {
            reasons.push(FailReason::AxisComponentCount);
        }
        if limit_condition.iter().any(|l| matches!(l.status, LimitStatus::Vanishing | LimitStatus::Divergent)) {
            reasons.push(FailReason::LimitCondition);
        }
    }
    if injectivity_violations > 0 {
        reasons.push(FailReason::Injectivity);
    }
    let verdict = if reasons.is_empty() { Verdict::Pass } else { Verdict::Fail(reasons) };

    Ok(ConformalityReport {
        jet_source,
        regular_points: acc.regular,
        skipped_points: acc.skipped,
        max_wbar_abs: acc.max_wbar_abs,
        max_wbar_residual: acc.max_wbar_residual,
        wbar_tolerance: wbar_tol,
        min_det_dalpha: if acc.regular > 0 { acc.min_det } else { f64::NAN },
        max_rotation_defect: acc.max_rotation,
        zero_set_discrepancy,
        zero_set_tolerance,
        axis_component_count_source: source_axis,
        axis_component_count_image: image_axis,
        limit_condition,
        injectivity_violations,
        side_swap,
        verdict,
    })
}

fn check_sample_density<F: Real>(s: &SampledMap<F>, domain: &RectilinearDomain<F>) -> Result<()> {
    for (k, r) in domain.rects().iter().enumerate() {
        let nx = s.xs().iter().filter(|&&x| x >= r.xmin && x <= r.xmax).count();
        let ny = s.ys().iter().filter(|&&y| y >= r.ymin && y <= r.ymax).count();
        if nx * ny < 4 || nx < 2 || ny < 2 {
            return Err(Error::GridTooCoarse(format!(
                "rectangle {k} contains {nx} × {ny} sample nodes, need at least 2 × 2"
            )));
        }
    }
    Ok(())
}

/// Second-order derivative on a nonuniform grid from three neighbouring values.
fn central<F: Real>(hm: F, hp: F, fm: F, f0: F, fp: F) -> F {
    (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hm * hp * (hm + hp))
}

fn sampled_jets<F: Real>(alpha: Alpha<F>, s: &SampledMap<F>, domain: &RectilinearDomain<F>, acc: &mut Accum) {
    let (xs, ys) = (s.xs(), s.ys());
    for j in 1..ys.len().saturating_sub(1) {
        for i in 1..xs.len().saturating_sub(1) {
            let p = GrushinPoint::new(xs[i], ys[j]);
            if p.x.is_zero() || !domain.contains(&p.x, &p.y) {
                continue;
            }
            let neighbours = [(xs[i - 1], ys[j]), (xs[i + 1], ys[j]), (xs[i], ys[j - 1]), (xs[i], ys[j + 1])];
            if !neighbours.iter().all(|(x, y)| domain.contains_closed(x, y)) {
                continue;
            }
            let (hm, hp) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
            let (km, kp) = (ys[j] - ys[j - 1], ys[j + 1] - ys[j]);
            let c = s.node(i, j);
            let (w, e, south, north) = (s.node(i - 1, j), s.node(i + 1, j), s.node(i, j - 1), s.node(i, j + 1));
            let jet = HorizontalJet {
                g1: c.x,
                g2: c.y,
                d_g1_dx: central(hm, hp, w.x, c.x, e.x),
                d_g1_dy: central(km, kp, south.x, c.x, north.x),
                d_g2_dx: central(hm, hp, w.y, c.y, e.y),
                d_g2_dy: central(km, kp, south.y, c.y, north.y),
            };
            acc.record(alpha, &jet, p);
        }
    }
}

/// Sample cells inside the domain, as the eight boundary points used for
/// image bounding boxes (corners only; the interpolant is bilinear).
fn sampled_cells<F: Real>(s: &SampledMap<F>, domain: &RectilinearDomain<F>) -> Vec<[GrushinPoint<F>; 8]> {
    let (xs, ys) = (s.xs(), s.ys());
    let mut out = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            let half = F::lit(0.5);
            let (cx, cy) = (half * (xs[i] + xs[i + 1]), half * (ys[j] + ys[j + 1]));
            if !domain.contains(&cx, &cy) {
                continue;
            }
            let a = GrushinPoint::new(xs[i], ys[j]);
            let b = GrushinPoint::new(xs[i + 1], ys[j]);
            let c = GrushinPoint::new(xs[i + 1], ys[j + 1]);
            let d = GrushinPoint::new(xs[i], ys[j + 1]);
            out.push([a, b, b, c, c, d, d, a]);
        }
    }
    out
}

/// Number of axis components of the union of bounding boxes of the images of
/// the cells.
fn image_axis_count<F: Real>(map: &GrushinMap<F>, cells: &[[GrushinPoint<F>; 8]]) -> usize {
    let mut boxes = Vec::with_capacity(cells.len());
    for cell in cells {
        let images: Option<Vec<GrushinPoint<f64>>> = cell.iter().map(|&p| map.eval(p).ok().map(to64)).collect();
        let Some(images) = images else { continue };
        if images.iter().any(|q| !q.is_finite()) {
            continue;
        }
        let mut b = Rect::new(images[0].x, images[0].x, images[0].y, images[0].y);
        for q in &images[1..] {
            b.xmin = b.xmin.min(q.x);
            b.xmax = b.xmax.max(q.x);
            b.ymin = b.ymin.min(q.y);
            b.ymax = b.ymax.max(q.y);
        }
        boxes.push(b);
    }
    if boxes.is_empty() {
        return 0;
    }
    axis_components(&RectilinearDomain::from_rects_unchecked(boxes)).len()
}

/// Heights at which horizontal cross-sections are scanned for zeros of `g₁`.
fn analytic_rows<F: Real>(domain: &RectilinearDomain<F>, resolution: usize) -> Vec<F> {
    let mut rows = Vec::new();
    for r in domain.rects() {
        for j in 0..resolution {
            rows.push(
                r.ymin
                    + (r.ymax - r.ymin) * (F::from_usize(j).unwrap() + F::lit(0.5))
                        / F::from_usize(resolution).unwrap(),
            );
        }
    }
    rows
}

fn sampled_rows<F: Real>(s: &SampledMap<F>, domain: &RectilinearDomain<F>) -> Vec<F> {
    let bb = domain.bounding_box();
    s.ys().iter().copied().filter(|&y| y > bb.ymin && y < bb.ymax).collect()
}

/// Closed `x`-intervals of the domain's cross-section at height `y`, merged.
fn cross_section<F: Real>(domain: &RectilinearDomain<F>, y: F) -> Vec<(F, F)> {
    let mut iv: Vec<(F, F)> =
        domain.rects().iter().filter(|r| r.ymin < y && y < r.ymax).map(|r| (r.xmin, r.xmax)).collect();
    iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut merged: Vec<(F, F)> = Vec::new();
    for (lo, hi) in iv {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Hausdorff distance between detected zeros of `g₁` and the axis, taken per
/// cross-section and maximised. When exactly one of the two sets is empty on
/// a cross-section the gap is the cross-section's width.
fn zero_set_gap<F: Real>(map: &GrushinMap<F>, domain: &RectilinearDomain<F>, rows: &[F], source: JetSource) -> f64 {
    let mut worst = 0.0_f64;
    for &y in rows {
        for (lo, hi) in cross_section(domain, y) {
            let axis_inside = lo < F::zero() && F::zero() < hi;
            let zeros = match (source, map) {
                (JetSource::FiniteDifference, GrushinMap::Sampled(s)) => sampled_zeros(s, y, lo, hi),
                _ => scanned_zeros(map, y, lo, hi),
            };
            let width = (hi - lo).as_f64();
            let gap = match (zeros.is_empty(), axis_inside) {
                (true, false) => 0.0,
                (true, true) | (false, false) => width,
                (false, true) => zeros.iter().map(|z| z.abs()).fold(0.0, f64::max),
            };
            worst = worst.max(gap);
        }
    }
    worst
}

fn scanned_zeros<F: Real>(map: &GrushinMap<F>, y: F, lo: F, hi: F) -> Vec<f64> {
    let n = 256;
    let mut xs: Vec<F> = (0..=n).map(|k| lin(lo, hi, k, n)).collect();
    if lo < F::zero() && F::zero() < hi {
        xs.push(F::zero());
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    }
    let g1 = |x: F| map.eval(GrushinPoint::new(x, y)).ok().map(|q| q.x).filter(|v| v.is_finite());
    let vals: Vec<Option<F>> = xs.iter().map(|&x| g1(x)).collect();
    let mut zeros = Vec::new();
    for k in 0..xs.len() {
        if let Some(v) = vals[k] {
            if v.is_zero() {
                zeros.push(xs[k].as_f64());
                continue;
            }
        }
        if k + 1 < xs.len() {
            if let (Some(a), Some(b)) = (vals[k], vals[k + 1]) {
                if !a.is_zero() && !b.is_zero() && (a < F::zero()) != (b < F::zero()) {
                    zeros.push(bisect(&g1, xs[k], xs[k + 1], a).as_f64());
                }
            }
        }
    }
    zeros
}

fn bisect<F: Real>(g: &impl Fn(F) -> Option<F>, mut a: F, mut b: F, mut ga: F) -> F {
    for _ in 0..200 {
        let m = F::lit(0.5) * (a + b);
        if m <= a || m >= b {
            break;
        }
        match g(m) {
            Some(v) if v.is_zero() => return m,
            Some(v) if (v < F::zero()) == (ga < F::zero()) => {
                a = m;
                ga = v;
            }
            Some(_) => b = m,
            None => break,
        }
    }
    F::lit(0.5) * (a + b)
}

fn sampled_zeros<F: Real>(s: &SampledMap<F>, y: F, lo: F, hi: F) -> Vec<f64> {
    let Some(j) = s.ys().iter().position(|&v| v == y) else { return Vec::new() };
    let xs = s.xs();
    let mut zeros = Vec::new();
    for i in 0..xs.len() {
        if xs[i] < lo || xs[i] > hi {
            continue;
        }
        let a = s.node(i, j).x;
        if a.is_zero() {
            zeros.push(xs[i].as_f64());
            continue;
        }
        if i + 1 < xs.len() && xs[i + 1] <= hi {
            let b = s.node(i + 1, j).x;
            if !b.is_zero() && (a < F::zero()) != (b < F::zero()) {
                let t = a / (a - b);
                zeros.push((xs[i] + t * (xs[i + 1] - xs[i])).as_f64());
            }
        }
    }
    zeros
}

/// Reference limit `sign(c)|c|^{1/(α+1)} I = Ext · c · I`, with `c = ∂g̃₁/∂x(0, y)`.
fn reference_limit<F: Real>(map: &GrushinMap<F>, y: F) -> Result<DAlphaMatrix<F>> {
    let c = axis_derivative(map, y)?;
    let s = match ext_boundary(map, y) {
        Ok(ext) => ext * c,
        Err(Error::DegenerateDerivative { .. }) => F::zero(),
        Err(e) => return Err(e),
    };
    Ok(DAlphaMatrix { m11: s, m12: F::zero(), m21: F::zero(), m22: s })
}

fn axis_limits<F: Real>(alpha: Alpha<F>, map: &GrushinMap<F>, domain: &RectilinearDomain<F>) -> Vec<AxisLimit> {
    axis_components(domain)
        .intervals
        .iter()
        .map(|&(lo, hi)| {
            let mut status = None::<LimitStatus>;
            let mut limit_norm: Option<f64> = None;
            let mut deviation: Option<f64> = None;
            for frac in [0.25, 0.5, 0.75] {
                let y = lo + (hi - lo) * F::lit(frac);
                let Ok(reference) = reference_limit(map, y) else { continue };
                let ref_norm = reference.norm().as_f64();
                for sign in [-1.0, 1.0] {
                    let xs: Vec<F> = LIMIT_EXPONENTS.map(|k| F::lit(sign * 10f64.powi(-k))).collect();
                    if !xs.iter().all(|x| domain.contains(x, &y)) {
                        continue;
                    }
                    let mats: Vec<Option<DAlphaMatrix<F>>> = xs
                        .iter()
                        .map(|&x| {
                            let p = GrushinPoint::new(x, y);
                            analytic_jet(map, p).ok().and_then(|j| d_alpha_matrix(alpha, &j, p).ok())
                        })
                        .collect();
                    let s = classify_limit(&mats, &reference);
                    let last_dev = mats.last().cloned().flatten().map(|m| m.sub(&reference).norm().as_f64());
                    limit_norm = Some(limit_norm.map_or(ref_norm, |v: f64| v.min(ref_norm)));
                    if let Some(d) = last_dev {
                        deviation = Some(deviation.map_or(d, |v: f64| v.max(d)));
                    }
                    status = Some(match status {
                        None => s,
                        Some(prev) => worse(prev, s),
                    });
                }
            }
            AxisLimit {
                y_min: lo.as_f64(),
                y_max: hi.as_f64(),
                status: status.unwrap_or(LimitStatus::Untested),
                limit_norm,
                deviation,
            }
        })
        .collect()
}

fn worse(a: LimitStatus, b: LimitStatus) -> LimitStatus {
    let rank = |s: LimitStatus| match s {
        LimitStatus::FiniteNonzero => 0,
        LimitStatus::Untested => 1,
        LimitStatus::Vanishing => 2,
        LimitStatus::Divergent => 3,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn classify_limit<F: Real>(mats: &[Option<DAlphaMatrix<F>>], reference: &DAlphaMatrix<F>) -> LimitStatus {
    let Some(norms) =
        mats.iter().map(|m| m.filter(|m| m.is_finite()).map(|m| m.norm().as_f64())).collect::<Option<Vec<f64>>>()
    else {
        return LimitStatus::Divergent;
    };
    let last = mats.last().unwrap().unwrap();
    let last_norm = *norms.last().unwrap();
    let ref_norm = reference.norm().as_f64();
    if last_norm > 1e8 || (last_norm > 10.0 * norms[0] && last_norm > 1.0) {
        return LimitStatus::Divergent;
    }
    if ref_norm < LIMIT_NORM_TOL || last_norm < LIMIT_NORM_TOL {
        return LimitStatus::Vanishing;
    }
    let dev = last.sub(reference).norm().as_f64();
    if dev <= 1e-6 * (1.0 + ref_norm) {
        LimitStatus::FiniteNonzero
    } else {
        LimitStatus::Divergent
    }
}

/// Pairs of probe points whose images lie within [`INJECTIVITY_TOL`] while
/// the points themselves do not.
fn injectivity_violations(samples: &mut [(GrushinPoint<f64>, GrushinPoint<f64>)]) -> usize {
    samples.sort_by(|a, b| a.1.x.partial_cmp(&b.1.x).unwrap_or(std::cmp::Ordering::Equal));
    let mut count = 0;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if samples[j].1.x - samples[i].1.x > INJECTIVITY_TOL {
                break;
            }
            if samples[i].1.euclid_dist(&samples[j].1) <= INJECTIVITY_TOL
                && samples[i].0.euclid_dist(&samples[j].0) > INJECTIVITY_TOL
            {
                count += 1;
            }
        }
    }
    count
}
