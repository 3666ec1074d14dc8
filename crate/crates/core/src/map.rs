//! Grushin maps: Meyerson conjugates of holomorphic expressions, the entire
//! affine family, and sampled maps given on a grid.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{meyerson, meyerson_coord, meyerson_coord_inv, meyerson_inv, Alpha, GrushinPoint, PlanePoint};
use crate::holo::{HoloExpr, PlaneRect};
use crate::jet::HorizontalJet;
use crate::scalar::{abs_pow, signed_pow, Real};
use crate::topology::{Rect, RectilinearDomain};

/// Values of a map on a rectangular grid, interpolated bilinearly.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMap<F> {
    alpha: Alpha<F>,
    xs: Vec<F>,
    ys: Vec<F>,
    /// Row-major, `g1[j * xs.len() + i]` is the value at `(xs[i], ys[j])`.
    g1: Vec<F>,
    g2: Vec<F>,
    domain: RectilinearDomain<F>,
}

impl<F: Real> SampledMap<F> {
    pub fn new(
        alpha: Alpha<F>,
        xs: Vec<F>,
        ys: Vec<F>,
        g1: Vec<F>,
        g2: Vec<F>,
        domain: RectilinearDomain<F>,
    ) -> Result<Self> {
        let increasing = |v: &[F]| v.len() >= 2 && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&xs) || !increasing(&ys) {
            return Err(Error::InvalidParameter("sample axes need at least two strictly increasing values".into()));
        }
        let n = xs.len() * ys.len();
        if g1.len() != n || g2.len() != n {
            return Err(Error::InvalidParameter(format!("expected {n} samples per component")));
        }
        if g1.iter().chain(g2.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("samples must be finite".into()));
        }
        Ok(SampledMap { alpha, xs, ys, g1, g2, domain })
    }

    /// Samples `f` on the tensor grid `xs × ys`.
    pub fn from_fn(
        alpha: Alpha<F>,
        xs: Vec<F>,
        ys: Vec<F>,
        domain: RectilinearDomain<F>,
        f: impl Fn(GrushinPoint<F>) -> Result<GrushinPoint<F>>,
    ) -> Result<Self> {
        let mut g1 = Vec::with_capacity(xs.len() * ys.len());
        let mut g2 = Vec::with_capacity(xs.len() * ys.len());
        for &y in &ys {
            for &x in &xs {
                let q = f(GrushinPoint::new(x, y))?;
                g1.push(q.x);
                g2.push(q.y);
            }
        }
        Self::new(alpha, xs, ys, g1, g2, domain)
    }

    pub fn xs(&self) -> &[F] {
        &self.xs
    }

    pub fn ys(&self) -> &[F] {
        &self.ys
    }

    pub fn domain(&self) -> &RectilinearDomain<F> {
        &self.domain
    }

    /// Value stored at grid node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> GrushinPoint<F> {
        let k = j * self.xs.len() + i;
        GrushinPoint::new(self.g1[k], self.g2[k])
    }

    fn eval(&self, p: GrushinPoint<F>) -> Result<GrushinPoint<F>> {
        let outside = || Error::DomainViolation { x: p.x.as_f64(), y: p.y.as_f64() };
        let i = cell_index(&self.xs, p.x).ok_or_else(outside)?;
        let j = cell_index(&self.ys, p.y).ok_or_else(outside)?;
        let tx = (p.x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        let ty = (p.y - self.ys[j]) / (self.ys[j + 1] - self.ys[j]);
        let lerp = |v: &[F]| {
            let nx = self.xs.len();
            let a = v[j * nx + i] * (F::one() - tx) + v[j * nx + i + 1] * tx;
            let b = v[(j + 1) * nx + i] * (F::one() - tx) + v[(j + 1) * nx + i + 1] * tx;
            a * (F::one() - ty) + b * ty
        };
        Ok(GrushinPoint::new(lerp(&self.g1), lerp(&self.g2)))
    }
}

/// Index `i` with `v[i] <= t <= v[i + 1]`, or `None` outside the grid.
fn cell_index<F: Real>(v: &[F], t: F) -> Option<usize> {
    if !(t >= v[0] && t <= v[v.len() - 1]) {
        return None;
    }
    let i = v.partition_point(|&s| s <= t);
    Some(i.saturating_sub(1).min(v.len() - 2))
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrushinMap<F> {
    /// `φ_α⁻¹ ∘ holo ∘ φ_α`, optionally restricted to a declared domain.
    Conjugated {
        alpha: Alpha<F>,
        holo: HoloExpr<F>,
        domain: Option<RectilinearDomain<F>>,
    },
    /// `(x, y) ↦ (sign(a)|a|^{1/(α+1)} x, a y + b)`.
    EntireAffine {
        alpha: Alpha<F>,
        a: F,
        b: F,
    },
    Sampled(SampledMap<F>),
}

/// Builds the Meyerson conjugate of `expr`.
pub fn conjugate<F: Real>(
    alpha: Alpha<F>,
    expr: HoloExpr<F>,
    domain: Option<RectilinearDomain<F>>,
) -> Result<GrushinMap<F>> {
    expr.validate()?;
    Ok(GrushinMap::Conjugated { alpha, holo: expr, domain })
}

pub fn entire_map<F: Real>(alpha: Alpha<F>, a: F, b: F) -> Result<GrushinMap<F>> {
    if a.is_zero() || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("entire map needs finite a != 0, got a = {a}")));
    }
    Ok(GrushinMap::EntireAffine { alpha, a, b })
}

/// Horizontal scale `sign(a)|a|^{1/(α+1)}` of the entire map with vertical slope `a`.
pub fn entire_scale<F: Real>(alpha: Alpha<F>, a: F) -> F {
    signed_pow(a, alpha.degree().recip())
}

impl<F: Real> GrushinMap<F> {
    pub fn alpha(&self) -> Alpha<F> {
        match self {
            GrushinMap::Conjugated { alpha, .. } | GrushinMap::EntireAffine { alpha, .. } => *alpha,
            GrushinMap::Sampled(s) => s.alpha,
        }
    }

    pub fn identity(alpha: Alpha<F>) -> Self {
        GrushinMap::EntireAffine { alpha, a: F::one(), b: F::zero() }
    }

    pub fn domain(&self) -> Option<&RectilinearDomain<F>> {
        match self {
            GrushinMap::Conjugated { domain, .. } => domain.as_ref(),
            GrushinMap::EntireAffine { .. } => None,
            GrushinMap::Sampled(s) => Some(&s.domain),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GrushinMap::Conjugated { .. } => "conjugated",
            GrushinMap::EntireAffine { .. } => "entire",
            GrushinMap::Sampled(_) => "sampled",
        }
    }

    pub fn eval(&self, p: GrushinPoint<F>) -> Result<GrushinPoint<F>> {
        match self {
            GrushinMap::Conjugated { alpha, holo, domain } => {
                if let Some(d) = domain {
                    if !d.contains_closed(&p.x, &p.y) {
                        return Err(Error::DomainViolation { x: p.x.as_f64(), y: p.y.as_f64() });
                    }
                }
                let (w, _) = holo.eval(meyerson(*alpha, p).to_complex())?;
                Ok(meyerson_inv(*alpha, PlanePoint::from_complex(w)))
            }
            GrushinMap::EntireAffine { alpha, a, b } => {
                Ok(GrushinPoint::new(entire_scale(*alpha, *a) * p.x, *a * p.y + *b))
            }
            GrushinMap::Sampled(s) => s.eval(p),
        }
    }
}

/// Exact jet of a closed-form map.
///
/// For a conjugate, the derivatives come from the holomorphic derivative `f′`
/// at `(x̃, y) = φ_α(x, y)` through the Cauchy–Riemann equations.
pub fn analytic_jet<F: Real>(map: &GrushinMap<F>, p: GrushinPoint<F>) -> Result<HorizontalJet<F>> {
    match map {
        GrushinMap::Conjugated { alpha, holo, domain } => {
            let singular =
                |reason: &str| Error::SingularPoint { x: p.x.as_f64(), y: p.y.as_f64(), reason: reason.into() };
            if p.x.is_zero() {
                return Err(singular("x = 0"));
            }
            if let Some(d) = domain {
                if !d.contains_closed(&p.x, &p.y) {
                    return Err(Error::DomainViolation { x: p.x.as_f64(), y: p.y.as_f64() });
                }
            }
            let (w, d) = holo.eval(Complex::new(meyerson_coord(*alpha, p.x), p.y))?;
            let g1 = meyerson_coord_inv(*alpha, w.re);
            if g1.is_zero() {
                return Err(singular("g1 = 0"));
            }
            let (u_x, v_x) = (d.re, d.im);
            let (u_y, v_y) = (-d.im, d.re);
            let al = alpha.value();
            let ratio = abs_pow(p.x / g1, al);
            let inv_g = abs_pow(g1, -al);
            let wx = alpha.weight(p.x);
            Ok(HorizontalJet {
                g1,
                g2: w.im,
                d_g1_dx: ratio * u_x,
                d_g1_dy: inv_g * u_y,
                d_g2_dx: wx * v_x,
                d_g2_dy: v_y,
            })
        }
        GrushinMap::EntireAffine { alpha, a, b } => {
            let s = entire_scale(*alpha, *a);
            Ok(HorizontalJet {
                g1: s * p.x,
                g2: *a * p.y + *b,
                d_g1_dx: s,
                d_g1_dy: F::zero(),
                d_g2_dx: F::zero(),
                d_g2_dy: *a,
            })
        }
        GrushinMap::Sampled(_) => Err(Error::Unsupported("sampled")),
    }
}

/// `|x|^α / |g₁(x, y)|^α`, the quantity whose limit at the axis is [`ext_boundary`].
pub fn axis_weight_ratio<F: Real>(map: &GrushinMap<F>, p: GrushinPoint<F>) -> Result<F> {
    let q = map.eval(p)?;
    if q.x.is_zero() {
        return Err(Error::SingularPoint { x: p.x.as_f64(), y: p.y.as_f64(), reason: "g1 = 0".into() });
    }
    Ok(abs_pow(p.x / q.x, map.alpha().value()))
}

/// Regular probe grid `{-2, …, 2}²` with step 1/2 used by [`classify_entire`].
pub fn default_probe_grid<F: Real>() -> Vec<GrushinPoint<F>> {
    let mut out = Vec::new();
    for j in 0..9 {
        for i in 0..9 {
            let t = |k: usize| F::lit(-2.0 + 0.5 * k as f64);
            out.push(GrushinPoint::new(t(i), t(j)));
        }
    }
    out
}

/// Recovers `(a, b)` from `g₂` on the axis and checks the entire formula on
/// `probe` with relative tolerance `tol`.
pub fn classify_entire<F: Real>(map: &GrushinMap<F>, probe: &[GrushinPoint<F>], tol: F) -> Result<(F, F)> {
    if let GrushinMap::EntireAffine { a, b, .. } = map {
        return Ok((*a, *b));
    }
    let not_entire = |why: String| Error::NotEntireAffine(why);
    let eval = |p: GrushinPoint<F>| map.eval(p).map_err(|e| not_entire(format!("evaluation failed: {e}")));
    let origin = eval(GrushinPoint::new(F::zero(), F::zero()))?;
    let up = eval(GrushinPoint::new(F::zero(), F::one()))?;
    let a = up.y - origin.y;
    let b = origin.y;
    if a.abs() <= tol {
        return Err(not_entire(format!("recovered a = {a} is zero")));
    }
    let reference = GrushinMap::EntireAffine { alpha: map.alpha(), a, b };
    for &p in probe {
        let got = eval(p)?;
        let want = reference.eval(p)?;
        let err = got.euclid_dist(&want);
        if err > tol * (F::one() + want.x.hypot(want.y)) {
            return Err(not_entire(format!("residual {err} at ({}, {})", p.x, p.y)));
        }
    }
    Ok((a, b))
}

fn as_conjugate<F: Real>(map: &GrushinMap<F>) -> Result<(HoloExpr<F>, Option<RectilinearDomain<F>>)> {
    match map {
        GrushinMap::Conjugated { holo, domain, .. } => Ok((holo.clone(), domain.clone())),
        GrushinMap::EntireAffine { a, b, .. } => Ok((HoloExpr::RealAffine { a: *a, c: *b }, None)),
        GrushinMap::Sampled(_) => Err(Error::Unsupported("sampled")),
    }
}

/// `g ∘ h`. The inner `φ_α ∘ φ_α⁻¹` cancels, so conjugates compose by
/// composing their expressions.
pub fn compose_maps<F: Real>(g: &GrushinMap<F>, h: &GrushinMap<F>) -> Result<GrushinMap<F>> {
    if g.alpha() != h.alpha() {
        return Err(Error::DomainMismatch(format!("alpha differs: {} vs {}", g.alpha().value(), h.alpha().value())));
    }
    let alpha = g.alpha();
    if let (GrushinMap::EntireAffine { a: ag, b: bg, .. }, GrushinMap::EntireAffine { a: ah, b: bh, .. }) = (g, h) {
        return entire_map(alpha, *ag * *ah, *ag * *bh + *bg);
    }
    let (outer, g_domain) = as_conjugate(g)?;
    let (inner, h_domain) = as_conjugate(h)?;
    if let (Some(gd), Some(hd)) = (&g_domain, &h_domain) {
        check_image_inside(h, hd, gd)?;
    }
    Ok(GrushinMap::Conjugated { alpha, holo: HoloExpr::compose(outer, inner), domain: h_domain })
}

/// Spot-checks `h(hd) ⊂ gd` on a 9 × 9 grid per rectangle of `hd`.
fn check_image_inside<F: Real>(h: &GrushinMap<F>, hd: &RectilinearDomain<F>, gd: &RectilinearDomain<F>) -> Result<()> {
    let slack = F::lit(1e-9);
    for r in hd.rects() {
        for j in 0..9 {
            for i in 0..9 {
                let t = |k: usize| F::from_usize(k).unwrap() / F::lit(8.0);
                let p = GrushinPoint::new(r.xmin + (r.xmax - r.xmin) * t(i), r.ymin + (r.ymax - r.ymin) * t(j));
                let q = h.eval(p)?;
                let near = gd.rects().iter().any(|g| {
                    q.x >= g.xmin - slack && q.x <= g.xmax + slack && q.y >= g.ymin - slack && q.y <= g.ymax + slack
                });
                if !near {
                    return Err(Error::DomainMismatch(format!(
                        "inner map sends ({}, {}) to ({}, {}) outside the outer domain",
                        p.x, p.y, q.x, q.y
                    )));
                }
            }
        }
    }
    Ok(())
}

pub fn invert_map<F: Real>(g: &GrushinMap<F>) -> Result<GrushinMap<F>> {
    match g {
        GrushinMap::EntireAffine { alpha, a, b } => entire_map(*alpha, a.recip(), -*b / *a),
        GrushinMap::Conjugated { alpha, holo, domain } => {
            let inverse = holo.inverse()?;
            let domain = match domain {
                None => None,
                Some(d) => {
                    let rects = d
                        .rects()
                        .iter()
                        .map(|r| {
                            let plane = PlaneRect::new(
                                meyerson_coord(*alpha, r.xmin),
                                meyerson_coord(*alpha, r.xmax),
                                r.ymin,
                                r.ymax,
                            )?;
                            let img = holo.image_rect(plane)?;
                            Ok(Rect::new(
                                meyerson_coord_inv(*alpha, img.umin),
                                meyerson_coord_inv(*alpha, img.umax),
                                img.vmin,
                                img.vmax,
                            ))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Some(RectilinearDomain::new(rects)?)
                }
            };
            Ok(GrushinMap::Conjugated { alpha: *alpha, holo: inverse, domain })
        }
        GrushinMap::Sampled(_) => Err(Error::NotInvertibleSymbolically("sampled map".into())),
    }
}

/// `∂g̃₁/∂x(0, y)`, the horizontal derivative of the holomorphic side on the axis.
pub fn axis_derivative<F: Real>(map: &GrushinMap<F>, y: F) -> Result<F> {
    match map {
        GrushinMap::Conjugated { holo, .. } => Ok(holo.eval(Complex::new(F::zero(), y))?.1.re),
        GrushinMap::EntireAffine { a, .. } => Ok(*a),
        GrushinMap::Sampled(_) => Err(Error::Unsupported("sampled")),
    }
}

/// `Ext(0, y) = (1/|∂g̃₁/∂x(0, y)|)^{α/(α+1)}`, the continuous extension of
/// `|x|^α/|g₁|^α` to the axis. A negative derivative (the two half-planes
/// exchanged) enters through its absolute value.
pub fn ext_boundary<F: Real>(map: &GrushinMap<F>, y: F) -> Result<F> {
    let c = axis_derivative(map, y)?;
    if !(c.abs() > F::lit(1e-12)) {
        return Err(Error::DegenerateDerivative { y: y.as_f64(), value: c.as_f64() });
    }
    let alpha = map.alpha();
    Ok(abs_pow(c, -alpha.value() / alpha.degree()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSample {
    pub x: f64,
    pub ratio: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioLimitReport {
    /// `Re f′(i y₀)`.
    pub reference: f64,
    pub samples: Vec<RatioSample>,
    /// Fitted exponent `r` in `error ≈ C ρ^r` from the last two usable samples.
    pub observed_rate: Option<f64>,
    pub converged: bool,
}

/// Evaluates `Re f(x + i y₀) / x` along `xs` and compares with `Re f′(i y₀)`.
pub fn ratio_limit_check<F: Real>(expr: &HoloExpr<F>, y0: F, xs: &[F]) -> RatioLimitReport {
    let reference = match expr.eval(Complex::new(F::zero(), y0)) {
        Ok((_, d)) => d.re,
        Err(_) => F::nan(),
    };
    let samples: Vec<RatioSample> = xs
        .iter()
        .map(|&x| {
            let ratio = match expr.eval(Complex::new(x, y0)) {
                Ok((w, _)) if !x.is_zero() => w.re / x,
                _ => F::nan(),
            };
            RatioSample { x: x.as_f64(), ratio: ratio.as_f64(), error: (ratio - reference).abs().as_f64() }
        })
        .collect();
    let floor = 1e-13 * (1.0 + reference.abs().as_f64());
    let usable: Vec<&RatioSample> = samples.iter().filter(|s| s.error.is_finite() && s.error > floor).collect();
    let observed_rate = match usable.as_slice() {
        [.., a, b] if a.x != b.x => Some((b.error / a.error).ln() / (b.x.abs() / a.x.abs()).ln()),
        _ => None,
    };
    let converged = reference.is_finite()
        && samples.last().is_some_and(|s| s.error.is_finite() && s.error <= 1e-8 * (1.0 + reference.abs().as_f64()));
    RatioLimitReport { reference: reference.as_f64(), samples, observed_rate, converged }
}
