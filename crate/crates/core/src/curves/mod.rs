//! Curves in the Grushin plane and their Carnot–Carathéodory lengths.
//!
//! The length of `γ = (γ₁, γ₂)` is `∫ √(γ₁′² + γ₂′²/|γ₁|^{2α}) dt`, which is
//! singular wherever the curve meets the axis `{x = 0}`.

mod admissibility;
mod distortion;
mod geodesic;
mod length;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Alpha, GrushinPoint};
use crate::scalar::{abs_pow, Real};

pub use admissibility::{admissibility_check, AdmissibilityReport, AdmissibilityVerdict, RefinementTrend};
pub use distortion::{length_distortion, pushforward, DistortionReport};
pub use geodesic::{cc_distance_upper, GeodesicResult, SOLVER_REL_TOL};
pub use length::{grushin_length, LengthResult};

type CurveFn<F> = Arc<dyn Fn(F) -> GrushinPoint<F> + Send + Sync>;

#[derive(Clone)]
pub enum CurveRepr<F> {
    ClosedForm {
        position: CurveFn<F>,
        derivative: CurveFn<F>,
    },
    /// Piecewise linear through `points[k]` at parameter `params[k]`.
    Polyline {
        params: Vec<F>,
        points: Vec<GrushinPoint<F>>,
    },
}

#[derive(Clone)]
pub struct ParamCurve<F> {
    a: F,
    b: F,
    repr: CurveRepr<F>,
}

impl<F: Real> fmt::Debug for ParamCurve<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            CurveRepr::ClosedForm { .. } => write!(f, "ParamCurve::ClosedForm[{}, {}]", self.a, self.b),
            CurveRepr::Polyline { points, .. } => {
                f.debug_struct("ParamCurve::Polyline").field("points", points).finish()
            }
        }
    }
}

/// Number of random parameters at which a closed-form derivative is probed.
const DERIVATIVE_PROBES: usize = 16;

impl<F: Real> ParamCurve<F> {
    /// Closed-form curve on `[a, b]`. The supplied derivative is compared with
    /// central differences at 16 pseudo-random parameters.
    pub fn closed_form(
        a: F,
        b: F,
        position: impl Fn(F) -> GrushinPoint<F> + Send + Sync + 'static,
        derivative: impl Fn(F) -> GrushinPoint<F> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidCurve(format!("parameter interval [{a}, {b}] must satisfy a < b")));
        }
        let h = (b - a) * F::lit(1e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(0x6772_7573);
        for _ in 0..DERIVATIVE_PROBES {
            let s: f64 = rng.gen_range(0.0..1.0);
            let t = a + h + (b - a - h - h) * F::lit(s);
            let (pm, p0, pp) = (position(t - h), position(t), position(t + h));
            if !(pm.is_finite() && p0.is_finite() && pp.is_finite()) {
                return Err(Error::InvalidCurve(format!("position is not finite near t = {t}")));
            }
            let d = derivative(t);
            let two_h = h + h;
            let (fx, fy) = ((pp.x - pm.x) / two_h, (pp.y - pm.y) / two_h);
            let tol = |v: F, w: F| F::lit(1e-5) * (F::one() + v.abs() + w.abs());
            if (fx - d.x).abs() > tol(d.x, p0.x) || (fy - d.y).abs() > tol(d.y, p0.y) {
                return Err(Error::InvalidCurve(format!(
                    "derivative ({}, {}) disagrees with finite differences ({fx}, {fy}) at t = {t}",
                    d.x, d.y
                )));
            }
        }
        Ok(ParamCurve {
            a,
            b,
            repr: CurveRepr::ClosedForm { position: Arc::new(position), derivative: Arc::new(derivative) },
        })
    }

    /// Polyline through `points[k]` at `params[k]`. A point equal to its
    /// predecessor is dropped together with its parameter; a constant curve
    /// keeps its two end samples.
    pub fn polyline(params: Vec<F>, points: Vec<GrushinPoint<F>>) -> Result<Self> {
        if params.len() < 2 || params.len() != points.len() {
            return Err(Error::InvalidCurve("polyline needs at least two samples and one parameter per point".into()));
        }
        if !params.windows(2).all(|w| w[0] < w[1]) || !params.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidCurve("polyline parameters must be finite and strictly increasing".into()));
        }
        if let Some(k) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve(format!("point {k} is not finite")));
        }
        let (mut params, mut points) = (params, points);
        let mut keep: Vec<bool> = std::iter::once(true).chain(points.windows(2).map(|w| w[0] != w[1])).collect();
        if keep.iter().filter(|&&k| k).count() < 2 {
            let last = keep.len() - 1;
            keep[last] = true;
        }
        let mut flags = keep.iter();
        params.retain(|_| *flags.next().unwrap());
        let mut flags = keep.iter();
        points.retain(|_| *flags.next().unwrap());
        Ok(ParamCurve { a: params[0], b: params[params.len() - 1], repr: CurveRepr::Polyline { params, points } })
    }

    /// Polyline through `points` with parameters `0, 1, 2, …`.
    pub fn polyline_uniform(points: Vec<GrushinPoint<F>>) -> Result<Self> {
        let params = (0..points.len()).map(|k| F::from_usize(k).unwrap()).collect();
        Self::polyline(params, points)
    }

    /// Straight segment from `p` to `q` on `[0, 1]`.
    pub fn segment(p: GrushinPoint<F>, q: GrushinPoint<F>) -> Result<Self> {
        Self::polyline(vec![F::zero(), F::one()], vec![p, q])
    }

    /// Graph `x ↦ (x, Σ coeffs[k] xᵏ)` over `[x0, x1]`.
    pub fn graph(coeffs: Vec<F>, x0: F, x1: F) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidCurve("graph coefficients must be finite".into()));
        }
        let c1 = coeffs.clone();
        let c2 = coeffs;
        Self::closed_form(
            x0,
            x1,
            move |t| GrushinPoint::new(t, horner(&c1, t)),
            move |t| GrushinPoint::new(F::one(), horner_derivative(&c2, t)),
        )
    }

    pub fn interval(&self) -> (F, F) {
        (self.a, self.b)
    }

    pub fn repr(&self) -> &CurveRepr<F> {
        &self.repr
    }

    pub fn is_polyline(&self) -> bool {
        matches!(self.repr, CurveRepr::Polyline { .. })
    }

    pub fn position(&self, t: F) -> GrushinPoint<F> {
        match &self.repr {
            CurveRepr::ClosedForm { position, .. } => position(t),
            CurveRepr::Polyline { params, points } => {
                let k = params.partition_point(|&s| s <= t).clamp(1, params.len() - 1) - 1;
                let s = (t - params[k]) / (params[k + 1] - params[k]);
                let (p, q) = (points[k], points[k + 1]);
                GrushinPoint::new(p.x + (q.x - p.x) * s, p.y + (q.y - p.y) * s)
            }
        }
    }

    /// Derivative with respect to the parameter; on a polyline, the slope of
    /// the segment to the right of `t` (to the left at the final parameter).
    pub fn derivative(&self, t: F) -> GrushinPoint<F> {
        match &self.repr {
            CurveRepr::ClosedForm { derivative, .. } => derivative(t),
            CurveRepr::Polyline { params, points } => {
                let k = params.partition_point(|&s| s <= t).clamp(1, params.len() - 1) - 1;
                let dt = params[k + 1] - params[k];
                GrushinPoint::new((points[k + 1].x - points[k].x) / dt, (points[k + 1].y - points[k].y) / dt)
            }
        }
    }

    /// Parameters at which the polyline has vertices, or the two endpoints.
    pub fn knots(&self) -> Vec<F> {
        match &self.repr {
            CurveRepr::ClosedForm { .. } => vec![self.a, self.b],
            CurveRepr::Polyline { params, .. } => params.clone(),
        }
    }

    /// Bounding-box extents `(Δx, Δy)` from 257 uniform samples (exact for polylines).
    fn extents(&self) -> (F, F) {
        let pts: Vec<GrushinPoint<F>> = match &self.repr {
            CurveRepr::Polyline { points, .. } => points.clone(),
            CurveRepr::ClosedForm { .. } => (0..=256)
                .map(|k| self.position(self.a + (self.b - self.a) * F::from_usize(k).unwrap() / F::lit(256.0)))
                .collect(),
        };
        let (mut x0, mut x1, mut y0, mut y1) = (pts[0].x, pts[0].x, pts[0].y, pts[0].y);
        for p in &pts {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        (x1 - x0, y1 - y0)
    }

    /// Euclidean diameter of the bounding box.
    pub fn diameter(&self) -> F {
        let (dx, dy) = self.extents();
        dx.hypot(dy)
    }

    /// `max(Δx, Δy^{1/(α+1)})` over the bounding box; scales by `λ` under `δ_λ`.
    pub fn homogeneous_diameter(&self, alpha: Alpha<F>) -> F {
        let (dx, dy) = self.extents();
        dx.max(abs_pow(dy, F::one() / alpha.degree()))
    }

    /// Parameters where `γ₁` changes sign or vanishes.
    pub fn axis_crossings(&self) -> Vec<F> {
        let mut out: Vec<F> = Vec::new();
        match &self.repr {
            CurveRepr::Polyline { params, points } => {
                for k in 0..points.len() {
                    if points[k].x.is_zero() {
                        out.push(params[k]);
                    } else if k + 1 < points.len()
                        && !points[k + 1].x.is_zero()
                        && (points[k].x < F::zero()) != (points[k + 1].x < F::zero())
                    {
                        let s = points[k].x / (points[k].x - points[k + 1].x);
                        out.push(params[k] + (params[k + 1] - params[k]) * s);
                    }
                }
            }
            CurveRepr::ClosedForm { position, .. } => {
                let n = 1024;
                let ts: Vec<F> = (0..=n)
                    .map(|k| self.a + (self.b - self.a) * F::from_usize(k).unwrap() / F::from_usize(n).unwrap())
                    .collect();
                let xs: Vec<F> = ts.iter().map(|&t| position(t).x).collect();
                for k in 0..=n {
                    if xs[k].is_zero() {
                        out.push(ts[k]);
                    } else if k < n && !xs[k + 1].is_zero() && (xs[k] < F::zero()) != (xs[k + 1] < F::zero()) {
                        out.push(bisect_root(|t| position(t).x, ts[k], ts[k + 1], xs[k]));
                    }
                }
            }
        }
        out.dedup();
        out
    }
}

fn bisect_root<F: Real>(g: impl Fn(F) -> F, mut lo: F, mut hi: F, mut g_lo: F) -> F {
    for _ in 0..200 {
        let mid = F::lit(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let v = g(mid);
        if v.is_zero() {
            return mid;
        }
        if (v < F::zero()) == (g_lo < F::zero()) {
            lo = mid;
            g_lo = v;
        } else {
            hi = mid;
        }
    }
    F::lit(0.5) * (lo + hi)
}

pub(crate) fn horner<F: Real>(coeffs: &[F], t: F) -> F {
    coeffs.iter().rev().fold(F::zero(), |acc, &c| acc * t + c)
}

pub(crate) fn horner_derivative<F: Real>(coeffs: &[F], t: F) -> F {
    coeffs.iter().enumerate().skip(1).rev().fold(F::zero(), |acc, (k, &c)| acc * t + c * F::from_usize(k).unwrap())
}
