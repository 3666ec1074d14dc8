use serde::Serialize;

use super::{CurveRepr, ParamCurve};
use crate::geometry::{Alpha, GrushinPoint};
use crate::quadrature::adaptive_gk;
use crate::scalar::{abs_pow, Real};

/// Relative tolerance of every adaptive quadrature in this module.
pub(crate) const QUAD_TOL: f64 = 1e-12;
pub(crate) const QUAD_MAX_INTERVALS: usize = 400;
/// Number of decade shells integrated around each axis crossing.
pub(crate) const LENGTH_DECADES: usize = 6;
/// Relative growth per refinement above which an integral is called divergent.
pub(crate) const DIVERGENCE_GROWTH: f64 = 0.1;
/// `|x|` floor near crossings, relative to the curve's homogeneous diameter.
pub(crate) const FLOOR_FACTOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthResult<F> {
    /// Meaningful only when `infinite` is false.
    pub value: F,
    pub infinite: bool,
    pub error_estimate: F,
    pub axis_crossings: Vec<F>,
    /// `∫|γ₁′|` on the same nodes; never exceeds `value`.
    pub x_variation: F,
}

/// Which end of a panel touches the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Singular {
    None,
    Start,
    End,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel<F> {
    pub s: F,
    pub e: F,
    pub singular: Singular,
}

/// Cuts `[a, b]` at `breaks` (crossings and, for polylines, vertices) so each
/// panel is smooth inside and has at most one singular end.
pub(crate) fn panels<F: Real>(a: F, b: F, crossings: &[F], extra_breaks: &[F]) -> Vec<Panel<F>> {
    let mut pts: Vec<F> = vec![a, b];
    pts.extend(crossings.iter().copied());
    pts.extend(extra_breaks.iter().copied());
    pts.retain(|t| *t >= a && *t <= b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let is_crossing = |t: F| crossings.contains(&t);
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (s, e) = (w[0], w[1]);
        match (is_crossing(s), is_crossing(e)) {
            (false, false) => out.push(Panel { s, e, singular: Singular::None }),
            (true, false) => out.push(Panel { s, e, singular: Singular::Start }),
            (false, true) => out.push(Panel { s, e, singular: Singular::End }),
            (true, true) => {
                let m = F::lit(0.5) * (s + e);
                out.push(Panel { s, e: m, singular: Singular::Start });
                out.push(Panel { s: m, e, singular: Singular::End });
            }
        }
    }
    out
}

/// Integral over a panel split into a bulk part, `decades` shells
/// `[w·10^{-j-1}, w·10^{-j}]` measured from the singular end, and a tail.
pub(crate) struct ShellIntegral<F> {
    pub bulk: [F; 2],
    pub shells: Vec<[F; 2]>,
    pub error: F,
    /// Tail interval `[t0, t1]` next to the singular end.
    pub tail: Option<(F, F)>,
}

pub(crate) fn shell_integral<F: Real>(f: &impl Fn(F) -> [F; 2], panel: Panel<F>, decades: usize) -> ShellIntegral<F> {
    let tol = F::lit(QUAD_TOL);
    let w = panel.e - panel.s;
    let ten = F::lit(10.0);
    // Offset from the singular end, mapped back to a parameter.
    let at = |d: F| match panel.singular {
        Singular::End => panel.e - d,
        _ => panel.s + d,
    };
    let ordered = |x: F, y: F| if x <= y { (x, y) } else { (y, x) };
    if panel.singular == Singular::None {
        let q = adaptive_gk(f, panel.s, panel.e, tol, QUAD_MAX_INTERVALS);
        return ShellIntegral { bulk: q.value, shells: Vec::new(), error: q.error, tail: None };
    }
    let (b0, b1) = ordered(at(w / ten), at(w));
    let bulk = adaptive_gk(f, b0, b1, tol, QUAD_MAX_INTERVALS);
    let mut error = bulk.error;
    let mut shells = Vec::with_capacity(decades);
    let mut outer = w / ten;
    for _ in 0..decades {
        let inner = outer / ten;
        let (t0, t1) = ordered(at(inner), at(outer));
        let q = adaptive_gk(f, t0, t1, tol, QUAD_MAX_INTERVALS);
        error = error + q.error;
        shells.push(q.value);
        outer = inner;
    }
    let tail = ordered(at(F::zero()), at(outer));
    ShellIntegral { bulk: bulk.value, shells, error, tail: Some(tail) }
}

/// `shells[k] / (bulk + shells[..k])`, the relative growth at each refinement.
pub(crate) fn relative_growth<F: Real>(bulk: F, shells: &[F]) -> Vec<F> {
    let mut total = bulk;
    shells
        .iter()
        .map(|&s| {
            let g = if total > F::zero() {
                s / total
            } else if s.is_zero() {
                F::zero()
            } else {
                F::infinity()
            };
            total = total + s;
            g
        })
        .collect()
}

/// `max(√(x′² + y′²/|x|^{2α}), |x′|)` with `|x|` replaced by `max(|x|, floor)`.
pub(crate) fn speed<F: Real>(alpha: Alpha<F>, p: GrushinPoint<F>, d: GrushinPoint<F>, floor: F) -> F {
    let dx = d.x.abs();
    if d.y.is_zero() {
        return dx;
    }
    let ax = p.x.abs().max(floor);
    if ax.is_zero() {
        return F::infinity();
    }
    let vertical = d.y.abs() / abs_pow(ax, alpha.value());
    dx.hypot(vertical).max(dx)
}

/// Carnot–Carathéodory length of `curve`.
///
/// Polylines are measured segment by segment with substitutions that remove
/// the axis singularity. Closed-form curves are integrated adaptively; around
/// each axis crossing the integral is accumulated over decade shells, declared
/// infinite when the last two shells each add more than 10%, and closed with a
/// midpoint tail whose sensitivity to the `|x|` floor enters the error.
pub fn grushin_length<F: Real>(alpha: Alpha<F>, curve: &ParamCurve<F>) -> LengthResult<F> {
    let crossings = curve.axis_crossings();
    match curve.repr() {
        CurveRepr::Polyline { points, .. } => {
            let mut value = F::zero();
            let mut xvar = F::zero();
            let mut error = F::zero();
            let mut infinite = false;
            for w in points.windows(2) {
                let seg = segment_length(alpha, w[0], w[1]);
                infinite |= seg.infinite;
                value = value + seg.value;
                xvar = xvar + seg.x_variation;
                error = error + seg.error_estimate;
            }
            LengthResult { value, infinite, error_estimate: error, axis_crossings: crossings, x_variation: xvar }
        }
        CurveRepr::ClosedForm { .. } => closed_form_length(alpha, curve, crossings),
    }
}

fn closed_form_length<F: Real>(alpha: Alpha<F>, curve: &ParamCurve<F>, crossings: Vec<F>) -> LengthResult<F> {
    let (a, b) = curve.interval();
    let floor = F::lit(FLOOR_FACTOR) * curve.homogeneous_diameter(alpha);
    let integrand = |t: F| {
        let d = curve.derivative(t);
        [speed(alpha, curve.position(t), d, F::zero()), d.x.abs()]
    };
    let mut value = F::zero();
    let mut xvar = F::zero();
    let mut error = F::zero();
    let mut infinite = false;
    for panel in panels(a, b, &crossings, &[]) {
        let sh = shell_integral(&integrand, panel, LENGTH_DECADES);
        value = value + sh.bulk[0];
        xvar = xvar + sh.bulk[1];
        error = error + sh.error;
        for s in &sh.shells {
            value = value + s[0];
            xvar = xvar + s[1];
        }
        let lengths: Vec<F> = sh.shells.iter().map(|s| s[0]).collect();
        let growth = relative_growth(sh.bulk[0], &lengths);
        if growth.len() >= 2 && growth[growth.len() - 2..].iter().all(|&g| g > F::lit(DIVERGENCE_GROWTH)) {
            infinite = true;
        }
        if let Some((t0, t1)) = sh.tail {
            let tm = F::lit(0.5) * (t0 + t1);
            let width = t1 - t0;
            let (p, d) = (curve.position(tm), curve.derivative(tm));
            let at_floor = speed(alpha, p, d, floor);
            let at_double = speed(alpha, p, d, floor + floor);
            let tail = width * at_floor;
            value = value + tail;
            xvar = xvar + width * d.x.abs();
            error = error + width * (at_floor - at_double).abs();
            if let [.., prev, last] = lengths.as_slice() {
                if *prev > F::zero() && last < prev {
                    let r = *last / *prev;
                    let extrapolated = *last * r / (F::one() - r);
                    error = error + (extrapolated - tail).abs();
                }
            }
        }
    }
    if !value.is_finite() {
        infinite = true;
    }
    LengthResult { value, infinite, error_estimate: error, axis_crossings: crossings, x_variation: xvar }
}

/// Exact-up-to-quadrature length of the straight segment from `p` to `q`.
pub(crate) fn segment_length<F: Real>(alpha: Alpha<F>, p: GrushinPoint<F>, q: GrushinPoint<F>) -> LengthResult<F> {
    let dx = q.x - p.x;
    let dy = q.y - p.y;
    let done = |value: F, error: F, infinite: bool| LengthResult {
        value: if infinite { F::infinity() } else { value.max(dx.abs()) },
        infinite,
        error_estimate: error,
        axis_crossings: Vec::new(),
        x_variation: dx.abs(),
    };
    if dy.is_zero() {
        return done(dx.abs(), F::zero(), false);
    }
    if dx.is_zero() {
        if p.x.is_zero() {
            return done(F::zero(), F::zero(), true);
        }
        return done(dy.abs() / alpha.weight(p.x), F::zero(), false);
    }
    let al = alpha.value();
    let m = (dy / dx).abs();
    let tol = F::lit(QUAD_TOL);
    let (lo, hi) = if p.x <= q.x { (p.x, q.x) } else { (q.x, p.x) };
    if lo > F::zero() || hi < F::zero() {
        // ∫_A^B √(1 + m² u^{-2α}) du with u = e^s.
        let (ua, ub) = if lo > F::zero() { (lo, hi) } else { (-hi, -lo) };
        let f = |s: F| {
            let u = s.exp();
            [u * (F::one() + m * m * abs_pow(u, -(al + al))).sqrt(), F::zero()]
        };
        let r = adaptive_gk(f, ua.ln(), ub.ln(), tol, QUAD_MAX_INTERVALS);
        return done(r.value[0], r.error, false);
    }
    if al >= F::one() {
        return done(F::zero(), F::zero(), true);
    }
    // ∫_0^X √(1 + m² u^{-2α}) du with u = w^{1/(1-α)}:
    // (1/(1-α)) ∫_0^{X^{1-α}} √(w^{2α/(1-α)} + m²) dw.
    let beta = F::one() - al;
    let expo = (al + al) / beta;
    let f = |w: F| [(abs_pow(w, expo) + m * m).sqrt() / beta, F::zero()];
    let mut value = F::zero();
    let mut error = F::zero();
    for x_end in [-lo, hi] {
        if x_end > F::zero() {
            let r = adaptive_gk(f, F::zero(), abs_pow(x_end, beta), tol, QUAD_MAX_INTERVALS);
            value = value + r.value[0];
            error = error + r.error;
        }
    }
    done(value, error, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn a(v: f64) -> Alpha<f64> {
        Alpha::new(v).unwrap()
    }

    fn pt(x: f64, y: f64) -> GrushinPoint<f64> {
        GrushinPoint::new(x, y)
    }

    #[test]
    fn horizontal_and_vertical_segments() {
        for al in [0.5, 1.0, 2.0] {
            let h = grushin_length(a(al), &ParamCurve::segment(pt(-1.0, 2.0), pt(3.0, 2.0)).unwrap());
            assert_eq!((h.value, h.infinite), (4.0, false));
        }
        let v = grushin_length(a(1.0), &ParamCurve::segment(pt(2.0, -1.0), pt(2.0, 3.0)).unwrap());
        assert_eq!(v.value, 2.0);
        let on_axis = grushin_length(a(1.0), &ParamCurve::segment(pt(0.0, -1.0), pt(0.0, 3.0)).unwrap());
        assert!(on_axis.infinite);
    }

    #[test]
    fn oblique_segment_against_closed_form() {
        // α = 1, from (1, 0) to (2, 1): ∫_1^2 √(1 + 1/u²) du = [√(1+u²) − asinh(1/u)]_1^2.
        let r = grushin_length(a(1.0), &ParamCurve::segment(pt(1.0, 0.0), pt(2.0, 1.0)).unwrap());
        let anti = |u: f64| (1.0 + u * u).sqrt() - (1.0 / u).asinh();
        assert_relative_eq!(r.value, anti(2.0) - anti(1.0), max_relative = 1e-12);
    }

    #[test]
    fn crossing_segment_small_alpha() {
        // α = 1/2, (−1, −1) → (1, 1): 2 ∫_0^1 √(1 + 1/u) du = 2(√2 + asinh 1).
        let r = grushin_length(a(0.5), &ParamCurve::segment(pt(-1.0, -1.0), pt(1.0, 1.0)).unwrap());
        assert!(!r.infinite);
        assert_relative_eq!(r.value, 2.0 * (2f64.sqrt() + 1f64.asinh()), max_relative = 1e-10);
        let r = grushin_length(a(1.0), &ParamCurve::segment(pt(-1.0, -1.0), pt(1.0, 1.0)).unwrap());
        assert!(r.infinite);
    }

    #[test]
    fn diagonal_closed_form_diverges() {
        let c = ParamCurve::closed_form(-1.0, 1.0, |t: f64| pt(t, t), |_| pt(1.0, 1.0)).unwrap();
        let r = grushin_length(a(1.0), &c);
        assert!(r.infinite);
        assert_eq!(r.axis_crossings, vec![0.0]);
    }

    #[test]
    fn admissible_crossing_is_finite() {
        // γ = (t, t³), α = 1: integrand √(1 + 9t²).
        let c = ParamCurve::graph(vec![0.0, 0.0, 0.0, 1.0], -1.0, 1.0).unwrap();
        let r = grushin_length(a(1.0), &c);
        let exact = 10f64.sqrt() + (3.0_f64).asinh() / 3.0;
        assert!(!r.infinite);
        assert_relative_eq!(r.value, exact, max_relative = 1e-9);
        assert!(r.value >= r.x_variation);
    }

    #[test]
    fn shell_growth() {
        let g = relative_growth(1.0, &[1.0, 2.0, 0.0]);
        assert_eq!(g, vec![1.0, 1.0, 0.0]);
        assert_eq!(relative_growth(0.0, &[0.0, 1.0]), vec![0.0, f64::INFINITY]);
    }
}
