use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::length::segment_length;
use super::ParamCurve;
use crate::error::{Error, Result};
use crate::geometry::{Alpha, GrushinPoint};
use crate::scalar::{abs_pow, Real};

/// Relative accuracy of [`cc_distance_upper`] on the bounded test regions it
/// is exercised on: swapping endpoints or routing through a third point moves
/// the bound by less than this.
pub const SOLVER_REL_TOL: f64 = 1e-3;

/// Smallest accepted relative decrease of the polyline length.
const MIN_IMPROVEMENT: f64 = 1e-14;
/// A level ends once its step has shrunk by this factor.
const STEP_SHRINK: f64 = 1e-10;

#[derive(Clone)]
pub struct GeodesicResult<F> {
    /// Length of `curve`, an upper bound on the distance.
    pub distance_upper: F,
    /// `|p.x − q.x|`, a lower bound on the distance.
    pub lower_bound: F,
    pub curve: ParamCurve<F>,
    /// Coordinate-descent sweeps performed.
    pub sweeps: usize,
}

impl<F: Real> std::fmt::Debug for GeodesicResult<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeodesicResult")
            .field("distance_upper", &self.distance_upper)
            .field("lower_bound", &self.lower_bound)
            .field("curve", &self.curve)
            .field("sweeps", &self.sweeps)
            .finish()
    }
}

fn polyline_length<F: Real>(alpha: Alpha<F>, pts: &[GrushinPoint<F>]) -> F {
    pts.windows(2).fold(F::zero(), |acc, w| acc + seg(alpha, w[0], w[1]))
}

fn seg<F: Real>(alpha: Alpha<F>, p: GrushinPoint<F>, q: GrushinPoint<F>) -> F {
    let r = segment_length(alpha, p, q);
    if r.infinite {
        F::infinity()
    } else {
        r.value
    }
}

/// Finite-length starting path: the chord when it has finite length, else an
/// L-shaped path whose vertical leg sits at the endpoint farther from the
/// axis, or a detour off the axis when both endpoints lie on it.
fn base_path<F: Real>(alpha: Alpha<F>, p: GrushinPoint<F>, q: GrushinPoint<F>) -> Vec<GrushinPoint<F>> {
    if seg(alpha, p, q).is_finite() {
        return vec![p, q];
    }
    if p.x.is_zero() && q.x.is_zero() {
        let h = abs_pow(q.y - p.y, F::one() / alpha.degree());
        return vec![p, GrushinPoint::new(h, p.y), GrushinPoint::new(h, q.y), q];
    }
    if p.x.abs() >= q.x.abs() {
        vec![p, GrushinPoint::new(p.x, q.y), q]
    } else {
        vec![p, GrushinPoint::new(q.x, p.y), q]
    }
}

/// Inserts midpoints of the `count` longest segments.
fn refine<F: Real>(alpha: Alpha<F>, pts: &[GrushinPoint<F>], count: usize) -> Vec<GrushinPoint<F>> {
    let mut order: Vec<(usize, F)> = pts.windows(2).enumerate().map(|(k, w)| (k, seg(alpha, w[0], w[1]))).collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut split = vec![false; pts.len() - 1];
    for &(k, _) in order.iter().take(count) {
        split[k] = true;
    }
    let half = F::lit(0.5);
    let mut out = Vec::with_capacity(pts.len() + count);
    for k in 0..pts.len() - 1 {
        out.push(pts[k]);
        if split[k] {
            out.push(GrushinPoint::new(half * (pts[k].x + pts[k + 1].x), half * (pts[k].y + pts[k + 1].y)));
        }
    }
    out.push(pts[pts.len() - 1]);
    out
}

/// Upper bound on the Carnot–Carathéodory distance from `p` to `q` by
/// coordinate descent on a polyline with `knots` vertices.
///
/// The polyline is refined through `2, 3, 5, 9, …` vertices up to `knots`;
/// each level shuffles the (vertex, coordinate) visiting order with a
/// generator seeded from `seed` and the vertex count, tries `±step` moves,
/// keeps strict improvements and halves the step after an unproductive
/// sweep. Steps scale like the dilations, so the result is covariant under
/// them. `iterations` bounds the total number of sweeps.
pub fn cc_distance_upper<F: Real>(
    alpha: Alpha<F>,
    p: GrushinPoint<F>,
    q: GrushinPoint<F>,
    knots: usize,
    iterations: usize,
    seed: u64,
) -> Result<GeodesicResult<F>> {
    if knots < 2 {
        return Err(Error::InvalidParameter(format!("at least 2 knots are required, got {knots}")));
    }
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::InvalidParameter("endpoints must be finite".into()));
    }
    let lower_bound = (q.x - p.x).abs();
    if p == q {
        let curve = ParamCurve::polyline(vec![F::zero(), F::one()], vec![p, q])?;
        return Ok(GeodesicResult { distance_upper: F::zero(), lower_bound, curve, sweeps: 0 });
    }
    let scale_x = lower_bound.max(abs_pow(q.y - p.y, F::one() / alpha.degree()));
    let scale_y = abs_pow(scale_x, alpha.degree());
    let mut pts = base_path(alpha, p, q);
    let mut length = polyline_length(alpha, &pts);
    let mut sweeps = 0usize;
    let improvement = F::lit(MIN_IMPROVEMENT);
    loop {
        let n = pts.len();
        if n > 2 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let segments = F::from_usize(n - 1).unwrap();
            let (sx0, sy0) = (scale_x / segments, scale_y / segments);
            let (mut sx, mut sy) = (sx0, sy0);
            let mut moves: Vec<(usize, bool)> = (1..n - 1).flat_map(|k| [(k, false), (k, true)]).collect();
            while sweeps < iterations && sx > F::lit(STEP_SHRINK) * sx0 {
                sweeps += 1;
                moves.shuffle(&mut rng);
                let mut improved = false;
                for &(k, vertical) in &moves {
                    let local = seg(alpha, pts[k - 1], pts[k]) + seg(alpha, pts[k], pts[k + 1]);
                    for dir in [F::one(), -F::one()] {
                        let mut trial = pts[k];
                        if vertical {
                            trial.y = trial.y + dir * sy;
                        } else {
                            trial.x = trial.x + dir * sx;
                        }
                        let candidate = seg(alpha, pts[k - 1], trial) + seg(alpha, trial, pts[k + 1]);
                        if candidate.is_finite() && local - candidate > improvement * length {
                            pts[k] = trial;
                            length = length - (local - candidate);
                            improved = true;
                            break;
                        }
                    }
                }
                if !improved {
                    sx = sx * F::lit(0.5);
                    sy = sy * F::lit(0.5);
                }
            }
        }
        if n >= knots {
            break;
        }
        let target = (2 * n - 1).min(knots);
        pts = refine(alpha, &pts, target - n);
        length = polyline_length(alpha, &pts);
    }
    let length = polyline_length(alpha, &pts);
    let params = (0..pts.len()).map(|k| F::from_usize(k).unwrap()).collect();
    Ok(GeodesicResult { distance_upper: length, lower_bound, curve: ParamCurve::polyline(params, pts)?, sweeps })
}
