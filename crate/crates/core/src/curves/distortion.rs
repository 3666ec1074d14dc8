use std::cell::RefCell;

use serde::Serialize;

use super::length::{panels, shell_integral, speed, LENGTH_DECADES};
use super::{grushin_length, ParamCurve};
use crate::error::{Error, Result};
use crate::geometry::{Alpha, GrushinPoint};
use crate::jet::{default_fd_step, finite_diff_jet, HorizontalJet};
use crate::map::{analytic_jet, GrushinMap};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    /// `l(γ)`.
    pub source_length: f64,
    /// `l(g∘γ)` measured on the pushed-forward polyline; `+∞` if divergent.
    pub pushed_length: f64,
    pub pushed_error: f64,
    /// `∫|∇_H g₁(γ)| dl(γ)`.
    pub weighted_length: f64,
    pub weighted_error: f64,
    /// Minimum of `|∇_H g₁|` over the quadrature nodes.
    pub c1: f64,
    /// Maximum of `|∇_H g₁|` over the quadrature nodes.
    pub c2: f64,
}

/// Polyline through `g(γ(tᵢ))` at `samples` uniform parameters together with
/// the knots of `curve`. Parameters are kept.
pub fn pushforward<F: Real>(map: &GrushinMap<F>, curve: &ParamCurve<F>, samples: usize) -> Result<ParamCurve<F>> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("pushforward needs at least 2 samples, got {samples}")));
    }
    let (a, b) = curve.interval();
    let n = F::from_usize(samples - 1).unwrap();
    let mut params: Vec<F> = (0..samples).map(|k| a + (b - a) * F::from_usize(k).unwrap() / n).collect();
    params[samples - 1] = b;
    params.extend(curve.knots());
    params.sort_by(|x, y| x.partial_cmp(y).unwrap());
    params.dedup();
    let points = params.iter().map(|&t| map.eval(curve.position(t))).collect::<Result<Vec<_>>>()?;
    ParamCurve::polyline(params, points)
}

fn jet_at<F: Real>(map: &GrushinMap<F>, p: GrushinPoint<F>) -> Result<HorizontalJet<F>> {
    match map {
        GrushinMap::Sampled(_) => finite_diff_jet(|q| map.eval(q), p, default_fd_step(p)),
        _ => analytic_jet(map, p),
    }
}

/// Compares `l(g∘γ)` with `∫|∇_H g₁| dl(γ)`; for a conformal `g` the two agree.
///
/// `samples` is the number of uniform parameters used for the pushforward.
pub fn length_distortion<F: Real>(
    alpha: Alpha<F>,
    map: &GrushinMap<F>,
    curve: &ParamCurve<F>,
    samples: usize,
) -> Result<DistortionReport> {
    if map.alpha() != alpha {
        return Err(Error::DomainMismatch(format!(
            "map has alpha = {}, requested alpha = {}",
            map.alpha().value(),
            alpha.value()
        )));
    }
    let first_error: RefCell<Option<Error>> = RefCell::new(None);
    let bounds = RefCell::new((F::infinity(), F::zero()));
    let integrand = |t: F| {
        let p = curve.position(t);
        let ds = speed(alpha, p, curve.derivative(t), F::zero());
        match jet_at(map, p) {
            Ok(j) => {
                let grad = j.d_g1_dx.hypot(alpha.weight(p.x) * j.d_g1_dy);
                let mut b = bounds.borrow_mut();
                b.0 = b.0.min(grad);
                b.1 = b.1.max(grad);
                [grad * ds, ds]
            }
            Err(e) => {
                first_error.borrow_mut().get_or_insert(e);
                [F::nan(), F::nan()]
            }
        }
    };
    let (a, b) = curve.interval();
    let mut weighted = F::zero();
    let mut error = F::zero();
    for panel in panels(a, b, &curve.axis_crossings(), &curve.knots()) {
        let sh = shell_integral(&integrand, panel, LENGTH_DECADES);
        if let Some(e) = first_error.borrow_mut().take() {
            return Err(e);
        }
        weighted = weighted + sh.bulk[0];
        error = error + sh.error;
        for s in &sh.shells {
            weighted = weighted + s[0];
        }
    }
    let source = grushin_length(alpha, curve);
    let pushed = grushin_length(alpha, &pushforward(map, curve, samples)?);
    let (c1, c2) = bounds.into_inner();
    let length = |r: &super::LengthResult<F>| if r.infinite { f64::INFINITY } else { r.value.as_f64() };
    Ok(DistortionReport {
        source_length: length(&source),
        pushed_length: length(&pushed),
        pushed_error: pushed.error_estimate.as_f64(),
        weighted_length: weighted.as_f64(),
        weighted_error: error.as_f64(),
        c1: c1.as_f64(),
        c2: c2.as_f64(),
    })
}
