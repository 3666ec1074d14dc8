use serde::Serialize;

use super::length::{panels, relative_growth, shell_integral, DIVERGENCE_GROWTH};
use super::{CurveRepr, ParamCurve};
use crate::error::{Error, Result};
use crate::geometry::Alpha;
use crate::scalar::Real;

/// Relative growth per refinement below which an integral counts as settled.
pub const STABLE_GROWTH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefinementTrend {
    Increasing,
    Stable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityVerdict {
    Admissible,
    NotAdmissible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub integral_of_dx: f64,
    /// `None` when the integral diverges.
    pub integral_of_dy_over_x_alpha: Option<f64>,
    /// `∫|γ₂′|/|γ₁|^α` after each refinement level, coarsest first.
    pub estimates: Vec<f64>,
    /// Relative growth contributed by each refinement level.
    pub growth: Vec<f64>,
    pub refinement_trend: RefinementTrend,
    pub verdict: AdmissibilityVerdict,
}

/// Estimates `∫|γ₁′|` and `∫|γ₂′|/|γ₁|^α`, refining towards each axis
/// crossing by one decade per level.
pub fn admissibility_check<F: Real>(
    alpha: Alpha<F>,
    curve: &ParamCurve<F>,
    levels: usize,
) -> Result<AdmissibilityReport> {
    if levels < 3 {
        return Err(Error::InvalidParameter(format!("at least 3 refinement levels are required, got {levels}")));
    }
    let (a, b) = curve.interval();
    let crossings = curve.axis_crossings();
    let knots = match curve.repr() {
        CurveRepr::Polyline { params, .. } => params.clone(),
        CurveRepr::ClosedForm { .. } => Vec::new(),
    };
    let integrand = |t: F| {
        let p = curve.position(t);
        let d = curve.derivative(t);
        let vertical = if d.y.is_zero() { F::zero() } else { d.y.abs() / alpha.weight(p.x) };
        [vertical, d.x.abs()]
    };
    let mut bulk = F::zero();
    let mut shells = vec![F::zero(); levels];
    let mut dx = F::zero();
    for panel in panels(a, b, &crossings, &knots) {
        let sh = shell_integral(&integrand, panel, levels);
        bulk = bulk + sh.bulk[0];
        dx = dx + sh.bulk[1];
        for (acc, s) in shells.iter_mut().zip(&sh.shells) {
            *acc = *acc + s[0];
            dx = dx + s[1];
        }
        if let Some((t0, t1)) = sh.tail {
            dx = dx + (t1 - t0) * curve.derivative(F::lit(0.5) * (t0 + t1)).x.abs();
        }
    }
    let mut estimates = Vec::with_capacity(levels + 1);
    let mut total = bulk;
    estimates.push(total.as_f64());
    for &s in &shells {
        total = total + s;
        estimates.push(total.as_f64());
    }
    let growth: Vec<f64> = relative_growth(bulk, &shells).iter().map(|g| g.as_f64()).collect();
    let last_two = &growth[growth.len() - 2..];
    let finite = estimates.iter().all(|e| e.is_finite());
    let (trend, verdict) = if !finite || last_two.iter().all(|&g| g > DIVERGENCE_GROWTH) {
        (RefinementTrend::Increasing, AdmissibilityVerdict::NotAdmissible)
    } else if last_two.iter().all(|&g| g <= STABLE_GROWTH) {
        (RefinementTrend::Stable, AdmissibilityVerdict::Admissible)
    } else {
        (RefinementTrend::Increasing, AdmissibilityVerdict::Inconclusive)
    };
    let integral = match verdict {
        AdmissibilityVerdict::NotAdmissible => None,
        _ => Some(total.as_f64()),
    };
    Ok(AdmissibilityReport {
        integral_of_dx: dx.as_f64(),
        integral_of_dy_over_x_alpha: integral,
        estimates,
        growth,
        refinement_trend: trend,
        verdict,
    })
}
