use std::fmt::Write as _;
use std::path::Path;

use grushin::curves::CurveRepr;
use grushin::jet::{default_fd_step, ComplexValue};
use grushin::map::default_probe_grid;
use grushin::{
    admissibility_check, analytic_jet, axis_components, cc_distance_upper, classify_entire, d_alpha_matrix,
    finite_diff_jet, grushin_length, incidence_graph, length_distortion, obstruction_check, pushforward,
    side_components, verify_conformal, wirtinger, AdmissibilityVerdict, Alpha, Domain, Error, Jet, Map, Point,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::docs::{load_document, CurveDoc, DomainDoc, MapDoc};
use crate::{CliError, Command, Format, Report};

fn load_map(path: &Path) -> Result<Map, CliError> {
    load_document::<MapDoc>(path)?.build(path)
}

fn load_curve(path: &Path) -> Result<grushin::Curve, CliError> {
    load_document::<CurveDoc>(path)?.build(path)
}

fn load_domain(path: &Path) -> Result<grushin::ExactDomain, CliError> {
    load_document::<DomainDoc>(path)?.exact(path, "")
}

fn alpha(value: f64) -> Result<Alpha<f64>, CliError> {
    Alpha::new(value).map_err(|e| CliError::Usage(format!("--alpha: {e}")))
}

fn report(value: impl Serialize, passed: bool, format: Format) -> Result<Report, CliError> {
    let value = serde_json::to_value(value).expect("reports serialize to JSON");
    let body = match format {
        Format::Json => serde_json::to_string_pretty(&value).expect("JSON values print") + "\n",
        Format::Text => {
            let mut out = String::new();
            flatten("", &value, &mut out);
            out
        }
    };
    Ok(Report { body, passed })
}

/// One `path = value` line per JSON leaf.
fn flatten(prefix: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        _ => {
            let _ = writeln!(out, "{prefix} = {value}");
        }
    }
}

/// Exact decimal when the denominator divides a power of ten, else `p/q`.
fn rational_string(r: &BigRational) -> String {
    let (mut twos, mut fives) = (0u32, 0u32);
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return r.to_string();
    }
    let places = twos.max(fives);
    let scaled = (r * BigRational::from_integer(num_traits::pow(BigInt::from(10), places as usize))).to_integer();
    if places == 0 {
        return scaled.to_string();
    }
    let digits = format!("{:0>width$}", scaled.abs().to_string(), width = places as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - places as usize);
    let sign = if scaled.is_negative() { "-" } else { "" };
    format!("{sign}{int}.{frac}")
}

fn rect_strings(r: &grushin::Rect<BigRational>) -> [String; 4] {
    [&r.xmin, &r.xmax, &r.ymin, &r.ymax].map(rational_string)
}

fn jet_at(map: &Map, p: Point) -> grushin::Result<Jet> {
    match map {
        Map::Sampled(_) => finite_diff_jet(|q| map.eval(q), p, default_fd_step(p)),
        _ => analytic_jet(map, p),
    }
}

fn csv_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV rows at the cell centres of the bounding box that lie inside `domain`,
/// `y` outer and `x` inner, both increasing.
pub fn grid_csv(map: &Map, domain: &Domain, resolution: usize) -> Result<String, CliError> {
    if resolution == 0 {
        return Err(CliError::Usage("--resolution must be at least 1".into()));
    }
    let bb = domain.bounding_box();
    let n = resolution as f64;
    let centre = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * (k as f64 + 0.5) / n;
    let alpha = map.alpha();
    let mut out = String::from("x,y,g1,g2,wbar_abs,det_dalpha\n");
    for j in 0..resolution {
        let y = centre(bb.ymin, bb.ymax, j);
        for i in 0..resolution {
            let x = centre(bb.xmin, bb.xmax, i);
            if !domain.contains(&x, &y) {
                continue;
            }
            let p = Point::new(x, y);
            let g = map.eval(p).unwrap_or(Point::new(f64::NAN, f64::NAN));
            let (wbar, det) = match jet_at(map, p) {
                Ok(jet) => {
                    let (_, wbar): (ComplexValue<f64>, _) = wirtinger(alpha, &jet, p);
                    let det = d_alpha_matrix(alpha, &jet, p).map(|m| m.det()).unwrap_or(f64::NAN);
                    (wbar.norm(), det)
                }
                Err(_) => (f64::NAN, f64::NAN),
            };
            let row = [x, y, g.x, g.y, wbar, det].map(csv_value).join(",");
            out.push_str(&row);
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn run(command: &Command, format: Format) -> Result<Report, CliError> {
    match command {
        Command::Eval { map, points } => {
            let g = load_map(map)?;
            let rows = points
                .iter()
                .map(|&[x, y]| {
                    let q = g.eval(Point::new(x, y))?;
                    Ok(json!({ "point": [x, y], "image": [q.x, q.y] }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            report(json!({ "kind": g.kind(), "alpha": g.alpha().value(), "values": rows }), true, format)
        }
        Command::Verify { map, domain, resolution } => {
            let g = load_map(map)?;
            let d = load_domain(domain)?.to_f64();
            let r = verify_conformal(g.alpha(), &g, &d, *resolution)?;
            let passed = r.verdict.is_pass();
            report(r, passed, format)
        }
        Command::Length { alpha: a, curve } => {
            let c = load_curve(curve)?;
            report(grushin_length(alpha(*a)?, &c), true, format)
        }
        Command::Admissible { alpha: a, curve, levels } => {
            let c = load_curve(curve)?;
            let r = admissibility_check(alpha(*a)?, &c, *levels)?;
            let passed = r.verdict != AdmissibilityVerdict::NotAdmissible;
            report(r, passed, format)
        }
        Command::PushCurve { map, curve, samples } => {
            let g = load_map(map)?;
            let c = load_curve(curve)?;
            let pushed = pushforward(&g, &c, *samples)?;
            let doc = CurveDoc::from_polyline(&pushed).expect("pushforward yields a polyline");
            report(doc, true, format)
        }
        Command::Distort { map, curve, samples } => {
            let g = load_map(map)?;
            let c = load_curve(curve)?;
            report(length_distortion(g.alpha(), &g, &c, *samples)?, true, format)
        }
        Command::Distance { alpha: a, from, to, knots, iterations, seed } => {
            let (p, q) = (Point::new(from[0], from[1]), Point::new(to[0], to[1]));
            let r = cc_distance_upper(alpha(*a)?, p, q, *knots, *iterations, *seed)?;
            let curve = CurveDoc::from_polyline(&r.curve).expect("solver yields a polyline");
            let vertices = match r.curve.repr() {
                CurveRepr::Polyline { points, .. } => points.len(),
                CurveRepr::ClosedForm { .. } => 0,
            };
            report(
                json!({
                    "distance_upper": r.distance_upper,
                    "lower_bound": r.lower_bound,
                    "sweeps": r.sweeps,
                    "vertices": vertices,
                    "curve": curve,
                }),
                true,
                format,
            )
        }
        Command::ClassifyEntire { map, tol } => {
            let g = load_map(map)?;
            match classify_entire(&g, &default_probe_grid(), *tol) {
                Ok((a, b)) => report(json!({ "entire": true, "a": a, "b": b }), true, format),
                Err(Error::NotEntireAffine(reason)) => {
                    report(json!({ "entire": false, "reason": reason }), false, format)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::AxisComponents { domain } => {
            let d = load_domain(domain)?;
            let axis: Vec<Value> = axis_components(&d)
                .intervals
                .iter()
                .map(|(lo, hi)| json!({ "y_min": rational_string(lo), "y_max": rational_string(hi) }))
                .collect();
            let sides: Vec<Value> = side_components(&d)
                .iter()
                .map(|c| json!({ "side": c.side, "pieces": c.pieces.iter().map(rect_strings).collect::<Vec<_>>() }))
                .collect();
            let degrees = incidence_graph(&d).side_degrees();
            report(json!({ "axis_components": axis, "side_components": sides, "side_degrees": degrees }), true, format)
        }
        Command::Obstruct { first, second, no_side_swap } => {
            let d1 = load_domain(first)?;
            let d2 = load_domain(second)?;
            let outcome = obstruction_check(&d1, &d2, !no_side_swap)?;
            let passed = !outcome.is_obstructed();
            report(outcome, passed, format)
        }
        Command::Grid { map, domain, resolution } => {
            if *resolution == 0 {
                return Err(CliError::Usage("--resolution must be at least 1".into()));
            }
            let g = load_map(map)?;
            let d = load_domain(domain)?.to_f64();
            Ok(Report { body: grid_csv(&g, &d, *resolution)?, passed: true })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        grushin::topology::parse_decimal(s).unwrap()
    }

    #[test]
    fn terminating_rationals_print_as_decimals() {
        assert_eq!(rational_string(&q("-1.25")), "-1.25");
        assert_eq!(rational_string(&q("0.05")), "0.05");
        assert_eq!(rational_string(&q("-0.5")), "-0.5");
        assert_eq!(rational_string(&q("3")), "3");
        assert_eq!(rational_string(&(q("1") / q("3"))), "1/3");
    }

    #[test]
    fn text_format_flattens_leaves() {
        let mut out = String::new();
        flatten("", &json!({ "a": { "b": 1 }, "c": [1, 2], "d": [{ "e": "x" }] }), &mut out);
        assert_eq!(out, "a.b = 1\nc = [1,2]\nd[0].e = \"x\"\n");
    }
}
