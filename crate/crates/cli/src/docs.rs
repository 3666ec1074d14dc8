//! JSON documents for maps, curves and domains.
//!
//! Every document rejects unknown fields. Parse failures report the field
//! path and the line and column; invariant violations report the path of the
//! offending value.

use std::fs;
use std::path::Path;

use grushin::geometry::Alpha;
use grushin::holo::{HoloExpr, PlaneRect};
use grushin::map::{conjugate, entire_map, GrushinMap, SampledMap};
use grushin::topology::{parse_decimal, Rect, RectilinearDomain};
use grushin::{Curve, Domain, ExactDomain, Expr, Map, ParamCurve, Point};
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapDoc {
    Conjugated {
        alpha: f64,
        expr: ExprDoc,
        #[serde(default)]
        domain: Option<DomainDoc>,
    },
    Entire {
        alpha: f64,
        a: f64,
        b: f64,
    },
    Sampled {
        alpha: f64,
        samples: SamplesDoc,
        domain: DomainDoc,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExprDoc {
    RealAffine { a: f64, c: f64 },
    Joukovski,
    OddRealPoly { coeffs: Vec<f64>, domain: [f64; 4] },
    Translate { re: f64, im: f64 },
    Compose { outer: Box<ExprDoc>, inner: Box<ExprDoc> },
}

/// Values of `g` on the tensor grid `xs × ys`, row-major in `y`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesDoc {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CoordDoc {
    Number(serde_json::Number),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    pub rects: Vec<[CoordDoc; 4]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveDoc {
    Segment {
        from: [f64; 2],
        to: [f64; 2],
    },
    Polyline {
        points: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<Vec<f64>>,
    },
    /// `t ↦ (t, Σ coeffs[k] tᵏ)` for `t ∈ [x0, x1]`.
    Graph {
        coeffs: Vec<f64>,
        x0: f64,
        x1: f64,
    },
}

fn invalid(path: &Path, field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Document { path: path.display().to_string(), message: format!("{field}: {message}") }
}

/// Reads and schema-checks a JSON document.
pub fn load_document<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Document { path: path.display().to_string(), message: e.to_string() })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let field = if field == "." || field == "?" { "document" } else { &field };
        invalid(path, field, e.into_inner())
    })
}

/// `field` below `prefix`; an empty prefix is the document root.
fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn alpha(path: &Path, value: f64) -> Result<Alpha<f64>, CliError> {
    Alpha::new(value).map_err(|e| invalid(path, "alpha", e))
}

impl ExprDoc {
    fn build(&self, path: &Path, field: &str) -> Result<Expr, CliError> {
        let err = |e: grushin::Error| invalid(path, field, e);
        Ok(match self {
            ExprDoc::RealAffine { a, c } => HoloExpr::real_affine(*a, *c).map_err(err)?,
            ExprDoc::Joukovski => HoloExpr::joukovski(),
            ExprDoc::OddRealPoly { coeffs, domain: [u0, u1, v0, v1] } => {
                let rect =
                    PlaneRect::new(*u0, *u1, *v0, *v1).map_err(|e| invalid(path, &format!("{field}.domain"), e))?;
                HoloExpr::odd_real_poly(coeffs.clone(), rect).map_err(err)?
            }
            ExprDoc::Translate { re, im } => HoloExpr::translate(*re, *im),
            ExprDoc::Compose { outer, inner } => HoloExpr::compose(
                outer.build(path, &format!("{field}.outer"))?,
                inner.build(path, &format!("{field}.inner"))?,
            ),
        })
    }
}

impl CoordDoc {
    fn exact(&self) -> grushin::Result<BigRational> {
        match self {
            CoordDoc::Number(n) => parse_decimal(&n.to_string()),
            CoordDoc::Text(s) => parse_decimal(s),
        }
    }
}

impl DomainDoc {
    pub fn exact(&self, path: &Path, field: &str) -> Result<ExactDomain, CliError> {
        let mut rects = Vec::with_capacity(self.rects.len());
        for (i, r) in self.rects.iter().enumerate() {
            let mut c = Vec::with_capacity(4);
            for (k, v) in r.iter().enumerate() {
                c.push(v.exact().map_err(|e| invalid(path, &join(field, &format!("rects[{i}][{k}]")), e))?);
            }
            let [xmin, xmax, ymin, ymax]: [BigRational; 4] = c.try_into().expect("four coordinates");
            rects.push(Rect::new(xmin, xmax, ymin, ymax));
        }
        RectilinearDomain::new(rects).map_err(|e| invalid(path, &join(field, "rects"), e))
    }

    pub fn float(&self, path: &Path, field: &str) -> Result<Domain, CliError> {
        Ok(self.exact(path, field)?.to_f64())
    }
}

impl MapDoc {
    pub fn build(&self, path: &Path) -> Result<Map, CliError> {
        match self {
            MapDoc::Conjugated { alpha: a, expr, domain } => {
                let domain = domain.as_ref().map(|d| d.float(path, "domain")).transpose()?;
                conjugate(alpha(path, *a)?, expr.build(path, "expr")?, domain).map_err(|e| invalid(path, "expr", e))
            }
            MapDoc::Entire { alpha: a, a: slope, b } => {
                entire_map(alpha(path, *a)?, *slope, *b).map_err(|e| invalid(path, "a", e))
            }
            MapDoc::Sampled { alpha: a, samples, domain } => {
                let s = samples.clone();
                SampledMap::new(alpha(path, *a)?, s.xs, s.ys, s.g1, s.g2, domain.float(path, "domain")?)
                    .map(GrushinMap::Sampled)
                    .map_err(|e| invalid(path, "samples", e))
            }
        }
    }
}

fn point([x, y]: [f64; 2]) -> Point {
    Point::new(x, y)
}

impl CurveDoc {
    pub fn build(&self, path: &Path) -> Result<Curve, CliError> {
        let err = |e: grushin::Error| invalid(path, "curve", e);
        match self {
            CurveDoc::Segment { from, to } => ParamCurve::segment(point(*from), point(*to)).map_err(err),
            CurveDoc::Polyline { points, params } => {
                let pts = points.iter().copied().map(point).collect();
                match params {
                    Some(ts) => ParamCurve::polyline(ts.clone(), pts).map_err(err),
                    None => ParamCurve::polyline_uniform(pts).map_err(err),
                }
            }
            CurveDoc::Graph { coeffs, x0, x1 } => ParamCurve::graph(coeffs.clone(), *x0, *x1).map_err(err),
        }
    }

    /// Polyline document for the vertices of `curve`; closed-form curves are
    /// not representable and yield `None`.
    pub fn from_polyline(curve: &Curve) -> Option<CurveDoc> {
        match curve.repr() {
            grushin::curves::CurveRepr::Polyline { params, points } => Some(CurveDoc::Polyline {
                points: points.iter().map(|p| [p.x, p.y]).collect(),
                params: Some(params.clone()),
            }),
            grushin::curves::CurveRepr::ClosedForm { .. } => None,
        }
    }
}
