//! Conformal maps on the Grushin plane.
//!
//! The Grushin plane `G²_α` is `ℝ²` with the horizontal frame `X = ∂_x`,
//! `Y_α = |x|^α ∂_y`, degenerate on the singular line `{x = 0}`. This crate
//! builds conformal maps of `G²_α` by conjugating axis-preserving holomorphic
//! maps with the Meyerson change of coordinates, checks candidate maps for
//! conformality, measures Carnot–Carathéodory lengths of curves, and decides
//! when two rectilinear domains cannot be conformally equivalent.
//!
//! Numeric code is generic over [`Real`]; the aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod error;
pub mod geometry;
pub mod holo;
pub mod jet;
pub mod map;
pub mod quadrature;
pub mod scalar;
pub mod topology;
pub mod verify;

pub use curves::{
    admissibility_check, cc_distance_upper, grushin_length, length_distortion, pushforward, AdmissibilityReport,
    AdmissibilityVerdict, DistortionReport, GeodesicResult, LengthResult, ParamCurve,
};
pub use error::{Error, Result};
pub use geometry::{dilation, meyerson, meyerson_inv, Alpha, GrushinPoint, PlanePoint};
pub use holo::{check_axis_preservation, holo_eval, HoloExpr, PlaneRect};
pub use jet::{
    d_alpha_matrix, finite_diff_jet, horizontal_gradient, horizontal_jacobian, wirtinger, wirtinger_identity_residual,
    DAlphaMatrix, HorizontalJet,
};
pub use map::{
    analytic_jet, classify_entire, compose_maps, conjugate, entire_map, ext_boundary, invert_map, ratio_limit_check,
    GrushinMap, SampledMap,
};
pub use scalar::Real;
pub use topology::{
    axis_components, incidence_graph, obstruction_check, side_components, ObstructionOutcome, Rect, RectilinearDomain,
};
pub use verify::{verify_conformal, ConformalityReport, LimitStatus, Verdict};

pub type Point = GrushinPoint<f64>;
pub type Jet = HorizontalJet<f64>;
pub type Map = GrushinMap<f64>;
pub type Expr = HoloExpr<f64>;
pub type Domain = RectilinearDomain<f64>;
pub type Curve = ParamCurve<f64>;
/// Domain with exact rational corners, used for topology queries.
pub type ExactDomain = RectilinearDomain<num_rational::BigRational>;
