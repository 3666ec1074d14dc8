//! Points of the Grushin plane, the Meyerson change of coordinates and the
//! intrinsic dilations.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{abs_pow, signed_pow, Real};

/// The exponent α > 0 of the vector field `Y_α = |x|^α ∂_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Alpha<F>(F);

impl<F: Real> Alpha<F> {
    pub fn new(value: F) -> Result<Self> {
        if value.is_finite() && value > F::zero() {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidParameter(format!("alpha must be positive and finite, got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> F {
        self.0
    }

    /// `α + 1`, the homogeneous degree of the vertical coordinate.
    #[inline]
    pub fn degree(self) -> F {
        self.0 + F::one()
    }

    /// `|t|^α`.
    #[inline]
    pub fn weight(self, t: F) -> F {
        abs_pow(t, self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrushinPoint<F> {
    pub x: F,
    pub y: F,
}

impl<F: Real> GrushinPoint<F> {
    pub fn new(x: F, y: F) -> Self {
        GrushinPoint { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// On the singular line `{x = 0}`.
    pub fn is_singular(&self) -> bool {
        self.x.is_zero()
    }

    pub fn euclid_dist(&self, other: &Self) -> F {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A point of the plane on the holomorphic side of the Meyerson conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanePoint<F> {
    pub u: F,
    pub v: F,
}

impl<F: Real> PlanePoint<F> {
    pub fn new(u: F, v: F) -> Self {
        PlanePoint { u, v }
    }

    pub fn to_complex(self) -> Complex<F> {
        Complex::new(self.u, self.v)
    }

    pub fn from_complex(z: Complex<F>) -> Self {
        PlanePoint { u: z.re, v: z.im }
    }
}

/// First component of the Meyerson map, `t ↦ t|t|^α/(α+1)`.
#[inline]
pub fn meyerson_coord<F: Real>(alpha: Alpha<F>, t: F) -> F {
    signed_pow(t, alpha.degree()) / alpha.degree()
}

/// Inverse of [`meyerson_coord`], `s ↦ sign(s)[(α+1)|s|]^{1/(α+1)}`.
#[inline]
pub fn meyerson_coord_inv<F: Real>(alpha: Alpha<F>, s: F) -> F {
    signed_pow(alpha.degree() * s, alpha.degree().recip())
}

/// `φ_α(x, y) = (x|x|^α/(α+1), y)`.
pub fn meyerson<F: Real>(alpha: Alpha<F>, p: GrushinPoint<F>) -> PlanePoint<F> {
    PlanePoint::new(meyerson_coord(alpha, p.x), p.y)
}

/// `φ_α⁻¹(u, v) = (sign(u)[(α+1)|u|]^{1/(α+1)}, v)`.
pub fn meyerson_inv<F: Real>(alpha: Alpha<F>, q: PlanePoint<F>) -> GrushinPoint<F> {
    GrushinPoint::new(meyerson_coord_inv(alpha, q.u), q.v)
}

/// `δ_λ(x, y) = (λx, λ^{α+1} y)`.
pub fn dilation<F: Real>(alpha: Alpha<F>, lambda: F, p: GrushinPoint<F>) -> Result<GrushinPoint<F>> {
    if !(lambda > F::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {lambda}")));
    }
    Ok(GrushinPoint::new(lambda * p.x, lambda.powf(alpha.degree()) * p.y))
}
