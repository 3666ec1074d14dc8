//! Axis-preserving holomorphic maps as a closed expression grammar.
//!
//! Every node evaluates its value and its complex derivative exactly, so the
//! conjugated Grushin maps built from these trees have analytic jets.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PlanePoint;
use crate::jet::ComplexValue;
use crate::scalar::Real;

/// Closed axis-aligned rectangle in the holomorphic plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneRect<F> {
    pub umin: F,
    pub umax: F,
    pub vmin: F,
    pub vmax: F,
}

impl<F: Real> PlaneRect<F> {
    pub fn new(umin: F, umax: F, vmin: F, vmax: F) -> Result<Self> {
        if !(umin < umax && vmin < vmax) {
            return Err(Error::InvalidParameter("plane rectangle must satisfy umin < umax and vmin < vmax".into()));
        }
        Ok(PlaneRect { umin, umax, vmin, vmax })
    }

    pub fn contains(&self, z: Complex<F>) -> bool {
        z.re >= self.umin && z.re <= self.umax && z.im >= self.vmin && z.im <= self.vmax
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum HoloExpr<F> {
    /// `z ↦ a z + i c` with real `a ≠ 0`.
    RealAffine { a: F, c: F },
    /// `z ↦ z + 1/z`.
    Joukovski,
    /// `z ↦ Σ coeffs[k] z^{2k+1}`, axis-preserving only on `domain`.
    OddRealPoly { coeffs: Vec<F>, domain: PlaneRect<F> },
    /// `z ↦ z + re + i im`. Not axis-preserving when `re ≠ 0`; kept to express
    /// counterexamples.
    Translate { re: F, im: F },
    /// `outer ∘ inner`.
    Compose { outer: Box<HoloExpr<F>>, inner: Box<HoloExpr<F>> },
}

impl<F: Real> HoloExpr<F> {
    pub fn identity() -> Self {
        HoloExpr::RealAffine { a: F::one(), c: F::zero() }
    }

    pub fn real_affine(a: F, c: F) -> Result<Self> {
        if a.is_zero() || !a.is_finite() || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("RealAffine requires finite a != 0, got a = {a}")));
        }
        Ok(HoloExpr::RealAffine { a, c })
    }

    pub fn joukovski() -> Self {
        HoloExpr::Joukovski
    }

    pub fn odd_real_poly(coeffs: Vec<F>, domain: PlaneRect<F>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidParameter("OddRealPoly needs a nonzero coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("OddRealPoly coefficients must be finite".into()));
        }
        Ok(HoloExpr::OddRealPoly { coeffs, domain })
    }

    pub fn translate(re: F, im: F) -> Self {
        HoloExpr::Translate { re, im }
    }

    pub fn compose(outer: HoloExpr<F>, inner: HoloExpr<F>) -> Self {
        HoloExpr::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }

    /// Re-checks the constructor invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            HoloExpr::RealAffine { a, c } => Self::real_affine(*a, *c).map(|_| ()),
            HoloExpr::Joukovski => Ok(()),
            HoloExpr::OddRealPoly { coeffs, domain } => {
                PlaneRect::new(domain.umin, domain.umax, domain.vmin, domain.vmax)?;
                Self::odd_real_poly(coeffs.clone(), *domain).map(|_| ())
            }
            HoloExpr::Translate { re, im } => {
                if re.is_finite() && im.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("Translate shift must be finite".into()))
                }
            }
            HoloExpr::Compose { outer, inner } => {
                outer.validate()?;
                inner.validate()
            }
        }
    }

    /// Value and holomorphic derivative at `z`.
    pub fn eval(&self, z: Complex<F>) -> Result<(Complex<F>, Complex<F>)> {
        match self {
            HoloExpr::RealAffine { a, c } => Ok((z * *a + Complex::new(F::zero(), *c), Complex::new(*a, F::zero()))),
            HoloExpr::Joukovski => {
                if z.re.is_zero() && z.im.is_zero() {
                    return Err(Error::PoleHit { re: 0.0, im: 0.0 });
                }
                let inv = z.inv();
                Ok((z + inv, Complex::new(F::one(), F::zero()) - inv * inv))
            }
            HoloExpr::OddRealPoly { coeffs, domain } => {
                if !domain.contains(z) {
                    return Err(Error::DomainViolation { x: z.re.as_f64(), y: z.im.as_f64() });
                }
                let z2 = z * z;
                // Horner in z² for Σ c_k z^{2k}, then multiply by z.
                let mut even = Complex::new(F::zero(), F::zero());
                let mut deriv = Complex::new(F::zero(), F::zero());
                for (k, c) in coeffs.iter().enumerate().rev() {
                    even = even * z2 + Complex::new(*c, F::zero());
                    let degree = F::from_usize(2 * k + 1).unwrap();
                    deriv = deriv * z2 + Complex::new(*c * degree, F::zero());
                }
                Ok((even * z, deriv))
            }
            HoloExpr::Translate { re, im } => Ok((z + Complex::new(*re, *im), Complex::new(F::one(), F::zero()))),
            HoloExpr::Compose { outer, inner } => {
                let (w, dw) = inner.eval(z)?;
                let (v, dv) = outer.eval(w)?;
                Ok((v, dv * dw))
            }
        }
    }

    /// True when `Re f(z) = 0 ⟺ Re z = 0` holds on the whole plane by
    /// construction. `OddRealPoly` never qualifies; it needs
    /// [`check_axis_preservation`].
    pub fn is_axis_preserving(&self) -> bool {
        match self {
            HoloExpr::RealAffine { .. } | HoloExpr::Joukovski => true,
            HoloExpr::Translate { re, .. } => re.is_zero(),
            HoloExpr::OddRealPoly { .. } => false,
            HoloExpr::Compose { outer, inner } => outer.is_axis_preserving() && inner.is_axis_preserving(),
        }
    }

    pub fn is_symbolically_invertible(&self) -> bool {
        match self {
            HoloExpr::RealAffine { .. } | HoloExpr::Translate { .. } => true,
            HoloExpr::Joukovski | HoloExpr::OddRealPoly { .. } => false,
            HoloExpr::Compose { outer, inner } => {
                outer.is_symbolically_invertible() && inner.is_symbolically_invertible()
            }
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        match self {
            HoloExpr::RealAffine { a, c } => Ok(HoloExpr::RealAffine { a: a.recip(), c: -*c / *a }),
            HoloExpr::Translate { re, im } => Ok(HoloExpr::Translate { re: -*re, im: -*im }),
            HoloExpr::Joukovski => Err(Error::NotInvertibleSymbolically("Joukovski".into())),
            HoloExpr::OddRealPoly { .. } => Err(Error::NotInvertibleSymbolically("OddRealPoly".into())),
            HoloExpr::Compose { outer, inner } => Ok(HoloExpr::compose(inner.inverse()?, outer.inverse()?)),
        }
    }

    /// Image of a rectangle under an expression built only from `RealAffine`
    /// and `Translate` nodes (those act coordinate-wise).
    pub fn image_rect(&self, r: PlaneRect<F>) -> Result<PlaneRect<F>> {
        match self {
            HoloExpr::RealAffine { a, c } => {
                let (u0, u1) = minmax(*a * r.umin, *a * r.umax);
                let (v0, v1) = minmax(*a * r.vmin + *c, *a * r.vmax + *c);
                Ok(PlaneRect { umin: u0, umax: u1, vmin: v0, vmax: v1 })
            }
            HoloExpr::Translate { re, im } => {
                Ok(PlaneRect { umin: r.umin + *re, umax: r.umax + *re, vmin: r.vmin + *im, vmax: r.vmax + *im })
            }
            HoloExpr::Compose { outer, inner } => outer.image_rect(inner.image_rect(r)?),
            _ => Err(Error::NotInvertibleSymbolically("rectangle image of non-affine expression".into())),
        }
    }

    /// Largest `OddRealPoly` domain restriction reachable from the root, used
    /// when probing axis preservation.
    pub fn declared_domain(&self) -> Option<PlaneRect<F>> {
        match self {
            HoloExpr::OddRealPoly { domain, .. } => Some(*domain),
            HoloExpr::Compose { inner, .. } => inner.declared_domain(),
            _ => None,
        }
    }
}

fn minmax<F: Real>(a: F, b: F) -> (F, F) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Exact value and holomorphic derivative of `expr` at `z`.
pub fn holo_eval<F: Real>(expr: &HoloExpr<F>, z: PlanePoint<F>) -> Result<(PlanePoint<F>, ComplexValue<F>)> {
    let (v, d) = expr.eval(z.to_complex())?;
    Ok((PlanePoint::from_complex(v), d))
}

/// Probes `Re f(z) = 0 ⟺ Re z = 0` on an `n × n` grid of `rect` (plus the
/// column `Re z = 0` when the rectangle straddles it), requiring in addition
/// that `Re f` keeps one sign on each side of the axis.
pub fn check_axis_preservation<F: Real>(expr: &HoloExpr<F>, rect: PlaneRect<F>, n: usize) -> Result<()> {
    let n = n.max(2);
    let step_u = (rect.umax - rect.umin) / F::from_usize(n - 1).unwrap();
    let step_v = (rect.vmax - rect.vmin) / F::from_usize(n - 1).unwrap();
    let mut us: Vec<F> = (0..n).map(|i| rect.umin + step_u * F::from_usize(i).unwrap()).collect();
    if rect.umin < F::zero() && rect.umax > F::zero() {
        us.push(F::zero());
    }
    // Sign of Re f seen on the left and right of the axis.
    let mut side_sign: [Option<bool>; 2] = [None, None];
    for &u in &us {
        for j in 0..n {
            let v = rect.vmin + step_v * F::from_usize(j).unwrap();
            let z = Complex::new(u, v);
            let (w, _) = match expr.eval(z) {
                Ok(r) => r,
                Err(Error::PoleHit { .. }) => continue,
                Err(e) => return Err(e),
            };
            let tol = F::lit(1e-12) * (F::one() + w.norm());
            let fail = Err(Error::AxisPreservation { re: u.as_f64(), im: v.as_f64() });
            if u.is_zero() {
                if w.re.abs() > tol {
                    return fail;
                }
                continue;
            }
            if w.re.abs() <= tol {
                return fail;
            }
            let slot = &mut side_sign[usize::from(u > F::zero())];
            let positive = w.re > F::zero();
            match slot {
                Some(s) if *s != positive => return fail,
                _ => *slot = Some(positive),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn joukovski_value_and_derivative() {
        let (v, d) = holo_eval(&HoloExpr::joukovski(), PlanePoint::new(2.0, 0.0)).unwrap();
        assert_eq!((v.u, v.v), (2.5, 0.0));
        assert_eq!(d, c(0.75, 0.0));
        let err = holo_eval(&HoloExpr::<f64>::joukovski(), PlanePoint::new(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::PoleHit { .. }));
    }

    #[test]
    fn identity_and_composition() {
        let z = c(0.3, -1.7);
        let (v, d) = HoloExpr::identity().eval(z).unwrap();
        assert_eq!((v, d), (z, c(1.0, 0.0)));
        let e = HoloExpr::compose(HoloExpr::real_affine(2.0, 0.0).unwrap(), HoloExpr::real_affine(3.0, 1.0).unwrap());
        let (v, d) = e.eval(z).unwrap();
        let expect = z * 6.0 + c(0.0, 2.0);
        assert_relative_eq!(v.re, expect.re, epsilon = 1e-14);
        assert_relative_eq!(v.im, expect.im, epsilon = 1e-14);
        assert_eq!(d, c(6.0, 0.0));
    }

    #[test]
    fn real_affine_rejects_zero_slope() {
        assert!(HoloExpr::real_affine(0.0, 1.0).is_err());
        assert!(HoloExpr::RealAffine { a: 0.0, c: 1.0 }.validate().is_err());
    }

    #[test]
    fn odd_poly_domain_and_values() {
        let dom = PlaneRect::new(-1.0, 1.0, -0.5, 0.5).unwrap();
        let p = HoloExpr::odd_real_poly(vec![1.0, 0.25], dom).unwrap();
        let z = c(0.5, 0.2);
        let (v, d) = p.eval(z).unwrap();
        let expect = z + z * z * z * 0.25;
        let dexpect = c(1.0, 0.0) + z * z * 0.75;
        assert_relative_eq!((v - expect).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((d - dexpect).norm(), 0.0, epsilon = 1e-15);
        assert!(matches!(p.eval(c(2.0, 0.0)), Err(Error::DomainViolation { .. })));
        check_axis_preservation(&p, dom, 21).unwrap();
        // z³ alone: Re = x(x² − 3y²) changes sign inside |y| > |x|/√3.
        let wide = PlaneRect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let cube = HoloExpr::odd_real_poly(vec![0.0, 1.0], wide).unwrap();
        assert!(matches!(check_axis_preservation(&cube, wide, 21), Err(Error::AxisPreservation { .. })));
    }

    #[test]
    fn axis_flags() {
        assert!(HoloExpr::<f64>::joukovski().is_axis_preserving());
        assert!(!HoloExpr::translate(1.0, 0.0).is_axis_preserving());
        assert!(HoloExpr::translate(0.0, 2.0).is_axis_preserving());
        let rect = PlaneRect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert!(check_axis_preservation(&HoloExpr::translate(1.0, 0.0), rect, 11).is_err());
        check_axis_preservation(&HoloExpr::<f64>::joukovski(), rect, 11).unwrap();
    }

    #[test]
    fn inverses() {
        let e = HoloExpr::compose(HoloExpr::real_affine(-2.0, 0.5).unwrap(), HoloExpr::translate(0.0, 3.0));
        let inv = e.inverse().unwrap();
        let z = c(0.7, -0.2);
        let (w, _) = e.eval(z).unwrap();
        let (back, _) = inv.eval(w).unwrap();
        assert!((back - z).norm() < 1e-14);
        assert!(HoloExpr::<f64>::joukovski().inverse().is_err());
    }

    proptest! {
        #[test]
        fn joukovski_real_part_formula(x in -3.0..3.0_f64, y in -3.0..3.0_f64) {
            prop_assume!(x * x + y * y > 1e-3);
            let (w, _) = HoloExpr::joukovski().eval(c(x, y)).unwrap();
            let expect = x * (1.0 + 1.0 / (x * x + y * y));
            prop_assert!((w.re - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
            prop_assert_eq!(w.re == 0.0, x == 0.0);
        }
    }
}
