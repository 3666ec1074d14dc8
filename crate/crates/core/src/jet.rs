//! First-order jets of maps `g = (g₁, g₂)` and the horizontal differential
//! operators built from them: `∇_H`, `W`, `W̄`, `D_α g` and `J_g`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Alpha, GrushinPoint};
use crate::scalar::Real;

pub type ComplexValue<F> = Complex<F>;

/// Values and Euclidean partial derivatives of `g` at one base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorizontalJet<F> {
    pub g1: F,
    pub g2: F,
    pub d_g1_dx: F,
    pub d_g1_dy: F,
    pub d_g2_dx: F,
    pub d_g2_dy: F,
}

impl<F: Real> HorizontalJet<F> {
    /// Jet of the identity map at `p`.
    pub fn identity(p: GrushinPoint<F>) -> Self {
        HorizontalJet { g1: p.x, g2: p.y, d_g1_dx: F::one(), d_g1_dy: F::zero(), d_g2_dx: F::zero(), d_g2_dy: F::one() }
    }

    pub fn is_finite(&self) -> bool {
        [self.g1, self.g2, self.d_g1_dx, self.d_g1_dy, self.d_g2_dx, self.d_g2_dy].iter().all(|v| v.is_finite())
    }

    /// Largest absolute difference over the four derivative entries.
    pub fn derivative_distance(&self, other: &Self) -> F {
        (self.d_g1_dx - other.d_g1_dx)
            .abs()
            .max((self.d_g1_dy - other.d_g1_dy).abs())
            .max((self.d_g2_dx - other.d_g2_dx).abs())
            .max((self.d_g2_dy - other.d_g2_dy).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DAlphaMatrix<F> {
    pub m11: F,
    pub m12: F,
    pub m21: F,
    pub m22: F,
}

impl<F: Real> DAlphaMatrix<F> {
    pub fn det(&self) -> F {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Frobenius norm.
    pub fn norm(&self) -> F {
        (self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22).sqrt()
    }

    /// `|m11 − m22| + |m12 + m21|`; zero exactly for multiples of rotations.
    pub fn rotation_defect(&self) -> F {
        (self.m11 - self.m22).abs() + (self.m12 + self.m21).abs()
    }

    pub fn sub(&self, other: &Self) -> Self {
        DAlphaMatrix {
            m11: self.m11 - other.m11,
            m12: self.m12 - other.m12,
            m21: self.m21 - other.m21,
            m22: self.m22 - other.m22,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }
}

/// `(∇_H g₁, ∇_H g₂)` with `∇_H g_i = (∂_x g_i, |x|^α ∂_y g_i)`.
pub fn horizontal_gradient<F: Real>(alpha: Alpha<F>, jet: &HorizontalJet<F>, p: GrushinPoint<F>) -> ([F; 2], [F; 2]) {
    let w = alpha.weight(p.x);
    ([jet.d_g1_dx, w * jet.d_g1_dy], [jet.d_g2_dx, w * jet.d_g2_dy])
}

/// Horizontal Jacobian `J_g = X g₁ · Y_α g₂ − X g₂ · Y_α g₁`.
pub fn horizontal_jacobian<F: Real>(alpha: Alpha<F>, jet: &HorizontalJet<F>, p: GrushinPoint<F>) -> F {
    let w = alpha.weight(p.x);
    w * (jet.d_g1_dx * jet.d_g2_dy - jet.d_g2_dx * jet.d_g1_dy)
}

/// `(W g, W̄ g)` evaluated through the expanded real formulas.
pub fn wirtinger<F: Real>(
    alpha: Alpha<F>,
    jet: &HorizontalJet<F>,
    p: GrushinPoint<F>,
) -> (ComplexValue<F>, ComplexValue<F>) {
    let wx = alpha.weight(p.x);
    let wg = alpha.weight(jet.g1);
    let a = wg * jet.d_g1_dx;
    let b = wx * jet.d_g2_dy;
    let c = jet.d_g2_dx;
    let d = wx * wg * jet.d_g1_dy;
    (Complex::new(a + b, c - d), Complex::new(a - b, c + d))
}

/// `D_α g`, rejecting points with `|g₁| < 1e-12 (1 + |g₁|)`.
pub fn d_alpha_matrix<F: Real>(alpha: Alpha<F>, jet: &HorizontalJet<F>, p: GrushinPoint<F>) -> Result<DAlphaMatrix<F>> {
    let eps = F::lit(1e-12) * (F::one() + jet.g1.abs());
    d_alpha_matrix_tol(alpha, jet, p, eps)
}

/// `D_α g` with an explicit zero threshold for `|g₁|`.
pub fn d_alpha_matrix_tol<F: Real>(
    alpha: Alpha<F>,
    jet: &HorizontalJet<F>,
    p: GrushinPoint<F>,
    zero_threshold: F,
) -> Result<DAlphaMatrix<F>> {
    if jet.g1.abs() < zero_threshold {
        return Err(Error::SingularPoint {
            x: p.x.as_f64(),
            y: p.y.as_f64(),
            reason: format!("|g1| = {} below zero threshold", jet.g1.abs()),
        });
    }
    let wx = alpha.weight(p.x);
    let wg = alpha.weight(jet.g1);
    Ok(DAlphaMatrix { m11: jet.d_g1_dx, m12: wx * jet.d_g1_dy, m21: jet.d_g2_dx / wg, m22: wx * jet.d_g2_dy / wg })
}

/// `|Wg|² − |W̄g|² − 4|g₁|^{2α} det D_α g`, with the last term formed as
/// `4|g₁|^α J_g` so it stays defined where `g₁ = 0`.
pub fn wirtinger_identity_residual<F: Real>(alpha: Alpha<F>, jet: &HorizontalJet<F>, p: GrushinPoint<F>) -> F {
    let (w, wbar) = wirtinger(alpha, jet, p);
    let rhs = F::lit(4.0) * alpha.weight(jet.g1) * horizontal_jacobian(alpha, jet, p);
    w.norm_sqr() - wbar.norm_sqr() - rhs
}

/// The identity residual divided by `|Wg|² + |W̄g|² + |4|g₁|^α J_g|`.
pub fn wirtinger_identity_relative_residual<F: Real>(alpha: Alpha<F>, jet: &HorizontalJet<F>, p: GrushinPoint<F>) -> F {
    let (w, wbar) = wirtinger(alpha, jet, p);
    let rhs = F::lit(4.0) * alpha.weight(jet.g1) * horizontal_jacobian(alpha, jet, p);
    let scale = w.norm_sqr() + wbar.norm_sqr() + rhs.abs();
    if scale.is_zero() {
        return F::zero();
    }
    (w.norm_sqr() - wbar.norm_sqr() - rhs).abs() / scale
}

/// Default central-difference step `ε^{1/3} (1 + |p|)`.
pub fn default_fd_step<F: Real>(p: GrushinPoint<F>) -> F {
    F::epsilon().cbrt() * (F::one() + p.x.hypot(p.y))
}

/// Central-difference jet of `evaluator` at `p` with step `h`.
///
/// A stencil point that the evaluator rejects as outside its domain is
/// reported as [`Error::EvaluationOutsideDomain`].
pub fn finite_diff_jet<F, E>(evaluator: E, p: GrushinPoint<F>, h: F) -> Result<HorizontalJet<F>>
where
    F: Real,
    E: Fn(GrushinPoint<F>) -> Result<GrushinPoint<F>>,
{
    if !(h > F::zero()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let eval = |q: GrushinPoint<F>| {
        evaluator(q).map_err(|e| match e {
            Error::DomainViolation { .. } | Error::EvaluationOutsideDomain { .. } => {
                Error::EvaluationOutsideDomain { x: q.x.as_f64(), y: q.y.as_f64() }
            }
            other => other,
        })
    };
    let centre = eval(p)?;
    let xp = eval(GrushinPoint::new(p.x + h, p.y))?;
    let xm = eval(GrushinPoint::new(p.x - h, p.y))?;
    let yp = eval(GrushinPoint::new(p.x, p.y + h))?;
    let ym = eval(GrushinPoint::new(p.x, p.y - h))?;
    let two_h = h + h;
    Ok(HorizontalJet {
        g1: centre.x,
        g2: centre.y,
        d_g1_dx: (xp.x - xm.x) / two_h,
        d_g1_dy: (yp.x - ym.x) / two_h,
        d_g2_dx: (xp.y - xm.y) / two_h,
        d_g2_dy: (yp.y - ym.y) / two_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dilation;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a(v: f64) -> Alpha<f64> {
        Alpha::new(v).unwrap()
    }

    fn dilation_jet(al: Alpha<f64>, lambda: f64, p: GrushinPoint<f64>) -> HorizontalJet<f64> {
        let q = dilation(al, lambda, p).unwrap();
        HorizontalJet {
            g1: q.x,
            g2: q.y,
            d_g1_dx: lambda,
            d_g1_dy: 0.0,
            d_g2_dx: 0.0,
            d_g2_dy: lambda.powf(al.degree()),
        }
    }

    #[test]
    fn horizontal_gradient_examples() {
        let p = GrushinPoint::new(2.0, 3.0);
        let (g1, g2) = horizontal_gradient(a(1.0), &HorizontalJet::identity(p), p);
        assert_eq!(g1, [1.0, 0.0]);
        assert_eq!(g2, [0.0, 2.0]);

        let p = GrushinPoint::new(0.0, 5.0);
        let jet = HorizontalJet { g1: 1.0, g2: 2.0, d_g1_dx: 3.0, d_g1_dy: 4.0, d_g2_dx: 5.0, d_g2_dy: 6.0 };
        let (g1, g2) = horizontal_gradient(a(0.5), &jet, p);
        assert_eq!(g1[1], 0.0);
        assert_eq!(g2[1], 0.0);

        let p = GrushinPoint::new(1.0, 0.0);
        let (g1, g2) = horizontal_gradient(a(1.0), &dilation_jet(a(1.0), 2.0, p), p);
        assert_eq!(g1, [2.0, 0.0]);
        assert_eq!(g2, [0.0, 4.0]);
    }

    #[test]
    fn wirtinger_identity_map() {
        for al in [0.5, 1.0, 2.0] {
            let p = GrushinPoint::new(-1.7, 0.3);
            let (w, wbar) = wirtinger(a(al), &HorizontalJet::identity(p), p);
            assert_eq!(wbar, Complex::new(0.0, 0.0));
            assert_relative_eq!(w.re, 2.0 * 1.7_f64.powf(al), epsilon = 1e-14);
            assert_eq!(w.im, 0.0);
        }
    }

    #[test]
    fn wirtinger_dilation_and_entire() {
        let al = a(1.0);
        for lambda in [0.5, 2.0, 10.0] {
            let p = GrushinPoint::new(0.7, -1.1);
            let (_, wbar) = wirtinger(al, &dilation_jet(al, lambda, p), p);
            assert!(wbar.norm() <= 1e-13 * lambda.powi(2), "{wbar}");
        }
        // g = (sign(a)|a|^{1/(α+1)} x, a y + b) with a = -3, α = 2
        let al = a(2.0);
        let aa = -3.0_f64;
        let s = aa.signum() * aa.abs().powf(1.0 / 3.0);
        let p = GrushinPoint::new(1.3, 0.4);
        let jet =
            HorizontalJet { g1: s * p.x, g2: aa * p.y + 1.0, d_g1_dx: s, d_g1_dy: 0.0, d_g2_dx: 0.0, d_g2_dy: aa };
        let (w, wbar) = wirtinger(al, &jet, p);
        assert!(wbar.norm() < 1e-14);
        assert_relative_eq!(w.re, 2.0 * aa * 1.3_f64.powi(2), epsilon = 1e-13);
    }

    #[test]
    fn d_alpha_examples() {
        let p = GrushinPoint::new(2.0, 3.0);
        let m = d_alpha_matrix(a(1.0), &HorizontalJet::identity(p), p).unwrap();
        assert_eq!(m, DAlphaMatrix { m11: 1.0, m12: 0.0, m21: 0.0, m22: 1.0 });

        for al in [0.5, 1.0, 3.0] {
            let al = a(al);
            let p = GrushinPoint::new(-0.8, 1.5);
            let m = d_alpha_matrix(al, &dilation_jet(al, 3.0, p), p).unwrap();
            assert_relative_eq!(m.m11, 3.0);
            assert_relative_eq!(m.m22, 3.0, epsilon = 1e-13);
            assert_eq!(m.m12, 0.0);
            assert_eq!(m.m21, 0.0);
        }

        let p = GrushinPoint::new(0.0, 1.0);
        let err = d_alpha_matrix(a(1.0), &HorizontalJet::identity(p), p).unwrap_err();
        assert!(matches!(err, Error::SingularPoint { .. }));
    }

    #[test]
    fn identity_residual_trivial_cases() {
        let p = GrushinPoint::new(1.5, -2.0);
        assert_eq!(wirtinger_identity_residual(a(1.0), &HorizontalJet::identity(p), p), 0.0);
        let zero = HorizontalJet { g1: 0.3, g2: 0.1, d_g1_dx: 0.0, d_g1_dy: 0.0, d_g2_dx: 0.0, d_g2_dy: 0.0 };
        assert_eq!(wirtinger_identity_residual(a(2.0), &zero, p), 0.0);
    }

    #[test]
    fn identity_residual_random_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0_f64;
        for _ in 0..100_000 {
            let al = a(rng.gen_range(0.1..4.0));
            let p = GrushinPoint::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let jet = HorizontalJet {
                g1: rng.gen_range(-5.0..5.0),
                g2: rng.gen_range(-5.0..5.0),
                d_g1_dx: rng.gen_range(-5.0..5.0),
                d_g1_dy: rng.gen_range(-5.0..5.0),
                d_g2_dx: rng.gen_range(-5.0..5.0),
                d_g2_dy: rng.gen_range(-5.0..5.0),
            };
            worst = worst.max(wirtinger_identity_relative_residual(al, &jet, p));
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn identity_residual_matches_det_form_off_axis() {
        // Independent route: 4|g1|^{2α} det D_α g built from the matrix itself.
        let al = a(1.5);
        let p = GrushinPoint::new(0.9, 2.0);
        let jet = HorizontalJet { g1: 1.2, g2: -0.3, d_g1_dx: 0.4, d_g1_dy: -1.1, d_g2_dx: 2.2, d_g2_dy: 0.7 };
        let m = d_alpha_matrix(al, &jet, p).unwrap();
        let (w, wbar) = wirtinger(al, &jet, p);
        let lhs = w.norm_sqr() - wbar.norm_sqr();
        let rhs = 4.0 * 1.2_f64.powf(3.0) * m.det();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn finite_differences_exact_on_affine() {
        let lin = |q: GrushinPoint<f64>| Ok(GrushinPoint::new(2.0 * q.x, 3.0 * q.y));
        for h in [1e-1, 1e-3, 0.5] {
            let jet = finite_diff_jet(lin, GrushinPoint::new(0.25, -0.5), h).unwrap();
            let expect = HorizontalJet { g1: 0.5, g2: -1.5, d_g1_dx: 2.0, d_g1_dy: 0.0, d_g2_dx: 0.0, d_g2_dy: 3.0 };
            assert!(jet.derivative_distance(&expect) <= 1e-14 / h);
        }
        let p = GrushinPoint::new(0.75, 1.25);
        let jet = finite_diff_jet(Ok, p, 0.125).unwrap();
        assert_eq!(jet, HorizontalJet::identity(p));
    }

    #[test]
    fn finite_differences_report_domain_exit() {
        let half_plane = |q: GrushinPoint<f64>| {
            if q.x > 0.0 {
                Ok(q)
            } else {
                Err(Error::DomainViolation { x: q.x, y: q.y })
            }
        };
        let err = finite_diff_jet(half_plane, GrushinPoint::new(0.01, 0.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::EvaluationOutsideDomain { .. }));
        assert!(finite_diff_jet(half_plane, GrushinPoint::new(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn default_step_scales() {
        let h = default_fd_step(GrushinPoint::new(0.0, 0.0));
        assert_relative_eq!(h, f64::EPSILON.cbrt());
    }

    proptest! {
        #[test]
        fn residual_vanishes_for_arbitrary_jets(
            al in 0.05..5.0_f64,
            x in -10.0..10.0_f64, y in -10.0..10.0_f64,
            e in proptest::array::uniform6(-10.0..10.0_f64),
        ) {
            let p = GrushinPoint::new(x, y);
            let jet = HorizontalJet { g1: e[0], g2: e[1], d_g1_dx: e[2], d_g1_dy: e[3], d_g2_dx: e[4], d_g2_dy: e[5] };
            prop_assert!(wirtinger_identity_relative_residual(a(al), &jet, p) <= 1e-10);
        }
    }
}
