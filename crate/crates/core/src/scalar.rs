//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All fractional powers of the form `|t|^p` and `sign(t)|t|^p` go through
//! [`abs_pow`] and [`signed_pow`], so swapping the scalar type (for example a
//! double-double type in tests) changes the precision of every α-power at once.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast, Signed};

/// Floating point scalar: `f32`, `f64`, or any extended-precision type that
/// implements the `num-traits` float stack.
pub trait Real: Float + FloatConst + FromPrimitive + Signed + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal via `NumCast`.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("literal representable in scalar type")
    }

    /// Lossy conversion for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Signed + Debug + Display + Send + Sync + 'static {}

/// `|t|^p`, with `0^p = 0` for `p > 0` and `0^0 = 1`.
#[inline]
pub fn abs_pow<F: Real>(t: F, p: F) -> F {
    let a = t.abs();
    if a.is_zero() {
        if p.is_zero() {
            F::one()
        } else {
            F::zero()
        }
    } else if (p + p).fract().is_zero() && p.abs() <= F::lit(64.0) {
        // Integer and half-integer exponents avoid `powf`.
        let k = (p + p).to_i32().unwrap_or(0);
        if k % 2 == 0 {
            a.powi(k / 2)
        } else {
            a.sqrt().powi(k)
        }
    } else {
        a.powf(p)
    }
}

/// `sign(t)·|t|^p`, odd in `t`; never takes a fractional power of a negative base.
#[inline]
pub fn signed_pow<F: Real>(t: F, p: F) -> F {
    let m = abs_pow(t, p);
    if t < F::zero() {
        -m
    } else {
        m
    }
}

/// `sign(t)` with `sign(0) = 0`.
#[inline]
pub fn sign<F: Real>(t: F) -> F {
    if t > F::zero() {
        F::one()
    } else if t < F::zero() {
        -F::one()
    } else {
        F::zero()
    }
}
