//! Globally adaptive Gauss–Kronrod (7/15) quadrature, generic over the scalar.
//!
//! The integrand returns two components; refinement is driven by the first
//! and the second is integrated on the same partition. Length routines use
//! the second slot for `∫|γ₁′|`, so that the lower bound they report comes
//! from exactly the same nodes and positive weights as the length itself.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<F> {
    pub value: [F; 2],
    /// Sum of `|Kronrod − Gauss|` over the final partition, first component.
    pub error: F,
    pub intervals: usize,
}

struct Panel<F> {
    a: F,
    b: F,
    value: [F; 2],
    error: F,
}

impl<F: Real> PartialEq for Panel<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<F: Real> Eq for Panel<F> {}
impl<F: Real> PartialOrd for Panel<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<F: Real> Ord for Panel<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn gk15<F: Real>(f: &impl Fn(F) -> [F; 2], a: F, b: F) -> Panel<F> {
    let half = F::lit(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let mut k = [F::zero(); 2];
    let mut g = F::zero();
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let pts: &[F] = if x == 0.0 { &[F::zero()] } else { &[F::lit(x), -F::lit(x)] };
        for &dx in pts {
            let v = f(c + h * dx);
            k[0] = k[0] + F::lit(w) * v[0];
            k[1] = k[1] + F::lit(w) * v[1];
            if i % 2 == 1 {
                g = g + F::lit(WG[i / 2]) * v[0];
            }
        }
    }
    let value = [k[0] * h, k[1] * h];
    let error = ((k[0] - g) * h).abs();
    Panel { a, b, value, error: if error.is_nan() { F::infinity() } else { error } }
}

/// Integrates `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until the total error is below `rel_tol · |value|` or
/// `max_intervals` panels are in use.
pub fn adaptive_gk<F: Real>(f: impl Fn(F) -> [F; 2], a: F, b: F, rel_tol: F, max_intervals: usize) -> Quadrature<F> {
    if a == b {
        return Quadrature { value: [F::zero(); 2], error: F::zero(), intervals: 0 };
    }
    let mut heap = BinaryHeap::new();
    heap.push(gk15(&f, a, b));
    loop {
        let (mut total, mut err) = ([F::zero(); 2], F::zero());
        for p in heap.iter() {
            total[0] = total[0] + p.value[0];
            total[1] = total[1] + p.value[1];
            err = err + p.error;
        }
        if !total[0].is_finite() || err <= rel_tol * total[0].abs() || heap.len() >= max_intervals {
            return Quadrature { value: total, error: err, intervals: heap.len() };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = F::lit(0.5) * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            return Quadrature { value: total, error: err, intervals: heap.len() };
        }
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
    }
}
