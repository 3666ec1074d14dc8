//! Rectilinear domains and the combinatorics of how they meet the singular line.
//!
//! A [`RectilinearDomain`] is the interior of a finite union of closed
//! axis-aligned rectangles. Coordinates are generic: `BigRational` gives exact
//! answers for documents written with decimal coordinates, `f64` is used for
//! image approximations built from sampled maps.

mod components;
pub mod fixtures;
mod incidence;
mod obstruction;

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};

pub use components::{axis_components, side_components, AxisComponents, Side, SideComponent};
pub use incidence::{incidence_graph, IncidenceGraph};
pub use obstruction::{obstruction_check, Certificate, ObstructionOutcome, Witness, MAX_COMPONENTS};

/// Ordered field of coordinates.
pub trait Coord: Clone + PartialOrd + Signed + Debug {}
impl<T: Clone + PartialOrd + Signed + Debug> Coord for T {}

pub type ExactRational = BigRational;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rect<T> {
    pub xmin: T,
    pub xmax: T,
    pub ymin: T,
    pub ymax: T,
}

impl<T: Coord> Rect<T> {
    pub fn new(xmin: T, xmax: T, ymin: T, ymax: T) -> Self {
        Rect { xmin, xmax, ymin, ymax }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.xmin < self.xmax && self.ymin < self.ymax
    }

    pub fn contains_closed(&self, x: &T, y: &T) -> bool {
        &self.xmin <= x && x <= &self.xmax && &self.ymin <= y && y <= &self.ymax
    }

    /// Closures overlap or share a boundary segment of positive length.
    /// Corner-only contact does not count.
    pub fn touches(&self, other: &Self) -> bool {
        let x_overlap = min_ref(&self.xmax, &other.xmax).clone() - max_ref(&self.xmin, &other.xmin).clone();
        let y_overlap = min_ref(&self.ymax, &other.ymax).clone() - max_ref(&self.ymin, &other.ymin).clone();
        let zero = T::zero();
        x_overlap >= zero && y_overlap >= zero && (x_overlap > zero || y_overlap > zero)
    }

    pub fn map<U>(&self, fx: impl Fn(&T) -> U, fy: impl Fn(&T) -> U) -> Rect<U> {
        Rect { xmin: fx(&self.xmin), xmax: fx(&self.xmax), ymin: fy(&self.ymin), ymax: fy(&self.ymax) }
    }
}

pub(crate) fn min_ref<'a, T: PartialOrd>(a: &'a T, b: &'a T) -> &'a T {
    if b < a {
        b
    } else {
        a
    }
}

pub(crate) fn max_ref<'a, T: PartialOrd>(a: &'a T, b: &'a T) -> &'a T {
    if b > a {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectilinearDomain<T> {
    rects: Vec<Rect<T>>,
}

impl<T: Coord> RectilinearDomain<T> {
    /// Validates nondegeneracy of every rectangle and connectivity of the union.
    pub fn new(rects: Vec<Rect<T>>) -> Result<Self> {
        if rects.is_empty() {
            return Err(Error::InvalidDomain("domain has no rectangles".into()));
        }
        if let Some(i) = rects.iter().position(|r| !r.is_nondegenerate()) {
            return Err(Error::InvalidDomain(format!(
                "rectangle {i} is degenerate (need xmin < xmax and ymin < ymax)"
            )));
        }
        let domain = RectilinearDomain { rects };
        let groups = touching_groups(&domain.rects);
        if groups.iter().any(|&g| g != groups[0]) {
            return Err(Error::InvalidDomain("rectangles do not form a connected union".into()));
        }
        Ok(domain)
    }

    /// Skips validation; for derived unions (such as image bounding boxes)
    /// that only feed [`axis_components`].
    pub(crate) fn from_rects_unchecked(rects: Vec<Rect<T>>) -> Self {
        RectilinearDomain { rects }
    }

    pub fn rects(&self) -> &[Rect<T>] {
        &self.rects
    }

    /// Interior membership: each of the four closed quadrants at `(x, y)` is
    /// covered by some rectangle.
    pub fn contains(&self, x: &T, y: &T) -> bool {
        let covers = |right: bool, up: bool| {
            self.rects.iter().any(|r| {
                let xs = if right { &r.xmin <= x && x < &r.xmax } else { &r.xmin < x && x <= &r.xmax };
                let ys = if up { &r.ymin <= y && y < &r.ymax } else { &r.ymin < y && y <= &r.ymax };
                xs && ys
            })
        };
        covers(true, true) && covers(true, false) && covers(false, true) && covers(false, false)
    }

    pub fn contains_closed(&self, x: &T, y: &T) -> bool {
        self.rects.iter().any(|r| r.contains_closed(x, y))
    }

    pub fn bounding_box(&self) -> Rect<T> {
        let mut b = self.rects[0].clone();
        for r in &self.rects[1..] {
            b.xmin = min_ref(&b.xmin, &r.xmin).clone();
            b.xmax = max_ref(&b.xmax, &r.xmax).clone();
            b.ymin = min_ref(&b.ymin, &r.ymin).clone();
            b.ymax = max_ref(&b.ymax, &r.ymax).clone();
        }
        b
    }

    /// Image under `(x, y) ↦ (sx·x, sy·y + ty)` with positive scale factors.
    /// With `sx = λ`, `sy = λ^{α+1}`, `ty = 0` this is the Grushin dilation.
    pub fn scaled(&self, sx: &T, sy: &T, ty: &T) -> Result<Self> {
        if !(sx > &T::zero() && sy > &T::zero()) {
            return Err(Error::InvalidParameter("scale factors must be positive".into()));
        }
        let rects = self
            .rects
            .iter()
            .map(|r| r.map(|x| x.clone() * sx.clone(), |y| y.clone() * sy.clone() + ty.clone()))
            .collect();
        Ok(RectilinearDomain { rects })
    }

    pub fn map_coords<U: Coord>(&self, f: impl Fn(&T) -> U) -> RectilinearDomain<U> {
        RectilinearDomain { rects: self.rects.iter().map(|r| r.map(&f, &f)).collect() }
    }
}

impl RectilinearDomain<BigRational> {
    pub fn to_f64(&self) -> RectilinearDomain<f64> {
        self.map_coords(|v| v.to_f64().unwrap_or(f64::NAN))
    }
}

/// Parses a decimal literal such as `-1.25`, `3`, `2e-3` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = all.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Union-find labels of rectangles connected through [`Rect::touches`].
/// Uses a sweep over `xmin` so grid-like inputs stay near-linear.
pub(crate) fn touching_groups<T: Coord>(rects: &[Rect<T>]) -> Vec<usize> {
    let n = rects.len();
    let mut uf = UnionFind::<usize>::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rects[a].xmin.partial_cmp(&rects[b].xmin).unwrap_or(std::cmp::Ordering::Equal));
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let r = &rects[i];
        active.retain(|&j| rects[j].xmax >= r.xmin);
        for &j in &active {
            if r.touches(&rects[j]) {
                uf.union(i, j);
            }
        }
        active.push(i);
    }
    uf.into_labeling()
}
