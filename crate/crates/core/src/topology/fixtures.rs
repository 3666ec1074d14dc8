//! Two staircase domains with three axis components each whose incidence
//! graphs differ: in [`staircase`] one left component touches every axis
//! interval, in [`staircase_prime`] the connections are split two and two.

use num_rational::BigRational;

use super::{Rect, RectilinearDomain};

fn int_rect(xmin: i64, xmax: i64, ymin: i64, ymax: i64) -> Rect<BigRational> {
    let q = |v: i64| BigRational::from_integer(v.into());
    Rect::new(q(xmin), q(xmax), q(ymin), q(ymax))
}

/// `[-2,-1]×[-3,2] ∪ [-1,1]×[1,2] ∪ [-1,1]×[-1,0] ∪ [-1,1]×[-3,-2]`.
pub fn staircase() -> RectilinearDomain<BigRational> {
    RectilinearDomain::new(vec![
        int_rect(-2, -1, -3, 2),
        int_rect(-1, 1, 1, 2),
        int_rect(-1, 1, -1, 0),
        int_rect(-1, 1, -3, -2),
    ])
    .expect("fixture is a valid domain")
}

/// `[-2,2]×[1,2] ∪ [-2,-1]×[0,1] ∪ [-2,2]×[-1,0] ∪ [1,2]×[-2,-1] ∪ [-2,2]×[-3,-2]`.
pub fn staircase_prime() -> RectilinearDomain<BigRational> {
    RectilinearDomain::new(vec![
        int_rect(-2, 2, 1, 2),
        int_rect(-2, -1, 0, 1),
        int_rect(-2, 2, -1, 0),
        int_rect(1, 2, -2, -1),
        int_rect(-2, 2, -3, -2),
    ])
    .expect("fixture is a valid domain")
}
