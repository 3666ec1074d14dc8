use serde::Serialize;

use super::{max_ref, min_ref, Coord, Rect, RectilinearDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Connected components of `Ω ∩ {x = 0}`, as open intervals in `y`, sorted
/// from top to bottom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisComponents<T> {
    pub intervals: Vec<(T, T)>,
}

impl<T> AxisComponents<T> {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// One connected component of `Ω ∩ {x < 0}` or `Ω ∩ {x > 0}`, stored as the
/// pieces of the original rectangles lying on that side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideComponent<T> {
    pub side: Side,
    pub pieces: Vec<Rect<T>>,
}

pub fn axis_components<T: Coord>(domain: &RectilinearDomain<T>) -> AxisComponents<T> {
    let zero = T::zero();
    let left: Vec<&Rect<T>> = domain.rects().iter().filter(|r| r.xmin < zero && r.xmax >= zero).collect();
    let right: Vec<&Rect<T>> = domain.rects().iter().filter(|r| r.xmin <= zero && r.xmax > zero).collect();

    let mut breaks: Vec<T> = Vec::new();
    for r in left.iter().chain(right.iter()) {
        breaks.push(r.ymin.clone());
        breaks.push(r.ymax.clone());
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    breaks.dedup();

    let covered = |set: &[&Rect<T>], lo: &T, hi: &T| set.iter().any(|r| &r.ymin <= lo && &r.ymax >= hi);
    let mut intervals: Vec<(T, T)> = Vec::new();
    let mut run_start: Option<T> = None;
    for w in breaks.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if covered(&left, lo, hi) && covered(&right, lo, hi) {
            if run_start.is_none() {
                run_start = Some(lo.clone());
            }
        } else if let Some(s) = run_start.take() {
            intervals.push((s, lo.clone()));
        }
    }
    if let (Some(s), Some(last)) = (run_start, breaks.last()) {
        intervals.push((s, last.clone()));
    }
    intervals.reverse();
    AxisComponents { intervals }
}

pub(crate) fn side_pieces<T: Coord>(domain: &RectilinearDomain<T>, side: Side) -> Vec<Rect<T>> {
    let zero = T::zero();
    domain
        .rects()
        .iter()
        .filter_map(|r| match side {
            Side::Left if r.xmin < zero => {
                Some(Rect::new(r.xmin.clone(), min_ref(&r.xmax, &zero).clone(), r.ymin.clone(), r.ymax.clone()))
            }
            Side::Right if r.xmax > zero => {
                Some(Rect::new(max_ref(&r.xmin, &zero).clone(), r.xmax.clone(), r.ymin.clone(), r.ymax.clone()))
            }
            _ => None,
        })
        .collect()
}

/// Left components first, then right; within a side ordered by the top edge,
/// highest first.
pub fn side_components<T: Coord>(domain: &RectilinearDomain<T>) -> Vec<SideComponent<T>> {
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        let pieces = side_pieces(domain, side);
        let n = pieces.len();
        let labels = super::touching_groups(&pieces);
        let mut groups: Vec<Vec<Rect<T>>> = Vec::new();
        let mut label_slot: Vec<Option<usize>> = vec![None; n];
        for (i, piece) in pieces.into_iter().enumerate() {
            let slot = *label_slot[labels[i]].get_or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[slot].push(piece);
        }
        let top = |g: &Vec<Rect<T>>| {
            let mut t = g[0].ymax.clone();
            for r in g {
                t = max_ref(&t, &r.ymax).clone();
            }
            t
        };
        groups.sort_by(|a, b| top(b).partial_cmp(&top(a)).unwrap_or(std::cmp::Ordering::Equal));
        out.extend(groups.into_iter().map(|pieces| SideComponent { side, pieces }));
    }
    out
}
