use serde::Serialize;

use super::components::{axis_components, side_components, AxisComponents, Side, SideComponent};
use super::{max_ref, min_ref, Coord, RectilinearDomain};

/// Bipartite graph: side components on one part, axis components on the
/// other, an edge wherever a side component abuts an axis interval along a
/// segment of positive length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceGraph<T> {
    pub axis: AxisComponents<T>,
    pub sides: Vec<SideComponent<T>>,
    /// `(side index, axis index)`, sorted and without duplicates.
    pub edges: Vec<(usize, usize)>,
}

impl<T: Coord> IncidenceGraph<T> {
    pub fn side_neighbors(&self, side: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.0 == side).map(|e| e.1).collect()
    }

    pub fn axis_neighbors(&self, axis: usize) -> Vec<usize> {
        self.edges.iter().filter(|e| e.1 == axis).map(|e| e.0).collect()
    }

    pub fn side_degrees(&self) -> Vec<usize> {
        (0..self.sides.len()).map(|s| self.side_neighbors(s).len()).collect()
    }

    pub fn axis_degrees(&self) -> Vec<usize> {
        (0..self.axis.len()).map(|a| self.axis_neighbors(a).len()).collect()
    }

    pub fn label_counts(&self) -> (usize, usize) {
        let left = self.sides.iter().filter(|s| s.side == Side::Left).count();
        (left, self.sides.len() - left)
    }
}

pub fn incidence_graph<T: Coord>(domain: &RectilinearDomain<T>) -> IncidenceGraph<T> {
    let axis = axis_components(domain);
    let sides = side_components(domain);
    let zero = T::zero();
    let mut edges = Vec::new();
    for (si, comp) in sides.iter().enumerate() {
        for piece in &comp.pieces {
            let on_axis = match comp.side {
                Side::Left => piece.xmax == zero,
                Side::Right => piece.xmin == zero,
            };
            if !on_axis {
                continue;
            }
            for (ai, (lo, hi)) in axis.intervals.iter().enumerate() {
                let overlap = min_ref(hi, &piece.ymax).clone() - max_ref(lo, &piece.ymin).clone();
                if overlap > zero {
                    edges.push((si, ai));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    IncidenceGraph { axis, sides, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Rect;

    #[test]
    fn u_shape_edges() {
        let d = RectilinearDomain::new(vec![
            Rect::new(-2.0, -1.0, 0.0, 3.0),
            Rect::new(-1.0, 1.0, 0.0, 1.0),
            Rect::new(-1.0, 1.0, 2.0, 3.0),
        ])
        .unwrap();
        let g = incidence_graph(&d);
        assert_eq!(g.axis.len(), 2);
        assert_eq!(g.sides.len(), 3);
        assert_eq!(g.side_degrees(), vec![2, 1, 1]);
        assert_eq!(g.axis_degrees(), vec![2, 2]);
        assert_eq!(g.label_counts(), (1, 2));
    }
}
