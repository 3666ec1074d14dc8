use serde::Serialize;

use super::components::Side;
use super::incidence::{incidence_graph, IncidenceGraph};
use super::{Coord, RectilinearDomain};
use crate::error::{Error, Result};

/// Largest number of axis or side components per domain handled by the
/// exhaustive bijection search.
pub const MAX_COMPONENTS: usize = 12;

/// Reason no conformal map can exist between the two domains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    AxisCountMismatch {
        first: usize,
        second: usize,
    },
    SideCountMismatch {
        first: usize,
        second: usize,
    },
    /// Sorted degrees of side components.
    SideDegreeMismatch {
        first: Vec<usize>,
        second: Vec<usize>,
    },
    /// `(left, right)` counts that cannot be matched even allowing a swap.
    SideLabelMismatch {
        first: (usize, usize),
        second: (usize, usize),
    },
    NoIncidenceIsomorphism {
        bijections_checked: usize,
    },
}

/// A label-respecting isomorphism of incidence graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// `axis_map[i]` is the axis component of the second domain matched with
    /// axis component `i` of the first.
    pub axis_map: Vec<usize>,
    pub side_map: Vec<usize>,
    /// Left and right are exchanged.
    pub side_swap: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ObstructionOutcome {
    NoObstruction { witness: Witness },
    Obstruction { certificate: Certificate },
}

impl ObstructionOutcome {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, ObstructionOutcome::Obstruction { .. })
    }
}

/// Compares the incidence graphs of two domains. Cheap invariants are tried
/// first; if they agree, axis bijections are enumerated with degree pruning.
pub fn obstruction_check<T: Coord>(
    first: &RectilinearDomain<T>,
    second: &RectilinearDomain<T>,
    allow_side_swap: bool,
) -> Result<ObstructionOutcome> {
    let g1 = incidence_graph(first);
    let g2 = incidence_graph(second);
    let obstruct = |certificate| Ok(ObstructionOutcome::Obstruction { certificate });

    if g1.axis.len() != g2.axis.len() {
        return obstruct(Certificate::AxisCountMismatch { first: g1.axis.len(), second: g2.axis.len() });
    }
    if g1.sides.len() != g2.sides.len() {
        return obstruct(Certificate::SideCountMismatch { first: g1.sides.len(), second: g2.sides.len() });
    }
    let mut d1 = g1.side_degrees();
    let mut d2 = g2.side_degrees();
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return obstruct(Certificate::SideDegreeMismatch { first: d1, second: d2 });
    }
    let (l1, r1) = g1.label_counts();
    let (l2, r2) = g2.label_counts();
    let straight_ok = (l1, r1) == (l2, r2);
    let swapped_ok = allow_side_swap && (l1, r1) == (r2, l2);
    if !straight_ok && !swapped_ok {
        return obstruct(Certificate::SideLabelMismatch { first: (l1, r1), second: (l2, r2) });
    }

    let largest = g1.axis.len().max(g1.sides.len());
    if largest > MAX_COMPONENTS {
        return Err(Error::SearchBudgetExceeded(largest));
    }

    let mut swaps = Vec::new();
    if straight_ok {
        swaps.push(false);
    }
    if swapped_ok {
        swaps.push(true);
    }
    let mut search =
        Search { g1: &g1, g2: &g2, axis_deg1: g1.axis_degrees(), axis_deg2: g2.axis_degrees(), swaps, checked: 0 };
    let n = g1.axis.len();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    match search.extend(&mut perm, &mut used) {
        Some(witness) => Ok(ObstructionOutcome::NoObstruction { witness }),
        None => obstruct(Certificate::NoIncidenceIsomorphism { bijections_checked: search.checked }),
    }
}

struct Search<'a, T> {
    g1: &'a IncidenceGraph<T>,
    g2: &'a IncidenceGraph<T>,
    axis_deg1: Vec<usize>,
    axis_deg2: Vec<usize>,
    swaps: Vec<bool>,
    checked: usize,
}

impl<T: Coord> Search<'_, T> {
    fn extend(&mut self, perm: &mut Vec<usize>, used: &mut [bool]) -> Option<Witness> {
        let i = perm.len();
        if i == used.len() {
            self.checked += 1;
            return self.match_sides(perm);
        }
        for j in 0..used.len() {
            if used[j] || self.axis_deg1[i] != self.axis_deg2[j] {
                continue;
            }
            used[j] = true;
            perm.push(j);
            let found = self.extend(perm, used);
            perm.pop();
            used[j] = false;
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Under a fixed axis bijection, side components are matched by their
    /// label and image neighbourhood.
    fn match_sides(&self, perm: &[usize]) -> Option<Witness> {
        let key2: Vec<(Side, Vec<usize>)> =
            (0..self.g2.sides.len()).map(|s| (self.g2.sides[s].side, self.g2.side_neighbors(s))).collect();
        'swap: for &swap in &self.swaps {
            let mut taken = vec![false; key2.len()];
            let mut side_map = Vec::with_capacity(self.g1.sides.len());
            for (s, comp) in self.g1.sides.iter().enumerate() {
                let label = if swap { comp.side.flipped() } else { comp.side };
                let mut nbrs: Vec<usize> = self.g1.side_neighbors(s).into_iter().map(|a| perm[a]).collect();
                nbrs.sort_unstable();
                let hit = (0..key2.len()).find(|&t| !taken[t] && key2[t].0 == label && key2[t].1 == nbrs);
                match hit {
                    Some(t) => {
                        taken[t] = true;
                        side_map.push(t);
                    }
                    None => continue 'swap,
                }
            }
            return Some(Witness { axis_map: perm.to_vec(), side_map, side_swap: swap });
        }
        None
    }
}
