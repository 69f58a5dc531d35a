//! Color-symmetry counting for uniform-list instances.
//!
//! When every list is the full palette `[q]`, a pinning only distinguishes the
//! colors it actually uses. Colors are split into *named* classes (those
//! appearing in the pinning, plus any color a query singles out) and a pool of
//! `m` interchangeable *fresh* colors. Proper completions are enumerated over
//! the reduced alphabet: a free vertex takes a named class or an abstract
//! fresh label, labels introduced in canonical order, and each completed
//! pattern contributes the falling factorial `m (m-1) ... (m-J+1)` where `J`
//! is the number of distinct fresh labels used. Counts stay exact (`BigInt`)
//! for any `q`.

use crate::instances::{Color, PinnedInstance, VertexId};
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type ClassId = usize;

/// A uniform-list counting pattern over a small free subgraph.
///
/// Free vertices are tracked positionally; adjacency and per-vertex forbidden
/// named classes are bitmasks. `named` is the number of distinguishable
/// classes, `fresh` the size of the interchangeable pool.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymPattern {
    free: Vec<VertexId>,
    adj: Vec<u64>,
    forbidden: Vec<u64>,
    pub named: usize,
    pub fresh: u64,
}

impl SymPattern {
    /// Pattern of a pinned uniform-list instance. Returns the pattern and the
    /// named classes' concrete colors in class order.
    pub fn from_pinned(pinned: &PinnedInstance) -> (Self, Vec<Color>) {
        assert!(pinned.instance.is_uniform(), "symmetry backend needs uniform lists");
        let free = pinned.free_vertices().to_vec();
        let mut class_colors: Vec<Color> = Vec::new();
        let class_of = |c: Color, class_colors: &mut Vec<Color>| -> usize {
            match class_colors.iter().position(|&x| x == c) {
                Some(i) => i,
                None => {
                    class_colors.push(c);
                    class_colors.len() - 1
                }
            }
        };
        // deterministic class order: first use over sorted pin pairs
        for &(_, c) in pinned.pin.pairs() {
            class_of(c, &mut class_colors);
        }
        let index: std::collections::HashMap<VertexId, usize> =
            free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![0u64; free.len()];
        let mut forbidden = vec![0u64; free.len()];
        for (i, &v) in free.iter().enumerate() {
            for &u in pinned.instance.graph.neighbors(v) {
                if let Some(&j) = index.get(&u) {
                    adj[i] |= 1 << j;
                } else if let Some(c) = pinned.pin.get(u) {
                    let cl = class_of(c, &mut class_colors);
                    forbidden[i] |= 1 << cl;
                }
            }
        }
        let named = class_colors.len();
        let fresh = pinned.instance.q as u64 - named as u64;
        (
            SymPattern { free, adj, forbidden, named, fresh },
            class_colors,
        )
    }

    pub fn free_vertices(&self) -> &[VertexId] {
        &self.free
    }

    pub fn free_index(&self, v: VertexId) -> Option<usize> {
        self.free.iter().position(|&w| w == v)
    }

    pub fn is_class_available(&self, idx: usize, cl: ClassId) -> bool {
        self.forbidden[idx] & (1 << cl) == 0
    }

    /// Free neighbors (indices) of free vertex `idx`.
    pub fn degree(&self, idx: usize) -> usize {
        self.adj[idx].count_ones() as usize
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    /// Promote one fresh color to a new named class; returns its id.
    pub fn promote(&self) -> (Self, ClassId) {
        assert!(self.fresh > 0, "no fresh colors left to promote");
        let mut p = self.clone();
        p.named += 1;
        p.fresh -= 1;
        (p, self.named)
    }

    /// Pin free vertex `idx` to named class `cl`.
    pub fn assign(&self, idx: usize, cl: ClassId) -> Self {
        debug_assert!(self.is_class_available(idx, cl));
        let mut p = self.clone();
        p.remove_vertex(idx, Some(cl));
        p
    }

    /// Drop free vertex `idx` without assigning a color.
    pub fn without(&self, idx: usize) -> Self {
        let mut p = self.clone();
        p.remove_vertex(idx, None);
        p
    }

    /// Forbid named class `cl` at free vertex `idx`.
    pub fn forbid(&self, idx: usize, cl: ClassId) -> Self {
        let mut p = self.clone();
        p.forbidden[idx] |= 1 << cl;
        p
    }

    fn remove_vertex(&mut self, idx: usize, cl: Option<ClassId>) {
        let nbr_mask = self.adj[idx];
        let last = self.free.len() - 1;
        self.free.remove(idx);
        let mut adj = Vec::with_capacity(last);
        let mut forbidden = Vec::with_capacity(last);
        for i in 0..=last {
            if i == idx {
                continue;
            }
            let mut mask = self.adj[i];
            let mut fb = self.forbidden[i];
            if let Some(cl) = cl {
                if nbr_mask & (1 << i) != 0 {
                    fb |= 1 << cl;
                }
            }
            // compact the bit at position idx out of the mask
            let low = mask & ((1u64 << idx) - 1);
            let high = mask >> (idx + 1);
            mask = low | (high << idx);
            adj.push(mask);
            forbidden.push(fb);
        }
        self.adj = adj;
        self.forbidden = forbidden;
    }

    /// Exact number of proper completions of the pattern.
    pub fn count(&self) -> BigInt {
        let n = self.free.len();
        // falling factorials of the fresh pool
        let mut ff = Vec::with_capacity(n + 1);
        ff.push(BigInt::one());
        for j in 0..n {
            let prev = ff[j].clone();
            ff.push(prev * BigInt::from(self.fresh.saturating_sub(j as u64)));
        }
        let mut total = BigInt::zero();
        // assignment per vertex: named class (0..named) or fresh label (bit in fresh_mask[label])
        let mut named_assign: Vec<Option<ClassId>> = vec![None; n];
        let mut fresh_assign: Vec<Option<usize>> = vec![None; n];
        self.count_rec(0, 0, &mut named_assign, &mut fresh_assign, &ff, &mut total);
        total
    }

    fn count_rec(
        &self,
        i: usize,
        fresh_used: usize,
        named_assign: &mut Vec<Option<ClassId>>,
        fresh_assign: &mut Vec<Option<usize>>,
        ff: &[BigInt],
        total: &mut BigInt,
    ) {
        let n = self.free.len();
        if i == n {
            *total += &ff[fresh_used];
            return;
        }
        let nbrs = self.adj[i];
        'classes: for cl in 0..self.named {
            if !self.is_class_available(i, cl) {
                continue;
            }
            for j in 0..i {
                if nbrs & (1 << j) != 0 && named_assign[j] == Some(cl) {
                    continue 'classes;
                }
            }
            named_assign[i] = Some(cl);
            self.count_rec(i + 1, fresh_used, named_assign, fresh_assign, ff, total);
            named_assign[i] = None;
        }
        'labels: for label in 0..fresh_used {
            for j in 0..i {
                if nbrs & (1 << j) != 0 && fresh_assign[j] == Some(label) {
                    continue 'labels;
                }
            }
            fresh_assign[i] = Some(label);
            self.count_rec(i + 1, fresh_used, named_assign, fresh_assign, ff, total);
            fresh_assign[i] = None;
        }
        if (fresh_used as u64) < self.fresh {
            fresh_assign[i] = Some(fresh_used);
            self.count_rec(i + 1, fresh_used + 1, named_assign, fresh_assign, ff, total);
            fresh_assign[i] = None;
        }
    }

    /// Canonical key for memoization: forbidden masks, adjacency, named count,
    /// with the free vertices' identities retained.
    pub fn key(&self) -> (Vec<VertexId>, Vec<u64>, Vec<u64>, usize) {
        (self.free.clone(), self.adj.clone(), self.forbidden.clone(), self.named)
    }
}

/// Symmetric-backend extension count for a pinning of a uniform instance.
pub fn count_for_pinning(pinned: &PinnedInstance) -> BigInt {
    SymPattern::from_pinned(pinned).0.count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_by_enumeration;
    use crate::instances::{BaseGraph, ColoringInstance, PartialColoring};

    #[test]
    fn matches_chromatic_polynomial_of_cycle() {
        // proper q-colorings of C_5: (q-1)^5 - (q-1)
        let base = BaseGraph::new(5, (0..5).map(|i| (i, (i + 1) % 5)).collect()).unwrap();
        let inst = ColoringInstance::from_base_uniform(&base, 97).unwrap();
        let pinned = PinnedInstance::unpinned(inst);
        let m = BigInt::from(96);
        let expect = m.pow(5) - m;
        assert_eq!(count_for_pinning(&pinned), expect);
    }

    #[test]
    fn matches_enumeration_under_pinnings() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base_uniform(&base, 7).unwrap();
        for pin in [
            PartialColoring::empty(),
            PartialColoring::from_pairs([(0, 3)]).unwrap(),
            PartialColoring::from_pairs([(0, 3), (1, 5)]).unwrap(),
        ] {
            let pinned = PinnedInstance::new(inst.clone(), pin).unwrap();
            assert_eq!(count_for_pinning(&pinned), count_by_enumeration(&pinned));
        }
    }

    #[test]
    fn forbid_and_without_shrink_counts() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base_uniform(&base, 9).unwrap();
        let pinned = PinnedInstance::unpinned(inst);
        let (pat, _) = SymPattern::from_pinned(&pinned);
        let (pat_c, c) = pat.promote();
        // forbidding class c at one vertex loses exactly the completions using it there
        let forbidden = pat_c.forbid(0, c);
        let with_c = pat_c.assign(0, c);
        assert_eq!(forbidden.count() + with_c.count(), pat_c.count());
        // dropping a vertex of the triangle leaves a single edge on q colors
        let dropped = pat.without(0);
        assert_eq!(dropped.count(), BigInt::from(9 * 9 - 9));
    }

    #[test]
    fn assign_moves_constraint_to_neighbors() {
        let base = BaseGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = ColoringInstance::from_base_uniform(&base, 5).unwrap();
        let pinned = PinnedInstance::unpinned(inst);
        let (pat, _) = SymPattern::from_pinned(&pinned);
        let (pat, c) = pat.promote();
        let after = pat.assign(0, c);
        assert_eq!(after.free_vertices().len(), 1);
        assert!(!after.is_class_available(0, c));
        assert_eq!(after.count(), BigInt::from(4));
    }
}
