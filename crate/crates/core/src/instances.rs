//! Line-graph coloring instances and pinnings.
//!
//! A [`BaseGraph`] is the graph whose edges become the vertices of the line
//! graph. [`ColoringInstance`] couples the line graph with per-vertex color
//! lists and the clique cover `{V^i}` (one clique per base vertex; every
//! line-graph vertex lies in exactly two of them, pendant base vertices
//! contributing singletons). [`PinnedInstance`] carries all residual data of
//! an instance after pinning a proper partial coloring: residual lists,
//! residual degrees, and the per-clique per-color counts `h(i, c)`.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

pub type VertexId = usize;
pub type Color = u32;

/// A `(vertex, color)` pair; the index element for every matrix in the crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Site {
    pub vertex: VertexId,
    pub color: Color,
}

impl Site {
    pub fn new(vertex: VertexId, color: Color) -> Self {
        Site { vertex, color }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("empty line graph")]
    EmptyLineGraph,
    #[error("self-loop at base vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate base edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("base vertex {0} out of range (vertex_count {1})")]
    VertexOutOfRange(usize, usize),
    #[error("insufficient slack: beta = {beta} < 2 (vertex {vertex}: |L| = {list}, degree = {degree})")]
    InsufficientSlack {
        beta: i64,
        vertex: VertexId,
        list: usize,
        degree: usize,
    },
    #[error("vertex {0} has an empty color list")]
    EmptyList(VertexId),
    #[error("color {color} at vertex {vertex} outside [1, {q}]")]
    ColorOutOfRange { vertex: VertexId, color: Color, q: Color },
    #[error("clique {0} is not a clique in the graph")]
    NotAClique(usize),
    #[error("vertex {0} belongs to {1} cliques of the cover (wanted 1 or 2)")]
    BadCliqueMembership(VertexId, usize),
    #[error("edge {{{0}, {1}}} covered by {2} cliques (wanted exactly 1)")]
    BadEdgeCover(VertexId, VertexId, usize),
    #[error("improper pinning: vertex {vertex} color {color}")]
    ImproperPinning { vertex: VertexId, color: Color },
    #[error("vertex {0} pinned twice")]
    DoublePin(VertexId),
}

/// The base graph `Ĝ = (V̂, Ê)`; its edge set becomes the line graph's vertex set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaseGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl BaseGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, InstanceError> {
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a == b {
                return Err(InstanceError::SelfLoop(a));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(InstanceError::VertexOutOfRange(a.max(b), vertex_count));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(InstanceError::DuplicateEdge(key.0, key.1));
            }
        }
        Ok(BaseGraph { vertex_count, edges })
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.vertex_count];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

/// Undirected simple graph on the line-graph vertices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<VertexId>>,
}

impl Graph {
    pub fn from_adjacency(adj: Vec<Vec<VertexId>>) -> Self {
        let mut adj = adj;
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        Graph { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.adj.len()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn are_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for u in 0..self.adj.len() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components of the subgraph induced by `verts`.
    pub fn components_of(&self, verts: &[VertexId]) -> Vec<Vec<VertexId>> {
        let set: BTreeSet<_> = verts.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for &v in verts {
            if seen.contains(&v) {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![v];
            while let Some(w) = stack.pop() {
                if !seen.insert(w) {
                    continue;
                }
                comp.push(w);
                for &u in self.neighbors(w) {
                    if set.contains(&u) && !seen.contains(&u) {
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

/// Line graph of a base graph, together with the clique cover `{V^i}`.
///
/// Line-graph vertices are indexed by the sorted base-edge pairs in
/// lexicographic order; `clique_cover[i]` lists the line-graph vertices
/// incident to base vertex `i` (singleton for pendant base vertices).
pub fn line_graph(base: &BaseGraph) -> Result<(Graph, Vec<Vec<VertexId>>, Vec<(usize, usize)>), InstanceError> {
    if base.edges.is_empty() {
        return Err(InstanceError::EmptyLineGraph);
    }
    let mut labels: Vec<(usize, usize)> = base
        .edges
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    labels.sort_unstable();
    let n = labels.len();
    let mut cover = vec![Vec::new(); base.vertex_count];
    for (idx, &(a, b)) in labels.iter().enumerate() {
        cover[a].push(idx);
        cover[b].push(idx);
    }
    let mut adj = vec![Vec::new(); n];
    for verts in &cover {
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    Ok((Graph::from_adjacency(adj), cover, labels))
}

/// A list-coloring instance on a line graph (or an asserted clique-covered graph).
#[derive(Debug)]
pub struct ColoringInstance {
    pub graph: Graph,
    pub lists: Vec<BTreeSet<Color>>,
    pub q: Color,
    pub clique_cover: Vec<Vec<VertexId>>,
    pub beta: u32,
    /// Base-edge labels when built from a `BaseGraph`; `None` for explicit input.
    pub vertex_labels: Option<Vec<(usize, usize)>>,
    /// Memoized extension counts keyed by canonical pinning.
    pub(crate) count_cache: dashmap::DashMap<Vec<(VertexId, Color)>, num_bigint::BigInt>,
}

impl ColoringInstance {
    /// Validates lists and the clique cover, computes `beta = min_v(|L_v| - deg v) - 1`.
    pub fn new(
        graph: Graph,
        clique_cover: Vec<Vec<VertexId>>,
        lists: Vec<BTreeSet<Color>>,
        q: Color,
    ) -> Result<Arc<Self>, InstanceError> {
        let n = graph.vertex_count();
        assert_eq!(lists.len(), n, "one list per vertex");
        for (v, list) in lists.iter().enumerate() {
            if list.is_empty() {
                return Err(InstanceError::EmptyList(v));
            }
            for &c in list {
                if c == 0 || c > q {
                    return Err(InstanceError::ColorOutOfRange { vertex: v, color: c, q });
                }
            }
        }
        let mut beta = i64::MAX;
        let mut witness = 0;
        for v in 0..n {
            let slack = lists[v].len() as i64 - graph.degree(v) as i64 - 1;
            if slack < beta {
                beta = slack;
                witness = v;
            }
        }
        if beta < 2 {
            return Err(InstanceError::InsufficientSlack {
                beta,
                vertex: witness,
                list: lists[witness].len(),
                degree: graph.degree(witness),
            });
        }
        let mut membership = vec![0usize; n];
        for (i, verts) in clique_cover.iter().enumerate() {
            for (a, &u) in verts.iter().enumerate() {
                membership[u] += 1;
                for &v in &verts[a + 1..] {
                    if !graph.are_adjacent(u, v) {
                        return Err(InstanceError::NotAClique(i));
                    }
                }
            }
        }
        for (v, &m) in membership.iter().enumerate() {
            if m == 0 || m > 2 {
                return Err(InstanceError::BadCliqueMembership(v, m));
            }
        }
        for (u, v) in graph.edges() {
            let cnt = clique_cover
                .iter()
                .filter(|k| k.contains(&u) && k.contains(&v))
                .count();
            if cnt != 1 {
                return Err(InstanceError::BadEdgeCover(u, v, cnt));
            }
        }
        Ok(Arc::new(ColoringInstance {
            graph,
            lists,
            q,
            clique_cover,
            beta: beta as u32,
            vertex_labels: None,
            count_cache: dashmap::DashMap::new(),
        }))
    }

    /// Instance from a base graph with the derived line graph and cover.
    pub fn from_base(
        base: &BaseGraph,
        lists: Vec<BTreeSet<Color>>,
        q: Color,
    ) -> Result<Arc<Self>, InstanceError> {
        let (graph, cover, labels) = line_graph(base)?;
        let inst = Self::new(graph, cover, lists, q)?;
        // Arc::new above has no other owners yet.
        let mut inst = Arc::try_unwrap(inst).ok().expect("sole owner");
        inst.vertex_labels = Some(labels);
        Ok(Arc::new(inst))
    }

    /// Uniform-list instance: every list is `1..=q`.
    pub fn from_base_uniform(base: &BaseGraph, q: Color) -> Result<Arc<Self>, InstanceError> {
        let (graph, _, _) = line_graph(base)?;
        let n = graph.vertex_count();
        let full: BTreeSet<Color> = (1..=q).collect();
        Self::from_base(base, vec![full; n], q)
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_uniform(&self) -> bool {
        self.lists.iter().all(|l| l.len() == self.q as usize)
    }

    /// The unique clique of the cover containing both endpoints, if any.
    pub fn common_clique(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.clique_cover
            .iter()
            .position(|k| k.contains(&u) && k.contains(&v))
    }
}

/// A proper list-respecting assignment on a subset of vertices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PartialColoring {
    assignment: Vec<(VertexId, Color)>, // sorted by vertex
}

impl PartialColoring {
    pub fn empty() -> Self {
        PartialColoring { assignment: Vec::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VertexId, Color)>) -> Result<Self, InstanceError> {
        let mut assignment: Vec<(VertexId, Color)> = pairs.into_iter().collect();
        assignment.sort_unstable();
        for w in assignment.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(InstanceError::DoublePin(w[0].0));
            }
        }
        Ok(PartialColoring { assignment })
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<Color> {
        self.assignment
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.assignment[i].1)
    }

    pub fn pairs(&self) -> &[(VertexId, Color)] {
        &self.assignment
    }

    pub fn with(&self, v: VertexId, c: Color) -> Result<Self, InstanceError> {
        if self.get(v).is_some() {
            return Err(InstanceError::DoublePin(v));
        }
        let mut assignment = self.assignment.clone();
        let pos = assignment.partition_point(|&(w, _)| w < v);
        assignment.insert(pos, (v, c));
        Ok(PartialColoring { assignment })
    }

    /// Union of two disjoint partial colorings.
    pub fn union(&self, other: &Self) -> Result<Self, InstanceError> {
        Self::from_pairs(self.assignment.iter().chain(other.assignment.iter()).copied())
    }

    /// Colors used by the coloring (`col(tau)`).
    pub fn colors(&self) -> BTreeSet<Color> {
        self.assignment.iter().map(|&(_, c)| c).collect()
    }
}

/// An instance together with a pinning and all residual data.
#[derive(Clone, Debug)]
pub struct PinnedInstance {
    pub instance: Arc<ColoringInstance>,
    pub pin: PartialColoring,
    pub residual_lists: Vec<BTreeSet<Color>>, // full length; pinned vertices hold empty sets
    pub residual_degree: Vec<usize>,
    free: Vec<VertexId>,
}

impl PinnedInstance {
    /// Pins `tau` onto the instance, checking properness and list membership.
    pub fn new(instance: Arc<ColoringInstance>, pin: PartialColoring) -> Result<Self, InstanceError> {
        let n = instance.vertex_count();
        for &(v, c) in pin.pairs() {
            if !instance.lists[v].contains(&c) {
                return Err(InstanceError::ImproperPinning { vertex: v, color: c });
            }
            for &u in instance.graph.neighbors(v) {
                if pin.get(u) == Some(c) {
                    return Err(InstanceError::ImproperPinning { vertex: v, color: c });
                }
            }
        }
        let mut residual_lists = Vec::with_capacity(n);
        let mut residual_degree = vec![0usize; n];
        let mut free = Vec::new();
        for v in 0..n {
            if pin.get(v).is_some() {
                residual_lists.push(BTreeSet::new());
                continue;
            }
            free.push(v);
            let mut list = instance.lists[v].clone();
            for &u in instance.graph.neighbors(v) {
                match pin.get(u) {
                    Some(c) => {
                        list.remove(&c);
                    }
                    None => residual_degree[v] += 1,
                }
            }
            residual_lists.push(list);
        }
        Ok(PinnedInstance {
            instance,
            pin,
            residual_lists,
            residual_degree,
            free,
        })
    }

    pub fn unpinned(instance: Arc<ColoringInstance>) -> Self {
        Self::new(instance, PartialColoring::empty()).expect("empty pin is proper")
    }

    pub fn codim(&self) -> usize {
        self.free.len()
    }

    pub fn free_vertices(&self) -> &[VertexId] {
        &self.free
    }

    pub fn is_free(&self, v: VertexId) -> bool {
        self.pin.get(v).is_none()
    }

    pub fn residual_list(&self, v: VertexId) -> &BTreeSet<Color> {
        &self.residual_lists[v]
    }

    /// `ell_uv^tau`, the size of the shared residual list of two free vertices.
    pub fn shared_list_len(&self, u: VertexId, v: VertexId) -> usize {
        self.residual_lists[u].intersection(&self.residual_lists[v]).count()
    }

    /// All sites of the link: free `(v, c)` pairs with `c` in the residual list.
    pub fn sites(&self) -> Vec<Site> {
        let mut out = Vec::new();
        for &v in &self.free {
            for &c in &self.residual_lists[v] {
                out.push(Site::new(v, c));
            }
        }
        out
    }

    /// Free members of clique `i` (the set `V^i_tau`).
    pub fn clique_free(&self, i: usize) -> Vec<VertexId> {
        self.instance.clique_cover[i]
            .iter()
            .copied()
            .filter(|&v| self.is_free(v))
            .collect()
    }

    /// Free members of clique `i` with `c` still available (the set `V^{i,c}_tau`).
    pub fn clique_free_with_color(&self, i: usize, c: Color) -> Vec<VertexId> {
        self.instance.clique_cover[i]
            .iter()
            .copied()
            .filter(|&v| self.is_free(v) && self.residual_lists[v].contains(&c))
            .collect()
    }

    /// `h(i, c) = max(|V^{i,c}_tau| - 1, 0)`.
    pub fn h(&self, i: usize, c: Color) -> usize {
        self.clique_free_with_color(i, c).len().saturating_sub(1)
    }

    /// Extends the pinning by one site. Errors when improper.
    pub fn extend(&self, v: VertexId, c: Color) -> Result<Self, InstanceError> {
        if !self.is_free(v) || !self.residual_lists[v].contains(&c) {
            return Err(InstanceError::ImproperPinning { vertex: v, color: c });
        }
        let mut out = self.clone();
        out.pin = self.pin.with(v, c)?;
        out.residual_lists[v] = BTreeSet::new();
        out.free.retain(|&w| w != v);
        for &u in self.instance.graph.neighbors(v) {
            if out.is_free(u) {
                out.residual_lists[u].remove(&c);
                out.residual_degree[u] -= 1;
            }
        }
        out.residual_degree[v] = 0;
        Ok(out)
    }

    /// Connected components of the free induced subgraph `G_tau`.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        self.instance.graph.components_of(&self.free)
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Canonical memo key.
    pub fn key(&self) -> Vec<(VertexId, Color)> {
        self.pin.pairs().to_vec()
    }

    /// Upper bound on the residual search space, saturating.
    pub fn search_space(&self) -> u128 {
        let mut acc: u128 = 1;
        for &v in &self.free {
            acc = acc.saturating_mul(self.residual_lists[v].len() as u128);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_lists(n: usize, q: Color) -> Vec<BTreeSet<Color>> {
        vec![(1..=q).collect(); n]
    }

    #[test]
    fn line_graph_of_star_is_triangle() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let (g, cover, labels) = line_graph(&base).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(labels, vec![(0, 1), (0, 2), (0, 3)]);
        // hub clique of size 3 plus three singletons
        let mut sizes: Vec<_> = cover.iter().map(|k| k.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 3]);
    }

    #[test]
    fn line_graph_of_path_is_single_edge() {
        let base = BaseGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let (g, _, _) = line_graph(&base).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges(), vec![(0, 1)]);
    }

    #[test]
    fn line_graph_of_triangle_is_triangle() {
        let base = BaseGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let (g, cover, _) = line_graph(&base).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().len(), 3);
        for k in &cover {
            assert_eq!(k.len(), 2);
        }
    }

    #[test]
    fn line_graph_degree_bound() {
        let base = BaseGraph::new(6, vec![(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (4, 5)]).unwrap();
        let (g, _, _) = line_graph(&base).unwrap();
        assert!(g.max_degree() <= 2 * base.max_degree() - 2);
    }

    #[test]
    fn empty_edge_set_is_rejected() {
        let base = BaseGraph::new(3, vec![]).unwrap();
        assert_eq!(line_graph(&base).unwrap_err(), InstanceError::EmptyLineGraph);
    }

    #[test]
    fn make_instance_computes_beta() {
        // K_3 with lists {1..6}: delta = 2, beta = 6 - 2 - 1 = 3
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(3, 6), 6).unwrap();
        assert_eq!(inst.beta, 3);
        assert_eq!(inst.graph.max_degree(), 2);
    }

    #[test]
    fn make_instance_single_edge_beta_two() {
        let base = BaseGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(2, 4), 4).unwrap();
        assert_eq!(inst.beta, 2);
    }

    #[test]
    fn make_instance_rejects_thin_lists() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let err = ColoringInstance::from_base(&base, uniform_lists(3, 4), 4).unwrap_err();
        assert!(matches!(err, InstanceError::InsufficientSlack { beta: 1, .. }));
    }

    #[test]
    fn empty_pin_keeps_lists() {
        let base = BaseGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(2, 5), 5).unwrap();
        let pinned = PinnedInstance::unpinned(inst.clone());
        assert_eq!(pinned.residual_list(0), &inst.lists[0]);
        assert_eq!(pinned.codim(), 2);
    }

    #[test]
    fn pin_drops_neighbor_colors() {
        // edge u-v, L = {1,2,3} each, pin v <- 1: L_u^tau = {2,3}, deg_tau(u) = 0
        let base = BaseGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let lists = vec![
            [1, 2, 3].into_iter().collect(),
            [1, 2, 3].into_iter().collect(),
        ];
        let inst = ColoringInstance::new(
            Graph::from_adjacency(vec![vec![1], vec![0]]),
            vec![vec![0, 1], vec![0], vec![1]],
            lists,
            3,
        );
        // degree 1, list 3 => beta = 1: rejected; use base with bigger lists instead
        assert!(inst.is_err());
        let inst = ColoringInstance::from_base(&base, uniform_lists(2, 4), 4).unwrap();
        let pin = PartialColoring::from_pairs([(1, 1)]).unwrap();
        let pinned = PinnedInstance::new(inst, pin).unwrap();
        assert_eq!(
            pinned.residual_list(0),
            &[2, 3, 4].into_iter().collect::<BTreeSet<_>>()
        );
        assert_eq!(pinned.residual_degree[0], 0);
    }

    #[test]
    fn pin_triangle_vertex() {
        // K_3 on {u,v,w}, lists {1..6}, pin w <- 1: residual lists size 5, deg_tau = 1
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(3, 6), 6).unwrap();
        let pin = PartialColoring::from_pairs([(2, 1)]).unwrap();
        let pinned = PinnedInstance::new(inst, pin).unwrap();
        assert_eq!(pinned.residual_list(0).len(), 5);
        assert_eq!(pinned.residual_list(1).len(), 5);
        assert_eq!(pinned.shared_list_len(0, 1), 5);
        assert_eq!(pinned.residual_degree[0], 1);
    }

    #[test]
    fn improper_pin_is_rejected() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(3, 6), 6).unwrap();
        let pin = PartialColoring::from_pairs([(0, 1), (1, 1)]).unwrap();
        assert!(PinnedInstance::new(inst, pin).is_err());
    }

    #[test]
    fn pinning_commutes() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(3, 6), 6).unwrap();
        let a = PinnedInstance::new(inst.clone(), PartialColoring::from_pairs([(0, 1)]).unwrap())
            .unwrap()
            .extend(1, 2)
            .unwrap();
        let b = PinnedInstance::new(
            inst,
            PartialColoring::from_pairs([(0, 1), (1, 2)]).unwrap(),
        )
        .unwrap();
        assert_eq!(a.residual_lists, b.residual_lists);
        assert_eq!(a.residual_degree, b.residual_degree);
        assert_eq!(a.free, b.free);
    }

    #[test]
    fn slack_is_preserved_under_pinning() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(3, 6), 6).unwrap();
        let beta = inst.beta as usize;
        let pinned =
            PinnedInstance::new(inst, PartialColoring::from_pairs([(2, 3)]).unwrap()).unwrap();
        for &v in pinned.free_vertices() {
            assert!(pinned.residual_list(v).len() > pinned.residual_degree[v] + beta);
        }
    }

    #[test]
    fn clique_color_counts() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(3, 6), 6).unwrap();
        let pinned = PinnedInstance::unpinned(inst);
        // hub clique (all three vertices share color 1): h = 2
        let hub = (0..4)
            .find(|&i| pinned.instance.clique_cover[i].len() == 3)
            .unwrap();
        assert_eq!(pinned.h(hub, 1), 2);
        // singleton cliques: h = 0
        let single = (0..4)
            .find(|&i| pinned.instance.clique_cover[i].len() == 1)
            .unwrap();
        assert_eq!(pinned.h(single, 1), 0);
    }

    #[test]
    fn h_sum_bounded_by_residual_degree() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base(&base, uniform_lists(3, 6), 6).unwrap();
        let pinned = PinnedInstance::new(
            inst.clone(),
            PartialColoring::from_pairs([(2, 1)]).unwrap(),
        )
        .unwrap();
        for &v in pinned.free_vertices() {
            for c in 1..=6 {
                if !pinned.residual_list(v).contains(&c) {
                    continue;
                }
                let sum: usize = (0..inst.clique_cover.len())
                    .filter(|&i| inst.clique_cover[i].contains(&v))
                    .map(|i| pinned.h(i, c))
                    .sum();
                assert!(sum <= pinned.residual_degree[v]);
            }
        }
    }
}
