//! Exact counting of proper extensions and marginal probabilities.
//!
//! Two backends: direct DFS enumeration when the residual search space is
//! below the configured cap, and the color-symmetry backend (see
//! [`crate::symmetry`]) for uniform-list instances where the color universe is
//! too large to enumerate. Counts are arbitrary-precision and memoized per
//! instance in a concurrent map keyed by the canonical pinning.

use crate::instances::{Color, PartialColoring, PinnedInstance, VertexId};
use crate::scalar::CountScalar;
use crate::symmetry;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

/// Default cap on the residual search space for the enumeration backend.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("search space {0} exceeds enumeration cap {1} and instance is not uniform")]
    CapExceeded(u128, u128),
    #[error("improper query: vertex {vertex} color {color}")]
    ImproperQuery { vertex: VertexId, color: Color },
}

/// Exact number of proper colorings of the residual instance, automatic backend.
///
/// Enumeration is used when the residual search space fits under `cap`;
/// uniform-list instances fall back to the symmetry backend otherwise.
pub fn count_extensions(pinned: &PinnedInstance) -> BigInt {
    count_extensions_capped(pinned, DEFAULT_ENUM_CAP).expect("default cap with symmetric fallback")
}

pub fn count_extensions_capped(pinned: &PinnedInstance, cap: u128) -> Result<BigInt, CountError> {
    let key = pinned.key();
    if let Some(hit) = pinned.instance.count_cache.get(&key) {
        return Ok(hit.clone());
    }
    let space = pinned.search_space();
    let value = if space <= cap {
        count_by_enumeration(pinned)
    } else if pinned.instance.is_uniform() {
        symmetry::count_for_pinning(pinned)
    } else {
        return Err(CountError::CapExceeded(space, cap));
    };
    pinned.instance.count_cache.insert(key, value.clone());
    Ok(value)
}

/// Direct DFS enumeration over residual lists.
pub fn count_by_enumeration(pinned: &PinnedInstance) -> BigInt {
    let free = pinned.free_vertices();
    let graph = &pinned.instance.graph;
    let n = pinned.instance.vertex_count();
    let mut assigned: Vec<Option<Color>> = vec![None; n];
    let mut total = BigInt::zero();
    fn rec(
        i: usize,
        free: &[VertexId],
        pinned: &PinnedInstance,
        graph: &crate::instances::Graph,
        assigned: &mut Vec<Option<Color>>,
        total: &mut BigInt,
    ) {
        if i == free.len() {
            *total += BigInt::one();
            return;
        }
        let v = free[i];
        'colors: for &c in pinned.residual_list(v) {
            for &u in graph.neighbors(v) {
                if assigned[u] == Some(c) {
                    continue 'colors;
                }
            }
            assigned[v] = Some(c);
            rec(i + 1, free, pinned, graph, assigned, total);
            assigned[v] = None;
        }
    }
    rec(0, free, pinned, graph, &mut assigned, &mut total);
    total
}

/// Calls `f` for every proper coloring of `verts` (a subset of the free
/// vertices) extending the pinning. The slice passed to `f` is aligned with
/// `verts`.
pub fn for_each_completion_on<F: FnMut(&[Color])>(
    pinned: &PinnedInstance,
    verts: &[VertexId],
    mut f: F,
) {
    let graph = &pinned.instance.graph;
    let n = pinned.instance.vertex_count();
    let mut assigned: Vec<Option<Color>> = vec![None; n];
    let mut colors: Vec<Color> = vec![0; verts.len()];
    fn rec<F: FnMut(&[Color])>(
        i: usize,
        verts: &[VertexId],
        pinned: &PinnedInstance,
        graph: &crate::instances::Graph,
        assigned: &mut Vec<Option<Color>>,
        colors: &mut Vec<Color>,
        f: &mut F,
    ) {
        if i == verts.len() {
            f(colors);
            return;
        }
        let v = verts[i];
        'colors: for &c in pinned.residual_list(v) {
            for &u in graph.neighbors(v) {
                if assigned[u] == Some(c) {
                    continue 'colors;
                }
            }
            assigned[v] = Some(c);
            colors[i] = c;
            rec(i + 1, verts, pinned, graph, assigned, colors, f);
            assigned[v] = None;
        }
    }
    rec(0, verts, pinned, graph, &mut assigned, &mut colors, &mut f);
}

/// All faces of the link at level `j`: proper colorings of `j`-subsets of the
/// free vertices.
pub fn enumerate_faces(pinned: &PinnedInstance, j: usize) -> Vec<PartialColoring> {
    let free = pinned.free_vertices().to_vec();
    let mut out = Vec::new();
    let mut subset = Vec::with_capacity(j);
    fn subsets(
        start: usize,
        j: usize,
        free: &[VertexId],
        subset: &mut Vec<VertexId>,
        pinned: &PinnedInstance,
        out: &mut Vec<PartialColoring>,
    ) {
        if subset.len() == j {
            let verts = subset.clone();
            for_each_completion_on(pinned, &verts, |colors| {
                let pairs: Vec<_> = verts.iter().copied().zip(colors.iter().copied()).collect();
                out.push(PartialColoring::from_pairs(pairs).expect("distinct vertices"));
            });
            return;
        }
        for k in start..free.len() {
            subset.push(free[k]);
            subsets(k + 1, j, free, subset, pinned, out);
            subset.pop();
        }
    }
    subsets(0, j, &free, &mut subset, pinned, &mut out);
    out
}

/// `mu^tau_S(omega)`: probability that a uniform proper completion extends
/// `omega`. Zero when `omega` is improper against the pinning.
pub fn marginal<S: CountScalar>(pinned: &PinnedInstance, omega: &PartialColoring) -> S {
    let denom = count_extensions(pinned);
    if denom.is_zero() {
        return S::zero();
    }
    let extended = match pinned.pin.union(omega) {
        Ok(pin) => pin,
        Err(_) => return S::zero(),
    };
    match PinnedInstance::new(pinned.instance.clone(), extended) {
        Ok(sub) => {
            let num = count_extensions(&sub);
            S::from_count_ratio(&num, &denom)
        }
        Err(_) => S::zero(),
    }
}

/// Single-site marginal `mu^tau_u(c)`.
pub fn site_marginal<S: CountScalar>(pinned: &PinnedInstance, u: VertexId, c: Color) -> S {
    let omega = PartialColoring::from_pairs([(u, c)]).expect("single pair");
    marginal(pinned, &omega)
}

/// Lightweight residual instance mutated by the marginal recursion.
#[derive(Clone)]
struct ResidualView {
    adj: Vec<Vec<usize>>,
    lists: Vec<BTreeSet<Color>>,
    alive: Vec<bool>,
}

impl ResidualView {
    fn of(pinned: &PinnedInstance) -> (Self, Vec<VertexId>) {
        let free = pinned.free_vertices().to_vec();
        let index: std::collections::HashMap<VertexId, usize> =
            free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj = free
            .iter()
            .map(|&v| {
                pinned
                    .instance
                    .graph
                    .neighbors(v)
                    .iter()
                    .filter_map(|u| index.get(u).copied())
                    .collect()
            })
            .collect();
        let lists = free.iter().map(|&v| pinned.residual_list(v).clone()).collect();
        let alive = vec![true; free.len()];
        (ResidualView { adj, lists, alive }, free)
    }

    fn live_neighbors(&self, v: usize) -> Vec<usize> {
        self.adj[v].iter().copied().filter(|&u| self.alive[u]).collect()
    }
}

/// `p_{G,L}(u c)` by the vertex-removal recursion on marginal probabilities.
///
/// Independent of the counting path; must agree with [`site_marginal`].
pub fn marginal_recursive<S: CountScalar>(pinned: &PinnedInstance, u: VertexId, c: Color) -> S {
    let (mut view, free) = ResidualView::of(pinned);
    let ui = free
        .iter()
        .position(|&v| v == u)
        .expect("u must be a free vertex");
    let depth_cap = free.len() + 1;
    rec_marginal(&mut view, ui, c, depth_cap)
}

fn rec_marginal<S: CountScalar>(view: &mut ResidualView, u: usize, c: Color, depth: usize) -> S {
    assert!(depth > 0, "recursion depth exceeded vertex count");
    if !view.lists[u].contains(&c) {
        return S::zero();
    }
    let nbrs = view.live_neighbors(u);
    if nbrs.is_empty() {
        return S::from_int(1) / S::from_int(view.lists[u].len() as i64);
    }
    let numer = neighbor_product::<S>(view, u, &nbrs, c, depth);
    let mut denom = S::zero();
    for &c2 in view.lists[u].clone().iter() {
        denom = denom + neighbor_product::<S>(view, u, &nbrs, c2, depth);
    }
    numer / denom
}

/// `prod_i (1 - p(v_i c))` in the instance with `u` removed, discounting `c`
/// from earlier neighbors' lists as the recursion walks them.
fn neighbor_product<S: CountScalar>(
    view: &mut ResidualView,
    u: usize,
    nbrs: &[usize],
    c: Color,
    depth: usize,
) -> S {
    view.alive[u] = false;
    let mut removed: Vec<usize> = Vec::new();
    let mut prod = S::one();
    for (i, &v) in nbrs.iter().enumerate() {
        let p: S = rec_marginal(view, v, c, depth - 1);
        prod = prod * (S::one() - p);
        if view.lists[v].remove(&c) {
            removed.push(v);
        }
        let _ = i;
    }
    for v in removed {
        view.lists[v].insert(c);
    }
    view.alive[u] = true;
    prod
}

/// Report of the per-site marginal bounds.
#[derive(Clone, Debug)]
pub struct MarginalBounds<S> {
    pub lower: S,
    pub upper: S,
    pub value: S,
    pub ok: bool,
}

/// Bounds `(1 - 1/beta)^{deg_tau(u)} / ell_u^tau <= mu_u^tau(c) <= 1/(ell_u^tau - deg_tau(u))`.
pub fn check_marginal_bounds<S: CountScalar>(
    pinned: &PinnedInstance,
    u: VertexId,
    c: Color,
) -> MarginalBounds<S> {
    let beta = pinned.instance.beta as i64;
    let ell = pinned.residual_list(u).len() as i64;
    let deg = pinned.residual_degree[u] as i64;
    let mut lower = S::one() / S::from_int(ell);
    let ratio = S::from_int(beta - 1) / S::from_int(beta);
    for _ in 0..deg {
        lower = lower * ratio.clone();
    }
    let upper = S::one() / S::from_int(ell - deg);
    let value: S = site_marginal(pinned, u, c);
    let ok = lower <= value && value <= upper;
    MarginalBounds { lower, upper, value, ok }
}
