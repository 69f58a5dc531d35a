//! The weighted-simplicial-complex view of a pinned instance: marginal face
//! distributions, local walks with their stationary diagonals, the Garland
//! averaging identities, and the local-to-global spectral aggregation.

use crate::counting::{count_extensions, enumerate_faces};
use crate::instances::{Color, PartialColoring, PinnedInstance, Site, VertexId};
use crate::scalar::{CountScalar, EigScalar};
use crate::specmat::LabeledMatrix;
use dashmap::DashMap;
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use std::sync::Arc;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("level {0} out of range (codim {1})")]
    LevelOutOfRange(usize, usize),
    #[error("local walk needs codim >= 2, got {0}")]
    CodimTooSmall(usize),
}

/// `binom(n, k)` as a `BigInt`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut num = BigInt::from(1u8);
    for i in 0..k.min(n - k) {
        num = num * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    num
}

/// Marginal distribution over the link faces of one level.
#[derive(Clone, Debug)]
pub struct FaceDistribution<S> {
    pub level: usize,
    pub weights: Vec<(PartialColoring, S)>,
}

impl<S: CountScalar> FaceDistribution<S> {
    pub fn total(&self) -> S {
        self.weights.iter().map(|(_, w)| w.clone()).sum()
    }
}

/// `pi_{tau,j}`: face weight is the `mu^tau`-mass divided by `binom(codim, j)`.
pub fn face_distribution<S: CountScalar>(
    pinned: &PinnedInstance,
    j: usize,
) -> Result<FaceDistribution<S>, ComplexError> {
    let k = pinned.codim();
    if j == 0 || j > k {
        return Err(ComplexError::LevelOutOfRange(j, k));
    }
    let total = count_extensions(pinned);
    let binom = binomial(k, j);
    let mut weights = Vec::new();
    for face in enumerate_faces(pinned, j) {
        let sub = PinnedInstance::new(
            pinned.instance.clone(),
            pinned.pin.union(&face).expect("face is disjoint from pin"),
        )
        .expect("face extends properly");
        let cnt = count_extensions(&sub);
        if cnt.is_zero() {
            continue;
        }
        let w = S::from_count_ratio(&cnt, &(total.clone() * &binom));
        weights.push((face, w));
    }
    Ok(FaceDistribution { level: j, weights })
}

/// Local walk matrices of a link: `P_tau`, its stationary diagonal `Pi_tau`,
/// and the stationary vector aligned with the site index.
#[derive(Clone, Debug)]
pub struct LinkMatrices<S> {
    pub index: Vec<Site>,
    pub walk: LabeledMatrix<S>,
    pub stationary: LabeledMatrix<S>,
    pub stationary_vec: Vec<S>,
}

/// Builds `P_tau(x, y) = pi_{tau,2}({x,y}) / (2 pi_{tau,1}(x))` and
/// `Pi_tau = diag(pi_{tau,1})` from exact count ratios.
pub fn local_walk<S: CountScalar>(pinned: &PinnedInstance) -> Result<LinkMatrices<S>, ComplexError> {
    let k = pinned.codim();
    if k < 2 {
        return Err(ComplexError::CodimTooSmall(k));
    }
    let index = pinned.sites();
    let total = count_extensions(pinned);
    let k_big = BigInt::from(k);
    let mut site_counts: Vec<BigInt> = Vec::with_capacity(index.len());
    let mut children: Vec<Option<PinnedInstance>> = Vec::with_capacity(index.len());
    for s in &index {
        match pinned.extend(s.vertex, s.color) {
            Ok(child) => {
                site_counts.push(count_extensions(&child));
                children.push(Some(child));
            }
            Err(_) => {
                site_counts.push(BigInt::zero());
                children.push(None);
            }
        }
    }
    let denom_pi1 = total.clone() * &k_big;
    let stationary_vec: Vec<S> = site_counts
        .iter()
        .map(|c| S::from_count_ratio(c, &denom_pi1))
        .collect();
    let stationary = LabeledMatrix::from_diag(index.clone(), stationary_vec.clone());
    let mut walk = LabeledMatrix::zeros(index.clone());
    for (i, s) in index.iter().enumerate() {
        let Some(child) = &children[i] else { continue };
        if site_counts[i].is_zero() {
            continue;
        }
        // row x of P_tau is pi_{tau + x, 1}: P(x,y) = cnt(x,y) / ((k-1) cnt(x))
        let row_denom = site_counts[i].clone() * BigInt::from(k - 1);
        for (j, t) in index.iter().enumerate() {
            if i == j || s.vertex == t.vertex {
                continue;
            }
            if let Ok(grand) = child.extend(t.vertex, t.color) {
                let cnt = count_extensions(&grand);
                if !cnt.is_zero() {
                    walk.set(i, j, S::from_count_ratio(&cnt, &row_denom));
                }
            }
        }
    }
    Ok(LinkMatrices { index, walk, stationary, stationary_vec })
}

/// Shared walk cache; lets face sweeps reuse link matrices across overlapping
/// pinnings. Safe for concurrent readers and writers.
pub struct WalkCache<S> {
    map: DashMap<Vec<(VertexId, Color)>, Arc<LinkMatrices<S>>>,
}

impl<S: CountScalar> WalkCache<S> {
    pub fn new() -> Self {
        WalkCache { map: DashMap::new() }
    }

    pub fn get(&self, pinned: &PinnedInstance) -> Result<Arc<LinkMatrices<S>>, ComplexError> {
        let key = pinned.key();
        if let Some(hit) = self.map.get(&key) {
            return Ok(hit.clone());
        }
        let built = Arc::new(local_walk(pinned)?);
        self.map.insert(key, built.clone());
        Ok(built)
    }
}

impl<S: CountScalar> Default for WalkCache<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Deviations of the three Garland averaging identities at one link.
#[derive(Clone, Debug)]
pub struct GarlandReport {
    /// `E[Pi_x] = Pi` (checked for codim >= 2).
    pub dev_stationary: f64,
    /// `E[Pi_x P_x] = Pi P` (defined only for codim >= 3).
    pub dev_walk: Option<f64>,
    /// `E[pi_x pi_x^T] = Pi P^2` (checked for codim >= 2).
    pub dev_square: f64,
}

impl GarlandReport {
    pub fn max_deviation(&self) -> f64 {
        self.dev_stationary.max(self.dev_square).max(self.dev_walk.unwrap_or(0.0))
    }
}

/// Verifies the Garland identities at the link of `pinned`, entrywise.
pub fn garland_check<S: CountScalar>(
    pinned: &PinnedInstance,
    cache: &WalkCache<S>,
) -> Result<GarlandReport, ComplexError> {
    let k = pinned.codim();
    if k < 2 {
        return Err(ComplexError::CodimTooSmall(k));
    }
    let link = cache.get(pinned)?;
    let index = &link.index;
    let dim = index.len();
    let mut e_pi = LabeledMatrix::<S>::zeros(index.clone());
    let mut e_pip = LabeledMatrix::<S>::zeros(index.clone());
    let mut e_outer = LabeledMatrix::<S>::zeros(index.clone());
    for (i, s) in index.iter().enumerate() {
        let w = link.stationary_vec[i].clone();
        if w.is_zero() {
            continue;
        }
        let child = pinned.extend(s.vertex, s.color).expect("site extends");
        if k >= 3 {
            let sub = cache.get(&child)?;
            let positions: Vec<usize> = sub
                .index
                .iter()
                .map(|t| index.binary_search(t).expect("link sites nest"))
                .collect();
            for (a, &pa) in positions.iter().enumerate() {
                e_pi.add_to(pa, pa, w.clone() * sub.stationary_vec[a].clone());
                let pia = sub.stationary_vec[a].clone();
                for (b, &pb) in positions.iter().enumerate() {
                    let pab = sub.walk.get(a, b).clone();
                    if !pab.is_zero() {
                        e_pip.add_to(pa, pb, w.clone() * pia.clone() * pab);
                    }
                    e_outer.add_to(
                        pa,
                        pb,
                        w.clone() * pia.clone() * sub.stationary_vec[b].clone(),
                    );
                }
            }
        } else {
            // codim-1 links: only the stationary vector exists
            let total = count_extensions(&child);
            let verts: Vec<VertexId> = child.free_vertices().to_vec();
            debug_assert_eq!(verts.len(), 1);
            let v = verts[0];
            let sites: Vec<(usize, S)> = child
                .residual_list(v)
                .iter()
                .map(|&c| {
                    let cnt = match child.extend(v, c) {
                        Ok(g) => count_extensions(&g),
                        Err(_) => BigInt::zero(),
                    };
                    (
                        index.binary_search(&Site::new(v, c)).expect("site nests"),
                        S::from_count_ratio(&cnt, &total),
                    )
                })
                .collect();
            for &(p, ref pv) in &sites {
                e_pi.add_to(p, p, w.clone() * pv.clone());
                for &(pb, ref pw) in &sites {
                    e_outer.add_to(p, pb, w.clone() * pv.clone() * pw.clone());
                }
            }
        }
    }
    let pip = link.stationary.matmul(&link.walk);
    let pip2 = pip.matmul(&link.walk);
    let dev = |a: &LabeledMatrix<S>, b: &LabeledMatrix<S>| a.sub(b).max_abs().to_f64_lossy();
    let dev_stationary = dev(&e_pi, &link.stationary);
    let dev_square = dev(&e_outer, &pip2);
    let dev_walk = if k >= 3 { Some(dev(&e_pip, &pip)) } else { None };
    let _ = dim;
    Ok(GarlandReport { dev_stationary, dev_walk, dev_square })
}

/// Second-largest eigenvalue of the local walk, via the symmetrized matrix
/// `Pi^{1/2} P Pi^{-1/2}` restricted to the positive-mass support.
pub fn walk_lambda2<F: EigScalar>(link: &LinkMatrices<F>) -> f64 {
    let support: Vec<Site> = link
        .index
        .iter()
        .enumerate()
        .filter(|&(i, _)| link.stationary_vec[i] > F::zero())
        .map(|(_, s)| *s)
        .collect();
    if support.len() < 2 {
        return 0.0;
    }
    let walk = link.walk.restrict(&support);
    let pi: Vec<F> = link
        .index
        .iter()
        .enumerate()
        .filter(|&(i, _)| link.stationary_vec[i] > F::zero())
        .map(|(i, _)| link.stationary_vec[i])
        .collect();
    let dim = support.len();
    let mut sym = nalgebra::DMatrix::<F>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let scale = num_traits::Float::sqrt(pi[i] / pi[j]);
            sym[(i, j)] = *walk.get(i, j) * scale;
        }
    }
    let ev = crate::specmat::sym_eigenvalues_dense(&sym);
    ev[ev.len() - 2]
}

/// Canonical color-pattern key of a face for orbit deduplication on
/// uniform-list instances: colors relabeled by first occurrence.
pub fn face_orbit_key(face: &PartialColoring) -> Vec<(VertexId, usize)> {
    let mut seen: Vec<Color> = Vec::new();
    face.pairs()
        .iter()
        .map(|&(v, c)| {
            let cl = match seen.iter().position(|&x| x == c) {
                Some(i) => i,
                None => {
                    seen.push(c);
                    seen.len() - 1
                }
            };
            (v, cl)
        })
        .collect()
}

/// `gamma_k = max_{tau in C_k} lambda_2(P_tau)` for `k = 0 .. n-2`.
///
/// On uniform-list instances only one representative per color orbit is
/// solved; links of a level are processed in parallel.
pub fn local_spectral_profile<F: EigScalar>(pinned: &PinnedInstance) -> Vec<f64> {
    let n = pinned.codim();
    let uniform = pinned.instance.is_uniform();
    let mut profile = Vec::with_capacity(n.saturating_sub(1));
    for level in 0..n.saturating_sub(1) {
        let mut faces = enumerate_faces(pinned, level.max(0));
        if level == 0 {
            faces = vec![PartialColoring::empty()];
        }
        if uniform {
            let mut seen = std::collections::HashSet::new();
            faces.retain(|f| seen.insert(face_orbit_key(f)));
        }
        let gamma = faces
            .par_iter()
            .map(|face| {
                let sub = PinnedInstance::new(
                    pinned.instance.clone(),
                    pinned.pin.union(face).expect("disjoint"),
                )
                .expect("proper face");
                let link = local_walk::<F>(&sub).expect("codim >= 2");
                walk_lambda2(&link)
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        profile.push(if gamma.is_finite() { gamma } else { 0.0 });
    }
    profile
}

/// Local-to-global bound on the second eigenvalue of the Glauber dynamics:
/// `1 - (1/n) prod (1 - gamma_i)`. Returns the bound and a degeneracy flag
/// raised when some `gamma_i >= 1`.
pub fn local_to_global_gap(profile: &[f64]) -> (f64, bool) {
    let n = profile.len() + 1;
    if profile.iter().any(|&g| g >= 1.0) {
        return (1.0, true);
    }
    let prod: f64 = profile.iter().map(|&g| 1.0 - g).product();
    (1.0 - prod / n as f64, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{BaseGraph, ColoringInstance};
    use crate::Exact;
    use num_traits::One;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn edge_instance(lu: &[Color], lv: &[Color], q: Color) -> Arc<ColoringInstance> {
        let base = BaseGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let lists: Vec<BTreeSet<Color>> =
            vec![lu.iter().copied().collect(), lv.iter().copied().collect()];
        ColoringInstance::from_base(&base, lists, q).unwrap()
    }

    fn path3_uniform(q: Color) -> Arc<ColoringInstance> {
        // line graph of P_4 is a 3-path; pinning its middle vertex decouples
        // the endpoints into two isolated free vertices
        let base = BaseGraph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        ColoringInstance::from_base_uniform(&base, q).unwrap()
    }

    #[test]
    fn face_distribution_levels() {
        let inst = edge_instance(&[1, 2, 3], &[1, 2], 4);
        let pinned = PinnedInstance::unpinned(inst);
        // top level: uniform over the 4 proper colorings
        let top: FaceDistribution<Exact> = face_distribution(&pinned, 2).unwrap();
        assert_eq!(top.weights.len(), 4);
        for (_, w) in &top.weights {
            assert_eq!(*w, Exact::new(1.into(), 4.into()));
        }
        assert_eq!(top.total(), Exact::one());
        // level 1: pi(u c) = (1/2) mu_u(c)
        let lvl1: FaceDistribution<Exact> = face_distribution(&pinned, 1).unwrap();
        assert_eq!(lvl1.total(), Exact::one());
        let w_u3 = lvl1
            .weights
            .iter()
            .find(|(f, _)| f.pairs() == [(0, 3)])
            .unwrap();
        assert_eq!(w_u3.1, Exact::new(1.into(), 4.into())); // (1/2)(1/2)
        assert!(face_distribution::<Exact>(&pinned, 3).is_err());
    }

    #[test]
    fn face_distribution_single_vertex_is_uniform_on_list() {
        let inst = edge_instance(&[1, 2, 3, 4], &[1, 2, 3, 4], 4);
        let pinned = PinnedInstance::new(
            inst,
            PartialColoring::from_pairs([(1, 2)]).unwrap(),
        )
        .unwrap();
        let d: FaceDistribution<Exact> = face_distribution(&pinned, 1).unwrap();
        for (_, w) in &d.weights {
            assert_eq!(*w, Exact::new(1.into(), 3.into()));
        }
    }

    #[test]
    fn binomial_identity_against_facet_route() {
        // mu^tau_S(omega) = binom(codim, |S|) pi_{tau,|S|}(omega), with the
        // face distribution computed by the definition and the marginal by
        // count ratios.
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base_uniform(&base, 6).unwrap();
        let pinned = PinnedInstance::new(
            inst,
            PartialColoring::from_pairs([(2, 1)]).unwrap(),
        )
        .unwrap();
        let k = pinned.codim();
        for j in 1..=k {
            let dist: FaceDistribution<Exact> = face_distribution(&pinned, j).unwrap();
            assert_eq!(dist.total(), Exact::one());
            for (face, w) in &dist.weights {
                let mu: Exact = crate::counting::marginal(&pinned, face);
                let binom = Exact::from_count(&binomial(k, j));
                assert_eq!(mu, binom * w.clone());
            }
        }
    }

    #[test]
    fn local_walk_free_edge_off_diagonal_value() {
        // Pi P(u c1, v c2) = 1/(2 (l_u l_v - l_uv)) for c1 != c2, 0 on shared colors;
        // at lists {1,2,3} this is 1/12
        let inst = edge_instance(&[1, 2, 3], &[1, 2, 3], 4);
        let pinned = PinnedInstance::unpinned(inst);
        let link: LinkMatrices<Exact> = local_walk(&pinned).unwrap();
        let pip = link.stationary.matmul(&link.walk);
        let val = pip
            .at(Site::new(0, 1), Site::new(1, 2))
            .unwrap()
            .clone();
        assert_eq!(val, Exact::new(1.into(), 12.into()));
        let zero = pip.at(Site::new(0, 1), Site::new(1, 1)).unwrap().clone();
        assert_eq!(zero, Exact::zero());
    }

    #[test]
    fn local_walk_rows_are_stochastic_and_reversible() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base_uniform(&base, 6).unwrap();
        let pinned = PinnedInstance::unpinned(inst);
        let link: LinkMatrices<Exact> = local_walk(&pinned).unwrap();
        let dim = link.index.len();
        for i in 0..dim {
            let sum: Exact = (0..dim).map(|j| link.walk.get(i, j).clone()).sum();
            assert_eq!(sum, Exact::one(), "row {i}");
            assert_eq!(*link.walk.get(i, i), Exact::zero());
        }
        let pip = link.stationary.matmul(&link.walk);
        assert_eq!(pip.max_asymmetry(), Exact::zero());
    }

    #[test]
    fn disconnected_pair_cross_blocks_match_outer() {
        // two isolated free vertices: Pi P equals 2 pi pi^T on cross-vertex
        // entries and the difference is negative semidefinite
        let inst = path3_uniform(6);
        let pinned = PinnedInstance::new(
            inst,
            PartialColoring::from_pairs([(1, 6)]).unwrap(),
        )
        .unwrap();
        assert_eq!(pinned.components().len(), 2);
        let link: LinkMatrices<Exact> = local_walk(&pinned).unwrap();
        let pip = link.stationary.matmul(&link.walk);
        let outer = LabeledMatrix::outer(link.index.clone(), &link.stationary_vec)
            .scale(Exact::from_int(2));
        for (i, a) in link.index.iter().enumerate() {
            for (j, b) in link.index.iter().enumerate() {
                if a.vertex != b.vertex {
                    assert_eq!(pip.get(i, j), outer.get(i, j), "{a:?} {b:?}");
                }
            }
        }
        let diff = pip.sub(&outer).map(|v| v.to_f64_lossy());
        let top = diff.sym_eigenvalues().last().copied().unwrap();
        assert!(top <= 1e-12, "difference must be <= 0, top eig {top}");
    }

    #[test]
    fn garland_identities_exact_on_triangle() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base_uniform(&base, 6).unwrap();
        let pinned = PinnedInstance::unpinned(inst);
        let cache = WalkCache::<Exact>::new();
        let report = garland_check(&pinned, &cache).unwrap();
        assert_eq!(report.max_deviation(), 0.0);
    }

    #[test]
    fn garland_at_codim_two_checks_first_and_third() {
        let inst = edge_instance(&[1, 2, 3], &[1, 2], 4);
        let pinned = PinnedInstance::unpinned(inst);
        let cache = WalkCache::<Exact>::new();
        let report = garland_check(&pinned, &cache).unwrap();
        assert!(report.dev_walk.is_none());
        assert_eq!(report.dev_stationary, 0.0);
        assert_eq!(report.dev_square, 0.0);
    }

    #[test]
    fn profile_and_ltog() {
        let base = BaseGraph::new(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let inst = ColoringInstance::from_base_uniform(&base, 6).unwrap();
        let pinned = PinnedInstance::unpinned(inst);
        let profile = local_spectral_profile::<f64>(&pinned);
        assert_eq!(profile.len(), 2);
        for &g in &profile {
            assert!(g < 1.0, "connected instance has gamma < 1");
        }
        let (bound, degenerate) = local_to_global_gap(&profile);
        assert!(!degenerate);
        assert!(bound < 1.0);
        // all-zero profile: bound = 1 - 1/n
        let (b0, _) = local_to_global_gap(&[0.0, 0.0]);
        assert!((b0 - (1.0 - 1.0 / 3.0)).abs() < 1e-15);
        let (b1, _) = local_to_global_gap(&[0.0]);
        assert!((b1 - 0.5).abs() < 1e-15);
        // theorem-shaped profile reproduces the n^{-10/9}-scale computation
        let n = 64usize;
        let gammas: Vec<f64> = (0..n - 1).map(|i| 1.0 / (9.0 * (n - i - 1) as f64)).collect();
        let (bound, flag) = local_to_global_gap(&gammas);
        assert!(!flag);
        let gap = 1.0 - bound;
        let lower = 8.0 / (9.0 * (n as f64).powf(10.0 / 9.0));
        assert!(gap >= lower, "gap {gap} vs lower bound {lower}");
    }

    #[test]
    fn degenerate_profile_flagged() {
        let (b, flag) = local_to_global_gap(&[0.5, 1.0]);
        assert!(flag);
        assert_eq!(b, 1.0);
    }
}
