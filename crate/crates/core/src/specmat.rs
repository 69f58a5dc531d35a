//! Symmetric-matrix plumbing: labeled dense matrices, Loewner-order checks,
//! diagonal pseudo-inverses, spectral radius, and the randomized regression
//! suite for the matrix lemmas the certificate construction leans on.

use crate::instances::Site;
use crate::scalar::{CountScalar, EigScalar};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SpecmatError {
    #[error("index mismatch between operands")]
    IndexMismatch,
    #[error("matrix not symmetric (max asymmetry {0})")]
    NotSymmetric(String),
    #[error("negative diagonal entry at position {0}")]
    NegativeDiagonal(usize),
    #[error("matrix is not diagonal")]
    NotDiagonal,
}

/// Dense real symmetric matrix indexed by `(vertex, color)` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix<S> {
    index: Vec<Site>,
    data: Vec<S>, // row-major, dim x dim
}

impl<S: CountScalar> LabeledMatrix<S> {
    pub fn zeros(index: Vec<Site>) -> Self {
        debug_assert!(index.windows(2).all(|w| w[0] < w[1]), "index sorted, unique");
        let dim = index.len();
        LabeledMatrix { index, data: vec![S::zero(); dim * dim] }
    }

    pub fn from_fn(index: Vec<Site>, mut f: impl FnMut(Site, Site) -> S) -> Self {
        let mut m = Self::zeros(index);
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let v = f(m.index[i], m.index[j]);
                m.data[i * m.index.len() + j] = v;
            }
        }
        m
    }

    pub fn from_diag(index: Vec<Site>, diag: Vec<S>) -> Self {
        let mut m = Self::zeros(index);
        for (i, v) in diag.into_iter().enumerate() {
            let d = m.dim();
            m.data[i * d + i] = v;
        }
        m
    }

    pub fn identity(index: Vec<Site>) -> Self {
        let n = index.len();
        Self::from_diag(index, vec![S::one(); n])
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn index(&self) -> &[Site] {
        &self.index
    }

    pub fn position(&self, s: Site) -> Option<usize> {
        self.index.binary_search(&s).ok()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.dim() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        let d = self.dim();
        self.data[i * d + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: S) {
        let d = self.dim();
        let cur = self.data[i * d + j].clone();
        self.data[i * d + j] = cur + v;
    }

    pub fn at(&self, a: Site, b: Site) -> Option<&S> {
        Some(self.get(self.position(a)?, self.position(b)?))
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.dim()).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn max_asymmetry(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let d = (self.get(i, j).clone() - self.get(j, i).clone()).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |acc, v| {
            let a = v.abs();
            if a > acc {
                a
            } else {
                acc
            }
        })
    }

    pub fn scale(&self, k: S) -> Self {
        LabeledMatrix {
            index: self.index.clone(),
            data: self.data.iter().map(|v| v.clone() * k.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.index, other.index, "index mismatch");
        LabeledMatrix {
            index: self.index.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.index, other.index, "index mismatch");
        LabeledMatrix {
            index: self.index.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.index, other.index, "index mismatch");
        let d = self.dim();
        let mut out = Self::zeros(self.index.clone());
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k).clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let add = a.clone() * other.get(k, j).clone();
                    out.add_to(i, j, add);
                }
            }
        }
        out
    }

    /// Outer product `w w^T` of a vector aligned with the index.
    pub fn outer(index: Vec<Site>, w: &[S]) -> Self {
        let mut m = Self::zeros(index);
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                m.set(i, j, w[i].clone() * w[j].clone());
            }
        }
        m
    }

    /// Embeds this matrix into a larger index (zero fill). Panics when a site
    /// of `self` is missing from `index`.
    pub fn embed_into(&self, index: &[Site]) -> Self {
        let mut out = Self::zeros(index.to_vec());
        let map: Vec<usize> = self
            .index
            .iter()
            .map(|s| index.binary_search(s).expect("site missing from target index"))
            .collect();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let v = self.get(i, j).clone();
                if !v.is_zero() {
                    out.set(map[i], map[j], v);
                }
            }
        }
        out
    }

    /// Restriction to a sub-index.
    pub fn restrict(&self, index: &[Site]) -> Self {
        let map: Vec<usize> = index
            .iter()
            .map(|s| self.position(*s).expect("site missing"))
            .collect();
        let mut out = Self::zeros(index.to_vec());
        for i in 0..index.len() {
            for j in 0..index.len() {
                out.set(i, j, self.get(map[i], map[j]).clone());
            }
        }
        out
    }

    pub fn map<T: CountScalar>(&self, f: impl Fn(&S) -> T) -> LabeledMatrix<T> {
        LabeledMatrix {
            index: self.index.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Max row sum of absolute values.
    pub fn max_abs_row_sum(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.dim() {
            let mut sum = S::zero();
            for j in 0..self.dim() {
                sum = sum + self.get(i, j).abs();
            }
            if sum > worst {
                worst = sum;
            }
        }
        worst
    }
}

impl<F: EigScalar> LabeledMatrix<F> {
    pub fn to_dmatrix(&self) -> DMatrix<F> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| *self.get(i, j))
    }

    /// Eigenvalues (ascending) of the symmetrized matrix.
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        sym_eigenvalues_dense(&self.to_dmatrix())
    }
}

/// Eigenvalues of `(A + A^T)/2`, ascending, as f64.
pub fn sym_eigenvalues_dense<F: EigScalar>(a: &DMatrix<F>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let sym = (a + a.transpose()).scale(F::from_f64(0.5).unwrap());
    let eig = sym.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().map(|v| v.to_f64_lossy()).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Outcome of a single Loewner-order comparison `A <= B`.
#[derive(Clone, Debug, Serialize)]
pub struct LoewnerReport {
    /// Smallest eigenvalue of `B - A`.
    pub min_eig_diff: f64,
    pub tolerance: f64,
    /// Max absolute entry of `B - A`, the relative-tolerance scale.
    pub scale: f64,
    pub pass: bool,
}

impl LoewnerReport {
    pub fn from_min_eig(min_eig_diff: f64, tolerance: f64, scale: f64) -> Self {
        let pass = min_eig_diff >= -tolerance * scale.max(1.0);
        LoewnerReport { min_eig_diff, tolerance, scale, pass }
    }
}

/// Default relative tolerance for Loewner checks.
pub const DEFAULT_LOEWNER_TOL: f64 = 1e-9;
/// Symmetry slack accepted before a matrix is rejected as asymmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Checks `A <= B` in the Loewner order by a dense symmetric eigensolve of `B - A`.
pub fn loewner_leq<F: EigScalar>(
    a: &LabeledMatrix<F>,
    b: &LabeledMatrix<F>,
    tol: f64,
) -> Result<LoewnerReport, SpecmatError> {
    if a.index() != b.index() {
        return Err(SpecmatError::IndexMismatch);
    }
    for m in [a, b] {
        let asym = m.max_asymmetry().to_f64_lossy();
        if asym > SYMMETRY_TOL {
            return Err(SpecmatError::NotSymmetric(format!("{asym:e}")));
        }
    }
    let diff = b.sub(a);
    Ok(loewner_report_of_diff(&diff.to_dmatrix(), tol))
}

/// Loewner report from an explicit difference matrix `B - A`.
pub fn loewner_report_of_diff<F: EigScalar>(diff: &DMatrix<F>, tol: f64) -> LoewnerReport {
    let scale = diff.iter().fold(0.0f64, |acc, v| acc.max(v.to_f64_lossy().abs()));
    let min_eig = sym_eigenvalues_dense(diff).first().copied().unwrap_or(0.0);
    LoewnerReport::from_min_eig(min_eig, tol, scale)
}

/// Diagonal pseudo-inverse: reciprocal on positive entries, zero elsewhere.
pub fn pinv_diag<S: CountScalar>(m: &LabeledMatrix<S>) -> Result<LabeledMatrix<S>, SpecmatError> {
    pinv_diag_with(m, |v| S::one() / v)
}

/// Diagonal pseudo-inverse square root.
pub fn pinv_sqrt_diag<F: EigScalar>(m: &LabeledMatrix<F>) -> Result<LabeledMatrix<F>, SpecmatError> {
    pinv_diag_with(m, |v| F::one() / num_traits::Float::sqrt(v))
}

fn pinv_diag_with<S: CountScalar>(
    m: &LabeledMatrix<S>,
    inv: impl Fn(S) -> S,
) -> Result<LabeledMatrix<S>, SpecmatError> {
    if !m.is_diagonal() {
        return Err(SpecmatError::NotDiagonal);
    }
    let mut diag = Vec::with_capacity(m.dim());
    for (i, v) in m.diagonal().into_iter().enumerate() {
        if v < S::zero() {
            return Err(SpecmatError::NegativeDiagonal(i));
        }
        diag.push(if v.is_zero() { S::zero() } else { inv(v) });
    }
    Ok(LabeledMatrix::from_diag(m.index().to_vec(), diag))
}

/// Spectral radius: exact (eigensolve) for symmetric input, max absolute row
/// sum otherwise.
pub fn spectral_radius<F: EigScalar>(m: &LabeledMatrix<F>) -> f64 {
    if m.dim() == 0 {
        return 0.0;
    }
    if m.max_asymmetry().to_f64_lossy() <= SYMMETRY_TOL {
        let ev = m.sym_eigenvalues();
        ev.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    } else {
        m.max_abs_row_sum().to_f64_lossy()
    }
}

// ---------------------------------------------------------------------------
// Randomized regression suite for the Loewner-order lemmas.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct LemmaFailure {
    pub lemma: String,
    pub trial: usize,
    pub min_eig: f64,
    /// Plain-text dump of the matrices that witnessed the failure.
    pub counterexample: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSuiteReport {
    pub trials_per_lemma: usize,
    pub sizes: (usize, usize),
    pub failures: Vec<LemmaFailure>,
    pub checks_run: usize,
}

impl LemmaSuiteReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn dump(mats: &[(&str, &DMatrix<f64>)]) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for (name, m) in mats {
        let _ = writeln!(s, "{name} =");
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:+.12e}", m[(i, j)])).collect();
            let _ = writeln!(s, "  [{}]", row.join(", "));
        }
    }
    s
}

fn rand_matrix(rng: &mut StdRng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
}

fn rand_symmetric(rng: &mut StdRng, n: usize) -> DMatrix<f64> {
    let a = rand_matrix(rng, n);
    (&a + a.transpose()).scale(0.5)
}

fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

fn check_psd(
    report: &mut LemmaSuiteReport,
    lemma: &str,
    trial: usize,
    diff: &DMatrix<f64>,
    tol: f64,
    witnesses: &[(&str, &DMatrix<f64>)],
) {
    report.checks_run += 1;
    let r = loewner_report_of_diff(diff, tol);
    if !r.pass {
        report.failures.push(LemmaFailure {
            lemma: lemma.to_string(),
            trial,
            min_eig: r.min_eig_diff,
            counterexample: dump(witnesses),
        });
    }
}

/// Randomized verification of the Loewner-order lemmas on matrices of sizes
/// `2..=max_size`. These are theorems; a failure indicates a bug in the matrix
/// plumbing, and the failing matrices are serialized into the report.
pub fn lemma_property_suite(seed: u64, trials: usize, max_size: usize) -> LemmaSuiteReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let tol = DEFAULT_LOEWNER_TOL;
    let mut report = LemmaSuiteReport {
        trials_per_lemma: trials,
        sizes: (2, max_size),
        failures: Vec::new(),
        checks_run: 0,
    };
    for trial in 0..trials {
        let n = rng.gen_range(2..=max_size);

        // (i) A B^T + B A^T <= eps A A^T + (1/eps) B B^T, plus the expansion
        // and contraction corollaries.
        let a = rand_matrix(&mut rng, n);
        let b = rand_matrix(&mut rng, n);
        let eps: f64 = rng.gen_range(0.2..5.0);
        let aat = &a * a.transpose();
        let bbt = &b * b.transpose();
        let cross = &a * b.transpose() + &b * a.transpose();
        let diff = aat.scale(eps) + bbt.scale(1.0 / eps) - &cross;
        check_psd(&mut report, "matrix-basicineq", trial, &diff, tol, &[("A", &a), ("B", &b)]);
        let sum = &a + &b;
        let diff2 = aat.scale(1.0 + eps) + bbt.scale(1.0 + 1.0 / eps) - &sum * sum.transpose();
        check_psd(&mut report, "matrix-basicineq-sum", trial, &diff2, tol, &[("A", &a), ("B", &b)]);
        let d = &a - &b;
        let diff3 = &d * d.transpose() - aat.scale(1.0 - eps) - bbt.scale(1.0 - 1.0 / eps);
        check_psd(&mut report, "matrix-basicineq-diff", trial, &diff3, tol, &[("A", &a), ("B", &b)]);

        // (ii) overlap-weighted sum bound: A A^T <= sum_i m_i A_i A_i^T for a
        // random decomposition with supports U_i.
        let parts = rng.gen_range(2..=4usize);
        let mut supports: Vec<Vec<usize>> = Vec::new();
        let mut part_mats: Vec<DMatrix<f64>> = Vec::new();
        for _ in 0..parts {
            let support: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
            let mut ai = DMatrix::zeros(n, n);
            for &r in &support {
                for &c in &support {
                    ai[(r, c)] = rng.gen_range(-1.0..1.0);
                }
            }
            supports.push(support);
            part_mats.push(ai);
        }
        let total: DMatrix<f64> = part_mats.iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m);
        let t_of = |v: usize| supports.iter().filter(|s| s.contains(&v)).count();
        let mut rhs = DMatrix::zeros(n, n);
        for (s, ai) in supports.iter().zip(&part_mats) {
            let mi = s.iter().map(|&v| t_of(v)).max().unwrap_or(0) as f64;
            rhs += (ai * ai.transpose()).scale(mi);
        }
        let diff = rhs - &total * total.transpose();
        check_psd(&mut report, "matrix-sum-bound", trial, &diff, tol, &[("A", &total)]);

        // (iii) (sum A_i) Pi (sum A_i) <= n sum A_i Pi A_i with symmetric A_i.
        let kparts = rng.gen_range(1..=4usize);
        let syms: Vec<DMatrix<f64>> = (0..kparts).map(|_| rand_symmetric(&mut rng, n)).collect();
        let pi = {
            let g = rand_matrix(&mut rng, n);
            &g * g.transpose()
        };
        let total: DMatrix<f64> = syms.iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m);
        let lhs = &total * &pi * &total;
        let rhs = syms
            .iter()
            .fold(DMatrix::zeros(n, n), |acc, m| acc + m * &pi * m)
            .scale(kparts as f64);
        check_psd(&mut report, "matrix-squared-sum", trial, &(rhs - lhs), tol, &[("Pi", &pi)]);

        // (iv) conjugation preserves order: A^T B A <= A^T B' A when B <= B'.
        let a = rand_matrix(&mut rng, n);
        let b = rand_symmetric(&mut rng, n);
        let bump = {
            let g = rand_matrix(&mut rng, n);
            &g * g.transpose()
        };
        let bprime = &b + &bump;
        let diff = a.transpose() * &bprime * &a - a.transpose() * &b * &a;
        check_psd(&mut report, "matrix-product", trial, &diff, tol, &[("A", &a), ("B", &b)]);

        // (v) monotonicity of f(M) = M(I - eps M) below (1/2eps) I, via the
        // explicit inverse f^{-1}(M) = (1/2eps) I - ((1/4eps^2) I - M)^{1/2}.
        let eps: f64 = rng.gen_range(0.3..2.0);
        let cap = 1.0 / (2.0 * eps);
        let b = {
            let raw = rand_symmetric(&mut rng, n);
            let top = sym_eigenvalues_dense(&raw).last().copied().unwrap();
            // shift down so B <= (1/2eps) I with margin
            let shift = (top - cap * 0.9).max(0.0);
            raw - DMatrix::identity(n, n).scale(shift)
        };
        let fb = &b * (DMatrix::identity(n, n) - b.scale(eps));
        let drop = {
            let g = rand_matrix(&mut rng, n).scale(0.3);
            &g * g.transpose()
        };
        let fa = &fb - &drop;
        // x(1 - eps x) = y  =>  x = 1/(2eps) - sqrt(1/(4eps^2) - y/eps)
        let inner = DMatrix::identity(n, n).scale(1.0 / (4.0 * eps * eps)) - fa.scale(1.0 / eps);
        let a = DMatrix::identity(n, n).scale(cap) - psd_sqrt(&inner);
        let fa_check = &a * (DMatrix::identity(n, n) - a.scale(eps));
        // regression: f(f^{-1}(y)) = y
        let recon = (&fa_check - &fa).abs().max();
        if recon > 1e-8 {
            report.failures.push(LemmaFailure {
                lemma: "monotone-inverse-reconstruction".into(),
                trial,
                min_eig: recon,
                counterexample: dump(&[("fa", &fa), ("fa_check", &fa_check)]),
            });
        }
        report.checks_run += 1;
        // A(I - eps A) <= B(I - eps B) and A, B <= (1/2eps) I  =>  A <= B
        check_psd(&mut report, "monotone", trial, &(&b - &a), tol, &[("A", &a), ("B", &b)]);
    }
    report
}
