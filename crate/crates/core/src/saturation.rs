//! Operator systems, their energy matrices over `(S_N)^M`, and the trace and
//! cardinality bounds built from them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::{self, Averaging, DenseHermitian, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::linalg;
use crate::perm::{PermTuple, TupleSpace};

/// A family of operators `T_1, .., T_M` seen through their pairwise kernels.
///
/// Operator indices are 0-based (`0..M`); points are opaque identifiers.
pub trait SimultaneousSystem: Sync {
    fn multilinearity(&self) -> usize;
    /// `T_m(p) T_m(q)^*`.
    fn kernel(&self, m: usize, p: usize, q: usize) -> Complex64;
    fn relation(&self, m: usize, p: usize, q: usize) -> bool;
    fn bound(&self) -> f64;
    fn decay_rate(&self, lambda: f64) -> f64;
    fn lambda(&self) -> f64;
}

/// Distinct point identifiers `p_1, .., p_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    ids: Vec<usize>,
}

impl PointSet {
    pub fn new(ids: Vec<usize>) -> Result<Self> {
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("points must be distinct".into()));
        }
        if ids.is_empty() {
            return Err(Error::InvalidParameter("point set is empty".into()));
        }
        Ok(Self { ids })
    }

    /// The points `0, .., n-1`.
    pub fn first(n: usize) -> Self {
        Self {
            ids: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }
}

/// System given by explicit vectors: `kernel(m, p, q) = <v_m(p), v_m(q)>`,
/// conjugate-linear in the second slot.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteSystem {
    /// `vectors[m][p]`, all of one length `h`.
    vectors: Vec<Vec<Vec<Complex64>>>,
    /// `relations[m][p][q]`; `None` means every pair is related.
    relations: Option<Vec<Vec<Vec<bool>>>>,
    bound: f64,
    lambda: f64,
    decay_exponent: f64,
}

impl FiniteSystem {
    /// Validates shapes, `|v_m(p)| <= B`, and relations that are symmetric,
    /// reflexive and carry every nonzero kernel.
    pub fn new(
        vectors: Vec<Vec<Vec<Complex64>>>,
        relations: Option<Vec<Vec<Vec<bool>>>>,
        bound: f64,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidParameter("system has no operators".into()));
        }
        let points = vectors[0].len();
        let h = vectors[0].first().map_or(0, Vec::len);
        if points == 0 || h == 0 {
            return Err(Error::InvalidParameter("empty evaluation table".into()));
        }
        if !(bound > 0.0) {
            return Err(Error::InvalidParameter(format!("bound B = {bound}")));
        }
        for table in &vectors {
            if table.len() != points || table.iter().any(|v| v.len() != h) {
                return Err(Error::ShapeMismatch("ragged evaluation table".into()));
            }
            for v in table {
                let len = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if len > bound * (1.0 + 1e-12) {
                    return Err(Error::InvalidParameter(format!(
                        "vector of length {len} exceeds B = {bound}"
                    )));
                }
            }
        }
        let sys = Self {
            vectors,
            relations,
            bound,
            lambda: 1.0,
            decay_exponent: 0.0,
        };
        sys.validate_relations()?;
        Ok(sys)
    }

    fn validate_relations(&self) -> Result<()> {
        let Some(rel) = &self.relations else {
            return Ok(());
        };
        let points = self.points();
        if rel.len() != self.vectors.len()
            || rel.iter().any(|r| r.len() != points || r.iter().any(|row| row.len() != points))
        {
            return Err(Error::ShapeMismatch("relation table shape".into()));
        }
        for (m, r) in rel.iter().enumerate() {
            for p in 0..points {
                if !r[p][p] {
                    return Err(Error::InvalidParameter(format!(
                        "relation {m} is not reflexive at {p}"
                    )));
                }
                for q in 0..points {
                    if r[p][q] != r[q][p] {
                        return Err(Error::InvalidParameter(format!(
                            "relation {m} is not symmetric at ({p}, {q})"
                        )));
                    }
                    if !r[p][q] && self.kernel(m, p, q) != Complex64::new(0.0, 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "kernel {m} is nonzero off the relation at ({p}, {q})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Independent random vectors `v_m(p)` in `C^h` with `|v| in [B/2, B]`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        m: usize,
        points: usize,
        h: usize,
        bound: f64,
    ) -> Result<Self> {
        let vectors = (0..m)
            .map(|_| {
                (0..points)
                    .map(|_| {
                        let v: Vec<Complex64> = (0..h)
                            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                            .collect();
                        let len = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
                        let target = bound * rng.gen_range(0.5..=1.0);
                        v.into_iter().map(|z| z * (target / len)).collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(vectors, None, bound)
    }

    /// `kernel(m, p, q) = B² δ_pq`, related only on the diagonal.
    pub fn diagonal(m: usize, points: usize, bound: f64) -> Result<Self> {
        let table: Vec<Vec<Complex64>> = (0..points)
            .map(|p| {
                (0..points)
                    .map(|j| Complex64::new(if j == p { bound } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        let eq: Vec<Vec<bool>> = (0..points)
            .map(|p| (0..points).map(|q| p == q).collect())
            .collect();
        Self::new(vec![table; m], Some(vec![eq; m]), bound)
    }

    /// Every `v_m(p)` equal to `v`.
    pub fn rank_one(m: usize, points: usize, v: Vec<Complex64>) -> Result<Self> {
        let bound = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Self::new(vec![vec![v; points]; m], None, bound)
    }

    pub fn with_lambda(mut self, lambda: f64, decay_exponent: f64) -> Self {
        self.lambda = lambda;
        self.decay_exponent = decay_exponent;
        self
    }

    pub fn points(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vector(&self, m: usize, p: usize) -> &[Complex64] {
        &self.vectors[m][p]
    }
}

impl SimultaneousSystem for FiniteSystem {
    fn multilinearity(&self) -> usize {
        self.vectors.len()
    }

    fn kernel(&self, m: usize, p: usize, q: usize) -> Complex64 {
        self.vectors[m][p]
            .iter()
            .zip(&self.vectors[m][q])
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    fn relation(&self, m: usize, p: usize, q: usize) -> bool {
        self.relations.as_ref().map_or(true, |r| r[m][p][q])
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn decay_rate(&self, lambda: f64) -> f64 {
        lambda.powf(-self.decay_exponent)
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// An odd system with the point-evaluation operator appended at index `M`:
/// kernel `B² δ_pq` on the base points, zero elsewhere, related by equality.
pub struct EmbeddedSystem<'a, S: SimultaneousSystem> {
    inner: &'a S,
    base: Vec<usize>,
}

pub fn embed_odd_system<'a, S: SimultaneousSystem>(
    sys: &'a S,
    base: &PointSet,
) -> Result<EmbeddedSystem<'a, S>> {
    let m = sys.multilinearity();
    if m % 2 == 0 || m < 3 {
        return Err(Error::NotEmbeddable(m));
    }
    let mut ids = base.ids().to_vec();
    ids.sort_unstable();
    Ok(EmbeddedSystem { inner: sys, base: ids })
}

impl<S: SimultaneousSystem> SimultaneousSystem for EmbeddedSystem<'_, S> {
    fn multilinearity(&self) -> usize {
        self.inner.multilinearity() + 1
    }

    fn kernel(&self, m: usize, p: usize, q: usize) -> Complex64 {
        if m < self.inner.multilinearity() {
            self.inner.kernel(m, p, q)
        } else if p == q && self.base.binary_search(&p).is_ok() {
            Complex64::new(self.inner.bound().powi(2), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    fn relation(&self, m: usize, p: usize, q: usize) -> bool {
        if m < self.inner.multilinearity() {
            self.inner.relation(m, p, q)
        } else {
            p == q
        }
    }

    fn bound(&self) -> f64 {
        self.inner.bound()
    }

    fn decay_rate(&self, lambda: f64) -> f64 {
        self.inner.decay_rate(lambda)
    }

    fn lambda(&self) -> f64 {
        self.inner.lambda()
    }
}

/// Lower bound carried by the embedded system:
/// `L^{M/(M+1)} B^{1/(M+1)} N^{-1/(2(M+1))}`.
pub fn embedded_lower_bound(l: f64, b: f64, n: usize, m: usize) -> f64 {
    let m1 = (m + 1) as f64;
    l.powf(m as f64 / m1) * b.powf(1.0 / m1) * (n as f64).powf(-1.0 / (2.0 * m1))
}

fn check_shape<S: SimultaneousSystem + ?Sized>(sys: &S, base: &PointSet, s: &PermTuple) -> Result<()> {
    if s.degree() != base.len() || s.multilinearity() != sys.multilinearity() {
        return Err(Error::ShapeMismatch(format!(
            "tuple of shape ({}, {}) against {} points and {} operators",
            s.degree(),
            s.multilinearity(),
            base.len(),
            sys.multilinearity()
        )));
    }
    Ok(())
}

/// `U(P_σ, P_τ) = ∏_{m,j} kernel(m, p_{σ_m(j)}, p_{τ_m(j)})`.
pub fn tensor_kernel<S: SimultaneousSystem + ?Sized>(
    sys: &S,
    s: &PermTuple,
    t: &PermTuple,
    base: &PointSet,
) -> Result<Complex64> {
    check_shape(sys, base, s)?;
    check_shape(sys, base, t)?;
    let ids = base.ids();
    let mut acc = Complex64::new(1.0, 0.0);
    for (m, (a, b)) in s.parts().iter().zip(t.parts()).enumerate() {
        for j in 0..s.degree() {
            acc *= sys.kernel(m, ids[a.apply(j)], ids[b.apply(j)]);
        }
    }
    Ok(acc)
}

/// Kernel values between base points, arranged so that `[q][p]` is exactly
/// the conjugate of `[p][q]` and diagonals are real.
fn kernel_tables<S: SimultaneousSystem + ?Sized>(sys: &S, base: &PointSet) -> Vec<Vec<Vec<Complex64>>> {
    let ids = base.ids();
    let n = ids.len();
    (0..sys.multilinearity())
        .map(|m| {
            let mut t = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            for a in 0..n {
                t[a][a] = Complex64::new(sys.kernel(m, ids[a], ids[a]).re, 0.0);
                for b in a + 1..n {
                    let k = sys.kernel(m, ids[a], ids[b]);
                    t[a][b] = k;
                    t[b][a] = k.conj();
                }
            }
            t
        })
        .collect()
}

/// `W(σ, τ) = U(P_σ, P_τ) / D`.
#[derive(Clone, Debug)]
pub struct EnergyMatrix {
    matrix: DenseHermitian,
    n: usize,
    m: usize,
    lambda: f64,
}

impl EnergyMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.matrix.matrix()
    }

    pub fn hermitian(&self) -> &DenseHermitian {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn multilinearity(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn build_energy_matrix<S: SimultaneousSystem + ?Sized>(sys: &S, base: &PointSet) -> Result<EnergyMatrix> {
    let space = TupleSpace::new(base.len(), sys.multilinearity(), DENSE_LIMIT)?;
    build_energy_matrix_on(sys, base, &space)
}

/// As [`build_energy_matrix`] with a prebuilt tuple space.
pub fn build_energy_matrix_on<S: SimultaneousSystem + ?Sized>(
    sys: &S,
    base: &PointSet,
    space: &TupleSpace,
) -> Result<EnergyMatrix> {
    if space.degree() != base.len() || space.multilinearity() != sys.multilinearity() {
        return Err(Error::ShapeMismatch("tuple space does not match the system".into()));
    }
    let tables = kernel_tables(sys, base);
    let d = space.len();
    let n = base.len();
    let inv_d = 1.0 / d as f64;
    let tuples = space.tuples();
    let rows: Vec<Vec<Complex64>> = tuples
        .par_iter()
        .map(|s| {
            tuples
                .iter()
                .map(|t| {
                    let mut acc = Complex64::new(1.0, 0.0);
                    for (m, (a, b)) in s.parts().iter().zip(t.parts()).enumerate() {
                        for j in 0..n {
                            acc *= tables[m][a.apply(j)][b.apply(j)];
                        }
                    }
                    acc * inv_d
                })
                .collect()
        })
        .collect();
    let matrix = DMatrix::from_fn(d, d, |r, c| rows[r][c]);
    Ok(EnergyMatrix {
        matrix: DenseHermitian::new(matrix)?,
        n,
        m: sys.multilinearity(),
        lambda: sys.lambda(),
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct OnesEigen {
    /// Eigenvalue of `W` on the all-ones vector, `(W·1)(e)`.
    pub lambda: f64,
    /// `max_σ |(W·1)(σ) - (W·1)(e)|`.
    pub residual: f64,
}

/// `W·1` is constant; returns its value and spread.
pub fn ones_eigen_check(w: &EnergyMatrix) -> Result<OnesEigen> {
    let r = ones_eigen(w);
    let tolerance = 1e-9 * r.lambda.abs() + 1e-14;
    if r.residual > tolerance {
        return Err(Error::OnesResidual {
            residual: r.residual,
            tolerance,
        });
    }
    Ok(r)
}

/// [`ones_eigen_check`] without the tolerance verdict.
pub fn ones_eigen(w: &EnergyMatrix) -> OnesEigen {
    let z = w.matrix() * linalg::ones(w.dim());
    let e = z[0];
    let residual = z.iter().map(|v| (v - e).norm()).fold(0.0, f64::max);
    OnesEigen {
        lambda: e.re,
        residual,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TraceBoundReport {
    /// `Re Trace(A·W)`.
    pub trace: f64,
    pub trace_imag: f64,
    pub lambda: f64,
    /// Eigenvalue of `A·W` on the ones vector.
    pub two_lambda: f64,
    pub exceeds_lambda: bool,
    pub exceeds_two_lambda: bool,
    pub a_psd: Option<bool>,
    pub w_psd: Option<bool>,
}

impl TraceBoundReport {
    /// The `Trace >= Λ` verdict, available only when both factors were
    /// verified positive semi-definite.
    pub fn verify(&self) -> Result<bool> {
        if self.a_psd != Some(true) {
            return Err(Error::PsdUnverified("A"));
        }
        if self.w_psd != Some(true) {
            return Err(Error::PsdUnverified("W"));
        }
        Ok(self.exceeds_lambda)
    }
}

/// `Trace(A·W)` against `Λ` and `2Λ`. The comparisons are always computed;
/// the PSD flags record what is known about the factors.
pub fn trace_bound_check(
    w: &EnergyMatrix,
    a: &DenseHermitian,
    a_psd: Option<bool>,
    w_psd: Option<bool>,
) -> Result<TraceBoundReport> {
    if a.dim() != w.dim() {
        return Err(Error::ShapeMismatch(format!(
            "A is {0}x{0}, W is {1}x{1}",
            a.dim(),
            w.dim()
        )));
    }
    if w.multilinearity() % 2 != 0 {
        return Err(Error::OddMultilinearity(w.multilinearity()));
    }
    let (am, wm) = (a.matrix(), w.matrix());
    let d = w.dim();
    // Trace(A W) = Σ_{s,t} A(s,t) W(t,s), summed in fixed order.
    let mut trace = Complex64::new(0.0, 0.0);
    for s in 0..d {
        for t in 0..d {
            trace += am[(s, t)] * wm[(t, s)];
        }
    }
    let lambda = ones_eigen(w).lambda;
    Ok(TraceBoundReport {
        trace: trace.re,
        trace_imag: trace.im,
        lambda,
        two_lambda: 2.0 * lambda,
        exceeds_lambda: trace.re >= lambda - 1e-9 * lambda.abs(),
        exceeds_two_lambda: trace.re >= 2.0 * lambda - 2e-9 * lambda.abs(),
        a_psd,
        w_psd,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct CensusReport {
    pub count: usize,
    /// `2^{MN} N^{εN}`.
    pub bound: f64,
}

impl CensusReport {
    pub fn within_bound(&self) -> bool {
        self.count as f64 <= self.bound
    }
}

/// Counts tuples `μ` weaving with `s` at Hamming distance at most `εN`.
pub fn diagonal_census(space: &TupleSpace, s: &PermTuple, epsilon: f64) -> Result<CensusReport> {
    let (n, m) = (space.degree(), space.multilinearity());
    if s.degree() != n || s.multilinearity() != m {
        return Err(Error::ShapeMismatch("tuple does not belong to the space".into()));
    }
    if m % 2 != 0 {
        return Err(Error::OddMultilinearity(m));
    }
    let radius = epsilon * n as f64;
    let count = space
        .tuples()
        .iter()
        .filter(|mu| mu.weaves_unchecked(s) && mu.hamming_unchecked(s) as f64 <= radius)
        .count();
    let nf = n as f64;
    Ok(CensusReport {
        count,
        bound: 2f64.powi((m * n) as i32) * nf.powf(epsilon * nf),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// `N^{1-ε} <= (B/L)^{2M/(M-1)}`, or `(B/L)^2` when `M = 1`.
    Theorem,
    /// `N^{1-ε/(M-1)} <= (B/L)^{2M/(M-1)}`, `M` even.
    EvenProof,
    /// `N^{1-εM/(M-1)²} <= (B/L)^{2M/(M-1)}`, `M` odd and at least 3.
    OddProof,
    /// `N^{1-ε} <= (B/L)^2`.
    M1,
}

/// `N^exponent <= rhs`, so `N <= max_n`. The constant is taken to be 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NBound {
    pub exponent: f64,
    pub rhs: f64,
    pub max_n: f64,
}

impl NBound {
    pub fn admits(&self, n: usize) -> bool {
        (n as f64).powf(self.exponent) <= self.rhs * (1.0 + 1e-12)
    }
}

pub fn theorem_bound(m: usize, b: f64, l: f64, epsilon: f64, variant: BoundVariant) -> Result<NBound> {
    if !(l > 0.0 && b >= l && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need B >= L > 0, got B = {b}, L = {l}"
        )));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("multilinearity must be >= 1".into()));
    }
    let ratio = b / l;
    let mf = m as f64;
    let multi = || ratio.powf(2.0 * mf / (mf - 1.0));
    let (exponent, rhs) = match variant {
        BoundVariant::Theorem if m == 1 => (1.0 - epsilon, ratio * ratio),
        BoundVariant::Theorem => (1.0 - epsilon, multi()),
        BoundVariant::EvenProof => {
            if m % 2 != 0 {
                return Err(Error::OddMultilinearity(m));
            }
            (1.0 - epsilon / (mf - 1.0), multi())
        }
        BoundVariant::OddProof => {
            if m % 2 == 0 || m < 3 {
                return Err(Error::NotEmbeddable(m));
            }
            (1.0 - epsilon * mf / ((mf - 1.0) * (mf - 1.0)), multi())
        }
        BoundVariant::M1 => {
            if m != 1 {
                return Err(Error::InvalidParameter(format!("M1 bound with M = {m}")));
            }
            (1.0 - epsilon, ratio * ratio)
        }
    };
    Ok(NBound {
        exponent,
        rhs,
        max_n: rhs.powf(1.0 / exponent),
    })
}

/// Everything measured for one system and point set.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SaturationReport {
    pub n: usize,
    pub m: usize,
    pub b: f64,
    /// `Λ^{1/(2MN)}`, the per-site lower bound implied by the ones eigenvalue.
    pub l: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub two_lambda: f64,
    pub ones_residual: f64,
    pub w_lambda_min: f64,
    pub w_norm: f64,
    pub w_psd: bool,
    pub a_lambda_min: Option<f64>,
    pub a_psd: Option<bool>,
    pub trace: Option<f64>,
    pub trace_exceeds_lambda: Option<bool>,
    pub trace_exceeds_two_lambda: Option<bool>,
    pub bound: NBound,
    pub bound_holds: bool,
}

impl SaturationReport {
    /// Verdicts that must hold for any valid system.
    pub fn passed(&self) -> bool {
        self.ones_residual <= 1e-9 * self.w_norm.max(f64::MIN_POSITIVE)
            && self.w_psd
            && self.trace_exceeds_lambda.unwrap_or(true)
    }
}

/// Builds `W`, checks the ones eigenvector and positivity, and for even `M`
/// the trace against `Λ`; evaluates the theorem bound at `L = Λ^{1/(2MN)}`.
pub fn analyze_system<S: SimultaneousSystem + ?Sized>(
    sys: &S,
    base: &PointSet,
    epsilon: f64,
    averaging: Option<&Averaging>,
) -> Result<SaturationReport> {
    let w = build_energy_matrix(sys, base)?;
    let ones = ones_eigen(&w);
    let w_spec = averaging::check_psd(w.hermitian());
    let (n, m) = (base.len(), sys.multilinearity());
    let (a_lambda_min, a_psd, trace) = if m % 2 == 0 {
        let owned;
        let avg = match averaging {
            Some(a) => a,
            None => {
                owned = Averaging::new(n, m)?;
                &owned
            }
        };
        let a = avg.symmetrized()?;
        let a_spec = averaging::check_psd(&a);
        let t = trace_bound_check(&w, &a, Some(a_spec.psd), Some(w_spec.psd))?;
        (Some(a_spec.lambda_min), Some(a_spec.psd), Some(t))
    } else {
        (None, None, None)
    };
    let b = sys.bound();
    let l = ones.lambda.max(0.0).powf(1.0 / (2 * m * n) as f64).min(b);
    let variant = if m == 1 {
        BoundVariant::M1
    } else {
        BoundVariant::Theorem
    };
    let bound = theorem_bound(m, b, l.max(f64::MIN_POSITIVE), epsilon, variant)?;
    Ok(SaturationReport {
        n,
        m,
        b,
        l,
        epsilon,
        lambda: ones.lambda,
        two_lambda: 2.0 * ones.lambda,
        ones_residual: ones.residual,
        w_lambda_min: w_spec.lambda_min,
        w_norm: w_spec.norm,
        w_psd: w_spec.psd,
        a_lambda_min,
        a_psd,
        trace: trace.as_ref().map(|t| t.trace),
        trace_exceeds_lambda: trace.as_ref().map(|t| t.exceeds_lambda),
        trace_exceeds_two_lambda: trace.as_ref().map(|t| t.exceeds_two_lambda),
        bound_holds: bound.admits(n),
        bound,
    })
}
