//! Averaging operators over `(S_N)^M`: the even/odd projectors, the cycle
//! matrix and their symmetrized product, together with exact structural checks.
//!
//! Indicator matrices keep one scale and a sparse support. Structural
//! identities are checked on integer counts (products of supports) so they
//! are exact; only the spectral checks touch floating point.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::perm::{factorial, PermTuple, Permutation, TupleSpace};

/// Largest tuple space any dense consumer accepts.
pub const DENSE_LIMIT: u64 = 20_000;

/// Matrix whose entries are `scale` on `support` and zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledIndicatorMatrix {
    dim: usize,
    scale: f64,
    rows: Vec<Vec<usize>>,
}

impl ScaledIndicatorMatrix {
    /// `rows[r]` lists the columns of row `r`; they are sorted and deduplicated.
    pub fn new(scale: f64, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        let dim = rows.len();
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            if let Some(&c) = row.last() {
                if c >= dim {
                    return Err(Error::IndexOutOfRange { index: c, len: dim });
                }
            }
        }
        Ok(Self { dim, scale, rows })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            scale: 1.0,
            rows: (0..dim).map(|r| vec![r]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn support_len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.rows[r].binary_search(&c).is_ok()
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        if self.contains(r, c) {
            self.scale
        } else {
            0.0
        }
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.dim];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                rows[c].push(r);
            }
        }
        Self {
            dim: self.dim,
            scale: self.scale,
            rows,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(r, row)| row.iter().all(|&c| self.contains(c, r)))
    }

    /// Scale 1 with exactly one support entry in every row and column.
    pub fn is_permutation(&self) -> bool {
        let mut hit = vec![false; self.dim];
        self.scale == 1.0
            && self.rows.iter().all(|row| {
                row.len() == 1 && !std::mem::replace(&mut hit[row[0]], true)
            })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                m[(r, c)] = self.scale;
            }
        }
        m
    }

    /// Writes `row col value` lines, one per support entry.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                writeln!(out, "{r} {c} {:e}", self.scale)?;
            }
        }
        Ok(())
    }
}

/// Sparse non-negative integer matrix, the support count of an indicator product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, u32)>>,
}

impl CountMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        match self.rows[r].binary_search_by_key(&c, |&(col, _)| col) {
            Ok(i) => self.rows[r][i].1,
            Err(_) => 0,
        }
    }

    pub fn row(&self, r: usize) -> &[(usize, u32)] {
        &self.rows[r]
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// First `(row, col, self, other)` where the two disagree.
    pub fn first_difference(&self, other: &CountMatrix) -> Option<(usize, usize, u32, u32)> {
        for r in 0..self.dim.max(other.dim) {
            let a = self.rows.get(r).map(Vec::as_slice).unwrap_or(&[]);
            let b = other.rows.get(r).map(Vec::as_slice).unwrap_or(&[]);
            if a != b {
                let mut cols: Vec<usize> = a.iter().chain(b).map(|e| e.0).collect();
                cols.sort_unstable();
                for c in cols {
                    let (x, y) = (lookup(a, c), lookup(b, c));
                    if x != y {
                        return Some((r, c, x, y));
                    }
                }
            }
        }
        None
    }

    /// Reinterprets a 0/1 count matrix as an indicator with the given scale.
    pub fn to_indicator(&self, scale: f64) -> Result<ScaledIndicatorMatrix> {
        let mut rows = Vec::with_capacity(self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(&(c, n)) = row.iter().find(|e| e.1 > 1) {
                return Err(Error::StructuralMismatch {
                    what: "0/1 count",
                    row: r,
                    col: c,
                    expected: "at most 1".into(),
                    found: n.to_string(),
                });
            }
            rows.push(row.iter().map(|e| e.0).collect());
        }
        ScaledIndicatorMatrix::new(scale, rows)
    }

    pub fn from_indicator(a: &ScaledIndicatorMatrix) -> Self {
        Self {
            dim: a.dim,
            rows: a
                .rows
                .iter()
                .map(|row| row.iter().map(|&c| (c, 1)).collect())
                .collect(),
        }
    }
}

fn lookup(row: &[(usize, u32)], c: usize) -> u32 {
    row.iter().find(|e| e.0 == c).map_or(0, |e| e.1)
}

/// Support counts of `a · b`: entry `(r, c)` is `#{k : a(r,k) ≠ 0, b(k,c) ≠ 0}`.
pub fn count_product(a: &ScaledIndicatorMatrix, b: &ScaledIndicatorMatrix) -> Result<CountMatrix> {
    if a.dim != b.dim {
        return Err(Error::ShapeMismatch(format!(
            "product of {0}x{0} and {1}x{1}",
            a.dim, b.dim
        )));
    }
    let dim = a.dim;
    let mut acc = vec![0u32; dim];
    let mut touched = Vec::new();
    let mut rows = Vec::with_capacity(dim);
    for row in &a.rows {
        for &k in row {
            for &c in &b.rows[k] {
                if acc[c] == 0 {
                    touched.push(c);
                }
                acc[c] += 1;
            }
        }
        touched.sort_unstable();
        rows.push(touched.iter().map(|&c| (c, acc[c])).collect());
        for &c in &touched {
            acc[c] = 0;
        }
        touched.clear();
    }
    Ok(CountMatrix { dim, rows })
}

/// Conjugate-symmetric dense complex matrix.
#[derive(Clone, Debug)]
pub struct DenseHermitian {
    matrix: DMatrix<Complex64>,
}

impl DenseHermitian {
    /// Accepts `matrix` if its asymmetry is within `1e-12 · max|entry|`.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} is not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let tolerance = 1e-12 * linalg::max_abs(&matrix);
        let asymmetry = linalg::hermitian_defect(&matrix);
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self { matrix })
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }
}

/// Tuple space of shape `(N, M)` together with its equivalence projectors.
#[derive(Clone, Debug)]
pub struct Averaging {
    space: TupleSpace,
    even: ScaledIndicatorMatrix,
    odd: ScaledIndicatorMatrix,
    cycle: ScaledIndicatorMatrix,
}

impl Averaging {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m % 2 != 0 {
            return Err(Error::OddMultilinearity(m));
        }
        let space = TupleSpace::new(n, m, DENSE_LIMIT)?;
        let even = class_projector(&space, 2)?;
        let odd = class_projector(&space, 1)?;
        let cycle = cycle_matrix(&space)?;
        Ok(Self {
            space,
            even,
            odd,
            cycle,
        })
    }

    pub fn space(&self) -> &TupleSpace {
        &self.space
    }

    pub fn even(&self) -> &ScaledIndicatorMatrix {
        &self.even
    }

    pub fn odd(&self) -> &ScaledIndicatorMatrix {
        &self.odd
    }

    pub fn cycle(&self) -> &ScaledIndicatorMatrix {
        &self.cycle
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    /// `A_ev A_odd + A_odd A_ev` as a dense matrix.
    pub fn symmetrized(&self) -> Result<DenseHermitian> {
        let eo = count_product(&self.even, &self.odd)?;
        let oe = count_product(&self.odd, &self.even)?;
        let scale = self.even.scale * self.odd.scale;
        let d = self.dim();
        let mut a = DMatrix::<f64>::zeros(d, d);
        for r in 0..d {
            for &(c, n) in eo.row(r).iter().chain(oe.row(r)) {
                a[(r, c)] += n as f64 * scale;
            }
        }
        DenseHermitian::from_real(&a)
    }

    /// `A_ev + A_odd` as a dense real matrix.
    pub fn projector_sum(&self) -> DMatrix<f64> {
        self.even.to_dense() + self.odd.to_dense()
    }

    /// Every `~ev` and `~odd` class has `D^{1/2}` members, and both projectors
    /// are idempotent on counts. Returns the common class size.
    pub fn check_projectors(&self) -> Result<usize> {
        let expected = class_size(&self.space);
        for (what, p) in [("even class", &self.even), ("odd class", &self.odd)] {
            if !p.is_symmetric() {
                return Err(Error::StructuralMismatch {
                    what,
                    row: 0,
                    col: 0,
                    expected: "symmetric support".into(),
                    found: "asymmetric support".into(),
                });
            }
            for r in 0..self.dim() {
                if p.row(r).len() != expected {
                    return Err(Error::StructuralMismatch {
                        what,
                        row: r,
                        col: r,
                        expected: expected.to_string(),
                        found: p.row(r).len().to_string(),
                    });
                }
            }
            // P·P counts the class size on the support, so scale² · count = scale.
            let squared = count_product(p, p)?;
            let mut scaled_support = CountMatrix::from_indicator(p);
            for row in &mut scaled_support.rows {
                for e in row.iter_mut() {
                    e.1 = expected as u32;
                }
            }
            mismatch("projector square", &squared, &scaled_support)?;
        }
        Ok(expected)
    }

    /// `A_odd = C A_ev C^{-1}` and `C²` commutes with both projectors.
    pub fn check_similarity(&self) -> Result<SimilarityReport> {
        if !self.cycle.is_permutation() {
            return Err(Error::StructuralMismatch {
                what: "cycle matrix",
                row: 0,
                col: 0,
                expected: "permutation matrix".into(),
                found: "other".into(),
            });
        }
        let c_inv = self.cycle.transpose();
        let left = count_product(&self.cycle, &self.even)?.to_indicator(1.0)?;
        let conj = count_product(&left, &c_inv)?;
        mismatch("similarity", &conj, &CountMatrix::from_indicator(&self.odd))?;

        let c2 = count_product(&self.cycle, &self.cycle)?.to_indicator(1.0)?;
        for (what, p) in [
            ("C^2 commutator with A_ev", &self.even),
            ("C^2 commutator with A_odd", &self.odd),
        ] {
            mismatch(what, &count_product(&c2, p)?, &count_product(p, &c2)?)?;
        }
        Ok(SimilarityReport {
            dim: self.dim(),
            support: self.odd.support_len(),
        })
    }

    /// `C^M` is the identity.
    pub fn check_cycle_power(&self) -> Result<()> {
        let mut power = ScaledIndicatorMatrix::identity(self.dim());
        for _ in 0..self.space.multilinearity() {
            power = count_product(&power, &self.cycle)?.to_indicator(1.0)?;
        }
        mismatch(
            "C^M",
            &CountMatrix::from_indicator(&power),
            &CountMatrix::from_indicator(&ScaledIndicatorMatrix::identity(self.dim())),
        )
    }

    /// `A_odd A_ev(σ,τ) = D^{-(1-1/M)} [σ W τ]` and
    /// `A_ev A_odd(σ,τ) = D^{-(1-1/M)} [τ W σ]`, compared on counts: each
    /// weaving pair has exactly `N!` intermediate tuples.
    pub fn check_weaving_product(&self) -> Result<WeavingReport> {
        let witnesses = factorial(self.space.degree()) as u32;
        let tuples = self.space.tuples();
        let d = self.dim();
        let mut forward = Vec::with_capacity(d);
        let mut backward = Vec::with_capacity(d);
        for s in tuples {
            let mut f = Vec::new();
            let mut b = Vec::new();
            for (c, t) in tuples.iter().enumerate() {
                if s.weaves_unchecked(t) {
                    f.push((c, witnesses));
                }
                if t.weaves_unchecked(s) {
                    b.push((c, witnesses));
                }
            }
            forward.push(f);
            backward.push(b);
        }
        let forward = CountMatrix { dim: d, rows: forward };
        let backward = CountMatrix { dim: d, rows: backward };
        mismatch("A_odd A_ev weaving", &count_product(&self.odd, &self.even)?, &forward)?;
        mismatch("A_ev A_odd weaving", &count_product(&self.even, &self.odd)?, &backward)?;
        Ok(WeavingReport {
            dim: d,
            witnesses: witnesses as usize,
            weaving_pairs: forward.nonzeros(),
            scale: self.even.scale * self.odd.scale * witnesses as f64,
        })
    }

    /// Eigenvalues of `C` read off its cycle decomposition on tuples: an orbit
    /// of length `ℓ` contributes every `ℓ`-th root of unity once.
    pub fn cycle_spectrum(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut seen = vec![false; d];
        let mut values = Vec::with_capacity(d);
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut at = start;
            while !seen[at] {
                seen[at] = true;
                at = self.cycle.row(at)[0];
                len += 1;
            }
            for j in 0..len {
                let angle = 2.0 * std::f64::consts::PI * j as f64 / len as f64;
                values.push(Complex64::from_polar(1.0, angle));
            }
        }
        values
    }
}

fn mismatch(what: &'static str, found: &CountMatrix, expected: &CountMatrix) -> Result<()> {
    match found.first_difference(expected) {
        None => Ok(()),
        Some((row, col, got, want)) => Err(Error::StructuralMismatch {
            what,
            row,
            col,
            expected: want.to_string(),
            found: got.to_string(),
        }),
    }
}

fn class_size(space: &TupleSpace) -> usize {
    factorial(space.degree()).pow(space.multilinearity() as u32 / 2)
}

/// Groups tuples by their transitions at `first, first + 2, ..`.
fn class_projector(space: &TupleSpace, first: usize) -> Result<ScaledIndicatorMatrix> {
    let m = space.multilinearity();
    let mut classes: HashMap<Vec<Permutation>, Vec<usize>> = HashMap::new();
    let keys: Vec<Vec<Permutation>> = space
        .tuples()
        .iter()
        .map(|t| {
            (first..=m)
                .step_by(2)
                .map(|k| t.transition_unchecked(k))
                .collect()
        })
        .collect();
    for (i, key) in keys.iter().enumerate() {
        classes.entry(key.clone()).or_default().push(i);
    }
    let rows = keys.iter().map(|k| classes[k].clone()).collect();
    let scale = 1.0 / (class_size(space) as f64);
    ScaledIndicatorMatrix::new(scale, rows)
}

/// `C(σ, 𝔠σ) = 1`.
fn cycle_matrix(space: &TupleSpace) -> Result<ScaledIndicatorMatrix> {
    let rows = space
        .tuples()
        .iter()
        .map(|t| vec![space.index_of(&t.cycle_shift())])
        .collect();
    ScaledIndicatorMatrix::new(1.0, rows)
}

pub fn build_even_projector(n: usize, m: usize) -> Result<ScaledIndicatorMatrix> {
    Ok(Averaging::new(n, m)?.even)
}

pub fn build_odd_projector(n: usize, m: usize) -> Result<ScaledIndicatorMatrix> {
    Ok(Averaging::new(n, m)?.odd)
}

/// Permutation matrix of the cyclic shift; defined for every `M >= 1`.
pub fn build_cycle_matrix(n: usize, m: usize) -> Result<ScaledIndicatorMatrix> {
    cycle_matrix(&TupleSpace::new(n, m, DENSE_LIMIT)?)
}

pub fn build_symmetrized_average(n: usize, m: usize) -> Result<DenseHermitian> {
    Averaging::new(n, m)?.symmetrized()
}

pub fn check_similarity(n: usize, m: usize) -> Result<SimilarityReport> {
    Averaging::new(n, m)?.check_similarity()
}

pub fn check_weaving_product(n: usize, m: usize) -> Result<WeavingReport> {
    Averaging::new(n, m)?.check_weaving_product()
}

#[derive(Clone, Debug, Serialize)]
pub struct SimilarityReport {
    pub dim: usize,
    pub support: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeavingReport {
    pub dim: usize,
    pub witnesses: usize,
    pub weaving_pairs: usize,
    /// Common value `D^{-(1-1/M)}` of the nonzero product entries.
    pub scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PsdReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Spectral norm.
    pub norm: f64,
    pub psd: bool,
}

/// Full Hermitian eigendecomposition; PSD iff `λ_min >= -1e-9 ‖H‖`.
pub fn check_psd(h: &DenseHermitian) -> PsdReport {
    psd_from_eigenvalues(&linalg::hermitian_eigenvalues(h.matrix()))
}

pub fn psd_from_eigenvalues(ev: &[f64]) -> PsdReport {
    let lambda_min = ev.first().copied().unwrap_or(0.0);
    let lambda_max = ev.last().copied().unwrap_or(0.0);
    let norm = lambda_min.abs().max(lambda_max.abs());
    PsdReport {
        lambda_min,
        lambda_max,
        norm,
        psd: lambda_min >= -1e-9 * norm,
    }
}

/// Spectrum of `A_ev + A_odd` and how many eigenvalues fall strictly inside
/// the gap `(1e-9, 1 - 1e-9)`.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub eigenvalues: Vec<f64>,
    pub in_gap: usize,
}

impl GapReport {
    pub fn holds(&self) -> bool {
        self.in_gap == 0
    }
}

pub fn projector_sum_gap(avg: &Averaging) -> GapReport {
    let eigenvalues = linalg::real_symmetric_eigenvalues(&avg.projector_sum());
    let in_gap = eigenvalues
        .iter()
        .filter(|&&x| x > 1e-9 && x < 1.0 - 1e-9)
        .count();
    GapReport {
        eigenvalues,
        in_gap,
    }
}

/// Convenience for reports: how many tuples weave with `s`.
pub fn weaving_degree(space: &TupleSpace, s: &PermTuple) -> usize {
    space
        .tuples()
        .iter()
        .filter(|t| t.weaves_unchecked(s))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_degree_is_scalar() {
        let avg = Averaging::new(1, 2).unwrap();
        assert_eq!(avg.dim(), 1);
        assert_eq!(avg.even().entry(0, 0), 1.0);
        let a = avg.symmetrized().unwrap();
        assert_eq!(a.matrix()[(0, 0)].re, 2.0);
        assert!(avg.check_similarity().is_ok());
        let w = avg.check_weaving_product().unwrap();
        assert_eq!(w.scale, 1.0);
    }

    #[test]
    fn projectors_for_two_two() {
        let avg = Averaging::new(2, 2).unwrap();
        for p in [avg.even(), avg.odd()] {
            assert_eq!(p.dim(), 4);
            assert_eq!(p.scale(), 0.5);
            assert!((0..4).all(|r| p.row(r).len() == 2));
            let dense = p.to_dense();
            assert_eq!((&dense * &dense - &dense).amax(), 0.0);
        }
        assert_eq!(avg.check_projectors().unwrap(), 2);
    }

    #[test]
    fn cycle_matrix_properties() {
        assert_eq!(
            build_cycle_matrix(3, 1).unwrap(),
            ScaledIndicatorMatrix::identity(6)
        );
        let avg = Averaging::new(2, 2).unwrap();
        let c = avg.cycle().to_dense();
        assert_eq!(&c * &c, DMatrix::identity(4, 4));
        avg.check_cycle_power().unwrap();
        let spectrum = avg.cycle_spectrum();
        assert_eq!(spectrum.len(), 4);
        for z in spectrum {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(2) - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn cycle_matrix_maps_basis_vectors_backwards() {
        // C V_σ = V_{𝔠^{-1}σ}: column σ of C has its one at row 𝔠^{-1}σ.
        let space = TupleSpace::new(2, 3, 100).unwrap();
        let c = build_cycle_matrix(2, 3).unwrap();
        for s in space.tuples() {
            let col = space.index_of(s);
            let row = space.index_of(&s.cycle_unshift());
            assert!(c.contains(row, col));
        }
    }

    #[test]
    fn weaving_product_small() {
        let r = check_weaving_product(2, 2).unwrap();
        assert_eq!(r.weaving_pairs, 8);
        assert_eq!(r.scale, 0.5);
        let r = check_weaving_product(3, 2).unwrap();
        assert_eq!(r.dim, 36);
        assert_eq!(r.weaving_pairs, 216);
    }

    #[test]
    fn symmetrized_average_two_two() {
        let avg = Averaging::new(2, 2).unwrap();
        let a = avg.symmetrized().unwrap();
        let ones = linalg::ones(4);
        let z = a.matrix() * &ones;
        assert!(z.iter().all(|v| (v.re - 2.0).abs() < 1e-15 && v.im == 0.0));
        let space = avg.space();
        for (r, s) in space.tuples().iter().enumerate() {
            for (c, t) in space.tuples().iter().enumerate() {
                let expected = 0.5 * (s.weaves(t).unwrap() as u8 + t.weaves(s).unwrap() as u8) as f64;
                assert_eq!(a.matrix()[(r, c)].re, expected);
            }
        }
        let psd = check_psd(&a);
        assert!(psd.psd);
        let gap = projector_sum_gap(&avg);
        assert!(gap.holds(), "{:?}", gap.eigenvalues);
    }

    #[test]
    fn symmetrized_average_is_indefinite_for_nonabelian_four_fold_tuples() {
        // Counterexample at (N, M) = (3, 4): A has a negative eigenvalue and
        // A_ev + A_odd has an eigenvalue strictly between 0 and 1.
        let avg = Averaging::new(3, 4).unwrap();
        let psd = check_psd(&avg.symmetrized().unwrap());
        assert!((psd.lambda_min + 0.25).abs() < 1e-9, "{}", psd.lambda_min);
        assert!(!psd.psd);
        let gap = projector_sum_gap(&avg);
        assert!(gap.in_gap > 0);
        assert!(gap.eigenvalues.iter().any(|&x| (x - 0.5).abs() < 1e-9));
    }

    #[test]
    fn psd_of_zero_matrix() {
        let z = DenseHermitian::from_real(&DMatrix::zeros(3, 3)).unwrap();
        let r = check_psd(&z);
        assert_eq!(r.lambda_min, 0.0);
        assert!(r.psd);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            DenseHermitian::from_real(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn builders_refuse_odd_multilinearity() {
        assert!(matches!(
            build_even_projector(2, 3),
            Err(Error::OddMultilinearity(3))
        ));
        assert!(matches!(
            build_symmetrized_average(6, 4),
            Err(Error::DenseGuard { .. })
        ));
    }

    #[test]
    fn similarity_detects_corruption() {
        // For M = 2 the two relations coincide, so corrupt a four-fold space.
        let mut avg = Averaging::new(2, 4).unwrap();
        avg.check_similarity().unwrap();
        avg.odd = avg.even.clone();
        assert!(matches!(
            avg.check_similarity(),
            Err(Error::StructuralMismatch { what: "similarity", .. })
        ));
    }

    #[test]
    fn triplet_dump() {
        let mut out = Vec::new();
        build_cycle_matrix(2, 1).unwrap().write_triplets(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 0 1e0\n1 1 1e0\n");
    }
}
