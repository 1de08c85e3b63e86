//! Permutations of `{0, .., N-1}` and tuples of them.
//!
//! A [`PermTuple`] is an element `(σ_1, .., σ_M)` of `(S_N)^M`. Operator
//! positions inside a tuple are written `1..=M` whenever clock arithmetic is
//! involved (`σ_0` means `σ_M`); everywhere else indices are 0-based.
//!
//! Tuples are ranked in mixed radix with `σ_1` as the most significant digit
//! and each digit the lexicographic (Lehmer) rank of the part. The rank of a
//! permutation equals its position in [`enumerate_group`].

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 6;

/// A bijection of `{0, .., N-1}` stored as its image array.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    len: u8,
    images: [u8; MAX_DEGREE],
}

impl Permutation {
    pub fn new(mapping: &[usize]) -> Result<Self> {
        let n = mapping.len();
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(n));
        }
        let mut seen = [false; MAX_DEGREE];
        let mut images = [0u8; MAX_DEGREE];
        for (slot, &image) in mapping.iter().enumerate() {
            if image >= n || seen[image] {
                return Err(Error::NotABijection(mapping.to_vec()));
            }
            seen[image] = true;
            images[slot] = image as u8;
        }
        Ok(Self {
            len: n as u8,
            images,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_degree(n)?;
        let mut images = [0u8; MAX_DEGREE];
        for (j, slot) in images.iter_mut().enumerate().take(n) {
            *slot = j as u8;
        }
        Ok(Self {
            len: n as u8,
            images,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.images[j] as usize
    }

    pub fn mapping(&self) -> Vec<usize> {
        self.images[..self.degree()]
            .iter()
            .map(|&x| x as usize)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.degree()).all(|j| self.apply(j) == j)
    }

    /// `(self ∘ other)(j) = self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len != other.len {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        let mut images = [0u8; MAX_DEGREE];
        for (j, slot) in images.iter_mut().enumerate().take(self.degree()) {
            *slot = self.images[other.images[j] as usize];
        }
        Permutation {
            len: self.len,
            images,
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = [0u8; MAX_DEGREE];
        for j in 0..self.degree() {
            images[self.images[j] as usize] = j as u8;
        }
        Permutation {
            len: self.len,
            images,
        }
    }

    /// Lexicographic rank among all permutations of the same degree.
    pub fn lehmer_rank(&self) -> usize {
        let n = self.degree();
        let mut rank = 0;
        for i in 0..n {
            let smaller_later = (i + 1..n)
                .filter(|&k| self.images[k] < self.images[i])
                .count();
            rank += smaller_later * factorial(n - 1 - i);
        }
        rank
    }

    pub fn from_lehmer_rank(n: usize, rank: usize) -> Result<Permutation> {
        check_degree(n)?;
        let size = factorial(n);
        if rank >= size {
            return Err(Error::RankOutOfRange {
                rank: rank as u64,
                size: size as u64,
            });
        }
        let mut pool: Vec<u8> = (0..n as u8).collect();
        let mut images = [0u8; MAX_DEGREE];
        let mut rest = rank;
        for (i, slot) in images.iter_mut().enumerate().take(n) {
            let radix = factorial(n - 1 - i);
            *slot = pool.remove(rest / radix);
            rest %= radix;
        }
        Ok(Permutation {
            len: n as u8,
            images,
        })
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Permutation").field(&self.mapping()).finish()
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DEGREE {
        Err(Error::DegreeOutOfRange(n))
    } else {
        Ok(())
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All `N!` permutations in lexicographic order of their image arrays.
pub fn enumerate_group(n: usize) -> Result<Vec<Permutation>> {
    check_degree(n)?;
    (0..factorial(n))
        .map(|r| Permutation::from_lehmer_rank(n, r))
        .collect()
}

pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    a.compose(b)
}

pub fn invert(a: &Permutation) -> Permutation {
    a.inverse()
}

/// Position of a tuple under the mixed-radix Lehmer ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleIndex(pub u64);

/// An element `(σ_1, .., σ_M)` of `(S_N)^M`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermTuple {
    parts: Vec<Permutation>,
}

impl fmt::Debug for PermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.parts.iter().map(|p| p.mapping()))
            .finish()
    }
}

impl PermTuple {
    pub fn new(parts: Vec<Permutation>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("a tuple needs at least one part".into()))?;
        if let Some(bad) = parts.iter().find(|p| p.degree() != first.degree()) {
            return Err(Error::DegreeMismatch {
                left: first.degree(),
                right: bad.degree(),
            });
        }
        Ok(Self { parts })
    }

    /// Builds a tuple from raw image arrays.
    pub fn from_mappings(mappings: &[&[usize]]) -> Result<Self> {
        let parts = mappings
            .iter()
            .map(|m| Permutation::new(m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn identity(n: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("multilinearity must be >= 1".into()));
        }
        Ok(Self {
            parts: vec![Permutation::identity(n)?; m],
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.parts[0].degree()
    }

    #[inline]
    pub fn multilinearity(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Permutation] {
        &self.parts
    }

    /// The part `σ_m` for `m` in `1..=M`, with `σ_0 = σ_M`.
    #[inline]
    fn clock(&self, m: usize) -> &Permutation {
        let len = self.parts.len();
        &self.parts[(m + len - 1) % len]
    }

    /// The `m-1 → m` transition `σ_m^{-1} ∘ σ_{m-1}`, for `m` in `1..=M`.
    pub fn transition(&self, m: usize) -> Result<Permutation> {
        if m == 0 || m > self.multilinearity() {
            return Err(Error::IndexOutOfRange {
                index: m,
                len: self.multilinearity(),
            });
        }
        Ok(self.transition_unchecked(m))
    }

    #[inline]
    pub(crate) fn transition_unchecked(&self, m: usize) -> Permutation {
        self.clock(m).inverse().compose_unchecked(self.clock(m - 1))
    }

    fn same_shape(&self, other: &PermTuple) -> Result<()> {
        if self.degree() != other.degree() || self.multilinearity() != other.multilinearity() {
            return Err(Error::ShapeMismatch(format!(
                "(N, M) = ({}, {}) vs ({}, {})",
                self.degree(),
                self.multilinearity(),
                other.degree(),
                other.multilinearity()
            )));
        }
        Ok(())
    }

    fn require_even(&self, other: &PermTuple) -> Result<()> {
        self.same_shape(other)?;
        if self.multilinearity() % 2 != 0 {
            return Err(Error::OddMultilinearity(self.multilinearity()));
        }
        Ok(())
    }

    fn transitions_agree(&self, other: &PermTuple, first: usize) -> bool {
        (first..=self.multilinearity())
            .step_by(2)
            .all(|m| self.transition_unchecked(m) == other.transition_unchecked(m))
    }

    /// `σ ~ev τ`: equal transitions at every even `m`.
    pub fn equiv_even(&self, other: &PermTuple) -> Result<bool> {
        self.require_even(other)?;
        Ok(self.transitions_agree(other, 2))
    }

    /// `σ ~odd τ`: equal transitions at every odd `m` (`m = 1` wraps to `σ_M`).
    pub fn equiv_odd(&self, other: &PermTuple) -> Result<bool> {
        self.require_even(other)?;
        Ok(self.transitions_agree(other, 1))
    }

    /// Loop closure with odd transitions taken from `self` and even ones from
    /// `other`:
    ///
    /// `t_1(σ) · t_M(τ) · t_{M-1}(σ) · t_{M-2}(τ) ⋯ t_3(σ) · t_2(τ) = e`
    ///
    /// where `t_m` is the `m`-th transition. This is the product that telescopes
    /// to `e` for any tuple having the odd transitions of `σ` and the even
    /// transitions of `τ`.
    pub fn weaves(&self, other: &PermTuple) -> Result<bool> {
        self.require_even(other)?;
        Ok(self.weaves_unchecked(other))
    }

    pub(crate) fn weaves_unchecked(&self, other: &PermTuple) -> bool {
        let m_total = self.multilinearity();
        let mut acc = self.transition_unchecked(1);
        for m in (2..=m_total).rev() {
            let step = if m % 2 == 0 {
                other.transition_unchecked(m)
            } else {
                self.transition_unchecked(m)
            };
            acc = acc.compose_unchecked(&step);
        }
        acc.is_identity()
    }

    /// `(σ_1, .., σ_M) ↦ (σ_2, .., σ_M, σ_1)`.
    pub fn cycle_shift(&self) -> PermTuple {
        let mut parts = self.parts.clone();
        parts.rotate_left(1);
        PermTuple { parts }
    }

    /// Inverse of [`cycle_shift`](Self::cycle_shift).
    pub fn cycle_unshift(&self) -> PermTuple {
        let mut parts = self.parts.clone();
        parts.rotate_right(1);
        PermTuple { parts }
    }

    /// Number of sites `(m, j)` with `σ_m(j) != τ_m(j)`.
    pub fn hamming(&self, other: &PermTuple) -> Result<usize> {
        self.same_shape(other)?;
        Ok(self.hamming_unchecked(other))
    }

    pub(crate) fn hamming_unchecked(&self, other: &PermTuple) -> usize {
        self.parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| (0..a.degree()).filter(|&j| a.apply(j) != b.apply(j)).count())
            .sum()
    }

    pub fn rank(&self) -> TupleIndex {
        let radix = factorial(self.degree()) as u64;
        TupleIndex(
            self.parts
                .iter()
                .fold(0u64, |acc, p| acc * radix + p.lehmer_rank() as u64),
        )
    }

    pub fn unrank(n: usize, m: usize, index: TupleIndex) -> Result<PermTuple> {
        let size = tuple_space_size(n, m)?;
        if index.0 >= size {
            return Err(Error::RankOutOfRange {
                rank: index.0,
                size,
            });
        }
        let radix = factorial(n) as u64;
        let mut rest = index.0;
        let mut parts = vec![Permutation::identity(n)?; m];
        for slot in parts.iter_mut().rev() {
            *slot = Permutation::from_lehmer_rank(n, (rest % radix) as usize)?;
            rest /= radix;
        }
        Ok(PermTuple { parts })
    }
}

/// `D = (N!)^M`, or an error when it does not fit the index type.
pub fn tuple_space_size(n: usize, m: usize) -> Result<u64> {
    check_degree(n)?;
    if m == 0 {
        return Err(Error::InvalidParameter("multilinearity must be >= 1".into()));
    }
    (factorial(n) as u64)
        .checked_pow(m as u32)
        .ok_or(Error::DenseGuard {
            dim: u64::MAX,
            limit: u64::MAX,
        })
}

/// All tuples of `(S_N)^M` in rank order.
#[derive(Clone, Debug)]
pub struct TupleSpace {
    n: usize,
    m: usize,
    tuples: Vec<PermTuple>,
}

impl TupleSpace {
    /// Enumerates `(S_N)^M`, refusing spaces larger than `limit`.
    pub fn new(n: usize, m: usize, limit: u64) -> Result<Self> {
        let size = tuple_space_size(n, m)?;
        if size > limit {
            return Err(Error::DenseGuard { dim: size, limit });
        }
        let tuples = (0..size)
            .map(|r| PermTuple::unrank(n, m, TupleIndex(r)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, m, tuples })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn multilinearity(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[PermTuple] {
        &self.tuples
    }

    pub fn get(&self, index: usize) -> &PermTuple {
        &self.tuples[index]
    }

    pub fn index_of(&self, tuple: &PermTuple) -> usize {
        tuple.rank().0 as usize
    }
}
