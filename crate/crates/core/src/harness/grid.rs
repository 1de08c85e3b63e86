//! Cell-centered evaluation grids and product fields on them.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extension::ExtensionOperator;

/// Uniform grid of `n^d` cell centers on `[lo, hi]^d`, optionally masked to
/// the closed unit ball. Index order is row-major with axis 0 slowest, which
/// is also lexicographic order of the coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalGrid {
    dim: usize,
    n: usize,
    lo: f64,
    spacing: f64,
    ball: bool,
}

impl EvalGrid {
    pub fn new(dim: usize, n: usize, lo: f64, hi: f64, ball: bool) -> Result<Self> {
        if dim == 0 || n == 0 || !(hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "grid of {n} points per axis on [{lo}, {hi}]^{dim}"
            )));
        }
        Ok(Self {
            dim,
            n,
            lo,
            spacing: (hi - lo) / n as f64,
            ball,
        })
    }

    /// `[-1, 1]^d` masked to the unit ball.
    pub fn unit_ball(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, -1.0, 1.0, true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.spacing
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .map(|i| self.coordinate(i))
            .collect()
    }

    pub fn in_domain(&self, flat: usize) -> bool {
        !self.ball || self.point(flat).iter().map(|x| x * x).sum::<f64>() <= 1.0
    }

    pub fn mask(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.in_domain(i)).collect()
    }

    /// Points per axis needed for spacing at most `limit` on this grid's span.
    pub fn points_for_spacing(span: f64, limit: f64) -> usize {
        (span / limit).ceil() as usize
    }
}

/// Largest grid spacing accepted when the fields oscillate with frequency
/// up to `λ · max_frequency`.
pub fn spacing_limit(lambda: f64, max_frequency: f64, oversampling: f64) -> f64 {
    2.0 * std::f64::consts::PI / (lambda * max_frequency.max(1e-12) * oversampling)
}

fn check_normalized(op: &ExtensionOperator, f: &[Complex64]) -> Result<()> {
    if f.len() != op.node_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} samples for {} nodes",
            f.len(),
            op.node_count()
        )));
    }
    let norm = op.l2_norm(f);
    if norm != 0.0 && (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// `∏_m E_m f_m` on the grid, zero outside the domain.
///
/// Each `f_m` must have unit quadrature norm or vanish identically.
pub fn product_field(ops: &[ExtensionOperator], fs: &[Vec<Complex64>], grid: &EvalGrid) -> Result<Vec<Complex64>> {
    let families: Vec<Vec<Vec<Complex64>>> = fs.iter().map(|f| vec![f.clone()]).collect();
    Ok(product_fields(ops, &families, grid)?.swap_remove(0))
}

/// Product fields for several input choices at once: `families[m][j]` is
/// the `j`-th input of factor `m`, and `out[j]` the product of the `j`-th
/// inputs. Phases are evaluated once per grid point and node.
pub fn product_fields(
    ops: &[ExtensionOperator],
    families: &[Vec<Vec<Complex64>>],
    grid: &EvalGrid,
) -> Result<Vec<Vec<Complex64>>> {
    if ops.is_empty() || ops.len() != families.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} operators with {} input families",
            ops.len(),
            families.len()
        )));
    }
    let draws = families[0].len();
    for (op, fam) in ops.iter().zip(families) {
        if fam.len() != draws || op.surface().dimension != grid.dim() {
            return Err(Error::ShapeMismatch("input families disagree".into()));
        }
        for f in fam {
            check_normalized(op, f)?;
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let columns: Vec<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![zero; draws],
            |scratch, i| {
                let mut acc = vec![Complex64::new(1.0, 0.0); draws];
                if !grid.in_domain(i) {
                    return vec![zero; draws];
                }
                let x = grid.point(i);
                for (op, fam) in ops.iter().zip(families) {
                    op.eval_many(fam, &x, scratch);
                    for (a, s) in acc.iter_mut().zip(scratch.iter()) {
                        *a *= s;
                    }
                }
                acc
            },
        )
        .collect();
    Ok((0..draws)
        .map(|j| columns.iter().map(|c| c[j]).collect())
        .collect())
}
