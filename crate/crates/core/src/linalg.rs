//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Takes the real symmetric path when every imaginary part is exactly zero,
/// which is several times faster for the indicator-built matrices.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let mut values: Vec<f64> = if h.iter().all(|z| z.im == 0.0) {
        let real = h.map(|z| z.re);
        real.symmetric_eigenvalues().iter().copied().collect()
    } else {
        h.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

pub fn real_symmetric_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn max_abs(h: &DMatrix<Complex64>) -> f64 {
    h.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest `|h[i,j] - conj(h[j,i])|`.
pub fn hermitian_defect(h: &DMatrix<Complex64>) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `k`-dimensional volume spanned by the given vectors, `∏ |R_ii|` of a QR.
pub fn wedge_volume(vectors: &[Vec<f64>]) -> Result<f64> {
    let Some(first) = vectors.first() else {
        return Ok(1.0);
    };
    let d = first.len();
    if vectors.len() > d {
        return Err(Error::TooManyVectors {
            count: vectors.len(),
            dim: d,
        });
    }
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::ShapeMismatch("vectors of unequal length".into()));
    }
    let m = DMatrix::from_fn(d, vectors.len(), |i, j| vectors[j][i]);
    let r = m.qr().r();
    Ok((0..vectors.len()).map(|i| r[(i, i)].abs()).product())
}

/// Gram determinant `det(V^T V)`, taken as the squared wedge volume so that
/// dependent sets come out at rounding level of the vectors themselves
/// rather than of their Gram matrix. More than `d` vectors give exactly 0.
pub fn gram_determinant(vectors: &[Vec<f64>]) -> Result<f64> {
    let Some(first) = vectors.first() else {
        return Ok(1.0);
    };
    if vectors.iter().any(|v| v.len() != first.len()) {
        return Err(Error::ShapeMismatch("vectors of unequal length".into()));
    }
    if vectors.len() > first.len() {
        return Ok(0.0);
    }
    Ok(wedge_volume(vectors)?.powi(2))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Ordinary least-squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "line fit needs at least two paired samples, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter(
            "log-log fit needs strictly positive data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Ok(fit_line(&lx, &ly)?.0)
}

pub fn ones(n: usize) -> DVector<Complex64> {
    DVector::from_element(n, Complex64::new(1.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_small_hermitian() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let h = DMatrix::from_row_slice(2, 2, &[2.0 * one, i, -i, 2.0 * one]);
        let ev = hermitian_eigenvalues(&h);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        let r = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).map(|x| Complex64::new(x, 0.0));
        let ev = hermitian_eigenvalues(&r);
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wedge_matches_gram() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = vec![vec![1.0, 0.0, 0.0], vec![s, s, 0.0], vec![0.0, 0.0, 1.0]];
        let w = wedge_volume(&v).unwrap();
        assert!((w - s).abs() < 1e-14);
        assert!((gram_determinant(&v).unwrap() - 0.5).abs() < 1e-14);
        assert!(wedge_volume(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap() < 1e-15);
        assert!(wedge_volume(&[vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn line_fit_recovers_power_law() {
        let x = [16.0, 32.0, 64.0, 128.0];
        let y: Vec<f64> = x.iter().map(|l: &f64| 3.0 * l.powf(-1.37)).collect();
        assert!((log_log_slope(&x, &y).unwrap() + 1.37).abs() < 1e-12);
        assert!(log_log_slope(&x, &[1.0, 0.0, 1.0, 1.0]).is_err());
    }
}
