//! Extension operators over graph hypersurfaces.
//!
//! A surface is `ξ_a = Σ(ξ̂)` where `a` is the graph axis and `ξ̂` collects the
//! remaining coordinates in increasing order, over the box `[-w/2, w/2]^{d-1}`.
//! The measure is `b(ξ̂) dξ̂` with the product bump
//! `b = ∏ exp(1 - 1/(1 - (2ξ̂_i/w)²))`, and
//!
//! `E f(x) = ∫ e^{iλ<x, Γ(ξ̂)>} f(ξ̂) b(ξ̂) dξ̂`,  `Γ(ξ̂) = (ξ̂, Σ(ξ̂))` placed in `ℝ^d`.
//!
//! Integrals use the tensor midpoint rule, which is spectrally accurate here
//! because the integrand vanishes to all orders at the box edges.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::saturation::SimultaneousSystem;

pub const DEFAULT_OVERSAMPLING: f64 = 8.0;
pub const DEFAULT_EPSILON_TILDE: f64 = 0.1;
const MIN_NODES: usize = 192;
const PROBE_SAMPLES: usize = 65;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SurfaceKind {
    /// `Σ ≡ 0`.
    Hyperplane,
    /// `Σ = |ξ̂|²/2`.
    Paraboloid,
    /// `Σ = |ξ̂|²/2 + c Σ_i ξ̂_i⁴`.
    PerturbedParaboloid { coefficient: f64 },
    /// `Σ = ξ̂_1²/2`, flat along the remaining parameters.
    Cylinder,
    /// `Σ = Σ_i κ_i ξ̂_i²/2`.
    Quadratic { curvatures: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphHypersurface {
    #[serde(default)]
    pub name: String,
    pub dimension: usize,
    pub graph_axis: usize,
    pub box_width: f64,
    #[serde(flatten)]
    pub kind: SurfaceKind,
}

impl GraphHypersurface {
    pub fn new(dimension: usize, graph_axis: usize, kind: SurfaceKind, box_width: f64) -> Result<Self> {
        let s = Self {
            name: String::new(),
            dimension,
            graph_axis,
            box_width,
            kind,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::InvalidParameter(format!("dimension {} < 2", self.dimension)));
        }
        if self.graph_axis >= self.dimension {
            return Err(Error::IndexOutOfRange {
                index: self.graph_axis,
                len: self.dimension,
            });
        }
        if !(self.box_width > 0.0 && self.box_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("box width {}", self.box_width)));
        }
        match &self.kind {
            SurfaceKind::Quadratic { curvatures } if curvatures.len() != self.dimension - 1 => {
                Err(Error::ShapeMismatch(format!(
                    "{} curvatures for {} parameters",
                    curvatures.len(),
                    self.dimension - 1
                )))
            }
            SurfaceKind::PerturbedParaboloid { coefficient } if !coefficient.is_finite() => {
                Err(Error::InvalidParameter("non-finite coefficient".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn param_dim(&self) -> usize {
        self.dimension - 1
    }

    pub fn sigma(&self, xi: &[f64]) -> f64 {
        match &self.kind {
            SurfaceKind::Hyperplane => 0.0,
            SurfaceKind::Paraboloid => 0.5 * linalg::dot(xi, xi),
            SurfaceKind::PerturbedParaboloid { coefficient } => {
                0.5 * linalg::dot(xi, xi) + coefficient * xi.iter().map(|x| x.powi(4)).sum::<f64>()
            }
            SurfaceKind::Cylinder => 0.5 * xi[0] * xi[0],
            SurfaceKind::Quadratic { curvatures } => {
                0.5 * xi.iter().zip(curvatures).map(|(x, k)| k * x * x).sum::<f64>()
            }
        }
    }

    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        match &self.kind {
            SurfaceKind::Hyperplane => vec![0.0; xi.len()],
            SurfaceKind::Paraboloid => xi.to_vec(),
            SurfaceKind::PerturbedParaboloid { coefficient } => {
                xi.iter().map(|x| x + 4.0 * coefficient * x.powi(3)).collect()
            }
            SurfaceKind::Cylinder => {
                let mut g = vec![0.0; xi.len()];
                g[0] = xi[0];
                g
            }
            SurfaceKind::Quadratic { curvatures } => {
                xi.iter().zip(curvatures).map(|(x, k)| k * x).collect()
            }
        }
    }

    /// The surface point `Γ(ξ̂)` in `ℝ^d`.
    pub fn embed(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dimension);
        out.extend_from_slice(&xi[..self.graph_axis]);
        out.push(self.sigma(xi));
        out.extend_from_slice(&xi[self.graph_axis..]);
        out
    }

    /// Unit normal, oriented with positive graph-axis component.
    pub fn normal(&self, xi: &[f64]) -> Vec<f64> {
        let g = self.gradient(xi);
        let mut n: Vec<f64> = Vec::with_capacity(self.dimension);
        n.extend(g[..self.graph_axis].iter().map(|v| -v));
        n.push(1.0);
        n.extend(g[self.graph_axis..].iter().map(|v| -v));
        let len = linalg::norm(&n);
        n.iter().map(|v| v / len).collect()
    }

    /// Normal at the box center.
    pub fn nominal_normal(&self) -> Vec<f64> {
        self.normal(&vec![0.0; self.param_dim()])
    }

    pub fn amplitude(&self, xi: &[f64]) -> f64 {
        xi.iter().map(|&x| bump(x, self.box_width)).product()
    }

    /// Probes the box on a regular grid, including its faces.
    fn probe<F: FnMut(&[f64])>(&self, mut visit: F) {
        let k = self.param_dim();
        let samples = if k <= 2 { PROBE_SAMPLES } else { 17 };
        let mut idx = vec![0usize; k];
        let mut xi = vec![0.0; k];
        loop {
            for (x, &i) in xi.iter_mut().zip(&idx) {
                *x = -0.5 * self.box_width + self.box_width * i as f64 / (samples - 1) as f64;
            }
            visit(&xi);
            if !advance(&mut idx, samples) {
                break;
            }
        }
    }

    pub fn max_gradient(&self) -> f64 {
        let mut worst: f64 = 0.0;
        self.probe(|xi| worst = worst.max(linalg::norm(&self.gradient(xi))));
        worst
    }

    /// `max |Γ(ξ̂)|` over the box.
    pub fn max_frequency(&self) -> f64 {
        let mut worst: f64 = 0.0;
        self.probe(|xi| worst = worst.max(linalg::norm(&self.embed(xi))));
        worst
    }

    /// `max |ν(ξ̂) - ν|` over the box, against the nominal normal.
    pub fn max_normal_deviation(&self) -> f64 {
        let nominal = self.nominal_normal();
        let mut worst: f64 = 0.0;
        self.probe(|xi| {
            let n = self.normal(xi);
            let dev = n.iter().zip(&nominal).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(dev);
        });
        worst
    }

    /// Whether the normal stays within `2ε̃` of the nominal one.
    pub fn normal_within_cone(&self, epsilon_tilde: f64) -> bool {
        self.max_normal_deviation() <= 2.0 * epsilon_tilde
    }

    /// Smallest node count per axis accepted at this frequency.
    pub fn required_nodes(&self, lambda: f64, oversampling: f64) -> usize {
        (oversampling * lambda * self.box_width / (2.0 * PI)).ceil() as usize
    }

    /// Node count used by default: resolves the phase over `|x| <= 1`,
    /// including the slope of `Σ`.
    pub fn default_nodes(&self, lambda: f64, oversampling: f64) -> usize {
        let n = oversampling * lambda * self.box_width * (1.0 + self.max_gradient()) / (2.0 * PI);
        MIN_NODES.max(n.ceil() as usize)
    }
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for i in idx.iter_mut().rev() {
        *i += 1;
        if *i < base {
            return true;
        }
        *i = 0;
    }
    false
}

/// `exp(1 - 1/(1 - (2x/w)²))` inside `|x| < w/2`, zero outside.
pub fn bump(x: f64, w: f64) -> f64 {
    let t = 2.0 * x / w;
    let u = t * t;
    if u < 1.0 {
        (1.0 - 1.0 / (1.0 - u)).exp()
    } else {
        0.0
    }
}

/// Tensor midpoint nodes on the parameter box.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub nodes_per_axis: usize,
    pub spacing: f64,
    /// One-dimensional node coordinates.
    pub axis: Vec<f64>,
    /// Product weight `h^{d-1}`.
    pub weight: f64,
}

impl QuadratureGrid {
    pub fn new(width: f64, nodes_per_axis: usize, param_dim: usize) -> Self {
        let h = width / nodes_per_axis as f64;
        let axis = (0..nodes_per_axis)
            .map(|i| -0.5 * width + (i as f64 + 0.5) * h)
            .collect();
        Self {
            nodes_per_axis,
            spacing: h,
            axis,
            weight: h.powi(param_dim as i32),
        }
    }
}

/// `E_λ` on one surface with its quadrature nodes materialized.
///
/// Only nodes where the amplitude is positive are kept.
#[derive(Clone, Debug)]
pub struct ExtensionOperator {
    surface: GraphHypersurface,
    lambda: f64,
    grid: QuadratureGrid,
    params: Vec<f64>,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl ExtensionOperator {
    pub fn new(surface: &GraphHypersurface, lambda: f64) -> Result<Self> {
        let n = surface.default_nodes(lambda, DEFAULT_OVERSAMPLING);
        Self::with_nodes(surface, lambda, n, DEFAULT_OVERSAMPLING)
    }

    /// Refuses fewer than `oversampling · λ · w / 2π` nodes per axis.
    pub fn with_nodes(surface: &GraphHypersurface, lambda: f64, nodes: usize, oversampling: f64) -> Result<Self> {
        surface.validate()?;
        if !(lambda >= 1.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
        }
        let required = surface.required_nodes(lambda, oversampling);
        if nodes < required {
            return Err(Error::UnderResolved { nodes, required });
        }
        let k = surface.param_dim();
        let grid = QuadratureGrid::new(surface.box_width, nodes, k);
        let amp: Vec<f64> = grid.axis.iter().map(|&x| bump(x, surface.box_width)).collect();
        let mut params = Vec::new();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut idx = vec![0usize; k];
        let mut xi = vec![0.0; k];
        loop {
            let b: f64 = idx.iter().map(|&i| amp[i]).product();
            if b > 0.0 {
                for (x, &i) in xi.iter_mut().zip(&idx) {
                    *x = grid.axis[i];
                }
                params.extend_from_slice(&xi);
                points.extend(surface.embed(&xi));
                weights.push(grid.weight * b);
            }
            if !advance(&mut idx, nodes) {
                break;
            }
        }
        Ok(Self {
            surface: surface.clone(),
            lambda,
            grid,
            params,
            points,
            weights,
        })
    }

    pub fn surface(&self) -> &GraphHypersurface {
        &self.surface
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    /// Parameter coordinates of node `i`.
    pub fn node(&self, i: usize) -> &[f64] {
        let k = self.surface.param_dim();
        &self.params[i * k..(i + 1) * k]
    }

    /// `f` evaluated at every node.
    pub fn sample<F: Fn(&[f64]) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        (0..self.node_count()).map(|i| f(self.node(i))).collect()
    }

    /// `(∫ |f|² b dξ̂)^{1/2}` by the same quadrature.
    pub fn l2_norm(&self, f: &[Complex64]) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .map(|(w, z)| w * z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Constant function of unit norm.
    pub fn unit_constant(&self) -> Vec<Complex64> {
        let total: f64 = self.weights.iter().sum();
        vec![Complex64::new(total.sqrt().recip(), 0.0); self.node_count()]
    }

    #[inline]
    fn phase(&self, i: usize, x: &[f64]) -> f64 {
        let d = self.surface.dimension;
        self.lambda * linalg::dot(&self.points[i * d..(i + 1) * d], x)
    }

    /// `E f(x)`.
    pub fn eval(&self, f: &[Complex64], x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (w, fv)) in self.weights.iter().zip(f).enumerate() {
            let (s, c) = self.phase(i, x).sin_cos();
            acc += fv * Complex64::new(w * c, w * s);
        }
        acc
    }

    /// `E f(x)` for several `f` sharing the phase evaluations; `out[j] = E fs[j](x)`.
    pub fn eval_many(&self, fs: &[Vec<Complex64>], x: &[f64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (i, w) in self.weights.iter().enumerate() {
            let (s, c) = self.phase(i, x).sin_cos();
            let e = Complex64::new(w * c, w * s);
            for (o, f) in out.iter_mut().zip(fs) {
                *o += f[i] * e;
            }
        }
    }

    /// `K(p, q) = ∫ e^{iλ<p-q, Γ>} b dξ̂`.
    pub fn kernel(&self, p: &[f64], q: &[f64]) -> Complex64 {
        let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, w) in self.weights.iter().enumerate() {
            let (s, c) = self.phase(i, &diff).sin_cos();
            acc += Complex64::new(w * c, w * s);
        }
        acc
    }
}

pub fn extension_eval<F: Fn(&[f64]) -> Complex64>(
    surface: &GraphHypersurface,
    lambda: f64,
    f: F,
    x: &[f64],
) -> Result<Complex64> {
    check_point(surface, x)?;
    let op = ExtensionOperator::new(surface, lambda)?;
    Ok(op.eval(&op.sample(f), x))
}

pub fn extension_kernel(surface: &GraphHypersurface, lambda: f64, p: &[f64], q: &[f64]) -> Result<Complex64> {
    check_point(surface, p)?;
    check_point(surface, q)?;
    Ok(ExtensionOperator::new(surface, lambda)?.kernel(p, q))
}

fn check_point(surface: &GraphHypersurface, x: &[f64]) -> Result<()> {
    if x.len() != surface.dimension {
        return Err(Error::ShapeMismatch(format!(
            "point of length {} in dimension {}",
            x.len(),
            surface.dimension
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeRelationParams {
    pub lambda: f64,
    pub epsilon: f64,
    pub epsilon_tilde: f64,
}

impl ConeRelationParams {
    pub fn new(lambda: f64, epsilon: f64, epsilon_tilde: f64) -> Result<Self> {
        if !(lambda >= 1.0) || !(epsilon > 0.0 && epsilon < 1.0) || !(epsilon_tilde > 0.0 && epsilon_tilde < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "cone parameters lambda = {lambda}, epsilon = {epsilon}, epsilon_tilde = {epsilon_tilde}"
            )));
        }
        Ok(Self {
            lambda,
            epsilon,
            epsilon_tilde,
        })
    }

    /// `λ^{-1+ε}`.
    pub fn separation(&self) -> f64 {
        self.lambda.powf(-1.0 + self.epsilon)
    }
}

/// Whether `u` lies within `2ε̃` of `±ν` (`u` need not be normalized).
pub fn in_cone(u: &[f64], nu: &[f64], epsilon_tilde: f64) -> bool {
    let len = linalg::norm(u);
    if len == 0.0 {
        return false;
    }
    let (mut plus, mut minus) = (0.0, 0.0);
    for (a, b) in u.iter().zip(nu) {
        let x = a / len;
        plus += (x - b) * (x - b);
        minus += (x + b) * (x + b);
    }
    plus.min(minus).sqrt() <= 2.0 * epsilon_tilde
}

/// `|p - q| <= λ^{-1+ε}`, or `(p - q)/|p - q|` within `2ε̃` of `±ν`.
pub fn cone_relation(params: &ConeRelationParams, p: &[f64], q: &[f64], nu: &[f64]) -> bool {
    let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    linalg::norm(&diff) <= params.separation() || in_cone(&diff, nu, params.epsilon_tilde)
}

/// Volume spanned by `k <= d` unit vectors.
pub fn wedge_transversality(normals: &[Vec<f64>]) -> Result<f64> {
    for v in normals {
        let len = linalg::norm(v);
        if (len - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitVector(len));
        }
    }
    linalg::wedge_volume(normals)
}

pub use crate::linalg::gram_determinant;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopReport {
    /// Every consecutive pair coincides.
    pub trivial: bool,
    /// Every consecutive pair is separated by more than the threshold.
    pub distinct: bool,
    /// Every step `p_{i+1} - p_i` lies in cone `i`.
    pub in_cones: bool,
    /// Wedge of the unit step directions, `0` when a step vanishes.
    pub wedge: f64,
    /// Gram determinant of the raw steps.
    pub gram: f64,
    /// Wedge of the cone axes.
    pub axis_wedge: f64,
    /// Distinct points that pass every cone test.
    pub illegal: bool,
}

/// Examines the closed loop `p_1 → p_2 → .. → p_n → p_1` where step `i`
/// must lie in `cones[i]` (axis and half-width parameter ε̃).
///
/// Errors with [`Error::LoopCollapseViolation`] if the loop is illegal while
/// `n · max ε̃ <= c/2`, with `c` the wedge of the axes.
pub fn loop_collapse_check(points: &[Vec<f64>], cones: &[(Vec<f64>, f64)], separation: f64) -> Result<LoopReport> {
    let n = points.len();
    if n == 0 || cones.len() != n {
        return Err(Error::ShapeMismatch(format!("{n} points with {} cones", cones.len())));
    }
    let d = points[0].len();
    if n > d {
        return Err(Error::TooManyVectors { count: n, dim: d });
    }
    let steps: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (a, b) = (&points[i], &points[(i + 1) % n]);
            b.iter().zip(a).map(|(x, y)| x - y).collect()
        })
        .collect();
    let lengths: Vec<f64> = steps.iter().map(|s| linalg::norm(s)).collect();
    let trivial = lengths.iter().all(|&l| l == 0.0);
    let distinct = lengths.iter().all(|&l| l > separation);
    let in_cones = steps
        .iter()
        .zip(cones)
        .all(|(s, (nu, et))| in_cone(s, nu, *et));
    let wedge = if lengths.iter().any(|&l| l == 0.0) {
        0.0
    } else {
        let units: Vec<Vec<f64>> = steps
            .iter()
            .zip(&lengths)
            .map(|(s, l)| s.iter().map(|x| x / l).collect())
            .collect();
        linalg::wedge_volume(&units)?
    };
    let gram = linalg::gram_determinant(&steps)?;
    let axes: Vec<Vec<f64>> = cones.iter().map(|c| c.0.clone()).collect();
    let axis_wedge = linalg::wedge_volume(&axes)?;
    let illegal = distinct && in_cones;
    let budget = n as f64 * cones.iter().map(|c| c.1).fold(0.0, f64::max);
    if illegal && budget <= axis_wedge / 2.0 {
        return Err(Error::LoopCollapseViolation {
            budget,
            half_wedge: axis_wedge / 2.0,
        });
    }
    Ok(LoopReport {
        trivial,
        distinct,
        in_cones,
        wedge,
        gram,
        axis_wedge,
        illegal,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub determinant: f64,
    pub curved: bool,
}

/// Finite-difference Hessian of `η ↦ Σ(0, η)` at `η = 0`, where the first
/// `k - 1` parameters are frozen at zero and `η` collects the other `d - k`.
pub fn curvature_section_check(surface: &GraphHypersurface, k: usize) -> Result<CurvatureReport> {
    curvature_section_check_with_step(surface, k, 1e-3 * surface.box_width)
}

pub fn curvature_section_check_with_step(surface: &GraphHypersurface, k: usize, step: f64) -> Result<CurvatureReport> {
    let d = surface.dimension;
    if k == 0 || k >= d {
        return Err(Error::InvalidParameter(format!("section index k = {k} in dimension {d}")));
    }
    if !(step >= 1e-6) {
        return Err(Error::StepUnderflow(step));
    }
    let offset = k - 1;
    let s = d - k;
    let at = |shift: &[(usize, f64)]| {
        let mut xi = vec![0.0; d - 1];
        for &(i, v) in shift {
            xi[offset + i] += v;
        }
        surface.sigma(&xi)
    };
    let h = step;
    let center = at(&[]);
    let hess = nalgebra::DMatrix::from_fn(s, s, |i, j| {
        if i == j {
            (at(&[(i, h)]) - 2.0 * center + at(&[(i, -h)])) / (h * h)
        } else {
            (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)])
                + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    });
    let determinant = hess.determinant();
    Ok(CurvatureReport {
        determinant,
        curved: determinant.abs() >= 1e-6,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    /// `R̂ = -slope` of `log |K|` against `log λ`.
    pub exponent: f64,
    pub lambdas: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Some magnitude fell below the smallest positive normal and was clamped.
    pub underflow: bool,
}

/// Fits the decay of `|K(0, 0.5u)|` over a geometric list of `λ`.
pub fn decay_fit(surface: &GraphHypersurface, u: &[f64], lambdas: &[f64]) -> Result<DecayFit> {
    check_point(surface, u)?;
    let len = linalg::norm(u);
    if (len - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitVector(len));
    }
    check_geometric(lambdas)?;
    let origin = vec![0.0; surface.dimension];
    let q: Vec<f64> = u.iter().map(|x| 0.5 * x).collect();
    let raw: Vec<f64> = lambdas
        .par_iter()
        .map(|&lam| ExtensionOperator::new(surface, lam).map(|op| op.kernel(&origin, &q).norm()))
        .collect::<Result<_>>()?;
    let underflow = raw.iter().any(|&m| m < f64::MIN_POSITIVE);
    let magnitudes: Vec<f64> = raw.iter().map(|&m| m.max(f64::MIN_POSITIVE)).collect();
    let exponent = -linalg::log_log_slope(lambdas, &magnitudes)?;
    Ok(DecayFit {
        exponent,
        lambdas: lambdas.to_vec(),
        magnitudes,
        underflow,
    })
}

/// At least three increasing values with a constant ratio.
pub fn check_geometric(lambdas: &[f64]) -> Result<()> {
    if lambdas.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 lambda values, got {}",
            lambdas.len()
        )));
    }
    if lambdas.iter().any(|&l| !(l >= 1.0 && l.is_finite())) {
        return Err(Error::InvalidParameter("lambda values must be >= 1".into()));
    }
    let ratio = lambdas[1] / lambdas[0];
    if !(ratio > 1.0) || lambdas.windows(2).any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "lambda list {lambdas:?} is not an increasing geometric sequence"
        )));
    }
    Ok(())
}

/// System whose operators are extension operators and whose points carry
/// coordinates; relations are the cone relations around nominal normals.
pub struct ExtensionSystem {
    operators: Vec<ExtensionOperator>,
    normals: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>,
    params: ConeRelationParams,
    bound: f64,
}

impl ExtensionSystem {
    pub fn new(surfaces: &[GraphHypersurface], points: Vec<Vec<f64>>, params: ConeRelationParams) -> Result<Self> {
        let operators = surfaces
            .iter()
            .map(|s| ExtensionOperator::new(s, params.lambda))
            .collect::<Result<Vec<_>>>()?;
        let normals = surfaces.iter().map(GraphHypersurface::nominal_normal).collect();
        let origin = vec![0.0; surfaces.first().map_or(0, |s| s.dimension)];
        let bound = operators
            .iter()
            .map(|op| op.kernel(&origin, &origin).re.sqrt())
            .fold(0.0, f64::max);
        Ok(Self {
            operators,
            normals,
            points,
            params,
            bound,
        })
    }

    pub fn point(&self, p: usize) -> &[f64] {
        &self.points[p]
    }
}

impl SimultaneousSystem for ExtensionSystem {
    fn multilinearity(&self) -> usize {
        self.operators.len()
    }

    fn kernel(&self, m: usize, p: usize, q: usize) -> Complex64 {
        self.operators[m].kernel(&self.points[p], &self.points[q])
    }

    fn relation(&self, m: usize, p: usize, q: usize) -> bool {
        cone_relation(&self.params, &self.points[p], &self.points[q], &self.normals[m])
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn decay_rate(&self, lambda: f64) -> f64 {
        lambda.powi(-3)
    }

    fn lambda(&self) -> f64 {
        self.params.lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saturation::{build_energy_matrix, ones_eigen_check, PointSet};

    fn parabola(w: f64) -> GraphHypersurface {
        GraphHypersurface::new(2, 0, SurfaceKind::Paraboloid, w).unwrap()
    }

    fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let c = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(a + i as f64 * h) * c;
        }
        acc * (h / 3.0)
    }

    #[test]
    fn value_at_origin_is_the_total_mass() {
        let s = parabola(2.0);
        let v = extension_eval(&s, 16.0, |_| Complex64::new(1.0, 0.0), &[0.0, 0.0]).unwrap();
        let mass = simpson(|x| Complex64::new(bump(x, 2.0), 0.0), -1.0, 1.0, 20_000);
        assert!(v.im.abs() < 1e-15);
        assert!((v.re - mass.re).abs() < 1e-9 * mass.re);
    }

    #[test]
    fn flat_surface_matches_direct_transform() {
        let w = 2.0;
        let s = GraphHypersurface::new(2, 0, SurfaceKind::Hyperplane, w).unwrap();
        let lambda = 16.0;
        for z in [0.1, 0.37, 0.8] {
            let v = extension_eval(&s, lambda, |xi| Complex64::new(bump(xi[0], w), 0.0), &[0.0, z]).unwrap();
            let oracle = simpson(
                |x| Complex64::from_polar(bump(x, w).powi(2), lambda * z * x),
                -1.0,
                1.0,
                40_000,
            );
            assert!((v - oracle).norm() < 1e-9 * oracle.norm().max(1e-3), "{v} vs {oracle}");
        }
    }

    #[test]
    fn doubling_nodes_converges() {
        let s = parabola(4.0);
        let lambda = 64.0;
        let n = s.default_nodes(lambda, DEFAULT_OVERSAMPLING);
        let a = ExtensionOperator::with_nodes(&s, lambda, n, 8.0).unwrap();
        let b = ExtensionOperator::with_nodes(&s, lambda, 2 * n, 8.0).unwrap();
        let f = |xi: &[f64]| Complex64::new(1.0 + xi[0], 0.5 * xi[0] * xi[0]);
        for x in [[0.3, -0.2], [0.0, 0.9], [-0.7, 0.1]] {
            let va = a.eval(&a.sample(f), &x);
            let vb = b.eval(&b.sample(f), &x);
            assert!((va - vb).norm() < 1e-8 * vb.norm(), "{va} vs {vb}");
        }
        for kind in [SurfaceKind::Hyperplane, SurfaceKind::Cylinder, SurfaceKind::PerturbedParaboloid { coefficient: 0.1 }] {
            let s = GraphHypersurface::new(3, 2, kind, 1.0).unwrap();
            let lambda = 32.0;
            let n = s.default_nodes(lambda, DEFAULT_OVERSAMPLING);
            let a = ExtensionOperator::with_nodes(&s, lambda, n, 8.0).unwrap();
            let b = ExtensionOperator::with_nodes(&s, lambda, 2 * n, 8.0).unwrap();
            let (p, q) = ([0.0, 0.0, 0.0], [0.2, -0.1, 0.4]);
            let (ka, kb) = (a.kernel(&p, &q), b.kernel(&p, &q));
            assert!((ka - kb).norm() < 1e-8 * kb.norm().max(1e-3 * b.kernel(&p, &p).re));
        }
    }

    #[test]
    fn under_resolved_quadrature_is_refused() {
        let s = parabola(4.0);
        assert!(matches!(
            ExtensionOperator::with_nodes(&s, 64.0, 100, 8.0),
            Err(Error::UnderResolved { required: 326, .. })
        ));
    }

    #[test]
    fn kernel_symmetry_and_bounds() {
        let op = ExtensionOperator::new(&parabola(4.0), 32.0).unwrap();
        let p = [0.1, 0.2];
        let q = [-0.3, 0.05];
        let (a, b) = (op.kernel(&p, &q), op.kernel(&q, &p));
        assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
        let diag = op.kernel(&p, &p);
        assert_eq!(diag.im, 0.0);
        assert!(a.norm() <= diag.re + 1e-9);
    }

    #[test]
    fn on_cone_kernel_follows_stationary_phase() {
        let op = ExtensionOperator::new(&parabola(4.0), 64.0).unwrap();
        let k = op.kernel(&[1.0, 0.0], &[0.0, 0.0]);
        // ∫ e^{iλη²/2} b(η) dη ≈ b(0) sqrt(2π/λ)
        let oracle = (2.0 * PI / 64.0).sqrt();
        let ratio = k.norm() / oracle;
        assert!((0.5..2.0).contains(&ratio), "{ratio}");
        let off = op.kernel(&[0.0, 1.0], &[0.0, 0.0]);
        assert!(off.norm() <= 1e-3 * op.kernel(&[0.0, 0.0], &[0.0, 0.0]).re);
    }

    #[test]
    fn decay_on_and_off_the_cone() {
        let s = parabola(4.0);
        let lams = [32.0, 64.0, 128.0];
        let on = decay_fit(&s, &[1.0, 0.0], &lams).unwrap();
        assert!((on.exponent - 0.5).abs() < 0.1, "{on:?}");
        let off = decay_fit(&s, &[0.0, 1.0], &lams).unwrap();
        assert!(off.exponent >= 3.0, "{off:?}");
        let flat = GraphHypersurface::new(2, 0, SurfaceKind::Hyperplane, 4.0).unwrap();
        assert!(decay_fit(&flat, &[0.0, 1.0], &lams).unwrap().exponent >= 3.0);
        assert!(decay_fit(&s, &[1.0, 1.0], &lams).is_err());
        assert!(decay_fit(&s, &[1.0, 0.0], &[32.0, 64.0]).is_err());
        assert!(decay_fit(&s, &[1.0, 0.0], &[32.0, 64.0, 100.0]).is_err());
    }

    #[test]
    fn cone_relation_examples() {
        let params = ConeRelationParams::new(64.0, 0.1, 0.1).unwrap();
        let nu = [1.0, 0.0];
        assert!(cone_relation(&params, &[0.3, 0.3], &[0.3, 0.3], &nu));
        assert!(cone_relation(&params, &[1.0, 0.0], &[0.0, 0.0], &nu));
        assert!(cone_relation(&params, &[0.0, 0.0], &[1.0, 0.0], &nu));
        assert!(!cone_relation(&params, &[0.0, 0.5], &[0.0, 0.0], &nu));
        assert!(cone_relation(&params, &[0.0, 0.01], &[0.0, 0.0], &nu));
    }

    #[test]
    fn wedge_examples() {
        let e = |i: usize| {
            let mut v = vec![0.0; 3];
            v[i] = 1.0;
            v
        };
        assert!((wedge_transversality(&[e(0), e(1), e(2)]).unwrap() - 1.0).abs() < 1e-15);
        assert!(wedge_transversality(&[e(0), e(0)]).unwrap() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let w = wedge_transversality(&[e(0), vec![s, s, 0.0], e(2)]).unwrap();
        assert!((w - s).abs() < 1e-14);
        assert!(matches!(
            wedge_transversality(&[vec![2.0, 0.0, 0.0]]),
            Err(Error::NonUnitVector(_))
        ));
    }

    #[test]
    fn loop_examples() {
        let cones: Vec<(Vec<f64>, f64)> = (0..3)
            .map(|i| {
                let mut v = vec![0.0; 3];
                v[i] = 1.0;
                (v, 0.05)
            })
            .collect();
        let p = vec![0.2, 0.1, 0.0];
        let r = loop_collapse_check(&[p.clone(), p.clone(), p], &cones, 0.01).unwrap();
        assert!(r.trivial && !r.illegal);
        // Steps along e_1 and e_2 cannot be closed by a step along e_3.
        let pts = vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]];
        let r = loop_collapse_check(&pts, &cones, 0.01).unwrap();
        assert!(r.distinct && !r.in_cones && !r.illegal);
        assert!(r.gram.abs() < 1e-18);
        assert!(r.wedge < 1e-15);
        assert_eq!(r.axis_wedge, 1.0);
    }

    #[test]
    fn loop_through_wide_cones_is_flagged() {
        // Two nearly parallel axes with wide cones admit a two-point loop;
        // the budget exceeds half the axis wedge, so no violation is raised.
        let cones = vec![(vec![1.0, 0.0], 0.2), (vec![0.96, 0.28], 0.2)];
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let r = loop_collapse_check(&pts, &cones, 0.01).unwrap();
        assert!(r.illegal);
        assert!((r.axis_wedge - 0.28).abs() < 1e-12);
        let cones = vec![(vec![1.0, 0.0], 0.05), (vec![0.0, 1.0], 0.05)];
        assert!(!loop_collapse_check(&pts, &cones, 0.01).unwrap().illegal);
    }

    #[test]
    fn curvature_examples() {
        let para = GraphHypersurface::new(3, 0, SurfaceKind::Paraboloid, 1.0).unwrap();
        for k in 1..3 {
            let r = curvature_section_check(&para, k).unwrap();
            assert!((r.determinant - 1.0).abs() < 1e-6 && r.curved);
        }
        let flat = GraphHypersurface::new(3, 0, SurfaceKind::Hyperplane, 1.0).unwrap();
        assert_eq!(curvature_section_check(&flat, 1).unwrap().determinant, 0.0);
        let cyl = GraphHypersurface::new(3, 0, SurfaceKind::Cylinder, 1.0).unwrap();
        let r = curvature_section_check(&cyl, 1).unwrap();
        assert!(r.determinant.abs() < 1e-9 && !r.curved);
        assert!(!curvature_section_check(&cyl, 2).unwrap().curved);
        assert!(matches!(
            curvature_section_check_with_step(&para, 1, 1e-12),
            Err(Error::StepUnderflow(_))
        ));
    }

    #[test]
    fn surfaces_round_trip_through_json() {
        let s = GraphHypersurface::new(3, 1, SurfaceKind::PerturbedParaboloid { coefficient: 0.25 }, 1.5)
            .unwrap()
            .named("bent");
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"type\":\"perturbed_paraboloid\""));
        let back: GraphHypersurface = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let q: GraphHypersurface = serde_json::from_str(
            r#"{"dimension": 3, "graph_axis": 2, "box_width": 1.0, "type": "quadratic", "curvatures": [1.0, -1.0]}"#,
        )
        .unwrap();
        assert_eq!(q.sigma(&[1.0, 1.0]), 0.0);
        assert_eq!(q.embed(&[0.5, 0.25]), vec![0.5, 0.25, 0.125 - 0.03125]);
    }

    #[test]
    fn normals_and_deviation() {
        let s = GraphHypersurface::new(3, 1, SurfaceKind::Paraboloid, 0.2).unwrap();
        assert_eq!(s.nominal_normal(), vec![0.0, 1.0, 0.0]);
        assert!(s.normal_within_cone(0.1));
        assert!(!parabola(4.0).normal_within_cone(0.1));
        let n = parabola(4.0).normal(&[1.0]);
        assert!((n[0] - s.nominal_normal()[1] / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn extension_system_is_a_valid_system() {
        let surfaces = [parabola(1.0), GraphHypersurface::new(2, 1, SurfaceKind::Paraboloid, 1.0).unwrap()];
        let params = ConeRelationParams::new(16.0, 0.1, 0.1).unwrap();
        let pts = vec![vec![0.0, 0.0], vec![0.3, 0.0], vec![0.0, -0.4]];
        let sys = ExtensionSystem::new(&surfaces, pts, params).unwrap();
        assert!(sys.relation(0, 0, 1) && !sys.relation(0, 0, 2));
        assert!(sys.relation(1, 0, 2));
        let w = build_energy_matrix(&sys, &PointSet::first(3)).unwrap();
        ones_eigen_check(&w).unwrap();
        let psd = crate::averaging::check_psd(w.hermitian());
        assert!(psd.psd);
    }
}
