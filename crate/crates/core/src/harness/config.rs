//! Sweep configuration, its validation, and the standard experiments.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::extension::{check_geometric, GraphHypersurface, SurfaceKind, DEFAULT_OVERSAMPLING};
use crate::harness::norms::{Exponent, MixedNormSpec};

/// Largest λ accepted for three-dimensional sweeps.
pub const D3_MAX_LAMBDA: f64 = 32.0;
/// Largest grid (points per axis) accepted for three-dimensional sweeps.
pub const D3_MAX_GRID: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Pass iff the fitted slope is at most `target + slack`.
    #[default]
    AtMost,
    /// Pass iff the fitted slope exceeds `target + slack` (control runs).
    Exceeds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub dimension: usize,
    /// Number of factors in the product field.
    pub k: usize,
    /// One surface per factor.
    pub surfaces: Vec<GraphHypersurface>,
    pub lambdas: Vec<f64>,
    pub norm: MixedNormSpec,
    /// Fixed grid size per axis; chosen per λ from the spacing guard if absent.
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default = "default_oversampling")]
    pub grid_oversampling: f64,
    #[serde(default = "default_oversampling")]
    pub quadrature_oversampling: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon_tilde: f64,
    pub exponent_target: f64,
    /// Defaults to 0.15 in two dimensions and 0.3 in three.
    #[serde(default)]
    pub slack: Option<f64>,
    #[serde(default)]
    pub expectation: Expectation,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_draws")]
    pub random_draws: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_oversampling() -> f64 {
    DEFAULT_OVERSAMPLING
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_draws() -> usize {
    20
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| {
            Error::Config(format!("{}: {e}", path.display()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.experiment_id.is_empty()
            || !self
                .experiment_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return bad(format!("experiment_id {:?} must be a non-empty [A-Za-z0-9_-] name", self.experiment_id));
        }
        if !(2..=3).contains(&self.dimension) {
            return bad(format!("dimension {} not in {{2, 3}}", self.dimension));
        }
        if self.k == 0 || self.k > self.dimension {
            return bad(format!("k = {} must be in 1..={}", self.k, self.dimension));
        }
        if self.surfaces.len() != self.k {
            return bad(format!("{} surfaces for k = {}", self.surfaces.len(), self.k));
        }
        for s in &self.surfaces {
            s.validate().map_err(|e| Error::Config(format!("surface {:?}: {e}", s.name)))?;
            if s.dimension != self.dimension {
                return bad(format!("surface {:?} has dimension {}", s.name, s.dimension));
            }
        }
        check_geometric(&self.lambdas).map_err(|e| Error::Config(e.to_string()))?;
        self.norm.validate(self.dimension)?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon = {}", self.epsilon));
        }
        if !(self.epsilon_tilde > 0.0 && self.epsilon_tilde < 0.5) {
            return bad(format!("epsilon_tilde = {}", self.epsilon_tilde));
        }
        if !(self.grid_oversampling >= 1.0 && self.quadrature_oversampling >= 1.0) {
            return bad("oversampling factors must be >= 1".into());
        }
        if !self.exponent_target.is_finite() || self.slack.is_some_and(|s| !(s >= 0.0)) {
            return bad("exponent target and slack must be finite, slack >= 0".into());
        }
        if self.grid_points == Some(0) {
            return bad("grid_points must be positive".into());
        }
        if self.dimension == 3 {
            if self.lambdas.iter().any(|&l| l > D3_MAX_LAMBDA) {
                return bad(format!("three-dimensional sweeps are limited to lambda <= {D3_MAX_LAMBDA}"));
            }
            if self.grid_points.is_some_and(|n| n > D3_MAX_GRID) {
                return bad(format!("three-dimensional grids are limited to {D3_MAX_GRID} points per axis"));
            }
        }
        Ok(())
    }

    pub fn slack(&self) -> f64 {
        self.slack
            .unwrap_or(if self.dimension == 2 { 0.15 } else { 0.3 })
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn verdict(&self, slope: f64) -> bool {
        let edge = self.exponent_target + self.slack();
        match self.expectation {
            Expectation::AtMost => slope <= edge,
            Expectation::Exceeds => slope > edge,
        }
    }
}

/// `-dk/p` for `‖∏ E_m f_m‖_{L^{p/k}}`.
pub fn multilinear_target(d: usize, k: usize, p: f64) -> f64 {
    -((d * k) as f64) / p
}

/// `-k(d-1)/2`, the transversal `L^2` rate of a `k`-fold product.
pub fn transversal_target(d: usize, k: usize) -> f64 {
    -((k * (d - 1)) as f64) / 2.0
}

/// `-k(d-2)/2`, the curved `L^2` rate.
pub fn curved_l2_target(d: usize, k: usize) -> f64 {
    -((k * (d - 2)) as f64) / 2.0
}

/// `-k(2d-3)/4`, the curved `L^4 L^∞` rate.
pub fn curved_endpoint_target(d: usize, k: usize) -> f64 {
    -((k * (2 * d - 3)) as f64) / 4.0
}

fn base(id: &str, dimension: usize, surfaces: Vec<GraphHypersurface>, norm: MixedNormSpec, target: f64) -> ExperimentConfig {
    ExperimentConfig {
        experiment_id: id.into(),
        dimension,
        k: surfaces.len(),
        surfaces,
        lambdas: vec![16.0, 32.0, 64.0],
        norm,
        grid_points: None,
        grid_oversampling: DEFAULT_OVERSAMPLING,
        quadrature_oversampling: DEFAULT_OVERSAMPLING,
        epsilon: 0.1,
        epsilon_tilde: 0.1,
        exponent_target: target,
        slack: None,
        expectation: Expectation::AtMost,
        seed: 0,
        random_draws: 20,
        output_dir: None,
    }
}

/// Two transversal parabolas in the plane, `‖E_1 f_1 · E_2 f_2‖_{L^2}`.
pub fn bilinear_transversal() -> ExperimentConfig {
    let surfaces = vec![
        GraphHypersurface::new(2, 0, SurfaceKind::Paraboloid, 1.0).unwrap().named("parabola_x"),
        GraphHypersurface::new(2, 1, SurfaceKind::Paraboloid, 1.0).unwrap().named("parabola_y"),
    ];
    base(
        "bilinear_transversal",
        2,
        surfaces,
        MixedNormSpec::plain(2, 2.0),
        multilinear_target(2, 2, 4.0),
    )
}

/// One planar arc, `‖E f‖_{L^4_y L^∞_z}` with `y` along the normal. With
/// `flat` the arc is replaced by a segment and the run is a control that is
/// expected to miss the curved rate.
pub fn curved_endpoint(flat: bool) -> ExperimentConfig {
    let kind = if flat { SurfaceKind::Hyperplane } else { SurfaceKind::Paraboloid };
    let name = if flat { "segment" } else { "arc" };
    let surface = GraphHypersurface::new(2, 0, kind, 4.0).unwrap().named(name);
    let norm = MixedNormSpec {
        outer_axes: vec![0],
        inner_axes: vec![1],
        p: Exponent(4.0),
        q: Exponent::INFINITY,
    };
    let mut cfg = base(
        if flat { "flat_endpoint_control" } else { "curved_endpoint" },
        2,
        vec![surface],
        norm,
        curved_endpoint_target(2, 1),
    );
    cfg.slack = Some(0.1);
    if flat {
        cfg.expectation = Expectation::Exceeds;
    }
    cfg
}
