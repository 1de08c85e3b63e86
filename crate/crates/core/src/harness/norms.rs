//! Iterated Lebesgue norms `L^p_y L^q_z` on evaluation grids.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::harness::grid::EvalGrid;

/// A Lebesgue exponent in `(0, ∞]`. Serialized as a number or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    fn validate(&self) -> Result<()> {
        if self.0 > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("exponent {}", self.0)))
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(Exponent(x)),
            Repr::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(Exponent::INFINITY),
            Repr::Text(t) => t
                .parse()
                .map(Exponent)
                .map_err(|_| serde::de::Error::custom(format!("bad exponent {t:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    /// Axes integrated last, at exponent `p`.
    pub outer_axes: Vec<usize>,
    /// Axes integrated first, at exponent `q`.
    pub inner_axes: Vec<usize>,
    pub p: Exponent,
    pub q: Exponent,
}

impl MixedNormSpec {
    /// Plain `L^p` over all `dim` axes.
    pub fn plain(dim: usize, p: f64) -> Self {
        Self {
            outer_axes: (0..dim).collect(),
            inner_axes: Vec::new(),
            p: Exponent(p),
            q: Exponent(p),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        self.p.validate()?;
        self.q.validate()?;
        let mut seen = vec![false; dim];
        for &a in self.outer_axes.iter().chain(&self.inner_axes) {
            if a >= dim || std::mem::replace(&mut seen[a], true) {
                return Err(Error::Config(format!(
                    "norm axes {:?} / {:?} do not partition 0..{dim}",
                    self.outer_axes, self.inner_axes
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config(format!(
                "norm axes {:?} / {:?} do not cover 0..{dim}",
                self.outer_axes, self.inner_axes
            )));
        }
        Ok(())
    }
}

/// Riemann sums of `|g|^q` over the inner block, then of the `p`-th power of
/// the result over the outer block. `∞` takes the maximum.
pub struct LebesgueAccumulator {
    exponent: Exponent,
    weight: f64,
    acc: f64,
}

impl LebesgueAccumulator {
    pub fn new(exponent: Exponent, weight: f64) -> Self {
        Self {
            exponent,
            weight,
            acc: 0.0,
        }
    }

    pub fn push(&mut self, v: f64) {
        if self.exponent.is_infinite() {
            self.acc = self.acc.max(v);
        } else {
            self.acc += v.powf(self.exponent.0) * self.weight;
        }
    }

    pub fn finish(self) -> f64 {
        if self.exponent.is_infinite() {
            self.acc
        } else {
            self.acc.powf(1.0 / self.exponent.0)
        }
    }
}

/// `‖g‖_{L^p_y L^q_z}` for magnitudes `g` laid out on `grid`.
pub fn mixed_norm(values: &[f64], grid: &EvalGrid, spec: &MixedNormSpec) -> Result<f64> {
    spec.validate(grid.dim())?;
    if values.len() != grid.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} values on a grid of {}",
            values.len(),
            grid.len()
        )));
    }
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let outer_count = n.pow(spec.outer_axes.len() as u32);
    let inner_count = n.pow(spec.inner_axes.len() as u32);
    let split = |mut flat: usize, axes: &[usize], idx: &mut [usize]| {
        for &a in axes.iter().rev() {
            idx[a] = flat % n;
            flat /= n;
        }
    };
    let mut idx = vec![0; grid.dim()];
    let mut outer = LebesgueAccumulator::new(spec.p, h.powi(spec.outer_axes.len() as i32));
    for o in 0..outer_count {
        split(o, &spec.outer_axes, &mut idx);
        let mut inner = LebesgueAccumulator::new(spec.q, h.powi(spec.inner_axes.len() as i32));
        for i in 0..inner_count {
            split(i, &spec.inner_axes, &mut idx);
            inner.push(values[grid.flat_index(&idx)].abs());
        }
        outer.push(inner.finish());
    }
    Ok(outer.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(outer: &[usize], inner: &[usize], p: f64, q: f64) -> MixedNormSpec {
        MixedNormSpec {
            outer_axes: outer.to_vec(),
            inner_axes: inner.to_vec(),
            p: Exponent(p),
            q: Exponent(q),
        }
    }

    #[test]
    fn constant_on_unit_box() {
        let g = EvalGrid::new(2, 16, 0.0, 1.0, false).unwrap();
        let ones = vec![1.0; g.len()];
        for s in [
            spec(&[0], &[1], 4.0, f64::INFINITY),
            spec(&[1], &[0], 1.5, 3.0),
            MixedNormSpec::plain(2, 2.0),
            spec(&[0, 1], &[], f64::INFINITY, 1.0),
        ] {
            assert!((mixed_norm(&ones, &g, &s).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_exponents_give_the_plain_norm() {
        let g = EvalGrid::new(3, 9, -1.0, 1.0, false).unwrap();
        let v: Vec<f64> = (0..g.len()).map(|i| ((i * 37 % 11) as f64).sqrt()).collect();
        let plain = mixed_norm(&v, &g, &MixedNormSpec::plain(3, 3.0)).unwrap();
        let mixed = mixed_norm(&v, &g, &spec(&[2], &[0, 1], 3.0, 3.0)).unwrap();
        assert!((plain - mixed).abs() < 1e-12 * plain);
    }

    #[test]
    fn separable_field_factorizes() {
        let g = EvalGrid::new(2, 50, 0.0, 1.0, false).unwrap();
        let a = |y: f64| 1.0 + y * y;
        let c = |z: f64| (3.0 * z).sin().abs();
        let v: Vec<f64> = (0..g.len())
            .map(|i| {
                let p = g.point(i);
                a(p[0]) * c(p[1])
            })
            .collect();
        let h = g.spacing();
        let ys: Vec<f64> = (0..50).map(|i| g.coordinate(i)).collect();
        let (p, q) = (4.0, 2.0);
        let na = (ys.iter().map(|&y| a(y).powf(p)).sum::<f64>() * h).powf(1.0 / p);
        let nc = (ys.iter().map(|&z| c(z).powf(q)).sum::<f64>() * h).powf(1.0 / q);
        let m = mixed_norm(&v, &g, &spec(&[0], &[1], p, q)).unwrap();
        assert!((m - na * nc).abs() < 1e-10 * m);
        let sup_c = ys.iter().map(|&z| c(z)).fold(0.0, f64::max);
        let m = mixed_norm(&v, &g, &spec(&[0], &[1], p, f64::INFINITY)).unwrap();
        assert!((m - na * sup_c).abs() < 1e-10 * m);
    }

    #[test]
    fn homogeneous_and_monotone() {
        let g = EvalGrid::unit_ball(2, 12).unwrap();
        let v: Vec<f64> = (0..g.len()).map(|i| (i % 7) as f64 * 0.1).collect();
        let s = spec(&[0], &[1], 4.0, f64::INFINITY);
        let base = mixed_norm(&v, &g, &s).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| 2.5 * x).collect();
        assert!((mixed_norm(&scaled, &g, &s).unwrap() - 2.5 * base).abs() < 1e-12 * base);
        let bigger: Vec<f64> = v.iter().map(|x| x + 0.01).collect();
        assert!(mixed_norm(&bigger, &g, &s).unwrap() >= base);
        assert_eq!(mixed_norm(&vec![0.0; g.len()], &g, &s).unwrap(), 0.0);
    }

    #[test]
    fn axes_must_partition() {
        assert!(spec(&[0], &[0], 2.0, 2.0).validate(2).is_err());
        assert!(spec(&[0], &[], 2.0, 2.0).validate(2).is_err());
        assert!(spec(&[0], &[1], 0.0, 2.0).validate(2).is_err());
    }

    #[test]
    fn exponent_serde() {
        let s = spec(&[0], &[1], 4.0, f64::INFINITY);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"q\":\"inf\""));
        assert_eq!(serde_json::from_str::<MixedNormSpec>(&json).unwrap(), s);
    }
}
