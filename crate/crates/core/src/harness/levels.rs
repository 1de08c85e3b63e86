//! Dyadic level sets of a normalized field, greedy separated nets on them,
//! and the per-shell cardinality bound.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::saturation::{theorem_bound, BoundVariant, NBound};

/// Shells `Ω_i = {2^{-i-1} <= v <= 2^{-i}}` for `i < I`, plus everything
/// at or below the floor `2^{-I}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetPartition {
    pub lambda: f64,
    pub k: usize,
    pub floor_index: usize,
    pub shells: Vec<Vec<usize>>,
    pub below_floor: Vec<usize>,
}

/// `I = ceil(k(k-1)/2 · log2 λ)`, so `2^{-I} <= λ^{-k(k-1)/2}`.
pub fn floor_index(lambda: f64, k: usize) -> usize {
    let e = (k * k.saturating_sub(1)) as f64 / 2.0 * lambda.log2();
    (e - 1e-12).ceil().max(0.0) as usize
}

/// Dyadic index `floor(-log2 v)` of `v` in `(0, 1]`.
pub fn dyadic_index(v: f64) -> usize {
    (-v.log2()).floor().max(0.0) as usize
}

/// Partitions the in-domain entries of `values` (normalized so the maximum is
/// at most 1) into dyadic shells.
pub fn level_set_partition(values: &[f64], domain: &[bool], lambda: f64, k: usize) -> Result<LevelSetPartition> {
    if values.len() != domain.len() {
        return Err(Error::ShapeMismatch("values and domain mask differ in length".into()));
    }
    if !domain.iter().any(|&d| d) {
        return Err(Error::EmptyField);
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && **v <= 1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "field value {v} outside [0, 1]; normalize by the sup first"
        )));
    }
    let floor = floor_index(lambda, k);
    let mut shells = vec![Vec::new(); floor];
    let mut below_floor = Vec::new();
    for (i, (&v, &inside)) in values.iter().zip(domain).enumerate() {
        if !inside {
            continue;
        }
        let idx = if v > 0.0 { dyadic_index(v.min(1.0)) } else { usize::MAX };
        match shells.get_mut(idx) {
            Some(shell) => shell.push(i),
            None => below_floor.push(i),
        }
    }
    Ok(LevelSetPartition {
        lambda,
        k,
        floor_index: floor,
        shells,
        below_floor,
    })
}

/// Divides by the largest value; an identically zero field is an error.
pub fn normalize_by_sup(values: &[f64]) -> Result<(Vec<f64>, f64)> {
    let sup = values.iter().copied().fold(0.0, f64::max);
    if !(sup > 0.0) {
        return Err(Error::EmptyField);
    }
    Ok((values.iter().map(|v| v / sup).collect(), sup))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedNet {
    /// Indices into the scanned point list, in acceptance order.
    pub members: Vec<usize>,
    pub radius: f64,
    pub level: Option<usize>,
}

impl SeparatedNet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Scans `points` in lexicographic order and keeps each point at distance at
/// least `radius` from every point kept so far.
pub fn greedy_net(points: &[Vec<f64>], radius: f64) -> Result<SeparatedNet> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("net radius {radius}")));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let cell = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / radius).floor() as i64).collect() };
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut members = Vec::new();
    let r2 = radius * radius;
    for i in order {
        let p = &points[i];
        let home = cell(p);
        let mut offset = vec![-1i64; home.len()];
        let mut clear = true;
        'scan: loop {
            let key: Vec<i64> = home.iter().zip(&offset).map(|(a, b)| a + b).collect();
            if let Some(list) = buckets.get(&key) {
                if list.iter().any(|&j| dist2(&points[j], p) < r2) {
                    clear = false;
                    break 'scan;
                }
            }
            let mut axis = offset.len();
            loop {
                if axis == 0 {
                    break 'scan;
                }
                axis -= 1;
                offset[axis] += 1;
                if offset[axis] <= 1 {
                    break;
                }
                offset[axis] = -1;
            }
        }
        if clear {
            buckets.entry(home).or_default().push(i);
            members.push(i);
        }
    }
    Ok(SeparatedNet {
        members,
        radius,
        level: None,
    })
}

/// Volume of the unit ball in `ℝ^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellReport {
    pub index: usize,
    pub points: usize,
    pub net_size: usize,
    /// `|Ω_i|` estimated as net size times the volume of a net ball.
    pub omega_estimate: f64,
    pub l: f64,
    /// `N^{1-ε} (L_i/B)^{2k/(k-1)}`.
    pub constant: f64,
    pub bound: NBound,
    pub within_bound: bool,
}

/// Per-shell check of the net cardinality against the `k`-fold bound with
/// `L_i = 2^{-(i+1)/k} B`. Empty shells are skipped.
pub fn omega_bound_check(
    partition: &LevelSetPartition,
    nets: &[SeparatedNet],
    dim: usize,
    epsilon: f64,
    b: f64,
) -> Result<Vec<ShellReport>> {
    let k = partition.k;
    if k < 2 {
        return Err(Error::InvalidParameter("shell bounds need k >= 2".into()));
    }
    if nets.len() != partition.shells.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} nets for {} shells",
            nets.len(),
            partition.shells.len()
        )));
    }
    let radius = partition.lambda.powf(-1.0 + epsilon);
    let ball = unit_ball_volume(dim) * radius.powi(dim as i32);
    let power = 2.0 * k as f64 / (k as f64 - 1.0);
    let mut out = Vec::new();
    for (i, (shell, net)) in partition.shells.iter().zip(nets).enumerate() {
        if shell.is_empty() {
            continue;
        }
        let l = 2f64.powf(-((i + 1) as f64) / k as f64) * b;
        let bound = theorem_bound(k, b, l, epsilon, BoundVariant::Theorem)?;
        let n = net.len();
        out.push(ShellReport {
            index: i,
            points: shell.len(),
            net_size: n,
            omega_estimate: n as f64 * ball,
            l,
            constant: (n as f64).powf(1.0 - epsilon) * (l / b).powf(power),
            within_bound: bound.admits(n),
            bound,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_bins() {
        assert_eq!(dyadic_index(1.0), 0);
        assert_eq!(dyadic_index(0.6), 0);
        assert_eq!(dyadic_index(0.3), 1);
        assert_eq!(floor_index(16.0, 2), 4);
        assert_eq!(floor_index(16.0, 3), 12);
        assert_eq!(floor_index(10.0, 2), 4);
    }

    #[test]
    fn partition_examples() {
        let p = level_set_partition(&[1.0; 5], &[true; 5], 16.0, 2).unwrap();
        assert_eq!(p.shells[0], vec![0, 1, 2, 3, 4]);
        let p = level_set_partition(&[0.6, 0.3, 0.01, 0.0], &[true, true, true, false], 16.0, 2).unwrap();
        assert_eq!(p.shells[0], vec![0]);
        assert_eq!(p.shells[1], vec![1]);
        assert_eq!(p.below_floor, vec![2]);
        assert!(matches!(
            level_set_partition(&[0.0], &[false], 16.0, 2),
            Err(Error::EmptyField)
        ));
        assert!(level_set_partition(&[2.0], &[true], 16.0, 2).is_err());
    }

    #[test]
    fn net_examples() {
        let net = greedy_net(&[vec![0.3, 0.1]], 0.1).unwrap();
        assert_eq!(net.len(), 1);
        let net = greedy_net(&[vec![0.0, 0.0], vec![0.2, 0.0]], 0.1).unwrap();
        assert_eq!(net.len(), 2);
        let net = greedy_net(&[vec![0.0, 0.0], vec![0.05, 0.0]], 0.1).unwrap();
        assert_eq!(net.members, vec![0]);
        assert!(greedy_net(&[], 0.0).is_err());
    }

    #[test]
    fn net_on_fine_grid_matches_packing_count() {
        let r = 0.05;
        let n = (2.0 / r) as usize;
        let pts: Vec<Vec<f64>> = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| vec![i as f64 * r / 2.0, j as f64 * r / 2.0]))
            .collect();
        let net = greedy_net(&pts, r).unwrap();
        let expected = (1.0 / r) * (1.0 / r);
        let ratio = net.len() as f64 / expected;
        assert!((0.25..=4.0).contains(&ratio), "{}", net.len());
        for (a, &i) in net.members.iter().enumerate() {
            for &j in &net.members[a + 1..] {
                assert!(dist2(&pts[i], &pts[j]) >= r * r);
            }
        }
        for p in &pts {
            assert!(net.members.iter().any(|&j| dist2(&pts[j], p) < r * r));
        }
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn single_point_shell_constant() {
        let p = level_set_partition(&[1.0, 0.0], &[true, true], 16.0, 2).unwrap();
        let nets: Vec<SeparatedNet> = p
            .shells
            .iter()
            .map(|s| SeparatedNet {
                members: s.clone(),
                radius: 0.1,
                level: None,
            })
            .collect();
        let r = omega_bound_check(&p, &nets, 2, 0.1, 1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].constant - 0.25).abs() < 1e-15);
        assert!(r[0].constant <= 1.0 && r[0].within_bound);
    }
}
