use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::Distances;
use crate::graph::FiniteMetric;
use crate::{Error, Result};

/// Lipschitz constants of a map and of its inverse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    pub lip: f64,
    pub colip: f64,
    pub dist: f64,
    /// Pair attaining `lip`.
    pub lip_pair: (usize, usize),
    /// Pair attaining `colip`.
    pub colip_pair: (usize, usize),
}

fn check_sizes(image: &impl Distances, metric: &FiniteMetric) -> Result<()> {
    if image.len() != metric.len() {
        return Err(Error::Mismatch(format!(
            "{} points for {} vertices",
            image.len(),
            metric.len()
        )));
    }
    Ok(())
}

/// `lip = max d_X / d_G`, `colip = max d_G / d_X` and their product.
pub fn distortion(image: &(impl Distances + Sync), metric: &FiniteMetric) -> Result<Distortion> {
    check_sizes(image, metric)?;
    let n = metric.len();
    if n < 2 {
        return Err(Error::param("distortion needs at least two points"));
    }
    let per_row: Vec<(f64, (usize, usize), f64, (usize, usize))> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best = (0.0, (a, a), 0.0, (a, a));
            for b in a + 1..n {
                let dx = image.dist(a, b);
                let dg = metric.get(a, b);
                let up = dx / dg;
                let down = if dx == 0.0 { f64::INFINITY } else { dg / dx };
                if up > best.0 {
                    best.0 = up;
                    best.1 = (a, b);
                }
                if down > best.2 {
                    best.2 = down;
                    best.3 = (a, b);
                }
            }
            best
        })
        .collect();
    let mut out = (0.0, (0, 1), 0.0, (0, 1));
    for row in per_row {
        if row.0 > out.0 {
            out.0 = row.0;
            out.1 = row.1;
        }
        if row.2 > out.2 {
            out.2 = row.2;
            out.3 = row.3;
        }
    }
    if out.2.is_infinite() {
        let (a, b) = out.3;
        return Err(Error::Collapse(
            metric.ids()[a].clone(),
            metric.ids()[b].clone(),
        ));
    }
    Ok(Distortion {
        lip: out.0,
        colip: out.2,
        dist: out.0 * out.2,
        lip_pair: out.1,
        colip_pair: out.3,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    /// `min d_X` over pairs with `d_G >= t`; absent when no pair qualifies.
    pub rho: Option<f64>,
    /// `max d_X` over pairs with `d_G <= t`.
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CompressionCurve {
    pub points: Vec<CurvePoint>,
}

impl CompressionCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,rho,omega,bound\n");
        for p in &self.points {
            let rho = p.rho.map(|r| r.to_string()).unwrap_or_default();
            let bound = p.bound.map(|b| b.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", p.t, rho, p.omega, bound);
        }
        out
    }
}

/// Distinct pairs as `(d_G, d_X)` sorted by `d_G`.
fn pair_profile(image: &(impl Distances + Sync), metric: &FiniteMetric) -> Vec<(f64, f64)> {
    let n = metric.len();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| (a + 1..n).map(move |b| (metric.get(a, b), image.dist(a, b))))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs
}

/// Compression and expansion of the map at each threshold, by exact scans
/// over all pairs of distinct vertices. Images may collide.
pub fn compression_curve(
    image: &(impl Distances + Sync),
    metric: &FiniteMetric,
    thresholds: &[f64],
) -> Result<CompressionCurve> {
    check_sizes(image, metric)?;
    let pairs = pair_profile(image, metric);
    let mut suffix_min = vec![f64::INFINITY; pairs.len() + 1];
    for i in (0..pairs.len()).rev() {
        suffix_min[i] = suffix_min[i + 1].min(pairs[i].1);
    }
    let mut prefix_max = vec![0.0f64; pairs.len() + 1];
    for i in 0..pairs.len() {
        prefix_max[i + 1] = prefix_max[i].max(pairs[i].1);
    }
    let points = thresholds
        .iter()
        .map(|&t| {
            let first_at_least = pairs.partition_point(|p| p.0 < t);
            let past_at_most = pairs.partition_point(|p| p.0 <= t);
            let rho = suffix_min[first_at_least];
            CurvePoint {
                t,
                rho: rho.is_finite().then_some(rho),
                omega: prefix_max[past_at_most],
                bound: None,
            }
        })
        .collect();
    Ok(CompressionCurve { points })
}
