use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::construct::TreeEmbedding;
use crate::graph::{tree_distance, TreeCode};
use crate::metric::{lp_distance, CompressionCurve, CurvePoint, SparsePoint};
use crate::TOLERANCE;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// Largest image distance over tree edges.
    pub measured: f64,
    /// `(xi_0^p + sum_{i<=2h} Delta_i^p)^{1/p}`.
    pub bound: f64,
    /// The same sum continued far past `2h`.
    pub limit: f64,
    pub edge: (String, String),
    pub holds: bool,
}

pub fn lipschitz_report(emb: &TreeEmbedding) -> LipschitzReport {
    let tree = emb.tree();
    let norm = emb.norm();
    let codes: Vec<TreeCode> = tree.vertices().collect();
    let (measured, edge) = codes
        .par_iter()
        .skip(1)
        .map(|c| {
            let parent = c.parent().expect("non-root");
            let d = lp_distance(&emb.point(&parent).expect("in tree"), &emb.point(c).expect("in tree"), norm);
            (d, (parent, c.clone()))
        })
        .reduce(
            || (0.0, (TreeCode::root(), TreeCode::root())),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let bound = emb.xi().s_p;
    LipschitzReport {
        measured,
        bound,
        limit: emb.xi().s_p_limit,
        edge: (edge.0.to_string(), edge.1.to_string()),
        holds: measured <= bound + TOLERANCE,
    }
}

/// `f(t/8) / (12 * 6^{1/p})`.
pub fn compression_bound(emb: &TreeEmbedding, t: f64) -> f64 {
    let p = emb.profile().p;
    emb.profile().eval(t / 8.0) / (12.0 * 6f64.powf(1.0 / p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub a: String,
    pub b: String,
    pub tree_distance: usize,
    pub image_distance: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub constant: f64,
    pub pairs_checked: u64,
    /// Smallest `image - bound` over pairs at tree distance at least 3.
    pub min_margin: f64,
    /// The pair attaining `min_margin`, when it is a violation.
    pub violation: Option<PairViolation>,
    /// Distinct pairs with identical images.
    pub collisions: u64,
    pub holds: bool,
    pub curve: CompressionCurve,
}

#[derive(Clone)]
struct Acc {
    min: Vec<f64>,
    max: Vec<f64>,
    pairs: u64,
    collisions: u64,
    worst: Option<(f64, usize, usize)>,
}

impl Acc {
    fn new(len: usize) -> Self {
        Acc {
            min: vec![f64::INFINITY; len],
            max: vec![0.0; len],
            pairs: 0,
            collisions: 0,
            worst: None,
        }
    }

    fn merge(mut self, o: Acc) -> Acc {
        for i in 0..self.min.len() {
            self.min[i] = self.min[i].min(o.min[i]);
            self.max[i] = self.max[i].max(o.max[i]);
        }
        self.pairs += o.pairs;
        self.collisions += o.collisions;
        self.worst = match (self.worst, o.worst) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Exhaustive check of `||F(x) - F(y)|| >= f(d/8) / (12 * 6^{1/p})` over all
/// pairs with `d = d_T(x, y) >= 3`, with the full compression and expansion
/// curves at integer thresholds `1..=2h`.
pub fn compression_report(emb: &TreeEmbedding) -> CompressionReport {
    let tree = emb.tree();
    let norm = emb.norm();
    let h = tree.height();
    let codes: Vec<TreeCode> = tree.vertices().collect();
    let points: Vec<SparsePoint> = emb.points();
    let bounds: Vec<f64> = (0..=2 * h).map(|d| compression_bound(emb, d as f64)).collect();
    let n = codes.len();
    let acc = (0..n)
        .into_par_iter()
        .fold(
            || Acc::new(2 * h + 1),
            |mut acc, a| {
                for b in a + 1..n {
                    let d = tree_distance(&codes[a], &codes[b]);
                    let img = lp_distance(&points[a], &points[b], norm);
                    acc.pairs += 1;
                    if img == 0.0 {
                        acc.collisions += 1;
                    }
                    acc.min[d] = acc.min[d].min(img);
                    acc.max[d] = acc.max[d].max(img);
                    if d >= 3 {
                        let margin = img - bounds[d];
                        if acc.worst.is_none_or(|w| margin < w.0) {
                            acc.worst = Some((margin, a, b));
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| Acc::new(2 * h + 1), Acc::merge);
    let mut points_out = Vec::with_capacity(2 * h);
    for t in 1..=2 * h {
        let rho = acc.min[t..].iter().copied().fold(f64::INFINITY, f64::min);
        let omega = acc.max[..=t].iter().copied().fold(0.0, f64::max);
        points_out.push(CurvePoint {
            t: t as f64,
            rho: rho.is_finite().then_some(rho),
            omega,
            bound: (t >= 3).then(|| bounds[t]),
        });
    }
    let min_margin = acc.worst.map_or(f64::INFINITY, |w| w.0);
    let holds = min_margin >= -TOLERANCE;
    let violation = acc.worst.filter(|_| !holds).map(|(_, a, b)| {
        let d = tree_distance(&codes[a], &codes[b]);
        PairViolation {
            a: codes[a].to_string(),
            b: codes[b].to_string(),
            tree_distance: d,
            image_distance: lp_distance(&points[a], &points[b], norm),
            bound: bounds[d],
        }
    });
    CompressionReport {
        constant: 12.0 * 6f64.powf(1.0 / emb.profile().p),
        pairs_checked: acc.pairs,
        min_margin,
        violation,
        collisions: acc.collisions,
        holds,
        curve: CompressionCurve { points: points_out },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub pairs_checked: u64,
    /// Smallest `d - (A_n + A_m)/3`, `A_j = (sum_{i<j} xi_i^p)^{1/p}`.
    pub min_slack: f64,
    pub holds: bool,
}

/// For pairs whose common prefix is the root, checks
/// `||F(x) - F(y)|| >= (A_n + A_m) / 3` with `n`, `m` the depths.
pub fn chain_check(emb: &TreeEmbedding) -> ChainReport {
    let norm = emb.norm();
    let codes: Vec<TreeCode> = emb.tree().vertices().filter(|c| !c.is_root()).collect();
    let points: Vec<SparsePoint> = codes.iter().map(|c| emb.point(c).expect("in tree")).collect();
    let mass: Vec<f64> = (0..=emb.tree().height()).map(|j| emb.branch_mass(j)).collect();
    let (pairs, min_slack) = (0..codes.len())
        .into_par_iter()
        .map(|a| {
            let mut count = 0u64;
            let mut slack = f64::INFINITY;
            for b in a + 1..codes.len() {
                if codes[a].common_prefix_len(&codes[b]) != 0 {
                    continue;
                }
                let d = lp_distance(&points[a], &points[b], norm);
                count += 1;
                slack = slack.min(d - (mass[codes[a].depth()] + mass[codes[b].depth()]) / 3.0);
            }
            (count, slack)
        })
        .reduce(|| (0, f64::INFINITY), |x, y| (x.0 + y.0, x.1.min(y.1)));
    ChainReport {
        pairs_checked: pairs,
        min_slack,
        holds: min_slack >= -TOLERANCE,
    }
}
