use serde::{Deserialize, Serialize};

use crate::metric::{min_gap, Distances, SpaceParams};
use crate::{Error, Result, TOLERANCE};

/// Why a configuration is not an umbel or diamond for the given constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Rejection {
    InvalidParameter(String),
    TooFewTips(usize),
    Band {
        /// Index into the tip list, or `None` for the anchor pair.
        tip: Option<usize>,
        band: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
}

/// A vertical `delta`-umbel: every triple `{w, z, x_i}` is within
/// distortion `1 + delta` of `{0, 1, 2}` at scale `theta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UmbelWitness {
    pub theta: f64,
    pub delta: f64,
    pub w: usize,
    pub z: usize,
    pub tips: Vec<usize>,
    pub min_tip_gap: f64,
}

/// A vertical `epsilon`-diamond: every triple `{s, x_i, t}` is within
/// distortion `1 + epsilon` of `{0, 1, 2}` at scale `theta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondWitness {
    pub theta: f64,
    pub epsilon: f64,
    pub s: usize,
    pub t: usize,
    pub tips: Vec<usize>,
    pub min_tip_gap: f64,
}

fn check_common(theta: f64, slack: f64, tips: &[usize]) -> std::result::Result<(), Rejection> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Rejection::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    if !(slack > 0.0 && slack < 1.0) {
        return Err(Rejection::InvalidParameter(format!(
            "slack must lie in (0, 1), got {slack}"
        )));
    }
    if tips.len() < 2 {
        return Err(Rejection::TooFewTips(tips.len()));
    }
    Ok(())
}

fn band(
    tip: Option<usize>,
    name: &str,
    value: f64,
    lo: f64,
    hi: f64,
) -> std::result::Result<(), Rejection> {
    if value < lo - TOLERANCE || value > hi + TOLERANCE {
        return Err(Rejection::Band {
            tip,
            band: name.to_string(),
            value,
            lo,
            hi,
        });
    }
    Ok(())
}

/// Accepts iff `theta <= d(w,z) <= (1+delta) theta`, and for every tip
/// `theta <= d(z,x) <= (1+delta) theta` and `2 theta <= d(w,x) <= 2 (1+delta) theta`.
pub fn check_umbel(
    space: &impl Distances,
    w: usize,
    z: usize,
    tips: &[usize],
    theta: f64,
    delta: f64,
) -> std::result::Result<UmbelWitness, Rejection> {
    check_common(theta, delta, tips)?;
    let top = (1.0 + delta) * theta;
    band(None, "d(w,z)", space.dist(w, z), theta, top)?;
    for (i, &x) in tips.iter().enumerate() {
        band(Some(i), "d(z,x)", space.dist(z, x), theta, top)?;
        band(Some(i), "d(w,x)", space.dist(w, x), 2.0 * theta, 2.0 * top)?;
    }
    Ok(UmbelWitness {
        theta,
        delta,
        w,
        z,
        tips: tips.to_vec(),
        min_tip_gap: min_gap(space, tips),
    })
}

/// Accepts iff `2 theta <= d(s,t) <= 2 (1+eps) theta`, and for every tip
/// `theta <= d(s,x), d(x,t) <= (1+eps) theta`.
pub fn check_diamond(
    space: &impl Distances,
    s: usize,
    t: usize,
    tips: &[usize],
    theta: f64,
    epsilon: f64,
) -> std::result::Result<DiamondWitness, Rejection> {
    check_common(theta, epsilon, tips)?;
    let top = (1.0 + epsilon) * theta;
    band(None, "d(s,t)", space.dist(s, t), 2.0 * theta, 2.0 * top)?;
    for (i, &x) in tips.iter().enumerate() {
        band(Some(i), "d(s,x)", space.dist(s, x), theta, top)?;
        band(Some(i), "d(x,t)", space.dist(x, t), theta, top)?;
    }
    Ok(DiamondWitness {
        theta,
        epsilon,
        s,
        t,
        tips: tips.to_vec(),
        min_tip_gap: min_gap(space, tips),
    })
}

/// The largest `theta` meeting every lower band, and the smallest slack
/// that then meets every upper band. Returns `(theta, delta)`.
pub fn minimal_umbel_delta(space: &impl Distances, w: usize, z: usize, tips: &[usize]) -> (f64, f64) {
    let mut lo = space.dist(w, z);
    let mut hi = lo;
    for &x in tips {
        let a = space.dist(z, x);
        let b = space.dist(w, x) / 2.0;
        lo = lo.min(a).min(b);
        hi = hi.max(a).max(b);
    }
    (lo, hi / lo - 1.0)
}

/// Diamond analogue of [`minimal_umbel_delta`]. Returns `(theta, epsilon)`.
pub fn minimal_diamond_epsilon(
    space: &impl Distances,
    s: usize,
    t: usize,
    tips: &[usize],
) -> (f64, f64) {
    let mut lo = space.dist(s, t) / 2.0;
    let mut hi = lo;
    for &x in tips {
        for d in [space.dist(s, x), space.dist(x, t)] {
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    (lo, hi / lo - 1.0)
}

/// Outcome of comparing a witness' tip gap with the lemma's bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaBound {
    pub bound: f64,
    pub min_tip_gap: f64,
    pub satisfied: bool,
}

fn lemma_bound(c: f64, p: f64, theta: f64, slack: f64, gap: f64) -> Result<LemmaBound> {
    if p < 1.0 {
        return Err(Error::param(format!("p must be at least 1, got {p}")));
    }
    if c < 1.0 {
        return Err(Error::param(format!("the lemma bound needs a constant >= 1, got {c}")));
    }
    if !(slack > 0.0 && slack < 1.0) {
        return Err(Error::param("slack must lie in (0, 1)"));
    }
    let bound = 6.0 * c * theta * slack.powf(1.0 / p);
    Ok(LemmaBound {
        bound,
        min_tip_gap: gap,
        satisfied: gap <= bound + TOLERANCE,
    })
}

/// `min gap <= 6 C_U theta delta^{1/p}`. A failure certifies that the
/// configuration violates the infrasup umbel inequality with this `C_U`.
pub fn umbel_lemma_bound(w: &UmbelWitness, params: &SpaceParams) -> Result<LemmaBound> {
    lemma_bound(params.c_u()?, params.exponent()?, w.theta, w.delta, w.min_tip_gap)
}

/// `min gap <= 6 C_D theta epsilon^{1/p}`, with the gap itself (not its
/// `p`-th power) on the left, which is what the inequality's arithmetic
/// yields.
pub fn diamond_lemma_bound(w: &DiamondWitness, params: &SpaceParams) -> Result<LemmaBound> {
    lemma_bound(params.c_d()?, params.exponent()?, w.theta, w.epsilon, w.min_tip_gap)
}

/// `(((1 + delta)^p - 1)^{1/p}, 6 delta^{1/p})`: the intermediate quantity
/// of the bound and the estimate used for it.
pub fn taylor_step(delta: f64, p: f64) -> (f64, f64) {
    (((1.0 + delta).powf(p) - 1.0).powf(1.0 / p), 6.0 * delta.powf(1.0 / p))
}

/// Flat form of a witness together with its lemma bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub kind: String,
    pub theta: f64,
    pub delta: f64,
    pub anchors: Vec<usize>,
    pub tips: Vec<usize>,
    pub min_tip_gap: f64,
    pub bound: f64,
    pub satisfied: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl WitnessRecord {
    pub fn umbel(w: &UmbelWitness, b: &LemmaBound, residual: Option<f64>) -> Self {
        WitnessRecord {
            kind: "umbel".into(),
            theta: w.theta,
            delta: w.delta,
            anchors: vec![w.w, w.z],
            tips: w.tips.clone(),
            min_tip_gap: w.min_tip_gap,
            bound: b.bound,
            satisfied: b.satisfied,
            residual,
        }
    }

    pub fn diamond(w: &DiamondWitness, b: &LemmaBound, residual: Option<f64>) -> Self {
        WitnessRecord {
            kind: "diamond".into(),
            theta: w.theta,
            delta: w.epsilon,
            anchors: vec![w.s, w.t],
            tips: w.tips.clone(),
            min_tip_gap: w.min_tip_gap,
            bound: b.bound,
            satisfied: b.satisfied,
            residual,
        }
    }
}
