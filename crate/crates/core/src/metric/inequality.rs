use serde::{Deserialize, Serialize};

use super::point::{lp_distance, Norm, SparsePoint};
use super::table::Distances;
use crate::{Error, Result, TOLERANCE};

/// Constants of the target space. Each is optional; operations that need
/// one report its absence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p: Option<f64>,
    pub c_u: Option<f64>,
    pub c_d: Option<f64>,
    pub c_beta: Option<f64>,
}

fn positive(name: &str, v: Option<f64>) -> Result<f64> {
    match v {
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(Error::param(format!("{name} must be positive, got {x}"))),
        None => Err(Error::param(format!("{name} is required"))),
    }
}

impl SpaceParams {
    pub fn umbel(p: f64, c_u: f64) -> Self {
        SpaceParams {
            p: Some(p),
            c_u: Some(c_u),
            ..Self::default()
        }
    }

    pub fn diamond(p: f64, c_d: f64) -> Self {
        SpaceParams {
            p: Some(p),
            c_d: Some(c_d),
            ..Self::default()
        }
    }

    pub fn beta(p: f64, c_beta: f64) -> Self {
        SpaceParams {
            p: Some(p),
            c_beta: Some(c_beta),
            ..Self::default()
        }
    }

    /// The exponent, which the inequalities need to be at least 1.
    pub fn exponent(&self) -> Result<f64> {
        let p = positive("p", self.p)?;
        if p < 1.0 {
            return Err(Error::param(format!("p must be at least 1, got {p}")));
        }
        Ok(p)
    }

    pub fn c_u(&self) -> Result<f64> {
        positive("C_U", self.c_u)
    }

    pub fn c_d(&self) -> Result<f64> {
        positive("C_D", self.c_d)
    }

    pub fn c_beta(&self) -> Result<f64> {
        positive("C_beta", self.c_beta)
    }
}

/// Both sides of an inequality `lhs <= rhs` and `residual = lhs - rhs`.
/// A non-positive residual means no violation was found on this
/// configuration, which is evidence rather than proof.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl Residual {
    fn new(lhs: f64, rhs: f64) -> Self {
        Residual {
            lhs,
            rhs,
            residual: lhs - rhs,
        }
    }

    pub fn violated(&self) -> bool {
        self.residual > TOLERANCE
    }

    pub fn scaled(&self, factor_p: f64) -> Self {
        Residual::new(self.lhs * factor_p, self.rhs * factor_p)
    }
}

pub(crate) fn min_gap(space: &impl Distances, xs: &[usize]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            best = best.min(space.dist(a, b));
        }
    }
    best
}

fn min_max_to(space: &impl Distances, anchor: usize, xs: &[usize]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
        let d = space.dist(anchor, x);
        (lo.min(d), hi.max(d))
    })
}

/// Rolewicz-type check: `min_i ||z - x_i|| / 2 - (1 - t^p / C_beta)`.
///
/// All points must lie in the unit ball and the tips must be pairwise at
/// least `t` apart.
pub fn beta_config_check(
    norm: Norm,
    z: &SparsePoint,
    xs: &[SparsePoint],
    t: f64,
    params: &SpaceParams,
) -> Result<Residual> {
    let p = params.exponent()?;
    let c_beta = params.c_beta()?;
    if !(t > 0.0) {
        return Err(Error::param("separation t must be positive"));
    }
    if xs.len() < 2 {
        return Err(Error::param("at least two tips are required"));
    }
    for (i, x) in std::iter::once(z).chain(xs).enumerate() {
        let r = x.norm(norm);
        if r > 1.0 + TOLERANCE {
            return Err(Error::param(format!("point {i} has norm {r} > 1")));
        }
    }
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let d = lp_distance(&xs[i], &xs[j], norm);
            if d < t - TOLERANCE {
                return Err(Error::param(format!(
                    "tips {i} and {j} are {d} apart, less than t = {t}"
                )));
            }
        }
    }
    let half = xs
        .iter()
        .map(|x| lp_distance(z, x, norm) / 2.0)
        .fold(f64::INFINITY, f64::min);
    Ok(Residual::new(half, 1.0 - t.powf(p) / c_beta))
}

/// `min d(w,x)^p / 2^p + min_{i != j} d(x_i,x_j)^p / C_U^p` against
/// `max(d(w,z)^p, max d(x,z)^p)`.
pub fn infrasup_umbel_residual(
    space: &impl Distances,
    w: usize,
    z: usize,
    xs: &[usize],
    params: &SpaceParams,
) -> Result<Residual> {
    let p = params.exponent()?;
    let c_u = params.c_u()?;
    if xs.len() < 2 {
        return Err(Error::param("at least two tips are required"));
    }
    let (w_min, _) = min_max_to(space, w, xs);
    let (_, z_max) = min_max_to(space, z, xs);
    let lhs = (w_min / 2.0).powf(p) + (min_gap(space, xs) / c_u).powf(p);
    let rhs = space.dist(w, z).max(z_max).powf(p);
    Ok(Residual::new(lhs, rhs))
}

/// `d(s,t)^p / 2^p + min_{i != j} d(x_i,x_j)^p / C_D^p` against
/// `max(max d(s,x)^p, max d(t,x)^p)`.
pub fn diamond_inequality_residual(
    space: &impl Distances,
    s: usize,
    t: usize,
    xs: &[usize],
    params: &SpaceParams,
) -> Result<Residual> {
    let p = params.exponent()?;
    let c_d = params.c_d()?;
    if xs.len() < 2 {
        return Err(Error::param("at least two tips are required"));
    }
    let (_, s_max) = min_max_to(space, s, xs);
    let (_, t_max) = min_max_to(space, t, xs);
    let lhs = (space.dist(s, t) / 2.0).powf(p) + (min_gap(space, xs) / c_d).powf(p);
    let rhs = s_max.max(t_max).powf(p);
    Ok(Residual::new(lhs, rhs))
}

/// Points `z` with `max(d(x,z), d(z,y)) <= (1 + delta) d(x,y) / 2`.
pub fn midpoint_set(space: &impl Distances, x: usize, y: usize, delta: f64) -> Result<Vec<usize>> {
    if x == y {
        return Err(Error::param("midpoint set of a point with itself is undefined"));
    }
    if !(delta >= 0.0) {
        return Err(Error::param("delta must be non-negative"));
    }
    let radius = (1.0 + delta) * space.dist(x, y) / 2.0;
    Ok((0..space.len())
        .filter(|&z| space.dist(x, z).max(space.dist(z, y)) <= radius + TOLERANCE)
        .collect())
}
