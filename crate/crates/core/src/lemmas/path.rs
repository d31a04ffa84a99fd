use serde::{Deserialize, Serialize};

use super::sequence::sequence_stable_index;
use crate::metric::Distances;
use crate::{Error, Result, TOLERANCE};

/// Which pairs enter the scaled Lipschitz values `L_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathMode {
    /// All pairs `(v, v + 2^i)`.
    Standard,
    /// Only pairs inside the dyadic grid `A_i = {0, 2^i, 2 * 2^i, ...}`.
    Grid,
}

/// `L_0 >= L_1 >= ... >= L_m` with `m = floor(log2 n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleProfile {
    pub mode: PathMode,
    pub lambda: f64,
    pub k: f64,
    pub levels: Vec<f64>,
    /// Smallest start position attaining each `L_i`.
    pub attained_at: Vec<usize>,
}

fn floor_log2(n: usize) -> u32 {
    usize::BITS - 1 - n.leading_zeros()
}

/// Distance along the embedded path: `path[a]` and `path[b]` index into
/// `space`.
fn d(space: &impl Distances, path: &[usize], a: usize, b: usize) -> f64 {
    space.dist(path[a], path[b])
}

fn check_bi_lipschitz(space: &impl Distances, path: &[usize], lambda: f64, k: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda must be positive"));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::param("K must be a finite number >= 1"));
    }
    for a in 0..path.len() {
        for b in a + 1..path.len() {
            let ratio = d(space, path, a, b) / (lambda * (b - a) as f64);
            if ratio < 1.0 - TOLERANCE || ratio > k * (1.0 + TOLERANCE) {
                return Err(Error::NotBiLipschitz {
                    a,
                    b,
                    ratio,
                    lambda,
                    k,
                });
            }
        }
    }
    Ok(())
}

/// Exact scaled Lipschitz values of the map `x -> space[path[x]]` on `P_n`,
/// `n = path.len() - 1`.
pub fn scale_profile(
    space: &impl Distances,
    path: &[usize],
    lambda: f64,
    k: f64,
    mode: PathMode,
) -> Result<ScaleProfile> {
    if path.len() < 3 {
        return Err(Error::param("the path needs length at least 2"));
    }
    check_bi_lipschitz(space, path, lambda, k)?;
    let n = path.len() - 1;
    let m = floor_log2(n);
    let mut levels = Vec::with_capacity(m as usize + 1);
    let mut attained_at = Vec::with_capacity(m as usize + 1);
    for i in 0..=m {
        let lag = 1usize << i;
        let step = match mode {
            PathMode::Standard => 1,
            PathMode::Grid => lag,
        };
        let mut best = (f64::NEG_INFINITY, 0);
        for v in (0..=n - lag).step_by(step) {
            let r = d(space, path, v, v + lag) / (lambda * lag as f64);
            if r > best.0 {
                best = (r, v);
            }
        }
        // values are in [1, K] up to rounding
        levels.push(best.0.clamp(1.0, k));
        attained_at.push(best.1);
    }
    for (index, w) in levels.windows(2).enumerate() {
        if w[1] > w[0] * (1.0 + TOLERANCE) {
            return Err(Error::NotMonotone {
                index,
                prev: w[0],
                next: w[1],
            });
        }
    }
    // remove rounding-level increases so the sequence lemma sees a
    // non-increasing sequence
    for i in 1..levels.len() {
        levels[i] = levels[i].min(levels[i - 1]);
    }
    Ok(ScaleProfile {
        mode,
        lambda,
        k,
        levels,
        attained_at,
    })
}

/// Data of the refined estimate, present when `n >= 2^ceil(2 C K^p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedBound {
    pub c: f64,
    pub p: f64,
    /// `1 / (2 C L_{i+1}^p)`.
    pub half_width: f64,
    /// `1 + 2 / (C L_{i+1}^p)`.
    pub distortion_bound: f64,
    /// Smallest slack of the refined two-sided inequalities over pairs of Z.
    pub min_residual: f64,
    pub holds: bool,
}

/// Three equally spaced points of the path on which the map is almost a
/// scaled isometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathWitness {
    pub mode: PathMode,
    pub scale: u32,
    /// Positions `z_0 < z_1 < z_2` on the path.
    pub z: [usize; 3],
    /// The same points as indices of the underlying space.
    pub vertices: [usize; 3],
    pub lambda: f64,
    pub k: f64,
    pub levels: Vec<f64>,
    pub l_next: f64,
    /// `K / (floor(log2 n) L_{i+1})`.
    pub b: f64,
    /// Smallest slack of `lambda L (1 - B) |x-y| <= d <= lambda L (1 + B) |x-y|`.
    pub min_residual: f64,
    /// Distortion of the map restricted to Z.
    pub distortion: f64,
    pub refined: Option<RefinedBound>,
}

impl PathWitness {
    /// `(x, y, d_path, d_image)` for the three pairs of Z.
    pub fn pairs(&self, space: &impl Distances) -> [(usize, usize, f64, f64); 3] {
        let [a, b, c] = self.z;
        let [va, vb, vc] = self.vertices;
        [(a, b, va, vb), (b, c, vb, vc), (a, c, va, vc)].map(|(x, y, vx, vy)| {
            (vx, vy, (y - x) as f64, space.dist(vx, vy))
        })
    }
}

fn sandwich_residual(pairs: &[(usize, usize, f64, f64)], scale: f64, width: f64) -> f64 {
    pairs
        .iter()
        .map(|&(_, _, dp, dx)| {
            let lower = dx - scale * (1.0 - width) * dp;
            let upper = scale * (1.0 + width) * dp - dx;
            lower.min(upper)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Whether `n >= 2^ceil(2 C K^p)`, computed without overflow.
pub fn refined_regime(n: usize, c: f64, k: f64, p: f64) -> bool {
    let e = (2.0 * c * k.powf(p)).ceil();
    e < f64::from(usize::BITS - 1) && (n as f64) >= 2f64.powf(e)
}

/// Runs the path lemma on `x -> space[path[x]]`.
///
/// The scale `i` comes from the sequence lemma applied to `L_0..L_m`; `z_0`
/// and `z_2 = z_0 + 2^{i+1}` are the smallest pair attaining `L_{i+1}` (in
/// grid mode both lie in `A_{i+1}`), and `z_1` is their midpoint on the
/// path. When `refine = Some((C, p))` and the path is long enough the
/// refined estimate is evaluated as well.
pub fn path_lemma_extract(
    space: &impl Distances,
    path: &[usize],
    lambda: f64,
    k: f64,
    mode: PathMode,
    refine: Option<(f64, f64)>,
) -> Result<PathWitness> {
    let n = path.len().saturating_sub(1);
    if n < 4 {
        return Err(Error::param(format!("the path lemma needs n >= 4, got {n}")));
    }
    let profile = scale_profile(space, path, lambda, k, mode)?;
    let m = floor_log2(n) as f64;
    let i = sequence_stable_index(&profile.levels, k)?;
    let l_next = profile.levels[i + 1];
    let z0 = profile.attained_at[i + 1];
    let lag = 1usize << i;
    let z = [z0, z0 + lag, z0 + 2 * lag];
    let vertices = z.map(|x| path[x]);
    let b = k / (m * l_next);

    let mut w = PathWitness {
        mode,
        scale: i as u32,
        z,
        vertices,
        lambda,
        k,
        levels: profile.levels,
        l_next,
        b,
        min_residual: 0.0,
        distortion: 0.0,
        refined: None,
    };
    let pairs = w.pairs(space);
    w.min_residual = sandwich_residual(&pairs, lambda * l_next, b);
    let ratios = pairs.map(|(_, _, dp, dx)| dx / dp);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    w.distortion = hi / lo;

    if let Some((c, p)) = refine {
        if !(c >= 1.0 && p >= 1.0) {
            return Err(Error::param("the refined estimate needs C >= 1 and p >= 1"));
        }
        if refined_regime(n, c, k, p) {
            let half_width = 1.0 / (2.0 * c * l_next.powf(p));
            let distortion_bound = 1.0 + 2.0 / (c * l_next.powf(p));
            let min_residual = sandwich_residual(&pairs, lambda * l_next, half_width);
            let holds = min_residual >= -TOLERANCE && w.distortion <= distortion_bound + TOLERANCE;
            w.refined = Some(RefinedBound {
                c,
                p,
                half_width,
                distortion_bound,
                min_residual,
                holds,
            });
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Norm, PointSet, SparsePoint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ident(n: usize) -> Vec<usize> {
        (0..=n).collect()
    }

    #[test]
    fn isometric_line() {
        let s = PointSet::reals(&(0..=8).map(f64::from).collect::<Vec<_>>());
        let prof = scale_profile(&s, &ident(8), 1.0, 1.0, PathMode::Standard).unwrap();
        assert!(prof.levels.iter().all(|&l| l == 1.0));
        let w = path_lemma_extract(&s, &ident(8), 1.0, 1.0, PathMode::Standard, None).unwrap();
        assert_eq!(w.distortion, 1.0);
        assert!(w.min_residual >= 0.0);
    }

    #[test]
    fn doubled_line() {
        let s = PointSet::reals(&(0..=8).map(|x| 2.0 * x as f64).collect::<Vec<_>>());
        let prof = scale_profile(&s, &ident(8), 1.0, 2.0, PathMode::Grid).unwrap();
        assert!(prof.levels.iter().all(|&l| l == 2.0));
    }

    #[test]
    fn stretched_long_pair_is_attained() {
        // a zigzag that is straight only across positions 4..8
        let pts: Vec<SparsePoint> = (0..=8)
            .map(|x| {
                let y = if (4..=8).contains(&x) { 0.0 } else { 0.5 * (x % 2) as f64 };
                SparsePoint::from_dense(&[x as f64, y])
            })
            .collect();
        let s = PointSet::new(Norm::P(2.0), pts);
        let w = path_lemma_extract(&s, &ident(8), 1.0, 1.2, PathMode::Standard, None).unwrap();
        let prof = scale_profile(&s, &ident(8), 1.0, 1.2, PathMode::Standard).unwrap();
        let i = w.scale as usize;
        let lag = 2usize << i;
        let ratios: Vec<f64> = (0..=8 - lag)
            .map(|v| s.dist(v, v + lag) / lag as f64)
            .collect();
        let first = ratios
            .iter()
            .position(|&r| r == ratios.iter().copied().fold(0.0, f64::max))
            .unwrap();
        assert_eq!(w.z[0], first);
        assert_eq!(prof.levels[i + 1], w.l_next);
    }

    #[test]
    fn rejects_short_and_non_lipschitz() {
        let s = PointSet::reals(&[0., 1., 2., 3.]);
        assert!(path_lemma_extract(&s, &ident(3), 1.0, 1.0, PathMode::Standard, None).is_err());
        let s = PointSet::reals(&[0., 1., 2., 3., 9.]);
        assert!(matches!(
            path_lemma_extract(&s, &ident(4), 1.0, 2.0, PathMode::Standard, None),
            Err(Error::NotBiLipschitz { .. })
        ));
    }

    fn random_map(rng: &mut ChaCha8Rng, n: usize) -> PointSet {
        // a monotone walk in the first coordinate plus bounded wiggle keeps
        // the map (1, 2)-bi-Lipschitz
        let mut pts = Vec::with_capacity(n + 1);
        let mut x = 0.0;
        for _ in 0..=n {
            let wiggle: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.2..0.2)).collect();
            let mut c = vec![x];
            c.extend(wiggle);
            pts.push(SparsePoint::from_dense(&c));
            x += rng.gen_range(1.0..1.3);
        }
        PointSet::new(Norm::P(2.0), pts)
    }

    fn measured_k(s: &PointSet, n: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for a in 0..=n {
            for b in a + 1..=n {
                let r = s.dist(a, b) / (b - a) as f64;
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        (lo, hi / lo)
    }

    #[test]
    fn random_maps_satisfy_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let n = [16, 64][trial % 2];
            let s = random_map(&mut rng, n);
            let (lambda, k) = measured_k(&s, n);
            for mode in [PathMode::Standard, PathMode::Grid] {
                let w = path_lemma_extract(&s, &ident(n), lambda, k, mode, Some((1.0, 1.0))).unwrap();
                assert!(w.min_residual >= -1e-9, "{w:?}");
                let lag = 1usize << w.scale;
                assert_eq!(w.z[1] - w.z[0], lag);
                assert_eq!(w.z[2] - w.z[1], lag);
                if mode == PathMode::Grid {
                    assert_eq!(w.z[0] % (2 * lag), 0);
                }
                if let Some(r) = &w.refined {
                    assert!(r.holds);
                }
            }
        }
    }
}
