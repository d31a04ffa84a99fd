use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::graph::FiniteMetric;
use crate::metric::Distances;
use crate::{Error, Result, TOLERANCE};

/// Colour index. Wide because `ceil(log_{1+gamma} K)` is huge for tiny `gamma`.
pub type Color = u64;

/// A colouring of vertical pairs `(a, b)`, `a` the vertex nearer the root
/// or source, by colours `0..colors()`.
pub trait Coloring {
    fn colors(&self) -> Color;
    /// `None` when the pair is not coloured.
    fn color(&self, a: usize, b: usize) -> Option<Color>;
}

/// An explicitly stored colouring.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairColoring {
    pub colors: Color,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    map: HashMap<(usize, usize), Color>,
}

impl PairColoring {
    pub fn new(colors: Color) -> Self {
        PairColoring {
            colors: colors.max(1),
            gamma: None,
            map: HashMap::new(),
        }
    }

    pub fn insert(&mut self, a: usize, b: usize, color: Color) -> Result<()> {
        if color >= self.colors {
            return Err(Error::param(format!(
                "colour {color} out of range for {} colours",
                self.colors
            )));
        }
        self.map.insert((a, b), color);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl Coloring for PairColoring {
    fn colors(&self) -> Color {
        self.colors
    }

    fn color(&self, a: usize, b: usize) -> Option<Color> {
        self.map.get(&(a, b)).copied()
    }
}

/// A colouring given by a function, for implicit graphs too large to store.
pub struct FnColoring<F> {
    colors: Color,
    f: F,
}

impl<F: Fn(usize, usize) -> Color> FnColoring<F> {
    pub fn new(colors: Color, f: F) -> Self {
        FnColoring {
            colors: colors.max(1),
            f,
        }
    }
}

impl<F: Fn(usize, usize) -> Color> Coloring for FnColoring<F> {
    fn colors(&self) -> Color {
        self.colors
    }

    fn color(&self, a: usize, b: usize) -> Option<Color> {
        let c = (self.f)(a, b);
        (c < self.colors).then_some(c)
    }
}

/// `(1 + gamma)^r`, through `ln_1p` when `1 + gamma` would round badly.
fn power(gamma: f64, r: Color) -> f64 {
    if gamma > 1e-6 {
        (1.0 + gamma).powf(r as f64)
    } else {
        (r as f64 * gamma.ln_1p()).exp()
    }
}

/// Beyond this the floating point estimate is returned uncorrected.
const EXACT_LIMIT: f64 = 4_503_599_627_370_496.0;

/// `ceil(log_{1+gamma} K)`, the largest colour used by
/// [`log_distortion_coloring`]. Saturates at `Color::MAX`.
pub fn max_color(k: f64, gamma: f64) -> Color {
    let est = (k.ln() / gamma.ln_1p()).ceil().max(0.0);
    if est >= EXACT_LIMIT {
        return est as Color;
    }
    let mut r = est as Color;
    while r > 0 && power(gamma, r - 1) >= k {
        r -= 1;
    }
    while power(gamma, r) < k {
        r += 1;
    }
    r
}

/// `floor(log_{1+gamma} ratio)` with the floor made exact against integer
/// powers of `1 + gamma`.
pub fn log_color(ratio: f64, gamma: f64) -> Color {
    let est = (ratio.ln() / gamma.ln_1p()).floor().max(0.0);
    if est >= EXACT_LIMIT {
        return est as Color;
    }
    let mut c = est as Color;
    while c > 0 && power(gamma, c) > ratio {
        c -= 1;
    }
    while power(gamma, c + 1) <= ratio {
        c += 1;
    }
    c
}

/// Colours each listed pair by `floor(log_{1+gamma}(d_X / (lambda d_G)))`.
/// Colours lie in `0..=ceil(log_{1+gamma} K)`.
pub fn log_distortion_coloring(
    image: &impl Distances,
    metric: &FiniteMetric,
    pairs: impl IntoIterator<Item = (usize, usize)>,
    lambda: f64,
    k: f64,
    gamma: f64,
) -> Result<PairColoring> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma must be positive"));
    }
    if !(k >= 1.0) {
        return Err(Error::param("K must be at least 1"));
    }
    let r = max_color(k, gamma);
    let mut out = PairColoring::new(r.saturating_add(1));
    out.gamma = Some(gamma);
    for (a, b) in pairs {
        let ratio = image.dist(a, b) / (lambda * metric.get(a, b));
        if ratio < 1.0 - TOLERANCE {
            return Err(Error::NotBiLipschitz {
                a,
                b,
                ratio,
                lambda,
                k,
            });
        }
        out.insert(a, b, log_color(ratio.max(1.0), gamma).min(r))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StGraph;
    use crate::metric::PointSet;
    use crate::Limits;

    #[test]
    fn exact_powers() {
        let g = 0.5f64;
        assert_eq!(log_color(1.0, g), 0);
        assert_eq!(log_color(1.49, g), 0);
        assert_eq!(log_color((1.0 + g).powi(2), g), 2);
        assert_eq!(log_color((1.0 + g).powi(5), g), 5);
        assert_eq!(max_color(2.0, 0.5), 2);
        assert_eq!(max_color(1.0, 0.5), 0);
        assert_eq!(max_color(1.5, 0.5), 1);
    }

    #[test]
    fn tiny_gamma() {
        // 1 + 1e-18 rounds to 1, log_{1+g} 2 is about ln 2 * 1e18
        let r = max_color(2.0, 1e-18);
        assert!((r as f64 - 2f64.ln() * 1e18).abs() < 1e4);
        assert!(log_color(1.9, 1e-18) <= r);
        // ln(1.001) / 1e-9 lies below the exact range, so corrections run
        let g = 1e-9;
        let c = log_color(1.001, g);
        assert!((c as f64 - 1.001f64.ln() / g.ln_1p()).abs() <= 1.0);
        assert_eq!(max_color(1e300, 1e-300), Color::MAX);
    }

    #[test]
    fn isometric_is_single_colour() {
        let graph = StGraph::path(4).unwrap();
        let m = FiniteMetric::from_graph(&graph, &Limits::default()).unwrap();
        let s = PointSet::reals(&[0., 1., 2., 3., 4.]);
        let pairs = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b)));
        let c = log_distortion_coloring(&s, &m, pairs, 1.0, 1.0, 0.1).unwrap();
        assert_eq!(c.colors(), 1);
        assert_eq!(c.len(), 10);
        assert!((0..5).all(|a| (a + 1..5).all(|b| c.color(a, b) == Some(0))));
    }

    #[test]
    fn colour_range_and_contraction() {
        let graph = StGraph::path(2).unwrap();
        let m = FiniteMetric::from_graph(&graph, &Limits::default()).unwrap();
        let s = PointSet::reals(&[0., 2.25, 3.25]);
        let c = log_distortion_coloring(&s, &m, [(0, 1), (1, 2), (0, 2)], 1.0, 2.25, 0.5).unwrap();
        assert_eq!(c.colors(), 3);
        assert_eq!(c.color(0, 1), Some(2));
        assert_eq!(c.color(1, 2), Some(0));
        let s = PointSet::reals(&[0., 0.5, 1.5]);
        assert!(log_distortion_coloring(&s, &m, [(0, 1)], 1.0, 2.0, 0.5).is_err());
    }
}
