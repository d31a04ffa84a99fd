use std::fmt::Write as _;

use rayon::prelude::*;

use super::stgraph::StGraph;
use crate::{Error, Limits, Result};

/// A finite metric space stored as a dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    ids: Vec<String>,
    n: usize,
    data: Vec<f64>,
}

impl FiniteMetric {
    /// Builds a metric from a full matrix, validating zero diagonal,
    /// symmetry, positivity off the diagonal and the triangle inequality.
    pub fn from_matrix(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("distance matrix must be square and match the ids"));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let m = FiniteMetric { ids, n, data };
        for a in 0..n {
            if m.get(a, a) != 0.0 {
                return Err(Error::param(format!("non-zero diagonal at {a}")));
            }
            for b in 0..n {
                let d = m.get(a, b);
                if !d.is_finite() || (a != b && d <= 0.0) {
                    return Err(Error::param(format!("bad distance d({a},{b}) = {d}")));
                }
                if (d - m.get(b, a)).abs() > crate::TOLERANCE {
                    return Err(Error::param(format!("asymmetric at ({a},{b})")));
                }
                for c in 0..n {
                    if d > m.get(a, c) + m.get(c, b) + crate::TOLERANCE {
                        return Err(Error::param(format!(
                            "triangle inequality fails for ({a},{b}) via {c}"
                        )));
                    }
                }
            }
        }
        Ok(m)
    }

    /// Exact shortest-path metric of the underlying undirected graph, one
    /// breadth-first search per source.
    pub fn from_graph(graph: &StGraph, limits: &Limits) -> Result<Self> {
        let n = graph.vertex_count();
        limits.check_pairs((n as u128) * (n as u128 - 1) / 2)?;
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|src| {
                graph
                    .bfs(src)
                    .into_iter()
                    .enumerate()
                    .map(|(v, d)| {
                        d.map(f64::from)
                            .ok_or_else(|| Error::Disconnected(graph.address(v).to_string()))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        Ok(FiniteMetric {
            ids: graph.ids(),
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.n..(a + 1) * self.n]
    }

    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        FiniteMetric {
            ids: self.ids.clone(),
            n: self.n,
            data: self.data.iter().map(|d| d * factor).collect(),
        }
    }

    /// Restriction to the listed points, in the listed order.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let data = keep
            .iter()
            .flat_map(|&a| keep.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.get(a, b))
            .collect();
        FiniteMetric {
            ids: keep.iter().map(|&a| self.ids[a].clone()).collect(),
            n: keep.len(),
            data,
        }
    }

    /// `N` lines of `N` comma separated values; integral values are written
    /// without a fractional part.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.n * self.n * 3);
        for a in 0..self.n {
            for (b, d) in self.row(a).iter().enumerate() {
                if b > 0 {
                    out.push(',');
                }
                if d.fract() == 0.0 && d.abs() < 1e15 {
                    let _ = write!(out, "{}", *d as i64);
                } else {
                    let _ = write!(out, "{d}");
                }
            }
            out.push('\n');
        }
        out
    }
}
