use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::point::{lp_distance, Norm, SparsePoint};
use crate::graph::{FiniteMetric, StGraph};
use crate::{Error, Result};

/// Anything that can report distances between indexed points.
pub trait Distances {
    fn len(&self) -> usize;
    fn dist(&self, a: usize, b: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Distances for FiniteMetric {
    fn len(&self) -> usize {
        FiniteMetric::len(self)
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        self.get(a, b)
    }
}

/// An indexed list of points in `l_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    pub norm: Norm,
    pub points: Vec<SparsePoint>,
}

impl PointSet {
    pub fn new(norm: Norm, points: Vec<SparsePoint>) -> Self {
        PointSet { norm, points }
    }

    /// Points on the real line.
    pub fn reals(values: &[f64]) -> Self {
        PointSet::new(
            Norm::P(1.0),
            values.iter().map(|&v| SparsePoint::from_dense(&[v])).collect(),
        )
    }
}

impl Distances for PointSet {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        lp_distance(&self.points[a], &self.points[b], self.norm)
    }
}

/// Images of graph vertices in `l_p`, indexed like the graph.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    pub norm: Norm,
    pub lambda: f64,
    pub lipschitz_ceiling: Option<f64>,
    pub ids: Vec<String>,
    pub points: Vec<SparsePoint>,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    p: Norm,
    lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lipschitz_ceiling: Option<f64>,
    points: BTreeMap<String, SparsePoint>,
}

impl EmbeddingTable {
    pub fn new(norm: Norm, ids: Vec<String>, points: Vec<SparsePoint>) -> Result<Self> {
        if ids.len() != points.len() {
            return Err(Error::param("every id needs exactly one point"));
        }
        Ok(EmbeddingTable {
            norm,
            lambda: 1.0,
            lipschitz_ceiling: None,
            ids,
            points,
        })
    }

    pub fn with_scaling(mut self, lambda: f64, ceiling: Option<f64>) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda must be positive"));
        }
        if let Some(k) = ceiling {
            if !(k >= 1.0) {
                return Err(Error::param("Lipschitz ceiling must be at least 1"));
            }
        }
        self.lambda = lambda;
        self.lipschitz_ceiling = ceiling;
        Ok(self)
    }

    pub fn point_set(&self) -> PointSet {
        PointSet::new(self.norm, self.points.clone())
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Reorders the table to follow the graph's vertex order.
    pub fn aligned_to(&self, graph: &StGraph) -> Result<Self> {
        let ids = graph.ids();
        if ids.len() != self.ids.len() {
            return Err(Error::Mismatch(format!(
                "graph has {} vertices, embedding has {} points",
                ids.len(),
                self.ids.len()
            )));
        }
        let lookup: std::collections::HashMap<&str, usize> = self
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let points = ids
            .iter()
            .map(|id| {
                lookup
                    .get(id.as_str())
                    .map(|&i| self.points[i].clone())
                    .ok_or_else(|| Error::Mismatch(format!("no point for vertex {id}")))
            })
            .collect::<Result<_>>()?;
        Ok(EmbeddingTable {
            ids,
            points,
            ..self.clone()
        })
    }

    /// Checks `lambda d_G <= d_X <= lambda K d_G` on every pair.
    pub fn validate_bi_lipschitz(&self, metric: &FiniteMetric) -> Result<()> {
        let k = self.lipschitz_ceiling.unwrap_or(f64::INFINITY);
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let dg = metric.get(a, b);
                let ratio = self.dist(a, b) / (self.lambda * dg);
                if ratio < 1.0 - crate::TOLERANCE || ratio > k + crate::TOLERANCE {
                    return Err(Error::NotBiLipschitz {
                        a,
                        b,
                        ratio,
                        lambda: self.lambda,
                        k,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = TableFile {
            p: self.norm,
            lambda: self.lambda,
            lipschitz_ceiling: self.lipschitz_ceiling,
            points: self
                .ids
                .iter()
                .cloned()
                .zip(self.points.iter().cloned())
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text)?;
        let (ids, points) = file.points.into_iter().unzip();
        EmbeddingTable::new(file.p, ids, points)?.with_scaling(file.lambda, file.lipschitz_ceiling)
    }
}

impl Distances for EmbeddingTable {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        lp_distance(&self.points[a], &self.points[b], self.norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StGraph;
    use crate::Limits;

    fn line_table(values: &[f64]) -> EmbeddingTable {
        let ids = (0..values.len()).map(|i| i.to_string()).collect();
        EmbeddingTable::new(Norm::P(1.0), ids, PointSet::reals(values).points).unwrap()
    }

    #[test]
    fn json_roundtrip_and_alignment() {
        let t = line_table(&[0.0, 1.0, 2.5]).with_scaling(1.0, Some(1.5)).unwrap();
        let back = EmbeddingTable::from_json(&t.to_json().unwrap()).unwrap();
        let g = StGraph::path(2).unwrap();
        assert_eq!(back.aligned_to(&g).unwrap(), t);
        let g3 = StGraph::path(3).unwrap();
        assert!(matches!(back.aligned_to(&g3), Err(Error::Mismatch(_))));
    }

    #[test]
    fn bi_lipschitz_validation() {
        let g = StGraph::path(2).unwrap();
        let m = FiniteMetric::from_graph(&g, &Limits::default()).unwrap();
        let t = line_table(&[0.0, 1.0, 2.5]).with_scaling(1.0, Some(1.5)).unwrap();
        assert!(t.validate_bi_lipschitz(&m).is_ok());
        let t = t.with_scaling(1.0, Some(1.2)).unwrap();
        assert!(matches!(
            t.validate_bi_lipschitz(&m),
            Err(Error::NotBiLipschitz { .. })
        ));
    }

    #[test]
    fn json_accepts_inf_norm() {
        let text = r#"{"p":"inf","lambda":2,"points":{"a":[["0,0",1.0]],"b":[]}}"#;
        let t = EmbeddingTable::from_json(text).unwrap();
        assert_eq!(t.norm, Norm::Inf);
        assert_eq!(t.dist(0, 1), 1.0);
        assert!(EmbeddingTable::from_json(r#"{"p":0.5,"lambda":1,"points":{}}"#).is_err());
    }
}
