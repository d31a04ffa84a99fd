use serde::{Deserialize, Serialize};

use super::stgraph::{slash_product, StGraph, VertexAddress};
use crate::{Error, Limits, Result};

/// Vertex count of `D_n^k`: `V_0 = 2`, `V_n = V_{n-1} + k (2k)^{n-1}`.
pub fn diamond_vertex_count(levels: u32, k: u32) -> Option<u128> {
    let mut v: u128 = 2;
    let mut edges: u128 = 1;
    for _ in 0..levels {
        v = v.checked_add(edges.checked_mul(k as u128)?)?;
        edges = edges.checked_mul(2 * k as u128)?;
    }
    Some(v)
}

/// `D_n^k`, the `n`-th slash power of `K_{2,k}`.
///
/// Built as `D_n = D_1 ⊘ D_{n-1}`, so addresses read outermost edge first:
/// `e3/e0/x2` is midpoint `x2` of the innermost copy on edge 0 of the copy
/// on edge 3 of the top-level `D_1`.
#[derive(Clone, Debug)]
pub struct Diamond {
    levels: u32,
    branching: u32,
    graph: StGraph,
}

/// A copy of `D_1^k` inside `D_n^k` whose midpoints lie at distance `2^scale`
/// from its local `s` and `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledDiamondRef {
    pub scale: u32,
    /// Outer-to-inner edge indices locating the copy.
    pub edge_path: Vec<usize>,
    pub s: usize,
    pub t: usize,
    pub midpoints: Vec<usize>,
}

impl Diamond {
    pub fn new(levels: u32, branching: u32) -> Result<Self> {
        Self::with_limits(levels, branching, &Limits::default())
    }

    pub fn with_limits(levels: u32, branching: u32, limits: &Limits) -> Result<Self> {
        if branching == 0 {
            return Err(Error::param("diamond branching must be at least 1"));
        }
        let count = diamond_vertex_count(levels, branching).ok_or(Error::SizeCeiling {
            what: "vertex count",
            requested: u128::MAX,
            limit: limits.max_vertices,
        })?;
        limits.check_vertices(count)?;
        let base = StGraph::base_diamond(branching as usize)?;
        let mut graph = StGraph::single_edge();
        for _ in 0..levels {
            graph = slash_product(&base, &graph, limits)?;
        }
        Ok(Diamond {
            levels,
            branching,
            graph,
        })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn branching(&self) -> u32 {
        self.branching
    }

    pub fn graph(&self) -> &StGraph {
        &self.graph
    }

    pub fn into_graph(self) -> StGraph {
        self.graph
    }

    /// Endpoints of edge `e` of `D_1^k` as plain names.
    fn base_edge(e: usize) -> (VertexAddress, VertexAddress) {
        let mid = VertexAddress::Plain(format!("x{}", e / 2 + 1));
        if e.is_multiple_of(2) {
            (VertexAddress::plain("s"), mid)
        } else {
            (mid, VertexAddress::plain("t"))
        }
    }

    /// Maps an address inside the copy of `D_m` reached by `edge_path` to an
    /// address of this diamond.
    fn resolve(edge_path: &[usize], inner: VertexAddress) -> VertexAddress {
        match edge_path.split_first() {
            None => inner,
            Some((&e, rest)) => {
                let a = Self::resolve(rest, inner);
                match &a {
                    VertexAddress::Plain(name) if name == "s" => Self::base_edge(e).0,
                    VertexAddress::Plain(name) if name == "t" => Self::base_edge(e).1,
                    _ => VertexAddress::nested(e, a),
                }
            }
        }
    }

    /// All `2^scale`-scaled copies of `D_1^k`, in lexicographic order of their
    /// edge paths. There are `(2k)^{n - scale - 1}` of them.
    pub fn scaled_diamonds(&self, scale: u32) -> Result<Vec<ScaledDiamondRef>> {
        if self.levels == 0 || scale >= self.levels {
            return Err(Error::param(format!(
                "scale {scale} out of range for a diamond with {} levels",
                self.levels
            )));
        }
        let depth = (self.levels - scale - 1) as usize;
        let edges = 2 * self.branching as usize;
        let total = (edges as u128).pow(depth as u32);
        let mut out = Vec::with_capacity(total as usize);
        let mut path = vec![0usize; depth];
        loop {
            out.push(self.locate(scale, &path)?);
            // odometer over edge paths
            let mut pos = depth;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                path[pos] += 1;
                if path[pos] < edges {
                    break;
                }
                path[pos] = 0;
            }
        }
    }

    /// The scaled copy reached by a specific edge path.
    pub fn locate(&self, scale: u32, edge_path: &[usize]) -> Result<ScaledDiamondRef> {
        if self.levels == 0 || scale + 1 + edge_path.len() as u32 != self.levels {
            return Err(Error::param("edge path length does not match the scale"));
        }
        if edge_path.iter().any(|&e| e >= 2 * self.branching as usize) {
            return Err(Error::param("edge index out of range"));
        }
        let find = |inner: VertexAddress| {
            let addr = Self::resolve(edge_path, inner);
            self.graph
                .index_of(&addr)
                .ok_or_else(|| Error::InvalidGraph(format!("unresolved address {addr}")))
        };
        let midpoints = (1..=self.branching)
            .map(|j| find(VertexAddress::Plain(format!("x{j}"))))
            .collect::<Result<_>>()?;
        Ok(ScaledDiamondRef {
            scale,
            edge_path: edge_path.to_vec(),
            s: find(VertexAddress::plain("s"))?,
            t: find(VertexAddress::plain("t"))?,
            midpoints,
        })
    }

    /// The scaled copy with the given local `s` and `t`, if there is one.
    pub fn find_scaled(&self, scale: u32, s: usize, t: usize) -> Result<Option<ScaledDiamondRef>> {
        Ok(self
            .scaled_diamonds(scale)?
            .into_iter()
            .find(|c| c.s == s && c.t == t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FiniteMetric;

    #[test]
    fn small_sizes() {
        let d = Diamond::new(1, 2).unwrap();
        assert_eq!((d.graph().vertex_count(), d.graph().edge_count()), (4, 4));
        let d = Diamond::new(2, 2).unwrap();
        assert_eq!((d.graph().vertex_count(), d.graph().edge_count()), (12, 16));
        let d = Diamond::new(0, 3).unwrap();
        assert_eq!(d.graph().vertex_count(), 2);
    }

    #[test]
    fn recurrence_and_edge_count() {
        for n in 0..=4u32 {
            for k in 1..=3u32 {
                let d = Diamond::new(n, k).unwrap();
                assert_eq!(d.graph().edge_count() as u128, (2 * k as u128).pow(n));
                assert_eq!(
                    d.graph().vertex_count() as u128,
                    diamond_vertex_count(n, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn st_distance_is_power_of_two() {
        let d = Diamond::new(3, 2).unwrap();
        let m = FiniteMetric::from_graph(d.graph(), &Limits::default()).unwrap();
        assert_eq!(m.get(d.graph().s(), d.graph().t()), 8.0);
    }

    #[test]
    fn scaled_copies() {
        let d1 = Diamond::new(1, 2).unwrap();
        let all = d1.scaled_diamonds(0).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!((all[0].s, all[0].t), (d1.graph().s(), d1.graph().t()));

        let d = Diamond::new(2, 2).unwrap();
        assert_eq!(d.scaled_diamonds(1).unwrap().len(), 1);
        assert_eq!(d.scaled_diamonds(0).unwrap().len(), 4);
        assert!(d.scaled_diamonds(2).is_err());

        let d = Diamond::new(3, 3).unwrap();
        let m = FiniteMetric::from_graph(d.graph(), &Limits::default()).unwrap();
        for i in 0..3u32 {
            let copies = d.scaled_diamonds(i).unwrap();
            assert_eq!(copies.len(), 6usize.pow(2 - i));
            for c in &copies {
                assert_eq!(m.get(c.s, c.t), f64::from(2u32.pow(i + 1)));
                for &x in &c.midpoints {
                    assert_eq!(m.get(c.s, x), f64::from(2u32.pow(i)));
                    assert_eq!(m.get(x, c.t), f64::from(2u32.pow(i)));
                }
            }
        }
    }

    #[test]
    fn refuses_oversized() {
        assert!(matches!(
            Diamond::new(12, 5),
            Err(Error::SizeCeiling { .. })
        ));
        assert!(Diamond::new(2, 0).is_err());
    }
}
