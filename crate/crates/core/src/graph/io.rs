use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::diamond::Diamond;
use super::stgraph::{StGraph, VertexAddress};
use super::tree::Tree;
use crate::{Error, Limits, Result};

/// On-disk graph description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub kind: String,
    #[serde(default)]
    pub params: Value,
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub s: String,
    pub t: String,
}

/// A graph read back from a [`GraphFile`], rebuilt from its parameters
/// where the kind has a builder.
#[derive(Clone, Debug)]
pub enum LoadedGraph {
    Tree { tree: Tree, graph: StGraph },
    Diamond(Diamond),
    Path(StGraph),
    Custom(StGraph),
}

impl LoadedGraph {
    pub fn graph(&self) -> &StGraph {
        match self {
            LoadedGraph::Tree { graph, .. } => graph,
            LoadedGraph::Diamond(d) => d.graph(),
            LoadedGraph::Path(g) | LoadedGraph::Custom(g) => g,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LoadedGraph::Tree { .. } => "tree",
            LoadedGraph::Diamond(_) => "diamond",
            LoadedGraph::Path(_) => "path",
            LoadedGraph::Custom(_) => "custom",
        }
    }
}

impl GraphFile {
    pub fn from_graph(kind: &str, params: Value, g: &StGraph) -> Self {
        GraphFile {
            kind: kind.to_string(),
            params,
            vertices: g.ids(),
            edges: g
                .edges()
                .iter()
                .map(|&(u, v)| [g.address(u).to_string(), g.address(v).to_string()])
                .collect(),
            s: g.address(g.s()).to_string(),
            t: g.address(g.t()).to_string(),
        }
    }

    pub fn tree(tree: &Tree) -> Result<Self> {
        let params = json!({"height": tree.height(), "branching": tree.branching()});
        Ok(Self::from_graph("tree", params, &tree.to_graph()?))
    }

    pub fn diamond(d: &Diamond) -> Self {
        let params = json!({"levels": d.levels(), "branching": d.branching()});
        Self::from_graph("diamond", params, d.graph())
    }

    pub fn path(g: &StGraph) -> Self {
        let params = json!({"length": g.edge_count()});
        Self::from_graph("path", params, g)
    }

    fn param(&self, key: &str) -> Result<u64> {
        self.params
            .get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::param(format!("{} graph is missing integer param {key:?}", self.kind)))
    }

    fn parse_custom(&self) -> Result<StGraph> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.parse::<VertexAddress>())
            .collect::<Result<Vec<_>>>()?;
        let lookup = |id: &str| {
            self.vertices
                .iter()
                .position(|v| v == id)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown vertex {id:?}")))
        };
        let edges = self
            .edges
            .iter()
            .map(|[u, v]| Ok((lookup(u)?, lookup(v)?)))
            .collect::<Result<Vec<_>>>()?;
        StGraph::new(vertices, edges, lookup(&self.s)?, lookup(&self.t)?)
    }

    /// Rebuilds the graph. Built-in kinds are regenerated from `params` and
    /// must agree with the stored vertex and edge lists.
    pub fn load(&self, limits: &Limits) -> Result<LoadedGraph> {
        let loaded = match self.kind.as_str() {
            "tree" => {
                let h = self.param("height")? as usize;
                let b = u32::try_from(self.param("branching")?)
                    .map_err(|_| Error::param("branching too large"))?;
                let tree = Tree::with_limits(h, b, limits)?;
                let graph = tree.to_graph()?;
                LoadedGraph::Tree { tree, graph }
            }
            "diamond" => {
                let n = u32::try_from(self.param("levels")?)
                    .map_err(|_| Error::param("levels too large"))?;
                let k = u32::try_from(self.param("branching")?)
                    .map_err(|_| Error::param("branching too large"))?;
                LoadedGraph::Diamond(Diamond::with_limits(n, k, limits)?)
            }
            "path" => {
                let n = self.param("length")? as usize;
                limits.check_vertices(n as u128 + 1)?;
                LoadedGraph::Path(StGraph::path(n)?)
            }
            "custom" => {
                limits.check_vertices(self.vertices.len() as u128)?;
                return Ok(LoadedGraph::Custom(self.parse_custom()?));
            }
            other => return Err(Error::param(format!("unknown graph kind {other:?}"))),
        };
        let rebuilt = GraphFile::from_graph(&self.kind, self.params.clone(), loaded.graph());
        let edge_set = |f: &GraphFile| f.edges.iter().cloned().collect::<HashSet<_>>();
        if rebuilt.vertices != self.vertices
            || edge_set(&rebuilt) != edge_set(self)
            || rebuilt.s != self.s
            || rebuilt.t != self.t
        {
            return Err(Error::Mismatch(format!(
                "{} file does not match the graph its params describe",
                self.kind
            )));
        }
        Ok(loaded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_builtins() {
        let limits = Limits::default();
        let t = GraphFile::tree(&Tree::new(3, 2).unwrap()).unwrap();
        assert_eq!(t.vertices.len(), 15);
        let text = serde_json::to_string(&t).unwrap();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        assert!(matches!(back.load(&limits).unwrap(), LoadedGraph::Tree { .. }));

        let d = GraphFile::diamond(&Diamond::new(2, 2).unwrap());
        assert_eq!(d.vertices.len(), 12);
        assert!(d.vertices.contains(&"e3/x2".to_string()));
        assert_eq!(d.load(&limits).unwrap().graph().edge_count(), 16);

        let p = GraphFile::path(&StGraph::path(8).unwrap());
        assert_eq!(p.vertices.len(), 9);
        assert_eq!(p.load(&limits).unwrap().kind(), "path");
    }

    #[test]
    fn custom_graph() {
        let mut f = GraphFile::diamond(&Diamond::new(1, 3).unwrap());
        f.kind = "custom".into();
        let g = f.load(&Limits::default()).unwrap();
        assert_eq!(g.graph().vertex_count(), 5);
    }

    #[test]
    fn tampered_builtin_rejected() {
        let mut f = GraphFile::diamond(&Diamond::new(1, 2).unwrap());
        f.edges.pop();
        assert!(matches!(f.load(&Limits::default()), Err(Error::Mismatch(_))));
        let mut f = GraphFile::path(&StGraph::path(3).unwrap());
        f.params = json!({});
        assert!(f.load(&Limits::default()).is_err());
    }
}
