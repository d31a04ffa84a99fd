use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::{Error, Limits, Result};

/// Address of a vertex in a (possibly iterated) slash product.
///
/// Vertices of a base graph are `Plain`. A vertex created by substituting a
/// copy of `G` for edge `e` of `H` is `Nested { edge: e, inner }` where
/// `inner` is the address of the vertex inside `G`; the copy's own `s` and
/// `t` are never nested, they resolve to the endpoints of `e`.
///
/// `scope` distinguishes products taken over an already nested outer graph
/// so that addresses stay unique.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexAddress {
    Plain(String),
    Nested {
        scope: u32,
        edge: usize,
        inner: Box<VertexAddress>,
    },
}

impl VertexAddress {
    pub fn plain(name: impl Into<String>) -> Self {
        VertexAddress::Plain(name.into())
    }

    pub fn nested(edge: usize, inner: VertexAddress) -> Self {
        VertexAddress::Nested {
            scope: 1,
            edge,
            inner: Box::new(inner),
        }
    }

    pub fn scope(&self) -> u32 {
        match self {
            VertexAddress::Plain(_) => 0,
            VertexAddress::Nested { scope, .. } => *scope,
        }
    }

    /// Outer-to-inner edge indices of a nested address.
    pub fn edge_path(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self;
        while let VertexAddress::Nested { edge, inner, .. } = cur {
            out.push(*edge);
            cur = inner;
        }
        out
    }
}

impl fmt::Display for VertexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexAddress::Plain(name) => f.write_str(name),
            VertexAddress::Nested { scope, edge, inner } if *scope == 1 => {
                write!(f, "e{edge}/{inner}")
            }
            VertexAddress::Nested { scope, edge, inner } => write!(f, "e{edge}@{scope}/{inner}"),
        }
    }
}

impl FromStr for VertexAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGraph(format!("malformed vertex address {s:?}"));
        match s.split_once('/') {
            None if s.is_empty() => Err(bad()),
            None => Ok(VertexAddress::Plain(s.to_string())),
            Some((head, rest)) => {
                let head = head.strip_prefix('e').ok_or_else(bad)?;
                let (edge, scope) = match head.split_once('@') {
                    Some((e, sc)) => (e, sc.parse::<u32>().map_err(|_| bad())?),
                    None => (head, 1),
                };
                if scope == 0 {
                    return Err(bad());
                }
                Ok(VertexAddress::Nested {
                    scope,
                    edge: edge.parse().map_err(|_| bad())?,
                    inner: Box::new(rest.parse()?),
                })
            }
        }
    }
}

/// A connected, simple, unweighted directed graph with distinguished source
/// `s` and sink `t`. Every edge `(u, v)` flows away from `s`:
/// `d(u, s) < d(v, s)` under the undirected shortest-path metric.
#[derive(Clone, Debug)]
pub struct StGraph {
    vertices: Vec<VertexAddress>,
    index: HashMap<VertexAddress, usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    out: Vec<Vec<usize>>,
    s: usize,
    t: usize,
}

impl StGraph {
    pub fn new(
        vertices: Vec<VertexAddress>,
        edges: Vec<(usize, usize)>,
        s: usize,
        t: usize,
    ) -> Result<Self> {
        let n = vertices.len();
        if s >= n || t >= n {
            return Err(Error::InvalidGraph("s or t out of range".into()));
        }
        if s == t {
            return Err(Error::InvalidGraph("s and t must differ".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, v) in vertices.iter().enumerate() {
            if let VertexAddress::Plain(name) = v {
                if name.is_empty() || name.contains('/') {
                    return Err(Error::InvalidGraph(format!("bad vertex name {name:?}")));
                }
            }
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex {v}")));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut out = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph("edge endpoint out of range".into()));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self loop at {}", vertices[u])));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!(
                    "parallel edge {} - {}",
                    vertices[u], vertices[v]
                )));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            out[u].push(v);
        }
        let g = StGraph {
            vertices,
            index,
            edges,
            adjacency,
            out,
            s,
            t,
        };
        let from_s = g.bfs(s);
        if let Some(bad) = from_s.iter().position(|d| d.is_none()) {
            return Err(Error::Disconnected(g.vertices[bad].to_string()));
        }
        for &(u, v) in &g.edges {
            if from_s[u] >= from_s[v] {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) does not flow away from s",
                    g.vertices[u], g.vertices[v]
                )));
            }
        }
        Ok(g)
    }

    /// The single edge `s -> t`, the zeroth slash power of any st-graph.
    pub fn single_edge() -> Self {
        StGraph::new(
            vec![VertexAddress::plain("s"), VertexAddress::plain("t")],
            vec![(0, 1)],
            0,
            1,
        )
        .expect("valid")
    }

    /// The path `0 - 1 - ... - n` with `s = 0`, `t = n`.
    pub fn path(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("path length must be at least 1"));
        }
        let vertices = (0..=n).map(|i| VertexAddress::Plain(i.to_string())).collect();
        let edges = (0..n).map(|i| (i, i + 1)).collect();
        StGraph::new(vertices, edges, 0, n)
    }

    /// The complete bipartite graph `K_{2,k}` with `s`, `t` on one side and
    /// midpoints `x1..xk` on the other. Vertices are ordered `s, t, x1..xk`
    /// and edges `(s, x_j), (x_j, t)` for `j = 1..k`.
    pub fn base_diamond(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("diamond branching must be at least 1"));
        }
        let mut vertices = vec![VertexAddress::plain("s"), VertexAddress::plain("t")];
        vertices.extend((1..=k).map(|j| VertexAddress::Plain(format!("x{j}"))));
        let edges = (0..k).flat_map(|j| [(0, j + 2), (j + 2, 1)]).collect();
        StGraph::new(vertices, edges, 0, 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn vertices(&self) -> &[VertexAddress] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn address(&self, v: usize) -> &VertexAddress {
        &self.vertices[v]
    }

    pub fn index_of(&self, addr: &VertexAddress) -> Option<usize> {
        self.index.get(addr).copied()
    }

    pub fn index_of_id(&self, id: &str) -> Option<usize> {
        id.parse::<VertexAddress>().ok().and_then(|a| self.index_of(&a))
    }

    pub fn ids(&self) -> Vec<String> {
        self.vertices.iter().map(ToString::to_string).collect()
    }

    /// Undirected neighbours, in edge insertion order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Heads of the edges leaving `v`.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    /// Undirected breadth-first distances from `source`.
    pub fn bfs(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have distances");
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Vertex count of `h ⊘ g` without building it.
pub fn slash_vertex_count(h: &StGraph, g: &StGraph) -> u128 {
    h.vertex_count() as u128 + h.edge_count() as u128 * (g.vertex_count() as u128 - 2)
}

/// Replaces every edge `(u, v)` of `h` by a copy of `g` whose `s` and `t`
/// are identified with `u` and `v`. The result keeps `s(h)` and `t(h)`, and
/// edge `e` of `h` contributes the copies of `g`'s edges in `g`'s order, so
/// `|E(h ⊘ g)| = |E(h)| |E(g)|`.
pub fn slash_product(h: &StGraph, g: &StGraph, limits: &Limits) -> Result<StGraph> {
    limits.check_vertices(slash_vertex_count(h, g))?;
    let scope = 1 + h.vertices.iter().map(VertexAddress::scope).max().unwrap_or(0);
    let interior: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| v != g.s && v != g.t)
        .collect();
    let mut rank = vec![usize::MAX; g.vertex_count()];
    for (r, &v) in interior.iter().enumerate() {
        rank[v] = r;
    }

    let mut vertices = h.vertices.clone();
    vertices.reserve(h.edge_count() * interior.len());
    for e in 0..h.edge_count() {
        for &v in &interior {
            vertices.push(VertexAddress::Nested {
                scope,
                edge: e,
                inner: Box::new(g.vertices[v].clone()),
            });
        }
    }

    let base = h.vertex_count();
    let mut edges = Vec::with_capacity(h.edge_count() * g.edge_count());
    for (e, &(u, v)) in h.edges.iter().enumerate() {
        let map = |x: usize| {
            if x == g.s {
                u
            } else if x == g.t {
                v
            } else {
                base + e * interior.len() + rank[x]
            }
        };
        edges.extend(g.edges.iter().map(|&(a, b)| (map(a), map(b))));
    }
    StGraph::new(vertices, edges, h.s, h.t)
}
