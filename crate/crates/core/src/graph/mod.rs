//! Trees, st-graphs, slash products, diamonds and their exact metrics.

mod diamond;
mod io;
mod iso;
mod metric;
mod paths;
mod stgraph;
mod tree;

pub use diamond::{diamond_vertex_count, Diamond, ScaledDiamondRef};
pub use io::{GraphFile, LoadedGraph};
pub use iso::{find_isomorphism, is_isomorphic};
pub use metric::FiniteMetric;
pub use paths::{diamond_path_count, st_paths};
pub use stgraph::{slash_product, slash_vertex_count, StGraph, VertexAddress};
pub use tree::{tree_distance, tree_vertex_count, Tree, TreeCode};
