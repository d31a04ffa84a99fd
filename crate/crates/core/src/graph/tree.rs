use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stgraph::{StGraph, VertexAddress};
use crate::{Error, Limits, Result};

/// A tree vertex as the sequence of child labels on the way down from the
/// root. The empty sequence is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeCode(Vec<u32>);

impl TreeCode {
    pub fn root() -> Self {
        TreeCode(Vec::new())
    }

    pub fn from_labels(labels: impl Into<Vec<u32>>) -> Self {
        TreeCode(labels.into())
    }

    pub fn labels(&self) -> &[u32] {
        &self.0
    }

    /// Depth of the vertex, i.e. its distance to the root.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// The ancestor at depth `j` (`self` itself when `j == depth`).
    pub fn prefix(&self, j: usize) -> TreeCode {
        TreeCode(self.0[..j.min(self.0.len())].to_vec())
    }

    pub fn child(&self, label: u32) -> TreeCode {
        let mut labels = self.0.clone();
        labels.push(label);
        TreeCode(labels)
    }

    pub fn parent(&self) -> Option<TreeCode> {
        if self.0.is_empty() {
            None
        } else {
            Some(TreeCode(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn common_prefix_len(&self, other: &TreeCode) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// `self < other` in the tree order: `self` is a strict ancestor of `other`.
    pub fn is_strict_ancestor_of(&self, other: &TreeCode) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }
}

impl fmt::Display for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("r");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for TreeCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "r" {
            return Ok(TreeCode::root());
        }
        s.split('.')
            .map(|p| {
                p.parse::<u32>()
                    .map_err(|_| Error::param(format!("bad tree vertex id {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(TreeCode)
    }
}

/// Length of the path between the two codes through their first common
/// ancestor.
pub fn tree_distance(a: &TreeCode, b: &TreeCode) -> usize {
    let s = a.common_prefix_len(b);
    a.depth() + b.depth() - 2 * s
}

/// Number of vertices of the complete `b`-branching tree of height `h`, or
/// `None` on overflow.
pub fn tree_vertex_count(h: usize, b: u32) -> Option<u128> {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=h {
        total = total.checked_add(level)?;
        level = level.checked_mul(b as u128)?;
    }
    Some(total)
}

/// The complete `b`-branching tree of height `h`. Vertices are implicit and
/// enumerated in level order, lexicographically within each level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    height: usize,
    branching: u32,
    level_offsets: Vec<usize>,
    size: usize,
}

impl Tree {
    pub fn new(height: usize, branching: u32) -> Result<Self> {
        Self::with_limits(height, branching, &Limits::default())
    }

    pub fn with_limits(height: usize, branching: u32, limits: &Limits) -> Result<Self> {
        if branching == 0 {
            return Err(Error::param("tree branching must be at least 1"));
        }
        let count = tree_vertex_count(height, branching).ok_or(Error::SizeCeiling {
            what: "vertex count",
            requested: u128::MAX,
            limit: limits.max_vertices,
        })?;
        limits.check_vertices(count)?;
        let size = usize::try_from(count).map_err(|_| Error::SizeCeiling {
            what: "vertex count",
            requested: count,
            limit: usize::MAX as u128,
        })?;
        let mut level_offsets = Vec::with_capacity(height + 2);
        let mut off = 0usize;
        let mut width = 1usize;
        for _ in 0..=height {
            level_offsets.push(off);
            off += width;
            width = width.saturating_mul(branching as usize);
        }
        level_offsets.push(off);
        Ok(Tree {
            height,
            branching,
            level_offsets,
            size,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn branching(&self) -> u32 {
        self.branching
    }

    pub fn vertex_count(&self) -> usize {
        self.size
    }

    pub fn contains(&self, code: &TreeCode) -> bool {
        code.depth() <= self.height && code.labels().iter().all(|&l| l >= 1 && l <= self.branching)
    }

    /// Position of `code` in the level-order enumeration.
    pub fn index_of(&self, code: &TreeCode) -> Option<usize> {
        if !self.contains(code) {
            return None;
        }
        let b = self.branching as usize;
        let rank = code
            .labels()
            .iter()
            .fold(0usize, |acc, &l| acc * b + (l as usize - 1));
        Some(self.level_offsets[code.depth()] + rank)
    }

    pub fn code_at(&self, index: usize) -> Option<TreeCode> {
        if index >= self.size {
            return None;
        }
        let depth = self.level_offsets.partition_point(|&o| o <= index) - 1;
        let mut rank = index - self.level_offsets[depth];
        let b = self.branching as usize;
        let mut labels = vec![0u32; depth];
        for slot in labels.iter_mut().rev() {
            *slot = (rank % b) as u32 + 1;
            rank /= b;
        }
        Some(TreeCode(labels))
    }

    pub fn vertices(&self) -> impl Iterator<Item = TreeCode> + '_ {
        (0..self.size).map(|i| self.code_at(i).expect("index in range"))
    }

    pub fn leaves(&self) -> impl Iterator<Item = TreeCode> + '_ {
        (self.level_offsets[self.height]..self.size).map(|i| self.code_at(i).expect("index in range"))
    }

    pub fn children(&self, code: &TreeCode) -> impl Iterator<Item = TreeCode> + '_ {
        let count = if code.depth() < self.height { self.branching } else { 0 };
        let code = code.clone();
        (1..=count).map(move |l| code.child(l))
    }

    /// Number of vertical pairs: every vertex pairs with each strict ancestor.
    pub fn vertical_pair_count(&self) -> u128 {
        let mut total = 0u128;
        let mut width = 1u128;
        for depth in 0..=self.height as u128 {
            total += depth * width;
            width *= self.branching as u128;
        }
        total
    }

    /// All pairs `(m, n)` with `m` a strict ancestor of `n`, ordered by the
    /// level-order index of `m` and then of `n`.
    pub fn vertical_pairs(&self, limits: &Limits) -> Result<Vec<(TreeCode, TreeCode)>> {
        limits.check_pairs(self.vertical_pair_count())?;
        let mut pairs = Vec::with_capacity(self.vertical_pair_count() as usize);
        for m in self.vertices() {
            let mut frontier = vec![m.clone()];
            let mut below = Vec::new();
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for v in &frontier {
                    next.extend(self.children(v));
                }
                below.extend(next.iter().cloned());
                frontier = next;
            }
            below.sort_by_key(|n| self.index_of(n));
            pairs.extend(below.into_iter().map(|n| (m.clone(), n)));
        }
        Ok(pairs)
    }

    /// The tree as an st-graph rooted at `s = r`, with `t` the
    /// lexicographically first leaf. Edges point away from the root.
    pub fn to_graph(&self) -> Result<StGraph> {
        if self.height == 0 {
            return Err(Error::param("a tree of height 0 has no st structure"));
        }
        let vertices: Vec<VertexAddress> = self
            .vertices()
            .map(|c| VertexAddress::Plain(c.to_string()))
            .collect();
        let edges = (1..self.size)
            .map(|i| {
                let code = self.code_at(i).expect("in range");
                let parent = self.index_of(&code.parent().expect("non-root")).expect("in tree");
                (parent, i)
            })
            .collect();
        let t = self.level_offsets[self.height];
        StGraph::new(vertices, edges, 0, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(l: &[u32]) -> TreeCode {
        TreeCode::from_labels(l.to_vec())
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(Tree::new(2, 2).unwrap().vertex_count(), 7);
        assert_eq!(Tree::new(0, 5).unwrap().vertex_count(), 1);
        assert_eq!(Tree::new(3, 3).unwrap().vertex_count(), 40);
    }

    #[test]
    fn ceiling_guard() {
        let limits = Limits::parse("100").unwrap();
        assert!(matches!(
            Tree::with_limits(10, 10, &limits),
            Err(Error::SizeCeiling { .. })
        ));
        assert!(Tree::new(2, 0).is_err());
    }

    #[test]
    fn distances() {
        assert_eq!(tree_distance(&TreeCode::root(), &code(&[1, 2])), 2);
        assert_eq!(tree_distance(&code(&[1, 2]), &code(&[1, 3])), 2);
        assert_eq!(tree_distance(&code(&[1]), &code(&[1])), 0);
        assert_eq!(tree_distance(&code(&[2, 1, 1]), &code(&[1])), 4);
    }

    #[test]
    fn level_order_enumeration() {
        let t = Tree::new(2, 2).unwrap();
        let ids: Vec<String> = t.vertices().map(|c| c.to_string()).collect();
        assert_eq!(ids, ["r", "1", "2", "1.1", "1.2", "2.1", "2.2"]);
        for (i, c) in t.vertices().enumerate() {
            assert_eq!(t.index_of(&c), Some(i));
        }
        assert_eq!(t.index_of(&code(&[3])), None);
        assert_eq!(t.index_of(&code(&[1, 1, 1])), None);
    }

    #[test]
    fn vertical_pair_examples() {
        let limits = Limits::default();
        let t = Tree::new(1, 2).unwrap();
        let pairs = t.vertical_pairs(&limits).unwrap();
        assert_eq!(
            pairs,
            vec![(TreeCode::root(), code(&[1])), (TreeCode::root(), code(&[2]))]
        );
        assert_eq!(Tree::new(2, 2).unwrap().vertical_pairs(&limits).unwrap().len(), 10);
        assert_eq!(Tree::new(2, 1).unwrap().vertical_pairs(&limits).unwrap().len(), 3);
    }

    #[test]
    fn vertical_pairs_match_brute_force() {
        let t = Tree::new(3, 3).unwrap();
        let all: Vec<TreeCode> = t.vertices().collect();
        let mut brute = Vec::new();
        for m in &all {
            for n in &all {
                if m.is_strict_ancestor_of(n) {
                    brute.push((m.clone(), n.clone()));
                }
            }
        }
        assert_eq!(t.vertical_pairs(&Limits::default()).unwrap(), brute);
        assert_eq!(t.vertical_pair_count(), brute.len() as u128);
    }

    #[test]
    fn code_display_roundtrip() {
        for c in [TreeCode::root(), code(&[1]), code(&[3, 1, 2])] {
            assert_eq!(c.to_string().parse::<TreeCode>().unwrap(), c);
        }
        assert!("1.x".parse::<TreeCode>().is_err());
    }

    #[test]
    fn prefixes_are_valid_codes() {
        let t = Tree::new(3, 2).unwrap();
        for c in t.vertices() {
            for j in 0..=c.depth() {
                assert!(t.contains(&c.prefix(j)));
            }
        }
    }
}
