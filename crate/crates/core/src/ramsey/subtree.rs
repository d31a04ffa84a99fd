use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::coloring::{Color, Coloring};
use super::{Extraction, ExtractionFailure, LevelColor};
use crate::graph::{is_isomorphic, StGraph, Tree, TreeCode, VertexAddress};
use crate::{Error, Limits, Result};

/// A copy of `T_h^{b'}` inside `T_h^b`, given by the child labels chosen at
/// every selected internal vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubtreeSelection {
    pub height: usize,
    pub achieved_branching: u32,
    /// Vertex id (`r`, `3`, `3.7`, ...) to chosen child labels, ascending.
    pub selection: BTreeMap<String, Vec<u32>>,
    /// Colour of each level pair `(|m|, |n|)` on the selection.
    pub level_colors: Vec<LevelColor>,
    pub verified: bool,
}

/// Pigeonhole threshold `c^{h(h+1)/2} (b' - 1) + 1`, `None` on overflow.
pub fn subtree_threshold(height: usize, colors: Color, target: u32) -> Option<u128> {
    let pairs = (height * (height + 1) / 2) as u32;
    (colors as u128)
        .checked_pow(pairs)?
        .checked_mul(target.saturating_sub(1) as u128)?
        .checked_add(1)
}

fn child_labels(selection: &BTreeMap<String, Vec<u32>>, code: &TreeCode) -> Option<Vec<u32>> {
    selection.get(&code.to_string()).cloned()
}

impl SubtreeSelection {
    /// Selected vertices in level order.
    pub fn vertices(&self) -> Vec<TreeCode> {
        let mut out = vec![TreeCode::root()];
        let mut i = 0;
        while i < out.len() {
            let code = out[i].clone();
            if code.depth() < self.height {
                for l in child_labels(&self.selection, &code).unwrap_or_default() {
                    out.push(code.child(l));
                }
            }
            i += 1;
        }
        out
    }

    /// The leftmost selected root-leaf path, root first.
    pub fn first_path(&self) -> Vec<TreeCode> {
        let mut path = vec![TreeCode::root()];
        while path.len() <= self.height {
            let last = path.last().expect("non-empty");
            match child_labels(&self.selection, last).and_then(|l| l.first().copied()) {
                Some(l) => {
                    let next = last.child(l);
                    path.push(next);
                }
                None => break,
            }
        }
        path
    }

    /// Selected descendants of `code` at depth `depth`.
    pub fn descendants_at(&self, code: &TreeCode, depth: usize) -> Vec<TreeCode> {
        let mut frontier = vec![code.clone()];
        for _ in code.depth()..depth {
            frontier = frontier
                .iter()
                .flat_map(|c| {
                    child_labels(&self.selection, c)
                        .unwrap_or_default()
                        .into_iter()
                        .map(move |l| c.child(l))
                })
                .collect();
        }
        frontier
    }

    pub fn level_color(&self, upper: usize, lower: usize) -> Option<Color> {
        self.level_colors
            .iter()
            .find(|c| c.upper == upper && c.lower == lower)
            .map(|c| c.color)
    }

    /// The selected subtree as an st-graph on the parent's vertex ids, rooted
    /// at `r` with `t` the first selected leaf. Also returns, per vertex, its
    /// index in `tree`.
    pub fn to_graph(&self, tree: &Tree) -> Result<(StGraph, Vec<usize>)> {
        let vertices = self.vertices();
        let mut pos = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            pos.insert(v.clone(), i);
        }
        let parent_index = vertices
            .iter()
            .map(|v| {
                tree.index_of(v)
                    .ok_or_else(|| Error::Mismatch(format!("vertex {v} not in the tree")))
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = vertices
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, v)| (pos[&v.parent().expect("non-root")], i))
            .collect();
        let t = pos[self.first_path().last().expect("non-empty")];
        let graph = StGraph::new(
            vertices.iter().map(|v| VertexAddress::Plain(v.to_string())).collect(),
            edges,
            0,
            t,
        )?;
        Ok((graph, parent_index))
    }

    /// Whether the selection, rebuilt as a graph, is isomorphic to
    /// `T_h^{b'}`.
    pub fn is_isomorphic_to_model(&self, tree: &Tree) -> Result<bool> {
        let (graph, _) = self.to_graph(tree)?;
        let model = Tree::with_limits(self.height, self.achieved_branching, &Limits::default())?;
        Ok(is_isomorphic(&graph, &model.to_graph()?))
    }
}

/// Checks a selection directly: uniform branching `b'` down to the leaves,
/// labels inside `tree`, and every vertical pair colour a function of the two
/// levels alone. Returns the level colours.
pub fn verify_subtree(
    tree: &Tree,
    coloring: &impl Coloring,
    selection: &SubtreeSelection,
) -> Result<Vec<LevelColor>> {
    if selection.height != tree.height() {
        return Err(Error::Mismatch("selection height differs from the tree".into()));
    }
    let bp = selection.achieved_branching as usize;
    let mut seen = BTreeMap::<(usize, usize), Color>::new();
    let mut stack = vec![(TreeCode::root(), vec![0usize])];
    let mut visited = 0usize;
    while let Some((code, ancestry)) = stack.pop() {
        visited += 1;
        let labels = child_labels(&selection.selection, &code);
        if code.depth() == tree.height() {
            if labels.is_some() {
                return Err(Error::Mismatch(format!("leaf {code} has chosen children")));
            }
            continue;
        }
        let labels =
            labels.ok_or_else(|| Error::Mismatch(format!("internal vertex {code} has no choice")))?;
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != bp || labels.len() != bp {
            return Err(Error::Mismatch(format!(
                "vertex {code} has {} distinct chosen children, expected {bp}",
                sorted.len()
            )));
        }
        for l in sorted {
            let child = code.child(l);
            let ci = tree
                .index_of(&child)
                .ok_or_else(|| Error::Mismatch(format!("vertex {child} not in the tree")))?;
            for (upper, &ai) in ancestry.iter().enumerate() {
                let c = coloring
                    .color(ai, ci)
                    .ok_or_else(|| Error::param(format!("pair ({ai}, {ci}) is not coloured")))?;
                let key = (upper, child.depth());
                match seen.get(&key) {
                    Some(&prev) if prev != c => {
                        return Err(Error::Mismatch(format!(
                            "levels {key:?}: colour {c} at {child} differs from {prev}"
                        )))
                    }
                    _ => {
                        seen.insert(key, c);
                    }
                }
            }
            let mut next = ancestry.clone();
            next.push(ci);
            stack.push((child, next));
        }
    }
    let expected: usize = (0..=tree.height()).map(|d| bp.pow(d as u32)).sum();
    if visited != expected || selection.selection.len() != expected - bp.pow(tree.height() as u32)
    {
        return Err(Error::Mismatch("selection contains unreachable entries".into()));
    }
    Ok(seen
        .into_iter()
        .map(|((upper, lower), color)| LevelColor {
            upper,
            lower,
            color,
        })
        .collect())
}

struct Found {
    kind: Vec<Color>,
    selection: BTreeMap<String, Vec<u32>>,
}

struct Search<'a, C> {
    tree: &'a Tree,
    coloring: &'a C,
    target: u32,
    blocking: Option<TreeCode>,
}

impl<C: Coloring> Search<'_, C> {
    fn color(&self, a: usize, b: usize) -> Result<Color> {
        self.coloring
            .color(a, b)
            .ok_or_else(|| Error::param(format!("pair ({a}, {b}) is not coloured")))
    }

    /// Selects `target` children of `code` whose subtrees carry identical
    /// colour vectors. Children are typed by the colours from every ancestor
    /// (and `code`) to the child, followed by the type of the child's own
    /// selection. The first type to collect `target` children wins.
    fn run(&mut self, code: &TreeCode, ancestry: &mut Vec<usize>) -> Result<Option<Found>> {
        if code.depth() == self.tree.height() {
            return Ok(Some(Found {
                kind: Vec::new(),
                selection: BTreeMap::new(),
            }));
        }
        let mut groups: Vec<(Vec<Color>, Vec<(u32, Found)>)> = Vec::new();
        for label in 1..=self.tree.branching() {
            let child = code.child(label);
            let ci = self.tree.index_of(&child).expect("label in range");
            let mut kind = ancestry
                .iter()
                .map(|&a| self.color(a, ci))
                .collect::<Result<Vec<_>>>()?;
            ancestry.push(ci);
            let sub = self.run(&child, ancestry)?;
            ancestry.pop();
            let Some(sub) = sub else { continue };
            kind.extend_from_slice(&sub.kind);
            let slot = match groups.iter().position(|(k, _)| *k == kind) {
                Some(i) => i,
                None => {
                    groups.push((kind, Vec::new()));
                    groups.len() - 1
                }
            };
            groups[slot].1.push((label, sub));
            if groups[slot].1.len() == self.target as usize {
                let (kind, members) = groups.swap_remove(slot);
                let mut selection = BTreeMap::new();
                let mut labels = Vec::with_capacity(members.len());
                for (l, f) in members {
                    labels.push(l);
                    selection.extend(f.selection);
                }
                selection.insert(code.to_string(), labels);
                return Ok(Some(Found { kind, selection }));
            }
        }
        if self.blocking.is_none() {
            self.blocking = Some(code.clone());
        }
        Ok(None)
    }
}

fn search(tree: &Tree, coloring: &impl Coloring, target: u32) -> Result<(Option<Found>, Option<TreeCode>)> {
    let mut s = Search {
        tree,
        coloring,
        target,
        blocking: None,
    };
    let found = s.run(&TreeCode::root(), &mut vec![tree.index_of(&TreeCode::root()).expect("root")])?;
    Ok((found, s.blocking))
}

/// Finds a horizontally monochromatic copy of `T_h^{b'}` in `tree` by
/// bottom-up pigeonhole on colour vectors. Success is guaranteed once
/// `b >= c^{h(h+1)/2} (b' - 1) + 1`. The coloring is keyed by level-order
/// vertex indices of `tree`. On failure the largest achievable `b'` is
/// searched for and reported.
pub fn extract_monochromatic_subtree(
    tree: &Tree,
    coloring: &impl Coloring,
    target: u32,
) -> Result<Extraction<SubtreeSelection>> {
    if target == 0 {
        return Err(Error::param("target branching must be at least 1"));
    }
    if tree.height() == 0 {
        return Err(Error::param("tree height must be at least 1"));
    }
    if target > tree.branching() {
        return Ok(Extraction::Failed(ExtractionFailure {
            target,
            achieved: tree.branching(),
            blocking: TreeCode::root().to_string(),
        }));
    }
    let (found, blocking) = search(tree, coloring, target)?;
    match found {
        Some(f) => {
            let mut sel = SubtreeSelection {
                height: tree.height(),
                achieved_branching: target,
                selection: f.selection,
                level_colors: Vec::new(),
                verified: false,
            };
            sel.level_colors = verify_subtree(tree, coloring, &sel)?;
            sel.verified = true;
            Ok(Extraction::Found(sel))
        }
        None => {
            let mut achieved = 0;
            for b in (1..target).rev() {
                if search(tree, coloring, b)?.0.is_some() {
                    achieved = b;
                    break;
                }
            }
            Ok(Extraction::Failed(ExtractionFailure {
                target,
                achieved,
                blocking: blocking.map(|c| c.to_string()).unwrap_or_default(),
            }))
        }
    }
}
