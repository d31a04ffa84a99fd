use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::coloring::{Color, Coloring};
use super::{Extraction, ExtractionFailure};
use crate::graph::{is_isomorphic, Diamond, ScaledDiamondRef, StGraph};
use crate::{Error, Limits, Result};

/// Branches kept in one scaled copy of `D_1^k`, with the copy's colours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyChoice {
    pub scale: u32,
    /// Midpoint labels `j` of `x_j`, ascending.
    pub midpoints: Vec<u32>,
    pub color_st: Color,
    pub color_sx: Color,
    pub color_xt: Color,
}

/// A copy of `D_n^{k'}` inside `D_n^k`: for every selected scaled copy of
/// `D_1^k`, the midpoints kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdiamondSelection {
    pub levels: u32,
    pub achieved_branching: u32,
    /// Edge path (`root`, `3`, `3.0`, ...) to the choice made in that copy.
    pub copies: BTreeMap<String, CopyChoice>,
    pub verified: bool,
}

/// Pigeonhole threshold `c^2 (k' - 1) + 1`.
pub fn subdiamond_threshold(colors: Color, target: u32) -> Option<u128> {
    (colors as u128)
        .checked_pow(2)?
        .checked_mul(target.saturating_sub(1) as u128)?
        .checked_add(1)
}

pub(crate) fn path_key(path: &[usize]) -> String {
    if path.is_empty() {
        return "root".into();
    }
    path.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(".")
}

fn pair_color(c: &impl Coloring, a: usize, b: usize) -> Result<Color> {
    c.color(a, b)
        .ok_or_else(|| Error::param(format!("pair ({a}, {b}) is not coloured")))
}

/// Edge paths of the copies one scale down that sit on the kept branches.
fn child_paths(path: &[usize], midpoints: &[u32]) -> Vec<Vec<usize>> {
    midpoints
        .iter()
        .flat_map(|&j| {
            let e = 2 * (j as usize - 1);
            [e, e + 1].map(|edge| {
                let mut p = path.to_vec();
                p.push(edge);
                p
            })
        })
        .collect()
}

impl SubdiamondSelection {
    /// Selected copies at a scale, with their locations in `diamond`.
    pub fn copies_at(&self, diamond: &Diamond, scale: u32) -> Result<Vec<(ScaledDiamondRef, CopyChoice)>> {
        let mut frontier = vec![Vec::new()];
        for s in (scale + 1..self.levels).rev() {
            frontier = frontier
                .iter()
                .map(|p: &Vec<usize>| {
                    let choice = self
                        .copies
                        .get(&path_key(p))
                        .ok_or_else(|| Error::Mismatch(format!("no choice at scale {s}")))?;
                    Ok(child_paths(p, &choice.midpoints))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
        }
        frontier
            .iter()
            .map(|p| {
                let choice = self
                    .copies
                    .get(&path_key(p))
                    .ok_or_else(|| Error::Mismatch(format!("no choice at {}", path_key(p))))?;
                Ok((diamond.locate(scale, p)?, choice.clone()))
            })
            .collect()
    }

    /// The st-path through the first kept branch of every copy it meets, as
    /// vertex indices of `diamond`, `2^n + 1` of them.
    pub fn first_st_path(&self, diamond: &Diamond) -> Result<Vec<usize>> {
        fn walk(
            sel: &SubdiamondSelection,
            d: &Diamond,
            path: &mut Vec<usize>,
            scale: u32,
            out: &mut Vec<usize>,
        ) -> Result<()> {
            let copy = d.locate(scale, path)?;
            let choice = sel
                .copies
                .get(&path_key(path))
                .ok_or_else(|| Error::Mismatch(format!("no choice at {}", path_key(path))))?;
            let j = *choice
                .midpoints
                .first()
                .ok_or_else(|| Error::Mismatch("empty choice".into()))? as usize;
            if scale == 0 {
                if out.is_empty() {
                    out.push(copy.s);
                }
                out.push(copy.midpoints[j - 1]);
                out.push(copy.t);
                return Ok(());
            }
            for edge in [2 * (j - 1), 2 * (j - 1) + 1] {
                path.push(edge);
                walk(sel, d, path, scale - 1, out)?;
                path.pop();
            }
            Ok(())
        }
        let mut out = Vec::new();
        walk(self, diamond, &mut Vec::new(), self.levels - 1, &mut out)?;
        Ok(out)
    }

    /// The selected sub-diamond as an st-graph on the parent's addresses,
    /// plus the parent index of each of its vertices.
    pub fn to_graph(&self, diamond: &Diamond) -> Result<(StGraph, Vec<usize>)> {
        let parent = diamond.graph();
        let mut keep = BTreeSet::new();
        let mut edges = Vec::new();
        for (copy, choice) in self.copies_at(diamond, 0)? {
            keep.insert(copy.s);
            keep.insert(copy.t);
            for &j in &choice.midpoints {
                let x = copy.midpoints[j as usize - 1];
                keep.insert(x);
                edges.push((copy.s, x));
                edges.push((x, copy.t));
            }
        }
        let index: Vec<usize> = keep.into_iter().collect();
        let local = |v: usize| index.binary_search(&v).expect("kept");
        let graph = StGraph::new(
            index.iter().map(|&v| parent.address(v).clone()).collect(),
            edges.into_iter().map(|(a, b)| (local(a), local(b))).collect(),
            local(parent.s()),
            local(parent.t()),
        )?;
        Ok((graph, index))
    }

    pub fn is_isomorphic_to_model(&self, diamond: &Diamond) -> Result<bool> {
        let (graph, _) = self.to_graph(diamond)?;
        let model = Diamond::with_limits(self.levels, self.achieved_branching, &Limits::default())?;
        Ok(is_isomorphic(&graph, model.graph()))
    }
}

/// Checks a selection directly against the diamond and the colouring: each
/// reachable copy keeps `k'` distinct midpoints, the kept branches agree on
/// `(s, x)` and on `(x, t)` colours, the recorded colours are the real ones,
/// and no unreachable copies are listed.
pub fn verify_subdiamond(
    diamond: &Diamond,
    coloring: &impl Coloring,
    selection: &SubdiamondSelection,
) -> Result<()> {
    if selection.levels != diamond.levels() || diamond.levels() == 0 {
        return Err(Error::Mismatch("selection levels differ from the diamond".into()));
    }
    let kp = selection.achieved_branching as usize;
    let mut reached = 0usize;
    let mut stack = vec![(Vec::<usize>::new(), diamond.levels() - 1)];
    while let Some((path, scale)) = stack.pop() {
        reached += 1;
        let key = path_key(&path);
        let choice = selection
            .copies
            .get(&key)
            .ok_or_else(|| Error::Mismatch(format!("copy {key} has no choice")))?;
        if choice.scale != scale {
            return Err(Error::Mismatch(format!("copy {key} records the wrong scale")));
        }
        let copy = diamond.locate(scale, &path)?;
        let distinct: BTreeSet<u32> = choice.midpoints.iter().copied().collect();
        if distinct.len() != kp
            || choice.midpoints.len() != kp
            || distinct.iter().any(|&j| j == 0 || j > diamond.branching())
        {
            return Err(Error::Mismatch(format!("copy {key} keeps the wrong midpoints")));
        }
        if pair_color(coloring, copy.s, copy.t)? != choice.color_st {
            return Err(Error::Mismatch(format!("copy {key}: (s, t) colour differs")));
        }
        for &j in &distinct {
            let x = copy.midpoints[j as usize - 1];
            if pair_color(coloring, copy.s, x)? != choice.color_sx
                || pair_color(coloring, x, copy.t)? != choice.color_xt
            {
                return Err(Error::Mismatch(format!("copy {key}: branch x{j} is off colour")));
            }
        }
        if scale > 0 {
            for p in child_paths(&path, &choice.midpoints) {
                stack.push((p, scale - 1));
            }
        }
    }
    if reached != selection.copies.len() {
        return Err(Error::Mismatch("selection lists unreachable copies".into()));
    }
    Ok(())
}

fn search(
    diamond: &Diamond,
    coloring: &impl Coloring,
    target: u32,
) -> Result<std::result::Result<BTreeMap<String, CopyChoice>, String>> {
    let mut copies = BTreeMap::new();
    let mut stack = vec![(Vec::<usize>::new(), diamond.levels() - 1)];
    // largest scale first, then down through the kept branches
    while let Some((path, scale)) = stack.pop() {
        let copy = diamond.locate(scale, &path)?;
        let mut groups: Vec<((Color, Color), Vec<u32>)> = Vec::new();
        let mut chosen = None;
        for (j, &x) in copy.midpoints.iter().enumerate() {
            let v = (pair_color(coloring, copy.s, x)?, pair_color(coloring, x, copy.t)?);
            let slot = match groups.iter().position(|(g, _)| *g == v) {
                Some(i) => i,
                None => {
                    groups.push((v, Vec::new()));
                    groups.len() - 1
                }
            };
            groups[slot].1.push(j as u32 + 1);
            if groups[slot].1.len() == target as usize {
                chosen = Some(groups.swap_remove(slot));
                break;
            }
        }
        let Some(((color_sx, color_xt), midpoints)) = chosen else {
            return Ok(Err(path_key(&path)));
        };
        if scale > 0 {
            for p in child_paths(&path, &midpoints).into_iter().rev() {
                stack.push((p, scale - 1));
            }
        }
        copies.insert(
            path_key(&path),
            CopyChoice {
                scale,
                midpoints,
                color_st: pair_color(coloring, copy.s, copy.t)?,
                color_sx,
                color_xt,
            },
        );
    }
    Ok(Ok(copies))
}

/// Keeps, in every scaled copy of `D_1^k` from the largest scale down, `k'`
/// branches with a common colour vector `(chi(s, x), chi(x, t))`. Success is
/// guaranteed once `k >= c^2 (k' - 1) + 1`.
pub fn extract_monochromatic_subdiamond(
    diamond: &Diamond,
    coloring: &impl Coloring,
    target: u32,
) -> Result<Extraction<SubdiamondSelection>> {
    if target == 0 {
        return Err(Error::param("target branching must be at least 1"));
    }
    if diamond.levels() == 0 {
        return Err(Error::param("diamond must have at least one level"));
    }
    if target > diamond.branching() {
        return Ok(Extraction::Failed(ExtractionFailure {
            target,
            achieved: diamond.branching(),
            blocking: "root".into(),
        }));
    }
    match search(diamond, coloring, target)? {
        Ok(copies) => {
            let mut sel = SubdiamondSelection {
                levels: diamond.levels(),
                achieved_branching: target,
                copies,
                verified: false,
            };
            verify_subdiamond(diamond, coloring, &sel)?;
            sel.verified = true;
            Ok(Extraction::Found(sel))
        }
        Err(blocking) => {
            let mut achieved = 0;
            for k in (1..target).rev() {
                if search(diamond, coloring, k)?.is_ok() {
                    achieved = k;
                    break;
                }
            }
            Ok(Extraction::Failed(ExtractionFailure {
                target,
                achieved,
                blocking,
            }))
        }
    }
}
