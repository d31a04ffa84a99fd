use std::collections::BTreeMap;

use super::stgraph::StGraph;

/// Stable colour refinement run on both graphs at once so that colour ids
/// are comparable across them. `s` and `t` start in their own classes.
fn refine(a: &StGraph, b: &StGraph) -> (Vec<usize>, Vec<usize>) {
    let graphs = [a, b];
    let mut colors: Vec<Vec<usize>> = graphs
        .iter()
        .map(|g| {
            (0..g.vertex_count())
                .map(|v| {
                    let role = if v == g.s() {
                        1
                    } else if v == g.t() {
                        2
                    } else {
                        0
                    };
                    g.neighbors(v).len() * 3 + role
                })
                .collect()
        })
        .collect();
    let mut classes = usize::MAX;
    loop {
        let mut table: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let signatures: Vec<Vec<(usize, Vec<usize>)>> = graphs
            .iter()
            .zip(&colors)
            .map(|(g, col)| {
                (0..g.vertex_count())
                    .map(|v| {
                        let mut around: Vec<usize> =
                            g.neighbors(v).iter().map(|&w| col[w]).collect();
                        around.sort_unstable();
                        (col[v], around)
                    })
                    .collect()
            })
            .collect();
        for sig in signatures.iter().flatten() {
            let next = table.len();
            table.entry(sig.clone()).or_insert(next);
        }
        colors = signatures
            .iter()
            .map(|sigs| sigs.iter().map(|s| table[s]).collect())
            .collect();
        if table.len() == classes {
            break;
        }
        classes = table.len();
    }
    let b_colors = colors.pop().expect("two graphs");
    let a_colors = colors.pop().expect("two graphs");
    (a_colors, b_colors)
}

fn dfs_order(g: &StGraph) -> Vec<usize> {
    let mut seen = vec![false; g.vertex_count()];
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut stack = vec![g.s()];
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        order.push(v);
        for &w in g.neighbors(v).iter().rev() {
            if !seen[w] {
                stack.push(w);
            }
        }
    }
    order
}

/// Decides whether there is an isomorphism of the underlying undirected
/// graphs that sends `s` to `s` and `t` to `t`.
pub fn is_isomorphic(a: &StGraph, b: &StGraph) -> bool {
    find_isomorphism(a, b).is_some()
}

/// An `s`/`t`-preserving isomorphism `a -> b` as a vertex map, if one exists.
pub fn find_isomorphism(a: &StGraph, b: &StGraph) -> Option<Vec<usize>> {
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let (ca, cb) = refine(a, b);
    let mut hist_a = ca.clone();
    let mut hist_b = cb.clone();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return None;
    }
    let order = dfs_order(a);
    let mut map = vec![usize::MAX; a.vertex_count()];
    let mut used = vec![false; b.vertex_count()];
    if extend(a, b, &ca, &cb, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    a: &StGraph,
    b: &StGraph,
    ca: &[usize],
    cb: &[usize],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    let mapped: Vec<usize> = a
        .neighbors(v)
        .iter()
        .filter(|&&w| map[w] != usize::MAX)
        .map(|&w| map[w])
        .collect();
    let candidates: Vec<usize> = if v == a.s() {
        vec![b.s()]
    } else if v == a.t() {
        vec![b.t()]
    } else if let Some(&anchor) = mapped.first() {
        b.neighbors(anchor).to_vec()
    } else {
        (0..b.vertex_count()).collect()
    };
    for c in candidates {
        if used[c] || ca[v] != cb[c] || !mapped.iter().all(|&m| b.has_edge(m, c)) {
            continue;
        }
        map[v] = c;
        used[c] = true;
        if extend(a, b, ca, cb, order, depth + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[c] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{slash_product, Diamond, Tree};
    use crate::Limits;

    #[test]
    fn diamonds_distinguished_by_branching() {
        let a = Diamond::new(2, 2).unwrap();
        let b = Diamond::new(2, 2).unwrap();
        let c = Diamond::new(2, 3).unwrap();
        assert!(is_isomorphic(a.graph(), b.graph()));
        assert!(!is_isomorphic(a.graph(), c.graph()));
    }

    #[test]
    fn map_is_an_isomorphism() {
        let d = StGraph::base_diamond(2).unwrap();
        let limits = Limits::default();
        let left = slash_product(&slash_product(&d, &d, &limits).unwrap(), &d, &limits).unwrap();
        let right = Diamond::new(3, 2).unwrap();
        let map = find_isomorphism(&left, right.graph()).unwrap();
        for &(u, v) in left.edges() {
            assert!(right.graph().has_edge(map[u], map[v]));
        }
    }

    #[test]
    fn trees() {
        let a = Tree::new(3, 2).unwrap().to_graph().unwrap();
        let b = Tree::new(3, 2).unwrap().to_graph().unwrap();
        assert!(is_isomorphic(&a, &b));
        let c = Tree::new(2, 3).unwrap().to_graph().unwrap();
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn roles_matter() {
        let ends = StGraph::path(2).unwrap();
        let middle = StGraph::new(ends.vertices().to_vec(), vec![(1, 0), (1, 2)], 1, 2).unwrap();
        assert!(!is_isomorphic(&ends, &middle));
    }
}
