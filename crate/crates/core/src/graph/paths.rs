use super::stgraph::StGraph;

/// Simple directed `s -> t` paths in depth-first order, following out-edges
/// in insertion order, stopping after `limit` paths.
pub fn st_paths(graph: &StGraph, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    let mut on_path = vec![false; graph.vertex_count()];
    let mut path = vec![graph.s()];
    on_path[graph.s()] = true;
    // stack of next out-neighbour positions, parallel to `path`
    let mut cursor = vec![0usize];
    while let Some(&v) = path.last() {
        if v == graph.t() {
            out.push(path.clone());
            if out.len() >= limit {
                break;
            }
            on_path[v] = false;
            path.pop();
            cursor.pop();
            continue;
        }
        let pos = cursor.last_mut().expect("parallel stacks");
        match graph.out_neighbors(v).get(*pos) {
            Some(&w) => {
                *pos += 1;
                if !on_path[w] {
                    on_path[w] = true;
                    path.push(w);
                    cursor.push(0);
                }
            }
            None => {
                on_path[v] = false;
                path.pop();
                cursor.pop();
            }
        }
    }
    out
}

/// Number of `s -> t` paths in `D_n^k`: `P_0 = 1`, `P_n = k P_{n-1}^2`.
pub fn diamond_path_count(levels: u32, k: u32) -> Option<u128> {
    let mut p: u128 = 1;
    for _ in 0..levels {
        p = (k as u128).checked_mul(p.checked_mul(p)?)?;
    }
    Some(p)
}
