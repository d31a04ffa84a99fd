//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use umbelkit::certifier::{certify_diamond, certify_tree, replay_certificate, CertifierConfig, Verdict};
use umbelkit::embedder::{CompressionProfile, TreeEmbedding};
use umbelkit::graph::{tree_distance, Diamond, StGraph, Tree, TreeCode};
use umbelkit::lemmas::{
    check_diamond, check_umbel, diamond_lemma_bound, minimal_diamond_epsilon, minimal_umbel_delta,
    path_lemma_extract, ratio_bound, refined_ratio_bound, sequence_stable_index, taylor_step,
    umbel_lemma_bound, PathMode,
};
use umbelkit::metric::{
    diamond_inequality_residual, infrasup_umbel_residual, lp_distance, EmbeddingTable, Norm, PointSet,
    SpaceParams, SparsePoint,
};
use umbelkit::ramsey::{
    extract_monochromatic_subdiamond, extract_monochromatic_subtree, verify_subdiamond, verify_subtree,
    Color, Extraction, FnColoring,
};
use umbelkit::Limits;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// BFS over the undirected edge list, written independently of the library.
fn bfs(graph: &StGraph, source: usize) -> Vec<u32> {
    let n = graph.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in graph.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![u32::MAX; n];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// `l_p` distance from the coordinate lists.
fn own_distance(x: &SparsePoint, y: &SparsePoint, p: f64) -> f64 {
    let mut diff: BTreeMap<_, f64> = BTreeMap::new();
    for (k, v) in x.iter() {
        *diff.entry(k).or_default() += v;
    }
    for (k, v) in y.iter() {
        *diff.entry(k).or_default() -= v;
    }
    if p.is_infinite() {
        return diff.values().fold(0.0, |m, v| m.max(v.abs()));
    }
    diff.values().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn tree_graph_distance(x: &TreeCode, y: &TreeCode) -> usize {
    let (a, b) = (x.labels(), y.labels());
    let common = a.iter().zip(b).take_while(|(u, v)| u == v).count();
    a.len() + b.len() - 2 * common
}

fn criterion_1() -> Outcome {
    let mut pairs = 0u64;
    // height 0 is a lone root and has no graph form
    let root = Tree::new(0, 1).map_err(|e| e.to_string())?;
    for x in root.vertices() {
        ensure(tree_distance(&x, &x) == 0, || "T_0: d(r, r) != 0".into())?;
        pairs += 1;
    }
    for h in 1..=4 {
        for b in 1..=3 {
            let tree = Tree::new(h, b).map_err(|e| e.to_string())?;
            let graph = tree.to_graph().map_err(|e| e.to_string())?;
            let codes: Vec<TreeCode> = tree.vertices().collect();
            for x in &codes {
                let gi = graph.index_of_id(&x.to_string()).ok_or("code missing from graph")?;
                let dist = bfs(&graph, gi);
                for y in &codes {
                    let gj = graph.index_of_id(&y.to_string()).ok_or("code missing from graph")?;
                    ensure(tree_distance(x, y) as u32 == dist[gj], || {
                        format!("T_{h}^{b}: d({x},{y}) = {} but BFS gives {}", tree_distance(x, y), dist[gj])
                    })?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} ordered pairs"))
}

/// Every simple s-t path in the undirected graph, by DFS.
fn simple_path_lengths(graph: &StGraph) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in graph.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    fn dfs(adj: &[Vec<usize>], u: usize, t: usize, seen: &mut Vec<bool>, depth: usize, out: &mut Vec<usize>) {
        if u == t {
            out.push(depth);
            return;
        }
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                dfs(adj, v, t, seen, depth + 1, out);
                seen[v] = false;
            }
        }
    }
    let mut seen = vec![false; n];
    seen[graph.s()] = true;
    let mut out = Vec::new();
    dfs(&adj, graph.s(), graph.t(), &mut seen, 0, &mut out);
    out
}

fn criterion_2() -> Outcome {
    let mut paths = 0usize;
    for n in 1..=3u32 {
        for k in 1..=3u32 {
            let d = Diamond::new(n, k).map_err(|e| e.to_string())?;
            let g = d.graph();
            let st = bfs(g, g.s())[g.t()];
            ensure(st == 1 << n, || format!("D_{n}^{k}: d(s,t) = {st}"))?;
            let edges = g.edges().len();
            ensure(edges == (2 * k as usize).pow(n), || format!("D_{n}^{k}: {edges} edges"))?;
            let lengths = simple_path_lengths(g);
            ensure(lengths.iter().all(|&l| l == 1 << n), || {
                format!("D_{n}^{k}: a simple st-path has length other than 2^{n}")
            })?;
            // k * (paths of D_{n-1})^2 by the recursive structure
            let expected = (0..n).fold(1usize, |acc, _| k as usize * acc * acc);
            ensure(lengths.len() == expected, || {
                format!("D_{n}^{k}: {} simple st-paths, expected {expected}", lengths.len())
            })?;
            paths += lengths.len();
        }
    }
    Ok(format!("{paths} simple st-paths enumerated"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut refined = 0;
    for trial in 0..10_000 {
        let k: f64 = rng.gen_range(1.0..=4.0);
        let p: f64 = rng.gen_range(1.0..=4.0);
        let len = rng.gen_range(2..=64);
        let mut seq: Vec<f64> = (0..len).map(|_| rng.gen_range(1.0..=k)).collect();
        seq.sort_by(|a, b| b.total_cmp(a));
        if trial % 7 == 0 {
            // plateaus exercise ties
            for v in seq.iter_mut().skip(len / 2) {
                *v = 1.0;
            }
        }
        let i = sequence_stable_index(&seq, k).map_err(|e| e.to_string())?;
        let n = (len - 1) as f64;
        let ratio = seq[i] / seq[i + 1];
        let bound = 1.0 + k / (n * seq[i + 1]);
        ensure(ratio <= bound, || format!("trial {trial}: ratio {ratio} exceeds {bound}"))?;
        ensure(ratio_bound(&seq, k, i) == bound, || format!("trial {trial}: ratio_bound disagrees"))?;
        if n >= k.powf(p) {
            let fine = 1.0 + 1.0 / seq[i + 1].powf(p);
            ensure(ratio <= fine, || format!("trial {trial}: ratio {ratio} exceeds refined {fine}"))?;
            ensure(refined_ratio_bound(&seq, p, i) == fine, || format!("trial {trial}: refined bound disagrees"))?;
            refined += 1;
        }
    }
    Ok(format!("10000 sequences, {refined} in the refined regime"))
}

/// A `(1, K)`-bi-Lipschitz path in `l_2^5`: every step has first coordinate
/// in `[1, K]` and Euclidean length at most `K`.
fn random_path(rng: &mut ChaCha8Rng, n: usize, k: f64) -> PointSet {
    let mut cur = [0.0f64; 5];
    let mut points = vec![SparsePoint::from_dense(&cur)];
    for _ in 0..n {
        let u = rng.gen_range(1.0..=k);
        let room = (k * k - u * u).max(0.0).sqrt() * rng.gen_range(0.0..1.0);
        let mut dir: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        for v in &mut dir {
            *v *= room / norm;
        }
        cur[0] += u;
        for j in 0..4 {
            cur[j + 1] += dir[j];
        }
        points.push(SparsePoint::from_dense(&cur));
    }
    PointSet::new(Norm::P(2.0), points)
}

fn criterion_4() -> Outcome {
    let sizes = [16usize, 64, 256];
    (0..1000u64).into_par_iter().try_for_each(|trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(4_000 + trial);
        let n = sizes[trial as usize % 3];
        let k: f64 = rng.gen_range(1.0..=2.0);
        let space = random_path(&mut rng, n, k);
        let path: Vec<usize> = (0..=n).collect();
        for mode in [PathMode::Standard, PathMode::Grid] {
            let w = path_lemma_extract(&space, &path, 1.0, k, mode, None).map_err(|e| e.to_string())?;
            let i = w.scale as usize;
            let span = 1usize << (i + 1);
            // L_{i+1} from scratch
            let l_next = (0..=n - span)
                .filter(|v| mode == PathMode::Standard || v % span == 0)
                .map(|v| lp_distance(&space.points[v], &space.points[v + span], space.norm) / span as f64)
                .fold(0.0f64, f64::max);
            ensure((w.l_next - l_next).abs() <= 1e-12 * l_next, || format!("trial {trial}: L_(i+1) mismatch"))?;
            let m = (usize::BITS - 1 - n.leading_zeros()) as f64;
            let b = k / (m * l_next);
            let [z0, z1, z2] = w.z;
            ensure(z2 - z0 == span && z1 - z0 == span / 2, || format!("trial {trial}: Z is not 2^i-spaced"))?;
            if mode == PathMode::Grid {
                ensure(z0 % span == 0 && z2 % span == 0, || format!("trial {trial}: z_0, z_2 outside A_(i+1)"))?;
            }
            for (x, y) in [(z0, z1), (z1, z2), (z0, z2)] {
                let d = lp_distance(&space.points[x], &space.points[y], space.norm);
                let gap = (y - x) as f64;
                let lo = l_next * (1.0 - b) * gap;
                let hi = l_next * (1.0 + b) * gap;
                ensure(d >= lo - 1e-9 && d <= hi + 1e-9, || {
                    format!("trial {trial}: d({x},{y}) = {d} outside [{lo}, {hi}]")
                })?;
            }
        }
        Ok::<(), String>(())
    })?;
    Ok("1000 paths, standard and grid modes".into())
}

/// `(f(0)^p + sum_{i>=1} f(i)^p / i^{p+1})^{1/p}` for `f(t) = (1+t)^{1/4}`,
/// summed to `N` terms plus an integral bound on the tail.
fn lipschitz_ceiling(p: f64) -> f64 {
    const N: u32 = 1_000_000;
    let f = |t: f64| (1.0 + t).powf(0.25);
    let mut sum = f(0.0).powf(p);
    for i in 1..=N {
        let i = f64::from(i);
        sum += f(i).powf(p) / i.powf(p + 1.0);
    }
    // f(t)^p <= (2t)^{p/4} for t >= 1
    let e = p - p / 4.0;
    let tail = 2f64.powf(p / 4.0) * f64::from(N).powf(-e) / e;
    (sum + tail).powf(1.0 / p)
}

fn criterion_5() -> Outcome {
    let mut pairs = 0u64;
    let mut worst_lip = 0.0f64;
    for p in [1.0, 2.0, 3.0] {
        let ceiling = lipschitz_ceiling(p);
        let f = |t: f64| (1.0 + t).powf(0.25);
        let constant = 12.0 * 6f64.powf(1.0 / p);
        for h in 1..=6 {
            for b in 1..=4u32 {
                let tree = Tree::new(h, b).map_err(|e| e.to_string())?;
                let profile = CompressionProfile::power(1.0, 0.25, p).map_err(|e| e.to_string())?;
                let emb = TreeEmbedding::new(tree.clone(), profile).map_err(|e| e.to_string())?;
                let codes: Vec<TreeCode> = tree.vertices().collect();
                let points = emb.points();
                let index: BTreeMap<&TreeCode, usize> = codes.iter().enumerate().map(|(i, c)| (c, i)).collect();
                // (a) edges
                for (i, c) in codes.iter().enumerate().skip(1) {
                    let parent = index[&c.parent().expect("non-root")];
                    let d = own_distance(&points[i], &points[parent], p);
                    worst_lip = worst_lip.max(d / ceiling);
                    ensure(d <= ceiling + 1e-9, || format!("p={p} h={h} b={b}: edge ({c}) stretched to {d} > {ceiling}"))?;
                }
                // (b) and (c) over all pairs
                let checked = (0..codes.len())
                    .into_par_iter()
                    .map(|a| -> Result<u64, String> {
                        let mut count = 0;
                        for bb in a + 1..codes.len() {
                            let dt = tree_graph_distance(&codes[a], &codes[bb]);
                            let d = lp_distance(&points[a], &points[bb], Norm::P(p));
                            if h <= 5 && b <= 3 && (a + bb) % 7 == 0 {
                                let own = own_distance(&points[a], &points[bb], p);
                                ensure((own - d).abs() <= 1e-12 * own.max(1.0), || format!("vector distance mismatch at {}, {}", codes[a], codes[bb]))?;
                            }
                            let exact = emb.exact_pair_distance(&codes[a], &codes[bb]);
                            ensure((exact - d).abs() <= 1e-12 * d.max(1.0), || {
                                format!("p={p}: exact_pair_distance({}, {}) = {exact} vs {d}", codes[a], codes[bb])
                            })?;
                            if dt >= 3 {
                                let bound = f(dt as f64 / 8.0) / constant;
                                ensure(d >= bound, || {
                                    format!("p={p} h={h} b={b}: ({}, {}) at distance {dt} maps to {d} < {bound}", codes[a], codes[bb])
                                })?;
                                count += 1;
                            }
                        }
                        Ok(count)
                    })
                    .try_reduce(|| 0, |x, y| Ok(x + y))?;
                pairs += checked;
            }
        }
    }
    Ok(format!("{pairs} pairs at distance >= 3, largest edge stretch {worst_lip:.4} of the ceiling"))
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    v.into_iter().map(|x| x / n).collect()
}

/// Near-geodesic configuration: anchors at `+-e_1` or `e_1, 0`, tips near
/// `-e_1` or `0` displaced orthogonally.
fn configuration(rng: &mut ChaCha8Rng, diamond: bool, tips: usize) -> Vec<SparsePoint> {
    let dim = 4;
    let r: f64 = rng.gen_range(0.0..0.6);
    let jitter: f64 = rng.gen_range(0.0..0.05);
    let mut pts = Vec::new();
    let mut push = |base: Vec<f64>, rng: &mut ChaCha8Rng| {
        let noise = random_unit(rng, dim);
        let v: Vec<f64> = base.iter().zip(&noise).map(|(b, n)| b + jitter * n).collect();
        pts.push(SparsePoint::from_dense(&v));
    };
    let (a, b, center) = if diamond {
        (vec![1.0, 0.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0, 0.0], 0.0)
    } else {
        (vec![1.0, 0.0, 0.0, 0.0], vec![0.0; 4], -1.0)
    };
    push(a, rng);
    push(b, rng);
    for _ in 0..tips {
        let mut u = random_unit(rng, dim);
        u[0] = 0.0;
        let n = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        let mut v: Vec<f64> = u.iter().map(|x| r * x / n).collect();
        v[0] = center;
        push(v, rng);
    }
    pts
}

fn criterion_6() -> Outcome {
    for pi in 1..=8 {
        let p = f64::from(pi);
        for j in 1..=999 {
            let delta = f64::from(j) / 1000.0;
            let (lhs, rhs) = taylor_step(delta, p);
            let own_lhs = ((1.0 + delta).powf(p) - 1.0).powf(1.0 / p);
            let own_rhs = 6.0 * delta.powf(1.0 / p);
            ensure(lhs == own_lhs && rhs == own_rhs, || format!("taylor_step disagrees at delta={delta}, p={p}"))?;
            ensure(own_lhs <= own_rhs, || format!("grid check fails at delta={delta}, p={p}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut summary = Vec::new();
    for (norm, label) in [(Norm::P(2.0), "l2"), (Norm::P(1.0), "l1")] {
        for diamond in [false, true] {
            let mut accepted = 0;
            let mut attempts = 0u64;
            while accepted < 1000 {
                attempts += 1;
                ensure(attempts < 2_000_000, || format!("{label}: too few accepted configurations"))?;
                let p = f64::from(rng.gen_range(1..=3u32));
                let c = rng.gen_range(1.0..4.0);
                let tips = rng.gen_range(2..=4);
                let space = PointSet::new(norm, configuration(&mut rng, diamond, tips));
                let xs: Vec<usize> = (2..2 + tips).collect();
                let (gap, bound, residual) = if diamond {
                    let (theta, eps) = minimal_diamond_epsilon(&space, 0, 1, &xs);
                    let Ok(w) = check_diamond(&space, 0, 1, &xs, theta, eps) else { continue };
                    let params = SpaceParams::diamond(p, c);
                    let r = diamond_inequality_residual(&space, 0, 1, &xs, &params).map_err(|e| e.to_string())?;
                    let b = diamond_lemma_bound(&w, &params).map_err(|e| e.to_string())?;
                    let own = 6.0 * c * theta * eps.powf(1.0 / p);
                    ensure((b.bound - own).abs() <= 1e-12 * own, || "diamond bound formula".into())?;
                    (w.min_tip_gap, own, r)
                } else {
                    let (theta, delta) = minimal_umbel_delta(&space, 0, 1, &xs);
                    let Ok(w) = check_umbel(&space, 0, 1, &xs, theta, delta) else { continue };
                    let params = SpaceParams::umbel(p, c);
                    let r = infrasup_umbel_residual(&space, 0, 1, &xs, &params).map_err(|e| e.to_string())?;
                    let b = umbel_lemma_bound(&w, &params).map_err(|e| e.to_string())?;
                    let own = 6.0 * c * theta * delta.powf(1.0 / p);
                    ensure((b.bound - own).abs() <= 1e-12 * own, || "umbel bound formula".into())?;
                    (w.min_tip_gap, own, r)
                };
                if residual.residual > 0.0 {
                    continue;
                }
                accepted += 1;
                ensure(gap <= bound + 1e-9, || {
                    format!("{label}: residual {} <= 0 yet gap {gap} > bound {bound}", residual.residual)
                })?;
            }
            summary.push(format!("{label} {}", if diamond { "diamonds" } else { "umbels" }));
        }
    }
    Ok(format!("grid 8x999; 1000 each of {}", summary.join(", ")))
}

fn hash_color(seed: u64, a: usize, b: usize, colors: Color) -> Color {
    let mut x = seed ^ (a as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (b as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    x ^= x >> 31;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 29;
    (x >> 32) % colors
}

fn criterion_7() -> Outcome {
    let mut runs = 0usize;
    let limits = Limits::unlimited();
    for h in 1..=3usize {
        for c in 1..=3u64 {
            let b = c.pow((h * (h + 1) / 2) as u32) as u32 + 1;
            let tree = Tree::with_limits(h, b, &limits).map_err(|e| e.to_string())?;
            let level = |v: usize| tree.code_at(v).map(|x| x.depth()).unwrap_or(0);
            let last = |v: usize| tree.code_at(v).and_then(|x| x.labels().last().copied()).map_or(0, Color::from);
            let crafted: Vec<Box<dyn Fn(usize, usize) -> Color + Sync>> = vec![
                Box::new(|_, _| 0),
                Box::new(move |_, y| last(y) % c),
                Box::new(move |x, y| (level(x) as Color + last(y)) % c),
                Box::new(move |x, y| (last(x) * 7 + last(y)) % c),
            ];
            let randoms = (0..120u64).map(|s| -> Box<dyn Fn(usize, usize) -> Color + Sync> {
                Box::new(move |x, y| hash_color(s, x, y, c))
            });
            for f in crafted.into_iter().chain(randoms) {
                let coloring = FnColoring::new(c, f);
                let sel = match extract_monochromatic_subtree(&tree, &coloring, 2).map_err(|e| e.to_string())? {
                    Extraction::Found(s) => s,
                    Extraction::Failed(f) => return Err(format!("T_{h}^{b}, {c} colours: extraction failed at {}", f.blocking)),
                };
                verify_subtree(&tree, &coloring, &sel).map_err(|e| format!("T_{h}^{b}: {e}"))?;
                ensure(sel.achieved_branching >= 2, || "branching below target".into())?;
                runs += 1;
            }
        }
    }
    for n in 1..=3u32 {
        for c in 1..=3u64 {
            let k = (c * c) as u32 + 1;
            let d = Diamond::new(n, k).map_err(|e| e.to_string())?;
            let id = |v: usize| d.graph().address(v).to_string();
            let crafted: Vec<Box<dyn Fn(usize, usize) -> Color + Sync>> = vec![
                Box::new(|_, _| 0),
                Box::new(move |x, y| ((x + 3 * y) as Color) % c),
                Box::new(move |x, y| (id(x).len() + id(y).len()) as Color % c),
            ];
            let randoms = (0..60u64).map(|s| -> Box<dyn Fn(usize, usize) -> Color + Sync> {
                Box::new(move |x, y| hash_color(s, x.min(y), x.max(y), c))
            });
            for f in crafted.into_iter().chain(randoms) {
                let coloring = FnColoring::new(c, f);
                let sel = match extract_monochromatic_subdiamond(&d, &coloring, 2).map_err(|e| e.to_string())? {
                    Extraction::Found(s) => s,
                    Extraction::Failed(f) => return Err(format!("D_{n}^{k}, {c} colours: extraction failed at {}", f.blocking)),
                };
                verify_subdiamond(&d, &coloring, &sel).map_err(|e| format!("D_{n}^{k}: {e}"))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} extractions verified"))
}

/// Measured distortion from BFS distances and coordinate arithmetic.
fn own_distortion(graph: &StGraph, table: &EmbeddingTable) -> f64 {
    let p = match table.norm {
        Norm::P(p) => p,
        Norm::Inf => f64::INFINITY,
    };
    let idx: Vec<usize> = (0..graph.vertex_count())
        .map(|v| table.index_of(&graph.address(v).to_string()).expect("id present"))
        .collect();
    let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
    for u in 0..graph.vertex_count() {
        let d = bfs(graph, u);
        for v in u + 1..graph.vertex_count() {
            let r = own_distance(&table.points[idx[u]], &table.points[idx[v]], p) / f64::from(d[v]);
            hi = hi.max(r);
            lo = lo.min(r);
        }
    }
    hi / lo
}

fn fuzz_table(rng: &mut ChaCha8Rng, graph: &StGraph) -> EmbeddingTable {
    let ids = graph.ids();
    let n = ids.len();
    let kind = rng.gen_range(0..3);
    let norm = [Norm::P(1.0), Norm::P(2.0), Norm::P(3.0), Norm::Inf][rng.gen_range(0..4)];
    let points = match kind {
        // random cloud
        0 => {
            let dim = rng.gen_range(2..6);
            (0..n)
                .map(|_| SparsePoint::from_dense(&(0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect::<Vec<_>>()))
                .collect()
        }
        // noisy Frechet embedding
        _ => {
            let eps: f64 = if kind == 1 { 0.0 } else { rng.gen_range(0.0..0.3) };
            (0..n)
                .map(|u| {
                    let row: Vec<f64> = bfs(graph, u).into_iter().map(|d| f64::from(d) + eps * rng.gen_range(-1.0..1.0)).collect();
                    SparsePoint::from_dense(&row)
                })
                .collect()
        }
    };
    EmbeddingTable::new(norm, ids, points).expect("table")
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for trial in 0..240 {
        let p = f64::from(rng.gen_range(1..=3u32));
        let constant = [1.0, 1.5, 4.0][rng.gen_range(0..3)];
        let force = rng.gen_bool(0.5);
        let diamond = trial % 2 == 1;
        let (cert, table, graph) = if diamond {
            let d = Diamond::new(rng.gen_range(1..=3), rng.gen_range(1..=3)).map_err(|e| e.to_string())?;
            let table = fuzz_table(&mut rng, d.graph());
            let mut cfg = CertifierConfig::diamond(p, constant);
            cfg.force_pipeline = force;
            let cert = certify_diamond(&d, &table, &cfg).map_err(|e| format!("trial {trial}: no verdict: {e}"))?;
            (cert, table, d.graph().clone())
        } else {
            let tree = Tree::new(rng.gen_range(1..=5), rng.gen_range(1..=3)).map_err(|e| e.to_string())?;
            let graph = tree.to_graph().map_err(|e| e.to_string())?;
            let table = fuzz_table(&mut rng, &graph);
            let mut cfg = CertifierConfig::tree(p, constant);
            cfg.force_pipeline = force;
            let cert = certify_tree(&tree, &table, &cfg).map_err(|e| format!("trial {trial}: no verdict: {e}"))?;
            (cert, table, graph)
        };
        ensure(replay_certificate(&cert, &table).map_err(|e| e.to_string())?, || {
            format!("trial {trial}: certificate does not replay")
        })?;
        let json = cert.to_json().map_err(|e| e.to_string())?;
        let back = umbelkit::certifier::Certificate::from_json(&json).map_err(|e| e.to_string())?;
        ensure(replay_certificate(&back, &table).map_err(|e| e.to_string())?, || {
            format!("trial {trial}: serialized certificate does not replay")
        })?;
        let k = own_distortion(&graph, &table);
        ensure((k - cert.constants.k).abs() <= 1e-9 * k, || format!("trial {trial}: K {} vs measured {k}", cert.constants.k))?;
        if cert.verdict == Verdict::BoundAsserted {
            let ok = if diamond { k > cert.bound } else { k >= cert.bound };
            ensure(ok, || format!("trial {trial}: asserted bound {} above measured {k}", cert.bound))?;
        }
        *counts.entry(cert.verdict.as_str()).or_default() += 1;
    }
    Ok(format!("240 tables: {counts:?}"))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_umbelkit"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    Ok(out.status.code().unwrap_or(-1))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let runs: Vec<Vec<&str>> = vec![
        vec!["gen", "tree", "--height", "4", "--branching", "2", "--out", "t.json"],
        vec!["gen", "diamond", "--levels", "2", "--branching", "2", "--out", "d.json"],
        vec!["gen", "path", "--length", "8", "--out", "p.json"],
        vec!["embed", "--graph", "t.json", "--p", "2", "--profile", "1,0.25", "--out", "e.json"],
        vec!["embed", "--graph", "t.json", "--p", "1", "--profile", "1,0.5", "--perturb", "0.01", "--seed", "5", "--out", "ep.json"],
        vec!["analyze", "--graph", "t.json", "--embedding", "e.json", "--out", "a.json"],
        vec!["certify", "--graph", "t.json", "--embedding", "e.json", "--mode", "tree", "--cu", "2", "--out", "c.json"],
        vec!["certify", "--graph", "t.json", "--embedding", "e.json", "--mode", "tree", "--cu", "2", "--force", "--out", "cf.json"],
        vec!["check-inequality", "--p", "2", "--constant", "2", "--samples", "500", "--seed", "9", "--out", "ci.json"],
    ];
    let mut manifests = Vec::new();
    for args in &runs {
        let code = run_cli(d, args)?;
        ensure(code != 2 && code != 1 && code >= 0, || format!("{args:?} exited {code}"))?;
        let out = args[args.iter().position(|a| *a == "--out").expect("out") + 1];
        manifests.push(PathBuf::from(format!("{out}.manifest.json")));
    }
    let mut artifacts = 0;
    for m in &manifests {
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d.join(m)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let outputs: Vec<PathBuf> = manifest["outputs"]
            .as_array()
            .ok_or("manifest without outputs")?
            .iter()
            .map(|a| PathBuf::from(a["path"].as_str().unwrap_or_default()))
            .collect();
        let before: Vec<Vec<u8>> = outputs.iter().map(|p| std::fs::read(d.join(p)).unwrap_or_default()).collect();
        let names: HashSet<_> = outputs.iter().collect();
        ensure(names.len() == outputs.len() && !outputs.is_empty(), || format!("{m:?}: bad output list"))?;
        for p in &outputs {
            std::fs::remove_file(d.join(p)).map_err(|e| e.to_string())?;
        }
        let code = run_cli(d, &["rerun", m.to_str().expect("utf-8")])?;
        ensure(code == 0, || format!("rerun of {m:?} exited {code}"))?;
        for (p, old) in outputs.iter().zip(&before) {
            let new = std::fs::read(d.join(p)).map_err(|e| e.to_string())?;
            ensure(&new == old, || format!("{p:?} differs after rerun"))?;
            artifacts += 1;
        }
    }
    Ok(format!("{} manifests, {artifacts} artifacts byte-identical", manifests.len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("tree distance equals BFS distance", Duration::from_secs(5), criterion_1),
        ("diamond structure and st-paths", Duration::from_secs(30), criterion_2),
        ("sequence lemma bounds", Duration::from_secs(5), criterion_3),
        ("path lemma sandwich and grid placement", Duration::from_secs(60), criterion_4),
        ("compression theorem at desk scale", Duration::from_secs(300), criterion_5),
        ("umbel and diamond lemma arithmetic", Duration::from_secs(30), criterion_6),
        ("Ramsey extraction at the pigeonhole threshold", Duration::from_secs(120), criterion_7),
        ("certifier integrity on fuzzed tables", Duration::from_secs(120), criterion_8),
        ("CLI manifests rerun byte-identically", Duration::from_secs(120), criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > *budget {
                Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("criterion {} PASS  {name} ({:.2} s): {detail}", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name} ({:.2} s): {why}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
