use super::config::{CertifierConfig, Mode};
use super::trail::{Quantity, Relation, TrailEntry};
use super::{
    Certificate, Constants, ContradictionKind, RequiredSizes, Verdict, Witnesses,
    CERTIFICATE_VERSION,
};
use crate::graph::{Diamond, FiniteMetric, StGraph, Tree, TreeCode};
use crate::lemmas::{
    check_diamond, check_umbel, diamond_lemma_bound, path_lemma_extract, umbel_lemma_bound,
    LemmaBound, PathMode, PathWitness, WitnessRecord,
};
use crate::metric::{
    diamond_inequality_residual, distortion, infrasup_umbel_residual, min_gap, Distances,
    EmbeddingTable, Residual, SpaceParams,
};
use crate::ramsey::{
    extract_monochromatic_subdiamond, extract_monochromatic_subtree, log_distortion_coloring,
    max_color, path_key, Coloring, Extraction, ExtractionFailure,
};
use crate::{Error, Result};

/// The table with distances divided by `lambda`.
struct Normalized<'a> {
    table: &'a EmbeddingTable,
    lambda: f64,
}

impl Distances for Normalized<'_> {
    fn len(&self) -> usize {
        self.table.len()
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        self.table.dist(a, b) / self.lambda
    }
}

/// `log2(2^e + 1)`.
fn log2_plus_one(e: f64) -> f64 {
    e + (-e).exp2().ln_1p() / std::f64::consts::LN_2
}

struct Run<'a> {
    config: &'a CertifierConfig,
    table: EmbeddingTable,
    metric: FiniteMetric,
    lambda: f64,
    k: f64,
    c: f64,
    gamma: f64,
    bound: f64,
    required: RequiredSizes,
    trail: Vec<TrailEntry>,
    witnesses: Witnesses,
    gates_bypassed: Vec<String>,
    notes: Vec<String>,
    theta: Option<f64>,
    slack: Option<f64>,
}

impl<'a> Run<'a> {
    fn prepare(
        graph: &StGraph,
        table: &EmbeddingTable,
        config: &'a CertifierConfig,
        size: usize,
        branching: u32,
    ) -> Result<Self> {
        config.validate()?;
        let table = table.aligned_to(graph)?;
        let metric = FiniteMetric::from_graph(graph, &config.limits)?;
        let d = distortion(&table, &metric)?;
        let lambda = 1.0 / d.colip;
        let k = d.dist.max(1.0);
        let c = config.master_constant();
        let gamma = config.gamma_for(k);
        let colors = max_color(k, gamma).saturating_add(1);
        let p = config.p;
        let (path_length_log2, branching_log2, structural_minimum) = match config.mode {
            Mode::Tree => {
                let pairs = (size * (size + 1) / 2) as f64;
                (
                    (2.0 * c * k.powf(p)).ceil(),
                    log2_plus_one(pairs * (colors as f64).log2()),
                    4,
                )
            }
            Mode::Diamond => (
                4.0 * c * k.powf(p),
                log2_plus_one(2.0 * (colors as f64).log2()),
                2,
            ),
        };
        let mut run = Run {
            config,
            bound: config.trivial_bound(size),
            required: RequiredSizes {
                size,
                branching,
                structural_minimum,
                path_length_log2,
                branching_log2,
                colors,
            },
            table,
            metric,
            lambda,
            k,
            c,
            gamma,
            trail: Vec::new(),
            witnesses: Witnesses::default(),
            gates_bypassed: Vec::new(),
            notes: Vec::new(),
            theta: None,
            slack: None,
        };
        let (a, b) = d.colip_pair;
        let dg = run.metric.get(a, b);
        let raw = run.table.dist(a, b) / dg;
        run.push(
            (raw, run.raw(a, b).scale(1.0 / dg)),
            Relation::Eq,
            (lambda, Quantity::Lambda),
            "lower Lipschitz constant of the map",
        );
        let (a, b) = d.lip_pair;
        let dg = run.metric.get(a, b);
        let ratio = run.space().dist(a, b) / dg;
        run.push(
            (k, Quantity::constant(k)),
            Relation::Eq,
            (ratio, run.nd(a, b).scale(1.0 / dg)),
            "distortion K of the map",
        );
        Ok(run)
    }

    fn space(&self) -> Normalized<'_> {
        Normalized {
            table: &self.table,
            lambda: self.lambda,
        }
    }

    fn id(&self, v: usize) -> String {
        self.table.ids[v].clone()
    }

    fn raw(&self, a: usize, b: usize) -> Quantity {
        Quantity::Dist {
            a: self.id(a),
            b: self.id(b),
        }
    }

    fn nd(&self, a: usize, b: usize) -> Quantity {
        Quantity::NDist {
            a: self.id(a),
            b: self.id(b),
        }
    }

    fn nd_value(&self, a: usize, b: usize) -> (f64, Quantity) {
        (self.space().dist(a, b), self.nd(a, b))
    }

    fn push(&mut self, lhs: (f64, Quantity), rel: Relation, rhs: (f64, Quantity), source: &str) -> bool {
        let e = TrailEntry::new(lhs, rel, rhs, source);
        let holds = e.holds;
        self.trail.push(e);
        holds
    }

    fn push_const(&mut self, lhs: f64, rel: Relation, rhs: f64, source: &str) -> bool {
        self.push(
            (lhs, Quantity::constant(lhs)),
            rel,
            (rhs, Quantity::constant(rhs)),
            source,
        )
    }

    fn finish(
        self,
        verdict: Verdict,
        contradiction: Option<ContradictionKind>,
        extraction: Option<ExtractionFailure>,
    ) -> Certificate {
        let mut notes = self.notes;
        if self.config.mode == Mode::Diamond && self.config.master.is_none() {
            notes.push("diamond master constant C = 14 (6 C_D)^p is a default by analogy with the tree case".into());
        }
        Certificate {
            version: CERTIFICATE_VERSION.to_string(),
            mode: self.config.mode,
            verdict,
            bound: self.bound,
            constants: Constants {
                gamma: self.gamma,
                c: self.c,
                theta: self.theta,
                delta_or_epsilon: self.slack,
                k: self.k,
                p: self.config.p,
                c_space: self.config.constant,
                lambda: self.lambda,
            },
            required: self.required,
            contradiction,
            extraction,
            gates_bypassed: self.gates_bypassed,
            witnesses: self.witnesses,
            notes,
            trail: self.trail,
        }
    }

    /// Structural minimum, trivial branch and size gates. `Some` when the run
    /// ends before the pipeline.
    fn gates(&mut self) -> Option<Verdict> {
        let r = self.required.clone();
        if r.size < r.structural_minimum {
            self.push_const(
                r.structural_minimum as f64,
                Relation::Le,
                r.size as f64,
                "structural minimum size for the path lemma",
            );
            return Some(Verdict::ScaleTooSmall);
        }
        let (rel, k_src) = match self.config.mode {
            Mode::Tree => (Relation::Le, "trivial branch: K >= (log2 h)^{1/p} / (56^{1/p} 6 C_U)"),
            Mode::Diamond => (Relation::Lt, "trivial branch: K > (n / (4C))^{1/p}"),
        };
        let last_k = self.trail[1].rhs_expr.clone();
        let asserted = rel.holds(self.bound, self.k);
        if asserted && !self.config.force_pipeline {
            self.push((self.bound, Quantity::constant(self.bound)), rel, (self.k, last_k), k_src);
            return Some(Verdict::BoundAsserted);
        }
        if asserted {
            self.gates_bypassed.push("trivial branch".into());
        }
        let path_log2 = match self.config.mode {
            Mode::Tree => (r.size as f64).log2(),
            Mode::Diamond => r.size as f64,
        };
        let long_enough = path_log2 >= r.path_length_log2;
        let wide_enough = f64::from(r.branching).log2() >= r.branching_log2 - 1e-12;
        if self.config.force_pipeline {
            if !long_enough {
                self.gates_bypassed.push("path length threshold".into());
            }
            if !wide_enough {
                self.gates_bypassed.push("branching threshold".into());
            }
            return None;
        }
        if !(long_enough && wide_enough) {
            self.push_const(r.path_length_log2, Relation::Le, path_log2, "log2 path length against the required length");
            self.push_const(
                r.branching_log2,
                Relation::Le,
                f64::from(r.branching).log2(),
                "log2 branching against the pigeonhole threshold",
            );
            return Some(Verdict::ScaleTooSmall);
        }
        None
    }

    /// Records the path lemma's sandwich inequalities and, when present, the
    /// refined ones. False if any fails.
    fn record_path(&mut self, pw: &PathWitness) -> bool {
        let mut ok = true;
        let span = (1u64 << (pw.scale + 1)) as f64;
        let [z0, _, z2] = pw.vertices;
        let (v, q) = self.nd_value(z0, z2);
        ok &= self.push(
            (pw.l_next, Quantity::constant(pw.l_next)),
            Relation::Eq,
            (v / span, q.scale(1.0 / span)),
            "L_{i+1} attained by (z_0, z_2)",
        );
        let pairs = pw.pairs(&self.space());
        let mut widths = vec![(pw.b, "path lemma sandwich, width K / (floor(log2 n) L_{i+1})")];
        if let Some(r) = &pw.refined {
            widths.push((r.half_width, "refined path estimate, width 1 / (2 C L_{i+1}^p)"));
        }
        for (width, source) in widths {
            for &(a, b, dp, _) in &pairs {
                let lo = pw.l_next * (1.0 - width) * dp;
                let hi = pw.l_next * (1.0 + width) * dp;
                let d = self.nd_value(a, b);
                ok &= self.push((lo, Quantity::constant(lo)), Relation::Le, d.clone(), source);
                ok &= self.push(d, Relation::Le, (hi, Quantity::constant(hi)), source);
            }
        }
        ok
    }

    /// `theta <= d <= (1 + slack) theta` scaled by `factor`.
    fn record_band(&mut self, a: usize, b: usize, factor: f64, source: &str) -> bool {
        let theta = self.theta.expect("theta set");
        let slack = self.slack.expect("slack set");
        let lo = factor * theta;
        let hi = factor * (1.0 + slack) * theta;
        let d = self.nd_value(a, b);
        let x = self.push((lo, Quantity::constant(lo)), Relation::Le, d.clone(), source);
        let y = self.push(d, Relation::Le, (hi, Quantity::constant(hi)), source);
        x && y
    }

    fn gap_quantity(&self, tips: &[usize]) -> Quantity {
        let mut terms = Vec::new();
        for (i, &a) in tips.iter().enumerate() {
            for &b in &tips[i + 1..] {
                terms.push(self.nd(a, b));
            }
        }
        Quantity::Min { terms }
    }

    /// `2^{i+1} <= gap <= bound <= 2^i` and the inequality residual. Returns
    /// the contradiction kind.
    fn record_chain(
        &mut self,
        scale: u32,
        tips: &[usize],
        lemma: &LemmaBound,
        residual: &Residual,
        residual_expr: (Quantity, Quantity),
    ) -> ContradictionKind {
        let low = (1u64 << (scale + 1)) as f64;
        let high = (1u64 << scale) as f64;
        let gap = (min_gap(&self.space(), tips), self.gap_quantity(tips));
        self.push((low, Quantity::constant(low)), Relation::Le, gap.clone(), "tip separation from the lower Lipschitz bound");
        let bound = (lemma.bound, Quantity::constant(lemma.bound));
        self.push(gap, Relation::Le, bound.clone(), "tip gap against 6 C theta slack^{1/p}");
        self.push(bound, Relation::Le, (high, Quantity::constant(high)), "lemma bound against the scale 2^i");
        let violated = !self.push(
            (residual.lhs, residual_expr.0),
            Relation::Le,
            (residual.rhs, residual_expr.1),
            "inequality on the witness configuration",
        );
        if !lemma.satisfied && violated {
            ContradictionKind::InequalityViolated
        } else {
            ContradictionKind::FiniteScale
        }
    }

    fn set_constants(&mut self, l: f64, scale: u32) {
        let p = self.config.p;
        let c = self.c;
        self.theta = Some(l * (1.0 - 1.0 / (2.0 * c * l.powf(p))) * (1u64 << scale) as f64 / (1.0 + self.gamma));
        self.slack = Some(14.0 / (c * l.powf(p)));
    }
}

fn extraction_failed(run: Run, failure: ExtractionFailure) -> Certificate {
    let mut run = run;
    run.push_const(
        failure.target as f64,
        Relation::Le,
        failure.achieved as f64,
        "branches needed against branches found",
    );
    run.finish(Verdict::ExtractionFailed, None, Some(failure))
}

/// Certifies a table over `T_h^b`. Vertex ids of the table are tree codes.
pub fn certify_tree(tree: &Tree, table: &EmbeddingTable, config: &CertifierConfig) -> Result<Certificate> {
    if config.mode != Mode::Tree {
        return Err(Error::param("certify_tree needs a tree-mode configuration"));
    }
    let graph = tree.to_graph()?;
    let mut run = Run::prepare(&graph, table, config, tree.height(), tree.branching())?;
    if let Some(v) = run.gates() {
        return Ok(run.finish(v, None, None));
    }
    let k = run.k;
    let pairs = tree
        .vertical_pairs(&config.limits)?
        .into_iter()
        .map(|(m, n)| (tree.index_of(&m).expect("in tree"), tree.index_of(&n).expect("in tree")));
    let coloring = log_distortion_coloring(&run.space(), &run.metric, pairs, 1.0, k, run.gamma)?;
    let sel = match extract_monochromatic_subtree(tree, &coloring, 2)? {
        Extraction::Found(s) => s,
        Extraction::Failed(f) => return Ok(extraction_failed(run, f)),
    };
    let codes = sel.first_path();
    let path: Vec<usize> = codes.iter().map(|c| tree.index_of(c).expect("in tree")).collect();
    let pw = path_lemma_extract(&run.space(), &path, 1.0, k, PathMode::Standard, Some((run.c, config.p)))?;
    let path_ok = run.record_path(&pw);
    let scale = pw.scale;
    let z = &codes[pw.z[1]];
    let x1 = &codes[pw.z[2]];
    let [w_idx, z_idx, x1_idx] = pw.vertices;
    let reach = 1usize << scale;
    // one tip per selected child of z, x_1 in its own branch
    let mut tips: Vec<usize> = Vec::new();
    for &l in &sel.selection[&z.to_string()] {
        let child = z.child(l);
        let tip: TreeCode = if child.is_strict_ancestor_of(x1) || &child == x1 {
            x1.clone()
        } else {
            sel.descendants_at(&child, z.depth() + reach)
                .into_iter()
                .next()
                .expect("full selection")
        };
        let ti = tree.index_of(&tip).expect("in tree");
        if coloring.color(z_idx, ti) == coloring.color(z_idx, x1_idx) {
            tips.push(ti);
        }
    }
    run.witnesses.path = Some(pw.clone());
    run.witnesses.anchor_ids = vec![run.id(w_idx), run.id(z_idx)];
    run.witnesses.tip_ids = tips.iter().map(|&t| run.id(t)).collect();
    if tips.len() < 2 {
        let failure = ExtractionFailure {
            target: 2,
            achieved: tips.len() as u32,
            blocking: z.to_string(),
        };
        return Ok(extraction_failed(run, failure));
    }
    run.set_constants(pw.l_next, scale);
    let mut bands_ok = run.record_band(w_idx, z_idx, 1.0, "umbel band d(w,z)");
    for &x in &tips {
        bands_ok &= run.record_band(z_idx, x, 1.0, "umbel band d(z,x)");
        bands_ok &= run.record_band(w_idx, x, 2.0, "umbel band d(w,x)");
    }
    let (theta, delta) = (run.theta.expect("set"), run.slack.expect("set"));
    let params = SpaceParams::umbel(config.p, config.constant);
    let checked = check_umbel(&run.space(), w_idx, z_idx, &tips, theta, delta);
    let umbel = match checked {
        Ok(u) => u,
        Err(rej) => {
            run.witnesses.rejection = Some(rej);
            return Ok(run.finish(Verdict::WitnessContradiction, Some(ContradictionKind::FiniteScale), None));
        }
    };
    debug_assert!(bands_ok);
    let lemma = umbel_lemma_bound(&umbel, &params)?;
    let residual = infrasup_umbel_residual(&run.space(), w_idx, z_idx, &tips, &params)?;
    let p = config.p;
    let lhs = Quantity::Sum {
        terms: vec![
            Quantity::Min {
                terms: tips.iter().map(|&x| run.nd(w_idx, x)).collect(),
            }
            .scale(0.5)
            .pow(p),
            run.gap_quantity(&tips).scale(1.0 / config.constant).pow(p),
        ],
    };
    let mut maxes = vec![run.nd(w_idx, z_idx)];
    maxes.extend(tips.iter().map(|&x| run.nd(z_idx, x)));
    let rhs = Quantity::Max { terms: maxes }.pow(p);
    let mut kind = run.record_chain(scale, &tips, &lemma, &residual, (lhs, rhs));
    if !path_ok {
        kind = ContradictionKind::FiniteScale;
    }
    run.witnesses.configuration = Some(WitnessRecord::umbel(&umbel, &lemma, Some(residual.residual)));
    Ok(run.finish(Verdict::WitnessContradiction, Some(kind), None))
}

/// Certifies a table over `D_n^k`. Vertex ids of the table are diamond
/// addresses.
pub fn certify_diamond(
    diamond: &Diamond,
    table: &EmbeddingTable,
    config: &CertifierConfig,
) -> Result<Certificate> {
    if config.mode != Mode::Diamond {
        return Err(Error::param("certify_diamond needs a diamond-mode configuration"));
    }
    let mut run = Run::prepare(
        diamond.graph(),
        table,
        config,
        diamond.levels() as usize,
        diamond.branching(),
    )?;
    if let Some(v) = run.gates() {
        return Ok(run.finish(v, None, None));
    }
    let k = run.k;
    let mut pairs = Vec::new();
    for scale in 0..diamond.levels() {
        for copy in diamond.scaled_diamonds(scale)? {
            pairs.push((copy.s, copy.t));
            for &x in &copy.midpoints {
                pairs.push((copy.s, x));
                pairs.push((x, copy.t));
            }
        }
    }
    let coloring = log_distortion_coloring(&run.space(), &run.metric, pairs, 1.0, k, run.gamma)?;
    let sel = match extract_monochromatic_subdiamond(diamond, &coloring, 2)? {
        Extraction::Found(s) => s,
        Extraction::Failed(f) => return Ok(extraction_failed(run, f)),
    };
    let path = sel.first_st_path(diamond)?;
    let pw = path_lemma_extract(&run.space(), &path, 1.0, k, PathMode::Grid, Some((run.c, config.p)))?;
    let path_ok = run.record_path(&pw);
    let scale = pw.scale;
    let [s_idx, x1_idx, t_idx] = pw.vertices;
    let copy = diamond
        .find_scaled(scale, s_idx, t_idx)?
        .ok_or_else(|| Error::InvalidGraph("path lemma triple is not a scaled diamond".into()))?;
    let choice = sel
        .copies
        .get(&path_key(&copy.edge_path))
        .ok_or_else(|| Error::Mismatch("scaled diamond outside the selection".into()))?;
    let tips: Vec<usize> = choice
        .midpoints
        .iter()
        .map(|&j| copy.midpoints[j as usize - 1])
        .collect();
    if !tips.contains(&x1_idx) {
        return Err(Error::Mismatch("path midpoint is not a kept branch".into()));
    }
    run.witnesses.path = Some(pw.clone());
    run.witnesses.anchor_ids = vec![run.id(s_idx), run.id(t_idx)];
    run.witnesses.tip_ids = tips.iter().map(|&t| run.id(t)).collect();
    run.set_constants(pw.l_next, scale);
    run.record_band(s_idx, t_idx, 2.0, "diamond band d(s,t)");
    for &x in &tips {
        run.record_band(s_idx, x, 1.0, "diamond band d(s,x)");
        run.record_band(x, t_idx, 1.0, "diamond band d(x,t)");
    }
    let (theta, eps) = (run.theta.expect("set"), run.slack.expect("set"));
    let params = SpaceParams::diamond(config.p, config.constant);
    let witness = match check_diamond(&run.space(), s_idx, t_idx, &tips, theta, eps) {
        Ok(w) => w,
        Err(rej) => {
            run.witnesses.rejection = Some(rej);
            return Ok(run.finish(Verdict::WitnessContradiction, Some(ContradictionKind::FiniteScale), None));
        }
    };
    let lemma = diamond_lemma_bound(&witness, &params)?;
    let residual = diamond_inequality_residual(&run.space(), s_idx, t_idx, &tips, &params)?;
    let p = config.p;
    let lhs = Quantity::Sum {
        terms: vec![
            run.nd(s_idx, t_idx).scale(0.5).pow(p),
            run.gap_quantity(&tips).scale(1.0 / config.constant).pow(p),
        ],
    };
    let mut maxes: Vec<Quantity> = tips.iter().map(|&x| run.nd(s_idx, x)).collect();
    maxes.extend(tips.iter().map(|&x| run.nd(t_idx, x)));
    let rhs = Quantity::Max { terms: maxes }.pow(p);
    let mut kind = run.record_chain(scale, &tips, &lemma, &residual, (lhs, rhs));
    if !path_ok {
        kind = ContradictionKind::FiniteScale;
    }
    run.witnesses.configuration = Some(WitnessRecord::diamond(&witness, &lemma, Some(residual.residual)));
    Ok(run.finish(Verdict::WitnessContradiction, Some(kind), None))
}
