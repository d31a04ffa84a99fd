use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use umbelkit::certifier::{
    certify_diamond, certify_tree, replay_certificate, Certificate, CertifierConfig, Mode, Verdict,
};
use umbelkit::embedder::{
    chain_check, compression_report, lipschitz_report, CompressionProfile, ProfileFn, TreeEmbedding,
};
use umbelkit::graph::{Diamond, FiniteMetric, GraphFile, LoadedGraph, StGraph, Tree};
use umbelkit::metric::{
    compression_curve, diamond_inequality_residual, distortion, infrasup_umbel_residual, CompressionCurve,
    EmbeddingTable, Norm, PointSet, SpaceParams, SparsePoint,
};
use umbelkit::{Error, Limits};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BOUND_DEFECT: u8 = 3;
const EXIT_COLLAPSE: u8 = 4;
const EXIT_CONTRADICTION: u8 = 5;
const EXIT_EXTRACTION_FAILED: u8 = 6;
const EXIT_NOT_REPRODUCED: u8 = 7;

#[derive(Parser, Debug)]
#[command(name = "umbelkit", version, about = "Trees, diamonds, embeddings and distortion certificates")]
struct Cli {
    /// Lift the default size ceilings.
    #[arg(long, global = true)]
    r#unsafe: bool,
    /// Where to write the run manifest. Defaults to `<first output>.manifest.json`.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Skip writing a manifest.
    #[arg(long, global = true)]
    no_manifest: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Build the coarse embedding of a tree and check its bounds.
    Embed(EmbedArgs),
    /// Distortion and compression curves of an embedding.
    Analyze(AnalyzeArgs),
    /// Run the lower-bound certifier, or replay a certificate.
    Certify(CertifyArgs),
    /// Sample random configurations and report inequality residuals.
    CheckInequality(CheckArgs),
    /// Re-execute a manifest and compare artifact hashes.
    Rerun { manifest: PathBuf },
}

#[derive(Subcommand, Debug)]
enum GenKind {
    Tree {
        #[arg(long)]
        height: usize,
        #[arg(long)]
        branching: u32,
        #[arg(long)]
        out: PathBuf,
    },
    Diamond {
        #[arg(long)]
        levels: u32,
        #[arg(long)]
        branching: u32,
        #[arg(long)]
        out: PathBuf,
    },
    Path {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    p: f64,
    /// `a,alpha` for `f(t) = a (1 + t)^alpha`.
    #[arg(long, default_value = "1,0.25")]
    profile: ProfileFn,
    #[arg(long)]
    out: PathBuf,
    /// Curve CSV. Defaults to the output path with a `.csv` extension.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Adds coordinate noise of this size.
    #[arg(long)]
    perturb: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long, required_unless_present = "replay")]
    graph: Option<PathBuf>,
    #[arg(long, required_unless_present = "replay")]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, conflicts_with = "cd")]
    cu: Option<f64>,
    #[arg(long)]
    cd: Option<f64>,
    /// Override of the master constant C.
    #[arg(long)]
    master: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Run the pipeline past the bound branch and size gates.
    #[arg(long)]
    force: bool,
    #[arg(long, required_unless_present = "replay")]
    out: Option<PathBuf>,
    /// Replay this certificate against the embedding instead.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Configuration {
    Umbel,
    Diamond,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, default_value = "lp")]
    space: String,
    #[arg(long)]
    p: f64,
    /// `C_U` or `C_D`.
    #[arg(long)]
    constant: f64,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Configuration::Umbel)]
    configuration: Configuration,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 3)]
    tips: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Collapse(..) => EXIT_COLLAPSE,
            Error::Io(_) => EXIT_FAILURE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new(EXIT_INVALID, format!("malformed JSON: {e}"))
    }
}

type CliResult<T> = Result<T, Failure>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Artifact {
    path: PathBuf,
    sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RunManifest {
    version: String,
    subcommand: String,
    /// Arguments after the program name, enough to rerun.
    args: Vec<String>,
    cwd: PathBuf,
    parameters: Value,
    inputs: Vec<Artifact>,
    outputs: Vec<Artifact>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
    exit_code: u8,
    wall_time_ms: u128,
}

/// What a subcommand did, for the manifest.
#[derive(Default)]
struct Outcome {
    parameters: Value,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    warnings: Vec<String>,
    exit_code: u8,
}

fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn read_table(path: &Path) -> CliResult<EmbeddingTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot read {}: {e}", path.display())))?;
    Ok(EmbeddingTable::from_json(&text)?)
}

fn curve_path(out: &Path, curve: &Option<PathBuf>) -> PathBuf {
    curve.clone().unwrap_or_else(|| out.with_extension("csv"))
}

fn limits(unsafe_mode: bool) -> CliResult<Limits> {
    if unsafe_mode {
        Ok(Limits::unlimited())
    } else {
        Ok(Limits::from_env()?)
    }
}

fn cmd_gen(kind: &GenKind, limits: &Limits) -> CliResult<Outcome> {
    let (file, out, parameters) = match kind {
        GenKind::Tree { height, branching, out } => {
            let tree = Tree::with_limits(*height, *branching, limits)?;
            (GraphFile::tree(&tree)?, out, json!({"kind": "tree", "height": height, "branching": branching}))
        }
        GenKind::Diamond { levels, branching, out } => {
            let d = Diamond::with_limits(*levels, *branching, limits)?;
            (GraphFile::diamond(&d), out, json!({"kind": "diamond", "levels": levels, "branching": branching}))
        }
        GenKind::Path { length, out } => {
            limits.check_vertices(*length as u128 + 1)?;
            let g = StGraph::path(*length)?;
            (GraphFile::path(&g), out, json!({"kind": "path", "length": length}))
        }
    };
    write_atomic(out, serde_json::to_string_pretty(&file)?.as_bytes())?;
    println!("{} graph with {} vertices written to {}", file.kind, file.vertices.len(), out.display());
    Ok(Outcome {
        parameters,
        outputs: vec![out.clone()],
        ..Outcome::default()
    })
}

fn bound_header(p: f64) -> String {
    format!("f(t/8)/(12·6^(1/{p}))")
}

fn curve_csv(curve: &CompressionCurve, bound_column: &str) -> String {
    let mut out = format!("t,rho,omega,{bound_column}\n");
    for pt in &curve.points {
        let rho = pt.rho.map(|r| r.to_string()).unwrap_or_default();
        let bound = pt.bound.map(|b| b.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", pt.t, rho, pt.omega, bound));
    }
    out
}

fn cmd_embed(args: &EmbedArgs, limits: &Limits) -> CliResult<Outcome> {
    let file: GraphFile = read_json(&args.graph)?;
    let tree = match file.load(limits)? {
        LoadedGraph::Tree { tree, .. } => tree,
        other => return Err(Failure::new(EXIT_INVALID, format!("embed needs a tree, got a {} graph", other.kind()))),
    };
    let profile = CompressionProfile::new(args.profile.clone(), args.p)?;
    let warnings = profile.warnings();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let emb = TreeEmbedding::with_limits(tree, profile, limits)?;
    let table = match args.perturb {
        Some(eps) => emb.perturbed_table(eps, args.seed)?,
        None => emb.table()?,
    };
    let lip = lipschitz_report(&emb);
    let comp = compression_report(&emb);
    let chain = chain_check(&emb);
    let curve = curve_path(&args.out, &args.curve);
    write_atomic(&args.out, table.to_json()?.as_bytes())?;
    write_atomic(&curve, curve_csv(&comp.curve, &bound_header(args.p)).as_bytes())?;
    println!(
        "lipschitz: measured {} bound {} ({})",
        lip.measured,
        lip.bound,
        if lip.holds { "pass" } else { "FAIL" }
    );
    println!(
        "compression: {} pairs, min margin {}, {} collisions ({})",
        comp.pairs_checked,
        comp.min_margin,
        comp.collisions,
        if comp.holds { "pass" } else { "FAIL" }
    );
    println!("chain: {} pairs, min slack {} ({})", chain.pairs_checked, chain.min_slack, if chain.holds { "pass" } else { "FAIL" });
    let mut exit_code = 0;
    if !(lip.holds && comp.holds && chain.holds) {
        exit_code = EXIT_BOUND_DEFECT;
        if let Some(v) = &comp.violation {
            eprintln!(
                "defect: pair ({}, {}) at tree distance {} has image distance {} below {}",
                v.a, v.b, v.tree_distance, v.image_distance, v.bound
            );
        }
    }
    Ok(Outcome {
        parameters: json!({
            "p": args.p,
            "profile": args.profile.to_string(),
            "perturb": args.perturb,
            "seed": args.seed,
            "lipschitz": lip,
            "compression": {"constant": comp.constant, "pairs_checked": comp.pairs_checked, "min_margin": comp.min_margin, "collisions": comp.collisions, "holds": comp.holds},
            "chain": chain,
        }),
        inputs: vec![args.graph.clone()],
        outputs: vec![args.out.clone(), curve],
        warnings,
        exit_code,
    })
}

fn load_pair(graph: &Path, embedding: &Path, limits: &Limits) -> CliResult<(LoadedGraph, EmbeddingTable)> {
    let file: GraphFile = read_json(graph)?;
    let loaded = file.load(limits)?;
    let table = read_table(embedding)?.aligned_to(loaded.graph())?;
    Ok((loaded, table))
}

fn cmd_analyze(args: &AnalyzeArgs, limits: &Limits) -> CliResult<Outcome> {
    let (loaded, table) = load_pair(&args.graph, &args.embedding, limits)?;
    let metric = FiniteMetric::from_graph(loaded.graph(), limits)?;
    let d = distortion(&table, &metric)?;
    let thresholds: Vec<f64> = (1..=metric.diameter() as u64).map(|t| t as f64).collect();
    let curve = compression_curve(&table, &metric, &thresholds)?;
    let report = json!({
        "lip": d.lip,
        "colip": d.colip,
        "dist": d.dist,
        "lip_pair": [table.ids[d.lip_pair.0], table.ids[d.lip_pair.1]],
        "colip_pair": [table.ids[d.colip_pair.0], table.ids[d.colip_pair.1]],
    });
    let csv = curve_path(&args.out, &args.curve);
    write_atomic(&args.out, serde_json::to_string_pretty(&report)?.as_bytes())?;
    write_atomic(&csv, curve.to_csv().as_bytes())?;
    println!("lip {} colip {} dist {}", d.lip, d.colip, d.dist);
    Ok(Outcome {
        parameters: report,
        inputs: vec![args.graph.clone(), args.embedding.clone()],
        outputs: vec![args.out.clone(), csv],
        ..Outcome::default()
    })
}

fn cmd_replay(cert_path: &Path, embedding: &Path) -> CliResult<Outcome> {
    let cert: Certificate = Certificate::from_json(
        &std::fs::read_to_string(cert_path)
            .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot read {}: {e}", cert_path.display())))?,
    )?;
    let table = read_table(embedding)?;
    let verified = replay_certificate(&cert, &table)?;
    println!("verified: {verified}");
    Ok(Outcome {
        parameters: json!({"replay": true, "verified": verified}),
        inputs: vec![cert_path.to_path_buf(), embedding.to_path_buf()],
        exit_code: if verified { 0 } else { EXIT_NOT_REPRODUCED },
        ..Outcome::default()
    })
}

fn cmd_certify(args: &CertifyArgs, limits: &Limits) -> CliResult<Outcome> {
    if let Some(cert) = &args.replay {
        return cmd_replay(cert, &args.embedding);
    }
    let (graph, mode, out) = match (&args.graph, args.mode, &args.out) {
        (Some(g), Some(m), Some(o)) => (g, m, o),
        _ => return Err(Failure::new(EXIT_INVALID, "--graph, --mode and --out are required")),
    };
    let constant = match (mode, args.cu, args.cd) {
        (Mode::Tree, Some(c), None) | (Mode::Diamond, None, Some(c)) => c,
        (Mode::Tree, None, None) | (Mode::Diamond, None, None) => 1.0,
        _ => return Err(Failure::new(EXIT_INVALID, "use --cu in tree mode and --cd in diamond mode")),
    };
    let mut config = match mode {
        Mode::Tree => CertifierConfig::tree(args.p, constant),
        Mode::Diamond => CertifierConfig::diamond(args.p, constant),
    };
    config.master = args.master;
    config.gamma = args.gamma;
    config.force_pipeline = args.force;
    config.limits = *limits;
    let file: GraphFile = read_json(graph)?;
    let loaded = file.load(limits)?;
    let table = read_table(&args.embedding)?;
    let cert = match (&loaded, mode) {
        (LoadedGraph::Tree { tree, .. }, Mode::Tree) => certify_tree(tree, &table, &config)?,
        (LoadedGraph::Diamond(d), Mode::Diamond) => certify_diamond(d, &table, &config)?,
        (other, _) => {
            return Err(Failure::new(
                EXIT_INVALID,
                format!("{mode:?} mode does not apply to a {} graph", other.kind()).to_lowercase(),
            ))
        }
    };
    write_atomic(out, cert.to_json()?.as_bytes())?;
    println!("verdict: {}", cert.verdict.as_str());
    println!("K = {} against bound {}", cert.constants.k, cert.bound);
    let r = &cert.required;
    match cert.verdict {
        Verdict::ScaleTooSmall => {
            let what = if mode == Mode::Tree { "height" } else { "levels" };
            println!(
                "required {what}: structural minimum {}, log2 path length {}, log2 branching {} (have {what} {}, branching {})",
                r.structural_minimum, r.path_length_log2, r.branching_log2, r.size, r.branching
            );
        }
        Verdict::WitnessContradiction => {
            if let Some(kind) = cert.contradiction {
                println!("contradiction: {kind:?}");
            }
        }
        Verdict::ExtractionFailed => {
            if let Some(f) = &cert.extraction {
                println!("extraction reached {} of {} branches at {}", f.achieved, f.target, f.blocking);
            }
        }
        Verdict::BoundAsserted => {}
    }
    let exit_code = match cert.verdict {
        Verdict::BoundAsserted | Verdict::ScaleTooSmall => 0,
        Verdict::WitnessContradiction => EXIT_CONTRADICTION,
        Verdict::ExtractionFailed => EXIT_EXTRACTION_FAILED,
    };
    Ok(Outcome {
        parameters: json!({
            "mode": mode,
            "p": args.p,
            "constant": constant,
            "master": args.master,
            "gamma": args.gamma,
            "force": args.force,
            "verdict": cert.verdict,
        }),
        inputs: vec![graph.clone(), args.embedding.clone()],
        outputs: vec![out.clone()],
        warnings: cert.notes.clone(),
        exit_code,
    })
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> SparsePoint {
    let coords: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SparsePoint::from_dense(&coords)
}

fn cmd_check(args: &CheckArgs) -> CliResult<Outcome> {
    if args.space != "lp" {
        return Err(Failure::new(EXIT_INVALID, format!("unsupported space {:?}", args.space)));
    }
    if args.samples == 0 {
        return Err(Failure::new(EXIT_INVALID, "--samples must be at least 1"));
    }
    if args.tips < 2 || args.dim == 0 {
        return Err(Failure::new(EXIT_INVALID, "need at least two tips and one dimension"));
    }
    let norm = Norm::new(args.p)?;
    let params = match args.configuration {
        Configuration::Umbel => SpaceParams::umbel(args.p, args.constant),
        Configuration::Diamond => SpaceParams::diamond(args.p, args.constant),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let tips: Vec<usize> = (2..2 + args.tips).collect();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut violations = 0u64;
    let mut worst: Option<(u64, Vec<SparsePoint>)> = None;
    for sample in 0..args.samples {
        let points: Vec<SparsePoint> = (0..2 + args.tips).map(|_| random_point(&mut rng, args.dim)).collect();
        let space = PointSet::new(norm, points);
        let r = match args.configuration {
            Configuration::Umbel => infrasup_umbel_residual(&space, 0, 1, &tips, &params)?,
            Configuration::Diamond => diamond_inequality_residual(&space, 0, 1, &tips, &params)?,
        };
        min = min.min(r.residual);
        if r.residual > max {
            max = r.residual;
            worst = Some((sample, space.points));
        }
        if r.violated() {
            violations += 1;
        }
    }
    let statement = if violations == 0 {
        format!("no violation found in {} samples (seed {})", args.samples, args.seed)
    } else {
        format!("{violations} violations found in {} samples (seed {})", args.samples, args.seed)
    };
    let (worst_sample, worst_points) = worst.expect("at least one sample");
    let report = json!({
        "space": args.space,
        "p": args.p,
        "constant": args.constant,
        "configuration": args.configuration,
        "dim": args.dim,
        "tips": args.tips,
        "samples": args.samples,
        "seed": args.seed,
        "min_residual": min,
        "max_residual": max,
        "violations": violations,
        "worst_sample": worst_sample,
        "worst_configuration": worst_points,
        "statement": statement,
    });
    write_atomic(&args.out, serde_json::to_string_pretty(&report)?.as_bytes())?;
    println!("{statement}; residual range [{min}, {max}]");
    Ok(Outcome {
        parameters: report,
        outputs: vec![args.out.clone()],
        ..Outcome::default()
    })
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Gen { .. } => "gen",
        Command::Embed(_) => "embed",
        Command::Analyze(_) => "analyze",
        Command::Certify(_) => "certify",
        Command::CheckInequality(_) => "check-inequality",
        Command::Rerun { .. } => "rerun",
    }
}

fn execute(cli: &Cli) -> CliResult<Outcome> {
    let limits = limits(cli.r#unsafe)?;
    match &cli.command {
        Command::Gen { kind } => cmd_gen(kind, &limits),
        Command::Embed(a) => cmd_embed(a, &limits),
        Command::Analyze(a) => cmd_analyze(a, &limits),
        Command::Certify(a) => cmd_certify(a, &limits),
        Command::CheckInequality(a) => cmd_check(a),
        Command::Rerun { manifest } => cmd_rerun(manifest),
    }
}

fn artifacts(paths: &[PathBuf]) -> CliResult<Vec<Artifact>> {
    paths
        .iter()
        .map(|p| {
            Ok(Artifact {
                path: p.clone(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

fn cmd_rerun(path: &Path) -> CliResult<Outcome> {
    let manifest: RunManifest = read_json(path)?;
    if manifest.subcommand == "rerun" {
        return Err(Failure::new(EXIT_INVALID, "cannot rerun a rerun manifest"));
    }
    let mut argv = vec!["umbelkit".to_string(), "--no-manifest".to_string()];
    argv.extend(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let here = std::env::current_dir()?;
    std::env::set_current_dir(&manifest.cwd)?;
    let result = execute(&cli);
    let compared = result.and_then(|outcome| {
        let fresh = artifacts(&outcome.outputs)?;
        Ok((outcome, fresh))
    });
    std::env::set_current_dir(here)?;
    let (outcome, fresh) = compared?;
    let recorded: BTreeMap<&Path, &str> = manifest
        .outputs
        .iter()
        .map(|a| (a.path.as_path(), a.sha256.as_str()))
        .collect();
    let mut mismatches = Vec::new();
    for a in &fresh {
        if recorded.get(a.path.as_path()) != Some(&a.sha256.as_str()) {
            mismatches.push(a.path.display().to_string());
        }
    }
    if fresh.len() != recorded.len() {
        mismatches.push("artifact list differs".into());
    }
    if outcome.exit_code != manifest.exit_code {
        mismatches.push(format!("exit code {} instead of {}", outcome.exit_code, manifest.exit_code));
    }
    if mismatches.is_empty() {
        println!("reproduced: {} artifacts byte-identical", fresh.len());
    } else {
        println!("not reproduced: {}", mismatches.join(", "));
    }
    Ok(Outcome {
        parameters: json!({"manifest": path, "mismatches": mismatches}),
        inputs: vec![path.to_path_buf()],
        exit_code: if mismatches.is_empty() { 0 } else { EXIT_NOT_REPRODUCED },
        ..Outcome::default()
    })
}

fn write_manifest(cli: &Cli, outcome: &Outcome, started: Instant) -> CliResult<()> {
    if cli.no_manifest || matches!(cli.command, Command::Rerun { .. }) {
        return Ok(());
    }
    let target = match (&cli.manifest, outcome.outputs.first()) {
        (Some(m), _) => m.clone(),
        (None, Some(first)) => {
            let mut name = first.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        }
        (None, None) => return Ok(()),
    };
    let args: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| a != "--no-manifest")
        .collect();
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: subcommand_name(&cli.command).to_string(),
        args,
        cwd: std::env::current_dir()?,
        parameters: outcome.parameters.clone(),
        inputs: artifacts(&outcome.inputs)?,
        outputs: artifacts(&outcome.outputs)?,
        warnings: outcome.warnings.clone(),
        exit_code: outcome.exit_code,
        wall_time_ms: started.elapsed().as_millis(),
    };
    write_atomic(&target, serde_json::to_string_pretty(&manifest)?.as_bytes())
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|outcome| {
        write_manifest(&cli, &outcome, started)?;
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
