//! Command-line surface: catalog enumeration with a versioned cache, bound
//! reports, Monte Carlo cell volumes, verification suites, and the
//! large-genus limit table.
//!
//! Every command emits a [`RunRecord`] — command name, parameters, a content
//! hash over parameters and outputs (timestamp excluded, so deterministic
//! commands reproduce the same hash), and the outputs themselves. `verify`
//! exits 0 only when every check in the suite passes; failures are listed as
//! machine-readable records naming the violated property. Exit codes: 0 ok,
//! 1 failed assertion, 2 usage or environment error.

use crate::bounds::{self, BoundValue, BoundsError, Variant};
use crate::decomposition::{self, DecompositionError, LinkingChoice};
use crate::mc::{self, McError, SamplerConfig};
use crate::penner::{self, PennerError, DEFAULT_SLICE_TOL};
use crate::ribbon_graph::{
    enumerate_trivalent, enumerate_trivalent_with_stats, GraphError, RibbonGraph,
};
use crate::wp_form::{self, WpFormError};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Version stamp of the canonical-labeling algorithm; bumping it invalidates
/// every cached catalog directory.
pub const CANON_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Penner(#[from] PennerError),
    #[error(transparent)]
    WpForm(#[from] WpFormError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error("could not write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("could not encode outputs: {0}")]
    Encode(#[from] serde_json::Error),
}

#[derive(Parser, Debug)]
#[command(
    name = "wpbound",
    version,
    about = "Cell volumes and closed-form volume bounds for moduli of punctured surfaces, via trivalent ribbon graphs"
)]
pub struct Cli {
    /// Directory for the catalog cache (overrides env WPBOUND_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate trivalent ribbon-graph classes into the catalog cache.
    Enumerate(EnumerateArgs),
    /// Closed-form bound report for one surface type.
    Bound(BoundArgs),
    /// Monte Carlo estimate of the per-cell volume integrals (one puncture).
    Volume(VolumeArgs),
    /// Run a verification suite; exit 0 iff every check passes.
    Verify(VerifyArgs),
    /// Large-genus table of ln(total upper bound)/(g ln g), CSV by default.
    Limits(LimitsArgs),
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(short = 'g', long)]
    pub genus: usize,
    #[arg(short = 'n', long)]
    pub punctures: usize,
    /// Refuse surface types needing more vertices than this.
    #[arg(long, default_value_t = 8)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(short = 'g', long)]
    pub genus: usize,
    #[arg(short = 'n', long)]
    pub punctures: usize,
    /// conclusion-n1 | general-n | assembled (default: the printed form for n).
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub cap: usize,
    /// Also write a CSV view of the report to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    #[arg(short = 'g', long)]
    pub genus: usize,
    #[arg(short = 'n', long, default_value_t = 1)]
    pub punctures: usize,
    #[arg(long, default_value_t = 200_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub shards: u32,
    #[arg(long, default_value_t = 8)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// triangle | lemmas | forms | stokes | decomposition | counting | all
    #[arg(long)]
    pub suite: String,
    #[arg(short = 'g', long, default_value_t = 1)]
    pub genus: usize,
    #[arg(short = 'n', long, default_value_t = 1)]
    pub punctures: usize,
    /// Sample count for the stochastic suites.
    #[arg(long, default_value_t = 1_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[arg(long)]
    pub gmax: usize,
    #[arg(short = 'n', long, default_value_t = 1)]
    pub punctures: usize,
    /// Write the CSV to this path instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Print the JSON run record instead of CSV.
    #[arg(long, default_value_t = false)]
    pub json: bool,
}

/// The envelope every command prints: parameters, outputs, and a hash that
/// is stable across re-runs of deterministic commands.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: Value,
    pub content_hash: String,
    pub pass: bool,
    pub outputs: Value,
    pub timestamp: String,
}

pub fn make_record(command: &str, parameters: Value, outputs: Value, pass: bool) -> RunRecord {
    let mut hasher = Sha256::new();
    hasher.update(command.as_bytes());
    hasher.update(parameters.to_string().as_bytes());
    hasher.update(outputs.to_string().as_bytes());
    RunRecord {
        command: command.to_string(),
        parameters,
        content_hash: format!("{:x}", hasher.finalize()),
        pass,
        outputs,
        timestamp: chrono::Utc::now().to_rfc3339(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

fn check(id: impl Into<String>, pass: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        id: id.into(),
        pass,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    /// Ids and details of the failing checks, duplicated for easy grepping.
    pub failures: Vec<CheckResult>,
    pub pass: bool,
}

impl SuiteReport {
    fn from_checks(suite: &str, checks: Vec<CheckResult>) -> Self {
        let failures: Vec<CheckResult> =
            checks.iter().filter(|c| !c.pass).cloned().collect();
        SuiteReport {
            suite: suite.to_string(),
            pass: failures.is_empty(),
            checks,
            failures,
        }
    }
}

/// Cache-directory resolution: flag, then `WPBOUND_CACHE_DIR`, then a local
/// default.
pub fn resolve_cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Ok(env) = std::env::var("WPBOUND_CACHE_DIR") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from(".wpbound-cache")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Run a parsed command line to completion, printing the record (or CSV) to
/// stdout. Returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(Outcome {
            record,
            csv,
            csv_to_stdout,
        }) => {
            if csv_to_stdout {
                print!("{}", csv.as_deref().unwrap_or(""));
            } else {
                match serde_json::to_string_pretty(&record) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: could not encode run record: {e}");
                        return 2;
                    }
                }
            }
            if record.pass {
                0
            } else {
                1
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

struct Outcome {
    record: RunRecord,
    csv: Option<String>,
    csv_to_stdout: bool,
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let cache = resolve_cache_dir(cli.cache_dir.as_deref());
    match &cli.command {
        Command::Enumerate(args) => cmd_enumerate(args, &cache),
        Command::Bound(args) => cmd_bound(args),
        Command::Volume(args) => cmd_volume(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Limits(args) => cmd_limits(args),
    }
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

fn class_json(index: usize, graph: &RibbonGraph) -> Value {
    let (sigma, alpha) = graph.permutations();
    json!({
        "index": index,
        "sigma": sigma,
        "alpha": alpha,
        "edges": graph.num_edges(),
        "vertices": graph.num_vertices(),
        "faces": graph.num_faces(),
        "genus": graph.genus(),
        "aut_order": graph.aut_order(),
    })
}

/// Catalog directory for one surface type under the current canonical-form
/// version.
pub fn catalog_dir(cache: &Path, g: usize, n: usize) -> PathBuf {
    cache
        .join(format!("catalog-v{CANON_VERSION}"))
        .join(format!("g{g}-n{n}"))
}

fn cmd_enumerate(args: &EnumerateArgs, cache: &Path) -> Result<Outcome, CliError> {
    let (classes, stats) = enumerate_trivalent_with_stats(args.genus, args.punctures, args.cap)?;
    let dir = catalog_dir(cache, args.genus, args.punctures);
    create_dir(&dir)?;

    let mut entries = Vec::new();
    for (k, graph) in classes.iter().enumerate() {
        let body = class_json(k, graph);
        let file = format!("class-{k:03}.json");
        write_file(&dir.join(&file), &serde_json::to_string_pretty(&body)?)?;
        entries.push(json!({
            "file": file,
            "aut_order": graph.aut_order(),
            "has_loop": graph.has_loop(),
        }));
    }
    let sum_inverse_aut: f64 = classes.iter().map(|x| 1.0 / x.aut_order() as f64).sum();
    let index = json!({
        "genus": args.genus,
        "punctures": args.punctures,
        "canon_version": CANON_VERSION,
        "count": classes.len(),
        "sum_inverse_aut": sum_inverse_aut,
        "pairings_scanned": stats.pairings_scanned,
        "labeled_valid": stats.labeled_valid,
        "entries": entries,
    });
    write_file(&dir.join("index.json"), &serde_json::to_string_pretty(&index)?)?;

    let parameters = json!({
        "genus": args.genus, "punctures": args.punctures, "cap": args.cap,
    });
    let outputs = json!({
        "directory": dir.to_string_lossy(),
        "index": index,
    });
    Ok(Outcome {
        record: make_record("enumerate", parameters, outputs, true),
        csv: None,
        csv_to_stdout: false,
    })
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

fn bound_csv(report: &bounds::BoundReport) -> String {
    let mut out = String::from("field,value,ln_value,formula\n");
    let mut row = |name: &str, b: &BoundValue| {
        let _ = writeln!(out, "{},{},{},{}", name, b.value, b.ln_value, b.formula);
    };
    row("per_graph_bound", &report.per_graph_bound);
    if let Some(b) = &report.per_graph_bound_n1 {
        row("per_graph_bound_n1", b);
    }
    if let Some(b) = &report.cell_count_asymptotic {
        row("cell_count_asymptotic", b);
    }
    row("triangulation_bound", &report.triangulation_bound);
    for (name, b) in &report.total_upper_variants {
        row(&format!("total_upper[{name}]"), b);
    }
    if let Some(b) = &report.penner_lower {
        row("penner_lower", b);
    }
    out
}

fn cmd_bound(args: &BoundArgs) -> Result<Outcome, CliError> {
    let variant = args.variant.as_deref().map(Variant::parse).transpose()?;
    let report = bounds::bound_report(args.genus, args.punctures, args.cap, variant)?;
    let csv_text = bound_csv(&report);
    if let Some(path) = &args.csv {
        write_file(path, &csv_text)?;
    }
    let parameters = json!({
        "genus": args.genus, "punctures": args.punctures,
        "variant": report.variant.name(), "cap": args.cap,
    });
    let outputs = serde_json::to_value(&report)?;
    Ok(Outcome {
        record: make_record("bound", parameters, outputs, true),
        csv: None,
        csv_to_stdout: false,
    })
}

// ---------------------------------------------------------------------------
// volume
// ---------------------------------------------------------------------------

fn cmd_volume(args: &VolumeArgs) -> Result<Outcome, CliError> {
    if args.punctures != 1 {
        return Err(CliError::Usage(format!(
            "volume estimation is implemented for one puncture; got n = {}",
            args.punctures
        )));
    }
    let classes = enumerate_trivalent(args.genus, 1, args.cap)?;
    let mut per_class = Vec::new();
    let mut weighted_mean = 0.0;
    let mut weighted_var = 0.0;
    for (k, graph) in classes.iter().enumerate() {
        let mut config = SamplerConfig::new(args.seed, args.samples);
        config.shards = args.shards;
        let estimate = mc::estimate_cell_volume_n1(graph, &config)?;
        let aut = graph.aut_order() as f64;
        weighted_mean += estimate.mean / aut;
        weighted_var += (estimate.std_error / aut).powi(2);
        per_class.push(json!({
            "class": k,
            "aut_order": graph.aut_order(),
            "estimate": estimate,
        }));
    }
    let mut outputs = json!({
        "per_class": per_class,
        "weighted_total": {
            "mean": weighted_mean,
            "std_error": weighted_var.sqrt(),
            "note": "sum of per-class estimates weighted by 1/|Aut|",
        },
    });
    if args.genus == 1 {
        // Informational cross-reference for the once-punctured torus in this
        // normalization; reported, never asserted.
        let reference = std::f64::consts::PI.powi(2) / 12.0;
        outputs["reference"] = json!({
            "label": "independently known once-punctured-torus value pi^2/12 in this convention (informational)",
            "value": reference,
            "weighted_total_minus_reference": weighted_mean - reference,
        });
    }
    let parameters = json!({
        "genus": args.genus, "punctures": 1, "samples": args.samples,
        "seed": args.seed, "shards": args.shards, "cap": args.cap,
    });
    Ok(Outcome {
        record: make_record("volume", parameters, outputs, true),
        csv: None,
        csv_to_stdout: false,
    })
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

fn suite_triangle(g: usize, samples: u64, seed: u64, cap: usize) -> Result<SuiteReport, CliError> {
    let classes = enumerate_trivalent(g, 1, cap)?;
    let mut checks = Vec::new();
    for (k, graph) in classes.iter().enumerate() {
        let config = SamplerConfig::new(seed, samples);
        let points = mc::sample_domain_points(graph, &config)?;
        let mut triangle_violations = 0usize;
        let mut min_lambda_violations = 0usize;
        let mut rho_upper_violations = 0usize;
        let mut domain_violations = 0usize;
        for lambda in &points {
            let d = penner::diagnostics(graph, lambda, DEFAULT_SLICE_TOL)?;
            if !d.triangle_ok {
                triangle_violations += 1;
            }
            if !d.min_lambda_gt_4 {
                min_lambda_violations += 1;
            }
            if !d.rho_upper_ok {
                rho_upper_violations += 1;
            }
            if !d.in_domain {
                domain_violations += 1;
            }
        }
        let total = points.len();
        checks.push(check(
            format!("sampler-nonempty/class-{k}"),
            total > 0,
            format!("{total} accepted points from {samples} draws"),
        ));
        checks.push(check(
            format!("triangle-inequalities/class-{k}"),
            triangle_violations == 0,
            format!("{triangle_violations} violations in {total} in-domain points"),
        ));
        checks.push(check(
            format!("min-lambda-above-4/class-{k}"),
            min_lambda_violations == 0,
            format!("{min_lambda_violations} violations in {total} in-domain points"),
        ));
        checks.push(check(
            format!("rho-below-8V-over-mu/class-{k}"),
            rho_upper_violations == 0,
            format!("{rho_upper_violations} violations in {total} in-domain points"),
        ));
        checks.push(check(
            format!("sampler-in-domain/class-{k}"),
            domain_violations == 0,
            format!("{domain_violations} yielded points failed the slice/domain test"),
        ));
    }
    Ok(SuiteReport::from_checks("triangle", checks))
}

fn suite_lemmas() -> Result<SuiteReport, CliError> {
    let reports = decomposition::standard_lemma_sweep()?;
    let mut checks = Vec::new();
    for name in ["trick1", "trick2", "trick3", "chainok", "wheelok"] {
        let group: Vec<_> = reports.iter().filter(|r| r.name == name).collect();
        let all_pass = group.iter().all(|r| r.pass);
        let min_margin = group
            .iter()
            .map(|r| r.bound - r.numeric)
            .fold(f64::INFINITY, f64::min);
        checks.push(check(
            format!("lemma-{name}"),
            all_pass,
            format!(
                "{} parameter settings, minimal margin to the constant {min_margin:.3e}",
                group.len()
            ),
        ));
    }
    let intout = decomposition::intout_theta_check(12.0)?;
    checks.push(check(
        "intout-theta",
        intout.pass,
        format!(
            "value {:.9} vs bound {:.9}, margin {:.3e}",
            intout.numeric,
            intout.bound,
            intout.bound - intout.numeric
        ),
    ));
    Ok(SuiteReport::from_checks("lemmas", checks))
}

fn random_frame(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn suite_forms(g: usize, samples: u64, seed: u64, cap: usize) -> Result<SuiteReport, CliError> {
    let classes = enumerate_trivalent(g, 1, cap)?;
    let mut checks = Vec::new();
    for (k, graph) in classes.iter().enumerate() {
        let n = graph.num_edges();
        let power = wp_form::top_power(graph)?;
        let coeff_bound = 1i64 << n;
        let max_coeff = power.max_abs_normalized();
        checks.push(check(
            format!("coefficient-bound-2^N/class-{k}"),
            max_coeff <= coeff_bound,
            format!("max |a_I| = {max_coeff}, bound 2^{n} = {coeff_bound}"),
        ));

        let b = wp_form::pairing_matrix(graph)?;
        let alternating = wp_form::n1_alternating(&power);
        checks.push(check(
            format!("alternating-shape/class-{k}"),
            alternating.is_some(),
            "one-puncture top power has N alternating coefficients".to_string(),
        ));

        let config = SamplerConfig::new(seed, samples);
        let points = mc::sample_domain_points(graph, &config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0f0f);
        let mut worst_rel = 0.0f64;
        let mut compared = 0usize;
        for lambda in &points {
            let frame = random_frame(n, power.degree, &mut rng);
            let via_pf = wp_form::density_on_frame(&b, lambda, &frame)?;
            let via_terms = wp_form::density_from_power(&power, lambda, &frame)?;
            let explicit = match alternating {
                Some((s, m)) => wp_form::density_n1_explicit(s, m, lambda, &frame)?,
                None => via_terms,
            };
            let scale = via_pf.abs().max(via_terms.abs()).max(explicit.abs());
            if scale < 1e-250 {
                continue;
            }
            let rel = ((via_pf - via_terms).abs() / scale)
                .max((via_terms - explicit).abs() / scale);
            worst_rel = worst_rel.max(rel);
            compared += 1;
        }
        checks.push(check(
            format!("pfaffian-vs-explicit-density/class-{k}"),
            compared > 0 && worst_rel <= 1e-9,
            format!("worst relative deviation {worst_rel:.3e} over {compared} in-domain points"),
        ));
    }
    Ok(SuiteReport::from_checks("forms", checks))
}

fn suite_stokes(g: usize, samples: u64, seed: u64, cap: usize) -> Result<SuiteReport, CliError> {
    let classes = enumerate_trivalent(g, 1, cap)?;
    let mut checks = Vec::new();
    for (k, graph) in classes.iter().enumerate() {
        let config = SamplerConfig::new(seed, samples);
        let points = mc::sample_domain_points(graph, &config)?;
        let n_faces = graph.num_faces();
        let n_edges = graph.num_edges();
        let mut ratio_violations = 0usize;
        let mut fd_failures = 0usize;
        let mut worst_gap = 0.0f64;
        for lambda in &points {
            let rho = penner::rho_faces(graph, lambda);
            for i in 0..n_faces {
                for e in 0..n_edges {
                    let analytic = penner::drho_dlambda(graph, lambda, i, e);
                    let fd = central_difference(graph, lambda, i, e);
                    let floor = 1e-8 * rho[i] / lambda[e];
                    if (analytic - fd).abs() > floor + 1e-6 * fd.abs() {
                        fd_failures += 1;
                    }
                    if !graph.has_loop() {
                        let gap = analytic.abs() - rho[i] / lambda[e];
                        worst_gap = worst_gap.max(gap);
                        if gap > 1e-9 * rho[i] / lambda[e] {
                            ratio_violations += 1;
                        }
                    }
                }
            }
        }
        let total = points.len();
        checks.push(check(
            format!("derivative-matches-finite-difference/class-{k}"),
            fd_failures == 0,
            format!("{fd_failures} disagreements at {total} points"),
        ));
        if graph.has_loop() {
            checks.push(check(
                format!("derivative-ratio-bound/class-{k}"),
                true,
                "skipped: the ratio bound is stated for loop-free graphs".to_string(),
            ));
        } else {
            checks.push(check(
                format!("derivative-ratio-bound/class-{k}"),
                ratio_violations == 0,
                format!(
                    "{ratio_violations} violations at {total} points, worst excess {worst_gap:.3e}"
                ),
            ));
        }
    }
    Ok(SuiteReport::from_checks("stokes", checks))
}

/// Second-order central difference of `ρ_i` in `λ_e`.
fn central_difference(graph: &RibbonGraph, lambda: &[f64], face: usize, e: usize) -> f64 {
    let h = 1e-5 * lambda[e];
    let mut up = lambda.to_vec();
    up[e] += h;
    let mut down = lambda.to_vec();
    down[e] -= h;
    (penner::rho_faces(graph, &up)[face] - penner::rho_faces(graph, &down)[face]) / (2.0 * h)
}

fn suite_decomposition(
    g: usize,
    n: usize,
    samples: u64,
    seed: u64,
    cap: usize,
) -> Result<SuiteReport, CliError> {
    let classes = enumerate_trivalent(g, n, cap)?;
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (k, graph) in classes.iter().enumerate() {
        let v = graph.num_vertices();
        let choices: Vec<LinkingChoice> = if v <= 4 {
            LinkingChoice::enumerate_all(graph)
        } else {
            let total = 3u64.pow(v as u32);
            (0..100)
                .map(|_| LinkingChoice::nth(graph, rng.gen_range(0..total)))
                .collect()
        };
        let mut failures = 0usize;
        let mut runs = 0usize;
        for choice in &choices {
            for mu in 0..graph.num_edges() {
                runs += 1;
                match decomposition::decompose(graph, choice, mu) {
                    Ok(d) => {
                        if !d.is_partition(graph) || d.total_edges() != graph.num_edges() {
                            failures += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
        }
        checks.push(check(
            format!("decomposition-partitions-edges/class-{k}"),
            failures == 0,
            format!(
                "{failures} failures over {runs} (choice, seed-edge) runs ({} choices)",
                choices.len()
            ),
        ));

        // Linked edges have λ-ratio in [1/2, 2] at triangle-respecting points.
        let mut ratio_violations = 0usize;
        let mut accepted = 0usize;
        let mut attempts = 0u64;
        while accepted < samples as usize && attempts < 50 * samples {
            attempts += 1;
            let lambda: Vec<f64> = (0..graph.num_edges())
                .map(|_| rng.gen_range(1.0..60.0))
                .collect();
            if !penner::triangle_inequalities_hold(graph, &lambda) {
                continue;
            }
            accepted += 1;
            let choice = LinkingChoice::from_lambda(graph, &lambda);
            for e in 0..graph.num_edges() {
                for f in 0..graph.num_edges() {
                    if e != f && decomposition::linked(graph, &choice, e, f) {
                        let ratio = lambda[e] / lambda[f];
                        if !(0.5..=2.0).contains(&ratio) {
                            ratio_violations += 1;
                        }
                    }
                }
            }
        }
        checks.push(check(
            format!("linked-ratio-bound/class-{k}"),
            ratio_violations == 0 && accepted > 0,
            format!("{ratio_violations} violations over {accepted} triangle-respecting points"),
        ));
    }
    Ok(SuiteReport::from_checks("decomposition", checks))
}

fn suite_counting(g: usize, n: usize, cap: usize) -> Result<SuiteReport, CliError> {
    let report = bounds::verify_counting_recursion(g, n, cap)?;
    let checks = vec![
        check(
            "count-recursion-inequality",
            report.inequality_holds,
            format!(
                "|T({g},{n})| = {} < {} = N^2/2 x |T({g},{})|",
                report.count_n,
                report.recursion_rhs,
                n - 1
            ),
        ),
        check(
            "contraction-closure",
            report.contraction_closed,
            format!(
                "{} contractions over {} graphs all landed in the smaller catalog",
                report.contractions_checked, report.graphs_checked
            ),
        ),
        check(
            "contractible-edge-exists",
            report.every_graph_contractible,
            "every graph has an edge joining two distinct punctures".to_string(),
        ),
    ];
    Ok(SuiteReport::from_checks("counting", checks))
}

fn merge_suites(name: &str, parts: Vec<SuiteReport>) -> SuiteReport {
    let mut checks = Vec::new();
    for part in parts {
        for c in part.checks {
            checks.push(CheckResult {
                id: format!("{}/{}", part.suite, c.id),
                ..c
            });
        }
    }
    SuiteReport::from_checks(name, checks)
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let report = match args.suite.as_str() {
        "triangle" => {
            require_one_puncture(args, "triangle")?;
            suite_triangle(args.genus, args.samples, args.seed, args.cap)?
        }
        "lemmas" => suite_lemmas()?,
        "forms" => {
            require_one_puncture(args, "forms")?;
            suite_forms(args.genus, args.samples, args.seed, args.cap)?
        }
        "stokes" => {
            require_one_puncture(args, "stokes")?;
            suite_stokes(args.genus, args.samples, args.seed, args.cap)?
        }
        "decomposition" => suite_decomposition(
            args.genus,
            args.punctures,
            args.samples,
            args.seed,
            args.cap,
        )?,
        "counting" => suite_counting(args.genus, args.punctures, args.cap)?,
        "all" => {
            // Desk-scale defaults: the sampling suites on the one-puncture
            // torus, decomposition and counting on every small surface type.
            let samples = args.samples;
            let mut parts = vec![
                suite_triangle(1, samples, args.seed, args.cap)?,
                suite_forms(1, samples.min(1_000), args.seed, args.cap)?,
                suite_stokes(1, samples.min(1_000), args.seed, args.cap)?,
                suite_lemmas()?,
            ];
            for (g, n) in [(1, 1), (0, 3), (1, 2), (0, 4)] {
                parts.push(suite_decomposition(g, n, samples.min(1_000), args.seed, args.cap)?);
            }
            for (g, n) in [(1, 2), (0, 4)] {
                parts.push(suite_counting(g, n, args.cap)?);
            }
            merge_suites("all", parts)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite {other:?}; expected triangle, lemmas, forms, stokes, decomposition, counting, or all"
            )))
        }
    };
    let parameters = json!({
        "suite": args.suite, "genus": args.genus, "punctures": args.punctures,
        "samples": args.samples, "seed": args.seed, "cap": args.cap,
    });
    let pass = report.pass;
    let outputs = serde_json::to_value(&report)?;
    Ok(Outcome {
        record: make_record("verify", parameters, outputs, pass),
        csv: None,
        csv_to_stdout: false,
    })
}

fn require_one_puncture(args: &VerifyArgs, suite: &str) -> Result<(), CliError> {
    if args.punctures != 1 {
        return Err(CliError::Usage(format!(
            "the {suite} suite samples the one-puncture domain; got n = {}",
            args.punctures
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// limits
// ---------------------------------------------------------------------------

fn limits_csv(rows: &[bounds::LimitRow]) -> String {
    let mut out = String::from("g,ln_total_upper,ratio\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{}", row.g, row.ln_total_upper, row.ratio);
    }
    out
}

fn cmd_limits(args: &LimitsArgs) -> Result<Outcome, CliError> {
    let rows = bounds::limit_report(args.gmax, args.punctures)?;
    let decreasing = rows.windows(2).all(|w| w[1].ratio < w[0].ratio);
    let csv_text = limits_csv(&rows);
    if let Some(path) = &args.csv {
        write_file(path, &csv_text)?;
    }
    let parameters = json!({
        "gmax": args.gmax, "punctures": args.punctures,
    });
    let outputs = json!({
        "rows": rows,
        "ratio_strictly_decreasing": decreasing,
        "first": rows.first().map(|r| r.ratio),
        "last": rows.last().map(|r| r.ratio),
    });
    let csv_to_stdout = args.csv.is_none() && !args.json;
    Ok(Outcome {
        record: make_record("limits", parameters, outputs, decreasing),
        csv: Some(csv_text),
        csv_to_stdout,
    })
}
