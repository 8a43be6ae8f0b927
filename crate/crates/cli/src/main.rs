//! `coarsec`: certify essential connectivity of finite coarse spaces.
//!
//! Exit codes: 0 complete or consistent, 1 usage or data error, 2 incomplete
//! within the schedule, 3 internal inconsistency.

mod output;
mod spacefile;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use coarsec_core::certify::{
    certify_essential_connectivity, compare_flavors, retract_transfer_experiment, CertifyOptions,
    TransferOutcome,
};
use coarsec_core::coarse::PointMap;
use coarsec_core::complexes::{build_flavor, Flavor, Space};
use coarsec_core::homology::{compute_betti, induced_simplicial_map, Coeff};
use coarsec_core::subdivision::{gamma_n, subdivide_n};
use serde::Serialize;

use output::{CertificateFile, ComparisonFile, RunParams, TOOL, VERSION};
use spacefile::{cap_from_env, load, LoadedSpace, FORMAT};

const EXIT_INCOMPLETE: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "coarsec",
    version,
    about = "Coarse connectivity certificates for finite windows"
)]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a space and the complexes of each stage.
    Build(BuildArgs),
    /// Certify essential (n-1)-connectedness along a schedule.
    Certify(CertifyArgs),
    /// Run all four flavors, check the sandwich bounds and draw a barcode.
    #[command(alias = "plot")]
    Compare(CompareArgs),
    /// Iterated barycentric subdivision of one stage, with the last-vertex map check.
    Subdivide(SubdivideArgs),
    /// Check a coarse retract and transfer the certificate from X to Y.
    RetractCheck(RetractArgs),
    /// Re-run a certificate and compare it byte for byte.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Space file (JSON, "format": 1).
    #[arg(long)]
    input: PathBuf,
    /// Thresholds `1,2,4` or an inclusive range `1:5`; defaults to the file's schedule.
    #[arg(long)]
    schedule: Option<String>,
}

#[derive(Args, Clone)]
struct CertArgs {
    /// Degree bound n: degrees 0..n-1 are certified.
    #[arg(long = "degree", short = 'n', default_value_t = 1)]
    degree: usize,
    #[arg(long, default_value = "z2")]
    coeff: Coeff,
    /// Interior margin: source cycles use points at least this deep in the window.
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    /// Simplex dimension cap, at least the degree bound (defaults to it).
    #[arg(long)]
    max_dim: Option<usize>,
    /// State budget per loop for the π₁ filling search (0 disables it).
    #[arg(long, default_value_t = 2000)]
    pi1_budget: usize,
    /// Record wall-clock time per stage (breaks byte-identical reruns).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "c-vr")]
    flavor: Flavor,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, default_value = "z2")]
    coeff: Coeff,
    /// Write the summary here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the distance matrix as CSV.
    #[arg(long)]
    emit_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    cert: CertArgs,
    #[arg(long, default_value = "c-vr")]
    flavor: Flavor,
    /// Certificate file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Betti CSV; defaults to `<out>.betti.csv` next to the certificate.
    #[arg(long)]
    betti: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    cert: CertArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SubdivideArgs {
    #[arg(long)]
    input: PathBuf,
    /// Threshold of the complex to subdivide.
    #[arg(long)]
    threshold: f64,
    #[arg(long, default_value = "c-vr")]
    flavor: Flavor,
    #[arg(long, default_value_t = 1)]
    levels: usize,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, default_value = "z2")]
    coeff: Coeff,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RetractArgs {
    /// The ambient space X.
    #[arg(long)]
    x: PathBuf,
    /// The retract Y; its labels must be labels of X.
    #[arg(long)]
    y: PathBuf,
    /// Schedule for X; also used for Y unless `--y-schedule` is given.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    y_schedule: Option<String>,
    /// Retraction r: X → Y as a JSON object from X labels to Y labels;
    /// defaults to the nearest point of Y in X's metric (first one on ties).
    #[arg(long)]
    retraction: Option<PathBuf>,
    #[command(flatten)]
    cert: CertArgs,
    #[arg(long, default_value = "c-vr")]
    flavor: Flavor,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    certificate: PathBuf,
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Build(a) => cmd_build(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Subdivide(a) => cmd_subdivide(a),
        Command::RetractCheck(a) => cmd_retract(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => output::write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn options(
    cert: &CertArgs,
    flavor: Flavor,
    schedule_id: &str,
) -> Result<(CertifyOptions, RunParams)> {
    ensure!(cert.degree >= 1, "--degree must be at least 1");
    ensure!(
        cert.margin.is_finite() && cert.margin >= 0.0,
        "--margin must be a nonnegative number"
    );
    let max_dim = cert.max_dim.unwrap_or(cert.degree);
    ensure!(
        max_dim >= cert.degree,
        "--max-dim {max_dim} is below the degree bound {}",
        cert.degree
    );
    let coeff = cert.coeff.validate()?;
    let mut o = CertifyOptions::new(cert.degree, flavor);
    o.schedule_id = schedule_id.to_string();
    o.coeff = coeff;
    o.margin = cert.margin;
    o.dim_cap = Some(max_dim);
    o.pi1_budget = cert.pi1_budget;
    o.timings = cert.timings;
    let params = RunParams {
        degree: cert.degree,
        schedule: schedule_id.to_string(),
        coeff: coeff.to_string(),
        margin: cert.margin,
        max_dim,
        pi1_budget: cert.pi1_budget,
    };
    Ok((o, params))
}

fn load_input(path: &Path) -> Result<LoadedSpace> {
    load(path, cap_from_env()?)
}

fn cmd_certify(a: CertifyArgs) -> Result<u8> {
    let space = load_input(&a.common.input)?;
    let (schedule, id) = space.schedule(a.common.schedule.as_deref())?;
    let (opts, params) = options(&a.cert, a.flavor, &id)?;
    let cert = certify_essential_connectivity(&schedule, &space.depth, &opts)?;
    let file = CertificateFile {
        format: FORMAT,
        tool: TOOL,
        version: VERSION,
        input_sha256: &space.digest,
        params: &params,
        certificate: &cert,
    };
    emit(a.out.as_deref(), &output::to_json(&file)?)?;
    let betti_path = a
        .betti
        .or_else(|| a.out.as_ref().map(|p| p.with_extension("betti.csv")));
    if let Some(p) = betti_path {
        output::write(&p, &output::betti_csv(&cert))?;
    }
    for st in cert.stages.iter().filter(|s| s.witness.is_none()) {
        log::info!("stage {}: none within schedule", st.stage);
    }
    Ok(if cert.complete { 0 } else { EXIT_INCOMPLETE })
}

fn cmd_compare(a: CompareArgs) -> Result<u8> {
    let space = load_input(&a.common.input)?;
    let (schedule, id) = space.schedule(a.common.schedule.as_deref())?;
    let (opts, params) = options(&a.cert, Flavor::ComplexVr, &id)?;
    let cmp = compare_flavors(&schedule, &space.depth, &opts)?;
    let file = ComparisonFile {
        format: FORMAT,
        tool: TOOL,
        version: VERSION,
        input_sha256: &space.digest,
        params: &params,
        comparison: &cmp,
    };
    output::write(&a.out_dir.join("report.json"), &output::to_json(&file)?)?;
    output::write(
        &a.out_dir.join("witnesses.csv"),
        &output::witness_table(&cmp),
    )?;
    output::write(&a.out_dir.join("barcode.svg"), &output::barcode_svg(&cmp))?;
    print!("{}", output::witness_table(&cmp));
    for w in &cmp.warnings {
        eprintln!("warning: {w}");
    }
    for d in &cmp.discrepancies {
        eprintln!("inconsistency: {d}");
    }
    Ok(if cmp.consistent() {
        0
    } else {
        EXIT_INCONSISTENT
    })
}

#[derive(Serialize)]
struct BuildStage {
    stage: usize,
    pairs: usize,
    simplices: Vec<usize>,
    betti: Vec<usize>,
    torsion: Vec<Vec<u64>>,
}

#[derive(Serialize)]
struct BuildSummary<'a> {
    format: u32,
    tool: &'static str,
    version: &'static str,
    input_sha256: &'a str,
    points: usize,
    labels: &'a [String],
    diameter: Option<f64>,
    flavor: Flavor,
    max_dim: usize,
    schedule: Option<String>,
    stages: Vec<BuildStage>,
}

fn cmd_build(a: BuildArgs) -> Result<u8> {
    let space = load_input(&a.common.input)?;
    let sched = if a.common.schedule.is_some() || space.file_schedule.is_some() {
        Some(space.schedule(a.common.schedule.as_deref())?)
    } else {
        None
    };
    let coeff = a.coeff.validate()?;
    let stages = match &sched {
        Some((s, _)) => s
            .stages()
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let sp = build_flavor(u, a.flavor, a.max_dim)?;
                let b = compute_betti(&sp, coeff)?;
                Ok(BuildStage {
                    stage: i + 1,
                    pairs: u.pair_count(),
                    simplices: sp.counts(),
                    betti: b.betti,
                    torsion: b.torsion,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let summary = BuildSummary {
        format: FORMAT,
        tool: TOOL,
        version: VERSION,
        input_sha256: &space.digest,
        points: space.ground.len(),
        labels: space.ground.labels(),
        diameter: space.window.as_ref().map(|w| w.diameter()),
        flavor: a.flavor,
        max_dim: a.max_dim,
        schedule: sched.as_ref().map(|(_, id)| id.clone()),
        stages,
    };
    emit(a.out.as_deref(), &output::to_json(&summary)?)?;
    if let Some(p) = a.emit_matrix {
        let w = space
            .window
            .as_ref()
            .context("--emit-matrix needs a metric space")?;
        let n = w.len();
        let mut s = format!("#points: {}\n", w.ground().labels().join(","));
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| w.dist(i, j).to_string()).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        output::write(&p, &s)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct SubdivisionLevel {
    level: usize,
    simplices: Vec<usize>,
    betti: Vec<usize>,
}

#[derive(Serialize)]
struct SubdivisionSummary<'a> {
    format: u32,
    tool: &'static str,
    version: &'static str,
    input_sha256: &'a str,
    threshold: f64,
    flavor: Flavor,
    coeff: String,
    levels: Vec<SubdivisionLevel>,
    /// Per degree: whether the last-vertex map from the finest level to the
    /// base induces an isomorphism.
    gamma_isomorphism: Vec<Option<bool>>,
}

fn cmd_subdivide(a: SubdivideArgs) -> Result<u8> {
    ensure!(
        matches!(a.flavor, Flavor::ComplexVr | Flavor::ComplexCech),
        "only simplicial complexes can be subdivided (use c-vr or c-cech)"
    );
    ensure!(a.max_dim >= 1, "--max-dim must be at least 1");
    let space = load_input(&a.input)?;
    let w = space
        .window
        .as_ref()
        .context("subdivide needs a metric space")?;
    let coeff = a.coeff.validate()?;
    let Space::Complex(x) = build_flavor(&w.threshold(a.threshold), a.flavor, a.max_dim)? else {
        unreachable!("complex flavors build complexes")
    };
    let sd = subdivide_n(&x, a.levels)?;
    let levels = (0..=sd.level())
        .map(|i| {
            let c = sd.at(i)?;
            Ok(SubdivisionLevel {
                level: i,
                simplices: c.counts(),
                betti: compute_betti(&Space::Complex(c.clone()), coeff)?.betti,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let g = gamma_n(&sd, 0, sd.level())?;
    let gamma_isomorphism = (0..a.max_dim)
        .map(|k| Ok(induced_simplicial_map(&g, k, coeff)?.is_isomorphism()))
        .collect::<Result<Vec<_>>>()?;
    let ok = gamma_isomorphism.iter().all(|v| v != &Some(false));
    let summary = SubdivisionSummary {
        format: FORMAT,
        tool: TOOL,
        version: VERSION,
        input_sha256: &space.digest,
        threshold: a.threshold,
        flavor: a.flavor,
        coeff: coeff.to_string(),
        levels,
        gamma_isomorphism,
    };
    emit(a.out.as_deref(), &output::to_json(&summary)?)?;
    Ok(if ok { 0 } else { EXIT_INCONSISTENT })
}

fn retraction_map(x: &LoadedSpace, y: &LoadedSpace, path: Option<&Path>) -> Result<PointMap> {
    let images = match path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let table: std::collections::BTreeMap<String, String> =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            x.ground
                .labels()
                .iter()
                .map(|l| {
                    let t = table
                        .get(l)
                        .with_context(|| format!("retraction misses point {l:?}"))?;
                    y.ground
                        .position(t)
                        .with_context(|| format!("{t:?} is not a point of Y"))
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => {
            let w = x
                .window
                .as_ref()
                .context("nearest-point retraction needs a metric on X")?;
            let in_x = y
                .ground
                .labels()
                .iter()
                .map(|l| {
                    x.ground
                        .position(l)
                        .with_context(|| format!("{l:?} is a point of Y but not of X"))
                })
                .collect::<Result<Vec<_>>>()?;
            (0..x.ground.len())
                .map(|p| {
                    let mut best = 0;
                    for (q, &xq) in in_x.iter().enumerate() {
                        if w.dist(p, xq) < w.dist(p, in_x[best]) {
                            best = q;
                        }
                    }
                    best
                })
                .collect()
        }
    };
    Ok(PointMap::new(&x.ground, &y.ground, images)?)
}

#[derive(Serialize)]
struct RetractFile<'a> {
    format: u32,
    tool: &'static str,
    version: &'static str,
    x_sha256: &'a str,
    y_sha256: &'a str,
    params: &'a RunParams,
    y_schedule: &'a str,
    report: &'a coarsec_core::certify::RetractTransferReport,
}

fn cmd_retract(a: RetractArgs) -> Result<u8> {
    let x = load_input(&a.x)?;
    let y = load_input(&a.y)?;
    ensure!(!y.ground.is_empty(), "Y is empty");
    let (xs, xid) = x.schedule(a.schedule.as_deref())?;
    let (ys, yid) = y.schedule(a.y_schedule.as_deref().or(a.schedule.as_deref()))?;
    let i = PointMap::inclusion_by_label(&y.ground, &x.ground)?;
    let r = retraction_map(&x, &y, a.retraction.as_deref())?;
    let (opts, params) = options(&a.cert, a.flavor, &xid)?;
    let report = retract_transfer_experiment(&i, &r, &xs, &x.depth, &ys, &y.depth, &opts)?;
    let file = RetractFile {
        format: FORMAT,
        tool: TOOL,
        version: VERSION,
        x_sha256: &x.digest,
        y_sha256: &y.digest,
        params: &params,
        y_schedule: &yid,
        report: &report,
    };
    emit(a.out.as_deref(), &output::to_json(&file)?)?;
    eprintln!("{}", report.note);
    Ok(match report.outcome {
        TransferOutcome::Holds => 0,
        TransferOutcome::Counterexample => EXIT_INCONSISTENT,
        TransferOutcome::RetractFailsOnWindow | TransferOutcome::SourceIncomplete => {
            EXIT_INCOMPLETE
        }
    })
}

#[derive(serde::Deserialize)]
struct StoredCertificate {
    format: u32,
    input_sha256: String,
    params: StoredParams,
    certificate: StoredHead,
}

#[derive(serde::Deserialize)]
struct StoredParams {
    degree: usize,
    schedule: String,
    coeff: String,
    margin: f64,
    max_dim: usize,
    pi1_budget: usize,
}

#[derive(serde::Deserialize)]
struct StoredHead {
    flavor: Flavor,
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&a.certificate)
        .with_context(|| format!("reading {}", a.certificate.display()))?;
    let stored: StoredCertificate =
        serde_json::from_str(&text).context("not a certificate file")?;
    ensure!(
        stored.format == FORMAT,
        "unsupported certificate format {}",
        stored.format
    );
    let space = load_input(&a.input)?;
    if space.digest != stored.input_sha256 {
        bail!(
            "input digest {} does not match the certificate's {}",
            space.digest,
            stored.input_sha256
        );
    }
    let flag = stored
        .params
        .schedule
        .strip_prefix("thresholds:")
        .map(str::to_string);
    let (schedule, id) = space.schedule(flag.as_deref())?;
    ensure!(
        id == stored.params.schedule,
        "schedule {id} does not match {}",
        stored.params.schedule
    );
    let cert = CertArgs {
        degree: stored.params.degree,
        coeff: stored.params.coeff.parse()?,
        margin: stored.params.margin,
        max_dim: Some(stored.params.max_dim),
        pi1_budget: stored.params.pi1_budget,
        timings: false,
    };
    let (opts, params) = options(&cert, stored.certificate.flavor, &id)?;
    let fresh = certify_essential_connectivity(&schedule, &space.depth, &opts)?;
    let again = output::to_json(&CertificateFile {
        format: FORMAT,
        tool: TOOL,
        version: VERSION,
        input_sha256: &space.digest,
        params: &params,
        certificate: &fresh,
    })?;
    if again == text {
        println!("ok: certificate reproduced byte for byte");
        Ok(0)
    } else {
        eprintln!("certificate differs from a fresh run");
        Ok(EXIT_INCONSISTENT)
    }
}
