//! `wgrass`: fixtures, projections, geodesics, pair indices, intertwiners
//! and invariant suites from the command line.
//!
//! Relative file arguments are resolved against `WGRASS_DIR` when that
//! environment variable is set. Exit codes: 0 success, 2 precondition
//! failure, 3 numerical failure, 4 I/O or format failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use wgrass::fixtures::{self, FixtureSpec};
use wgrass::grassmann::finsler_length_sampled;
use wgrass::io::{self, WorkspaceDoc};
use wgrass::suites::{self, SuiteConfig};
use wgrass::{CompatibleProjection, Error, ErrorClass, RestrictedContext, WeightedSpace};

/// Environment variable naming the default directory for workspace files.
const DIR_ENV: &str = "WGRASS_DIR";

#[derive(Parser)]
#[command(name = "wgrass", version, about = "Weighted Grassmannian toolkit")]
struct Cli {
    /// Scale factor applied to the global tolerance model.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol: f64,

    /// Emit machine-readable JSON instead of text reports.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model-space fixture and write it as a workspace file.
    Fixture(FixtureArgs),
    /// Project onto the span of a basis, writing the compatible projection.
    Project(ProjectArgs),
    /// Geodesic between two compatible projections.
    Geodesic(GeodesicArgs),
    /// Index of a projection pair by the kernel and rank formulas.
    Index(PairArgs),
    /// A-unitary intertwiner between an index-zero projection pair.
    Intertwine(IntertwineArgs),
    /// Run randomized invariant suites.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureKind {
    SturmLiouville,
    SobolevLine,
    MultByT,
    CustomSpectrum,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long)]
    kind: FixtureKind,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Kind-specific parameters as `name=value` pairs
    /// (sobolev-line: `half_width=4.0`; custom-spectrum:
    /// `spectrum=1.0,0.5,0.25`).
    #[arg(long = "param")]
    params: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long)]
    workspace: PathBuf,
    /// Matrix file whose columns span the target subspace.
    #[arg(long)]
    basis: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GeodesicArgs {
    #[arg(long)]
    workspace: PathBuf,
    #[arg(long = "from")]
    from: PathBuf,
    #[arg(long = "to")]
    to: PathBuf,
    /// Also integrate the sampled Finsler length at this many nodes.
    #[arg(long)]
    samples: Option<usize>,
    /// Schatten exponent for lengths (use `inf` for the operator norm).
    #[arg(short, default_value = "inf")]
    p: String,
    /// Where to write the geodesic exponent matrix.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    workspace: PathBuf,
    #[arg(long)]
    q1: PathBuf,
    #[arg(long)]
    q2: PathBuf,
}

#[derive(Args)]
struct IntertwineArgs {
    #[arg(long)]
    workspace: PathBuf,
    #[arg(long)]
    q1: PathBuf,
    #[arg(long)]
    q2: PathBuf,
    /// Where to write the intertwiner matrix.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteChoice {
    Kernel,
    Weighted,
    Grassmann,
    Restricted,
    Poisson,
    All,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value_t = SuiteChoice::All)]
    suite: SuiteChoice,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e.class() {
                ErrorClass::Precondition => ExitCode::from(2),
                ErrorClass::Numerical => ExitCode::from(3),
                ErrorClass::Io => ExitCode::from(4),
            }
        }
    }
}

fn run(cli: &Cli) -> wgrass::Result<()> {
    match &cli.command {
        Command::Fixture(args) => cmd_fixture(cli, args),
        Command::Project(args) => cmd_project(cli, args),
        Command::Geodesic(args) => cmd_geodesic(cli, args),
        Command::Index(args) => cmd_index(cli, args),
        Command::Intertwine(args) => cmd_intertwine(cli, args),
        Command::Check(args) => cmd_check(cli, args),
    }
}

/// Resolves a possibly relative path against `WGRASS_DIR`.
fn resolve(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn parse_params(raw: &[String]) -> wgrass::Result<Vec<(String, String)>> {
    raw.iter()
        .map(|entry| {
            entry
                .split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| {
                    Error::InvalidSpec(format!("parameter {entry:?} is not of the form name=value"))
                })
        })
        .collect()
}

fn parse_exponent(text: &str) -> wgrass::Result<f64> {
    if text.eq_ignore_ascii_case("inf") || text.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    text.parse::<f64>()
        .map_err(|_| Error::InvalidSpec(format!("invalid Schatten exponent {text:?}")))
}

fn load_space(cli: &Cli, path: &Path) -> wgrass::Result<(WorkspaceDoc, WeightedSpace)> {
    let doc = io::read_workspace(&resolve(path))?;
    let space = doc.to_space()?;
    let space = if cli.tol != 1.0 {
        WeightedSpace::with_tol_scale(space.weight().clone(), cli.tol)?
    } else {
        space
    };
    Ok((doc, space))
}

fn load_projection(ws: &WeightedSpace, path: &Path) -> wgrass::Result<CompatibleProjection> {
    let m = io::read_matrix(&resolve(path))?;
    CompatibleProjection::new(ws, m)
}

fn emit(cli: &Cli, report: serde_json::Value, text: String) {
    if cli.json {
        println!("{report}");
    } else {
        println!("{text}");
    }
}

fn cmd_fixture(cli: &Cli, args: &FixtureArgs) -> wgrass::Result<()> {
    let params = parse_params(&args.params)?;
    let lookup = |name: &str| -> Option<&str> {
        params.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    };
    let spec = match args.kind {
        FixtureKind::SturmLiouville => FixtureSpec::SturmLiouville { dim: args.dim },
        FixtureKind::SobolevLine => {
            let half_width = match lookup("half_width") {
                Some(v) => v.parse::<f64>().map_err(|_| {
                    Error::InvalidSpec(format!("half_width {v:?} is not a number"))
                })?,
                None => 4.0,
            };
            FixtureSpec::SobolevLine { dim: args.dim, half_width }
        }
        FixtureKind::MultByT => FixtureSpec::MultByT { dim: args.dim },
        FixtureKind::CustomSpectrum => {
            let raw = lookup("spectrum").ok_or_else(|| {
                Error::InvalidSpec("custom-spectrum needs --param spectrum=v1,v2,...".into())
            })?;
            let spectrum = raw
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidSpec(format!("bad spectrum entry {v:?}")))
                })
                .collect::<wgrass::Result<Vec<f64>>>()?;
            FixtureSpec::CustomSpectrum { spectrum }
        }
    };
    let fixture = fixtures::build_fixture(&spec)?;
    let dim = fixture.ws.dim();
    let spectrum: Vec<f64> = (0..dim).map(|i| fixture.ws.weight()[(i, i)].re).collect();
    let mut doc = WorkspaceDoc::new(dim, spectrum);
    for (name, op) in &fixture.operators {
        doc.insert_operator(name, op);
    }
    let out = resolve(&args.out);
    io::write_workspace(&out, &doc)?;
    emit(
        cli,
        json!({
            "kind": fixture.kind,
            "dim": dim,
            "operators": fixture.operators.keys().collect::<Vec<_>>(),
            "out": out.display().to_string(),
        }),
        format!(
            "wrote {} workspace (dim {}, operators: {}) to {}",
            fixture.kind,
            dim,
            fixture.operators.keys().cloned().collect::<Vec<_>>().join(", "),
            out.display()
        ),
    );
    Ok(())
}

fn cmd_project(cli: &Cli, args: &ProjectArgs) -> wgrass::Result<()> {
    let (_, ws) = load_space(cli, &args.workspace)?;
    let basis = io::read_matrix(&resolve(&args.basis))?;
    let p = CompatibleProjection::project_onto(&ws, &basis)?;
    let out = resolve(&args.out);
    io::write_matrix(&out, p.matrix())?;
    emit(
        cli,
        json!({
            "rank": p.rank(),
            "symmetry_norm": p.symmetry_norm(),
            "geodesic_radius": p.geodesic_radius(),
            "out": out.display().to_string(),
        }),
        format!(
            "projection of rank {} (||2Q-1|| = {:.6}, radius {:.6}) written to {}",
            p.rank(),
            p.symmetry_norm(),
            p.geodesic_radius(),
            out.display()
        ),
    );
    Ok(())
}

fn cmd_geodesic(cli: &Cli, args: &GeodesicArgs) -> wgrass::Result<()> {
    let (_, ws) = load_space(cli, &args.workspace)?;
    let from = load_projection(&ws, &args.from)?;
    let to = load_projection(&ws, &args.to)?;
    let p = parse_exponent(&args.p)?;
    let seg = from.geodesic_log(&to)?;
    let length = seg.length(p)?;
    let sampled = match args.samples {
        Some(nodes) => {
            let samples = (0..nodes)
                .map(|i| {
                    let t = if nodes == 1 { 0.0 } else { i as f64 / (nodes - 1) as f64 };
                    seg.eval(t).map(|q| q.matrix().clone())
                })
                .collect::<wgrass::Result<Vec<_>>>()?;
            Some(finsler_length_sampled(&ws, &samples, p)?)
        }
        None => None,
    };
    if let Some(out) = &args.out {
        io::write_matrix(&resolve(out), seg.exponent())?;
    }
    let mut text = format!(
        "geodesic radius {:.6}; within radius: {}; endpoint residual {:.3e}; length (p={}) {:.9}",
        from.geodesic_radius(),
        seg.within_radius(),
        seg.target_residual(),
        args.p,
        length
    );
    if let Some(s) = sampled {
        text.push_str(&format!("; sampled length {s:.9}"));
    }
    emit(
        cli,
        json!({
            "radius": from.geodesic_radius(),
            "within_radius": seg.within_radius(),
            "endpoint_residual": seg.target_residual(),
            "p": args.p,
            "length": length,
            "sampled_length": sampled,
        }),
        text,
    );
    Ok(())
}

fn cmd_index(cli: &Cli, args: &PairArgs) -> wgrass::Result<()> {
    let (_, ws) = load_space(cli, &args.workspace)?;
    let q1 = load_projection(&ws, &args.q1)?;
    let q2 = load_projection(&ws, &args.q2)?;
    let ctx = RestrictedContext::new(q1.clone(), 2.0)?;
    let report = ctx.pair_index(&q1, &q2)?;
    emit(
        cli,
        json!({
            "index": report.index_kernel_formula,
            "index_rank_formula": report.index_rank_formula,
            "eigencounts": [report.eigencounts.0, report.eigencounts.1],
            "agreement": report.agreement,
        }),
        format!(
            "index: {} (agreement: {}); eigencounts (+1, -1): ({}, {})",
            report.index_kernel_formula,
            report.agreement,
            report.eigencounts.0,
            report.eigencounts.1
        ),
    );
    Ok(())
}

fn cmd_intertwine(cli: &Cli, args: &IntertwineArgs) -> wgrass::Result<()> {
    let (_, ws) = load_space(cli, &args.workspace)?;
    let q1 = load_projection(&ws, &args.q1)?;
    let q2 = load_projection(&ws, &args.q2)?;
    let ctx = RestrictedContext::new(q1.clone(), 2.0)?;
    let report = ctx.intertwiner(&q1, &q2)?;
    let a_unitarity = {
        let g = report.g.matrix();
        (g.adjoint() * ws.weight() * g - ws.weight()).norm()
    };
    if let Some(out) = &args.out {
        io::write_matrix(&resolve(out), report.g.matrix())?;
    }
    emit(
        cli,
        json!({
            "conjugation_residual": report.conjugation_residual,
            "a_unitarity_residual": a_unitarity,
            "eigencounts": [report.eigencounts.0, report.eigencounts.1],
        }),
        format!(
            "intertwiner found: ||G Q1 G^-1 - Q2|| = {:.3e}, ||G*AG - A|| = {:.3e}, eigencounts ({}, {})",
            report.conjugation_residual, a_unitarity, report.eigencounts.0, report.eigencounts.1
        ),
    );
    Ok(())
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> wgrass::Result<()> {
    let config = SuiteConfig {
        seed: args.seed,
        trials: args.trials,
        dim: args.dim,
        tol_scale: cli.tol,
    };
    let selected: Vec<_> = match args.suite {
        SuiteChoice::All => suites::registry(),
        SuiteChoice::Kernel => vec![suites::by_name("kernel").unwrap()],
        SuiteChoice::Weighted => vec![suites::by_name("weighted").unwrap()],
        SuiteChoice::Grassmann => vec![suites::by_name("grassmann").unwrap()],
        SuiteChoice::Restricted => vec![suites::by_name("restricted").unwrap()],
        SuiteChoice::Poisson => vec![suites::by_name("poisson").unwrap()],
    };
    let reports: Vec<_> = selected.iter().map(|s| s.run(&config)).collect();
    let all_pass = reports.iter().all(|r| r.pass);
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&reports)?);
    } else {
        for report in &reports {
            println!(
                "suite {} (seed {}, trials {}, dim {}): {} [{:.1} ms]",
                report.suite,
                report.seed,
                report.trials,
                report.dim,
                if report.pass { "PASS" } else { "FAIL" },
                report.wall_ms
            );
            for check in &report.checks {
                println!(
                    "  {:<34} residual {:>12.3e}  threshold {:>9.1e}  {}",
                    check.name,
                    check.residual,
                    check.threshold,
                    if check.pass { "pass" } else { "FAIL" }
                );
            }
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(Error::ConvergenceFailure("one or more invariant suites failed".into()))
    }
}
