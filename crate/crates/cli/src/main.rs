use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cvxlab::function::classify;
use cvxlab::io::{function_from_json, function_to_json};
use cvxlab::search::{run_search, run_search_with_oracle, Direction, FamilySpec, Objective, SearchConfig};
use cvxlab::tau::{diagnose_sequence, TauConfig};
use cvxlab::{Error, Function, Transform};
use serde::Serialize;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod manifest;
mod plot;

use manifest::Recorder;

#[derive(Parser)]
#[command(name = "cvxlab", version, about = "Exact transforms, products and normalizations of polyhedral convex functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply the Legendre, polarity or gauge transform.
    Transform {
        #[arg(long, value_parser = parse_transform)]
        op: Transform,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Product of the masses of a function and its transform.
    Product {
        #[arg(long, value_parser = parse_transform)]
        functional: Transform,
        #[arg(short = 'i', long)]
        input: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Move a function into normal position.
    Normalize {
        #[arg(long, value_enum)]
        class: NormClass,
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Class membership tags.
    Classify {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Report membership in a single class as well.
        #[arg(long, value_enum)]
        class: Option<ClassQuery>,
    },
    /// Convergence diagnostics.
    Diag {
        #[command(subcommand)]
        cmd: DiagCmd,
    },
    /// Extremizer search over a parametric family.
    Search {
        #[arg(long, value_parser = parse_transform)]
        functional: Transform,
        #[arg(long, value_enum)]
        objective: Goal,
        #[arg(long, value_enum)]
        class: SearchClass,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        knots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also scan the parameter lattice at this resolution per axis.
        #[arg(long)]
        oracle_resolution: Option<usize>,
        #[arg(long, default_value_t = 4.0)]
        radius: f64,
        #[arg(long, default_value_t = 4.0)]
        value_max: f64,
        /// Facets of the polygon used by the 2D radial family.
        #[arg(long, default_value_t = 8)]
        facets: usize,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Render a 1D graph or 2D level sets as SVG.
    Plot {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        levels: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum DiagCmd {
    /// Epi-convergence diagnostics of `fn_000.json, fn_001.json, ...` towards a limit.
    Tau {
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        limit: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// JSON overrides for the diagnostic settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NormClass {
    Even,
    Centered,
    General,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ClassQuery {
    Cvx0,
    Even,
    Se,
    S1,
    S1c,
    S2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Goal {
    Max,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchClass {
    Even,
    Centered,
}

fn parse_transform(s: &str) -> std::result::Result<Transform, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_function(rec: &mut Recorder, path: &Path) -> Result<Function> {
    let text = rec.read(path)?;
    Ok(function_from_json(&text)?)
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn emit(rec: &mut Recorder, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => rec.write(p, text),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

#[derive(Serialize)]
struct Classification {
    #[serde(flatten)]
    tags: cvxlab::ClassTags,
    #[serde(skip_serializing_if = "Option::is_none")]
    query: Option<QueryAnswer>,
}

#[derive(Serialize)]
struct QueryAnswer {
    class: ClassQuery,
    member: bool,
}

fn run(cli: Cli) -> Result<()> {
    let mut rec = Recorder::new();
    match cli.cmd {
        Cmd::Transform { op, input, output } => {
            let f = load_function(&mut rec, &input)?;
            let g = op.apply(&f)?;
            rec.write(&output, &function_to_json(&g))?;
        }
        Cmd::Product { functional, input, report } => {
            let f = load_function(&mut rec, &input)?;
            let r = cvxlab::measure::product(&f, functional)?;
            emit(&mut rec, report.as_deref(), &to_json(&r)?)?;
        }
        Cmd::Normalize { class, input, output, cert } => {
            let f = load_function(&mut rec, &input)?;
            let (n, g) = match class {
                NormClass::Even => cvxlab::position::normalize_even(&f)?,
                NormClass::Centered => cvxlab::position::normalize_centered(&f)?,
                NormClass::General => cvxlab::position::normalize_general(&f)?,
            };
            rec.write(&output, &function_to_json(&g))?;
            if let Some(c) = cert {
                rec.write(&c, &to_json(&n)?)?;
            }
        }
        Cmd::Classify { input, output, class } => {
            let f = load_function(&mut rec, &input)?;
            let tags = classify(&f);
            let query = class.map(|c| QueryAnswer {
                class: c,
                member: match c {
                    ClassQuery::Cvx0 => tags.is_cvx0,
                    ClassQuery::Even => tags.is_even,
                    ClassQuery::Se => tags.in_se,
                    ClassQuery::S1 => tags.in_s1,
                    ClassQuery::S1c => tags.in_s1c,
                    ClassQuery::S2 => tags.in_s2,
                },
            });
            emit(&mut rec, output.as_deref(), &to_json(&Classification { tags, query })?)?;
        }
        Cmd::Diag {
            cmd: DiagCmd::Tau { sequence, limit, report, config },
        } => {
            let cfg = match config {
                Some(p) => {
                    let text = rec.read(&p)?;
                    serde_json::from_str::<TauConfig>(&text)
                        .map_err(|e| Error::InvalidInput(format!("malformed config: {e}")))?
                }
                None => TauConfig::default(),
            };
            let mut files: Vec<PathBuf> = std::fs::read_dir(&sequence)
                .with_context(|| format!("reading {}", sequence.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            files.retain(|p| {
                p.file_name()
                    .and_then(|s| s.to_str())
                    .and_then(|s| s.strip_prefix("fn_")?.strip_suffix(".json"))
                    .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            });
            files.sort();
            if files.is_empty() {
                return Err(Error::InvalidInput(format!("no fn_NNN.json files in {}", sequence.display())).into());
            }
            let seq = files.iter().map(|p| load_function(&mut rec, p)).collect::<Result<Vec<_>>>()?;
            let lim = load_function(&mut rec, &limit)?;
            let r = diagnose_sequence(&seq, &lim, &cfg)?;
            rec.write(&report, &to_json(&r)?)?;
        }
        Cmd::Search {
            functional,
            objective,
            class,
            dim,
            knots,
            seed,
            out,
            oracle_resolution,
            radius,
            value_max,
            facets,
            restarts,
            max_iters,
        } => {
            rec.seed = Some(seed);
            let spec = match (class, dim) {
                (SearchClass::Even, 1) => FamilySpec::even_grid(knots, radius, value_max),
                (SearchClass::Centered, 1) => FamilySpec::centered_grid(knots, radius, value_max),
                (SearchClass::Even, 2) => FamilySpec::radial(2, knots, facets, radius, value_max),
                (SearchClass::Centered, 2) => {
                    return Err(Error::InvalidInput("centered searches are one-dimensional".into()).into())
                }
                (_, n) => return Err(Error::UnsupportedDimension(n).into()),
            };
            spec.validate()?;
            let defaults = SearchConfig::default();
            let cfg = SearchConfig {
                seed,
                restarts: restarts.unwrap_or(defaults.restarts),
                max_iters: max_iters.unwrap_or(defaults.max_iters),
                ..defaults
            };
            let direction = match objective {
                Goal::Max => Direction::Max,
                Goal::Min => Direction::Min,
            };
            let obj = Objective::new(functional, direction);
            let r = match oracle_resolution {
                Some(res) => run_search_with_oracle(&spec, obj, &cfg, res)?,
                None => run_search(&spec, obj, &cfg)?,
            };
            rec.write(&out, &to_json(&r)?)?;
        }
        Cmd::Plot { input, output, levels } => {
            let f = load_function(&mut rec, &input)?;
            let svg = plot::render(&f, &levels)?;
            rec.write(&output, &svg)?;
        }
    }
    rec.finish()?;
    Ok(())
}

fn report_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    panic::set_hook(Box::new(|_| {}));
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => match e.downcast_ref::<Error>() {
            Some(d) => {
                report_error(d.kind(), &d.to_string());
                ExitCode::from(2)
            }
            None => {
                report_error("Io", &format!("{e:#}"));
                ExitCode::from(1)
            }
        },
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal error".into());
            report_error("Internal", &msg);
            ExitCode::from(1)
        }
    }
}
