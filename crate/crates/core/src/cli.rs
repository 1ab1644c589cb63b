//! Command-line front end.
//!
//! Exit codes: 0 success, 1 an asserted check failed, 2 usage error,
//! 3 runtime error (I/O, schema, sampling budget, transport obstruction).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::llv::build_frame;
use crate::module_io::{export_module, load_module, validate};
use crate::quadratic::{default_tail, make_standard_space, witt_transport, IsotropicPlane, QuadraticSpace};
use crate::verbitsky::{build_verbitsky, GradedAlgebra, DEFAULT_BUDGET};
use crate::verifier::{default_grid, diamond_report, run_grid, run_module, report_instance, Instance, InstanceConfig, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hklab", version, about = "Exact LLV, monodromy and perverse-filtration checks on the Verbitsky component")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build SH and write the algebra as JSON.
    Build(BuildArgs),
    /// Run the verification suite on a built-in instance, a stored algebra, a module file or a grid.
    Verify(VerifyArgs),
    /// Print the (q, i) table of V^{p,q,i} in one degree.
    Diamond(DiamondArgs),
    /// Compute an SO(q)-isometry carrying one isotropic plane onto another.
    Transport(TransportArgs),
    /// Export an instance as an LLV module file.
    Export(BuildArgs),
    /// Validate an LLV module file.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(4..))]
    pub b2: u64,
    /// Comma-separated diagonal entries after U ⊕ U, as "p" or "p/q"; defaults to 2,-2,2,...
    #[arg(long, value_delimiter = ',')]
    pub tail: Option<Vec<Rational>>,
    #[arg(long, env = "HKLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub budget: usize,
}

impl InstanceArgs {
    pub fn config(&self) -> std::result::Result<InstanceConfig, String> {
        let b2 = self.b2 as usize;
        let tail = self.tail.clone().unwrap_or_else(|| default_tail(b2));
        if tail.len() != b2 - 4 {
            return Err(format!("--tail has {} entries, b2 = {b2} needs {}", tail.len(), b2 - 4));
        }
        let mut c = InstanceConfig::standard(self.n as usize, b2, self.seed);
        c.tail = tail;
        c.budget = self.budget;
        Ok(c)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Algebra JSON written by `build`.
    #[arg(long = "in", conflicts_with_all = ["module", "grid"])]
    pub input: Option<PathBuf>,
    /// LLV module JSON; validated before any analysis.
    #[arg(long, conflicts_with = "grid")]
    pub module: Option<PathBuf>,
    /// `default` for {1,2,3} x {4,5,6,7}, or a list such as `1x4,2x5`.
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DiamondArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    /// Algebra JSON written by `build`.
    #[arg(long = "in", conflicts_with = "module")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub module: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TransportArgs {
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(4..))]
    pub b2: u64,
    #[arg(long, value_delimiter = ',')]
    pub tail: Option<Vec<Rational>>,
    /// JSON {"plane1": {"v1": [...], "v2": [...]}, "plane2": {...}}; defaults to <e0,e2> and <e1,e3>.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long = "in", alias = "module")]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanePair {
    pub plane1: IsotropicPlane,
    pub plane2: IsotropicPlane,
}

#[derive(Debug, Serialize)]
struct TransportOutput<'a> {
    space: &'a QuadraticSpace,
    plane1: &'a IsotropicPlane,
    plane2: &'a IsotropicPlane,
    isometry: &'a crate::linalg::RationalMatrix,
    determinant: Rational,
    preserves_gram: bool,
    maps_plane: bool,
    inverse_round_trip: bool,
}

/// Outcome of a subcommand: text written to the output and the exit code.
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, code: EXIT_OK }
    }

    fn checked(output: String, ok: bool) -> Self {
        Outcome { output, code: if ok { EXIT_OK } else { EXIT_CHECK_FAILED } }
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn read(path: &PathBuf) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn canonical(value: serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

fn reports_output(reports: &[Report], format: Format) -> Result<String> {
    Ok(match format {
        Format::Json if reports.len() == 1 => reports[0].to_json()?,
        Format::Json => canonical(serde_json::to_value(reports)?)?,
        Format::Text => reports.iter().map(Report::render_text).collect::<Vec<_>>().join("\n"),
    })
}

fn parse_grid(spec: &str, seed: u64) -> std::result::Result<Vec<InstanceConfig>, String> {
    if spec == "default" {
        return Ok(default_grid(seed));
    }
    spec.split(',')
        .map(|item| {
            let (n, b2) = item.trim().split_once('x').ok_or_else(|| format!("grid entry {item:?} is not NxB2"))?;
            let n: usize = n.parse().map_err(|_| format!("bad n in {item:?}"))?;
            let b2: usize = b2.parse().map_err(|_| format!("bad b2 in {item:?}"))?;
            if n < 1 || b2 < 4 {
                return Err(format!("grid entry {item:?} needs n >= 1 and b2 >= 4"));
            }
            Ok(InstanceConfig::standard(n, b2, seed))
        })
        .collect()
}

fn load_instance(args: &InstanceArgs, input: Option<&PathBuf>) -> std::result::Result<Instance, Failure> {
    match input {
        Some(p) => Ok(Instance::from_algebra(GradedAlgebra::from_json(&read(p)?)?, args.seed)?),
        None => Ok(Instance::build(&args.config().map_err(Failure::Usage)?)?),
    }
}

fn cmd_build(args: &BuildArgs) -> std::result::Result<Outcome, Failure> {
    let cfg = args.instance.config().map_err(Failure::Usage)?;
    let space = make_standard_space(cfg.b2, &cfg.tail)?;
    let alg = build_verbitsky(&space, cfg.n, cfg.budget, cfg.seed)?;
    let mut json = alg.to_json()?;
    json.push('\n');
    Ok(Outcome::ok(json))
}

fn cmd_export(args: &BuildArgs) -> std::result::Result<Outcome, Failure> {
    let cfg = args.instance.config().map_err(Failure::Usage)?;
    let space = make_standard_space(cfg.b2, &cfg.tail)?;
    let alg = build_verbitsky(&space, cfg.n, cfg.budget, cfg.seed)?;
    let frame = build_frame(&space, cfg.seed)?;
    Ok(Outcome::ok(export_module(&alg, &frame)?))
}

fn cmd_verify(args: &VerifyArgs) -> std::result::Result<Outcome, Failure> {
    let reports = if let Some(grid) = &args.grid {
        let configs = parse_grid(grid, args.instance.seed).map_err(Failure::Usage)?;
        run_grid(&configs).into_iter().collect::<Result<Vec<_>>>()?
    } else if let Some(path) = &args.module {
        vec![run_module(&load_module(&read(path)?)?, args.instance.seed)?]
    } else {
        vec![report_instance(&load_instance(&args.instance, args.input.as_ref())?)?]
    };
    let ok = reports.iter().all(Report::asserted_ok);
    Ok(Outcome::checked(reports_output(&reports, args.output.format)?, ok))
}

fn cmd_diamond(args: &DiamondArgs) -> std::result::Result<Outcome, Failure> {
    let big = match &args.module {
        Some(path) => {
            let spec = load_module(&read(path)?)?;
            let report = validate(&spec);
            if let Some(f) = report.first_failure() {
                return Err(Failure::Runtime(Error::InvalidModule(format!(
                    "validation failed ({}): {}",
                    f.name,
                    f.witness.clone().unwrap_or_default()
                ))));
            }
            let module = spec.to_module()?;
            let frame = match &spec.frame {
                Some(f) => f.clone(),
                None => build_frame(module.space(), args.instance.seed)?,
            };
            crate::verifier::FrameData::new(module, frame)?.big
        }
        None => load_instance(&args.instance, args.input.as_ref())?.data.big,
    };
    let table = diamond_report(&big, args.degree);
    Ok(Outcome::ok(match args.output.format {
        Format::Text => table.render_text(),
        Format::Json => canonical(table.to_json())?,
    }))
}

fn default_planes(space: &QuadraticSpace) -> Result<PlanePair> {
    let e = |i: usize| {
        let mut v = vec![0i64; space.dim()];
        v[i] = 1;
        v
    };
    Ok(PlanePair {
        plane1: IsotropicPlane::from_ints(space, &e(0), &e(2))?,
        plane2: IsotropicPlane::from_ints(space, &e(1), &e(3))?,
    })
}

fn cmd_transport(args: &TransportArgs) -> std::result::Result<Outcome, Failure> {
    let b2 = args.b2 as usize;
    let tail = args.tail.clone().unwrap_or_else(|| default_tail(b2));
    if tail.len() != b2 - 4 {
        return Err(Failure::Usage(format!("--tail has {} entries, b2 = {b2} needs {}", tail.len(), b2 - 4)));
    }
    let space = make_standard_space(b2, &tail)?;
    let pair = match &args.input {
        Some(p) => serde_json::from_str::<PlanePair>(&read(p)?).map_err(|e| Error::Schema(e.to_string()))?,
        None => default_planes(&space)?,
    };
    let g = witt_transport(&space, &pair.plane1, &pair.plane2)?;
    let image = crate::linalg::Subspace::span(b2, &[g.apply(&pair.plane1.v1), g.apply(&pair.plane1.v2)])?;
    let inverse = g.inverse();
    let round_trip = g.matrix.mul(&inverse.matrix)? == crate::linalg::RationalMatrix::identity(b2);
    let out = TransportOutput {
        space: &space,
        plane1: &pair.plane1,
        plane2: &pair.plane2,
        isometry: &g.matrix,
        determinant: g.matrix.det()?,
        preserves_gram: space.is_isometry(&g.matrix),
        maps_plane: image == pair.plane2.span(),
        inverse_round_trip: round_trip,
    };
    let ok = out.preserves_gram && out.maps_plane && out.inverse_round_trip && out.determinant == Rational::from_int(1);
    let text = match args.output.format {
        Format::Json => canonical(serde_json::to_value(&out)?)?,
        Format::Text => {
            let mut s = String::from("isometry g with g(plane1) = plane2:\n");
            let rows = g.matrix.to_rows();
            let width = rows.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
            for r in rows {
                let cells: Vec<String> = r.iter().map(|x| format!("{:>width$}", x.to_string())).collect();
                s.push_str(&format!("  [ {} ]\n", cells.join(" ")));
            }
            s.push_str(&format!(
                "det = {}, preserves gram: {}, maps plane: {}, g g^-1 = id: {}\n",
                out.determinant, out.preserves_gram, out.maps_plane, out.inverse_round_trip
            ));
            s
        }
    };
    Ok(Outcome::checked(text, ok))
}

fn cmd_validate(args: &ValidateArgs) -> std::result::Result<Outcome, Failure> {
    let spec = load_module(&read(&args.input)?)?;
    let report = validate(&spec);
    let text = match args.output.format {
        Format::Text => report.render_text(),
        Format::Json => canonical(serde_json::to_value(&report)?)?,
    };
    Ok(Outcome::checked(text, report.all_passed()))
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes its output; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out_path = match &cli.command {
        Command::Build(a) | Command::Export(a) => a.out.clone(),
        Command::Verify(a) => a.output.out.clone(),
        Command::Diamond(a) => a.output.out.clone(),
        Command::Transport(a) => a.output.out.clone(),
        Command::Validate(a) => a.output.out.clone(),
    };
    let result = match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Export(a) => cmd_export(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Diamond(a) => cmd_diamond(a),
        Command::Transport(a) => cmd_transport(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(outcome) => {
            let written = match out_path {
                Some(p) => std::fs::write(&p, &outcome.output),
                None => std::io::stdout().write_all(outcome.output.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_RUNTIME;
            }
            outcome.code
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}
