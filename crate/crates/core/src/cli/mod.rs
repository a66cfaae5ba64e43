//! Command-line front end.
//!
//! Every run prints one JSON report on standard output. Exit status is 0
//! when the checked property holds, 1 when the analysis ran and refuted it,
//! and 2 on usage or input errors, whose one-line reason goes to standard
//! error.

mod spec_file;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub use spec_file::{digest, parse_mapspec, LoadedSpec, MapSpecFile, SpecError, FORMAT_VERSION};

use crate::equation::{check_pair, detect_minimal_pair, EquationError, Mode, Sampling};
use crate::expr::Expression;
use crate::interval::{image_chain, verify_1d_equation, Interval1};
use crate::linearize::{
    hw_conjugacy, involution_conjugacy, normal_form_residual, projection_conjugacy, strip_to_plane,
    HwVariant, LinearizeError,
};
use crate::map::MapSpec;
use crate::obstruction::{
    fixed_point_sample, gradient_vanish_scan, local_branch_count, preimage_components, GridWindow,
    DEFAULT_MARK_TOL,
};
use crate::sampling::Window;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_SEED: u64 = 0;
const DEFAULT_GRADIENT_TOL: f64 = 1e-6;
const DEFAULT_CELLS: usize = 100;

#[derive(Parser, Debug)]
#[command(
    name = "babbage",
    version,
    about = "Analyze self-maps satisfying f^n = f^k"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test f^n = f^k for one pair, or search for the least pair.
    Check {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, requires = "k", conflicts_with = "detect")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long)]
        detect: bool,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// Enclose I, f(I), ..., f^k(I) for a map of the line.
    ImageChain {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Verify f^n = f^k on the interval as well.
        #[arg(long)]
        n: Option<usize>,
        /// Defaults to the window.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[arg(long, default_value_t = 2001)]
        resolution: usize,
    },
    /// Build and verify an explicit conjugacy.
    Linearize {
        #[command(subcommand)]
        mode: LinearizeCommand,
    },
    /// Grid evidence for obstructions to linearizability.
    Obstruct {
        #[command(subcommand)]
        mode: ObstructCommand,
    },
    /// Pretty-print a stored report; exits with its verdict.
    Report { path: String },
}

#[derive(Subcommand, Debug)]
enum LinearizeCommand {
    /// phi = Id - f for an involution of an interval.
    Involution(MapArgs),
    /// g1 = ±x + y·𝔤(x, y) for a plane map (g1, 0).
    NormalForm(MapArgs),
    /// phi = (g, y) taking (g, 0) to (x, 0).
    Projection(MapArgs),
    /// psi = (x, tan(πy / 2h(x))) from a strip onto the plane.
    Strip {
        /// Strip half-width as an expression in x.
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// The Hardy-Weinberg conjugacies.
    Hw {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Variant::Simple)]
        variant: Variant,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, conflicts_with = "sampled")]
        exact: bool,
        #[arg(long)]
        sampled: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ObstructCommand {
    /// Connected components of f⁻¹(target).
    Components {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Local branch count of a planar level set {g = 0} at a point.
    Branches {
        #[command(flatten)]
        scalar: ScalarArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, default_value_t = 64)]
        circle_samples: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// Require this count instead of 1.
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Cells where the gradient of a scalar function vanishes.
    Gradzero {
        #[command(flatten)]
        scalar: ScalarArgs,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        cells: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Connected components of the fixed set.
    Fixed {
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct MapArgs {
    /// Map-spec file, or inline `builtin:family?param=value`.
    #[arg(long)]
    map: String,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `a:b[,c:d,...]`; a single axis applies to every dimension.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Force exact polynomial mode.
    #[arg(long)]
    exact: bool,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long)]
    map: String,
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// `n[,m,...]` cells per axis.
    #[arg(long)]
    cells: Option<String>,
    /// Marking factor.
    #[arg(long)]
    tol: Option<f64>,
    /// Also expect this many components.
    #[arg(long)]
    expect: Option<usize>,
    /// Write the marked cells here as CSV.
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct ScalarArgs {
    /// Scalar expression; use with --vars.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "map")]
    expr: Option<String>,
    #[arg(long, default_value = "x,y")]
    vars: String,
    /// Take a component of this map instead.
    #[arg(long)]
    map: Option<String>,
    #[arg(long, default_value_t = 0)]
    component: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Variant {
    Simple,
    Sexed,
}

/// Usage and input failures, reported with exit status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Analysis(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn analysis(e: impl std::fmt::Display) -> CliError {
    CliError::Analysis(e.to_string())
}

#[derive(Serialize)]
struct Settings {
    tol: f64,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct Report {
    tool: &'static str,
    tool_version: &'static str,
    command: Vec<String>,
    input_digest: Option<String>,
    settings: Settings,
    holds: bool,
    result: Value,
    duration_ms: u64,
}

struct Outcome {
    holds: bool,
    result: Value,
    digest: Option<String>,
    settings: Settings,
}

type Verdict = Result<(bool, Value), CliError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn parse_floats(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{what}: `{t}` is not a number")))
        })
        .collect()
}

/// `a:b[,c:d,...]`, one axis repeated to `dim` when given alone.
fn parse_axes(text: &str, dim: usize) -> Result<Vec<[f64; 2]>, CliError> {
    let axes = text
        .split(',')
        .map(|part| {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| usage(format!("window axis `{part}` is not of the form a:b")))?;
            let v = parse_floats(&format!("{a},{b}"), "window")?;
            Ok([v[0], v[1]])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    match axes.len() {
        1 => Ok(vec![axes[0]; dim]),
        n if n == dim => Ok(axes),
        n => Err(usage(format!(
            "window has {n} axes, map has dimension {dim}"
        ))),
    }
}

fn parse_cells(text: Option<&str>, dim: usize) -> Result<Vec<usize>, CliError> {
    let Some(text) = text else {
        return Ok(vec![DEFAULT_CELLS; dim]);
    };
    let cells = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("cells: `{t}` is not a count")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    match cells.len() {
        1 => Ok(vec![cells[0]; dim]),
        n if n == dim => Ok(cells),
        n => Err(usage(format!("{n} cell counts for dimension {dim}"))),
    }
}

impl MapArgs {
    fn load(&self) -> Result<(LoadedSpec, Sampling, Option<Mode>), CliError> {
        let spec = parse_mapspec(&self.map)?;
        let window = match &self.window {
            Some(text) => Some(Window::new(parse_axes(text, spec.map.dim())?).map_err(analysis)?),
            None => None,
        };
        let opts = Sampling {
            window,
            tol: self.tol.or(spec.file.tol).unwrap_or(DEFAULT_TOL),
            samples: self
                .samples
                .or(spec.file.samples)
                .unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed.or(spec.file.seed).unwrap_or(DEFAULT_SEED),
        };
        Ok((spec, opts, self.exact.then_some(Mode::Exact)))
    }
}

fn settings(opts: &Sampling) -> Settings {
    Settings {
        tol: opts.tol,
        samples: opts.samples,
        seed: opts.seed,
    }
}

fn grid_for(
    map: &MapSpec,
    window: Option<&str>,
    cells: Option<&str>,
) -> Result<GridWindow, CliError> {
    let axes = match window {
        Some(text) => parse_axes(text, map.dim())?,
        None => map
            .window()
            .map(|w| w.axes().to_vec())
            .ok_or_else(|| usage("map has no window; pass --window"))?,
    };
    GridWindow::new(axes, parse_cells(cells, map.dim())?).map_err(|e| usage(e.to_string()))
}

fn write_csv(
    report: &crate::obstruction::ComponentReport,
    path: Option<&str>,
) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let mut buf = Vec::new();
    report.write_csv(&mut buf).expect("writing to memory");
    std::fs::write(path, buf).map_err(|e| usage(format!("cannot write {path}: {e}")))
}

/// A linearize outcome: hypothesis failures are refutations, not errors.
fn linearize_outcome<T: Serialize>(
    r: Result<T, LinearizeError>,
    verified: impl Fn(&T) -> bool,
) -> Result<(bool, Value), CliError> {
    match r {
        Ok(report) => Ok((verified(&report), to_value(&report))),
        Err(
            e @ (LinearizeError::Hypothesis { .. }
            | LinearizeError::NotInvolution(_)
            | LinearizeError::Remainder(_)),
        ) => {
            let detail = match &e {
                LinearizeError::Hypothesis {
                    check,
                    value,
                    witness,
                } => {
                    json!({ "check": check, "value": value, "witness": witness })
                }
                _ => Value::Null,
            };
            Ok((
                false,
                json!({ "hypothesis_failed": e.to_string(), "detail": detail }),
            ))
        }
        Err(LinearizeError::NonPositiveWidth { x, value }) => Ok((
            false,
            json!({ "hypothesis_failed": format!("h({x}) = {value} is not positive") }),
        )),
        Err(e) => Err(analysis(e)),
    }
}

fn scalar_function(args: &ScalarArgs) -> Result<(Expression, Option<String>), CliError> {
    match (&args.expr, &args.map) {
        (Some(text), None) => {
            let vars: Vec<&str> = args.vars.split(',').map(str::trim).collect();
            let e = Expression::parse(text, &vars)
                .map_err(|e| usage(format!("--expr, column {}: {e}", e.position() + 1)))?;
            Ok((e, Some(digest(text.as_bytes()))))
        }
        (None, Some(source)) => {
            let spec = parse_mapspec(source)?;
            let e = spec
                .map
                .components()
                .get(args.component)
                .cloned()
                .ok_or_else(|| usage(format!("map has no component {}", args.component)))?;
            Ok((e, Some(spec.digest)))
        }
        _ => Err(usage("give one of --expr and --map")),
    }
}

fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Check {
            map,
            n,
            k,
            detect,
            nmax,
        } => {
            let (spec, opts, mode) = map.load()?;
            let report = match (n, k, detect) {
                (Some(n), Some(k), false) => check_pair(&spec.map, *n, *k, &opts, mode),
                (None, None, true) => detect_minimal_pair(&spec.map, *nmax, &opts, mode),
                _ => return Err(usage("give --n and --k, or --detect")),
            }
            .map_err(|e| match e {
                EquationError::Order { .. } => usage(e.to_string()),
                other => analysis(other),
            })?;
            Ok(Outcome {
                holds: report.pair.is_some(),
                result: to_value(&report),
                digest: Some(spec.digest),
                settings: settings(&opts),
            })
        }
        Command::ImageChain {
            map,
            k,
            n,
            interval,
            resolution,
        } => {
            let (spec, opts, _) = map.load()?;
            if spec.map.dim() != 1 {
                return Err(usage(format!(
                    "image-chain needs a map of the line, got dimension {}",
                    spec.map.dim()
                )));
            }
            let [lo, hi] = match (interval, &opts.window, spec.map.window()) {
                (Some(text), _, _) => parse_axes(text, 1)?[0],
                (None, Some(w), _) | (None, None, Some(w)) => w.axes()[0],
                (None, None, None) => return Err(usage("pass --interval or a window")),
            };
            let i = Interval1::closed(lo, hi).map_err(|e| usage(e.to_string()))?;
            let (holds, result) = match n {
                Some(n) => {
                    let r = verify_1d_equation(&spec.map, &i, *n, *k, *resolution, opts.tol)
                        .map_err(analysis)?;
                    (r.verified, to_value(&r))
                }
                None => {
                    let chain = image_chain(&spec.map, &i, *k, *resolution).map_err(analysis)?;
                    (true, json!({ "chain": chain }))
                }
            };
            Ok(Outcome {
                holds,
                result,
                digest: Some(spec.digest),
                settings: settings(&opts),
            })
        }
        Command::Linearize { mode } => linearize(mode),
        Command::Obstruct { mode } => obstruct(mode),
        Command::Report { .. } => unreachable!("handled before dispatch"),
    }
}

fn linearize(mode: &LinearizeCommand) -> Result<Outcome, CliError> {
    let with_map = |args: &MapArgs, run: &dyn Fn(&MapSpec, &Sampling) -> Verdict| {
        let (spec, opts, _) = args.load()?;
        let (holds, result) = run(&spec.map, &opts)?;
        Ok(Outcome {
            holds,
            result,
            digest: Some(spec.digest),
            settings: settings(&opts),
        })
    };
    match mode {
        LinearizeCommand::Involution(args) => with_map(args, &|f, opts| {
            linearize_outcome(involution_conjugacy(f, opts), |r| r.verified)
        }),
        LinearizeCommand::NormalForm(args) => with_map(args, &|f, opts| {
            let nf = normal_form_residual(f, opts).map_err(analysis)?;
            Ok((nf.passes, to_value(&nf)))
        }),
        LinearizeCommand::Projection(args) => with_map(args, &|f, opts| {
            linearize_outcome(projection_conjugacy(f, opts), |r| r.verified)
        }),
        LinearizeCommand::Strip { h, window, samples } => {
            let h_expr = Expression::parse(h, &["x"])
                .map_err(|e| usage(format!("--h, column {}: {e}", e.position() + 1)))?;
            let [lo, hi] = parse_axes(window, 1)?[0];
            let (holds, result) =
                linearize_outcome(strip_to_plane(&h_expr, [lo, hi], *samples), |r| r.verified)?;
            Ok(Outcome {
                holds,
                result,
                digest: Some(digest(h.as_bytes())),
                settings: Settings {
                    tol: 1e-12,
                    samples: *samples,
                    seed: DEFAULT_SEED,
                },
            })
        }
        LinearizeCommand::Hw {
            k,
            variant,
            tol,
            samples,
            seed,
            exact,
            sampled,
        } => {
            let opts = Sampling {
                window: None,
                tol: tol.unwrap_or(DEFAULT_TOL),
                samples: samples.unwrap_or(DEFAULT_SAMPLES),
                seed: seed.unwrap_or(DEFAULT_SEED),
            };
            let mode = match (exact, sampled) {
                (true, _) => Some(Mode::Exact),
                (_, true) => Some(Mode::Sampled),
                _ => None,
            };
            let variant = match variant {
                Variant::Simple => HwVariant::Simple,
                Variant::Sexed => HwVariant::Sexed,
            };
            if *k < 2 {
                return Err(usage("--k must be at least 2"));
            }
            let r = hw_conjugacy(*k, variant, &opts, mode).map_err(analysis)?;
            Ok(Outcome {
                holds: r.verified,
                result: to_value(&r),
                digest: None,
                settings: settings(&opts),
            })
        }
    }
}

fn obstruct(mode: &ObstructCommand) -> Result<Outcome, CliError> {
    match mode {
        ObstructCommand::Components { grid, target } => {
            let spec = parse_mapspec(&grid.map)?;
            let cells = grid_for(&spec.map, grid.window.as_deref(), grid.cells.as_deref())?;
            let target = parse_floats(target, "target")?;
            let tol = grid.tol.unwrap_or(DEFAULT_MARK_TOL);
            let r = preimage_components(&spec.map, &target, &cells, tol)
                .map_err(|e| usage(e.to_string()))?;
            write_csv(&r, grid.csv.as_deref())?;
            Ok(Outcome {
                holds: r.stable && grid.expect.is_none_or(|n| n == r.count),
                result: to_value(&r),
                digest: Some(spec.digest),
                settings: Settings {
                    tol,
                    samples: cells.total() as usize,
                    seed: DEFAULT_SEED,
                },
            })
        }
        ObstructCommand::Fixed { grid } => {
            let spec = parse_mapspec(&grid.map)?;
            let cells = grid_for(&spec.map, grid.window.as_deref(), grid.cells.as_deref())?;
            let tol = grid.tol.unwrap_or(DEFAULT_MARK_TOL);
            let r = fixed_point_sample(&spec.map, &cells, tol).map_err(|e| usage(e.to_string()))?;
            write_csv(&r, grid.csv.as_deref())?;
            Ok(Outcome {
                holds: r.stable && grid.expect.is_none_or(|n| n == r.count),
                result: to_value(&r),
                digest: Some(spec.digest),
                settings: Settings {
                    tol,
                    samples: cells.total() as usize,
                    seed: DEFAULT_SEED,
                },
            })
        }
        ObstructCommand::Branches {
            scalar,
            point,
            radius,
            circle_samples,
            tol,
            expect,
        } => {
            let (g, digest) = scalar_function(scalar)?;
            let point = parse_floats(point, "point")?;
            let tol = tol.unwrap_or(DEFAULT_TOL);
            let count = local_branch_count(&g, &point, *radius, *circle_samples, tol)
                .map_err(|e| usage(e.to_string()))?;
            Ok(Outcome {
                holds: count == expect.unwrap_or(1),
                result: json!({ "point": point, "radius": radius, "branches": count, "manifold": count == 1 }),
                digest,
                settings: Settings {
                    tol,
                    samples: *circle_samples,
                    seed: DEFAULT_SEED,
                },
            })
        }
        ObstructCommand::Gradzero {
            scalar,
            window,
            cells,
            tol,
        } => {
            let (g, digest) = scalar_function(scalar)?;
            let axes = parse_axes(window, g.arity())?;
            let grid = GridWindow::new(axes, parse_cells(cells.as_deref(), g.arity())?)
                .map_err(|e| usage(e.to_string()))?;
            let tol = tol.unwrap_or(DEFAULT_GRADIENT_TOL);
            let scan = gradient_vanish_scan(&g, &grid, tol).map_err(|e| usage(e.to_string()))?;
            Ok(Outcome {
                holds: scan.cells.is_empty(),
                result: to_value(&scan),
                digest,
                settings: Settings {
                    tol,
                    samples: grid.total() as usize,
                    seed: DEFAULT_SEED,
                },
            })
        }
    }
}

fn pretty_print(path: &str, out: &mut dyn Write) -> Result<bool, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
    let report: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{path}: {e}")))?;
    let holds = report
        .get("holds")
        .and_then(Value::as_bool)
        .ok_or_else(|| usage(format!("{path}: not a report")))?;
    let field = |k: &str| report.get(k).map(ToString::to_string).unwrap_or_default();
    let command: Vec<String> = report
        .get("command")
        .and_then(Value::as_array)
        .map(|a| {
            a.iter()
                .filter_map(Value::as_str)
                .map(String::from)
                .collect()
        })
        .unwrap_or_default();
    let mut text = String::new();
    text.push_str(&format!("command   babbage {}\n", command.join(" ")));
    text.push_str(&format!(
        "verdict   {}\n",
        if holds { "holds" } else { "fails" }
    ));
    text.push_str(&format!("input     {}\n", field("input_digest")));
    text.push_str(&format!("settings  {}\n", field("settings")));
    text.push_str(&format!("version   {}\n", field("tool_version")));
    text.push_str(&format!("duration  {} ms\n", field("duration_ms")));
    text.push_str(&serde_json::to_string_pretty(&report["result"]).expect("value serializes"));
    text.push('\n');
    out.write_all(text.as_bytes()).map_err(analysis)?;
    Ok(holds)
}

/// Runs the tool on `argv` (program name first) and returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{line}");
            return 2;
        }
    };
    if let Command::Report { path } = &cli.command {
        return match pretty_print(path, out) {
            Ok(holds) => i32::from(!holds),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                2
            }
        };
    }
    let start = Instant::now();
    match execute(&cli.command) {
        Ok(outcome) => {
            let report = Report {
                tool: env!("CARGO_PKG_NAME"),
                tool_version: env!("CARGO_PKG_VERSION"),
                command: argv
                    .iter()
                    .skip(1)
                    .map(|a| a.to_string_lossy().into_owned())
                    .collect(),
                input_digest: outcome.digest,
                settings: outcome.settings,
                holds: outcome.holds,
                result: outcome.result,
                duration_ms: start.elapsed().as_millis() as u64,
            };
            let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
            text.push('\n');
            if out.write_all(text.as_bytes()).is_err() {
                return 2;
            }
            i32::from(!outcome.holds)
        }
        Err(e) => {
            let msg = e.to_string();
            let _ = writeln!(err, "error: {}", msg.lines().next().unwrap_or("failed"));
            2
        }
    }
}
