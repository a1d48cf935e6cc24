//! Command-line front end: sample limit sets, estimate dimensions, verify
//! estimates against the closed-form predictions and plot.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod svg;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kleinian_dim::estdim::{assouad_dimension, box_dimension, lower_dimension, DimensionEstimate, LocalParams, ScaleGrid};
use kleinian_dim::group::{builtin, load_config, sample_budget, sample_limit_set, write_atomic, GroupPresentation, Params, PointCloud};
use kleinian_dim::predict::{phase_grid, phase_plot, sig12};
use kleinian_dim::Error;

use verify::{Tolerances, VerifyOptions};

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(name = "kleinian-dim", version, about = "Limit sets, Patterson-Sullivan measures and their dimensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a limit set and write it as a point cloud.
    Generate(GenerateArgs),
    /// Estimate the box, Assouad or lower dimension of a point cloud.
    Dimension(DimensionArgs),
    /// Run every estimator on a group and compare with the predicted values.
    Verify(VerifyArgs),
    /// Phase plot of the predicted dimensions, or a scatter plot of a limit set.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GroupArgs {
    /// Group configuration file.
    #[arg(long, value_name = "PATH", conflicts_with = "builtin")]
    config: Option<PathBuf>,
    /// Built-in group name.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Built-in group parameter.
    #[arg(long = "param", value_name = "KEY=VAL")]
    params: Vec<String>,
}

impl GroupArgs {
    fn load(&self) -> Result<GroupPresentation, Error> {
        match (&self.config, &self.builtin) {
            (Some(path), _) => {
                if !self.params.is_empty() {
                    return Err(Error::InvalidParameter("--param applies to built-in groups only".into()));
                }
                load_config(path).map_err(|e| match e {
                    Error::Io(io) => Error::Parse(format!("cannot read {}: {io}", path.display())),
                    e => e,
                })
            }
            (None, Some(name)) => builtin(name, &self.builtin_params()?),
            (None, None) => Err(Error::InvalidParameter("one of --config or --builtin is required".into())),
        }
    }

    fn builtin_params(&self) -> Result<Params, Error> {
        let mut p = Params::default();
        for a in &self.params {
            p.parse_assignment(a)?;
        }
        Ok(p)
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Longest word enumerated.
    #[arg(long, value_name = "N")]
    budget_words: Option<usize>,
    /// Largest hyperbolic distance enumerated.
    #[arg(long, value_name = "T")]
    budget_dist: Option<f64>,
    /// Most orbit points kept.
    #[arg(long, value_name = "N")]
    budget_points: Option<usize>,
}

impl BudgetArgs {
    fn apply(&self, mut b: kleinian_dim::group::Budget) -> kleinian_dim::group::Budget {
        if let Some(w) = self.budget_words {
            b.max_word_len = w;
        }
        if let Some(t) = self.budget_dist {
            b.max_dist = t;
        }
        if let Some(n) = self.budget_points {
            b.max_points = n;
        }
        b
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Target sampling resolution.
    #[arg(long, value_name = "R", default_value_t = 1e-3)]
    resolution: f64,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Box,
    Assouad,
    Lower,
}

#[derive(Args)]
struct DimensionArgs {
    /// Point cloud file.
    #[arg(long, value_name = "PATH")]
    cloud: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Box)]
    method: Method,
    /// Scale window `R_MIN:R_MAX:COUNT`; the count applies to the box method.
    #[arg(long, value_name = "R_MIN:R_MAX:COUNT")]
    scales: Option<String>,
    #[arg(long, value_name = "U64", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Sampling resolution of the limit set. Defaults to 1e-3, refined
    /// for sets of small dimension.
    #[arg(long, value_name = "R")]
    resolution: Option<f64>,
    /// Orbit depth of the Patterson-Sullivan approximation. Defaults to
    /// the depth reached with three million orbit points, rounded down to
    /// a multiple of 0.5.
    #[arg(long, value_name = "T")]
    measure_dist: Option<f64>,
    /// Override a tolerance or bound, e.g. `assouad=0.2`.
    #[arg(long = "tolerance", value_name = "NAME=VAL")]
    tolerances: Vec<String>,
    #[arg(long, value_name = "U64", default_value_t = 0)]
    seed: u64,
    /// Report file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Phase plot for cusp ranks `K_MIN K_MAX` and boundary dimension `D`.
    #[arg(long, num_args = 3, value_names = ["K_MIN", "K_MAX", "D"], conflicts_with = "gasket", required_unless_present = "gasket")]
    phase: Option<Vec<usize>>,
    /// Scatter plot of the limit set of a group configuration file or
    /// built-in name.
    #[arg(long, value_name = "CONFIG")]
    gasket: Option<String>,
    /// Grid points of the phase plot.
    #[arg(long, value_name = "N", default_value_t = 200)]
    points: usize,
    /// Sampling resolution of the scatter plot.
    #[arg(long, value_name = "R", default_value_t = 1e-3)]
    resolution: f64,
    /// Table file (phase mode); standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// SVG file. Defaults to the table path with extension `svg`; required
    /// in scatter mode.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Computation(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidParameter(_) | Error::UnknownGroup(_) | Error::InvalidProfile(_) => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Computation(e.to_string()),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(|e| Failure::Computation(e.to_string())),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes()).and_then(|_| o.flush()).map_err(|e| Failure::Computation(e.to_string()))
        }
    }
}

/// Progress and summaries go to stderr when the data goes to stdout.
fn note(to_stdout: bool, msg: &str) {
    if to_stdout {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

fn generate(a: &GenerateArgs) -> Result<(), Failure> {
    let g = a.group.load()?;
    let budget = a.budget.apply(sample_budget(&g, a.resolution));
    let cloud = sample_limit_set(&g, a.resolution, budget)?;
    let mut buf = vec![];
    cloud.write_to(&mut buf)?;
    emit(a.out.as_deref(), &String::from_utf8_lossy(&buf))?;
    note(a.out.is_some(), &format!("points: {}", cloud.len()));
    note(a.out.is_some(), &format!("resolution: {}", cloud.resolution));
    note(a.out.is_some(), &format!("provenance: {}", cloud.provenance));
    Ok(())
}

fn read_cloud(path: &Path) -> Result<PointCloud, Failure> {
    let f = std::fs::File::open(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(PointCloud::read_from(std::io::BufReader::new(f))?)
}

fn format_estimate(e: &DimensionEstimate) -> String {
    let mut s = format!("method,{}\nvalue,{}\n", e.method, sig12(e.value));
    s += &format!("scale_range,{},{}\n", sig12(e.scale_range.0), sig12(e.scale_range.1));
    if let Some(w) = &e.witness {
        s += &format!("witness_center,{},{},{}\n", w.center[0], w.center[1], w.center[2]);
        s += &format!("witness_index,{}\n", w.center_index);
        s += &format!("witness_scales,{},{}\n", sig12(w.big), sig12(w.small));
    }
    for (name, v) in &e.diagnostics {
        s += &format!("{name},{}\n", sig12(*v));
    }
    s
}

fn dimension(a: &DimensionArgs) -> Result<(), Failure> {
    let cloud = read_cloud(&a.cloud)?;
    let grid = a.scales.as_deref().map(ScaleGrid::parse).transpose()?;
    let est = match a.method {
        Method::Box => {
            let grid = match grid {
                Some(g) => g,
                None => verify::default_box_grid(&cloud)?,
            };
            box_dimension(&cloud, &grid, a.seed)?
        }
        Method::Assouad | Method::Lower => {
            let base = if a.method == Method::Assouad { LocalParams::assouad() } else { LocalParams::lower() };
            let mut p = LocalParams { seed: a.seed, ..base };
            if let Some(g) = grid {
                p.r_min = Some(g.r_min);
                p.r_max = Some(g.r_max);
            }
            if a.method == Method::Assouad {
                assouad_dimension(&cloud, &p)?
            } else {
                lower_dimension(&cloud, &p)?
            }
        }
    };
    emit(None, &format_estimate(&est))
}

fn verify_cmd(a: &VerifyArgs) -> Result<(), Failure> {
    let g = a.group.load()?;
    let mut tol = Tolerances::default();
    for t in &a.tolerances {
        tol.set(t)?;
    }
    if g.name() == "infinite_fuchsian" {
        // box bound tracks the exponent of the centre sequence
        let beta = a.group.builtin_params()?.get("beta", 0.75);
        if !a.tolerances.iter().any(|t| t.starts_with("box_min=")) {
            tol.box_min = beta - 0.1;
        }
    }
    let opts = VerifyOptions { resolution: a.resolution, measure_dist: a.measure_dist, seed: a.seed, tolerances: tol };
    let report = verify::run(&g, &opts);
    emit(a.out.as_deref(), &report.to_text())?;
    if a.out.is_some() {
        eprint!("{}", report.summary());
    }
    if report.has_errors() {
        Err(Failure::Computation("a verification stage failed; see the report".into()))
    } else if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn svg_path(a: &PlotArgs) -> Option<PathBuf> {
    a.svg.clone().or_else(|| a.out.as_ref().map(|p| p.with_extension("svg")))
}

fn plot(a: &PlotArgs) -> Result<(), Failure> {
    if let Some(v) = &a.phase {
        let (k_min, k_max, d) = (v[0], v[1], v[2]);
        if a.points == 0 {
            return Err(Failure::Usage("--points must be positive".into()));
        }
        let table = phase_plot(k_min, k_max, d, &phase_grid(k_max, d, a.points))?;
        emit(a.out.as_deref(), &table.to_text())?;
        if let Some(p) = svg_path(a) {
            write_atomic(&p, svg::phase(&table).as_bytes())?;
        }
        return Ok(());
    }
    let name = a.gasket.as_deref().unwrap_or_default();
    let path = Path::new(name);
    let g = if path.exists() { load_config(path)? } else { builtin(name, &Params::default())? };
    let cloud = sample_limit_set(&g, a.resolution, sample_budget(&g, a.resolution))?;
    let out = svg_path(a).ok_or_else(|| Failure::Usage("scatter mode needs --svg or --out".into()))?;
    write_atomic(&out, svg::scatter(&cloud).as_bytes())?;
    println!("points: {}", cloud.len());
    Ok(())
}

/// Caps the worker pool at `KLEINIAN_DIM_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("KLEINIAN_DIM_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("KLEINIAN_DIM_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Computation(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Dimension(a) => dimension(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Plot(a) => plot(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Computation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_COMPUTATION)
        }
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFICATION),
    }
}
