//! `halfbound`: reflection scans, critical strengths and half-bound-state
//! profiles for one-dimensional attractive wells.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 no
//! critical point in the requested range.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use halfbound::analytic::AnalyticError;
use halfbound::critical::{self, CriticalError, HbsResult};
use halfbound::scan::{self, GridMetadata, ScanError};
use halfbound::scatter::{self, ScatterError};
use halfbound::{specfun, Descriptor, Error, Family, GridConfig, Method, Potential};
use serde_json::json;

#[derive(Parser)]
#[command(name = "halfbound", version, about = "Threshold reflection and half-bound states of 1D wells")]
struct Cli {
    #[command(flatten)]
    opts: CommonOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Scattering route (default: transfer; table1 defaults to analytic)
    #[arg(long, global = true, value_parser = parse_method)]
    method: Option<Method>,
    /// RK4 step size
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Number of transfer-matrix slices
    #[arg(long, global = true)]
    slices: Option<usize>,
    /// Tail truncation relative to the well depth
    #[arg(long, global = true, default_value_t = halfbound::potentials::DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Reflection and transmission at one energy
    Reflect {
        /// Descriptor JSON, or a file containing it
        #[arg(long)]
        potential: String,
        #[arg(long = "energy", short = 'E')]
        energy: f64,
    },
    /// R(q) at fixed energy over a uniform strength grid
    ScanQ {
        /// Descriptor JSON (strength parameter ignored), or a file
        #[arg(long)]
        potential: String,
        #[arg(long = "energy", short = 'E', default_value_t = 0.01)]
        energy: f64,
        #[arg(long)]
        q_min: f64,
        #[arg(long)]
        q_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Where to write the minima sidecar (default: next to --out)
        #[arg(long)]
        minima: Option<PathBuf>,
    },
    /// R(E) for a fixed well
    ScanE {
        #[arg(long)]
        potential: String,
        #[arg(long)]
        e_min: f64,
        #[arg(long)]
        e_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Uniform instead of logarithmic spacing
        #[arg(long)]
        linear: bool,
    },
    /// Critical strengths, in a bracket or up to a maximum
    FindQc {
        #[arg(long)]
        potential: String,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], conflicts_with = "q_max")]
        bracket: Option<Vec<f64>>,
        #[arg(long)]
        q_max: Option<f64>,
    },
    /// Half-bound-state profile at the critical strength inside a bracket
    HbsProfile {
        #[arg(long)]
        potential: String,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], required = true)]
        bracket: Vec<f64>,
    },
    /// Exponential well near its first critical strength
    Table1,
    #[command(hide = true)]
    SpecfunCheck,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

fn analytic_code(e: &AnalyticError) -> u8 {
    match e {
        AnalyticError::Degenerate { .. } | AnalyticError::Specfun(_) => 3,
        _ => 2,
    }
}

fn scatter_code(e: &ScatterError) -> u8 {
    match e {
        ScatterError::Energy { .. } | ScatterError::Grid { .. } | ScatterError::Potential(_) => 2,
        ScatterError::Analytic(a) => analytic_code(a),
        _ => 3,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Potential(_) => 2,
            Error::Specfun(_) => 3,
            Error::Analytic(a) => analytic_code(a),
            Error::Scatter(s) => scatter_code(s),
            Error::Critical(c) => match c {
                CriticalError::NoRoot { .. } => 4,
                CriticalError::Strength { .. } | CriticalError::Potential(_) => 2,
                CriticalError::Scatter(s) => scatter_code(s),
                CriticalError::Root(_) => 3,
            },
            Error::Scan(s) => match s {
                ScanError::Scatter(s) => scatter_code(s),
                _ => 2,
            },
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

macro_rules! lib_err {
    ($e:expr) => {
        $e.map_err(|e| Failure::from(Error::from(e)))
    };
}

fn read_descriptor(arg: &str) -> Result<Descriptor, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::input(format!("cannot read potential file {arg}: {e}")))?
    };
    lib_err!(Descriptor::from_json(&text))
}

fn sci(x: f64) -> String {
    format!("{x:.9e}")
}

fn grid_config(opts: &CommonOpts) -> GridConfig {
    GridConfig {
        step: opts.step,
        n_slices: opts.slices,
        tail_tol: opts.tail_tol,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure {
            code: 1,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn metadata_header(desc: &Descriptor, method: Method, grid: &GridMetadata) -> String {
    format!(
        "# potential: {}\n# method: {method}\n# step: {}, n_slices: {}, tail_tol: {}\n",
        desc.to_json(),
        sci(grid.step),
        grid.n_slices,
        sci(grid.tail_tol)
    )
}

fn complex_json(z: Option<halfbound::Complex64>) -> serde_json::Value {
    match z {
        Some(z) => json!({ "re": z.re, "im": z.im }),
        None => serde_json::Value::Null,
    }
}

fn cmd_reflect(opts: &CommonOpts, potential: &str, energy: f64) -> Result<(), Failure> {
    let desc = read_descriptor(potential)?;
    let p = lib_err!(Potential::from_descriptor(&desc))?;
    let cfg = grid_config(opts);
    let method = opts.method.unwrap_or(Method::TransferMatrix);
    let res = lib_err!(scatter::reflect(&p, energy, method, &cfg))?;
    let grid = GridMetadata::new(&p, &cfg);
    let text = match opts.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&json!({
            "potential": desc,
            "energy": energy,
            "method": method,
            "r": complex_json(res.r),
            "t": complex_json(res.t),
            "R": res.reflection,
            "T": res.transmission,
            "unitarity_residual": res.unitarity_residual,
            "transmission_from_unitarity": res.transmission_from_unitarity,
            "grid": grid,
        })),
        Format::Csv => {
            let mut s = metadata_header(&desc, method, &grid);
            s.push_str("E,R,T,r_re,r_im,unitarity_residual\n");
            let (re, im) = res.r.map_or((f64::NAN, f64::NAN), |r| (r.re, r.im));
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                sci(energy),
                sci(res.reflection),
                sci(res.transmission),
                sci(re),
                sci(im),
                sci(res.unitarity_residual)
            );
            s
        }
    };
    emit(opts.out.as_deref(), &text)
}

fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

fn emit_table(opts: &CommonOpts, table: &scan::ScanTable, minima: Option<&Path>) -> Result<(), Failure> {
    let text = match opts.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = table.to_json();
            s.push('\n');
            s
        }
    };
    emit(opts.out.as_deref(), &text)?;
    let minima = minima
        .map(Path::to_path_buf)
        .or_else(|| opts.out.as_deref().map(|o| sidecar_path(o, ".minima.json")));
    if let Some(path) = minima {
        let mut s = table.minima_json();
        s.push('\n');
        emit(Some(&path), &s)?;
    }
    Ok(())
}

fn cmd_scan_q(
    opts: &CommonOpts,
    potential: &str,
    energy: f64,
    range: (f64, f64),
    points: usize,
    minima: Option<&Path>,
) -> Result<(), Failure> {
    let desc = read_descriptor(potential)?;
    let family = lib_err!(Family::from_descriptor(&desc))?;
    let method = opts.method.unwrap_or(Method::TransferMatrix);
    let table = lib_err!(scan::scan_q(&family, energy, range.0, range.1, points, method, &grid_config(opts)))?;
    emit_table(opts, &table, minima)
}

fn cmd_scan_e(opts: &CommonOpts, potential: &str, range: (f64, f64), points: usize, linear: bool) -> Result<(), Failure> {
    let desc = read_descriptor(potential)?;
    let p = lib_err!(Potential::from_descriptor(&desc))?;
    let method = opts.method.unwrap_or(Method::TransferMatrix);
    let table = lib_err!(scan::scan_e(&p, range.0, range.1, points, !linear, method, &grid_config(opts)))?;
    emit_table(opts, &table, None)
}

fn hbs_summary(h: &HbsResult) -> serde_json::Value {
    json!({
        "q_c": h.q_c,
        "node_count": h.node_count,
        "parity": h.parity,
        "left_residual": h.left_residual,
        "right_residual": h.right_residual,
        "threshold_r": complex_json(h.threshold_r),
        "wronskian_drift": h.wronskian_drift,
    })
}

fn bracket_pair(bracket: &[f64]) -> Result<(f64, f64), Failure> {
    match bracket {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(Failure::input("bracket needs two values LO < HI")),
    }
}

fn cmd_find_qc(opts: &CommonOpts, potential: &str, bracket: Option<&[f64]>, q_max: Option<f64>) -> Result<(), Failure> {
    let desc = read_descriptor(potential)?;
    let family = lib_err!(Family::from_descriptor(&desc))?;
    let cfg = grid_config(opts);
    let found = match (bracket, q_max) {
        (Some(b), _) => vec![lib_err!(critical::find_critical_q(&family, bracket_pair(b)?, &cfg))?],
        (None, Some(q)) => lib_err!(critical::critical_spectrum(&family, q, &cfg))?,
        (None, None) => return Err(Failure::input("give --bracket LO HI or --q-max")),
    };
    if found.is_empty() {
        let hi = q_max.unwrap_or(f64::NAN);
        return Err(Error::from(CriticalError::NoRoot {
            lo: family.strength_floor(),
            hi,
        })
        .into());
    }
    let text = match opts.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&json!({
            "potential": desc,
            "strength": family.kind().strength_name(),
            "critical": found.iter().map(hbs_summary).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = format!("# potential: {}\n", desc.to_json());
            s.push_str("q_c,node_count,parity,left_residual,right_residual\n");
            for h in &found {
                let parity = h.parity.map_or("none", |p| match p {
                    halfbound::analytic::Parity::Even => "even",
                    halfbound::analytic::Parity::Odd => "odd",
                });
                let _ = writeln!(
                    s,
                    "{},{},{parity},{},{}",
                    sci(h.q_c),
                    h.node_count,
                    sci(h.left_residual),
                    sci(h.right_residual)
                );
            }
            s
        }
    };
    emit(opts.out.as_deref(), &text)
}

fn cmd_hbs_profile(opts: &CommonOpts, potential: &str, bracket: &[f64]) -> Result<(), Failure> {
    let desc = read_descriptor(potential)?;
    let family = lib_err!(Family::from_descriptor(&desc))?;
    let cfg = grid_config(opts);
    let h = lib_err!(critical::find_critical_q(&family, bracket_pair(bracket)?, &cfg))?;
    let summary = hbs_summary(&h);
    let text = match opts.format.unwrap_or(Format::Csv) {
        Format::Json => pretty(&json!({ "potential": desc, "result": h })),
        Format::Csv => {
            let mut s = format!("# potential: {}\n# hbs: {}\n", desc.to_json(), summary);
            s.push_str("x,psi,dpsi,V\n");
            for p in &h.profile {
                let _ = writeln!(s, "{},{},{},{}", sci(p.x), sci(p.psi), sci(p.dpsi), sci(p.v));
            }
            s
        }
    };
    emit(opts.out.as_deref(), &text)?;
    if let (Some(out), Format::Csv) = (opts.out.as_deref(), opts.format.unwrap_or(Format::Csv)) {
        emit(
            Some(&sidecar_path(out, ".json")),
            &pretty(&json!({ "potential": desc, "result": summary })),
        )?;
    }
    Ok(())
}

fn cmd_table1(opts: &CommonOpts) -> Result<(), Failure> {
    let method = opts.method.unwrap_or(Method::Analytic);
    let table = lib_err!(scan::table1(method, &grid_config(opts)))?;
    match opts.format {
        None => {
            print!("{}", table.to_text());
            if let Some(out) = opts.out.as_deref() {
                emit(Some(out), &table.to_csv())?;
            }
            Ok(())
        }
        Some(Format::Csv) => emit(opts.out.as_deref(), &table.to_csv()),
        Some(Format::Json) => emit(
            opts.out.as_deref(),
            &pretty(&serde_json::to_value(&table).expect("table serializes")),
        ),
    }
}

fn cmd_specfun_check(opts: &CommonOpts) -> Result<(), Failure> {
    let residuals = lib_err!(specfun::identity_residuals())?;
    let worst = residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let text = pretty(&json!({
        "residuals": residuals.iter().map(|(k, v)| json!({ "check": k, "residual": v })).collect::<Vec<_>>(),
        "max_residual": worst,
    }));
    emit(opts.out.as_deref(), &text)?;
    if worst > 1e-9 {
        return Err(Failure {
            code: 3,
            message: format!("identity residual {worst:.3e} above 1e-9"),
        });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Reflect { potential, energy } => cmd_reflect(opts, potential, *energy),
        Command::ScanQ {
            potential,
            energy,
            q_min,
            q_max,
            points,
            minima,
        } => cmd_scan_q(opts, potential, *energy, (*q_min, *q_max), *points, minima.as_deref()),
        Command::ScanE {
            potential,
            e_min,
            e_max,
            points,
            linear,
        } => cmd_scan_e(opts, potential, (*e_min, *e_max), *points, *linear),
        Command::FindQc {
            potential,
            bracket,
            q_max,
        } => cmd_find_qc(opts, potential, bracket.as_deref(), *q_max),
        Command::HbsProfile { potential, bracket } => cmd_hbs_profile(opts, potential, bracket),
        Command::Table1 => cmd_table1(opts),
        Command::SpecfunCheck => cmd_specfun_check(opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("halfbound: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
