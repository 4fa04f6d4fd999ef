//! `morse-gpe` command-line front end.
//!
//! Every subcommand writes one file named after itself into the output
//! directory (`--output-path`, else `$MORSE_GPE_OUT`, else the current
//! directory), or prints it with `--stdout`. CSV numbers carry 13
//! significant digits; JSON documents are tagged with a `kind` field. Both
//! can be read back with `--from-file`, which re-emits them unchanged.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    check_k, density, morse_potential, uniform_grid, AnsatzParams, DimensionlessSystem,
};
use crate::oracle::{
    grid_minimize, imaginary_time_ground_state, BetaChoice, GridSearchResult, LambdaConvention,
    PdeConfig,
};
use crate::report::{emit_report, ComparisonReport};
use crate::solver::{
    bound_state, critical_coupling, stationary_points_in, sweep_g, sweep_k, CriticalPoint,
    RootSearch, SolveMode, StationaryPoint, SweepGRow, DEFAULT_ALPHA_MAX, DEFAULT_ALPHA_MIN,
    FINE_SCAN_POINTS,
};

pub const OUTPUT_ENV: &str = "MORSE_GPE_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

pub const HEADER_POTENTIAL: &[&str] = &["k", "u", "V"];
pub const HEADER_SOLVE: &[&str] = &[
    "alpha", "beta", "E_osc", "E_int", "E", "grad_norm", "h_aa", "h_ab", "h_bb",
    "classification", "condition_classification",
];
pub const HEADER_CRITICAL: &[&str] = &[
    "k", "gprime_c", "alpha_star", "beta_star", "E_critical", "termination",
];
pub const HEADER_SWEEP_G: &[&str] = &["gprime", "alpha1", "beta1", "E1", "alpha2", "beta2", "E2"];
pub const HEADER_SWEEP_K: &[&str] = &["k", "gprime_c", "alpha_star", "E_critical"];
pub const HEADER_DENSITY: &[&str] = &["k", "gprime", "alpha", "beta", "y", "d"];
pub const HEADER_ORACLE_GRID: &[&str] = &[
    "k", "gprime", "best_alpha", "best_beta", "best_energy", "refined_alpha", "refined_beta",
    "refined_energy",
];
pub const HEADER_ORACLE_PDE: &[&str] = &["x", "density"];

const KNOWN_HEADERS: &[&[&str]] = &[
    HEADER_POTENTIAL,
    HEADER_SOLVE,
    HEADER_CRITICAL,
    HEADER_SWEEP_G,
    HEADER_SWEEP_K,
    HEADER_DENSITY,
    HEADER_ORACLE_GRID,
    HEADER_ORACLE_PDE,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Paper,
    Consistent,
}

impl From<ModeArg> for SolveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => SolveMode::Paper,
            ModeArg::Consistent => SolveMode::Consistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LambdaArg {
    Derived,
    Paper,
}

impl From<LambdaArg> for LambdaConvention {
    fn from(l: LambdaArg) -> Self {
        match l {
            LambdaArg::Derived => LambdaConvention::DerivedLambda,
            LambdaArg::Paper => LambdaConvention::PaperLambda,
        }
    }
}

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(
    name = "morse-gpe",
    version,
    about = "Variational GPE ground state in a Morse well"
)]
pub struct RunConfig {
    /// Output directory (falls back to $MORSE_GPE_OUT, then the current directory).
    #[arg(long, global = true)]
    pub output_path: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Print to stdout instead of writing a file.
    #[arg(long, global = true)]
    pub stdout: bool,
    /// Re-read a CSV or JSON file emitted by this tool and emit it again.
    #[arg(long)]
    pub from_file: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Morse potential V(u) = exp(-2u/k) - 2 exp(-u/k) on a grid of u = b x.
    Potential {
        /// Well parameters, comma list or start:stop:step.
        #[arg(long, default_value = "2,3,5")]
        k: String,
        #[arg(long, default_value = "-2:20:0.05")]
        u_range: String,
    },
    /// Stationary points at one (k, g').
    Solve {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
        /// Root-scan window lo:hi.
        #[arg(long)]
        alpha_range: Option<String>,
        #[arg(long, default_value_t = FINE_SCAN_POINTS)]
        scan_points: usize,
    },
    /// Critical coupling where the bound state disappears.
    Critical {
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
    },
    /// Stationary energies over a list or range of couplings at fixed k.
    SweepG {
        #[arg(long)]
        k: f64,
        /// Couplings, comma list or start:stop:step.
        #[arg(long)]
        gprime: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
    },
    /// Critical couplings over a list or range of k.
    SweepK {
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
    },
    /// Density profiles d(y) of the bound stationary state.
    Density {
        #[arg(long)]
        k: String,
        /// Couplings (ignored with --at-critical).
        #[arg(long, default_value = "0")]
        gprime: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
        /// Use the critical coupling of each k.
        #[arg(long)]
        at_critical: bool,
        #[arg(long, default_value = "0.01:20:0.01")]
        y_range: String,
    },
    /// Brute-force scan of the variational energy.
    OracleGrid {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value = "0.2:8")]
        alpha_range: String,
        /// Scan beta over lo:hi as well; without it beta = (alpha + 1/2)/k.
        #[arg(long)]
        beta_range: Option<String>,
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
    },
    /// Imaginary-time ground state of the full energy functional.
    OraclePde {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum, default_value_t = LambdaArg::Derived)]
        lambda: LambdaArg,
        /// x_min:x_max in units of the Morse range (default -3:10k).
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, default_value_t = 2048)]
        n_points: usize,
        #[arg(long, default_value_t = 1e-3)]
        dtau: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_iterations: usize,
    },
    /// Published vs. computed comparison (markdown and JSON).
    Report {
        #[arg(long, default_value = "2,3,4,5")]
        k: String,
    },
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub gprime: f64,
}

impl SystemArgs {
    fn system(&self) -> Result<DimensionlessSystem> {
        DimensionlessSystem::new(self.k, self.gprime)
    }
}

/// Parses `a,b,c`, `start:stop:step` or a single number.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Argument(format!("not a number: '{t}'")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => uniform_grid(num(start)?, num(stop)?, num(step)?)?,
        [_] => s.split(',').map(num).collect::<Result<_>>()?,
        _ => return Err(Error::Argument(format!("cannot parse value list '{s}'"))),
    };
    if values.is_empty() {
        return Err(Error::Argument(format!("empty value list '{s}'")));
    }
    Ok(values)
}

/// Parses `lo:hi`.
pub fn parse_interval(s: &str) -> Result<(f64, f64)> {
    let v: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Argument(format!("cannot parse interval '{s}'")))?;
    match v.as_slice() {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(Error::Argument(format!("expected lo:hi with lo < hi, got '{s}'"))),
    }
}

fn parse_ks(s: &str) -> Result<Vec<f64>> {
    let ks = parse_values(s)?;
    for &k in &ks {
        check_k(k)?;
    }
    Ok(ks)
}

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.12e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn parse(s: &str) -> Self {
        if s.is_empty() {
            Cell::Empty
        } else if let Ok(i) = s.parse::<i64>() {
            Cell::Int(i)
        } else if let Ok(x) = s.parse::<f64>() {
            Cell::Num(x)
        } else {
            Cell::Text(s.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Argument(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if !KNOWN_HEADERS
            .iter()
            .any(|h| h.len() == header.len() && h.iter().zip(&header).all(|(a, b)| a == b))
        {
            return Err(Error::Argument(format!("unrecognized CSV header {header:?}")));
        }
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(Cell::parse).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { header, rows })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialCurve {
    pub k: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub k: f64,
    pub gprime: f64,
    pub alpha: f64,
    pub beta: f64,
    pub peak_y: f64,
    pub y: Vec<f64>,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeSummary {
    pub k: f64,
    pub gprime: f64,
    pub lambda: f64,
    pub convention: LambdaConvention,
    pub energy_over_nd: f64,
    pub iterations: usize,
    pub residual: f64,
    pub final_dtau: f64,
    pub norm: f64,
    pub mass_beyond_x10: f64,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
}

/// JSON output documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    Potential {
        curves: Vec<PotentialCurve>,
    },
    Solve {
        k: f64,
        gprime: f64,
        mode: SolveMode,
        points: Vec<StationaryPoint>,
    },
    Critical {
        mode: SolveMode,
        points: Vec<CriticalPoint>,
    },
    SweepG {
        k: f64,
        mode: SolveMode,
        rows: Vec<SweepGRow>,
    },
    SweepK {
        mode: SolveMode,
        rows: Vec<CriticalPoint>,
        gprime_c_decreasing: bool,
    },
    Density {
        mode: SolveMode,
        curves: Vec<DensityCurve>,
    },
    OracleGrid {
        k: f64,
        gprime: f64,
        result: GridSearchResult,
    },
    OraclePde(PdeSummary),
    Report(ComparisonReport),
}

impl Document {
    fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    fn to_table(&self) -> Table {
        match self {
            Document::Potential { curves } => {
                let mut t = Table::new(HEADER_POTENTIAL);
                for c in curves {
                    for (u, v) in c.u.iter().zip(&c.v) {
                        t.rows.push(vec![Cell::Num(c.k), Cell::Num(*u), Cell::Num(*v)]);
                    }
                }
                t
            }
            Document::Solve { points, .. } => {
                let mut t = Table::new(HEADER_SOLVE);
                for p in points {
                    t.rows.push(vec![
                        Cell::Num(p.alpha),
                        Cell::Num(p.beta),
                        Cell::Num(p.energy.oscillator_part),
                        Cell::Num(p.energy.interaction_part),
                        Cell::Num(p.energy.total),
                        Cell::Num(p.grad_norm),
                        Cell::Num(p.hessian.d2_alpha),
                        Cell::Num(p.hessian.d2_alpha_beta),
                        Cell::Num(p.hessian.d2_beta),
                        Cell::Text(p.classification.as_str().into()),
                        Cell::Text(p.condition_classification.as_str().into()),
                    ]);
                }
                t
            }
            Document::Critical { points, .. } => {
                let mut t = Table::new(HEADER_CRITICAL);
                for c in points {
                    t.rows.push(vec![
                        Cell::Num(c.k),
                        Cell::Num(c.gprime_c),
                        Cell::Num(c.alpha_star),
                        Cell::Num(c.beta_star),
                        Cell::Num(c.energy_at_critical),
                        Cell::Text(c.termination.describe()),
                    ]);
                }
                t
            }
            Document::SweepG { rows, .. } => {
                let mut t = Table::new(HEADER_SWEEP_G);
                for r in rows {
                    t.rows.push(vec![
                        Cell::Num(r.gprime),
                        Cell::opt(r.alpha1),
                        Cell::opt(r.beta1),
                        Cell::opt(r.e1),
                        Cell::opt(r.alpha2),
                        Cell::opt(r.beta2),
                        Cell::opt(r.e2),
                    ]);
                }
                t
            }
            Document::SweepK { rows, .. } => {
                let mut t = Table::new(HEADER_SWEEP_K);
                for c in rows {
                    t.rows.push(vec![
                        Cell::Num(c.k),
                        Cell::Num(c.gprime_c),
                        Cell::Num(c.alpha_star),
                        Cell::Num(c.energy_at_critical),
                    ]);
                }
                t
            }
            Document::Density { curves, .. } => {
                let mut t = Table::new(HEADER_DENSITY);
                for c in curves {
                    for (y, d) in c.y.iter().zip(&c.d) {
                        t.rows.push(vec![
                            Cell::Num(c.k),
                            Cell::Num(c.gprime),
                            Cell::Num(c.alpha),
                            Cell::Num(c.beta),
                            Cell::Num(*y),
                            Cell::Num(*d),
                        ]);
                    }
                }
                t
            }
            Document::OracleGrid { k, gprime, result } => {
                let mut t = Table::new(HEADER_ORACLE_GRID);
                t.rows.push(vec![
                    Cell::Num(*k),
                    Cell::Num(*gprime),
                    Cell::Num(result.best_alpha),
                    Cell::Num(result.best_beta),
                    Cell::Num(result.best_energy),
                    Cell::Num(result.refined_alpha),
                    Cell::Num(result.refined_beta),
                    Cell::Num(result.refined_energy),
                ]);
                t
            }
            Document::OraclePde(s) => {
                let mut t = Table::new(HEADER_ORACLE_PDE);
                for (x, d) in s.x.iter().zip(&s.density) {
                    t.rows.push(vec![Cell::Num(*x), Cell::Num(*d)]);
                }
                t
            }
            Document::Report(_) => Table::new(&[]),
        }
    }
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Potential { .. }
        | Command::SweepG { .. }
        | Command::SweepK { .. }
        | Command::Density { .. } => Format::Csv,
        _ => Format::Json,
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Potential { .. } => "potential",
        Command::Solve { .. } => "solve",
        Command::Critical { .. } => "critical",
        Command::SweepG { .. } => "sweep-g",
        Command::SweepK { .. } => "sweep-k",
        Command::Density { .. } => "density",
        Command::OracleGrid { .. } => "oracle-grid",
        Command::OraclePde { .. } => "oracle-pde",
        Command::Report { .. } => "report",
    }
}

fn execute(cmd: &Command) -> Result<Document> {
    match cmd {
        Command::Potential { k, u_range } => {
            let ks = parse_ks(k)?;
            let us = parse_values(u_range)?;
            let curves = ks
                .into_iter()
                .map(|k| PotentialCurve {
                    k,
                    v: us.iter().map(|&u| morse_potential(u, k)).collect(),
                    u: us.clone(),
                })
                .collect();
            Ok(Document::Potential { curves })
        }
        Command::Solve {
            system,
            mode,
            alpha_range,
            scan_points,
        } => {
            let sys = system.system()?;
            let (lo, hi) = match alpha_range {
                Some(r) => parse_interval(r)?,
                None => (DEFAULT_ALPHA_MIN, DEFAULT_ALPHA_MAX.max(4.0 * sys.k())),
            };
            let search = RootSearch::new(lo, hi, *scan_points)?;
            let mode = SolveMode::from(*mode);
            Ok(Document::Solve {
                k: sys.k(),
                gprime: sys.gprime(),
                mode,
                points: stationary_points_in(sys, mode, &search)?,
            })
        }
        Command::Critical { k, mode } => {
            let ks = parse_ks(k)?;
            let mode = SolveMode::from(*mode);
            let sweep = sweep_k(&ks, mode)?;
            Ok(Document::Critical {
                mode,
                points: sweep.rows,
            })
        }
        Command::SweepG { k, gprime, mode } => {
            check_k(*k)?;
            let gs = parse_values(gprime)?;
            for &g in &gs {
                DimensionlessSystem::new(*k, g)?;
            }
            let mode = SolveMode::from(*mode);
            Ok(Document::SweepG {
                k: *k,
                mode,
                rows: sweep_g(*k, &gs, mode)?,
            })
        }
        Command::SweepK { k, mode } => {
            let ks = parse_ks(k)?;
            let mode = SolveMode::from(*mode);
            let s = sweep_k(&ks, mode)?;
            Ok(Document::SweepK {
                mode,
                rows: s.rows,
                gprime_c_decreasing: s.gprime_c_decreasing,
            })
        }
        Command::Density {
            k,
            gprime,
            mode,
            at_critical,
            y_range,
        } => {
            let ks = parse_ks(k)?;
            let ys = parse_values(y_range)?;
            let gs = parse_values(gprime)?;
            let mode = SolveMode::from(*mode);
            let mut curves = Vec::new();
            for &k in &ks {
                let couplings = if *at_critical {
                    vec![critical_coupling(k, mode)?.gprime_c]
                } else {
                    gs.clone()
                };
                for g in couplings {
                    let sys = DimensionlessSystem::new(k, g)?;
                    let params = match (at_critical, mode) {
                        (true, SolveMode::Consistent) => {
                            let c = critical_coupling(k, mode)?;
                            Some(AnsatzParams::new(c.alpha_star, c.beta_star)?)
                        }
                        _ => bound_state(sys, mode)?,
                    };
                    let Some(params) = params else {
                        return Err(Error::Argument(format!(
                            "no stationary state at k={k}, g'={g}"
                        )));
                    };
                    let prof = density(params, &ys)?;
                    curves.push(DensityCurve {
                        k,
                        gprime: g,
                        alpha: params.alpha,
                        beta: params.beta,
                        peak_y: crate::model::peak_location(params),
                        y: prof.y_values,
                        d: prof.d_values,
                    });
                }
            }
            Ok(Document::Density { mode, curves })
        }
        Command::OracleGrid {
            system,
            alpha_range,
            beta_range,
            resolution,
        } => {
            let sys = system.system()?;
            let alpha = parse_interval(alpha_range)?;
            let choice = match beta_range {
                Some(r) => {
                    let (beta_min, beta_max) = parse_interval(r)?;
                    BetaChoice::Full { beta_min, beta_max }
                }
                None => BetaChoice::Constrained,
            };
            Ok(Document::OracleGrid {
                k: sys.k(),
                gprime: sys.gprime(),
                result: grid_minimize(sys, alpha, choice, *resolution)?,
            })
        }
        Command::OraclePde {
            system,
            lambda,
            domain,
            n_points,
            dtau,
            tol,
            max_iterations,
        } => {
            let sys = system.system()?;
            let (x_min, x_max) = match domain {
                Some(d) => parse_interval(d)?,
                None => (-3.0, 10.0 * sys.k()),
            };
            let config = PdeConfig {
                x_min,
                x_max,
                n_points: *n_points,
                dtau: *dtau,
                tol: *tol,
                max_iterations: *max_iterations,
            };
            let conv = LambdaConvention::from(*lambda);
            let gs = imaginary_time_ground_state(sys, conv, &config)?;
            Ok(Document::OraclePde(PdeSummary {
                k: sys.k(),
                gprime: sys.gprime(),
                lambda: conv.lambda(sys),
                convention: conv,
                energy_over_nd: gs.energy_over_nd,
                iterations: gs.iterations,
                residual: gs.residual,
                final_dtau: gs.final_dtau,
                norm: gs.norm(),
                mass_beyond_x10: gs.mass_beyond(10.0),
                x: gs.x_grid,
                density: gs.density,
            }))
        }
        Command::Report { k } => Ok(Document::Report(emit_report(&parse_values(k)?)?)),
    }
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_path
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn emit(
    cfg: &RunConfig,
    name: &str,
    contents: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    if cfg.stdout {
        stdout.write_all(contents.as_bytes())?;
        return Ok(());
    }
    let dir = output_dir(cfg);
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    writeln!(stderr, "wrote {}", path.display())?;
    Ok(())
}

fn reemit(
    cfg: &RunConfig,
    path: &Path,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::Argument(format!("bad input path {}", path.display())))?;
    let out = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Table::from_csv(&text)?.to_csv()?,
        Some("json") => serde_json::from_str::<Document>(&text)?.to_json()?,
        _ => {
            return Err(Error::Argument(format!(
                "--from-file expects a .csv or .json file, got {}",
                path.display()
            )))
        }
    };
    if cfg.output_path.is_none() && !cfg.stdout {
        stdout.write_all(out.as_bytes())?;
        return Ok(());
    }
    emit(cfg, name, &out, stdout, stderr)
}

fn dispatch(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    if let Some(path) = &cfg.from_file {
        if cfg.command.is_some() {
            return Err(Error::Argument("--from-file cannot be combined with a subcommand".into()));
        }
        return reemit(cfg, path, stdout, stderr);
    }
    let Some(cmd) = &cfg.command else {
        return Err(Error::Argument("a subcommand or --from-file is required".into()));
    };
    let doc = execute(cmd)?;
    let name = command_name(cmd);
    if let Document::Report(report) = &doc {
        emit(cfg, "report.md", &report.to_markdown(), stdout, stderr)?;
        if !cfg.stdout {
            emit(cfg, "report.json", &doc.to_json()?, stdout, stderr)?;
        }
        return Ok(());
    }
    match cfg.format.unwrap_or_else(|| default_format(cmd)) {
        Format::Csv => emit(cfg, &format!("{name}.csv"), &doc.to_table().to_csv()?, stdout, stderr),
        Format::Json => emit(cfg, &format!("{name}.json"), &doc.to_json()?, stdout, stderr),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Validity(_) | Error::Argument(_) => EXIT_ARGUMENT,
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_FAILURE,
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGUMENT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cfg, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_definition() {
        use clap::CommandFactory;
        RunConfig::command().debug_assert();
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("2,3,5").unwrap(), vec![2.0, 3.0, 5.0]);
        assert_eq!(parse_values("0.1").unwrap(), vec![0.1]);
        let r = parse_values("0.1:0.2:0.05").unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[2] - 0.2).abs() < 1e-15);
        assert!(parse_values("a,b").is_err());
        assert!(parse_values("1:2").is_err());
        assert!(parse_values("1:0:0.1").is_err());
        assert_eq!(parse_interval("0.2:8").unwrap(), (0.2, 8.0));
        assert!(parse_interval("8:0.2").is_err());
    }

    #[test]
    fn cells_round_trip() {
        for x in [0.1, -0.418, 1.0 / 3.0, 6.02e23, -1e-300, 0.0] {
            let s = Cell::Num(x).render();
            assert_eq!(Cell::parse(&s).render(), s);
        }
        assert_eq!(Cell::parse(""), Cell::Empty);
        assert_eq!(Cell::parse("17"), Cell::Int(17));
        assert_eq!(Cell::parse("Saddle"), Cell::Text("Saddle".into()));
    }

    #[test]
    fn unknown_header_rejected() {
        assert!(Table::from_csv("a,b\n1,2\n").is_err());
        assert!(Table::from_csv("u,k,V\n1,2,3\n").is_err());
    }
}
