//! `cdm`: classify, solve, generate and draw disk instances.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cdm_core::dispersion::solve_dispersion_with;
use cdm_core::geom::{Disk, Tolerance};
use cdm_core::hull::{disk_hull_with, hull_validate, Classification};
use cdm_core::io::{generate, parse_instance, render_svg, GeneratorSpec, Mode};
use cdm_core::oracles::{brute_dispersion, brute_mwis_strongly_convex_with, brute_mwis_with, OracleBudget};
use cdm_core::reductions::{solve_convex_mwis_with, PipelineOptions};
use cdm_core::{DispersionResult, Error, Solution};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "cdm", version, about = "Independent sets and dispersion for disks in convex position")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an instance; exit 0, 1 or 2 for strongly convex, convex, not convex.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Maximum-weight independent set.
    SolveMwis {
        file: PathBuf,
        /// Use the quartic reference evaluator.
        #[arg(long)]
        naive: bool,
        #[arg(long)]
        json: bool,
        /// Cap on the augmented instance size.
        #[arg(long, default_value_t = cdm_core::dp::DEFAULT_MAX_N)]
        max_n: usize,
    },
    /// Choose k disks maximizing their minimum pairwise distance.
    SolveDispersion {
        file: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Write a seeded random instance.
    Gen {
        #[arg(long, value_enum)]
        mode: GenMode,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        r_min: f64,
        #[arg(long, default_value_t = 0.4)]
        r_max: f64,
        /// Fraction of disks that are points.
        #[arg(long, default_value_t = 0.0)]
        points: f64,
        #[arg(long, default_value_t = 1.0)]
        w_min: f64,
        #[arg(long, default_value_t = 1.0)]
        w_max: f64,
        /// Output file; standard output if omitted.
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Exhaustive reference solvers for small instances.
    Oracle {
        #[arg(value_enum)]
        which: OracleKind,
        file: PathBuf,
        #[arg(short)]
        k: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Draw an instance, its hull and optionally a solution as SVG.
    Render {
        file: PathBuf,
        /// JSON with an `ids` array, as printed by `solve-mwis --json`.
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(short)]
        o: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenMode {
    StronglyConvex,
    Convex,
    Adversarial,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Mwis,
    MwisSc,
    Dispersion,
}

#[derive(Serialize)]
struct Output {
    status: &'static str,
    weight: f64,
    ids: Vec<usize>,
    r_star: Option<f64>,
}

#[derive(Serialize)]
struct CheckOutput {
    classification: &'static str,
    hull_valid: bool,
    arc_counts: Vec<usize>,
}

#[derive(Deserialize)]
struct SolutionFile {
    ids: Vec<usize>,
}

enum Failure {
    Usage(String),
    Io(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Data(_) => EXIT_DATA,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Io(m) | Failure::Data(m) => m,
            };
            eprintln!("cdm: {msg}");
            ExitCode::from(f.code())
        }
    }
}

fn eps_scale() -> Result<f64, Failure> {
    match std::env::var("CDM_EPS") {
        Err(_) => Ok(Tolerance::DEFAULT_SCALE),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
            _ => Err(Failure::Usage(format!("CDM_EPS must be a positive number, got {v:?}"))),
        },
    }
}

fn load(path: &Path) -> Result<Vec<Disk>, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let file = parse_instance(&bytes).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    Ok(file.to_disks())
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("output serializes");
    s.push('\n');
    s
}

fn mwis_output(s: &Solution) -> Output {
    Output {
        status: "ok",
        weight: s.total_weight,
        ids: s.chosen.clone(),
        r_star: None,
    }
}

fn dispersion_output(r: &DispersionResult, disks: &[Disk]) -> Output {
    let weight = r
        .chosen
        .iter()
        .filter_map(|id| disks.iter().find(|d| d.id == *id))
        .map(|d| d.weight)
        .sum();
    Output {
        status: if r.unbounded { "unbounded" } else { "ok" },
        weight,
        ids: r.chosen.clone(),
        r_star: (!r.unbounded).then_some(r.r_star),
    }
}

fn print_result(out: &Output, json: bool) -> Result<(), Failure> {
    if json {
        return write_out(None, &json_line(out));
    }
    let ids: Vec<String> = out.ids.iter().map(usize::to_string).collect();
    let mut text = format!("status: {}\nweight: {}\nids: {}\n", out.status, out.weight, ids.join(" "));
    match (out.status, out.r_star) {
        (_, Some(r)) => text.push_str(&format!("r_star: {r}\n")),
        ("unbounded", None) => text.push_str("r_star: unbounded\n"),
        _ => {}
    }
    write_out(None, &text)
}

fn infeasible(json: bool, k: usize, n: usize) -> Result<u8, Failure> {
    let out = Output {
        status: "infeasible",
        weight: 0.0,
        ids: Vec::new(),
        r_star: None,
    };
    if json {
        write_out(None, &json_line(&out))?;
    } else {
        write_out(None, &format!("status: infeasible\nk = {k} exceeds the {n} disks available\n"))?;
    }
    Ok(0)
}

fn class_name(c: Classification) -> &'static str {
    match c {
        Classification::StronglyConvex => "StronglyConvex",
        Classification::Convex => "Convex",
        Classification::NotConvexPosition => "NotConvexPosition",
    }
}

fn run(cmd: Command) -> Result<u8, Failure> {
    let scale = eps_scale()?;
    match cmd {
        Command::Check { file, json } => {
            let disks = load(&file)?;
            let tol = Tolerance::with_scale(&disks, scale);
            let hull = disk_hull_with(&disks, &tol);
            let out = CheckOutput {
                classification: class_name(hull.classification),
                hull_valid: hull_validate(&disks, &hull),
                arc_counts: disks.iter().map(|d| hull.arc_count(d.id)).collect(),
            };
            if json {
                write_out(None, &json_line(&out))?;
            } else {
                let counts: Vec<String> = out.arc_counts.iter().map(usize::to_string).collect();
                write_out(
                    None,
                    &format!(
                        "{}\narcs per disk: {}\nhull valid: {}\n",
                        out.classification,
                        counts.join(" "),
                        out.hull_valid
                    ),
                )?;
            }
            Ok(match hull.classification {
                Classification::StronglyConvex => 0,
                Classification::Convex => 1,
                Classification::NotConvexPosition => 2,
            })
        }
        Command::SolveMwis {
            file,
            naive,
            json,
            max_n,
        } => {
            let disks = load(&file)?;
            let opts = PipelineOptions {
                eps_scale: scale,
                use_naive: naive,
                max_n,
                ..PipelineOptions::default()
            };
            let report = solve_convex_mwis_with(&disks, &opts)?;
            print_result(&mwis_output(&report.solution), json)?;
            Ok(0)
        }
        Command::SolveDispersion { file, k, json } => {
            let disks = load(&file)?;
            if k == 0 || k > disks.len() {
                return infeasible(json, k, disks.len());
            }
            let opts = PipelineOptions {
                eps_scale: scale,
                ..PipelineOptions::default()
            };
            let report = solve_dispersion_with(&disks, k, &opts)?;
            print_result(&dispersion_output(&report.result, &disks), json)?;
            Ok(0)
        }
        Command::Gen {
            mode,
            n,
            seed,
            r_min,
            r_max,
            points,
            w_min,
            w_max,
            o,
        } => {
            if !(0.0..=r_max).contains(&r_min) || r_max >= 1.0 {
                return Err(Failure::Usage("need 0 <= r-min <= r-max < 1".into()));
            }
            if !(w_min > 0.0 && w_min <= w_max) {
                return Err(Failure::Usage("need 0 < w-min <= w-max".into()));
            }
            if !(0.0..=1.0).contains(&points) {
                return Err(Failure::Usage("points must lie in [0, 1]".into()));
            }
            let spec = GeneratorSpec {
                n,
                radius_range: (r_min, r_max),
                mode: match mode {
                    GenMode::StronglyConvex => Mode::StronglyConvex,
                    GenMode::Convex => Mode::Convex,
                    GenMode::Adversarial => Mode::Adversarial,
                },
                seed,
                point_fraction: points,
                weight_range: (w_min, w_max),
            };
            let file = generate(&spec)?;
            write_out(o.as_deref(), &file.to_json())?;
            Ok(0)
        }
        Command::Oracle { which, file, k, json } => {
            let disks = load(&file)?;
            let tol = Tolerance::with_scale(&disks, scale);
            let out = match which {
                OracleKind::Mwis => mwis_output(&brute_mwis_with(&disks, &tol, OracleBudget::MWIS)?),
                OracleKind::MwisSc => mwis_output(&brute_mwis_strongly_convex_with(
                    &disks,
                    &tol,
                    OracleBudget::MWIS_STRONGLY_CONVEX,
                )?),
                OracleKind::Dispersion => {
                    let k = k.ok_or_else(|| Failure::Usage("oracle dispersion needs -k".into()))?;
                    if k == 0 || k > disks.len() {
                        return infeasible(json, k, disks.len());
                    }
                    dispersion_output(&brute_dispersion(&disks, k)?, &disks)
                }
            };
            print_result(&out, json)?;
            Ok(0)
        }
        Command::Render { file, solution, o } => {
            let disks = load(&file)?;
            let selected = match solution {
                None => Vec::new(),
                Some(p) => {
                    let bytes = fs::read(&p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                    let s: SolutionFile = serde_json::from_slice(&bytes)
                        .map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
                    s.ids
                }
            };
            let tol = Tolerance::with_scale(&disks, scale);
            let svg = render_svg(&disks, &disk_hull_with(&disks, &tol), &selected);
            write_out(Some(&o), &svg)?;
            Ok(0)
        }
    }
}
