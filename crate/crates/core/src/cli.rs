//! `netlab` command line.
//!
//! Exit codes: 0 success, 1 semantic failure (verification failed, a
//! criterion failed, or `--expect-found` with nothing found), 2 usage,
//! parse or I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::admissibility::{classify_triangle, classify_triangle_degrees, report, GraphFilter};
use crate::construct::{build, Family};
use crate::error::NetlabError;
use crate::io::{net_from_json, net_to_json};
use crate::net::{verify, Tolerance};
use crate::render::{render, RenderMode};
use crate::repro;
use crate::search::{search, SearchConfig, SearchTarget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable overriding the absolute geometric tolerance.
pub const TOL_ENV: &str = "NETLAB_TOL";

#[derive(Parser, Debug)]
#[command(name = "netlab", version, about = "Geodesic nets on doubled polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphArg {
    #[value(name = "3regular")]
    ThreeRegular,
    Theta,
    Bifocal,
    Figure8,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Theta,
    Tetra,
    #[value(name = "figure8-odd")]
    Figure8Odd,
    #[value(name = "figure8-isosceles")]
    Figure8Isosceles,
    #[value(name = "figure8-hexagon")]
    Figure8Hexagon,
    #[value(name = "bifocal-triangle")]
    BifocalTriangle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Figure8,
    Bifocal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Sheets,
    Development,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gauss-Bonnet admissibility for the doubled regular n-gon.
    Admissible {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        graph: Option<GraphArg>,
    },
    /// Which three-face nets a doubled triangle can carry.
    ClassifyTriangle {
        /// Interior angles in degrees, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        angles: Vec<f64>,
    },
    /// Build a net from one of the known families.
    Construct {
        #[arg(long)]
        family: FamilyArg,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        angles: Option<Vec<f64>>,
        /// Run the search instead of loading the stored net (hexagon only).
        #[arg(long)]
        from_search: bool,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Check a net file; prints the report and exits 1 if it fails.
    Verify {
        file: PathBuf,
        /// Absolute geometric tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Bounded search for figure-eight or bifocal nets.
    Search {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        target: TargetArg,
        #[arg(long, default_value_t = 24)]
        max_word: usize,
        /// Loop length bound; defaults to 20 times the circumradius.
        #[arg(long)]
        max_length: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        near_misses: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Exit 1 when no solution is found.
        #[arg(long)]
        expect_found: bool,
    },
    /// Draw a net as SVG.
    Render {
        file: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Sheets)]
        mode: ModeArg,
        /// Net edge to develop in development mode.
        #[arg(long, default_value_t = 0)]
        edge: usize,
    },
    /// Run the acceptance criteria and print a pass/fail table.
    Repro {
        /// Criterion numbers to run; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
}

struct Failure(i32, String);

impl From<NetlabError> for Failure {
    fn from(e: NetlabError) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure(EXIT_USAGE, format!("{}: {e}", path.display()))
}

fn emit(out: &mut dyn Write, output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => writeln!(out, "{}", text.trim_end()).map_err(|e| Failure(EXIT_USAGE, e.to_string())),
    }
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports always serialize")
}

fn tolerance(scale: f64, flag: Option<f64>) -> Result<Tolerance, Failure> {
    let mut tol = Tolerance::for_scale(scale);
    let env = match std::env::var(TOL_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<f64>()
                .map_err(|_| Failure(EXIT_USAGE, format!("{TOL_ENV}={v} is not a number")))?,
        ),
        Err(_) => None,
    };
    if let Some(t) = flag.or(env) {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure(EXIT_USAGE, format!("tolerance {t} must be positive")));
        }
        tol.geometry = t;
    }
    Ok(tol)
}

fn three(angles: &[f64]) -> Result<(), Failure> {
    if angles.len() == 3 {
        Ok(())
    } else {
        Err(Failure(EXIT_USAGE, format!("expected three angles, got {}", angles.len())))
    }
}

fn need_n(n: Option<u32>) -> Result<u32, Failure> {
    n.ok_or_else(|| Failure(EXIT_USAGE, "--n is required for this family".into()))
}

fn family(f: FamilyArg, n: Option<u32>, angles: Option<Vec<f64>>) -> Result<Family, Failure> {
    Ok(match f {
        FamilyArg::Theta => Family::Theta { n: need_n(n)? },
        FamilyArg::Tetra => Family::Tetra { n: need_n(n)? },
        FamilyArg::Figure8Odd => Family::Figure8Odd { n: need_n(n)? },
        FamilyArg::Figure8Isosceles => {
            let a = angles.ok_or_else(|| Failure(EXIT_USAGE, "--angles is required".into()))?;
            three(&a)?;
            Family::Figure8Isosceles { angles_deg: [a[0], a[1], a[2]] }
        }
        FamilyArg::Figure8Hexagon => Family::Figure8Hexagon,
        FamilyArg::BifocalTriangle => Family::BifocalTriangle,
    })
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Admissible { n, graph } => {
            let filter = graph.map(|g| match g {
                GraphArg::ThreeRegular => GraphFilter::ThreeRegular,
                GraphArg::Theta => GraphFilter::Theta,
                GraphArg::Bifocal => GraphFilter::Bifocal,
                GraphArg::Figure8 => GraphFilter::Figure8,
            });
            emit(out, None, &json(&report(n, filter)?))?;
            Ok(EXIT_OK)
        }
        Command::ClassifyTriangle { angles } => {
            three(&angles)?;
            let whole = angles.iter().all(|a| a.fract() == 0.0 && *a >= 0.0);
            let c = if whole {
                classify_triangle_degrees([angles[0] as u32, angles[1] as u32, angles[2] as u32])?
            } else {
                classify_triangle([angles[0].to_radians(), angles[1].to_radians(), angles[2].to_radians()])?
            };
            emit(out, None, &json(&c))?;
            Ok(EXIT_OK)
        }
        Command::Construct { family: f, n, angles, from_search, output } => {
            let net = if from_search {
                if !matches!(f, FamilyArg::Figure8Hexagon) {
                    return Err(Failure(EXIT_USAGE, "--from-search applies to figure8-hexagon only".into()));
                }
                let r = search(&SearchConfig::new(6, SearchTarget::Figure8))?;
                r.solutions
                    .into_iter()
                    .next()
                    .map(|s| s.net)
                    .ok_or_else(|| Failure(EXIT_FAILED, "search found no hexagon figure-eight".into()))?
            } else {
                build(family(f, n, angles)?)?
            };
            emit(out, output.as_deref(), &(net_to_json(&net) + "\n"))?;
            Ok(EXIT_OK)
        }
        Command::Verify { file, tol } => {
            let text = fs::read_to_string(&file).map_err(|e| io_err(&file, e))?;
            let net = net_from_json(&text)?;
            let tol = tolerance(net.surface.scale(), tol)?;
            let r = verify(&net, tol).map_err(|e| Failure(EXIT_FAILED, e.to_string()))?;
            emit(out, None, &json(&r))?;
            Ok(if r.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Search { n, target, max_word, max_length, report, near_misses, threads, expect_found } => {
            let target = match target {
                TargetArg::Figure8 => SearchTarget::Figure8,
                TargetArg::Bifocal => SearchTarget::Bifocal,
            };
            let mut cfg = SearchConfig::new(n, target);
            cfg.max_word_length = max_word;
            if let Some(l) = max_length {
                cfg.max_length = l;
            }
            cfg.report_near_misses = near_misses;
            cfg.threads = threads;
            let r = search(&cfg)?;
            let text = serde_json::to_string_pretty(&r.to_json()).expect("json value") + "\n";
            match report {
                Some(p) => {
                    emit(out, Some(&p), &text)?;
                    emit(
                        out,
                        None,
                        &format!(
                            "{} solutions, {} near misses, {} candidates",
                            r.solutions.len(),
                            r.near_misses.len(),
                            r.candidates_examined
                        ),
                    )?;
                }
                None => emit(out, None, &text)?,
            }
            Ok(if expect_found && r.solutions.is_empty() { EXIT_FAILED } else { EXIT_OK })
        }
        Command::Render { file, output, mode, edge } => {
            let text = fs::read_to_string(&file).map_err(|e| io_err(&file, e))?;
            let net = net_from_json(&text)?;
            let mode = match mode {
                ModeArg::Sheets => RenderMode::Sheets,
                ModeArg::Development => RenderMode::Development(edge),
            };
            let svg = render(&net, mode)?;
            emit(out, Some(&output), &svg)?;
            Ok(EXIT_OK)
        }
        Command::Repro { only, json: as_json } => {
            let results = repro::run(&only);
            let text = if as_json { json(&results) } else { repro::table(&results) };
            emit(out, None, &text)?;
            Ok(if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

/// Parse `args` (program name first) and run, writing results to `out` and
/// diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "netlab: {msg}");
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("netlab").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn admissible_and_usage() {
        let (code, out, _) = call(&["admissible", "--n", "6", "--graph", "figure8"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["figure8_angles"], serde_json::json!([{"x": 2, "alpha_over_pi": "2/3"}]));
        assert_eq!(call(&["admissible", "--n", "2"]).0, 2);
        assert_eq!(call(&["admissible"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
    }

    #[test]
    fn classify() {
        let (code, out, _) = call(&["classify-triangle", "--angles", "30,120,30"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v, serde_json::json!({"theta": false, "bifocal": true, "figure8": true}));
        assert_eq!(call(&["classify-triangle", "--angles", "90,90,10"]).0, 2);
    }
}
