//! `elliptic-link`: classify, sample, validate, benchmark, fit and render
//! elliptic links.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when every input was
//! processed but some were degenerate.

mod input;
mod render;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elliptic_links::ensemble::{classify_ensemble, reason_label};
use elliptic_links::records::EllipseRecord;
use elliptic_links::{
    benchmark, classify_pair, classify_triple, fit_from_points, make_ellipse, random_triple, run_ensemble,
    validate_ensemble, EllipseSpec, EnsembleConfig, Error, TripleReport,
};
use serde::Serialize;
use serde_json::{json, Value};

use render::{MosaicStyle, MIN_POINTS};

#[derive(Debug)]
pub struct CliError {
    pub message: String,
}

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        CliError { message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::new(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::new(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "elliptic-link", version, about = "Exact Hopf and Borromean classification of ellipses")]
struct Cli {
    /// Worker threads for parallel loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify ellipse pairs or triples read from JSONL.
    Classify {
        /// Input file, or `-` for stdin.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Triple)]
        mode: Mode,
    },
    /// Monte Carlo link statistics over random triples.
    Sample {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Also write one CSV row per triple to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare the exact classifier with the polygonal oracle.
    Validate {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Polygon vertices per ellipse for the oracle.
        #[arg(long, default_value_t = 256)]
        vertices: usize,
        /// Also write the disagreements as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Time classification of pre-generated triples.
    Bench {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Fit ellipses to point clouds read from JSONL.
    Fit {
        /// Input file, or `-` for stdin.
        input: PathBuf,
    },
    /// Draw an SVG mosaic of triples projected onto the XY plane.
    Render {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Render triples from this JSONL file instead of a random ensemble.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output path (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Tiles per row (default: square grid).
        #[arg(long)]
        cols: Option<usize>,
        /// Tile edge in SVG units.
        #[arg(long, default_value_t = 100.0)]
        tile: f64,
        #[arg(long, default_value_t = 1.0)]
        stroke_width: f64,
        /// Samples per ellipse outline.
        #[arg(long, default_value_t = 120)]
        points: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pair,
    Triple,
}

#[derive(Args, Clone)]
struct EnsembleArgs {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 1.618)]
    alpha: f64,
    /// Centers are uniform in [-h, h]^3; 0 gives concentric ellipses.
    #[arg(long, default_value_t = 0.2)]
    halfwidth: f64,
    #[arg(long, env = "ELLIPTIC_LINK_SEED", default_value_t = 0)]
    seed: u64,
}

impl EnsembleArgs {
    fn config(&self, vertices: Option<usize>) -> Result<EnsembleConfig, CliError> {
        let cfg = EnsembleConfig {
            count: self.count,
            rho: self.rho,
            alpha: self.alpha,
            center_halfwidth: self.halfwidth,
            seed: self.seed,
            vertices_for_oracle: vertices,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("elliptic-link: {}", e.message);
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::new("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::new(e.to_string()))?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Classify { input, mode } => cmd_classify(&input, mode, &mut out),
        Command::Sample { ensemble, csv } => {
            let cfg = ensemble.config(None)?;
            let stats = run_ensemble(&cfg)?;
            if let Some(path) = csv {
                write_sample_csv(&cfg, &path)?;
            }
            write_json(&mut out, &stats)?;
            Ok(0)
        }
        Command::Validate { ensemble, vertices, csv } => {
            if vertices < 3 {
                return Err(CliError::new("--vertices must be at least 3"));
            }
            let report = validate_ensemble(&ensemble.config(Some(vertices))?)?;
            if let Some(path) = csv {
                let mut w = csv::Writer::from_path(&path)?;
                for d in &report.disagreements {
                    w.serialize(DisagreementRow {
                        index: d.index,
                        exact: d.exact.as_str(),
                        oracle: d.oracle.as_str(),
                        exact_pairs: d.exact_pairs.map(|t| t.as_str()).join(" "),
                        oracle_pairs: d.oracle_pairs.map(|t| t.as_str()).join(" "),
                        margin: d.margin,
                        near_boundary: d.near_boundary,
                    })?;
                }
                w.flush()?;
            }
            write_json(&mut out, &report)?;
            Ok(0)
        }
        Command::Bench { ensemble, repeats } => {
            let report = benchmark(&ensemble.config(None)?, repeats)?;
            write_json(&mut out, &report)?;
            Ok(0)
        }
        Command::Fit { input } => cmd_fit(&input, &mut out),
        Command::Render { ensemble, input, output, cols, tile, stroke_width, points } => {
            if points < MIN_POINTS {
                return Err(CliError::new(format!("--points must be at least {MIN_POINTS}")));
            }
            if !(tile.is_finite() && tile > 0.0 && stroke_width.is_finite() && stroke_width > 0.0) {
                return Err(CliError::new("--tile and --stroke-width must be positive"));
            }
            let triples = match input {
                Some(path) => input::read_groups(input::open(&path)?, 3)?
                    .into_iter()
                    .map(|g| triple_from(&g.specs))
                    .collect::<Result<Vec<_>, _>>()?,
                None => {
                    let cfg = ensemble.config(None)?;
                    (0..cfg.count).map(|i| random_triple(&cfg, i)).collect()
                }
            };
            let outcomes: Vec<_> = triples.iter().map(|[a, b, c]| classify_triple(a, b, c)).collect();
            let mut style = MosaicStyle::for_count(triples.len());
            if let Some(c) = cols {
                style.cols = c.max(1);
            }
            style.tile = tile;
            style.stroke_width = stroke_width;
            style.points = points;
            let svg = render::render(&triples, &outcomes, &style);
            match output {
                Some(path) => fs::write(&path, svg)
                    .map_err(|e| CliError::new(format!("cannot write {}: {e}", path.display())))?,
                None => out.write_all(svg.as_bytes())?,
            }
            Ok(0)
        }
    }
}

fn write_json(out: &mut impl Write, value: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::new(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn triple_from(specs: &[EllipseSpec]) -> Result<[elliptic_links::Ellipse; 3], CliError> {
    Ok([make_ellipse(specs[0])?, make_ellipse(specs[1])?, make_ellipse(specs[2])?])
}

fn degenerate_json(e: &Error) -> Value {
    let mut v = json!({ "verdict": "degenerate", "reason": reason_label(e) });
    if let Error::Degenerate { pair: Some((i, j)), .. } = e {
        v["pair"] = json!([i, j]);
    }
    v
}

fn triple_json(r: &TripleReport) -> Value {
    json!({
        "verdict": r.verdict.as_str(),
        "pairs": r.tags().map(|t| t.as_str()),
        "triple_point": r.triple_point.map(|p| [p.x, p.y, p.z]),
        "margin": r.margin,
    })
}

fn cmd_classify(path: &Path, mode: Mode, out: &mut impl Write) -> Result<u8, CliError> {
    let size = if mode == Mode::Pair { 2 } else { 3 };
    let groups = input::read_groups(input::open(path)?, size)?;
    let mut degenerate = false;
    for g in groups {
        let ellipses = g
            .specs
            .iter()
            .map(|s| make_ellipse(*s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::new(format!("line {}: {e}", g.line)))?;
        let line = match mode {
            Mode::Pair => classify_pair(&ellipses[0], &ellipses[1]).map(|c| {
                json!({
                    "verdict": c.tag.as_str(),
                    "pairs": [c.tag.as_str()],
                    "triple_point": null,
                    "margin": c.margin,
                })
            }),
            Mode::Triple => classify_triple(&ellipses[0], &ellipses[1], &ellipses[2]).map(|r| triple_json(&r)),
        };
        let line = line.unwrap_or_else(|e| {
            degenerate = true;
            degenerate_json(&e)
        });
        writeln!(out, "{line}")?;
    }
    Ok(if degenerate { 2 } else { 0 })
}

fn cmd_fit(path: &Path, out: &mut impl Write) -> Result<u8, CliError> {
    let mut degenerate = false;
    for (line, record) in input::read_point_clouds(input::open(path)?)? {
        let fitted = record
            .to_polyline()
            .map_err(|e| CliError::new(format!("line {line}: {e}")))
            .map(|p| fit_from_points(&p))?;
        match fitted {
            Ok(spec) => writeln!(out, "{}", serde_json::to_string(&EllipseRecord::from(spec)).unwrap())?,
            Err(e) if e.degeneracy().is_some() => {
                degenerate = true;
                writeln!(out, "{}", degenerate_json(&e))?;
            }
            Err(e) => return Err(CliError::new(format!("line {line}: {e}"))),
        }
    }
    Ok(if degenerate { 2 } else { 0 })
}

#[derive(Serialize)]
struct SampleRow {
    index: usize,
    verdict: String,
    pair01: &'static str,
    pair02: &'static str,
    pair12: &'static str,
    margin: Option<f64>,
}

#[derive(Serialize)]
struct DisagreementRow {
    index: usize,
    exact: &'static str,
    oracle: &'static str,
    exact_pairs: String,
    oracle_pairs: String,
    margin: f64,
    near_boundary: bool,
}

fn write_sample_csv(cfg: &EnsembleConfig, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for (index, outcome) in classify_ensemble(cfg)?.into_iter().enumerate() {
        let row = match outcome {
            Ok(r) => {
                let [a, b, c] = r.tags().map(|t| t.as_str());
                SampleRow { index, verdict: r.verdict.as_str().into(), pair01: a, pair02: b, pair12: c, margin: Some(r.margin) }
            }
            Err(e) => SampleRow {
                index,
                verdict: format!("degenerate:{}", reason_label(&e)),
                pair01: "",
                pair02: "",
                pair12: "",
                margin: None,
            },
        };
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
