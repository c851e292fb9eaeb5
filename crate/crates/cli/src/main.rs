//! Command line front end: tracing, insertion, validation, random trials,
//! SVG import and mesh statistics.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use geospline::editing::{svg_import, SplineDoc};
use geospline::harness::{run_trials, summarize, validate, write_jsonl, TrialConfig};
use geospline::mesh::{load_mesh, MeshFormat};
use geospline::splines::{insert, CurveExport, ModeSpec, Scheme, SplineFile, TraceMode};
use geospline::{MeshPoint, Surface};

/// Validation failures exit with this code.
const EXIT_INVALID: u8 = 3;
/// Bad input of any kind.
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "geospline", version, about = "Bézier splines on triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Rdc,
    Olr,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Rdc => Scheme::Rdc,
            SchemeArg::Olr => Scheme::Olr,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Uniform,
    Adaptive,
}

/// Trace settings; anything left out comes from the input file.
#[derive(clap::Args)]
struct TraceArgs {
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Subdivision depth for uniform mode.
    #[arg(long)]
    depth: Option<u32>,
    /// Angle threshold for adaptive mode, degrees.
    #[arg(long)]
    theta: Option<f64>,
}

impl TraceArgs {
    fn apply(&self, scheme: &mut Scheme, mode: &mut ModeSpec) -> Result<()> {
        if let Some(s) = self.scheme {
            *scheme = s.into();
        }
        let (depth, theta) = match *mode {
            ModeSpec::Uniform { depth } => (depth, 5.0),
            ModeSpec::Adaptive { theta } => (4, theta),
        };
        let (depth, theta) = (self.depth.unwrap_or(depth), self.theta.unwrap_or(theta));
        let kind = match (self.mode, *mode) {
            (Some(m), _) => m,
            (None, ModeSpec::Uniform { .. }) if self.theta.is_some() && self.depth.is_none() => ModeArg::Adaptive,
            (None, ModeSpec::Adaptive { .. }) if self.depth.is_some() && self.theta.is_none() => ModeArg::Uniform,
            (None, ModeSpec::Uniform { .. }) => ModeArg::Uniform,
            (None, ModeSpec::Adaptive { .. }) => ModeArg::Adaptive,
        };
        *mode = match kind {
            ModeArg::Uniform => ModeSpec::Uniform { depth },
            ModeArg::Adaptive => {
                if !(theta > 0.0) {
                    bail!("theta must be positive, got {theta}");
                }
                ModeSpec::Adaptive { theta }
            }
        };
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Trace a spline file and write the curve as JSON or OBJ.
    Trace {
        mesh: PathBuf,
        spline: PathBuf,
        #[command(flatten)]
        args: TraceArgs,
        /// Output file; `.obj` writes a polyline, anything else JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded random trials and report timings and validity.
    Bench {
        mesh: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "rdc")]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value = "adaptive")]
        mode: ModeArg,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Trace angle for adaptive mode and the validity check, degrees.
        #[arg(long, default_value_t = 5.0)]
        theta: f64,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// JSON lines, one trial per line.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Split a spline at a parameter into two splines of the same degree.
    Insert {
        mesh: PathBuf,
        spline: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a traced curve: turning angles and node gaps.
    Validate {
        mesh: PathBuf,
        curve: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        theta: f64,
    },
    /// Import the paths of an SVG drawing as splines.
    Svg {
        mesh: PathBuf,
        drawing: PathBuf,
        /// Center point as FACE:ALPHA:BETA.
        #[arg(long)]
        center: String,
        /// Drawing diagonal relative to the mesh's bounding box diagonal.
        #[arg(long, default_value_t = 0.25)]
        scale: f64,
        /// Rotation, degrees.
        #[arg(long, default_value_t = 0.0)]
        rotation: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mesh and dual graph statistics.
    Stats { mesh: PathBuf },
}

fn load_surface(path: &Path) -> Result<(Surface, f64, f64)> {
    let start = Instant::now();
    let file = File::open(path).with_context(|| format!("cannot open mesh {}", path.display()))?;
    let mesh = load_mesh(BufReader::new(file), MeshFormat::Obj).with_context(|| format!("cannot read mesh {}", path.display()))?;
    let load_ms = start.elapsed().as_secs_f64() * 1e3;
    let start = Instant::now();
    let surface = Surface::new(mesh);
    let graph_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((surface, load_ms, graph_ms))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_point(s: &str) -> Result<MeshPoint> {
    let parts: Vec<&str> = s.split(':').collect();
    let [f, a, b] = parts[..] else {
        bail!("expected FACE:ALPHA:BETA, got {s:?}");
    };
    Ok(MeshPoint::new(
        f.parse().context("bad face index")?,
        a.parse().context("bad alpha")?,
        b.parse().context("bad beta")?,
    ))
}

fn is_obj(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj"))
}

fn trace_cmd(mesh: &Path, spline: &Path, args: &TraceArgs, out: Option<&Path>) -> Result<ExitCode> {
    let (surface, _, _) = load_surface(mesh)?;
    let text = read(spline)?;
    let mut file = SplineFile::from_json(&text).with_context(|| format!("cannot parse {}", spline.display()))?;
    args.apply(&mut file.scheme, &mut file.mode)?;
    let start = Instant::now();
    let curve = file.trace(&surface)?;
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(p) = out {
        if is_obj(p) {
            let f = File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            let mut w = BufWriter::new(f);
            curve.write_obj(surface.mesh(), &mut w)?;
            w.flush()?;
        } else {
            write_out(Some(p), &serde_json::to_string_pretty(&curve.export(surface.mesh()))?)?;
        }
    }
    let summary = json!({
        "segments": curve.num_segments(),
        "length": curve.length(),
        "time_ms": time_ms,
    });
    println!("{summary}");
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn bench_cmd(
    mesh: &Path,
    trials: usize,
    seed: u64,
    scheme: SchemeArg,
    mode: ModeArg,
    depth: u32,
    theta: f64,
    degree: usize,
    report: Option<&Path>,
) -> Result<ExitCode> {
    let (surface, load_ms, graph_ms) = load_surface(mesh)?;
    let mode = match mode {
        ModeArg::Uniform => TraceMode::Uniform { depth },
        ModeArg::Adaptive => TraceMode::adaptive_degrees(theta),
    };
    let cfg = TrialConfig {
        trials,
        seed,
        degree,
        scheme: scheme.into(),
        mode,
        theta_deg: theta,
    };
    let id = mesh.file_name().map_or_else(|| mesh.display().to_string(), |n| n.to_string_lossy().into_owned());
    let reports = run_trials(&surface, &id, &cfg);
    if let Some(p) = report {
        let f = File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
        let mut w = BufWriter::new(f);
        write_jsonl(&reports, &mut w)?;
        w.flush()?;
    }
    let summary = summarize(&reports);
    println!(
        "{}",
        json!({
            "mesh": id,
            "faces": surface.mesh().num_faces(),
            "load_ms": load_ms,
            "graph_ms": graph_ms,
            "summary": summary,
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn insert_cmd(mesh: &Path, spline: &Path, t: f64, out: Option<&Path>) -> Result<ExitCode> {
    let (surface, _, _) = load_surface(mesh)?;
    let file = SplineFile::from_json(&read(spline)?).with_context(|| format!("cannot parse {}", spline.display()))?;
    let polygon = file.polygon(&surface)?;
    let (left, right) = insert(&surface, &polygon, t, file.scheme, file.mode.into())?;
    let as_file = |p: &geospline::ControlPolygon| SplineFile {
        degree: file.degree,
        scheme: file.scheme,
        control_points: p.points().to_vec(),
        mode: file.mode,
    };
    let doc = json!({ "left": as_file(&left), "right": as_file(&right) });
    write_out(out, &serde_json::to_string_pretty(&doc)?)?;
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(mesh: &Path, curve: &Path, theta: f64) -> Result<ExitCode> {
    let (surface, _, _) = load_surface(mesh)?;
    let export = CurveExport::from_json(&read(curve)?).with_context(|| format!("cannot parse {}", curve.display()))?;
    let curve = export.to_curve(&surface)?;
    let v = validate(&surface, &curve, theta)?;
    println!("{}", serde_json::to_string(&json!({ "pass": v.pass(), "validation": v }))?);
    Ok(if v.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INVALID)
    })
}

fn svg_cmd(mesh: &Path, drawing: &Path, center: &str, scale: f64, rotation: f64, out: Option<&Path>) -> Result<ExitCode> {
    let (surface, _, _) = load_surface(mesh)?;
    let center = parse_point(center)?;
    let imported = svg_import(&surface, &read(drawing)?, &center, scale, rotation.to_radians())?;
    for w in &imported.warnings {
        eprintln!("warning: {w}");
    }
    let docs: Vec<SplineDoc> = imported.splines.iter().map(SplineDoc::from_spline).collect();
    write_out(out, &serde_json::to_string_pretty(&docs)?)?;
    Ok(ExitCode::SUCCESS)
}

fn stats_cmd(mesh: &Path) -> Result<ExitCode> {
    let (surface, load_ms, graph_ms) = load_surface(mesh)?;
    let mut stats = surface.mesh().stats(Some(surface.graph()));
    stats["load_ms"] = json!(load_ms);
    stats["graph_ms"] = json!(graph_ms);
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Trace { mesh, spline, args, out } => trace_cmd(&mesh, &spline, &args, out.as_deref()),
        Command::Bench {
            mesh,
            trials,
            seed,
            scheme,
            mode,
            depth,
            theta,
            degree,
            report,
        } => bench_cmd(&mesh, trials, seed, scheme, mode, depth, theta, degree, report.as_deref()),
        Command::Insert { mesh, spline, t, out } => insert_cmd(&mesh, &spline, t, out.as_deref()),
        Command::Validate { mesh, curve, theta } => validate_cmd(&mesh, &curve, theta),
        Command::Svg {
            mesh,
            drawing,
            center,
            scale,
            rotation,
            out,
        } => svg_cmd(&mesh, &drawing, &center, scale, rotation, out.as_deref()),
        Command::Stats { mesh } => stats_cmd(&mesh),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
