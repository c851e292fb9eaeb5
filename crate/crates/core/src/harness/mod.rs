//! Randomized trials: seeded control polygons, the validity checks on traced
//! curves, and JSON-lines reports.

use std::io::Write;
use std::time::Instant;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geodesics::Surface;
use crate::mesh::{MeshPoint, TriangleMesh};
use crate::scalar::Scalar;
use crate::splines::{trace, turning_angles, ControlPolygon, ModeSpec, Scheme, TraceMode, TracedCurve};

/// `n` points with face probability proportional to area and uniform
/// barycentric coordinates inside the face.
pub fn random_points<T: Scalar, R: Rng>(mesh: &TriangleMesh<T>, n: usize, rng: &mut R) -> Vec<MeshPoint<T>> {
    let areas: Vec<f64> = (0..mesh.num_faces()).map(|f| mesh.face_area(f).f64()).collect();
    let faces = WeightedIndex::new(&areas).expect("mesh has positive area");
    (0..n)
        .map(|_| {
            let f = faces.sample(rng);
            let r1: f64 = rng.gen::<f64>().sqrt();
            let r2: f64 = rng.gen();
            MeshPoint::new(f, T::of(1.0 - r1), T::of(r1 * (1.0 - r2)))
        })
        .collect()
}

/// A degree-`k` control polygon from a seed.
pub fn random_polygon<T: Scalar>(surface: &Surface<T>, k: usize, seed: u64) -> Result<ControlPolygon<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ControlPolygon::new(surface, &random_points(surface.mesh(), k + 1, &mut rng))
}

/// The validity checks: largest turning angle between consecutive
/// segments and largest node gap against the longest mesh edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub max_angle_deg: f64,
    pub max_gap: f64,
    pub longest_edge: f64,
    pub angle_ok: bool,
    pub gap_ok: bool,
}

impl Validation {
    pub fn pass(&self) -> bool {
        self.angle_ok && self.gap_ok
    }
}

/// Checks a traced curve against `theta_deg`.
pub fn validate<T: Scalar>(surface: &Surface<T>, curve: &TracedCurve<T>, theta_deg: f64) -> Result<Validation> {
    let max_angle = turning_angles(surface, &curve.segments)?
        .into_iter()
        .fold(0.0f64, |m, a| m.max(a.f64()));
    let max_gap = curve.max_segment_length().f64();
    let longest_edge = surface.mesh().longest_edge().f64();
    let max_angle_deg = max_angle.to_degrees();
    Ok(Validation {
        max_angle_deg,
        max_gap,
        longest_edge,
        angle_ok: max_angle_deg <= theta_deg,
        gap_ok: max_gap <= longest_edge,
    })
}

/// Settings of a batch of trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub seed: u64,
    pub degree: usize,
    pub scheme: Scheme,
    pub mode: TraceMode,
    /// Angle used by the validity check, degrees.
    pub theta_deg: f64,
}

/// One line of a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub mesh: String,
    pub trial: usize,
    pub seed: u64,
    pub control_points: Vec<MeshPoint<f64>>,
    pub scheme: Scheme,
    #[serde(flatten)]
    pub mode: ModeSpec,
    pub segments: usize,
    pub connected: bool,
    #[serde(flatten)]
    pub validation: Option<Validation>,
    pub pass: bool,
    pub error: Option<String>,
    /// Trace time only; excludes mesh load and graph build.
    pub time_ms: f64,
}

fn trial_seed(base: u64, i: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

/// Whether consecutive segments of a curve share their end points.
pub fn is_connected<T: Scalar>(curve: &TracedCurve<T>) -> bool {
    !curve.segments.is_empty()
        && curve.segments.windows(2).all(|w| w[0].end == w[1].start)
        && curve.nodes.first() == Some(&curve.segments[0].start)
        && curve.nodes.last() == Some(&curve.segments[curve.segments.len() - 1].end)
}

/// Runs one seeded trial.
pub fn run_trial<T: Scalar>(surface: &Surface<T>, mesh_id: &str, cfg: &TrialConfig, i: usize) -> TrialReport {
    let seed = trial_seed(cfg.seed, i);
    let mut report = TrialReport {
        mesh: mesh_id.to_string(),
        trial: i,
        seed,
        control_points: Vec::new(),
        scheme: cfg.scheme,
        mode: cfg.mode.into(),
        segments: 0,
        connected: false,
        validation: None,
        pass: false,
        error: None,
        time_ms: 0.0,
    };
    let polygon = match random_polygon(surface, cfg.degree, seed) {
        Ok(p) => p,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.control_points = polygon
        .points()
        .iter()
        .map(|p| MeshPoint::new(p.face, p.alpha.f64(), p.beta.f64()))
        .collect();
    let start = Instant::now();
    let curve = trace(surface, &polygon, cfg.scheme, cfg.mode);
    report.time_ms = start.elapsed().as_secs_f64() * 1e3;
    match curve.and_then(|c| Ok((validate(surface, &c, cfg.theta_deg)?, c))) {
        Ok((v, c)) => {
            report.segments = c.num_segments();
            report.connected = is_connected(&c);
            report.pass = report.connected && v.pass();
            report.validation = Some(v);
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

/// Runs a batch of trials in parallel; the order of the output follows the
/// trial index.
pub fn run_trials<T: Scalar>(surface: &Surface<T>, mesh_id: &str, cfg: &TrialConfig) -> Vec<TrialReport> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(surface, mesh_id, cfg, i))
        .collect()
}

/// Writes reports as JSON lines.
pub fn write_jsonl<W: Write>(reports: &[TrialReport], mut out: W) -> Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Aggregate numbers over a batch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub passed: usize,
    pub errors: usize,
    pub median_ms: f64,
    pub p99_ms: f64,
    /// Fraction of trials under 0.01 s, 0.1 s, 1 s and 10 s.
    pub under: [f64; 4],
}

pub fn summarize(reports: &[TrialReport]) -> Summary {
    let mut times: Vec<f64> = reports.iter().map(|r| r.time_ms).collect();
    times.sort_by(f64::total_cmp);
    let pct = |q: f64| -> f64 {
        if times.is_empty() {
            return 0.0;
        }
        times[((times.len() - 1) as f64 * q).round() as usize]
    };
    let n = reports.len().max(1) as f64;
    let frac = |ms: f64| times.iter().filter(|&&t| t < ms).count() as f64 / n;
    Summary {
        trials: reports.len(),
        passed: reports.iter().filter(|r| r.pass).count(),
        errors: reports.iter().filter(|r| r.error.is_some()).count(),
        median_ms: pct(0.5),
        p99_ms: pct(0.99),
        under: [frac(10.0), frac(100.0), frac(1e3), frac(1e4)],
    }
}
