//! Spline files and traced-curve export.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::{GeodesicPath, PathExport, Surface};
use crate::mesh::MeshPoint;
use crate::scalar::Scalar;

use super::{trace, ControlPolygon, Scheme, TraceMode, TracedCurve};

/// Trace mode as written in files: `theta` in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ModeSpec {
    Uniform { depth: u32 },
    Adaptive { theta: f64 },
}

impl From<ModeSpec> for TraceMode {
    fn from(m: ModeSpec) -> Self {
        match m {
            ModeSpec::Uniform { depth } => TraceMode::Uniform { depth },
            ModeSpec::Adaptive { theta } => TraceMode::adaptive_degrees(theta),
        }
    }
}

impl From<TraceMode> for ModeSpec {
    fn from(m: TraceMode) -> Self {
        match m {
            TraceMode::Uniform { depth } => ModeSpec::Uniform { depth },
            TraceMode::Adaptive { theta } => ModeSpec::Adaptive {
                theta: theta.to_degrees(),
            },
        }
    }
}

/// A spline as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineFile {
    pub degree: usize,
    pub scheme: Scheme,
    pub control_points: Vec<MeshPoint<f64>>,
    #[serde(flatten)]
    pub mode: ModeSpec,
}

impl SplineFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        if file.control_points.len() != file.degree + 1 {
            return Err(Error::InvalidParameter(format!(
                "degree {} needs {} control points, got {}",
                file.degree,
                file.degree + 1,
                file.control_points.len()
            )));
        }
        if let ModeSpec::Adaptive { theta } = file.mode {
            if !(theta > 0.0) {
                return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
            }
        }
        Ok(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn polygon<T: Scalar>(&self, surface: &Surface<T>) -> Result<ControlPolygon<T>> {
        let pts: Vec<MeshPoint<T>> = self
            .control_points
            .iter()
            .map(|p| MeshPoint::new(p.face, T::of(p.alpha), T::of(p.beta)))
            .collect();
        ControlPolygon::new(surface, &pts)
    }

    pub fn trace<T: Scalar>(&self, surface: &Surface<T>) -> Result<TracedCurve<T>> {
        trace(surface, &self.polygon(surface)?, self.scheme, self.mode.into())
    }
}

/// JSON form of a traced curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveExport {
    pub scheme: Scheme,
    #[serde(flatten)]
    pub mode: ModeSpec,
    pub nodes: Vec<[f64; 3]>,
    /// The nodes as surface points, so the curve can be read back.
    pub mesh_nodes: Vec<MeshPoint<f64>>,
    pub segments: Vec<PathExport>,
    pub points3d: Vec<[f64; 3]>,
    pub length: f64,
}

impl CurveExport {
    /// Rebuilds the traced curve on the mesh it was exported from.
    pub fn to_curve<T: Scalar>(&self, surface: &Surface<T>) -> Result<TracedCurve<T>> {
        let mesh = surface.mesh();
        if self.mesh_nodes.len() != self.segments.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} nodes for {} segments",
                self.mesh_nodes.len(),
                self.segments.len()
            )));
        }
        let nodes = self
            .mesh_nodes
            .iter()
            .map(|p| mesh.check_point(&MeshPoint::new(p.face, T::of(p.alpha), T::of(p.beta))))
            .collect::<Result<Vec<_>>>()?;
        let segments = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let (a, b) = (nodes[i], nodes[i + 1]);
                let ok = s.intercepts.len() + 1 == s.strip.len()
                    && s.strip.first() == Some(&a.face)
                    && s.strip.last() == Some(&b.face)
                    && s.strip.windows(2).all(|w| mesh.shared_edge(w[0], w[1]).is_some());
                if !ok {
                    return Err(Error::InvalidParameter(format!("segment {i} has an invalid strip")));
                }
                let lerps = s.intercepts.iter().map(|&x| T::of(x)).collect();
                Ok(GeodesicPath::from_parts(mesh, a, b, s.strip.clone(), lerps))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TracedCurve::new(mesh, nodes, segments, self.scheme, self.mode.into()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
