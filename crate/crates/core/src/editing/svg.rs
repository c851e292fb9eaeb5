//! SVG path import: drawings are laid out in the plane, then wrapped onto
//! the mesh through normal coordinates about a center point.

use log::warn;
use svgtypes::{PathParser, PathSegment};

use crate::error::{Error, Result};
use crate::geodesics::Surface;
use crate::mesh::MeshPoint;
use crate::scalar::Scalar;
use crate::splines::{Scheme, TraceMode};

use super::chart::{exp_chart, NormalChart, Polar};
use super::Spline;

type P2 = [f64; 2];

/// Splines read from a drawing, and everything that was skipped.
#[derive(Debug, Clone)]
pub struct SvgImport<T> {
    pub splines: Vec<Spline<T>>,
    pub warnings: Vec<String>,
}

/// One subpath as cubic control points (`3n + 1` of them).
#[derive(Debug, Clone, PartialEq)]
struct Subpath {
    points: Vec<P2>,
    closed: bool,
}

/// Elements that carry drawing content we do not import.
const UNSUPPORTED: &[&str] = &[
    "text",
    "tspan",
    "textPath",
    "linearGradient",
    "radialGradient",
    "pattern",
    "image",
    "rect",
    "circle",
    "ellipse",
    "line",
    "polyline",
    "polygon",
    "use",
];

/// Imports every `<path>` of `svg` onto the surface. The drawing's bounding
/// box center goes to `center`, its diagonal becomes `scale` times the
/// mesh's, and it is turned by `rotation` radians. Anything beyond plain
/// path data is skipped with a warning.
pub fn svg_import<T: Scalar>(
    surface: &Surface<T>,
    svg: &str,
    center: &MeshPoint<T>,
    scale: f64,
    rotation: f64,
) -> Result<SvgImport<T>> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
    }
    let center = surface.mesh().check_point(center)?;
    let (subpaths, warnings) = parse(svg)?;
    for w in &warnings {
        warn!("{w}");
    }
    if subpaths.is_empty() {
        return Ok(SvgImport {
            splines: Vec::new(),
            warnings,
        });
    }

    let (lo, hi) = subpaths.iter().flat_map(|s| s.points.iter()).fold(
        ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
        |(lo, hi), p| ([lo[0].min(p[0]), lo[1].min(p[1])], [hi[0].max(p[0]), hi[1].max(p[1])]),
    );
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let diag = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    if !(diag > 0.0) {
        return Err(Error::Svg("drawing has an empty bounding box".into()));
    }
    let factor = scale * surface.mesh().bbox_diag().f64() / diag;
    let (sin, cos) = rotation.sin_cos();
    let place = |p: &P2| -> Polar<T> {
        // SVG's y axis points down
        let (x, y) = ((p[0] - mid[0]) * factor, (mid[1] - p[1]) * factor);
        let (x, y) = (cos * x - sin * y, sin * x + cos * y);
        Polar {
            angle: T::of(y.atan2(x)),
            radius: T::of(x.hypot(y)),
        }
    };

    let mode = TraceMode::adaptive_degrees(5.0);
    let mut splines = Vec::with_capacity(subpaths.len());
    for sub in &subpaths {
        let chart = NormalChart {
            center,
            entries: sub.points.iter().map(place).collect(),
        };
        let mut points = exp_chart(surface, &chart)?;
        if sub.closed {
            let n = points.len();
            points[n - 1] = points[0];
        }
        let spline = Spline::from_points(surface, &points, Scheme::Rdc, mode)?;
        splines.push(if sub.closed { spline.close()? } else { spline });
    }
    Ok(SvgImport { splines, warnings })
}

fn unsupported(what: impl Into<String>) -> String {
    Error::SvgUnsupportedFeature(what.into()).to_string()
}

/// Reads all path data of a document as cubic subpaths.
fn parse(svg: &str) -> Result<(Vec<Subpath>, Vec<String>)> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| Error::Svg(e.to_string()))?;
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for node in doc.descendants().filter(|n| n.is_element()) {
        let name = node.tag_name().name();
        if node.has_attribute("transform") {
            warnings.push(unsupported(format!("transform on <{name}> ignored")));
        }
        if UNSUPPORTED.contains(&name) {
            warnings.push(unsupported(format!("<{name}> element skipped")));
            continue;
        }
        if name != "path" {
            continue;
        }
        if let Some(fill) = node.attribute("fill").or(node.attribute("stroke")) {
            if fill.starts_with("url(") {
                warnings.push(unsupported(format!("paint server {fill} ignored")));
            }
        }
        let Some(d) = node.attribute("d") else {
            continue;
        };
        out.extend(parse_path(d, &mut warnings)?);
    }
    Ok((out, warnings))
}

fn lerp(a: P2, b: P2, t: f64) -> P2 {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

fn reflect(c: P2, about: P2) -> P2 {
    [2.0 * about[0] - c[0], 2.0 * about[1] - c[1]]
}

#[derive(Default)]
struct Builder {
    subpaths: Vec<Subpath>,
    points: Vec<P2>,
    start: P2,
    cur: P2,
    // second control point of the last cubic, or control of the last quadratic
    last_cubic: Option<P2>,
    last_quad: Option<P2>,
}

impl Builder {
    fn flush(&mut self, closed: bool) {
        if self.points.len() >= 4 {
            self.subpaths.push(Subpath {
                points: std::mem::take(&mut self.points),
                closed,
            });
        }
        self.points.clear();
    }

    fn move_to(&mut self, p: P2) {
        self.flush(false);
        self.start = p;
        self.cur = p;
        self.points.push(p);
    }

    fn cubic(&mut self, c1: P2, c2: P2, p: P2) {
        if self.points.is_empty() {
            self.points.push(self.cur);
        }
        self.points.extend([c1, c2, p]);
        self.cur = p;
        self.last_cubic = Some(c2);
        self.last_quad = None;
    }

    fn line(&mut self, p: P2) {
        let a = self.cur;
        self.cubic(lerp(a, p, 1.0 / 3.0), lerp(a, p, 2.0 / 3.0), p);
        self.last_cubic = None;
    }

    fn quadratic(&mut self, c: P2, p: P2) {
        // exact elevation in the plane, before wrapping
        let a = self.cur;
        self.cubic(lerp(a, c, 2.0 / 3.0), lerp(p, c, 2.0 / 3.0), p);
        self.last_cubic = None;
        self.last_quad = Some(c);
    }

    fn close(&mut self) {
        if self.points.is_empty() {
            return;
        }
        if self.cur != self.start {
            self.line(self.start);
        }
        self.flush(true);
        self.cur = self.start;
        self.points.clear();
        self.last_cubic = None;
        self.last_quad = None;
    }
}

fn parse_path(d: &str, warnings: &mut Vec<String>) -> Result<Vec<Subpath>> {
    let mut b = Builder::default();
    for seg in PathParser::from(d) {
        let seg = seg.map_err(|e| Error::Svg(format!("bad path data: {e}")))?;
        let cur = b.cur;
        let at = |abs: bool, x: f64, y: f64| if abs { [x, y] } else { [cur[0] + x, cur[1] + y] };
        match seg {
            PathSegment::MoveTo { abs, x, y } => {
                b.move_to(at(abs, x, y));
                b.last_cubic = None;
                b.last_quad = None;
            }
            PathSegment::LineTo { abs, x, y } => b.line(at(abs, x, y)),
            PathSegment::HorizontalLineTo { abs, x } => {
                let p = if abs { [x, cur[1]] } else { [cur[0] + x, cur[1]] };
                b.line(p);
            }
            PathSegment::VerticalLineTo { abs, y } => {
                let p = if abs { [cur[0], y] } else { [cur[0], cur[1] + y] };
                b.line(p);
            }
            PathSegment::CurveTo { abs, x1, y1, x2, y2, x, y } => {
                b.cubic(at(abs, x1, y1), at(abs, x2, y2), at(abs, x, y));
            }
            PathSegment::SmoothCurveTo { abs, x2, y2, x, y } => {
                let c1 = b.last_cubic.map_or(cur, |c| reflect(c, cur));
                b.cubic(c1, at(abs, x2, y2), at(abs, x, y));
            }
            PathSegment::Quadratic { abs, x1, y1, x, y } => b.quadratic(at(abs, x1, y1), at(abs, x, y)),
            PathSegment::SmoothQuadratic { abs, x, y } => {
                let c = b.last_quad.map_or(cur, |c| reflect(c, cur));
                b.quadratic(c, at(abs, x, y));
            }
            PathSegment::EllipticalArc { abs, x, y, .. } => {
                warnings.push(unsupported("elliptical arc replaced by a straight segment"));
                b.line(at(abs, x, y));
            }
            PathSegment::ClosePath { .. } => b.close(),
        }
    }
    b.flush(false);
    Ok(b.subpaths)
}
