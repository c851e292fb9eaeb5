use std::io::{BufRead, Write};

use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::Vec3;

/// Input formats understood by [`load_mesh`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
}

/// Reads a mesh from a byte stream. Polygons with more than three corners
/// are fan triangulated; normals, texture coordinates and groups are ignored.
pub fn load_mesh<T: Scalar, R: BufRead>(source: R, format: MeshFormat) -> Result<TriangleMesh<T>> {
    match format {
        MeshFormat::Obj => read_obj(source),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn read_obj<T: Scalar, R: BufRead>(source: R) -> Result<TriangleMesh<T>> {
    let mut positions = Vec::new();
    let mut triangles = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.split('#').next().unwrap_or("");
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut c = [T::zero(); 3];
                for slot in c.iter_mut() {
                    let tok = it
                        .next()
                        .ok_or_else(|| parse_err(lineno, "vertex needs three coordinates"))?;
                    let x: f64 = tok
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad coordinate '{tok}'")))?;
                    *slot = T::of(x);
                }
                positions.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut idx = Vec::with_capacity(4);
                for tok in it {
                    let head = tok.split('/').next().unwrap_or("");
                    let raw: i64 = head
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad face index '{tok}'")))?;
                    let v = if raw > 0 {
                        raw - 1
                    } else if raw < 0 {
                        positions.len() as i64 + raw
                    } else {
                        -1
                    };
                    if v < 0 || v as usize >= positions.len() {
                        return Err(parse_err(lineno, format!("face index {raw} out of range")));
                    }
                    idx.push(v as usize);
                }
                if idx.len() < 3 {
                    return Err(parse_err(lineno, "face needs at least three vertices"));
                }
                for j in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[j], idx[j + 1]]);
                }
            }
            _ => {}
        }
    }
    TriangleMesh::new(positions, triangles)
}

/// Writes the mesh as OBJ.
pub fn write_obj<T: Scalar, W: Write>(mesh: &TriangleMesh<T>, mut out: W) -> Result<()> {
    for p in mesh.positions() {
        writeln!(out, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for t in mesh.triangles() {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}
