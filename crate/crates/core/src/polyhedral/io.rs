//! OBJ (ASCII polygons) and binary STL reading and writing.
//!
//! OBJ coordinates are printed with the shortest representation that
//! round-trips, so write → read reproduces every vertex bit for bit. STL
//! stores `f32` triangles; reading merges bitwise-equal corners.

use std::collections::HashMap;
use std::io::{self, BufRead, Read, Write};

use super::ConvexPolyhedron;
use crate::error::{Error, Result};

/// A polygon soup as read from disk, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
}

impl RawMesh {
    pub fn into_polyhedron(self, tol: f64) -> Result<ConvexPolyhedron> {
        ConvexPolyhedron::from_faces(self.vertices, self.faces, tol)
    }
}

pub fn write_obj<W: Write>(poly: &ConvexPolyhedron, mut w: W) -> io::Result<()> {
    let (v, e, f) = poly.counts();
    writeln!(w, "# convex polyhedron: {v} vertices, {e} edges, {f} faces")?;
    for p in poly.vertices() {
        writeln!(w, "v {} {} {}", p[0], p[1], p[2])?;
    }
    for face in poly.faces() {
        write!(w, "f")?;
        for i in face {
            write!(w, " {}", i + 1)?;
        }
        writeln!(w)?;
    }
    w.flush()
}

fn malformed(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::MalformedMesh(format!("OBJ line {line}: {msg}"))
}

/// Reads `v` and `f` records; texture/normal references (`f 1/2/3`) and
/// negative (relative) indices are accepted, other records ignored.
pub fn read_obj<R: BufRead>(r: R) -> Result<RawMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let lineno = k + 1;
        let line = line.map_err(|e| malformed(lineno, e))?;
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let coords: Vec<f64> = tok
                    .take(3)
                    .map(|t| t.parse::<f64>().map_err(|e| malformed(lineno, format!("bad coordinate {t:?}: {e}"))))
                    .collect::<Result<_>>()?;
                if coords.len() != 3 {
                    return Err(malformed(lineno, "vertex needs three coordinates"));
                }
                vertices.push([coords[0], coords[1], coords[2]]);
            }
            Some("f") => {
                let mut face = Vec::new();
                for t in tok {
                    let head = t.split('/').next().unwrap_or("");
                    let idx: i64 = head.parse().map_err(|e| malformed(lineno, format!("bad index {t:?}: {e}")))?;
                    let resolved = match idx {
                        i if i > 0 => i - 1,
                        i if i < 0 => vertices.len() as i64 + i,
                        _ => return Err(malformed(lineno, "index 0 is invalid")),
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(malformed(lineno, format!("index {idx} out of range")));
                    }
                    face.push(resolved as usize);
                }
                if face.len() < 3 {
                    return Err(malformed(lineno, "face needs at least three vertices"));
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok(RawMesh { vertices, faces })
}

/// Binary STL of a fan triangulation of every face.
pub fn write_stl<W: Write>(poly: &ConvexPolyhedron, mut w: W) -> io::Result<()> {
    let mut header = [0u8; 80];
    let tag = b"binary STL convex polyhedron";
    header[..tag.len()].copy_from_slice(tag);
    w.write_all(&header)?;
    let count: usize = poly.faces().iter().map(|f| f.len() - 2).sum();
    let count = u32::try_from(count).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "too many triangles"))?;
    w.write_all(&count.to_le_bytes())?;
    for (face, plane) in poly.faces().iter().zip(poly.planes()) {
        for k in 1..face.len() - 1 {
            for x in plane.normal {
                w.write_all(&(x as f32).to_le_bytes())?;
            }
            for &i in &[face[0], face[k], face[k + 1]] {
                for x in poly.vertices()[i] {
                    w.write_all(&(x as f32).to_le_bytes())?;
                }
            }
            w.write_all(&[0u8; 2])?;
        }
    }
    w.flush()
}

pub fn read_stl<R: Read>(mut r: R) -> Result<RawMesh> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf).map_err(|e| Error::MalformedMesh(format!("STL read failed: {e}")))?;
    if buf.len() < 84 {
        return Err(Error::MalformedMesh(format!("STL too short ({} bytes)", buf.len())));
    }
    let count = u32::from_le_bytes(buf[80..84].try_into().unwrap()) as usize;
    if buf.len() != 84 + 50 * count {
        return Err(Error::MalformedMesh(format!(
            "STL declares {count} triangles but has {} bytes (expected {})",
            buf.len(),
            84 + 50 * count
        )));
    }
    let mut index: HashMap<[u32; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::with_capacity(count);
    for t in 0..count {
        let rec = &buf[84 + 50 * t..84 + 50 * (t + 1)];
        let mut face = Vec::with_capacity(3);
        for c in 0..3 {
            let mut bits = [0u32; 3];
            for (a, b) in bits.iter_mut().enumerate() {
                let off = 12 + 12 * c + 4 * a;
                *b = u32::from_le_bytes(rec[off..off + 4].try_into().unwrap());
            }
            let id = *index.entry(bits).or_insert_with(|| {
                vertices.push(bits.map(|b| f32::from_bits(b) as f64));
                vertices.len() - 1
            });
            face.push(id);
        }
        faces.push(face);
    }
    Ok(RawMesh { vertices, faces })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::cube;
    use super::super::{generate_symmetric_mesh, DEFAULT_TOL};
    use super::*;
    use crate::radial_family::ShapeParams;

    #[test]
    fn obj_round_trip_is_bit_exact() {
        let p = ShapeParams::new(3, 0.056, 0.0013).unwrap();
        let m = generate_symmetric_mesh(&p, 16, 24, DEFAULT_TOL).unwrap();
        let mut first = Vec::new();
        write_obj(&m, &mut first).unwrap();
        let back = read_obj(first.as_slice()).unwrap().into_polyhedron(DEFAULT_TOL).unwrap();
        assert_eq!(back, m);
        let mut second = Vec::new();
        write_obj(&back, &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn obj_variants_and_errors() {
        let text =
            "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nvn 0 0 1\nf 1/1/1 3//1 2\nf 1 2 4\nf -4 -1 -2\nf 2 3 4\n";
        let raw = read_obj(text.as_bytes()).unwrap();
        assert_eq!(raw.faces[0], vec![0, 2, 1]);
        assert_eq!(raw.faces[2], vec![0, 3, 2]);
        assert!(raw.into_polyhedron(DEFAULT_TOL).is_ok());
        for bad in ["v 1 2\n", "v 0 0 0\nf 1 2 3\n", "v a b c\n", "f 0 1 2\n"] {
            assert!(matches!(read_obj(bad.as_bytes()), Err(Error::MalformedMesh(_))), "{bad:?}");
        }
    }

    #[test]
    fn stl_round_trip_keeps_vertices() {
        let p = ShapeParams::new(3, 0.3, 0.2).unwrap();
        let m = generate_symmetric_mesh(&p, 8, 12, DEFAULT_TOL).unwrap();
        let mut buf = Vec::new();
        write_stl(&m, &mut buf).unwrap();
        let tris: usize = m.faces().iter().map(|f| f.len() - 2).sum();
        assert_eq!(buf.len(), 84 + 50 * tris);
        let raw = read_stl(buf.as_slice()).unwrap();
        assert_eq!(raw.vertices.len(), m.vertices().len());
        let key = |v: &[f64; 3]| v.map(|x| (x as f32).to_bits());
        let mut read: Vec<[u32; 3]> = raw.vertices.iter().map(key).collect();
        let mut orig: Vec<[u32; 3]> = m.vertices().iter().map(key).collect();
        read.sort_unstable();
        orig.sort_unstable();
        assert_eq!(read, orig);
        let c = cube();
        let mut buf = Vec::new();
        write_stl(&c, &mut buf).unwrap();
        let back = read_stl(buf.as_slice()).unwrap().into_polyhedron(DEFAULT_TOL).unwrap();
        assert_eq!(back.counts(), (8, 12, 6));
    }

    #[test]
    fn truncated_stl_rejected() {
        let mut buf = Vec::new();
        write_stl(&cube(), &mut buf).unwrap();
        buf.pop();
        assert!(matches!(read_stl(buf.as_slice()), Err(Error::MalformedMesh(_))));
        assert!(read_stl(&[0u8; 10][..]).is_err());
    }
}
