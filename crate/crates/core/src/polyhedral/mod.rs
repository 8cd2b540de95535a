//! Convex polyhedra: construction from the smooth family, mass properties
//! and the static equilibrium census of faces, edges and vertices.

mod census;
mod hull;
pub mod io;

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::mass_properties::MassProperties;
use crate::radial_family::{eval_radius, ShapeParams, SphericalPoint};

pub use census::{mechanical_complexity, poly_equilibria, Feature, PolyCensus, PolyEquilibrium};
pub use hull::convex_hull;

/// Default geometric tolerance for planarity, merging and the census.
pub const DEFAULT_TOL: f64 = 1e-9;

type V3 = Vector3<f64>;

fn v3(p: &[f64; 3]) -> V3 {
    V3::new(p[0], p[1], p[2])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub v: [usize; 2],
    /// The face traversing `v[0] → v[1]`, then the one traversing `v[1] → v[0]`.
    pub faces: [usize; 2],
}

/// Plane `n · x = offset` with unit outward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl Plane {
    pub fn signed_distance(&self, p: &[f64; 3]) -> f64 {
        v3(&self.normal).dot(&v3(p)) - self.offset
    }
}

/// A validated convex polyhedron. Faces are counter-clockwise seen from
/// outside; adjacent coplanar faces have been merged.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolyhedron {
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    planes: Vec<Plane>,
    tol: f64,
}

fn newell_plane(vertices: &[[f64; 3]], face: &[usize]) -> Option<Plane> {
    let mut n = V3::zeros();
    let mut centre = V3::zeros();
    for (k, &i) in face.iter().enumerate() {
        let a = v3(&vertices[i]);
        let b = v3(&vertices[face[(k + 1) % face.len()]]);
        n += V3::new((a.y - b.y) * (a.z + b.z), (a.z - b.z) * (a.x + b.x), (a.x - b.x) * (a.y + b.y));
        centre += a;
    }
    centre /= face.len() as f64;
    let len = n.norm();
    if !(len > 0.0) {
        return None;
    }
    let n = n / len;
    Some(Plane { normal: [n.x, n.y, n.z], offset: n.dot(&centre) })
}

fn directed_edges(faces: &[Vec<usize>]) -> Result<HashMap<(usize, usize), usize>> {
    let mut map = HashMap::new();
    for (f, face) in faces.iter().enumerate() {
        for k in 0..face.len() {
            let e = (face[k], face[(k + 1) % face.len()]);
            if map.insert(e, f).is_some() {
                return Err(Error::MalformedMesh(format!(
                    "edge {}-{} traversed twice in the same direction (non-manifold or inconsistent orientation)",
                    e.0, e.1
                )));
            }
        }
    }
    for &(a, b) in map.keys() {
        if !map.contains_key(&(b, a)) {
            return Err(Error::MalformedMesh(format!("edge {a}-{b} has only one adjacent face (surface not closed)")));
        }
    }
    Ok(map)
}

/// Grow regions of adjacent faces lying within `tol` of the region's seed
/// plane and replace each region by its boundary polygon.
fn merge_coplanar(vertices: &[[f64; 3]], faces: Vec<Vec<usize>>, tol: f64) -> Result<Vec<Vec<usize>>> {
    let edges = directed_edges(&faces)?;
    let planes: Vec<Option<Plane>> = faces.iter().map(|f| newell_plane(vertices, f)).collect();
    let mut region = vec![usize::MAX; faces.len()];
    let mut out = Vec::new();
    for seed in 0..faces.len() {
        if region[seed] != usize::MAX {
            continue;
        }
        let rid = out.len();
        region[seed] = rid;
        let mut members = vec![seed];
        if let Some(plane) = planes[seed] {
            let mut k = 0;
            while k < members.len() {
                let f = &faces[members[k]];
                k += 1;
                for j in 0..f.len() {
                    let g = edges[&(f[(j + 1) % f.len()], f[j])];
                    if region[g] != usize::MAX {
                        continue;
                    }
                    let same_side = planes[g].is_some_and(|p| v3(&p.normal).dot(&v3(&plane.normal)) > 0.0);
                    if same_side && faces[g].iter().all(|&i| plane.signed_distance(&vertices[i]).abs() <= tol) {
                        region[g] = rid;
                        members.push(g);
                    }
                }
            }
        }
        if members.len() == 1 {
            out.push(faces[seed].clone());
            continue;
        }
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &m in &members {
            let f = &faces[m];
            for j in 0..f.len() {
                let (a, b) = (f[j], f[(j + 1) % f.len()]);
                if region[edges[&(b, a)]] != rid && next.insert(a, b).is_some() {
                    return Err(Error::Mesh(format!("merged coplanar region around vertex {a} is not a disk")));
                }
            }
        }
        let start = *next.keys().min().expect("region has a boundary");
        let mut poly = vec![start];
        let mut cur = next[&start];
        while cur != start {
            if poly.len() > next.len() {
                return Err(Error::Mesh("merged coplanar region boundary does not close".into()));
            }
            poly.push(cur);
            cur = *next.get(&cur).ok_or_else(|| Error::Mesh("merged coplanar region boundary is open".into()))?;
        }
        if poly.len() != next.len() {
            return Err(Error::Mesh("merged coplanar region has several boundary loops".into()));
        }
        out.push(poly);
    }
    Ok(out)
}

/// Remove vertices that lie on exactly two faces and sit on the straight
/// segment between their neighbours in both.
fn drop_collinear(vertices: &[[f64; 3]], faces: &mut [Vec<usize>], tol: f64) {
    loop {
        let mut incidence: HashMap<usize, Vec<usize>> = HashMap::new();
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                incidence.entry(v).or_default().push(f);
            }
        }
        let straight = |face: &[usize], v: usize| {
            let k = face.iter().position(|&x| x == v).unwrap();
            let p = v3(&vertices[face[(k + face.len() - 1) % face.len()]]);
            let q = v3(&vertices[face[(k + 1) % face.len()]]);
            let x = v3(&vertices[v]);
            let d = q - p;
            let t = (x - p).dot(&d) / d.norm_squared();
            t > 0.0 && t < 1.0 && (x - p - t * d).norm() <= tol
        };
        let mut candidates: Vec<usize> = incidence
            .iter()
            .filter(|(&v, fs)| fs.len() == 2 && fs.iter().all(|&f| faces[f].len() > 3 && straight(&faces[f], v)))
            .map(|(&v, _)| v)
            .collect();
        if candidates.is_empty() {
            return;
        }
        candidates.sort_unstable();
        let v = candidates[0];
        for &f in &incidence[&v] {
            faces[f].retain(|&x| x != v);
        }
    }
}

impl ConvexPolyhedron {
    /// Validate and normalise a closed polygonal surface: faces must pair up
    /// along edges, be planar within `tol` and meet at convex dihedral
    /// angles. Inward orientation is flipped, adjacent coplanar faces are
    /// merged and straight-angle vertices removed.
    pub fn from_faces(vertices: Vec<[f64; 3]>, faces: Vec<Vec<usize>>, tol: f64) -> Result<Self> {
        if !(tol >= 0.0) {
            return domain(format!("tolerance must be non-negative, got {tol}"));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::MalformedMesh("non-finite vertex coordinate".into()));
        }
        for (f, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(Error::MalformedMesh(format!("face {f} has fewer than 3 vertices")));
            }
            if let Some(&bad) = face.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::MalformedMesh(format!("face {f} references missing vertex {bad}")));
            }
            let mut sorted = face.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != face.len() {
                return Err(Error::MalformedMesh(format!("face {f} repeats a vertex")));
            }
        }
        directed_edges(&faces)?;
        let mut faces = faces;
        if signed_volume(&vertices, &faces) < 0.0 {
            for f in &mut faces {
                f.reverse();
            }
        }
        let mut faces = merge_coplanar(&vertices, faces, tol)?;
        drop_collinear(&vertices, &mut faces, tol);

        let mut used = vec![false; vertices.len()];
        for &i in faces.iter().flatten() {
            used[i] = true;
        }
        let mut remap = vec![usize::MAX; vertices.len()];
        let mut kept = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            if used[i] {
                remap[i] = kept.len();
                kept.push(*v);
            }
        }
        let faces: Vec<Vec<usize>> = faces.into_iter().map(|f| f.into_iter().map(|i| remap[i]).collect()).collect();
        Self::assemble(kept, faces, tol)
    }

    fn assemble(vertices: Vec<[f64; 3]>, faces: Vec<Vec<usize>>, tol: f64) -> Result<Self> {
        let map = directed_edges(&faces)?;
        let mut edges = Vec::new();
        for (f, face) in faces.iter().enumerate() {
            for k in 0..face.len() {
                let (a, b) = (face[k], face[(k + 1) % face.len()]);
                if a < b {
                    edges.push(Edge { v: [a, b], faces: [f, map[&(b, a)]] });
                }
            }
        }
        let euler = vertices.len() as i64 - edges.len() as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(Error::MalformedMesh(format!("Euler characteristic is {euler}, expected 2")));
        }
        let mut planes = Vec::with_capacity(faces.len());
        for (f, face) in faces.iter().enumerate() {
            let plane =
                newell_plane(&vertices, face).ok_or_else(|| Error::MalformedMesh(format!("face {f} has zero area")))?;
            let off = face.iter().map(|&i| plane.signed_distance(&vertices[i]).abs()).fold(0.0, f64::max);
            if off > tol {
                return Err(Error::MalformedMesh(format!("face {f} is not planar (deviation {off:e})")));
            }
            let n = v3(&plane.normal);
            for k in 0..face.len() {
                let a = v3(&vertices[face[k]]);
                let b = v3(&vertices[face[(k + 1) % face.len()]]);
                let c = v3(&vertices[face[(k + 2) % face.len()]]);
                // signed distance of c from the line a-b, positive towards the face interior
                let inward = n.cross(&(b - a)).normalize();
                if (c - a).dot(&inward) < -tol {
                    return Err(Error::MalformedMesh(format!("face {f} is not convex")));
                }
            }
            planes.push(plane);
        }
        for e in &edges {
            for (f, g) in [(e.faces[0], e.faces[1]), (e.faces[1], e.faces[0])] {
                let worst = faces[g].iter().map(|&i| planes[f].signed_distance(&vertices[i])).fold(f64::MIN, f64::max);
                if worst > tol {
                    return Err(Error::MalformedMesh(format!(
                        "surface is not convex at edge {}-{} (excess {worst:e})",
                        e.v[0], e.v[1]
                    )));
                }
            }
        }
        Ok(Self { vertices, faces, edges, planes, tol })
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    /// Tolerance the polyhedron was validated with.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `(V, E, F)`
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges.len(), self.faces.len())
    }

    /// Convex hull of a point cloud, with coplanar faces merged.
    pub fn hull(points: &[[f64; 3]], tol: f64) -> Result<Self> {
        let (v, t) = convex_hull(points)?;
        Self::from_faces(v, t.into_iter().map(|t| t.to_vec()).collect(), tol).map_err(|e| match e {
            Error::MalformedMesh(m) => Error::Mesh(format!("hull: {m}")),
            other => other,
        })
    }

    /// For each vertex, the vertices joined to it by an edge.
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            out[e.v[0]].push(e.v[1]);
            out[e.v[1]].push(e.v[0]);
        }
        out
    }
}

fn signed_volume(vertices: &[[f64; 3]], faces: &[Vec<usize>]) -> f64 {
    let mut vol = 0.0;
    for face in faces {
        let a = v3(&vertices[face[0]]);
        for k in 1..face.len() - 1 {
            vol += a.dot(&v3(&vertices[face[k]]).cross(&v3(&vertices[face[k + 1]])));
        }
    }
    vol / 6.0
}

/// Volume and centroid by signed tetrahedra from the origin over a fan
/// triangulation of every face.
pub fn poly_mass(poly: &ConvexPolyhedron) -> Result<MassProperties> {
    let mut vol = 0.0;
    let mut moment = V3::zeros();
    for face in poly.faces() {
        let a = v3(&poly.vertices[face[0]]);
        for k in 1..face.len() - 1 {
            let b = v3(&poly.vertices[face[k]]);
            let c = v3(&poly.vertices[face[k + 1]]);
            let v = a.dot(&b.cross(&c)) / 6.0;
            vol += v;
            moment += v * (a + b + c) / 4.0;
        }
    }
    if !(vol > 0.0) {
        return Err(Error::Mass(format!("non-positive signed volume {vol:e}; faces are not outward oriented")));
    }
    Ok(MassProperties {
        volume: vol,
        centroid: [moment.x / vol, moment.y / vol, moment.z / vol],
        m_xy: moment.z,
        h: None,
    })
}

/// Sample points of the symmetric mesh: both poles and an `m_theta × m_phi`
/// latitude-longitude grid whose longitudes include every mirror plane.
pub fn symmetric_samples(params: &ShapeParams, m_theta: usize, m_phi: usize) -> Result<Vec<[f64; 3]>> {
    let n = params.n() as usize;
    if m_theta < 8 {
        return domain(format!("m_theta must be at least 8, got {m_theta}"));
    }
    if m_phi == 0 || m_phi % (2 * n) != 0 {
        return domain(format!("m_phi must be a positive multiple of 2n = {}, got {m_phi}", 2 * n));
    }
    let point = |p: SphericalPoint| {
        let r = eval_radius(params, &p);
        p.unit_vector().map(|x| r * x)
    };
    let mut pts = vec![point(SphericalPoint::SOUTH)];
    for i in 1..=m_theta {
        let theta = -FRAC_PI_2 + i as f64 * PI / (m_theta + 1) as f64;
        for j in 0..m_phi {
            pts.push(point(SphericalPoint { theta, phi: TAU * j as f64 / m_phi as f64 }));
        }
    }
    pts.push(point(SphericalPoint::NORTH));
    Ok(pts)
}

/// Convex hull of [`symmetric_samples`].
pub fn generate_symmetric_mesh(
    params: &ShapeParams,
    m_theta: usize,
    m_phi: usize,
    tol: f64,
) -> Result<ConvexPolyhedron> {
    ConvexPolyhedron::hull(&symmetric_samples(params, m_theta, m_phi)?, tol)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn cube() -> ConvexPolyhedron {
        let v: Vec<[f64; 3]> =
            (0..8).map(|i| [(i & 1) as f64 - 0.5, ((i >> 1) & 1) as f64 - 0.5, ((i >> 2) & 1) as f64 - 0.5]).collect();
        let faces = vec![
            vec![0, 2, 3, 1],
            vec![4, 5, 7, 6],
            vec![0, 1, 5, 4],
            vec![2, 6, 7, 3],
            vec![0, 4, 6, 2],
            vec![1, 3, 7, 5],
        ];
        ConvexPolyhedron::from_faces(v, faces, DEFAULT_TOL).unwrap()
    }

    pub fn corner_tetrahedron() -> ConvexPolyhedron {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        ConvexPolyhedron::hull(&v, DEFAULT_TOL).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn cube_structure_and_mass() {
        let c = cube();
        assert_eq!(c.counts(), (8, 12, 6));
        let m = poly_mass(&c).unwrap();
        assert!((m.volume - 1.0).abs() < 1e-15);
        assert!(m.centroid.iter().all(|x| x.abs() < 1e-15));
        assert!(m.h.is_none());
    }

    #[test]
    fn tetrahedron_mass() {
        let t = corner_tetrahedron();
        assert_eq!(t.counts(), (4, 6, 4));
        let m = poly_mass(&t).unwrap();
        assert!((m.volume - 1.0 / 6.0).abs() < 1e-15);
        for x in m.centroid {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn triangulated_cube_merges_back_to_quads() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([(i & 1) as f64 - 0.5, ((i >> 1) & 1) as f64 - 0.5, ((i >> 2) & 1) as f64 - 0.5]);
        }
        // face centres and edge midpoints are on the boundary but not extreme
        pts.push([0.5, 0.0, 0.0]);
        pts.push([0.5, 0.5, 0.0]);
        let c = ConvexPolyhedron::hull(&pts, DEFAULT_TOL).unwrap();
        assert_eq!(c.counts(), (8, 12, 6));
    }

    #[test]
    fn inward_faces_are_flipped() {
        let c = cube();
        let flipped: Vec<Vec<usize>> = c.faces().iter().map(|f| f.iter().rev().copied().collect()).collect();
        let d = ConvexPolyhedron::from_faces(c.vertices().to_vec(), flipped, DEFAULT_TOL).unwrap();
        assert!(poly_mass(&d).unwrap().volume > 0.0);
    }

    #[test]
    fn malformed_surfaces_rejected() {
        let c = cube();
        let mut open = c.faces().to_vec();
        open.pop();
        assert!(matches!(
            ConvexPolyhedron::from_faces(c.vertices().to_vec(), open, DEFAULT_TOL),
            Err(Error::MalformedMesh(_))
        ));
        let mut bent = c.vertices().to_vec();
        bent[7][2] += 0.1;
        assert!(ConvexPolyhedron::from_faces(bent, c.faces().to_vec(), DEFAULT_TOL).is_err());
        let mut dented = c.vertices().to_vec();
        dented[7] = [0.3, 0.3, 0.3];
        let tris: Vec<Vec<usize>> =
            c.faces().iter().flat_map(|f| vec![vec![f[0], f[1], f[2]], vec![f[0], f[2], f[3]]]).collect();
        assert!(ConvexPolyhedron::from_faces(dented, tris, DEFAULT_TOL).is_err());
    }

    #[test]
    fn sphere_mesh_satisfies_euler() {
        let p = ShapeParams::new(3, 1.0, 0.0).unwrap();
        let m = generate_symmetric_mesh(&p, 8, 12, DEFAULT_TOL).unwrap();
        let (v, e, f) = m.counts();
        assert_eq!(v, 8 * 12 + 2);
        assert_eq!(v as i64 - e as i64 + f as i64, 2);
        // the rings bound planar trapezoids
        assert_eq!(f, 2 * 12 + 7 * 12);
    }

    #[test]
    fn symmetric_mesh_is_invariant_and_close_to_the_sphere() {
        let p = ShapeParams::new(3, 0.056, 0.001).unwrap();
        let m = generate_symmetric_mesh(&p, 64, 96, DEFAULT_TOL).unwrap();
        let verts = m.vertices();
        let rot = TAU / 3.0;
        let (s, c) = rot.sin_cos();
        for v in verts {
            let w = [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]];
            let d = verts.iter().map(|u| (v3(u) - v3(&w)).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-12);
            assert!((v3(v).norm() - 1.0).abs() <= 0.001 + 1e-15);
        }
        let mass = poly_mass(&m).unwrap();
        assert!(mass.centroid[0].abs() < 1e-12 && mass.centroid[1].abs() < 1e-12, "{:?}", mass.centroid);
    }

    #[test]
    fn mesh_preconditions() {
        let p = ShapeParams::new(3, 0.5, 0.1).unwrap();
        assert!(generate_symmetric_mesh(&p, 8, 16, DEFAULT_TOL).is_err());
        assert!(generate_symmetric_mesh(&p, 4, 12, DEFAULT_TOL).is_err());
    }

    #[test]
    fn unit_ball_volume_grows_under_nested_refinement() {
        let p = ShapeParams::new(3, 1.0, 0.0).unwrap();
        let coarse = poly_mass(&generate_symmetric_mesh(&p, 31, 66, DEFAULT_TOL).unwrap()).unwrap().volume;
        let fine = poly_mass(&generate_symmetric_mesh(&p, 63, 132, DEFAULT_TOL).unwrap()).unwrap().volume;
        let ball = 4.0 * PI / 3.0;
        assert!(coarse <= fine && fine < ball);
        assert!((fine - ball).abs() / ball < 0.01);
    }
}
