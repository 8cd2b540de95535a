//! Static equilibria of a convex polyhedron about a reference point.
//!
//! A face, edge or vertex carries an equilibrium when the foot of the
//! perpendicular from the reference lies in its relative interior and the
//! plane through the foot orthogonal to it supports the polyhedron. Every
//! test is reduced to a signed distance (`margin`): positive means the
//! condition holds with room to spare, and margins within the tolerance
//! mark the equilibrium as degenerate.

use rayon::prelude::*;
use serde::Serialize;

use super::{v3, ConvexPolyhedron, V3};
use crate::error::{domain, Error, Result};
use crate::surface_analysis::{EquilibriumCensus, EquilibriumKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", content = "index", rename_all = "lowercase")]
pub enum Feature {
    Face(usize),
    Edge(usize),
    Vertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolyEquilibrium {
    pub feature: Feature,
    pub kind: EquilibriumKind,
    pub foot_point: [f64; 3],
    pub degenerate: bool,
    /// Smallest of the relative-interior and support distances.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyCensus {
    pub equilibria: Vec<PolyEquilibrium>,
    pub census: EquilibriumCensus,
}

fn arr(v: V3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// Smallest distance below the plane through `foot` with normal `dir`
/// over the given vertices.
fn support_margin(poly: &ConvexPolyhedron, foot: &V3, dir: &V3, others: impl Iterator<Item = usize>) -> f64 {
    others.map(|i| (foot - v3(&poly.vertices[i])).dot(dir)).fold(f64::INFINITY, f64::min)
}

fn face_test(poly: &ConvexPolyhedron, q: &V3, f: usize, nbrs: &[Vec<usize>]) -> (V3, f64) {
    let face = &poly.faces[f];
    let plane = &poly.planes[f];
    let n = v3(&plane.normal);
    let foot = q - plane.signed_distance(&arr(*q)) * n;
    let mut inside = f64::INFINITY;
    for k in 0..face.len() {
        let a = v3(&poly.vertices[face[k]]);
        let b = v3(&poly.vertices[face[(k + 1) % face.len()]]);
        let inward = n.cross(&(b - a)).normalize();
        inside = inside.min((foot - a).dot(&inward));
    }
    let off_face = face.iter().flat_map(|&v| nbrs[v].iter().copied()).filter(|u| !face.contains(u));
    (foot, inside.min(support_margin(poly, &foot, &n, off_face)))
}

fn edge_test(poly: &ConvexPolyhedron, q: &V3, e: usize) -> (V3, f64) {
    let edge = &poly.edges[e];
    let a = v3(&poly.vertices[edge.v[0]]);
    let b = v3(&poly.vertices[edge.v[1]]);
    let d = b - a;
    let t = (q - a).dot(&d) / d.norm_squared();
    let foot = a + t * d;
    let seg = t.min(1.0 - t) * d.norm();
    let dir = (foot - q).normalize();
    let others =
        edge.faces.iter().flat_map(|&f| poly.faces[f].iter().copied()).filter(|&v| v != edge.v[0] && v != edge.v[1]);
    (foot, seg.min(support_margin(poly, &foot, &dir, others)))
}

fn vertex_test(poly: &ConvexPolyhedron, q: &V3, v: usize, nbrs: &[Vec<usize>]) -> (V3, f64) {
    let p = v3(&poly.vertices[v]);
    let dir = (p - q).normalize();
    (p, support_margin(poly, &p, &dir, nbrs[v].iter().copied()))
}

/// Equilibria of `poly` about `reference` with tolerance `tol`, in the
/// order faces, edges, vertices.
pub fn poly_equilibria(poly: &ConvexPolyhedron, reference: [f64; 3], tol: f64) -> Result<PolyCensus> {
    if !(tol >= 0.0) {
        return domain(format!("tolerance must be non-negative, got {tol}"));
    }
    let depth = poly.planes.iter().map(|p| -p.signed_distance(&reference)).fold(f64::INFINITY, f64::min);
    if !(depth > tol) {
        return domain(format!(
            "reference point {reference:?} is not strictly inside the polyhedron (depth {depth:e})"
        ));
    }
    let q = v3(&reference);
    let nbrs = poly.neighbours();
    let (nv, ne, nf) = poly.counts();
    let tests: Vec<(Feature, EquilibriumKind, V3, f64)> = (0..nf + ne + nv)
        .into_par_iter()
        .map(|k| {
            if k < nf {
                let (foot, m) = face_test(poly, &q, k, &nbrs);
                (Feature::Face(k), EquilibriumKind::Stable, foot, m)
            } else if k < nf + ne {
                let (foot, m) = edge_test(poly, &q, k - nf);
                (Feature::Edge(k - nf), EquilibriumKind::Saddle, foot, m)
            } else {
                let (foot, m) = vertex_test(poly, &q, k - nf - ne, &nbrs);
                (Feature::Vertex(k - nf - ne), EquilibriumKind::Unstable, foot, m)
            }
        })
        .collect();
    if tests.iter().any(|t| !t.3.is_finite() && t.3 != f64::INFINITY) {
        return Err(Error::Numerical("non-finite equilibrium margin".into()));
    }
    let equilibria: Vec<PolyEquilibrium> = tests
        .into_iter()
        .filter(|t| t.3 >= -tol)
        .map(|(feature, kind, foot, margin)| PolyEquilibrium {
            feature,
            kind,
            foot_point: arr(foot),
            degenerate: margin <= tol,
            margin,
        })
        .collect();
    let count = |k: EquilibriumKind| equilibria.iter().filter(|e| e.kind == k).count();
    let (s, h, u) = (count(EquilibriumKind::Stable), count(EquilibriumKind::Saddle), count(EquilibriumKind::Unstable));
    let census = EquilibriumCensus {
        stable: s,
        saddle: h,
        unstable: u,
        degenerate: equilibria.iter().filter(|e| e.degenerate).count(),
        euler_check: s as i64 - h as i64 + u as i64,
    };
    Ok(PolyCensus { equilibria, census })
}

/// `C(P) = (V + E + F) − (S + H + U)`; refused for degenerate censuses.
pub fn mechanical_complexity(poly: &ConvexPolyhedron, census: &EquilibriumCensus) -> Result<i64> {
    if census.degenerate > 0 {
        return Err(Error::Degenerate(format!("{} equilibria are degenerate", census.degenerate)));
    }
    let (v, e, f) = poly.counts();
    Ok((v + e + f) as i64 - (census.stable + census.saddle + census.unstable) as i64)
}
