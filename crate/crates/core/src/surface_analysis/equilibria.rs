//! Critical points of the distance function `δ(u) = |R(u) u − q|` for a
//! reference point `q` inside the body.

use std::f64::consts::FRAC_PI_2;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::patch::{frame_matrix, patch_with_band, spherical_patch, sym2_eigenvalues, to_orthonormal_frame, Patch, V3};
use crate::error::{domain, Result};
use crate::radial_family::{ShapeParams, SphericalPoint};

/// Newton runs in the projected chart this close to a pole.
const NEWTON_POLAR_BAND: f64 = 0.3;
const MAX_NEWTON_STEPS: usize = 50;
const MAX_HALVINGS: usize = 40;
/// Points closer than this are the same equilibrium.
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Distinct points closer than this are reported as ambiguous.
const AMBIGUITY_RADIUS: f64 = 1e-3;
/// Eigenvalues of the δ Hessian below this magnitude flag degeneracy.
pub const DEGENERACY_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Stable,
    Saddle,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumPoint {
    pub point: SphericalPoint,
    pub location: [f64; 3],
    pub kind: EquilibriumKind,
    /// Ascending eigenvalues of the Hessian of δ in an orthonormal frame.
    pub hessian_eigenvalues: [f64; 2],
    /// Tangential gradient norm of δ at the returned location.
    pub residual: f64,
    /// An eigenvalue is within [`DEGENERACY_EPS`] of zero; `kind` is then
    /// only a sign reading.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOptions {
    pub seeds_theta: usize,
    pub seeds_phi: usize,
    /// Convergence threshold on the tangential gradient norm of δ.
    pub tol: f64,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self { seeds_theta: 64, seeds_phi: 128, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    /// Sorted by θ, then φ.
    pub points: Vec<EquilibriumPoint>,
    pub seeds: usize,
    /// Seeds from which Newton failed to converge.
    pub discarded_seeds: usize,
    /// Pairs of distinct equilibria closer than 1e-3 rad.
    pub ambiguous_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquilibriumCensus {
    pub stable: usize,
    pub saddle: usize,
    pub unstable: usize,
    pub degenerate: usize,
    pub euler_check: i64,
}

impl EquilibriumCensus {
    /// Poincaré–Hopf holds, every point is nondegenerate, and both the
    /// global minimum and maximum are present. A census passing the Euler
    /// check with `S = 0` or `U = 0` has missed points (e.g. a degenerate
    /// circle of maxima the Newton seeds cannot lock onto).
    pub fn is_valid(&self) -> bool {
        self.euler_check == 2 && self.degenerate == 0 && self.stable > 0 && self.unstable > 0
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.stable, self.saddle, self.unstable)
    }
}

pub fn census(points: &[EquilibriumPoint]) -> EquilibriumCensus {
    let count = |k: EquilibriumKind| points.iter().filter(|p| p.kind == k).count();
    let (s, h, u) = (count(EquilibriumKind::Stable), count(EquilibriumKind::Saddle), count(EquilibriumKind::Unstable));
    EquilibriumCensus {
        stable: s,
        saddle: h,
        unstable: u,
        degenerate: points.iter().filter(|p| p.degenerate).count(),
        euler_check: s as i64 - h as i64 + u as i64,
    }
}

struct Local {
    grad: [f64; 2],
    hess: [[f64; 2]; 2],
    delta: f64,
    residual: f64,
}

/// Derivatives of `g = ½|X − q|²` in the patch chart. At a critical point
/// the Hessian of δ is that of `g` divided by δ.
fn local(patch: &Patch, q: &V3) -> Local {
    let r = patch.point - q;
    let grad = [r.dot(&patch.da), r.dot(&patch.db)];
    let hess_ab = patch.da.dot(&patch.db) + r.dot(&patch.dab);
    let hess = [
        [patch.da.dot(&patch.da) + r.dot(&patch.daa), hess_ab],
        [hess_ab, patch.db.dot(&patch.db) + r.dot(&patch.dbb)],
    ];
    let [[e, f], [_, g]] = patch.metric();
    let det = e * g - f * f;
    let quad = (g * grad[0] * grad[0] - 2.0 * f * grad[0] * grad[1] + e * grad[1] * grad[1]) / det;
    let delta = r.norm();
    Local { grad, hess, delta, residual: quad.max(0.0).sqrt() / delta }
}

fn newton(params: &ShapeParams, q: &V3, seed: SphericalPoint, tol: f64) -> Option<(Patch, Local)> {
    let mut patch = patch_with_band(params, &seed, NEWTON_POLAR_BAND);
    let mut here = local(&patch, q);
    for _ in 0..MAX_NEWTON_STEPS {
        if here.residual < tol {
            return Some((patch, here));
        }
        let [[a, b], [_, c]] = here.hess;
        let det = a * c - b * b;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let step = [(-c * here.grad[0] + b * here.grad[1]) / det, (b * here.grad[0] - a * here.grad[1]) / det];
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = patch.sphere_point_at(patch.coords[0] + scale * step[0], patch.coords[1] + scale * step[1]);
            if let Some(p) = trial {
                let tp = patch_with_band(params, &p, NEWTON_POLAR_BAND);
                let tl = local(&tp, q);
                if tl.residual < here.residual {
                    accepted = Some((tp, tl));
                    break;
                }
            }
            scale *= 0.5;
        }
        let (p, l) = accepted?;
        patch = p;
        here = l;
    }
    (here.residual < tol).then_some((patch, here))
}

fn classify(patch: &Patch, l: &Local) -> ([f64; 2], EquilibriumKind, bool) {
    let h = to_orthonormal_frame(l.hess, frame_matrix(patch));
    let eig = sym2_eigenvalues(h).map(|e| e / l.delta);
    let kind = if eig[0] > 0.0 {
        EquilibriumKind::Stable
    } else if eig[1] < 0.0 {
        EquilibriumKind::Unstable
    } else {
        EquilibriumKind::Saddle
    };
    let degenerate = eig.iter().any(|e| e.abs() < DEGENERACY_EPS);
    (eig, kind, degenerate)
}

/// Seed points: centres of grid cells on which both spherical gradient
/// components of δ change sign, plus the two poles.
fn seeds(params: &ShapeParams, q: &V3, nt: usize, np: usize) -> Vec<SphericalPoint> {
    let dt = std::f64::consts::PI / nt as f64;
    let dp = std::f64::consts::TAU / np as f64;
    // latitudes strictly inside (-π/2, π/2)
    let theta = |i: usize| -FRAC_PI_2 + (i as f64 + 0.5) * dt;
    let grads: Vec<[f64; 2]> = (0..nt * np)
        .into_par_iter()
        .map(|k| {
            let p = SphericalPoint { theta: theta(k / np), phi: (k % np) as f64 * dp };
            local(&spherical_patch(params, &p), q).grad
        })
        .collect();
    let mut out = vec![SphericalPoint::SOUTH];
    for i in 0..nt - 1 {
        for j in 0..np {
            let jn = (j + 1) % np;
            let corners = [grads[i * np + j], grads[i * np + jn], grads[(i + 1) * np + j], grads[(i + 1) * np + jn]];
            let straddles = |c: usize| {
                let lo = corners.iter().map(|g| g[c]).fold(f64::INFINITY, f64::min);
                let hi = corners.iter().map(|g| g[c]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if straddles(0) && straddles(1) {
                out.push(SphericalPoint { theta: theta(i) + 0.5 * dt, phi: (j as f64 + 0.5) * dp });
            }
        }
    }
    out.push(SphericalPoint::NORTH);
    out
}

/// Locate and classify the critical points of δ.
pub fn find_equilibria(
    params: &ShapeParams,
    reference: [f64; 3],
    options: &EquilibriumOptions,
) -> Result<EquilibriumReport> {
    let q = V3::from(reference);
    if q.norm() >= 1.0 - params.d() {
        return domain(format!("reference point {reference:?} is not inside the inscribed ball of radius 1 - d"));
    }
    if options.seeds_theta < 2 || options.seeds_phi < 3 {
        return domain("seed grid too small");
    }
    if !(options.tol > 0.0) {
        return domain(format!("tolerance must be positive, got {}", options.tol));
    }
    let seeds = seeds(params, &q, options.seeds_theta, options.seeds_phi);
    let runs: Vec<Option<EquilibriumPoint>> = seeds
        .par_iter()
        .map(|s| {
            newton(params, &q, *s, options.tol).map(|(patch, l)| {
                let (eig, kind, degenerate) = classify(&patch, &l);
                let point =
                    patch.sphere_point_at(patch.coords[0], patch.coords[1]).expect("converged point lies in chart");
                EquilibriumPoint {
                    point,
                    location: [patch.point.x, patch.point.y, patch.point.z],
                    kind,
                    hessian_eigenvalues: eig,
                    residual: l.residual,
                    degenerate,
                }
            })
        })
        .collect();
    let discarded = runs.iter().filter(|r| r.is_none()).count();
    if discarded > 0 {
        warn!("{discarded} of {} equilibrium seeds did not converge", seeds.len());
    }
    let mut found: Vec<EquilibriumPoint> = runs.into_iter().flatten().collect();
    found.sort_by(|a, b| a.point.theta.total_cmp(&b.point.theta).then(a.point.phi.total_cmp(&b.point.phi)));
    let mut kept: Vec<EquilibriumPoint> = Vec::new();
    for e in found {
        match kept.iter_mut().find(|k| k.point.angular_distance(&e.point) < DEDUP_RADIUS) {
            Some(k) => {
                if e.residual < k.residual {
                    *k = e;
                }
            }
            None => kept.push(e),
        }
    }
    let mut ambiguous = 0;
    for i in 0..kept.len() {
        for j in i + 1..kept.len() {
            if kept[i].point.angular_distance(&kept[j].point) < AMBIGUITY_RADIUS {
                ambiguous += 1;
            }
        }
    }
    if ambiguous > 0 {
        warn!("{ambiguous} pairs of distinct equilibria lie within {AMBIGUITY_RADIUS} rad of each other");
    }
    let has = |k: EquilibriumKind| kept.iter().any(|e| e.kind == k);
    if !has(EquilibriumKind::Stable) || !has(EquilibriumKind::Unstable) {
        warn!("no isolated minimum or maximum of the distance was found; the census is incomplete");
    }
    Ok(EquilibriumReport { points: kept, seeds: seeds.len(), discarded_seeds: discarded, ambiguous_pairs: ambiguous })
}
