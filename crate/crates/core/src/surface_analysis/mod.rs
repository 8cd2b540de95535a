//! Curvature, equilibria and symmetry checks for the smooth surface
//! `S(c, d) = {R(u) u : u ∈ S²}`.

mod equilibria;
pub mod patch;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::radial_family::{eval_radius, ShapeParams, SphericalPoint};

pub use equilibria::{
    census, find_equilibria, EquilibriumCensus, EquilibriumKind, EquilibriumOptions, EquilibriumPoint,
    EquilibriumReport,
};
use patch::{frame_matrix, patch_at, sym2_eigenvalues, to_orthonormal_frame, Patch};

/// Smallest sweep accepted by [`curvature_field`].
pub const MIN_GRID: (usize, usize) = (64, 128);

const REFINE_LEVELS: usize = 3;
const REFINE_ZOOM: f64 = 4.0;
const REFINE_SAMPLES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub point: SphericalPoint,
    /// Smaller principal curvature.
    pub kappa1: f64,
    pub kappa2: f64,
    pub gaussian: f64,
    pub mean: f64,
}

/// A `θ × φ` sampling grid. Latitudes are cell midpoints; both poles are
/// always added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { n_theta: MIN_GRID.0, n_phi: MIN_GRID.1 }
    }
}

impl Grid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        Self { n_theta, n_phi }
    }

    pub fn doubled(&self) -> Self {
        Self { n_theta: 2 * self.n_theta, n_phi: 2 * self.n_phi }
    }

    pub fn theta_step(&self) -> f64 {
        PI / self.n_theta as f64
    }

    pub fn phi_step(&self) -> f64 {
        TAU / self.n_phi as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        -FRAC_PI_2 + (i as f64 + 0.5) * self.theta_step()
    }

    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * self.phi_step()
    }

    /// Grid nodes row by row, followed by the south and north poles.
    pub fn points(&self) -> Vec<SphericalPoint> {
        let mut pts = Vec::with_capacity(self.n_theta * self.n_phi + 2);
        for i in 0..self.n_theta {
            for j in 0..self.n_phi {
                pts.push(SphericalPoint { theta: self.theta(i), phi: self.phi(j) });
            }
        }
        pts.push(SphericalPoint::SOUTH);
        pts.push(SphericalPoint::NORTH);
        pts
    }
}

/// Principal curvatures from the fundamental forms of a patch. Positive
/// values mean the surface bends towards the interior.
pub fn curvature_from_patch(patch: &Patch) -> Result<[f64; 2]> {
    let [[e, f], [_, g]] = patch.metric();
    let det = e * g - f * f;
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::Numerical(format!("degenerate first fundamental form (det = {det:e})")));
    }
    let inward = -patch.outward_normal();
    let l = patch.daa.dot(&inward);
    let m = patch.dab.dot(&inward);
    let nn = patch.dbb.dot(&inward);
    // shape operator in an orthonormal frame; avoids the H² − K cancellation at umbilics
    Ok(sym2_eigenvalues(to_orthonormal_frame([[l, m], [m, nn]], frame_matrix(patch))))
}

pub fn curvature_at(params: &ShapeParams, p: &SphericalPoint) -> Result<CurvatureSample> {
    let [k1, k2] = curvature_from_patch(&patch_at(params, p))?;
    Ok(CurvatureSample { point: *p, kappa1: k1, kappa2: k2, gaussian: k1 * k2, mean: 0.5 * (k1 + k2) })
}

/// Extremes of a curvature sweep. `min_principal` and `min_gaussian` are
/// refined locally; the maxima are grid values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSummary {
    pub grid: Grid,
    pub min_principal: CurvatureSample,
    pub max_principal: CurvatureSample,
    pub min_gaussian: CurvatureSample,
    pub max_gaussian: CurvatureSample,
    pub north: CurvatureSample,
    pub south: CurvatureSample,
}

impl CurvatureSummary {
    pub fn is_convex(&self) -> bool {
        self.min_principal.kappa1 > 0.0
    }
}

fn pick(samples: &[CurvatureSample], key: impl Fn(&CurvatureSample) -> f64, want_min: bool) -> CurvatureSample {
    // first occurrence wins on ties, so the result does not depend on scheduling
    let mut best = samples[0];
    for s in &samples[1..] {
        let better = if want_min { key(s) < key(&best) } else { key(s) > key(&best) };
        if better {
            best = *s;
        }
    }
    best
}

fn refine_min(
    params: &ShapeParams,
    start: CurvatureSample,
    grid: &Grid,
    key: impl Fn(&CurvatureSample) -> f64 + Sync,
) -> Result<CurvatureSample> {
    let mut best = start;
    let mut half_t = grid.theta_step();
    let mut half_p = grid.phi_step();
    for _ in 0..REFINE_LEVELS {
        let center = best.point;
        let k = REFINE_SAMPLES;
        let candidates: Vec<CurvatureSample> = (0..k * k)
            .into_par_iter()
            .map(|idx| {
                let s = (idx / k) as f64 / (k - 1) as f64 * 2.0 - 1.0;
                let t = (idx % k) as f64 / (k - 1) as f64 * 2.0 - 1.0;
                let theta = (center.theta + s * half_t).clamp(-FRAC_PI_2, FRAC_PI_2);
                let phi = (center.phi + t * half_p).rem_euclid(TAU);
                curvature_at(params, &SphericalPoint { theta, phi })
            })
            .collect::<Result<_>>()?;
        let local = pick(&candidates, &key, true);
        if key(&local) < key(&best) {
            best = local;
        }
        half_t /= REFINE_ZOOM;
        half_p /= REFINE_ZOOM;
    }
    Ok(best)
}

/// Sweep of principal and Gaussian curvature over `grid` plus both poles,
/// with three 4× zoom refinements around each minimum.
pub fn curvature_field(params: &ShapeParams, grid: &Grid) -> Result<CurvatureSummary> {
    if grid.n_theta < MIN_GRID.0 || grid.n_phi < MIN_GRID.1 {
        return domain(format!(
            "curvature grid must be at least {}x{}, got {}x{}",
            MIN_GRID.0, MIN_GRID.1, grid.n_theta, grid.n_phi
        ));
    }
    let samples: Vec<CurvatureSample> =
        grid.points().par_iter().map(|p| curvature_at(params, p)).collect::<Result<_>>()?;
    let min_principal = pick(&samples, |s| s.kappa1, true);
    let min_gaussian = pick(&samples, |s| s.gaussian, true);
    let len = samples.len();
    Ok(CurvatureSummary {
        grid: *grid,
        min_principal: refine_min(params, min_principal, grid, |s| s.kappa1)?,
        max_principal: pick(&samples, |s| s.kappa2, false),
        min_gaussian: refine_min(params, min_gaussian, grid, |s| s.gaussian)?,
        max_gaussian: pick(&samples, |s| s.gaussian, false),
        south: samples[len - 2],
        north: samples[len - 1],
    })
}

/// An isometry of the sphere acting on longitude only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LongitudeAction {
    /// `φ ↦ φ + angle`
    Rotation(f64),
    /// `φ ↦ angle − φ`
    Reflection(f64),
}

impl LongitudeAction {
    pub fn apply(&self, p: &SphericalPoint) -> SphericalPoint {
        let phi = match *self {
            Self::Rotation(a) => p.phi + a,
            Self::Reflection(a) => a - p.phi,
        };
        SphericalPoint { theta: p.theta, phi: phi.rem_euclid(TAU) }
    }
}

/// The `2n` elements of the dihedral group `D_n` acting on longitude.
pub fn dihedral_actions(n: u32) -> Vec<LongitudeAction> {
    let step = TAU / n as f64;
    (0..n)
        .map(|k| LongitudeAction::Rotation(k as f64 * step))
        .chain((0..n).map(|k| LongitudeAction::Reflection(k as f64 * step)))
        .collect()
}

/// Deterministic spherical Fibonacci points, uniform in area.
pub fn fibonacci_points(count: usize) -> Vec<SphericalPoint> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let phi = TAU * (i as f64 * golden).fract();
            SphericalPoint { theta: z.asin(), phi }
        })
        .collect()
}

/// `max |R(g·u) − R(u)|` over `actions` and a low-discrepancy sample.
pub fn deviation_under(params: &ShapeParams, sample_count: usize, actions: &[LongitudeAction]) -> Result<f64> {
    if sample_count < 100 {
        return domain(format!("symmetry check needs at least 100 samples, got {sample_count}"));
    }
    let pts = fibonacci_points(sample_count);
    Ok(pts
        .par_iter()
        .map(|p| {
            let r = eval_radius(params, p);
            actions.iter().map(|a| (eval_radius(params, &a.apply(p)) - r).abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

/// Largest deviation of `R` under the dihedral group `D_n`.
pub fn symmetry_deviation(params: &ShapeParams, sample_count: usize) -> Result<f64> {
    deviation_under(params, sample_count, &dihedral_actions(params.n()))
}

/// `sup |R − 1|` over the grid nodes and both poles; an upper bound for the
/// Hausdorff distance to the unit ball up to grid resolution.
pub fn ball_distance_bound(params: &ShapeParams, grid: &Grid) -> f64 {
    grid.points().par_iter().map(|p| (eval_radius(params, p) - 1.0).abs()).reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_family::eval_radius;
    use patch::V3;

    fn params(n: u32, c: f64, d: f64) -> ShapeParams {
        ShapeParams::new(n, c, d).unwrap()
    }

    fn sp(theta: f64, phi: f64) -> SphericalPoint {
        SphericalPoint::new(theta, phi).unwrap()
    }

    fn embed(params: &ShapeParams, theta: f64, phi: f64) -> V3 {
        let p = SphericalPoint { theta, phi };
        let u = p.unit_vector();
        eval_radius(params, &p) * V3::new(u[0], u[1], u[2])
    }

    /// Principal curvatures from fourth-order differences of the embedding.
    fn fd_curvatures(params: &ShapeParams, theta: f64, phi: f64, h: f64) -> [f64; 2] {
        let x = |a: f64, b: f64| embed(params, theta + a, phi + b);
        let c4 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let offs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let mut xa = V3::zeros();
        let mut xb = V3::zeros();
        for k in 0..5 {
            xa += c4[k] * x(offs[k] * h, 0.0) / h;
            xb += c4[k] * x(0.0, offs[k] * h) / h;
        }
        let s4 = [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0];
        let mut xaa = V3::zeros();
        let mut xbb = V3::zeros();
        let mut xab = V3::zeros();
        for k in 0..5 {
            xaa += s4[k] * x(offs[k] * h, 0.0) / (h * h);
            xbb += s4[k] * x(0.0, offs[k] * h) / (h * h);
            for l in 0..5 {
                xab += c4[k] * c4[l] * x(offs[k] * h, offs[l] * h) / (h * h);
            }
        }
        let patch = Patch {
            chart: patch::Chart::Spherical,
            coords: [theta, phi],
            point: x(0.0, 0.0),
            da: xa,
            db: xb,
            daa: xaa,
            dab: xab,
            dbb: xbb,
        };
        curvature_from_patch(&patch).unwrap()
    }

    #[test]
    fn unit_sphere_curvature_is_one_everywhere() {
        let p = params(3, 1.0, 0.0);
        for q in [sp(0.3, 1.0), SphericalPoint::NORTH, SphericalPoint::SOUTH, sp(FRAC_PI_2 - 1e-6, 2.0)] {
            let s = curvature_at(&p, &q).unwrap();
            assert!((s.kappa1 - 1.0).abs() < 1e-9 && (s.kappa2 - 1.0).abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn sample_identities() {
        let s = curvature_at(&params(3, 0.2, 0.1), &sp(-0.4, 2.2)).unwrap();
        assert_eq!(s.gaussian, s.kappa1 * s.kappa2);
        assert_eq!(s.mean, 0.5 * (s.kappa1 + s.kappa2));
        assert!(s.kappa1 <= s.kappa2);
    }

    #[test]
    fn poles_are_umbilic() {
        let p = params(3, 1.0, 0.2);
        for q in [SphericalPoint::NORTH, SphericalPoint::SOUTH] {
            let s = curvature_at(&p, &q).unwrap();
            assert!((s.kappa1 - s.kappa2).abs() < 1e-12);
        }
        let n = curvature_at(&p, &SphericalPoint::NORTH).unwrap();
        assert!((n.kappa1 - 1.4 / 1.44).abs() < 1e-12, "{}", n.kappa1);
        let s = curvature_at(&p, &SphericalPoint::SOUTH).unwrap();
        assert!((s.kappa1 - 0.6 / 0.64).abs() < 1e-12, "{}", s.kappa1);
    }

    #[test]
    fn curvature_matches_finite_differences() {
        let p = params(3, 0.056, 0.001);
        for &(t, f) in &[(0.31, 0.77), (-0.9, 2.5), (1.1, 4.0), (-1.3, 0.2)] {
            let s = curvature_at(&p, &sp(t, f)).unwrap();
            let fd = fd_curvatures(&p, t, f, 1e-3);
            assert!((s.kappa1 - fd[0]).abs() < 1e-4 && (s.kappa2 - fd[1]).abs() < 1e-4, "{s:?} vs {fd:?}");
        }
    }

    #[test]
    fn chart_switch_is_continuous() {
        let p = params(2, 0.3, 0.1);
        let inside = curvature_at(&p, &sp(FRAC_PI_2 - 0.9e-4, 1.0)).unwrap();
        let outside = curvature_at(&p, &sp(FRAC_PI_2 - 1.1e-4, 1.0)).unwrap();
        assert!((inside.kappa1 - outside.kappa1).abs() < 1e-5);
        assert!((inside.kappa2 - outside.kappa2).abs() < 1e-5);
    }

    #[test]
    fn field_on_sphere_and_small_grid_rejected() {
        let s = curvature_field(&params(3, 1.0, 0.0), &Grid::default()).unwrap();
        assert!((s.min_principal.kappa1 - 1.0).abs() < 1e-9);
        assert!((s.max_principal.kappa2 - 1.0).abs() < 1e-9);
        assert!(s.is_convex());
        assert!(curvature_field(&params(3, 1.0, 0.0), &Grid::new(32, 64)).is_err());
    }

    #[test]
    fn field_detects_convexity_threshold() {
        let below = curvature_field(&params(3, 0.056, 0.0005), &Grid::default()).unwrap();
        assert!(below.is_convex(), "{:?}", below.min_principal);
        let above = curvature_field(&params(3, 0.056, 0.01), &Grid::default()).unwrap();
        assert!(!above.is_convex());
    }

    #[test]
    fn symmetry_and_negative_control() {
        let p = params(3, 0.1, 0.001);
        assert!(symmetry_deviation(&p, 500).unwrap() <= 1e-12);
        assert_eq!(symmetry_deviation(&params(4, 1.0, 0.4), 500).unwrap(), 0.0);
        let off = deviation_under(&p, 500, &[LongitudeAction::Rotation(PI / 3.0)]).unwrap();
        assert!(off > 1e-6, "{off}");
        assert!(symmetry_deviation(&p, 10).is_err());
    }

    #[test]
    fn ball_bound() {
        assert!((ball_distance_bound(&params(3, 1.0, 0.3), &Grid::default()) - 0.3).abs() < 1e-15);
        assert_eq!(ball_distance_bound(&params(3, 0.4, 0.0), &Grid::default()), 0.0);
        assert!(ball_distance_bound(&params(5, 0.1, 0.2), &Grid::default()) <= 0.2);
    }
}
