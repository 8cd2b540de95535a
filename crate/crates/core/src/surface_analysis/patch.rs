//! Second-order local parametrizations of the surface `X(u) = R(u) u`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Vector3;

use crate::radial_family::{chart_jet, jet, Pole, ShapeParams, SphericalPoint, NEAR_POLE_BAND};

pub type V3 = Vector3<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Chart {
    /// Coordinates `(θ, φ)`.
    Spherical,
    /// Coordinates `(x, y)` of the orthogonal projection onto the equatorial
    /// plane, on the hemisphere of the given pole.
    Polar(Pole),
}

/// Position and first/second coordinate derivatives of the embedding.
#[derive(Debug, Clone, Copy)]
pub struct Patch {
    pub chart: Chart,
    /// Chart coordinates of the base point.
    pub coords: [f64; 2],
    pub point: V3,
    pub da: V3,
    pub db: V3,
    pub daa: V3,
    pub dab: V3,
    pub dbb: V3,
}

impl Patch {
    pub fn metric(&self) -> [[f64; 2]; 2] {
        let e = self.da.dot(&self.da);
        let f = self.da.dot(&self.db);
        let g = self.db.dot(&self.db);
        [[e, f], [f, g]]
    }

    /// Outward unit normal (the body is star-shaped about the origin).
    pub fn outward_normal(&self) -> V3 {
        let n = self.da.cross(&self.db).normalize();
        if n.dot(&self.point) < 0.0 {
            -n
        } else {
            n
        }
    }

    /// Point on the unit sphere reached from chart coordinates `(a, b)`.
    pub fn sphere_point_at(&self, a: f64, b: f64) -> Option<SphericalPoint> {
        match self.chart {
            Chart::Spherical => {
                let (st, ct) = a.sin_cos();
                let (sp, cp) = b.sin_cos();
                Some(SphericalPoint::from_direction([ct * cp, ct * sp, st]))
            }
            Chart::Polar(pole) => {
                let r2 = a * a + b * b;
                if r2 >= 1.0 {
                    return None;
                }
                Some(SphericalPoint::from_direction([a, b, pole.sign() * (1.0 - r2).sqrt()]))
            }
        }
    }
}

pub fn spherical_patch(params: &ShapeParams, p: &SphericalPoint) -> Patch {
    let j = jet(params, p);
    let [r_t, r_p, r_tt, r_tp, r_pp] = j.radius_partials(params.d());
    let r = j.radius;
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    let u = V3::new(ct * cp, ct * sp, st);
    let u_t = V3::new(-st * cp, -st * sp, ct);
    let u_p = V3::new(-ct * sp, ct * cp, 0.0);
    let u_tt = -u;
    let u_tp = V3::new(st * sp, -st * cp, 0.0);
    let u_pp = V3::new(-ct * cp, -ct * sp, 0.0);
    Patch {
        chart: Chart::Spherical,
        coords: [p.theta, p.phi],
        point: r * u,
        da: r_t * u + r * u_t,
        db: r_p * u + r * u_p,
        daa: r_tt * u + 2.0 * r_t * u_t + r * u_tt,
        dab: r_tp * u + r_t * u_p + r_p * u_t + r * u_tp,
        dbb: r_pp * u + 2.0 * r_p * u_p + r * u_pp,
    }
}

pub fn polar_patch(params: &ShapeParams, p: &SphericalPoint) -> Patch {
    let cj = chart_jet(params, p);
    let d = params.d();
    let s = cj.hemisphere.sign();
    let (x, y) = (cj.x, cj.y);
    let h = (1.0 - x * x - y * y).sqrt();
    let h3 = h * h * h;
    let u = V3::new(x, y, s * h);
    let u_x = V3::new(1.0, 0.0, -s * x / h);
    let u_y = V3::new(0.0, 1.0, -s * y / h);
    let u_xx = V3::new(0.0, 0.0, -s * (1.0 / h + x * x / h3));
    let u_xy = V3::new(0.0, 0.0, -s * x * y / h3);
    let u_yy = V3::new(0.0, 0.0, -s * (1.0 / h + y * y / h3));
    let r = 1.0 + d * cj.rho;
    let (r_x, r_y) = (d * cj.grad[0], d * cj.grad[1]);
    let (r_xx, r_xy, r_yy) = (d * cj.hess[0][0], d * cj.hess[0][1], d * cj.hess[1][1]);
    Patch {
        chart: Chart::Polar(cj.hemisphere),
        coords: [x, y],
        point: r * u,
        da: r_x * u + r * u_x,
        db: r_y * u + r * u_y,
        daa: r_xx * u + 2.0 * r_x * u_x + r * u_xx,
        dab: r_xy * u + r_x * u_y + r_y * u_x + r * u_xy,
        dbb: r_yy * u + 2.0 * r_y * u_y + r * u_yy,
    }
}

/// Spherical chart away from the poles, projected chart within `polar_band`
/// of either pole.
pub fn patch_with_band(params: &ShapeParams, p: &SphericalPoint, polar_band: f64) -> Patch {
    if p.pole().is_some() || p.theta.abs() > FRAC_PI_2 - polar_band {
        polar_patch(params, p)
    } else {
        spherical_patch(params, p)
    }
}

/// The chart used for curvature: projected only inside the near-pole band.
pub fn patch_at(params: &ShapeParams, p: &SphericalPoint) -> Patch {
    patch_with_band(params, p, NEAR_POLE_BAND)
}

/// Eigenvalues (ascending) of a symmetric 2×2 matrix.
pub fn sym2_eigenvalues(m: [[f64; 2]; 2]) -> [f64; 2] {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let rad = half_diff.hypot(m[0][1]);
    [mean - rad, mean + rad]
}

/// `B` with `B (α, β)ᵀ` the coordinates, in the Gram–Schmidt frame of
/// `(X_a, X_b)`, of the tangent vector `α X_a + β X_b`.
pub fn frame_matrix(patch: &Patch) -> [[f64; 2]; 2] {
    let la = patch.da.norm();
    let e1 = patch.da / la;
    let proj = patch.db.dot(&e1);
    let perp = (patch.db - proj * e1).norm();
    [[la, proj], [0.0, perp]]
}

/// `B⁻ᵀ M B⁻¹` for upper-triangular `B`.
pub fn to_orthonormal_frame(m: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let inv = [[1.0 / b[0][0], -b[0][1] / (b[0][0] * b[1][1])], [0.0, 1.0 / b[1][1]]];
    let mut tmp = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            tmp[i][j] = (0..2).map(|k| m[i][k] * inv[k][j]).sum();
        }
    }
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (0..2).map(|k| inv[k][i] * tmp[k][j]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_agree_on_position_and_tangent_plane() {
        let params = ShapeParams::new(3, 0.3, 0.2).unwrap();
        let p = SphericalPoint::new(1.2, 0.7).unwrap();
        let a = spherical_patch(&params, &p);
        let b = polar_patch(&params, &p);
        assert!((a.point - b.point).norm() < 1e-14);
        let na = a.outward_normal();
        let nb = b.outward_normal();
        assert!((na - nb).norm() < 1e-12, "{na} {nb}");
    }

    #[test]
    fn sphere_point_round_trip() {
        let params = ShapeParams::new(3, 0.3, 0.2).unwrap();
        for p in [SphericalPoint::new(1.4, 2.0).unwrap(), SphericalPoint::new(-1.3, 5.0).unwrap()] {
            let pp = polar_patch(&params, &p);
            let q = pp.sphere_point_at(pp.coords[0], pp.coords[1]).unwrap();
            assert!(p.angular_distance(&q) < 1e-14);
            let sp = spherical_patch(&params, &p);
            let q = sp.sphere_point_at(sp.coords[0], sp.coords[1]).unwrap();
            assert!(p.angular_distance(&q) < 1e-14);
        }
    }

    #[test]
    fn eigen_and_frame_helpers() {
        let e = sym2_eigenvalues([[2.0, 1.0], [1.0, 2.0]]);
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] - 3.0).abs() < 1e-15);
        let b = [[2.0, 1.0], [0.0, 3.0]];
        // B^T B recovers the metric; identity in the frame
        let metric = [[4.0, 2.0], [2.0, 10.0]];
        let id = to_orthonormal_frame(metric, b);
        assert!((id[0][0] - 1.0).abs() < 1e-15 && id[0][1].abs() < 1e-15 && (id[1][1] - 1.0).abs() < 1e-15);
    }
}
