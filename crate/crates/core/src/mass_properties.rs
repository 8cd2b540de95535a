//! Volume, centroid and first moments of the star body `K_n(c, d)`.
//!
//! In polar form the body is `{λu : 0 ≤ λ ≤ R(u)}`, so with
//! `dV = λ² cos θ dλ dφ dθ`
//!
//! ```text
//! volume = ∫∫ R³/3 cos θ dφ dθ
//! M_i    = ∫∫ R⁴/4 u_i cos θ dφ dθ
//! ```
//!
//! The z-moment `M_xy` expands as `d·H(c, d)` once the `R⁴` term is
//! multiplied out; the odd constant term integrates to zero.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::quadrature::{integrate_sphere, QuadratureSpec};
use crate::radial_family::{eval_rho, eval_rho0, ShapeParams, SphericalPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassProperties {
    pub volume: f64,
    pub centroid: [f64; 3],
    /// First moment about the `(x, y)` plane.
    pub m_xy: f64,
    /// Normalized moment `H(c, d)`; `None` for bodies outside the family.
    pub h: Option<f64>,
}

fn rho_at(params: &ShapeParams, theta: f64, phi: f64) -> f64 {
    eval_rho(params, &SphericalPoint { theta, phi })
}

/// `M_xy(K_n(c, d))`.
pub fn moment_mxy(params: &ShapeParams, spec: &QuadratureSpec) -> Result<f64> {
    let d = params.d();
    integrate_sphere(spec, |t, p| {
        let r = 1.0 + d * rho_at(params, t, p);
        let (s, c) = t.sin_cos();
        0.25 * r.powi(4) * s * c
    })
}

/// `H(c, d)`, the moment `M_xy` with the leading factor `d` removed.
pub fn h_value(params: &ShapeParams, spec: &QuadratureSpec) -> Result<f64> {
    let d = params.d();
    integrate_sphere(spec, |t, p| {
        let rho = rho_at(params, t, p);
        let poly = rho * (1.0 + d * rho * (1.5 + d * rho * (1.0 + 0.25 * d * rho)));
        let (s, c) = t.sin_cos();
        poly * s * c
    })
}

/// `H(1, d) = 4π d²/5 + 4π/3`.
pub fn h_closed_form_c1(d: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return domain(format!("closed form H(1, d) needs 0 <= d <= 1, got {d}"));
    }
    Ok(4.0 * PI * d * d / 5.0 + 4.0 * PI / 3.0)
}

/// `lim_{c→0⁺} H(c, 0)`: the integral of the pointwise limit `ρ₀`.
pub fn h_limit_c0(n: u32, spec: &QuadratureSpec) -> Result<f64> {
    if n < 2 {
        return domain(format!("fold count n must be >= 2, got {n}"));
    }
    integrate_sphere(spec, |t, p| {
        let rho0 = eval_rho0(n, &SphericalPoint { theta: t, phi: p }).unwrap_or(f64::NAN);
        let (s, c) = t.sin_cos();
        rho0 * s * c
    })
}

/// Volume and centroid about the origin, by quadrature of the polar formulas.
///
/// The longitude count is rounded up to a multiple of `2n` so that the
/// sampled grid carries the body's dihedral symmetry and the off-axis
/// moments cancel node by node.
pub fn star_body_mass(params: &ShapeParams, spec: &QuadratureSpec) -> Result<MassProperties> {
    let d = params.d();
    let period = 2 * params.n() as usize;
    let spec = &QuadratureSpec { n_phi: spec.n_phi.div_ceil(period) * period, ..*spec };
    let radius = |t: f64, p: f64| 1.0 + d * rho_at(params, t, p);
    let volume = integrate_sphere(spec, |t, p| radius(t, p).powi(3) / 3.0 * t.cos())?;
    let moment = |axis: usize| {
        integrate_sphere(spec, move |t, p| {
            let u = SphericalPoint { theta: t, phi: p }.unit_vector();
            0.25 * radius(t, p).powi(4) * u[axis] * t.cos()
        })
    };
    let mx = moment(0)?;
    let my = moment(1)?;
    let m_xy = moment(2)?;
    Ok(MassProperties {
        volume,
        centroid: [mx / volume, my / volume, m_xy / volume],
        m_xy,
        h: Some(h_value(params, spec)?),
    })
}
