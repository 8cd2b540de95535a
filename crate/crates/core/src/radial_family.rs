//! The radial function family `R = 1 + d·ρ_c` on the unit sphere.
//!
//! The construction chain is
//!
//! ```text
//! F_c(x)          a monotone bijection of [0, 1] with unit slope at both ends
//! f_c(θ), g_c(θ)  its linear image on [-π/2, π/2] and the odd reflection of that
//! a_c(θ, φ)       an n-fold blending weight between the two meridian profiles
//! ρ_c(θ, φ)       a_c·sin f_c + (1 - a_c)·sin g_c
//! ```
//!
//! Every quantity comes with hand-derived first and second partials. The
//! latitude `θ` runs over `[-π/2, π/2]`; at the poles the spherical chart is
//! singular and values are defined by their limits, with the second
//! derivatives carried separately in the projected `(x, y)` chart.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{domain, Result};

/// Distance from `±π/2` below which a latitude is treated as a pole.
pub const POLE_EPS: f64 = 1e-9;

/// Width of the band around each pole in which spherical partials lose
/// accuracy and consumers should work in the projected chart instead.
pub const NEAR_POLE_BAND: f64 = 1e-4;

/// One member `K_n(c, d)` of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeParams {
    n: u32,
    c: f64,
    d: f64,
}

impl ShapeParams {
    pub fn new(n: u32, c: f64, d: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("fold count n must be >= 2, got {n}"));
        }
        check_c(c)?;
        if !(0.0..1.0).contains(&d) {
            return domain(format!("amplitude d must lie in [0, 1), got {d}"));
        }
        Ok(Self { n, c, d })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.n, c, self.d)
    }

    pub fn with_d(&self, d: f64) -> Result<Self> {
        Self::new(self.n, self.c, d)
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return domain(format!("shape parameter c must lie in (0, 1], got {c}"));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(-FRAC_PI_2..=FRAC_PI_2).contains(&theta) {
        return domain(format!("latitude theta must lie in [-pi/2, pi/2], got {theta}"));
    }
    Ok(())
}

/// A point of the unit sphere in latitude/longitude form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalPoint {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    /// Validates the latitude and reduces the longitude into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_theta(theta)?;
        if !phi.is_finite() {
            return domain(format!("longitude phi must be finite, got {phi}"));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub const NORTH: Self = Self { theta: FRAC_PI_2, phi: 0.0 };
    pub const SOUTH: Self = Self { theta: -FRAC_PI_2, phi: 0.0 };

    pub fn pole(&self) -> Option<Pole> {
        if (self.theta - FRAC_PI_2).abs() < POLE_EPS {
            Some(Pole::North)
        } else if (self.theta + FRAC_PI_2).abs() < POLE_EPS {
            Some(Pole::South)
        } else {
            None
        }
    }

    pub fn is_near_pole(&self) -> bool {
        self.theta.abs() > FRAC_PI_2 - NEAR_POLE_BAND
    }

    /// Unit vector `(cos θ cos φ, cos θ sin φ, sin θ)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [ct * cp, ct * sp, st]
    }

    /// Inverse of [`unit_vector`](Self::unit_vector) for a (not necessarily
    /// normalized) nonzero direction.
    pub fn from_direction(v: [f64; 3]) -> Self {
        let horiz = v[0].hypot(v[1]);
        let theta = v[2].atan2(horiz);
        let phi = if horiz == 0.0 { 0.0 } else { v[1].atan2(v[0]).rem_euclid(TAU) };
        Self { theta, phi: if phi >= TAU { 0.0 } else { phi } }
    }

    /// Great-circle distance to `other`.
    pub fn angular_distance(&self, other: &Self) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        sin.atan2(cos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pole {
    North,
    South,
}

impl Pole {
    /// `+1` for the north pole, `-1` for the south pole.
    pub fn sign(self) -> f64 {
        match self {
            Pole::North => 1.0,
            Pole::South => -1.0,
        }
    }

    /// Second derivatives of `ρ_c` in the projected `(x, y)` chart at the pole.
    pub fn chart_second(self) -> [[f64; 2]; 2] {
        let s = -self.sign();
        [[s, 0.0], [0.0, s]]
    }
}

/// `F_c`, its complement `1 - F_c` (computed without cancellation) and the
/// first two derivatives.
#[derive(Debug, Clone, Copy)]
struct ProfileJet {
    value: f64,
    complement: f64,
    d1: f64,
    d2: f64,
}

fn profile(c: f64, x: f64) -> ProfileJet {
    if c == 1.0 {
        return ProfileJet { value: x, complement: 1.0 - x, d1: 1.0, d2: 0.0 };
    }
    let cx = c + x;
    let q = c * x / cx;
    let q1 = c * c / (cx * cx);
    let q2 = -2.0 * c * c / (cx * cx * cx);
    let one_minus_x = 1.0 - x;
    let p = (1.0 - c) * one_minus_x * one_minus_x;
    let p1 = -2.0 * (1.0 - c) * one_minus_x;
    let p2 = 2.0 * (1.0 - c);

    let num = c * x * x + p * q;
    let num1 = 2.0 * c * x + p1 * q + p * q1;
    let num2 = 2.0 * c + p2 * q + 2.0 * p1 * q1 + p * q2;
    let den = c * x + p;
    let den1 = c + p1;
    let den2 = p2;

    let value = num / den;
    // den - num = c x (1 - x) + p (1 - q), and 1 - q = (c + x (1 - c)) / (c + x)
    let complement = (c * x * one_minus_x + p * (c + x * (1.0 - c)) / cx) / den;
    let d1 = (num1 - value * den1) / den;
    let d2 = (num2 - 2.0 * d1 * den1 - value * den2) / den;
    ProfileJet { value, complement, d1, d2 }
}

/// `F_c(x)`, the monotone profile on `[0, 1]`.
pub fn eval_big_f(c: f64, x: f64) -> Result<f64> {
    check_c(c)?;
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("F_c argument must lie in [0, 1], got {x}"));
    }
    Ok(profile(c, x).value)
}

/// `f_c(θ) = π F_c(θ/π + 1/2) - π/2`.
pub fn eval_f(c: f64, theta: f64) -> Result<f64> {
    check_c(c)?;
    check_theta(theta)?;
    Ok(AngularProfiles::new(c, theta).f)
}

/// `g_c(θ) = -f_c(-θ)`.
pub fn eval_g(c: f64, theta: f64) -> Result<f64> {
    check_c(c)?;
    check_theta(theta)?;
    Ok(AngularProfiles::new(c, theta).g)
}

/// `f_c`, `g_c` and derived trigonometric quantities at one latitude.
#[derive(Debug, Clone, Copy)]
struct AngularProfiles {
    f: f64,
    f1: f64,
    f2: f64,
    g: f64,
    g1: f64,
    g2: f64,
    sin_f: f64,
    cos_f: f64,
    sin_g: f64,
    cos_g: f64,
    /// `sin f - sin g`, evaluated in product form.
    diff: f64,
}

impl AngularProfiles {
    fn new(c: f64, theta: f64) -> Self {
        let fwd = profile(c, theta / PI + 0.5);
        let mir = profile(c, 0.5 - theta / PI);

        // π/2 - f = π(1 - F(x)), f + π/2 = π F(x);
        // π/2 - g = π F(1 - x),  g + π/2 = π(1 - F(1 - x)).
        let f = if fwd.value <= 0.5 { PI * fwd.value - FRAC_PI_2 } else { FRAC_PI_2 - PI * fwd.complement };
        let g = if mir.value <= 0.5 { FRAC_PI_2 - PI * mir.value } else { PI * mir.complement - FRAC_PI_2 };
        let cos_f = (PI * fwd.value.min(fwd.complement)).sin();
        let cos_g = (PI * mir.value.min(mir.complement)).sin();
        let sin_f = if fwd.value <= 0.5 { -(PI * fwd.value).cos() } else { (PI * fwd.complement).cos() };
        let sin_g = if mir.value <= 0.5 { (PI * mir.value).cos() } else { -(PI * mir.complement).cos() };

        let diff = if theta >= 0.0 {
            let a = PI * fwd.complement;
            let b = PI * mir.value;
            -2.0 * (0.5 * (a + b)).sin() * (0.5 * (a - b)).sin()
        } else {
            let a = PI * fwd.value;
            let b = PI * mir.complement;
            -2.0 * (0.5 * (a + b)).sin() * (0.5 * (b - a)).sin()
        };

        Self { f, f1: fwd.d1, f2: fwd.d2 / PI, g, g1: mir.d1, g2: -mir.d2 / PI, sin_f, cos_f, sin_g, cos_g, diff }
    }
}

/// `ρ_c(u)`; exact `±1` at the poles and exact `sin θ` for `c = 1`.
pub fn eval_rho(params: &ShapeParams, p: &SphericalPoint) -> f64 {
    if let Some(pole) = p.pole() {
        return pole.sign();
    }
    if params.c == 1.0 {
        return p.theta.sin();
    }
    let ang = AngularProfiles::new(params.c, p.theta);
    let half = 0.5 * params.n as f64 * p.phi;
    let (sh, ch) = half.sin_cos();
    let w = ch * ch;
    let wc = sh * sh;
    let pp = ang.cos_f * ang.cos_f;
    let qq = ang.cos_g * ang.cos_g;
    let a = w * pp / (w * pp + wc * qq);
    a * ang.diff + ang.sin_g
}

/// `R_{c,d}(u) = 1 + d ρ_c(u)`.
pub fn eval_radius(params: &ShapeParams, p: &SphericalPoint) -> f64 {
    1.0 + params.d * eval_rho(params, p)
}

/// Pointwise `c → 0⁺` limit of `ρ_c`, defined off the poles.
pub fn eval_rho0(n: u32, p: &SphericalPoint) -> Result<f64> {
    if n < 2 {
        return domain(format!("fold count n must be >= 2, got {n}"));
    }
    if p.pole().is_some() {
        return domain("the c -> 0 limit of rho is only defined for -pi/2 < theta < pi/2");
    }
    let half = 0.5 * n as f64 * p.phi;
    let (sh, ch) = half.sin_cos();
    let up = (FRAC_PI_2 + p.theta).powi(4) * ch * ch;
    let down = (FRAC_PI_2 - p.theta).powi(4) * sh * sh;
    Ok((down - up) / (up + down))
}

/// Value and partials of `ρ_c` in the `(θ, φ)` chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceJet {
    pub rho: f64,
    pub rho_theta: f64,
    pub rho_phi: f64,
    pub rho_tt: f64,
    pub rho_tp: f64,
    pub rho_pp: f64,
    /// `R = 1 + d ρ`.
    pub radius: f64,
    pub is_pole: bool,
    /// Inside the near-pole band where the spherical partials are ill-conditioned.
    pub near_pole: bool,
    /// Second derivatives in the projected `(x, y)` chart; only set at a pole.
    pub pole_chart_second: Option<[[f64; 2]; 2]>,
}

impl SurfaceJet {
    /// Partials of `R`, in the order `(θ, φ, θθ, θφ, φφ)`.
    pub fn radius_partials(&self, d: f64) -> [f64; 5] {
        [d * self.rho_theta, d * self.rho_phi, d * self.rho_tt, d * self.rho_tp, d * self.rho_pp]
    }
}

pub fn jet(params: &ShapeParams, p: &SphericalPoint) -> SurfaceJet {
    let d = params.d;
    if let Some(pole) = p.pole() {
        let s = pole.sign();
        return SurfaceJet {
            rho: s,
            rho_theta: 0.0,
            rho_phi: 0.0,
            rho_tt: -s,
            rho_tp: 0.0,
            rho_pp: 0.0,
            radius: 1.0 + d * s,
            is_pole: true,
            near_pole: true,
            pole_chart_second: Some(pole.chart_second()),
        };
    }
    let near_pole = p.is_near_pole();
    if params.c == 1.0 {
        let (st, ct) = p.theta.sin_cos();
        return SurfaceJet {
            rho: st,
            rho_theta: ct,
            rho_phi: 0.0,
            rho_tt: -st,
            rho_tp: 0.0,
            rho_pp: 0.0,
            radius: 1.0 + d * st,
            is_pole: false,
            near_pole,
            pole_chart_second: None,
        };
    }

    let ang = AngularProfiles::new(params.c, p.theta);
    let nf = params.n as f64;
    let half = 0.5 * nf * p.phi;
    let (sh, ch) = half.sin_cos();
    let (snp, cnp) = (nf * p.phi).sin_cos();
    // w(φ) = cos²(nφ/2) and its derivatives
    let w = ch * ch;
    let wc = sh * sh;
    let w1 = -0.5 * nf * snp;
    let w2 = -0.5 * nf * nf * cnp;

    // p(θ) = cos² f, q(θ) = cos² g
    let (sf, cf, f1, f2) = (ang.sin_f, ang.cos_f, ang.f1, ang.f2);
    let (sg, cg, g1, g2) = (ang.sin_g, ang.cos_g, ang.g1, ang.g2);
    let pp = cf * cf;
    let pp1 = -2.0 * sf * cf * f1;
    let pp2 = -2.0 * (cf * cf - sf * sf) * f1 * f1 - 2.0 * sf * cf * f2;
    let qq = cg * cg;
    let qq1 = -2.0 * sg * cg * g1;
    let qq2 = -2.0 * (cg * cg - sg * sg) * g1 * g1 - 2.0 * sg * cg * g2;

    // a = w p / (w p + (1 - w) q)
    let e = w * pp + wc * qq;
    let e2 = e * e;
    let e3 = e2 * e;
    let a = w * pp / e;
    let a_w = pp * qq / e2;
    let a_p = w * wc * qq / e2;
    let a_q = -w * wc * pp / e2;
    let a_ww = -2.0 * pp * qq * (pp - qq) / e3;
    let a_pp = -2.0 * w * w * wc * qq / e3;
    let a_qq = 2.0 * w * wc * wc * pp / e3;
    let a_pq = w * wc * (w * pp - wc * qq) / e3;
    let a_wp = qq * (wc * qq - w * pp) / e3;
    let a_wq = pp * (w * pp - wc * qq) / e3;

    let a_t = a_p * pp1 + a_q * qq1;
    let a_f = a_w * w1;
    let a_tt = a_pp * pp1 * pp1 + 2.0 * a_pq * pp1 * qq1 + a_qq * qq1 * qq1 + a_p * pp2 + a_q * qq2;
    let a_tf = (a_wp * pp1 + a_wq * qq1) * w1;
    let a_ff = a_ww * w1 * w1 + a_w * w2;

    // ρ = a Δ + sin g with Δ = sin f - sin g
    let diff = ang.diff;
    let diff1 = cf * f1 - cg * g1;
    let diff2 = -sf * f1 * f1 + cf * f2 + sg * g1 * g1 - cg * g2;
    let sin_g1 = cg * g1;
    let sin_g2 = -sg * g1 * g1 + cg * g2;

    let rho = a * diff + sg;
    SurfaceJet {
        rho,
        rho_theta: a_t * diff + a * diff1 + sin_g1,
        rho_phi: a_f * diff,
        rho_tt: a_tt * diff + 2.0 * a_t * diff1 + a * diff2 + sin_g2,
        rho_tp: a_tf * diff + a_f * diff1,
        rho_pp: a_ff * diff,
        radius: 1.0 + d * rho,
        is_pole: false,
        near_pole,
        pole_chart_second: None,
    }
}

/// `ρ_c` expressed in the projected chart `(x, y) = (cos θ cos φ, cos θ sin φ)`
/// of the hemisphere containing the point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartJet {
    pub hemisphere: Pole,
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

pub fn chart_jet(params: &ShapeParams, p: &SphericalPoint) -> ChartJet {
    if let Some(pole) = p.pole() {
        return ChartJet {
            hemisphere: pole,
            x: 0.0,
            y: 0.0,
            rho: pole.sign(),
            grad: [0.0, 0.0],
            hess: pole.chart_second(),
        };
    }
    let j = jet(params, p);
    let hemisphere = if p.theta >= 0.0 { Pole::North } else { Pole::South };
    let (st, r) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();

    // θ as a function of r = cos θ on either hemisphere
    let t_r = -1.0 / st;
    let t_rr = -r / (st * st * st);
    let (r_x, r_y) = (cp, sp);
    let (r_xx, r_xy, r_yy) = (sp * sp / r, -cp * sp / r, cp * cp / r);
    let r2 = r * r;
    let (f_x, f_y) = (-sp / r, cp / r);
    let (f_xx, f_xy, f_yy) = (2.0 * cp * sp / r2, (sp * sp - cp * cp) / r2, -2.0 * cp * sp / r2);
    let (t_x, t_y) = (t_r * r_x, t_r * r_y);
    let t_xx = t_rr * r_x * r_x + t_r * r_xx;
    let t_xy = t_rr * r_x * r_y + t_r * r_xy;
    let t_yy = t_rr * r_y * r_y + t_r * r_yy;

    let second = |ta: f64, fa: f64, tb: f64, fb: f64, tab: f64, fab: f64| {
        j.rho_tt * ta * tb + j.rho_tp * (ta * fb + tb * fa) + j.rho_pp * fa * fb + j.rho_theta * tab + j.rho_phi * fab
    };
    let xx = second(t_x, f_x, t_x, f_x, t_xx, f_xx);
    let xy = second(t_x, f_x, t_y, f_y, t_xy, f_xy);
    let yy = second(t_y, f_y, t_y, f_y, t_yy, f_yy);
    ChartJet {
        hemisphere,
        x: r * cp,
        y: r * sp,
        rho: j.rho,
        grad: [j.rho_theta * t_x + j.rho_phi * f_x, j.rho_theta * t_y + j.rho_phi * f_y],
        hess: [[xx, xy], [xy, yy]],
    }
}
