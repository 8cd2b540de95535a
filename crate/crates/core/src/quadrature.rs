//! Tensor-product quadrature on the `(θ, φ)` rectangle `[-π/2, π/2] × [0, 2π)`.
//!
//! Latitude uses Gauss–Legendre, either directly in `θ` or in `s = sin θ`
//! (which absorbs the `cos θ` area factor so that polynomial moments in
//! `sin θ` are integrated exactly). Longitude uses the periodic trapezoid
//! rule, optionally folded onto one mirror sector for `D_n`-symmetric
//! integrands. Rows may be evaluated in parallel; the reduction order is
//! fixed, so results do not depend on the number of worker threads.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Per-axis node budget for [`converged_integrate`].
pub const MAX_NODES: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LatitudeRule {
    /// Gauss–Legendre in `θ`.
    GaussLegendreTheta,
    /// Gauss–Legendre in `s = sin θ`; node weights carry `1 / cos θ`.
    GaussLegendreSinTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    pub rule: LatitudeRule,
    /// Fold the longitude rule onto `[0, π/n]` for integrands invariant
    /// under the dihedral group `D_n`. Requires `n_phi` to be a multiple of `2n`.
    pub symmetry_fold: Option<u32>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { n_theta: 128, n_phi: 256, rule: LatitudeRule::GaussLegendreSinTheta, symmetry_fold: None }
    }
}

impl QuadratureSpec {
    pub fn new(n_theta: usize, n_phi: usize, rule: LatitudeRule) -> Result<Self> {
        let spec = Self { n_theta, n_phi, rule, symmetry_fold: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_fold(mut self, n: u32) -> Result<Self> {
        self.symmetry_fold = Some(n);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 8 || self.n_phi < 8 {
            return domain(format!("quadrature needs at least 8 nodes per axis, got {}x{}", self.n_theta, self.n_phi));
        }
        if let Some(n) = self.symmetry_fold {
            if n < 1 || self.n_phi % (2 * n as usize) != 0 {
                return domain(format!(
                    "symmetry folding with n={n} needs n_phi divisible by {}, got {}",
                    2 * n,
                    self.n_phi
                ));
            }
        }
        Ok(())
    }

    /// Same rule with both node counts doubled.
    pub fn doubled(&self) -> Self {
        Self { n_theta: 2 * self.n_theta, n_phi: 2 * self.n_phi, ..*self }
    }

    fn latitude_nodes(&self) -> Vec<(f64, f64)> {
        let (x, w) = gauss_legendre(self.n_theta);
        match self.rule {
            LatitudeRule::GaussLegendreTheta => {
                x.iter().zip(&w).map(|(&x, &w)| (FRAC_PI_2 * x, FRAC_PI_2 * w)).collect()
            }
            LatitudeRule::GaussLegendreSinTheta => x
                .iter()
                .zip(&w)
                .map(|(&s, &w)| {
                    let theta = s.asin();
                    (theta, w / (1.0 - s * s).sqrt())
                })
                .collect(),
        }
    }

    fn longitude_nodes(&self) -> Vec<(f64, f64)> {
        let h = TAU / self.n_phi as f64;
        match self.symmetry_fold {
            None => (0..self.n_phi).map(|j| (j as f64 * h, h)).collect(),
            Some(n) => {
                let m = self.n_phi / (2 * n as usize);
                let scale = 2.0 * n as f64 * h;
                (0..=m)
                    .map(|j| {
                        let w = if j == 0 || j == m { 0.5 * scale } else { scale };
                        (j as f64 * h, w)
                    })
                    .collect()
            }
        }
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (z * pm - pm1) / (z * z - 1.0);
            let dz = pm / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = weight;
        w[m - 1 - i] = weight;
    }
    (x, w)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

struct RowSum {
    value: f64,
    magnitude: f64,
}

fn integrate_with_magnitude<F>(spec: &QuadratureSpec, integrand: &F) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    spec.validate()?;
    let lat = spec.latitude_nodes();
    let lon = spec.longitude_nodes();
    let rows: Vec<Result<RowSum>> = lat
        .par_iter()
        .map(|&(theta, wt)| {
            let mut acc = CompensatedSum::default();
            let mut mag = CompensatedSum::default();
            for &(phi, wp) in &lon {
                let v = integrand(theta, phi);
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand { theta, phi, value: v });
                }
                acc.add(wp * v);
                mag.add(wp * v.abs());
            }
            Ok(RowSum { value: wt * acc.value(), magnitude: wt * mag.value() })
        })
        .collect();
    let mut total = CompensatedSum::default();
    let mut magnitude = CompensatedSum::default();
    for row in rows {
        let row = row?;
        total.add(row.value);
        magnitude.add(row.magnitude);
    }
    Ok((total.value(), magnitude.value()))
}

/// `∫∫ integrand(θ, φ) dφ dθ` over `[-π/2, π/2] × [0, 2π)`.
///
/// The integrand is the full density in `(θ, φ)`; include the `cos θ` area
/// factor explicitly when integrating over the sphere's surface measure.
pub fn integrate_sphere<F>(spec: &QuadratureSpec, integrand: F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    integrate_with_magnitude(spec, &integrand).map(|(v, _)| v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Converged {
    pub value: f64,
    /// Difference between the last two resolutions.
    pub error_estimate: f64,
    /// Resolution that produced `value`.
    pub spec: QuadratureSpec,
}

/// Doubles both node counts, starting from `spec`, until two successive
/// values agree to `rel_tol · |value|`.
///
/// Differences at the rounding level of the sum (a few ulps of `∫∫|integrand|`)
/// also count as agreement, so integrals that vanish exactly terminate.
pub fn converged_integrate<F>(spec: &QuadratureSpec, integrand: F, rel_tol: f64) -> Result<Converged>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if !(rel_tol > 0.0) {
        return domain(format!("rel_tol must be positive, got {rel_tol}"));
    }
    let mut current = *spec;
    let (mut prev, _) = integrate_with_magnitude(&current, &integrand)?;
    let mut last_difference = f64::INFINITY;
    while current.n_theta * 2 <= MAX_NODES && current.n_phi * 2 <= MAX_NODES {
        current = current.doubled();
        let (value, magnitude) = integrate_with_magnitude(&current, &integrand)?;
        last_difference = (value - prev).abs();
        let floor = 64.0 * f64::EPSILON * magnitude;
        if last_difference <= rel_tol * value.abs() || last_difference <= floor {
            return Ok(Converged { value, error_estimate: last_difference, spec: current });
        }
        prev = value;
    }
    Err(Error::Convergence { value: prev, last_difference, nodes_theta: current.n_theta, nodes_phi: current.n_phi })
}
