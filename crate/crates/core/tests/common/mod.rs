#![allow(dead_code)]

use monoform_core::radial_family::{eval_rho, ShapeParams, SphericalPoint};

/// Seven-point central difference.
pub fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (45.0 * (f(x + h) - f(x - h)) - 9.0 * (f(x + 2.0 * h) - f(x - 2.0 * h)) + (f(x + 3.0 * h) - f(x - 3.0 * h)))
        / (60.0 * h)
}

/// `[ρ_θ, ρ_φ, ρ_θθ, ρ_θφ, ρ_φφ]` by finite differences of `eval_rho`.
pub fn fd_jet(params: &ShapeParams, theta: f64, phi: f64, h1: f64, h2: f64) -> [f64; 5] {
    let rho = |a: f64, b: f64| eval_rho(params, &SphericalPoint { theta: a, phi: b });
    [
        d1(|a| rho(a, phi), theta, h1),
        d1(|b| rho(theta, b), phi, h1),
        d1(|a| d1(|b| rho(b, phi), a, h2), theta, h2),
        d1(|a| d1(|b| rho(a, b), phi, h2), theta, h2),
        d1(|a| d1(|b| rho(theta, b), a, h2), phi, h2),
    ]
}

/// Normwise relative difference `|a − b| / |b|`.
pub fn rel(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}
