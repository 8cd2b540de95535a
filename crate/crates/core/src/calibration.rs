//! Centering (`H(c, d) = 0`) and convexity thresholds for the family.

use log::debug;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::mass_properties::h_value;
use crate::quadrature::QuadratureSpec;
use crate::radial_family::{ShapeParams, SphericalPoint};
use crate::surface_analysis::{curvature_field, CurvatureSummary, Grid};

pub const C_BRACKET: (f64, f64) = (0.01, 0.99);
pub const D_RANGE: (f64, f64) = (1e-6, 0.1);
pub const MAX_ITERATIONS: usize = 60;
/// Bracket width at which bisection hands over to the secant pass.
const SECANT_HANDOVER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub n: u32,
    pub d: f64,
    pub c_star: f64,
    /// `|H(c_star, d)|`
    pub residual: f64,
    /// Final bracket; `H` has opposite signs at its ends.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

impl CalibrationResult {
    pub fn params(&self) -> ShapeParams {
        ShapeParams::new(self.n, self.c_star, self.d).expect("calibrated parameters are in range")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub tol: f64,
    pub spec: QuadratureSpec,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { tol: 1e-10, spec: QuadratureSpec::default() }
    }
}

/// Root of `c ↦ H(c, d)` in [`C_BRACKET`]: bisection, then a safeguarded
/// secant (Illinois) pass once the bracket is narrow.
pub fn solve_c(n: u32, d: f64, options: &CalibrationOptions) -> Result<CalibrationResult> {
    if !(options.tol > 0.0) {
        return domain(format!("tolerance must be positive, got {}", options.tol));
    }
    let base = ShapeParams::new(n, C_BRACKET.1, d)?;
    let h = |c: f64| h_value(&base.with_c(c)?, &options.spec);
    let (mut lo, mut hi) = C_BRACKET;
    let (mut h_lo, mut h_hi) = (h(lo)?, h(hi)?);
    if !(h_lo < 0.0 && h_hi > 0.0) {
        return Err(Error::Bracket { lo, hi, h_lo, h_hi });
    }
    let mut best = if h_lo.abs() < h_hi.abs() { (lo, h_lo) } else { (hi, h_hi) };
    // Illinois bookkeeping: which end was retained last time
    let mut kept_side = 0i8;
    for it in 1..=MAX_ITERATIONS {
        let c = if hi - lo > SECANT_HANDOVER {
            0.5 * (lo + hi)
        } else {
            let s = hi - h_hi * (hi - lo) / (h_hi - h_lo);
            if s > lo && s < hi {
                s
            } else {
                0.5 * (lo + hi)
            }
        };
        let hc = h(c)?;
        if hc.abs() < best.1.abs() {
            best = (c, hc);
        }
        debug!("solve_c n={n} d={d}: iteration {it}, c={c}, H={hc:e}");
        if hc.abs() < options.tol || hc == 0.0 {
            return Ok(CalibrationResult { n, d, c_star: c, residual: hc.abs(), bracket: (lo, hi), iterations: it });
        }
        if hc < 0.0 {
            lo = c;
            h_lo = hc;
            if kept_side == 1 {
                h_hi *= 0.5;
            }
            kept_side = 1;
        } else {
            hi = c;
            h_hi = hc;
            if kept_side == -1 {
                h_lo *= 0.5;
            }
            kept_side = -1;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Err(Error::Numerical(format!(
        "solve_c did not reach |H| < {:e}; best c = {} with |H| = {:e}",
        options.tol,
        best.0,
        best.1.abs()
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityCheck {
    pub is_convex: bool,
    pub min_principal: f64,
    pub min_gaussian: f64,
    /// Location of the smallest principal curvature.
    pub worst_point: SphericalPoint,
    pub summary: CurvatureSummary,
}

/// Convex iff the smallest principal curvature over the refined sweep is
/// positive.
pub fn check_convexity(params: &ShapeParams, grid: &Grid) -> Result<ConvexityCheck> {
    let summary = curvature_field(params, grid)?;
    Ok(ConvexityCheck {
        is_convex: summary.is_convex(),
        min_principal: summary.min_principal.kappa1,
        min_gaussian: summary.min_gaussian.gaussian,
        worst_point: summary.min_principal.point,
        summary,
    })
}

/// How `c` is chosen for each trial amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeChoice {
    /// `c = solve_c(n, d)`.
    Calibrated(CalibrationOptions),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DstarOptions {
    pub tol_d: f64,
    pub grid: Grid,
    pub shape: ShapeChoice,
}

impl Default for DstarOptions {
    fn default() -> Self {
        Self { tol_d: 1e-5, grid: Grid::new(128, 256), shape: ShapeChoice::Calibrated(CalibrationOptions::default()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityResult {
    pub n: u32,
    /// Largest accepted amplitude.
    pub d_star: f64,
    /// Smallest rejected amplitude (`None` when saturated).
    pub d_rejected: Option<f64>,
    /// `c` used at `d_star`.
    pub c_at_d_star: f64,
    /// Minimum Gaussian curvature at `d_star`.
    pub min_gaussian: f64,
    pub min_principal: f64,
    pub grid: Grid,
    /// Worst points at the accepted and (if any) rejected amplitudes.
    pub certificate_points: Vec<SphericalPoint>,
    /// The predicate held at the top of [`D_RANGE`].
    pub saturated: bool,
    pub iterations: usize,
}

fn trial(n: u32, d: f64, options: &DstarOptions) -> Result<(f64, ConvexityCheck)> {
    let c = match options.shape {
        ShapeChoice::Calibrated(cal) => solve_c(n, d, &cal)?.c_star,
        ShapeChoice::Fixed(c) => c,
    };
    let check = check_convexity(&ShapeParams::new(n, c, d)?, &options.grid)?;
    debug!("find_dstar n={n}: d={d}, c={c}, min principal {:e}", check.min_principal);
    Ok((c, check))
}

/// Bisection on `d` over [`D_RANGE`] for the convexity threshold.
pub fn find_dstar(n: u32, options: &DstarOptions) -> Result<ConvexityResult> {
    if !(options.tol_d > 0.0) {
        return domain(format!("tol_d must be positive, got {}", options.tol_d));
    }
    if let ShapeChoice::Fixed(c) = options.shape {
        ShapeParams::new(n, c, 0.0)?;
    }
    let (mut lo, mut hi) = D_RANGE;
    let mut accepted = trial(n, lo, options)?;
    if !accepted.1.is_convex {
        return Err(Error::Numerical(format!("body is not convex even at d = {lo}")));
    }
    let top = trial(n, hi, options)?;
    if top.1.is_convex {
        return Ok(ConvexityResult {
            n,
            d_star: hi,
            d_rejected: None,
            c_at_d_star: top.0,
            min_gaussian: top.1.min_gaussian,
            min_principal: top.1.min_principal,
            grid: options.grid,
            certificate_points: vec![top.1.worst_point],
            saturated: true,
            iterations: 0,
        });
    }
    let mut rejected = top;
    let mut iterations = 0;
    while hi - lo > options.tol_d && iterations < MAX_ITERATIONS {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let t = trial(n, mid, options)?;
        if t.1.is_convex {
            lo = mid;
            accepted = t;
        } else {
            hi = mid;
            rejected = t;
        }
    }
    Ok(ConvexityResult {
        n,
        d_star: lo,
        d_rejected: Some(hi),
        c_at_d_star: accepted.0,
        min_gaussian: accepted.1.min_gaussian,
        min_principal: accepted.1.min_principal,
        grid: options.grid,
        certificate_points: vec![accepted.1.worst_point, rejected.1.worst_point],
        saturated: false,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass_properties::star_body_mass;

    #[test]
    fn c_star_for_three_folds() {
        let r = solve_c(3, 1e-4, &CalibrationOptions::default()).unwrap();
        assert!((r.c_star - 0.056).abs() < 1e-3, "{r:?}");
        assert!(r.residual < 1e-10);
        assert!(r.c_star > r.bracket.0 && r.c_star < r.bracket.1);
        assert!(r.iterations <= MAX_ITERATIONS);
    }

    #[test]
    fn h_is_positive_near_one() {
        let p = ShapeParams::new(3, 0.99, 1e-4).unwrap();
        assert!(h_value(&p, &QuadratureSpec::default()).unwrap() > 0.0);
    }

    #[test]
    fn two_folds_and_zero_amplitude() {
        let r = solve_c(2, 1e-4, &CalibrationOptions::default()).unwrap();
        assert!(r.c_star > 0.0 && r.c_star < 1.0 && r.residual < 1e-10);
        let r0 = solve_c(3, 0.0, &CalibrationOptions::default()).unwrap();
        assert!(r0.residual < 1e-10);
    }

    #[test]
    fn calibrated_body_is_centered() {
        let opts = CalibrationOptions::default();
        let r = solve_c(3, 0.001, &opts).unwrap();
        let m = star_body_mass(&r.params(), &opts.spec).unwrap();
        assert!(m.centroid[2].abs() < 10.0 * opts.tol / m.volume, "{:?}", m.centroid);
    }

    #[test]
    fn bad_inputs() {
        assert!(solve_c(3, 1e-4, &CalibrationOptions { tol: 0.0, ..Default::default() }).is_err());
        assert!(find_dstar(3, &DstarOptions { tol_d: -1.0, ..Default::default() }).is_err());
    }

    #[test]
    fn convexity_examples() {
        let g = Grid::default();
        let sphere = check_convexity(&ShapeParams::new(3, 1.0, 0.0).unwrap(), &g).unwrap();
        assert!(sphere.is_convex && (sphere.min_gaussian - 1.0).abs() < 1e-9);
        assert!(check_convexity(&ShapeParams::new(3, 0.056, 0.0005).unwrap(), &g).unwrap().is_convex);
        assert!(!check_convexity(&ShapeParams::new(3, 0.056, 0.01).unwrap(), &g).unwrap().is_convex);
    }

    #[test]
    fn dstar_fixed_shape() {
        let opts = DstarOptions { shape: ShapeChoice::Fixed(0.056), ..Default::default() };
        let r = find_dstar(3, &opts).unwrap();
        assert!(!r.saturated);
        assert!((r.d_star - 0.0013).abs() < 2e-4, "{r:?}");
        assert!(r.d_rejected.unwrap() - r.d_star <= opts.tol_d);
        assert!(r.min_gaussian > 0.0);
    }
}
