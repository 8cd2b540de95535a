//! Numerical toolkit for a one-parameter family of convex bodies close to
//! the unit ball that have exactly one stable and one unstable static
//! equilibrium.
//!
//! The body `K_n(c, d)` is the star body with radial function
//! `R = 1 + d·ρ_c(θ, φ)`. This crate evaluates `ρ_c` with analytic
//! derivatives, integrates its moments, calibrates `(c, d)` so the body is
//! centred and convex, analyses curvature and equilibria of the smooth
//! surface, and builds symmetric polyhedral approximations with their
//! equilibrium census.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod mass_properties;
pub mod polyhedral;
pub mod quadrature;
pub mod radial_family;
pub mod surface_analysis;

pub use calibration::{
    check_convexity, find_dstar, solve_c, CalibrationOptions, CalibrationResult, ConvexityCheck, ConvexityResult,
    DstarOptions, ShapeChoice,
};
pub use error::{Error, Result};
pub use mass_properties::{h_closed_form_c1, h_limit_c0, h_value, moment_mxy, star_body_mass, MassProperties};
pub use polyhedral::{
    generate_symmetric_mesh, mechanical_complexity, poly_equilibria, poly_mass, ConvexPolyhedron, PolyCensus,
    PolyEquilibrium,
};
pub use quadrature::{integrate_sphere, LatitudeRule, QuadratureSpec};
pub use radial_family::{
    chart_jet, eval_big_f, eval_f, eval_g, eval_radius, eval_rho, eval_rho0, jet, Pole, ShapeParams, SphericalPoint,
    SurfaceJet,
};
pub use surface_analysis::{
    ball_distance_bound, census, curvature_at, curvature_field, find_equilibria, symmetry_deviation, CurvatureSample,
    CurvatureSummary, EquilibriumCensus, EquilibriumKind, EquilibriumOptions, EquilibriumPoint, Grid,
};
