use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use monoform_core::calibration::{
    find_dstar, solve_c, CalibrationOptions, CalibrationResult, ConvexityResult, DstarOptions, ShapeChoice,
};
use monoform_core::mass_properties::{star_body_mass, MassProperties};
use monoform_core::polyhedral::io::{read_obj, read_stl, write_obj, write_stl};
use monoform_core::polyhedral::{
    generate_symmetric_mesh, mechanical_complexity, poly_equilibria, poly_mass, PolyEquilibrium, DEFAULT_TOL,
};
use monoform_core::quadrature::{LatitudeRule, QuadratureSpec};
use monoform_core::radial_family::{jet, ShapeParams, SphericalPoint, SurfaceJet};
use monoform_core::surface_analysis::{
    ball_distance_bound, census, curvature_at, curvature_field, find_equilibria, symmetry_deviation, CurvatureSample,
    CurvatureSummary, EquilibriumCensus, EquilibriumOptions, EquilibriumPoint, Grid,
};
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::json::write_report;
use crate::sweep;

/// Principal curvatures closer than this count as an umbilic.
const UMBILIC_TOL: f64 = 1e-6;
/// STL stores single precision, so planarity needs a looser tolerance.
const STL_TOL: f64 = 1e-6;

pub fn run<W: Write>(command: Command, out: W) -> CliResult<()> {
    match command {
        Command::Eval(a) => eval(a, out),
        Command::Calibrate(a) => calibrate(a, out),
        Command::Dstar(a) => dstar(a, out),
        Command::Analyze(a) => analyze(a, out),
        Command::Mesh(a) => mesh(a, out),
        Command::Census(a) => poly_census(a, out),
        Command::Sweep(a) => {
            let spec = quad_spec(&a.quad)?;
            let grid = Grid::new(a.grid_theta, a.grid_phi);
            match &a.out {
                Some(path) => {
                    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
                    sweep::run(&a.n, &a.c, &a.d, &spec, &grid, BufWriter::new(f))
                }
                None => sweep::run(&a.n, &a.c, &a.d, &spec, &grid, out),
            }
        }
    }
}

fn quad_spec(q: &QuadArgs) -> CliResult<QuadratureSpec> {
    Ok(QuadratureSpec::new(q.quad_theta, q.quad_phi, LatitudeRule::GaussLegendreSinTheta)?)
}

/// Either the given `c`, or `c*` calibrated for `d`.
fn shape(
    n: u32,
    c: Option<f64>,
    d: f64,
    tol: f64,
    quad: &QuadArgs,
) -> CliResult<(ShapeParams, Option<CalibrationResult>)> {
    match c {
        Some(c) => Ok((ShapeParams::new(n, c, d)?, None)),
        None => {
            let r = solve_c(n, d, &CalibrationOptions { tol, spec: quad_spec(quad)? })?;
            Ok((r.params(), Some(r)))
        }
    }
}

#[derive(Serialize)]
struct EvalReport {
    params: ShapeParams,
    point: SphericalPoint,
    rho: f64,
    radius: f64,
    jet: SurfaceJet,
    curvature: CurvatureSample,
    umbilic: bool,
}

fn eval<W: Write>(a: EvalArgs, out: W) -> CliResult<()> {
    let params = ShapeParams::new(a.n, a.c, a.d)?;
    let point = SphericalPoint::new(a.theta, a.phi)?;
    let j = jet(&params, &point);
    let curvature = curvature_at(&params, &point)?;
    let report = EvalReport {
        params,
        point,
        rho: j.rho,
        radius: j.radius,
        jet: j,
        umbilic: (curvature.kappa2 - curvature.kappa1).abs() < UMBILIC_TOL,
        curvature,
    };
    Ok(write_report(out, "eval", &report)?)
}

#[derive(Serialize)]
struct CalibrateReport {
    result: CalibrationResult,
    quadrature: QuadratureSpec,
}

fn calibrate<W: Write>(a: CalibrateArgs, out: W) -> CliResult<()> {
    let spec = quad_spec(&a.quad)?;
    let result = solve_c(a.n, a.d, &CalibrationOptions { tol: a.tol, spec })?;
    Ok(write_report(out, "calibrate", &CalibrateReport { result, quadrature: spec })?)
}

#[derive(Serialize)]
struct DstarReport {
    mode: &'static str,
    fixed_c: Option<f64>,
    tol_d: f64,
    result: ConvexityResult,
}

fn dstar<W: Write>(a: DstarArgs, out: W) -> CliResult<()> {
    let shape = match a.c {
        Some(c) => ShapeChoice::Fixed(c),
        None => ShapeChoice::Calibrated(CalibrationOptions { tol: a.tol, spec: quad_spec(&a.quad)? }),
    };
    let options = DstarOptions { tol_d: a.tol_d, grid: Grid::new(a.grid_theta, a.grid_phi), shape };
    let result = find_dstar(a.n, &options)?;
    let report =
        DstarReport { mode: if a.c.is_some() { "fixed" } else { "calibrated" }, fixed_c: a.c, tol_d: a.tol_d, result };
    Ok(write_report(out, "dstar", &report)?)
}

#[derive(Serialize)]
struct Equilibria {
    seeds: usize,
    discarded_seeds: usize,
    ambiguous_pairs: usize,
    reference: [f64; 3],
    reference_is_centroid: bool,
    census: EquilibriumCensus,
    /// Euler check, no degeneracies, and both a minimum and a maximum found.
    valid: bool,
    /// `(S, H, U) = (1, 0, 1)` on a valid census.
    mono_monostatic: bool,
    points: Vec<EquilibriumPoint>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    params: ShapeParams,
    calibration: Option<CalibrationResult>,
    mass: MassProperties,
    curvature: CurvatureSummary,
    convex: bool,
    equilibria: Equilibria,
    symmetry_deviation: f64,
    ball_distance_bound: f64,
}

fn analyze<W: Write>(a: AnalyzeArgs, out: W) -> CliResult<()> {
    let (params, calibration) = shape(a.n, a.c, a.d, a.tol, &a.quad)?;
    let mass = star_body_mass(&params, &quad_spec(&a.quad)?)?;
    let grid = Grid::new(a.grid_theta, a.grid_phi);
    let curvature = curvature_field(&params, &grid)?;
    let options = EquilibriumOptions { seeds_theta: a.seeds_theta, seeds_phi: a.seeds_phi, tol: a.eq_tol };
    let reference = match &a.reference {
        Some(text) => parse_point(text)?,
        None => mass.centroid,
    };
    let found = find_equilibria(&params, reference, &options)?;
    let cen = census(&found.points);
    let report = AnalyzeReport {
        params,
        calibration,
        mass,
        convex: curvature.is_convex(),
        curvature,
        equilibria: Equilibria {
            seeds: found.seeds,
            discarded_seeds: found.discarded_seeds,
            ambiguous_pairs: found.ambiguous_pairs,
            reference,
            reference_is_centroid: a.reference.is_none(),
            valid: cen.is_valid(),
            mono_monostatic: cen.is_valid() && cen.counts() == (1, 0, 1),
            census: cen,
            points: found.points,
        },
        symmetry_deviation: symmetry_deviation(&params, a.symmetry_samples)?,
        ball_distance_bound: ball_distance_bound(&params, &grid),
    };
    Ok(write_report(out, "analyze", &report)?)
}

fn format_for(path: &Path, given: Option<MeshFormat>) -> CliResult<MeshFormat> {
    if let Some(f) = given {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("obj") => Ok(MeshFormat::Obj),
        Some("stl") => Ok(MeshFormat::Stl),
        _ => Err(CliError::Usage(format!("cannot infer mesh format of {}; pass --format", path.display()))),
    }
}

#[derive(Serialize)]
struct MeshReport {
    params: ShapeParams,
    calibration: Option<CalibrationResult>,
    path: PathBuf,
    format: &'static str,
    vertices: usize,
    edges: usize,
    faces: usize,
    mass: MassProperties,
}

fn mesh<W: Write>(a: MeshArgs, out: W) -> CliResult<()> {
    let format = format_for(&a.out, a.format)?;
    let (params, calibration) = shape(a.n, a.c, a.d, a.tol, &a.quad)?;
    let poly = generate_symmetric_mesh(&params, a.m_theta, a.m_phi, a.mesh_tol)?;
    let file = File::create(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let w = BufWriter::new(file);
    match format {
        MeshFormat::Obj => write_obj(&poly, w),
        MeshFormat::Stl => write_stl(&poly, w),
    }
    .map_err(|e| CliError::io(&a.out, e))?;
    let (vertices, edges, faces) = poly.counts();
    let report = MeshReport {
        params,
        calibration,
        path: a.out,
        format: format.name(),
        vertices,
        edges,
        faces,
        mass: poly_mass(&poly)?,
    };
    Ok(write_report(out, "mesh", &report)?)
}

fn parse_point(text: &str) -> CliResult<[f64; 3]> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--reference: {text:?} is not x,y,z ({e})")))?;
    match v.as_slice() {
        [x, y, z] if v.iter().all(|t| t.is_finite()) => Ok([*x, *y, *z]),
        _ => Err(CliError::Usage(format!("--reference: expected three finite numbers, got {text:?}"))),
    }
}

#[derive(Serialize)]
struct CensusReport {
    input: PathBuf,
    format: &'static str,
    tol: f64,
    vertices: usize,
    edges: usize,
    faces: usize,
    mass: MassProperties,
    reference: [f64; 3],
    reference_is_centroid: bool,
    census: EquilibriumCensus,
    valid: bool,
    /// `None` when the census has degenerate equilibria.
    mechanical_complexity: Option<i64>,
    equilibria: Vec<PolyEquilibrium>,
}

fn poly_census<W: Write>(a: CensusArgs, out: W) -> CliResult<()> {
    let format = format_for(&a.input, a.format)?;
    let tol = a.mesh_tol.unwrap_or(match format {
        MeshFormat::Obj => DEFAULT_TOL,
        MeshFormat::Stl => STL_TOL,
    });
    let file = File::open(&a.input).map_err(|e| CliError::io(&a.input, e))?;
    let raw = match format {
        MeshFormat::Obj => read_obj(BufReader::new(file))?,
        MeshFormat::Stl => read_stl(BufReader::new(file))?,
    };
    let poly = raw.into_polyhedron(tol)?;
    let mass = poly_mass(&poly)?;
    let reference = match &a.reference {
        Some(text) => parse_point(text)?,
        None => mass.centroid,
    };
    let result = poly_equilibria(&poly, reference, tol)?;
    let (vertices, edges, faces) = poly.counts();
    let report = CensusReport {
        input: a.input,
        format: format.name(),
        tol,
        vertices,
        edges,
        faces,
        mass,
        reference,
        reference_is_centroid: a.reference.is_none(),
        mechanical_complexity: mechanical_complexity(&poly, &result.census).ok(),
        valid: result.census.is_valid(),
        census: result.census,
        equilibria: result.equilibria,
    };
    Ok(write_report(out, "census", &report)?)
}
