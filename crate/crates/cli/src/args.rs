use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "monoform",
    version,
    about = "Mono-monostatic convex bodies: evaluation, calibration, analysis and meshes"
)]
pub struct Cli {
    /// Flat `key=value` file giving defaults for the subcommand's flags;
    /// flags on the command line override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radial function, jet and curvature at one point.
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Solve H(c, d) = 0 for c.
    #[command(args_override_self = true)]
    Calibrate(CalibrateArgs),
    /// Largest amplitude d that keeps the body convex.
    #[command(args_override_self = true)]
    Dstar(DstarArgs),
    /// Mass properties, curvature, equilibria, symmetry and ball distance.
    #[command(args_override_self = true)]
    Analyze(AnalyzeArgs),
    /// Write the symmetric inscribed polyhedron as OBJ or STL.
    #[command(args_override_self = true)]
    Mesh(MeshArgs),
    /// Equilibrium census of a convex polyhedron read from OBJ or STL.
    #[command(args_override_self = true)]
    Census(CensusArgs),
    /// CSV of mass and curvature quantities over a parameter grid.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct QuadArgs {
    /// Latitude nodes of the moment quadrature.
    #[arg(long, default_value_t = 128)]
    pub quad_theta: usize,
    /// Longitude nodes of the moment quadrature.
    #[arg(long, default_value_t = 256)]
    pub quad_phi: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub d: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: f64,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: f64,
    /// Target |H(c*, d)|.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct DstarArgs {
    #[arg(long)]
    pub n: u32,
    /// Freeze c at this value instead of recalibrating it for every d.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 1e-5)]
    pub tol_d: f64,
    #[arg(long, default_value_t = 128)]
    pub grid_theta: usize,
    #[arg(long, default_value_t = 256)]
    pub grid_phi: usize,
    /// Calibration tolerance (calibrated mode only).
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub n: u32,
    /// Shape parameter; calibrated from `d` when omitted.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: f64,
    #[arg(long, default_value_t = 64)]
    pub grid_theta: usize,
    #[arg(long, default_value_t = 128)]
    pub grid_phi: usize,
    #[arg(long, default_value_t = 64)]
    pub seeds_theta: usize,
    #[arg(long, default_value_t = 128)]
    pub seeds_phi: usize,
    /// Newton tolerance for equilibria.
    #[arg(long, default_value_t = 1e-10)]
    pub eq_tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub symmetry_samples: usize,
    /// Reference point `x,y,z` for equilibria; the body's centroid by default.
    #[arg(long, allow_negative_numbers = true)]
    pub reference: Option<String>,
    /// Calibration tolerance when `c` is omitted.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshFormat {
    Obj,
    Stl,
}

impl MeshFormat {
    pub fn name(self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Stl => "stl",
        }
    }
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    pub n: u32,
    /// Shape parameter; calibrated from `d` when omitted.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: f64,
    /// Interior latitude rings.
    #[arg(long, default_value_t = 32)]
    pub m_theta: usize,
    /// Points per ring; a multiple of 2n.
    #[arg(long, default_value_t = 96)]
    pub m_phi: usize,
    /// Defaults to the extension of `--out`.
    #[arg(long, value_enum)]
    pub format: Option<MeshFormat>,
    #[arg(long)]
    pub out: PathBuf,
    /// Coplanarity tolerance of the hull.
    #[arg(long, default_value_t = 1e-9)]
    pub mesh_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    pub input: PathBuf,
    /// Defaults to the extension of the input.
    #[arg(long, value_enum)]
    pub format: Option<MeshFormat>,
    /// Geometric tolerance; 1e-9 for OBJ and 1e-6 for STL (single precision) by default.
    #[arg(long)]
    pub mesh_tol: Option<f64>,
    /// Reference point `x,y,z`; the polyhedron's centroid by default.
    #[arg(long, allow_negative_numbers = true)]
    pub reference: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `value` or `start:stop:step`.
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub c: String,
    #[arg(long)]
    pub d: String,
    #[arg(long, default_value_t = 64)]
    pub grid_theta: usize,
    #[arg(long, default_value_t = 128)]
    pub grid_phi: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}
