use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dlh_core::holonomy::{PathKind, Scheme};
use dlh_core::{ControlParam, MWindow};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "dlh", version, about = "Landau levels, displaced Fock states and Berry holonomies of an induced-dipole particle")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// TOML configuration file; the unit configuration is used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file, written atomically. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived scales, natural units and regime checks of a configuration.
    Derive,
    /// Landau-level spectrum of the truncated basis.
    Spectrum(SpectrumArgs),
    /// Coefficients of a displaced Fock state.
    Displace(DisplaceArgs),
    /// Berry connection over an m-window of one Landau level.
    Connection(ConnectionArgs),
    /// Abelian phase of a loop in the (Ex', Ey') plane.
    Phase(PhaseArgs),
    /// Path-ordered holonomy of a closed loop.
    Holonomy(HolonomyArgs),
    /// Cross-checks against the coordinate-space oracle and reports the sign convention.
    OracleCheck(OracleArgs),
    /// Cartesian-product sweep of phase or holonomy diagnostics.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Clone)]
pub struct SpectrumArgs {
    /// Highest Landau level n.
    #[arg(long = "n", default_value_t = 3)]
    pub n_max: i64,
    /// Highest degeneracy label m.
    #[arg(long, default_value_t = 3)]
    pub m_max: i64,
}

#[derive(Debug, Args, Clone)]
pub struct DisplaceArgs {
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    #[arg(long, default_value_t = 24)]
    pub n_max: i64,
    #[arg(long, default_value_t = 24)]
    pub m_max: i64,
    /// Real part of a dimensionless ν; overrides the field-derived value.
    #[arg(long, allow_hyphen_values = true)]
    pub nu_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu_im: Option<f64>,
    /// In-plane field Ex' in config units; defaults to the config value.
    #[arg(long = "Ex", allow_hyphen_values = true)]
    pub ex: Option<f64>,
    #[arg(long = "Ey", allow_hyphen_values = true)]
    pub ey: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Resolved,
    Printed,
}

#[derive(Debug, Args, Clone)]
pub struct ConnectionArgs {
    /// Ex, Ey, lambda or B.
    #[arg(long)]
    pub param: ControlParam,
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long, default_value_t = MWindow::default())]
    pub window: MWindow,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum, default_value_t = ConventionArg::Resolved)]
    pub convention: ConventionArg,
}

/// A control point in config units; unset coordinates come from the config.
#[derive(Debug, Args, Clone, Default)]
pub struct PointArgs {
    #[arg(long = "Ex", allow_hyphen_values = true)]
    pub ex: Option<f64>,
    #[arg(long = "Ey", allow_hyphen_values = true)]
    pub ey: Option<f64>,
    #[arg(long = "lam", allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
}

/// Loop description in config units.
#[derive(Debug, Args, Clone, Default)]
pub struct PathArgs {
    /// C1, ABCHEFA, ABCHGFA, ADCHEFA, ADCHEFA-shared, box4 or custom.
    #[arg(long)]
    pub named: Option<PathKind>,
    /// Vertex file, one "Ex Ey lambda B" line per vertex (implies custom).
    #[arg(long)]
    pub vertices: Option<PathBuf>,
    #[arg(long = "Ex1", allow_hyphen_values = true)]
    pub ex1: Option<f64>,
    #[arg(long = "Ex2", allow_hyphen_values = true)]
    pub ex2: Option<f64>,
    #[arg(long = "Ey1", allow_hyphen_values = true)]
    pub ey1: Option<f64>,
    #[arg(long = "Ey2", allow_hyphen_values = true)]
    pub ey2: Option<f64>,
    #[arg(long = "lam1")]
    pub lam1: Option<f64>,
    #[arg(long = "lam2")]
    pub lam2: Option<f64>,
    #[arg(long = "B1")]
    pub b1: Option<f64>,
    #[arg(long = "B2")]
    pub b2: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub path: PathArgs,
    /// Signed loop area S₁ in the (Ex', Ey') plane; skips the path.
    #[arg(long, allow_hyphen_values = true)]
    pub area: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct HolonomyArgs {
    #[command(flatten)]
    pub path: PathArgs,
    #[arg(long, default_value_t = MWindow::new(0, 1).unwrap())]
    pub window: MWindow,
    #[arg(long, default_value_t = dlh_core::holonomy::DEFAULT_STEPS)]
    pub steps: usize,
    #[arg(long, default_value_t = Scheme::Magnus4)]
    pub scheme: Scheme,
    /// Double the steps until the estimate is below this tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write (step, unitarity_defect) of the partial products to this file.
    #[arg(long)]
    pub emit_plot_data: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct OracleArgs {
    /// Landau level used for the sign report.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = MWindow::new(0, 3).unwrap())]
    pub window: MWindow,
    /// Grid points per axis.
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    /// Half-width of the square grid in natural lengths.
    #[arg(long, default_value_t = 10.0)]
    pub half_extent: f64,
    /// Steps of the Wilson loop and of the path-ordered reference.
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    /// Text report destination; stdout when omitted.
    #[arg(long)]
    pub text_out: Option<PathBuf>,
    /// Report point in natural units.
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    Phase,
    Holonomy,
}

#[derive(Debug, Args, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub target: SweepTarget,
    /// name=v1,v2,... or name=lo:hi:count. Names: area, Ex1, Ex2, Ey1, Ey2, lam1, lam2, B1, B2, steps.
    #[arg(long = "axis", required = true)]
    pub axes: Vec<String>,
    #[command(flatten)]
    pub path: PathArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub area: Option<f64>,
    #[arg(long, default_value_t = MWindow::new(0, 1).unwrap())]
    pub window: MWindow,
    #[arg(long, default_value_t = dlh_core::holonomy::DEFAULT_STEPS)]
    pub steps: usize,
    #[arg(long, default_value_t = Scheme::Magnus4)]
    pub scheme: Scheme,
}
