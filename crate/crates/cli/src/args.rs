use std::path::PathBuf;

use cgf_core::Rational;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cgf", version, about = "Exact cut-generating function toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check strong minimality (and the 2-slope certificate) of a function.
    Verify(VerifyArgs),
    /// Extreme 2-slope approximation for `b + Z`.
    ApproxZ(ApproxZArgs),
    /// Extreme 2-slope approximation on `[-M, M]` for `b + Z+`.
    ApproxZplus(ApproxZplusArgs),
    /// Gauges of maximal S-free polyhedra.
    #[command(subcommand)]
    Ccgf(CcgfCommand),
    /// Render a function (and optionally a second one) as SVG.
    Plot(PlotArgs),
    /// Print uniform exact samples as CSV.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeArg {
    /// `S = b + Z`
    Z,
    /// `S = b + Z+`
    Zplus,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Rational,
    #[arg(long, value_enum, default_value = "z")]
    pub lattice: LatticeArg,
    /// Succeed only if the 2-slope extremality certificate holds.
    #[arg(long)]
    pub expect_extreme: bool,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApproxZArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub b: Rational,
    #[arg(long)]
    pub eps: Rational,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// SVG of the result overlaid on the input.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[arg(long, default_value_t = 400, requires = "plot")]
    pub samples: usize,
    /// Also write this many samples of the result to `<out>.csv`.
    #[arg(long)]
    pub csv: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ApproxZplusArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub b: Rational,
    #[arg(long = "M")]
    pub m: Rational,
    #[arg(long)]
    pub eps: Rational,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CcgfCommand {
    /// Shape, ordered vertices and facet S-points of a planar polyhedron.
    Classify(PolyArgs),
    /// Extremality verdict (planar shapes and simplices).
    Extreme(PolyArgs),
    /// Nearby maximal S-free polyhedron with extreme gauge.
    Approx2d(Approx2dArgs),
    /// Simplex with n+1 facet S-points whose gauge is not extreme.
    DeltaN(DeltaNArgs),
    /// Separation certificate for a non-extreme simplex.
    Certificate(PolyArgs),
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Approx2dArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub eps: Rational,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeltaNArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub eps: Rational,
    /// Initial size of the perturbation; halved until the result verifies.
    #[arg(long, default_value = "1/100")]
    pub epsbar: Rational,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    /// Plot range `[-M, M]` for quasi-periodic functions (default: one period).
    #[arg(long = "M")]
    pub m: Option<Rational>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[arg(long = "M")]
    pub m: Option<Rational>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
