//! Flag definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use conebound::lab::{Axis, ScanOperator};
use conebound::{ConeDescriptor, QuadratureConfig};

#[derive(Debug, Parser)]
#[command(name = "conebound", version, about = "Boundedness of Bergman-type operators on symmetric cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide boundedness and print the verdict.
    Decide(OpArgs),
    /// Search for an Okikiolu test certificate.
    Certify(OpArgs),
    /// Check a certificate numerically and fill in M1, M2.
    Verify {
        #[command(flatten)]
        op: OpArgs,
        /// Certificate JSON to check; searched for when omitted.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Evaluate the cone integral ∫ Δ^s(y + v) Δ^{t - n/r}(y) dy.
    Integrate(IntegrateArgs),
    /// Run the necessity and dilation probes for S.
    Probe(OpArgs),
    /// Decide every cell of a two-parameter grid and print CSV.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// "halfline", "lorentz:<n>" or "spd:<r>".
    #[arg(long, default_value = "halfline", value_parser = parse_cone)]
    pub cone: ConeDescriptor,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Quadrature refinement levels.
    #[arg(long)]
    pub levels: Option<u32>,
    /// Cheap quadrature for quick looks.
    #[arg(long)]
    pub coarse: bool,
}

impl Common {
    pub fn quadrature(&self) -> QuadratureConfig {
        let mut cfg = if self.coarse { QuadratureConfig::coarse() } else { QuadratureConfig::default() };
        if let Some(l) = self.levels {
            cfg.levels = l;
        }
        cfg
    }
}

/// Operator parameters. Reals accept "inf".
#[derive(Debug, Args)]
pub struct Params {
    #[arg(long, default_value = "0", value_parser = parse_real, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value = "0", value_parser = parse_real, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value = "1", value_parser = parse_real, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value = "1", value_parser = parse_real, allow_hyphen_values = true)]
    pub nu: f64,
    #[arg(long, default_value = "1", value_parser = parse_real, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value = "2", value_parser = parse_real)]
    pub p: f64,
    #[arg(long, default_value = "2", value_parser = parse_real)]
    pub q: f64,
    /// Outer exponent of the mixed target norm; `T+` without it is the
    /// unmixed `L^p → L^q` question.
    #[arg(long, value_parser = parse_real)]
    pub s: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OpArgs {
    #[command(flatten)]
    pub common: Common,
    /// "S", "T+" or "P+".
    #[arg(long, default_value = "S", value_parser = parse_op)]
    pub op: ScanOperator,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Exponent s, a scalar or r comma-separated components.
    #[arg(long, required = true, value_parser = parse_list, allow_hyphen_values = true)]
    pub s: Reals,
    /// Exponent t, a scalar or r comma-separated components.
    #[arg(long, required = true, value_parser = parse_list, allow_hyphen_values = true)]
    pub t: Reals,
    /// Shift point v as comma-separated coordinates; defaults to e.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub v: Option<Reals>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub op: OpArgs,
    /// Two parameter names, e.g. "gamma,mu".
    #[arg(long, default_value = "gamma,mu", value_parser = parse_axes)]
    pub axes: [Axis; 2],
    /// Cells per axis, e.g. "50x50".
    #[arg(long, default_value = "21x21", value_parser = parse_grid)]
    pub grid: (usize, usize),
    /// Range of the first axis, "lo:hi".
    #[arg(long, default_value = "-1:3", value_parser = parse_range, allow_hyphen_values = true)]
    pub range1: (f64, f64),
    /// Range of the second axis, "lo:hi".
    #[arg(long, default_value = "-1:3", value_parser = parse_range, allow_hyphen_values = true)]
    pub range2: (f64, f64),
    /// Also compute the norm lower bound over ball indicators (S only).
    #[arg(long)]
    pub indicator: bool,
}

fn parse_cone(s: &str) -> Result<ConeDescriptor, String> {
    s.parse().map_err(|e: conebound::Error| e.to_string())
}

fn parse_op(s: &str) -> Result<ScanOperator, String> {
    s.parse().map_err(|e: conebound::Error| e.to_string())
}

pub fn parse_real(s: &str) -> Result<f64, String> {
    conebound::real::parse(s).ok_or_else(|| format!("not a real number: {s:?}"))
}

/// A comma-separated list of reals, kept as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct Reals(pub Vec<f64>);

fn parse_list(s: &str) -> Result<Reals, String> {
    s.split(',').map(parse_real).collect::<Result<_, _>>().map(Reals)
}

fn parse_axes(s: &str) -> Result<[Axis; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(format!("expected two comma-separated axes, got {s:?}"));
    };
    let axis = |x: &str| x.parse::<Axis>().map_err(|e| e.to_string());
    Ok([axis(a)?, axis(b)?])
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let n = |x: &str| x.trim().parse::<usize>().ok().filter(|&k| k > 0).ok_or_else(|| format!("bad grid size {x:?}"));
    Ok((n(a)?, n(b)?))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let (lo, hi) = (parse_real(a)?, parse_real(b)?);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err("scan ranges must be finite".into());
    }
    Ok((lo, hi))
}
