use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Scaling-limit correlations between zeros of random polynomials.
#[derive(Debug, Parser)]
#[command(name = "zcorr", version, about, propagate_version = true)]
pub struct Cli {
    /// Emit a JSON envelope instead of plain text or CSV.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one correlation value.
    Eval(EvalArgs),
    /// Tabulate the pair correlation on a uniform grid of distances.
    Curve(CurveArgs),
    /// Exact Laurent expansion of the pair correlation in u = r².
    Series(SeriesArgs),
    /// Monte-Carlo estimate of a correlation value.
    Mc(McArgs),
    /// Empirical pair correlation of random SU(2) polynomial roots.
    Ensemble(EnsembleArgs),
    /// Run the cross-validation suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    /// Complex dimension; inferred from the points file if omitted there.
    #[arg(long)]
    pub m: Option<usize>,

    /// Codimension: number of simultaneous sections.
    #[arg(long)]
    pub k: usize,

    /// Distance of the standard pair.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "points", conflicts_with = "points")]
    pub r: Option<f64>,

    /// JSON file: an array of points, each an array of [re, im] pairs.
    #[arg(long)]
    pub points: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Berezin,
    Expansion,
    Closed,
    Wick,
    Mc,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,

    #[arg(long, value_enum, default_value = "closed")]
    pub method: Method,

    /// Monte-Carlo samples (method mc).
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    /// Seed, decimal or 0x-prefixed hex (method mc).
    #[arg(long, default_value = "0", value_parser = parse_seed)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub m: usize,

    #[arg(long)]
    pub k: usize,

    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub rmin: f64,

    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub rmax: f64,

    #[arg(long, default_value_t = 200)]
    pub steps: usize,

    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub m: usize,

    #[arg(long)]
    pub k: usize,

    /// Number of coefficients from the leading power on.
    #[arg(long, default_value_t = 12)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,

    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    #[arg(long, default_value = "0", value_parser = parse_seed)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Polynomial degree N.
    #[arg(long, default_value_t = 200)]
    pub degree: usize,

    #[arg(long, default_value_t = 2000)]
    pub trials: usize,

    #[arg(long, default_value = "0", value_parser = parse_seed)]
    pub seed: u64,

    /// Comma-separated bin edges in scaled distance.
    #[arg(long, value_delimiter = ',')]
    pub edges: Option<Vec<f64>>,

    /// Keep only pairs centred within this scaled radius of the origin.
    #[arg(long)]
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Fast,
    Full,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value = "fast")]
    pub level: LevelArg,

    #[arg(long, default_value = "7", value_parser = parse_seed)]
    pub seed: u64,

    /// Corrupt one stored coefficient, given as K,M,POWER.
    #[arg(long, hide = true)]
    pub perturb: Option<String>,
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("seed must be a decimal or 0x-prefixed hex u64, got {s:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("42"), Ok(42));
        assert_eq!(parse_seed("0xff"), Ok(255));
        assert_eq!(parse_seed("0XFF"), Ok(255));
        assert!(parse_seed("-1").is_err());
        assert!(parse_seed("0xzz").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
