use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use cvtele_core::oracle::{GainConvention, OracleLattice};
use cvtele_core::states::StateSpec;
use cvtele_core::teleport::Numerics;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Input state, e.g. `coherent:0.3+0.2i`
    #[arg(long)]
    pub input: Option<String>,
    /// Two-mode resource, e.g. `svs:r=0.4` (repeatable for frontier)
    #[arg(long)]
    pub resource: Vec<String>,
    /// Fock truncation N_c
    #[arg(long)]
    pub trunc: Option<usize>,
    /// CF lattice as L:h
    #[arg(long)]
    pub grid: Option<String>,
    /// Measurement outcome lattice as L:d
    #[arg(long)]
    pub mlattice: Option<String>,
    /// Oracle eta lattice as L:d
    #[arg(long)]
    pub eta_lattice: Option<String>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Displacement gain for the oracle: sqrt2 or literal
    #[arg(long)]
    pub gain: Option<String>,
    /// TOML file with any of the above keys
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<String>,
    resource: Option<Vec<String>>,
    trunc: Option<usize>,
    grid: Option<String>,
    mlattice: Option<String>,
    eta_lattice: Option<String>,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    gain: Option<String>,
    oracle_trunc: Option<usize>,
    r_range: Option<String>,
    count: Option<usize>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: StateSpec,
    pub resources: Vec<StateSpec>,
    pub numerics: Numerics,
    pub lattice: OracleLattice,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub gain: GainConvention,
    pub oracle_trunc: usize,
    pub r_range: (f64, f64, f64),
    pub count: usize,
}

/// Subcommand-specific values that can also come from the config file.
#[derive(Debug, Default)]
pub struct Extras {
    pub oracle_trunc: Option<usize>,
    pub r_range: Option<String>,
    pub count: Option<usize>,
    pub default_format: Option<Format>,
}

fn pair(flag: &str, text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("--{flag} expects L:d with 0 < d <= L, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let l: f64 = a.trim().parse().map_err(|_| bad())?;
    let d: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(l > 0.0 && d > 0.0 && d <= l && l.is_finite()) {
        return Err(bad());
    }
    Ok((l, d))
}

pub fn parse_range(text: &str) -> Result<(f64, f64, f64), CliError> {
    let bad = || CliError::usage(format!("--r-range expects start:stop:step with step > 0, got {text:?}"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, s] if s > 0.0 && a >= 0.0 && b >= a && b.is_finite() => Ok((a, b, s)),
        _ => Err(bad()),
    }
}

fn spec(text: &str) -> Result<StateSpec, CliError> {
    StateSpec::from_str(text).map_err(CliError::from)
}

fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, extras: Extras) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => load(p)?,
            None => FileConfig::default(),
        };
        let input = args.input.clone().or(file.input).unwrap_or_else(|| "coherent:0.3+0.2i".into());
        let resources = if !args.resource.is_empty() {
            args.resource.clone()
        } else {
            file.resource.unwrap_or_default()
        };
        let trunc = args.trunc.or(file.trunc).unwrap_or(20);
        let (l, h) = match args.grid.clone().or(file.grid) {
            Some(g) => pair("grid", &g)?,
            None => (6.0, 0.1),
        };
        let defaults = OracleLattice::default();
        let (lm, dm) = match args.mlattice.clone().or(file.mlattice) {
            Some(g) => pair("mlattice", &g)?,
            None => (defaults.half_width, defaults.step),
        };
        let (le, de) = match args.eta_lattice.clone().or(file.eta_lattice) {
            Some(g) => pair("eta-lattice", &g)?,
            None => (defaults.eta_half_width, defaults.eta_step),
        };
        let gain = match args.gain.clone().or(file.gain) {
            Some(g) => g.parse::<GainConvention>().map_err(|_| CliError::usage(format!("--gain must be sqrt2 or literal, got {g:?}")))?,
            None => GainConvention::Sqrt2,
        };
        let r_range = match extras.r_range.or(file.r_range) {
            Some(r) => parse_range(&r)?,
            None => (0.0, 1.0, 0.2),
        };
        let numerics = Numerics::new(trunc, l, h).map_err(|_| CliError::usage(format!("invalid numerics: trunc={trunc}, grid={l}:{h}")))?;
        Ok(Self {
            input: spec(&input)?,
            resources: resources.iter().map(|r| spec(r)).collect::<Result<_, _>>()?,
            numerics,
            lattice: OracleLattice {
                half_width: lm,
                step: dm,
                eta_half_width: le,
                eta_step: de,
            },
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format).or(extras.default_format).unwrap_or(Format::Json),
            seed: args.seed.or(file.seed).unwrap_or(42),
            gain,
            oracle_trunc: extras.oracle_trunc.or(file.oracle_trunc).unwrap_or(12),
            r_range,
            count: extras.count.or(file.count).unwrap_or(200),
        })
    }

    pub fn resource_or(&self, default: &str) -> StateSpec {
        self.resources
            .first()
            .cloned()
            .unwrap_or_else(|| default.parse().expect("default resource parses"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = std::env::temp_dir().join(format!("cvtele-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "trunc = 14\nseed = 7\ngrid = \"5:0.2\"\n").unwrap();
        let args = CommonArgs {
            trunc: Some(16),
            config: Some(path),
            ..CommonArgs::default()
        };
        let cfg = RunConfig::resolve(&args, Extras::default()).unwrap();
        assert_eq!(cfg.numerics.trunc, 16);
        assert_eq!(cfg.seed, 7);
        assert_eq!((cfg.numerics.half_width, cfg.numerics.step), (5.0, 0.2));
        assert_eq!(cfg.lattice, OracleLattice::default());
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn lattice_strings_are_validated() {
        assert!(pair("grid", "6:0.1").is_ok());
        for bad in ["6", "0.1:6", "-1:0.1", "a:b", "6:0"] {
            assert!(pair("grid", bad).is_err(), "{bad}");
        }
        assert_eq!(parse_range("0:1:0.25").unwrap(), (0.0, 1.0, 0.25));
        assert!(parse_range("1:0:0.1").is_err());
    }
}
