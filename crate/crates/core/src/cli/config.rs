//! Run configuration: command-line flags layered over an optional JSON file
//! layered over built-in defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::format::Num;
use super::CliError;
use crate::model::JcmParams;

pub const TOLERANCE_ENV: &str = "JCM_LADDER_TOLERANCE";

pub const DEFAULT_OMEGA: f64 = 1.0;
pub const DEFAULT_G: f64 = 0.2;
pub const DEFAULT_HALF_SPLITTING: f64 = 0.4;
pub const DEFAULT_N_MAX: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Mode frequency ω.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Coupling g.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    /// Half the atomic level splitting.
    #[arg(long = "Delta", id = "Delta", allow_hyphen_values = true)]
    pub half_splitting: Option<f64>,
    /// Detuning ω − 2Δ (alternative to --Delta).
    #[arg(long = "delta", id = "delta", conflicts_with = "Delta", allow_hyphen_values = true)]
    pub detuning: Option<f64>,
    /// Fock cutoff N; the field holds photon numbers 0..=N.
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Scale of the lowering operator.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Shift of the J0 generator.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Single excitation index.
    #[arg(long, conflicts_with = "n_range")]
    pub n: Option<usize>,
    /// Inclusive excitation range A:B.
    #[arg(long = "n-range", id = "n_range")]
    pub n_range: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat JSON file with any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Per-check tolerance override, id=value (repeatable).
    #[arg(long = "tol", value_name = "ID=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub omega: Option<f64>,
    pub g: Option<f64>,
    #[serde(rename = "Delta")]
    pub half_splitting: Option<f64>,
    #[serde(rename = "delta")]
    pub detuning: Option<f64>,
    pub n_max: Option<usize>,
    pub beta: Option<f64>,
    pub nu: Option<f64>,
    pub n: Option<usize>,
    pub n_range: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub tol: Option<BTreeMap<String, f64>>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: JcmParams,
    pub n_max: usize,
    pub beta: f64,
    pub nu: f64,
    pub n_range: Option<(usize, usize)>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub global_tolerance: Option<f64>,
    pub tol: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: JcmParams::new(DEFAULT_OMEGA, DEFAULT_G, DEFAULT_HALF_SPLITTING)
                .expect("default parameters are valid"),
            n_max: DEFAULT_N_MAX,
            beta: 1.0,
            nu: 0.0,
            n_range: None,
            format: Format::Json,
            out: None,
            global_tolerance: None,
            tol: BTreeMap::new(),
        }
    }
}

/// Echo of the effective configuration in reports.
#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub omega: Num,
    pub g: Num,
    #[serde(rename = "Delta")]
    pub half_splitting: Num,
    #[serde(rename = "delta")]
    pub detuning: Num,
    pub n_max: usize,
    pub beta: Num,
    pub nu: Num,
    pub n_range: Option<[usize; 2]>,
    pub format: Format,
    pub tolerance: Option<Num>,
    pub tol: BTreeMap<String, Num>,
}

impl RunConfig {
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            omega: Num(self.params.omega()),
            g: Num(self.params.g()),
            half_splitting: Num(self.params.half_splitting()),
            detuning: Num(self.params.detuning()),
            n_max: self.n_max,
            beta: Num(self.beta),
            nu: Num(self.nu),
            n_range: self.n_range.map(|(a, b)| [a, b]),
            format: self.format,
            tolerance: self.global_tolerance.map(Num),
            tol: self.tol.iter().map(|(k, v)| (k.clone(), Num(*v))).collect(),
        }
    }

    /// Requested excitation indices, defaulting to every n with a complete
    /// dressed pair.
    pub fn excitations(&self) -> Vec<usize> {
        match self.n_range {
            Some((a, b)) => (a..=b).collect(),
            None => (0..self.n_max).collect(),
        }
    }
}

pub fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        message: format!("cannot read {}: {e}", path.display()),
        field: None,
        line: None,
        column: None,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<FileConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: FileConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config {
            message: inner.to_string(),
            field: (path != ".").then_some(path),
            line: Some(inner.line()),
            column: Some(inner.column()),
        }
    })?;
    if cfg.half_splitting.is_some() && cfg.detuning.is_some() {
        return Err(CliError::Config {
            message: "Delta and delta are mutually exclusive".into(),
            field: Some("Delta/delta".into()),
            line: None,
            column: None,
        });
    }
    Ok(cfg)
}

fn usage(field: &str, message: impl Into<String>) -> CliError {
    CliError::Usage {
        message: message.into(),
        field: Some(field.into()),
    }
}

fn parse_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || usage("n_range", format!("expected A:B with A <= B, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_tolerance(field: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(usage(field, format!("tolerance must be positive and finite, got {value}")))
    }
}

/// Merge flags over the config file over defaults. `env_tolerance` is the
/// raw value of the global tolerance variable, if set.
pub fn resolve(args: &CommonArgs, env_tolerance: Option<&str>) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(p) => load_config(p)?,
        None => FileConfig::default(),
    };
    let defaults = RunConfig::default();

    let omega = args.omega.or(file.omega).unwrap_or(DEFAULT_OMEGA);
    let g = args.g.or(file.g).unwrap_or(DEFAULT_G);
    // The detuning is set as a unit: whichever form the highest layer gives.
    let params = match (args.half_splitting, args.detuning, file.half_splitting, file.detuning) {
        (Some(d), _, _, _) => JcmParams::new(omega, g, d),
        (None, Some(det), _, _) => JcmParams::from_detuning(omega, g, det),
        (None, None, Some(d), _) => JcmParams::new(omega, g, d),
        (None, None, None, Some(det)) => JcmParams::from_detuning(omega, g, det),
        (None, None, None, None) => JcmParams::new(omega, g, DEFAULT_HALF_SPLITTING),
    }
    .map_err(|e| CliError::Usage {
        message: e.to_string(),
        field: None,
    })?;

    let n_max = args.n_max.or(file.n_max).unwrap_or(defaults.n_max);
    if n_max < 1 {
        return Err(usage("n_max", "n_max must be at least 1"));
    }
    let beta = args.beta.or(file.beta).unwrap_or(defaults.beta);
    if !beta.is_finite() || beta == 0.0 {
        return Err(usage("beta", format!("beta must be finite and nonzero, got {beta}")));
    }
    let nu = args.nu.or(file.nu).unwrap_or(defaults.nu);
    if !nu.is_finite() {
        return Err(usage("nu", "nu must be finite"));
    }

    let n_range = if let Some(n) = args.n {
        Some((n, n))
    } else if let Some(r) = &args.n_range {
        Some(parse_range(r)?)
    } else if let Some(n) = file.n {
        if file.n_range.is_some() {
            return Err(usage("n/n_range", "n and n_range are mutually exclusive"));
        }
        Some((n, n))
    } else {
        file.n_range.as_deref().map(parse_range).transpose()?
    };
    if let Some((_, b)) = n_range {
        if b >= n_max {
            return Err(usage(
                "n_range",
                format!("excitation index {b} needs n_max >= {}", b + 1),
            ));
        }
    }

    let global_tolerance = match env_tolerance {
        Some(raw) => {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| usage(TOLERANCE_ENV, format!("not a number: {raw:?}")))?;
            Some(parse_tolerance(TOLERANCE_ENV, v)?)
        }
        None => None,
    };

    let mut tol = BTreeMap::new();
    for (id, v) in file.tol.unwrap_or_default() {
        let field = format!("tol.{id}");
        tol.insert(id, parse_tolerance(&field, v)?);
    }
    for item in &args.tol {
        let (id, v) = item
            .split_once('=')
            .ok_or_else(|| usage("tol", format!("expected ID=VALUE, got {item:?}")))?;
        let field = format!("tol.{id}");
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(&field, format!("not a number: {v:?}")))?;
        tol.insert(id.trim().to_string(), parse_tolerance(&field, v)?);
    }

    Ok(RunConfig {
        params,
        n_max,
        beta,
        nu,
        n_range,
        format: args.format.or(file.format).unwrap_or_default(),
        out: args.out.clone().or(file.out),
        global_tolerance,
        tol,
    })
}
