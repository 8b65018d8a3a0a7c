//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use lhpvi_core::mobius::Corruption;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A deliberate perturbation for negative-control runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorruptSpec {
    Recurrence(Corruption),
    /// Flip the sign of δ_k (1-based) in the PVI check.
    DeltaSign(usize),
}

impl std::str::FromStr for CorruptSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [what, idx, val] = parts.as_slice() else {
            return Err(format!("expected what:index:value, got {s:?}"));
        };
        let n: usize = idx.parse().map_err(|e| format!("bad index {idx:?}: {e}"))?;
        let factor: f64 = val.parse().map_err(|e| format!("bad value {val:?}: {e}"))?;
        match *what {
            "gamma" => Ok(Self::Recurrence(Corruption::Gamma { n, factor })),
            "beta" => Ok(Self::Recurrence(Corruption::Beta { n, factor })),
            "delta" if factor == -1.0 && (1..=4).contains(&n) => Ok(Self::DeltaSign(n)),
            "delta" => Err("delta corruption must be delta:<1..4>:-1".into()),
            _ => Err(format!("unknown quantity {what:?} (gamma, beta, delta)")),
        }
    }
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// A single deformation parameter t > 1.
    #[arg(long, conflicts_with = "t_grid")]
    pub t: Option<String>,
    /// Comma-separated list of t values.
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<String>>,
    #[arg(long, visible_alias = "n")]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML file with any of the keys above (flags take precedence).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for persisted moment tables.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long)]
    pub timings: bool,
    /// Test hook: gamma:n:factor, beta:n:factor or delta:k:-1.
    #[arg(long)]
    pub corrupt: Option<CorruptSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Num {
    Str(String),
    Int(i64),
    Float(f64),
}

impl Num {
    fn text(&self) -> String {
        match self {
            Num::Str(s) => s.clone(),
            Num::Int(i) => i.to_string(),
            Num::Float(f) => f.to_string(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<Num>,
    beta: Option<Num>,
    mu: Option<Num>,
    t: Option<Num>,
    t_grid: Option<Vec<Num>>,
    n_max: Option<usize>,
    bits: Option<u32>,
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alpha: String,
    pub beta: String,
    pub mu: String,
    pub t_grid: Vec<String>,
    pub n_max: usize,
    pub bits: u32,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub timings: bool,
    pub corrupt: Option<CorruptSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: "0.3".into(),
            beta: "0.7".into(),
            mu: "1.5".into(),
            t_grid: vec!["2".into()],
            n_max: 6,
            bits: 320,
            seed: 7,
            format: Format::Json,
            output: None,
            cache_dir: None,
            timings: false,
            corrupt: None,
        }
    }
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => load_file(p)?,
            None => FileConfig::default(),
        };
        let d = RunConfig::default();
        let pick = |flag: &Option<String>, file: &Option<Num>, default: String| {
            flag.clone().or_else(|| file.as_ref().map(Num::text)).unwrap_or(default)
        };
        let t_grid = if let Some(t) = &args.t {
            vec![t.clone()]
        } else if let Some(g) = &args.t_grid {
            g.clone()
        } else if let Some(t) = &file.t {
            vec![t.text()]
        } else if let Some(g) = &file.t_grid {
            g.iter().map(Num::text).collect()
        } else {
            d.t_grid.clone()
        };
        let cfg = Self {
            alpha: pick(&args.alpha, &file.alpha, d.alpha),
            beta: pick(&args.beta, &file.beta, d.beta),
            mu: pick(&args.mu, &file.mu, d.mu),
            t_grid,
            n_max: args.n_max.or(file.n_max).unwrap_or(d.n_max),
            bits: args.bits.or(file.bits).unwrap_or(d.bits),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            format: args.format.or(file.format).unwrap_or(d.format),
            output: args.output.clone().or(file.output),
            cache_dir: args.cache_dir.clone().or(file.cache_dir),
            timings: args.timings,
            corrupt: args.corrupt,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            bail!("n_max must be at least 1");
        }
        if self.bits < 64 {
            bail!("bits must be at least 64");
        }
        if self.t_grid.is_empty() {
            bail!("empty t grid");
        }
        for t in &self.t_grid {
            let v: f64 = t
                .split_once('/')
                .map(|(a, b)| Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?))
                .unwrap_or_else(|| t.trim().parse().ok())
                .with_context(|| format!("cannot parse t = {t:?}"))?;
            if !(v > 1.0) {
                bail!("t = {t} must exceed 1");
            }
        }
        Ok(())
    }
}
