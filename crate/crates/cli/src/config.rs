//! Run configuration: an optional TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde::Deserialize;

use ppgmres_core::balance::BalanceMethod;
use ppgmres_core::drivers::{EigConfig, PPGmresConfig, PolySpec};
use ppgmres_core::operators::{preset, read_matrix_market, MatrixOperator};
use ppgmres_core::stability::StabilityMode;

/// Contents of a `--config` file. Every table is optional; a flag given on
/// the command line wins over the file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub matrix: Option<String>,
    pub matrix_seed: Option<u64>,
    pub rhs_seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub solve: Option<PPGmresConfig>,
    pub eig: Option<EigConfig>,
    pub poly: Option<PolySpec>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    /// Preset name (example1, example2, example3, example4, example7,
    /// example9, rays:<angle>, hatano) or mm:<path> for a Matrix Market file.
    #[arg(long)]
    pub matrix: Option<String>,
    /// Seed for the random parts of generated matrices.
    #[arg(long)]
    pub matrix_seed: Option<u64>,
}

impl MatrixArgs {
    pub fn load(&self, file: &FileConfig) -> anyhow::Result<(String, MatrixOperator)> {
        let name = match (&self.matrix, &file.matrix) {
            (Some(m), _) | (None, Some(m)) => m.clone(),
            (None, None) => bail!("no matrix given; pass --matrix or set `matrix` in the config file"),
        };
        let seed = self.matrix_seed.or(file.matrix_seed).unwrap_or(1);
        let op = open_matrix(&name, seed)?;
        Ok((name, op))
    }
}

pub fn open_matrix(name: &str, seed: u64) -> anyhow::Result<MatrixOperator> {
    match name.strip_prefix("mm:") {
        Some(path) => {
            let m = read_matrix_market(path).with_context(|| format!("reading {path}"))?;
            Ok(MatrixOperator::new(m, path)?)
        }
        None => Ok(preset(name, seed)?),
    }
}

#[derive(Debug, Clone, Args)]
pub struct PolyArgs {
    /// Polynomial degree.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_parser = parse_balance)]
    pub balance: Option<BalanceMethod>,
    /// Half-width of the interval for balance method 5.
    #[arg(long)]
    pub balance_a: Option<f64>,
    /// Largest inner degree for balance method 4.
    #[arg(long)]
    pub b4_inner_max: Option<usize>,
    /// off, standard or indefinite.
    #[arg(long, value_parser = parse_stability)]
    pub stability: Option<StabilityMode>,
    /// Roots with log10 pof above this get extra copies.
    #[arg(long)]
    pub pofcutoff: Option<f64>,
    /// Residual norm above which a high-pof root counts as spurious.
    #[arg(long)]
    pub rncutoff: Option<f64>,
}

fn parse_balance(s: &str) -> Result<BalanceMethod, String> {
    s.parse().map_err(|e: ppgmres_core::Error| e.to_string())
}

fn parse_stability(s: &str) -> Result<StabilityMode, String> {
    s.parse().map_err(|e: ppgmres_core::Error| e.to_string())
}

impl PolyArgs {
    pub fn apply(&self, spec: &mut PolySpec) {
        if let Some(d) = self.d {
            spec.d = d;
        }
        if let Some(b) = self.balance {
            spec.balance = b;
        }
        if self.balance_a.is_some() {
            spec.balance_a = self.balance_a;
        }
        if let Some(k) = self.b4_inner_max {
            spec.b4_inner_max = k;
        }
        if let Some(m) = self.stability {
            spec.stability.mode = m;
        }
        if let Some(p) = self.pofcutoff {
            spec.stability.pofcutoff_log10 = p;
        }
        if let Some(r) = self.rncutoff {
            spec.stability.rncutoff = r;
        }
    }
}

/// `lo:hi:step`.
pub fn parse_range(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("expected lo:hi:step, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(lo)?, num(hi)?, num(step)?))
}

/// `xlo:xhi:nx,ylo:yhi:ny`.
pub fn parse_grid(s: &str) -> Result<ppgmres_core::analysis::Grid, String> {
    let axis = |t: &str| -> Result<(f64, f64, usize), String> {
        let (lo, hi, n) = parse_range(t)?;
        if n < 1.0 || n.fract() != 0.0 {
            return Err(format!("point count must be a positive integer in {t:?}"));
        }
        Ok((lo, hi, n as usize))
    };
    let Some((x, y)) = s.split_once(',') else {
        return Err(format!("expected xlo:xhi:nx,ylo:yhi:ny, got {s:?}"));
    };
    let (x_lo, x_hi, nx) = axis(x)?;
    let (y_lo, y_hi, ny) = axis(y)?;
    Ok(ppgmres_core::analysis::Grid {
        x_lo,
        x_hi,
        nx,
        y_lo,
        y_hi,
        ny,
    })
}

/// `m,k` for the Arnoldi subspace size and the number of vectors kept.
pub fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected m,k, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(b)?))
}
