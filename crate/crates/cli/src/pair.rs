//! Pair manifests: two per-symbol price CSVs plus the formation/trading
//! split index. Series are aligned by date intersection before use.

use std::path::{Path as FsPath, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sigtrade_core::backtest::load_prices;
use sigtrade_core::models::{construct_spread, default_beta_grid, SpreadSpec};
use sigtrade_core::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairManifest {
    pub symbol_a: String,
    pub symbol_b: String,
    pub file_a: PathBuf,
    pub file_b: PathBuf,
    /// Number of leading points in the formation window (default 252).
    #[serde(default = "default_split")]
    pub formation_split: usize,
}

fn default_split() -> usize {
    252
}

#[derive(Debug, Clone)]
pub struct AlignedPair {
    pub symbol_a: String,
    pub symbol_b: String,
    pub dates: Vec<NaiveDate>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn load_manifest(path: &FsPath) -> Result<(PairManifest, AlignedPair)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read manifest {}: {e}", path.display())))?;
    let manifest: PairManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        msg: format!("{}: {e}", path.display()),
    })?;
    let dir = path.parent().unwrap_or_else(|| FsPath::new("."));
    let resolve = |p: &FsPath| -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            dir.join(p)
        }
    };
    let series_a = load_prices::<f64>(resolve(&manifest.file_a), &manifest.symbol_a)?;
    let series_b = load_prices::<f64>(resolve(&manifest.file_b), &manifest.symbol_b)?;

    // Inner join on dates; both series are already date-sorted.
    let mut dates = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    while i < series_a.dates.len() && j < series_b.dates.len() {
        match series_a.dates[i].cmp(&series_b.dates[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dates.push(series_a.dates[i]);
                a.push(series_a.closes[i]);
                b.push(series_b.closes[j]);
                i += 1;
                j += 1;
            }
        }
    }
    if dates.len() < 3 {
        return Err(Error::Validation(format!(
            "only {} overlapping dates between {} and {}",
            dates.len(),
            manifest.symbol_a,
            manifest.symbol_b
        )));
    }
    Ok((
        manifest.clone(),
        AlignedPair {
            symbol_a: manifest.symbol_a,
            symbol_b: manifest.symbol_b,
            dates,
            a,
            b,
        },
    ))
}

#[derive(Debug, Clone)]
pub struct SpreadWindows {
    pub spec: SpreadSpec<f64>,
    /// Spread over the full aligned range, on first-value-normalized prices.
    pub full_values: Vec<f64>,
    pub split: usize,
}

/// Fit the hedge ratio on the formation window and extend the spread over
/// the whole aligned range with the same ratio and normalization.
pub fn build_spread(pair: &AlignedPair, split: usize) -> Result<SpreadWindows> {
    if split < 3 {
        return Err(Error::Validation(format!(
            "formation window needs at least 3 points, got {split}"
        )));
    }
    if split >= pair.dates.len() {
        return Err(Error::Validation(format!(
            "formation split {split} leaves an empty trading window \
             (only {} aligned points)",
            pair.dates.len()
        )));
    }
    let formation_a = &pair.a[..split];
    let formation_b = &pair.b[..split];
    let grid = default_beta_grid(formation_a, formation_b)?;
    let (spec, _) = construct_spread(
        &pair.symbol_a,
        formation_a,
        &pair.symbol_b,
        formation_b,
        &grid,
        1.0,
    )?;
    let a0 = pair.a[0];
    let b0 = pair.b[0];
    let full_values = pair
        .a
        .iter()
        .zip(&pair.b)
        .map(|(&a, &b)| a / a0 - spec.hedge_ratio * b / b0)
        .collect();
    Ok(SpreadWindows {
        spec,
        full_values,
        split,
    })
}
