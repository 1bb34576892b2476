use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use sigtrade_core::backtest::{compute_metrics, equity_curve, write_equity_csv};
use sigtrade_core::engine::{run_sequential, Side, StrategyConfig, TradingCosts};
use sigtrade_core::models::{default_block_length, SampleGenerator};
use sigtrade_core::policy::OptimizerConfig;
use sigtrade_core::signature::Path;
use sigtrade_core::{Error, Result};

use crate::commands::{to_value, write_file, write_json_doc};
use crate::config::{FileConfig, TradeSection};
use crate::pair::{build_spread, load_manifest, SpreadWindows};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    Long,
    Short,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Long => Side::Long,
            SideArg::Short => Side::Short,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorArg {
    /// OU parameters fitted once on the formation window
    OuFit,
    /// Difference-block bootstrap of the formation spread
    Bootstrap,
}

#[derive(Debug, Args)]
pub struct TradeArgs {
    /// Pair manifest JSON
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorArg>,
    /// Bootstrap block length (default max(5, formation/10))
    #[arg(long)]
    pub block_length: Option<usize>,
    #[arg(long, short = 'n')]
    pub order: Option<usize>,
    /// Training sample count per stopping problem
    #[arg(long)]
    pub samples: Option<usize>,
    /// Grid points below which no new problem is opened
    #[arg(long)]
    pub min_window: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long)]
    pub init_scale: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub sharpness: Option<f64>,
    #[arg(long)]
    pub entry_cost: Option<f64>,
    #[arg(long)]
    pub exit_cost: Option<f64>,
    #[arg(long)]
    pub entry_rate: Option<f64>,
    #[arg(long)]
    pub exit_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory the artifacts are written into
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedTrade {
    pub manifest: PathBuf,
    pub side: SideArg,
    pub generator: GeneratorArg,
    pub block_length: Option<usize>,
    pub order: usize,
    pub samples: usize,
    pub min_window: usize,
    pub iterations: usize,
    pub step_size: f64,
    pub init_scale: f64,
    pub threshold: f64,
    pub sharpness: f64,
    pub entry_cost: f64,
    pub exit_cost: f64,
    pub entry_rate: f64,
    pub exit_rate: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

fn parse_side(name: &str) -> Result<SideArg> {
    SideArg::from_str(name, true).map_err(|_| Error::Validation(format!("unknown side '{name}'")))
}

fn parse_generator(name: &str) -> Result<GeneratorArg> {
    GeneratorArg::from_str(name, true)
        .map_err(|_| Error::Validation(format!("unknown generator '{name}'")))
}

pub fn resolve(
    args: &TradeArgs,
    section: &TradeSection,
    file: &FileConfig,
) -> Result<ResolvedTrade> {
    let side = match args.side {
        Some(s) => s,
        None => match &section.side {
            Some(name) => parse_side(name)?,
            None => SideArg::Long,
        },
    };
    let generator = match args.generator {
        Some(g) => g,
        None => match &section.generator {
            Some(name) => parse_generator(name)?,
            None => GeneratorArg::OuFit,
        },
    };
    Ok(ResolvedTrade {
        manifest: args
            .manifest
            .clone()
            .or(section.manifest.clone())
            .ok_or_else(|| Error::Validation("no pair manifest given (--manifest)".into()))?,
        side,
        generator,
        block_length: args.block_length.or(section.block_length),
        order: args.order.or(section.order).unwrap_or(3),
        samples: args.samples.or(section.samples).unwrap_or(100),
        min_window: args.min_window.or(section.min_window).unwrap_or(10),
        iterations: args.iterations.or(section.iterations).unwrap_or(200),
        step_size: args.step_size.or(section.step_size).unwrap_or(0.01),
        init_scale: args.init_scale.or(section.init_scale).unwrap_or(0.1),
        threshold: args.threshold.or(section.threshold).unwrap_or(0.05),
        sharpness: args.sharpness.or(section.sharpness).unwrap_or(20.0),
        entry_cost: args.entry_cost.or(section.entry_cost).unwrap_or(0.0),
        exit_cost: args.exit_cost.or(section.exit_cost).unwrap_or(0.0),
        entry_rate: args.entry_rate.or(section.entry_rate).unwrap_or(0.0),
        exit_rate: args.exit_rate.or(section.exit_rate).unwrap_or(0.0),
        seed: args.seed.or(section.seed).or(file.seed).unwrap_or(42),
        out_dir: args
            .out_dir
            .clone()
            .or(section.out_dir.clone())
            .ok_or_else(|| Error::Validation("no output directory given (--out-dir)".into()))?,
    })
}

impl ResolvedTrade {
    pub fn costs(&self) -> TradingCosts<f64> {
        TradingCosts {
            entry_cost: self.entry_cost,
            exit_cost: self.exit_cost,
            entry_rate: self.entry_rate,
            exit_rate: self.exit_rate,
        }
    }

    pub fn strategy_config(&self) -> StrategyConfig<f64> {
        StrategyConfig {
            side: self.side.into(),
            order: self.order,
            sample_count: self.samples,
            min_window: self.min_window,
            optimizer: OptimizerConfig {
                iterations: self.iterations,
                step_size: self.step_size,
                init_scale: self.init_scale,
                seed: self.seed,
                sharpness: self.sharpness,
                threshold: self.threshold,
            },
        }
    }
}

/// Everything a trading run needs once the manifest is resolved.
pub struct PreparedRun {
    pub windows: SpreadWindows,
    pub trading_path: Path<f64>,
    pub trading_dates: Vec<chrono::NaiveDate>,
    pub generator: SampleGenerator<f64>,
    /// Spread values before the split, for baseline lookback extension.
    pub formation_values: Vec<f64>,
}

pub fn prepare(resolved: &ResolvedTrade) -> Result<PreparedRun> {
    let (manifest, aligned) = load_manifest(&resolved.manifest)?;
    if manifest.formation_split >= aligned.dates.len() {
        return Err(Error::Validation(format!(
            "formation split {} leaves an empty trading window ({} aligned points)",
            manifest.formation_split,
            aligned.dates.len()
        )));
    }
    let windows = build_spread(&aligned, manifest.formation_split)?;
    let split = windows.split;
    let trading_values = windows.full_values[split..].to_vec();
    if trading_values.len() < 2 {
        return Err(Error::Validation(
            "trading window has fewer than 2 points".into(),
        ));
    }
    let times: Vec<f64> = (0..trading_values.len()).map(|j| j as f64).collect();
    let trading_path = Path::from_values(times, trading_values)?;
    let formation_values = windows.full_values[..split].to_vec();
    let generator = match resolved.generator {
        GeneratorArg::OuFit => SampleGenerator::Ou {
            params: windows.spec.fitted,
        },
        GeneratorArg::Bootstrap => SampleGenerator::Bootstrap {
            block_length: resolved
                .block_length
                .unwrap_or_else(|| default_block_length(formation_values.len())),
            source: formation_values.clone(),
        },
    };
    Ok(PreparedRun {
        windows,
        trading_path,
        trading_dates: aligned.dates[split..].to_vec(),
        generator,
        formation_values,
    })
}

pub fn run(args: TradeArgs, file: &FileConfig) -> Result<()> {
    let section = file.trade.clone().unwrap_or_default();
    let resolved = resolve(&args, &section, file)?;
    let prepared = prepare(&resolved)?;
    let config = resolved.strategy_config();
    let costs = resolved.costs();

    let schedule = run_sequential(&prepared.trading_path, &prepared.generator, &config, &costs)?;
    let equity = equity_curve(&prepared.trading_path, &schedule, &costs)?;
    let report = compute_metrics(&equity, &schedule)?;

    let config_value = to_value(&resolved);
    let out = &resolved.out_dir;
    write_json_doc(
        Some(&out.join("schedule.json")),
        config_value.clone(),
        "schedule",
        serde_json::from_str(&schedule.to_json()).expect("schedule JSON parses back"),
    )?;
    write_json_doc(
        Some(&out.join("report.json")),
        config_value.clone(),
        "report",
        serde_json::json!({
            "spread": prepared.windows.spec,
            "strategy": report,
        }),
    )?;
    let mut buf = Vec::new();
    write_equity_csv(
        &mut buf,
        &[format!("config: {config_value}")],
        Some(&prepared.trading_dates),
        &equity,
        None,
    )?;
    write_file(&out.join("equity.csv"), &buf)?;
    println!(
        "{} trades, cum_pnl {:.4}%, artifacts in {}",
        schedule.trades.len(),
        report.cum_pnl,
        out.display()
    );
    Ok(())
}
