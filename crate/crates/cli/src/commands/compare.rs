use clap::Args;
use serde::Serialize;
use sigtrade_core::backtest::{baseline_strategy, compare, write_equity_csv, BaselineConfig};
use sigtrade_core::engine::run_sequential;
use sigtrade_core::signature::Path;
use sigtrade_core::Result;

use crate::commands::trade::{prepare, resolve, ResolvedTrade, TradeArgs};
use crate::commands::{to_value, write_file, write_json_doc};
use crate::config::FileConfig;

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    trade: TradeArgs,
    /// Baseline band multiple on the moving standard deviation
    #[arg(long)]
    band_mult: Option<f64>,
    /// Baseline lookback window
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Debug, Serialize)]
struct ResolvedCompare {
    #[serde(flatten)]
    trade: ResolvedTrade,
    band_mult: f64,
    window: usize,
}

pub fn run(args: CompareArgs, file: &FileConfig) -> Result<()> {
    let section = file.compare.clone().unwrap_or_default();
    let trade = resolve(&args.trade, &section.trade, file)?;
    let resolved = ResolvedCompare {
        trade,
        band_mult: args.band_mult.or(section.band_mult).unwrap_or(0.1),
        window: args.window.or(section.window).unwrap_or(100),
    };
    let prepared = prepare(&resolved.trade)?;
    let config = resolved.trade.strategy_config();
    let costs = resolved.trade.costs();

    let strategy_schedule =
        run_sequential(&prepared.trading_path, &prepared.generator, &config, &costs)?;

    // The baseline's moving statistics may look back across the split so its
    // first tradable index aligns with the start of the trading window.
    let baseline_config = BaselineConfig {
        band_mult: resolved.band_mult,
        window: resolved.window,
    };
    let lead = resolved.window.min(prepared.formation_values.len());
    let trading_values = prepared.trading_path.coordinate(0);
    let mut extended = prepared.formation_values[prepared.formation_values.len() - lead..].to_vec();
    extended.extend_from_slice(&trading_values);
    let ext_times: Vec<f64> = (0..extended.len()).map(|j| j as f64).collect();
    let ext_path = Path::from_values(ext_times, extended)?;
    let mut baseline_schedule = baseline_strategy(&ext_path, &baseline_config)?;
    // Entries only occur at indices >= window >= lead, so the shift back to
    // trading-window coordinates never underflows.
    for t in &mut baseline_schedule.trades {
        t.entry_index -= lead;
        t.exit_index -= lead;
    }

    let comparison = compare(
        &prepared.trading_path,
        &strategy_schedule,
        &baseline_schedule,
        &costs,
    )?;

    let config_value = to_value(&resolved);
    let out = &resolved.trade.out_dir;
    write_json_doc(
        Some(&out.join("comparison.json")),
        config_value.clone(),
        "comparison",
        serde_json::json!({
            "spread": prepared.windows.spec,
            "strategy": comparison.strategy,
            "baseline": comparison.baseline,
        }),
    )?;
    write_json_doc(
        Some(&out.join("schedule_strategy.json")),
        config_value.clone(),
        "schedule",
        serde_json::from_str(&strategy_schedule.to_json()).expect("schedule JSON parses back"),
    )?;
    write_json_doc(
        Some(&out.join("schedule_baseline.json")),
        config_value.clone(),
        "schedule",
        serde_json::from_str(&baseline_schedule.to_json()).expect("schedule JSON parses back"),
    )?;
    let mut buf = Vec::new();
    write_equity_csv(
        &mut buf,
        &[format!("config: {config_value}")],
        Some(&prepared.trading_dates),
        &comparison.strategy_equity,
        Some(&comparison.baseline_equity),
    )?;
    write_file(&out.join("equity.csv"), &buf)?;
    println!(
        "strategy: {} trades, cum_pnl {:.4}% | baseline: {} trades, cum_pnl {:.4}% | artifacts in {}",
        comparison.strategy.trade_num,
        comparison.strategy.cum_pnl,
        comparison.baseline.trade_num,
        comparison.baseline.cum_pnl,
        out.display(),
    );
    Ok(())
}
