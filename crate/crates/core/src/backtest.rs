//! Price ingestion, the moving-band baseline, equity accounting, and the
//! performance metric set used for head-to-head strategy comparison.
//!
//! Accounting conventions: one unit of notional per trade on an initial
//! capital of 1.0; returns are arithmetic per-period equity changes over
//! initial capital; the entry cost is booked at the first valuation after
//! entry and the exit cost at the exit valuation; moving statistics use a
//! strict lookback (the current observation is excluded) and population
//! standard deviation.

use std::io::Write;
use std::path::Path as FsPath;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::engine::{Side, Trade, TradeSchedule, TradingCosts};
use crate::error::{Error, Result};
use crate::scalar::{cast, cast_usize, Scalar};
use crate::signature::Path;

/// Daily closes for one symbol, sorted by date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries<T> {
    pub symbol: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<T>,
}

/// Parse a `date,close` CSV (ISO-8601 dates). Rows are re-sorted by date;
/// duplicate dates, missing fields, and non-positive closes are rejected
/// with their line numbers.
pub fn load_prices<T: Scalar>(path: impl AsRef<FsPath>, symbol: &str) -> Result<PriceSeries<T>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Validation(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_reader(file);
    {
        let headers = reader.headers().map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        let names: Vec<String> = headers.iter().map(|h| h.trim().to_lowercase()).collect();
        if names != ["date", "close"] {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header 'date,close', found '{}'", names.join(",")),
            });
        }
    }
    let mut rows: Vec<(NaiveDate, T)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            msg: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let date =
            NaiveDate::parse_from_str(record[0].trim(), "%Y-%m-%d").map_err(|e| Error::Parse {
                line,
                msg: format!("bad date '{}': {e}", &record[0]),
            })?;
        let close_text = record[1].trim();
        if close_text.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "missing close".into(),
            });
        }
        let close: f64 = close_text.parse().map_err(|e| Error::Parse {
            line,
            msg: format!("bad close '{close_text}': {e}"),
        })?;
        if close <= 0.0 || !close.is_finite() {
            return Err(Error::Validation(format!(
                "line {line}: close must be positive and finite, got {close_text}"
            )));
        }
        rows.push((date, cast::<T>(close)));
    }
    if rows.is_empty() {
        return Err(Error::Validation(format!(
            "{}: no price rows",
            path.display()
        )));
    }
    rows.sort_by_key(|(d, _)| *d);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Validation(format!(
                "duplicate date {} in {}",
                w[0].0,
                path.display()
            )));
        }
    }
    let (dates, closes) = rows.into_iter().unzip();
    Ok(PriceSeries {
        symbol: symbol.to_string(),
        dates,
        closes,
    })
}

/// Moving-band baseline settings: band multiple and lookback window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig<T> {
    pub band_mult: T,
    pub window: usize,
}

impl<T: Scalar> Default for BaselineConfig<T> {
    fn default() -> Self {
        Self {
            band_mult: cast(0.1),
            window: 100,
        }
    }
}

impl<T: Scalar> BaselineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidArgument("window must be >= 2".into()));
        }
        if self.band_mult < T::zero() || !self.band_mult.is_finite() {
            return Err(Error::InvalidArgument(
                "band_mult must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Long-only band rule: enter at the first index `j >= window` with
/// `X_j < MA_j − k·Std_j` (statistics over the preceding `window` values,
/// excluding `j`), exit at the first later index with
/// `X_j > MA_j + k·Std_j`, repeat; an open position is force-closed at the
/// final index.
pub fn baseline_strategy<T: Scalar>(
    spread: &Path<T>,
    config: &BaselineConfig<T>,
) -> Result<TradeSchedule<T>> {
    config.validate()?;
    if spread.dimension() != 1 {
        return Err(Error::InvalidArgument(
            "baseline expects a 1-D spread".into(),
        ));
    }
    let values = spread.coordinate(0);
    if values.len() <= config.window {
        return Err(Error::InvalidArgument(format!(
            "spread length {} must exceed window {}",
            values.len(),
            config.window
        )));
    }
    let last = values.len() - 1;
    let w = config.window;
    let wf = cast_usize::<T>(w);
    let mut schedule = TradeSchedule::empty(Side::Long);
    let mut open: Option<usize> = None;
    for j in w..values.len() {
        let lookback = &values[j - w..j];
        let mean = lookback.iter().copied().sum::<T>() / wf;
        let var = lookback.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / wf;
        let band = config.band_mult * var.sqrt();
        match open {
            None => {
                // never enter at the last index: there is no room to exit
                if j < last && values[j] < mean - band {
                    open = Some(j);
                }
            }
            Some(entry) => {
                if values[j] > mean + band {
                    schedule.trades.push(Trade {
                        entry_index: entry,
                        exit_index: j,
                        entry_value: values[entry],
                        exit_value: values[j],
                    });
                    open = None;
                }
            }
        }
    }
    if let Some(entry) = open {
        schedule.trades.push(Trade {
            entry_index: entry,
            exit_index: last,
            entry_value: values[entry],
            exit_value: values[last],
        });
        schedule.forced_close = true;
    }
    schedule.validate(last)?;
    Ok(schedule)
}

/// Cumulative strategy value on the spread's grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquityCurve<T> {
    values: Vec<T>,
}

impl<T: Scalar> EquityCurve<T> {
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(
                "equity curve needs at least 2 points".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("equity must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// First differences of the equity values.
    pub fn per_period_changes(&self) -> Vec<T> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Mark a schedule to market at unit notional: while flat equity is
/// unchanged, while in a position each step adds `±(X_{j+1} − X_j)`.
pub fn equity_curve<T: Scalar>(
    spread: &Path<T>,
    schedule: &TradeSchedule<T>,
    costs: &TradingCosts<T>,
) -> Result<EquityCurve<T>> {
    costs.validate()?;
    let values = spread.coordinate(0);
    let last = values.len() - 1;
    for (i, t) in schedule.trades.iter().enumerate() {
        if t.exit_index > last {
            return Err(Error::InvalidArgument(format!(
                "trade {i} exits at {} beyond the spread grid {last}",
                t.exit_index
            )));
        }
    }
    schedule.validate(last)?;
    let sign = match schedule.side {
        Side::Long => T::one(),
        Side::Short => -T::one(),
    };
    let mut flows = vec![T::zero(); values.len()];
    let mut in_position = vec![false; values.len()]; // during step j -> j+1
    for t in &schedule.trades {
        flows[t.entry_index + 1] -= costs.entry_cost;
        flows[t.exit_index] -= costs.exit_cost;
        for slot in &mut in_position[t.entry_index..t.exit_index] {
            *slot = true;
        }
    }
    let mut equity = Vec::with_capacity(values.len());
    let mut level = T::one();
    equity.push(level);
    for j in 1..values.len() {
        if in_position[j - 1] {
            level += sign * (values[j] - values[j - 1]);
        }
        level += flows[j];
        equity.push(level);
    }
    EquityCurve::from_values(equity)
}

/// The comparison metric set. Percentages are ×100; `sharpe` is `None` when
/// the per-period standard deviation is zero. The annualized pair scales by
/// 252 (mean) and √252 (standard deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport<T> {
    pub daily_ret: T,
    pub daily_std: T,
    pub sharpe: Option<T>,
    pub max_dd: T,
    pub cum_pnl: T,
    pub trade_num: usize,
    pub annualized_ret: T,
    pub annualized_std: T,
}

/// Metrics of an equity curve; per-period changes are taken over the
/// initial capital (the curve's first value).
pub fn compute_metrics<T: Scalar>(
    curve: &EquityCurve<T>,
    schedule: &TradeSchedule<T>,
) -> Result<PerformanceReport<T>> {
    let values = curve.values();
    let base = values[0];
    if base <= T::zero() || base.is_nan() {
        return Err(Error::InvalidArgument(
            "initial capital must be positive".into(),
        ));
    }
    let hundred = cast::<T>(100.0);
    let changes = curve.per_period_changes();
    let nf = cast_usize::<T>(changes.len());
    let mean = changes.iter().copied().sum::<T>() / nf;
    let var = changes.iter().map(|&d| (d - mean) * (d - mean)).sum::<T>() / nf;
    let std = var.sqrt();
    let daily_ret = mean / base * hundred;
    let daily_std = std / base * hundred;
    let sharpe = if std == T::zero() {
        None
    } else {
        Some(daily_ret / daily_std)
    };
    let mut peak = values[0];
    let mut max_dd = T::zero();
    for &v in values {
        if v > peak {
            peak = v;
        }
        let dd = (v - peak) / base;
        if dd < max_dd {
            max_dd = dd;
        }
    }
    let cum_pnl = (*values.last().unwrap() - base) / base * hundred;
    let year = cast::<T>(252.0);
    Ok(PerformanceReport {
        daily_ret,
        daily_std,
        sharpe,
        max_dd: max_dd * hundred,
        cum_pnl,
        trade_num: schedule.trades.len(),
        annualized_ret: daily_ret * year,
        annualized_std: daily_std * year.sqrt(),
    })
}

/// A strategy-vs-baseline comparison on one spread.
#[derive(Debug, Clone)]
pub struct StrategyComparison<T> {
    pub strategy: PerformanceReport<T>,
    pub baseline: PerformanceReport<T>,
    pub strategy_equity: EquityCurve<T>,
    pub baseline_equity: EquityCurve<T>,
}

/// Run both schedules through the same accounting and metric pipeline.
pub fn compare<T: Scalar>(
    spread: &Path<T>,
    strategy_schedule: &TradeSchedule<T>,
    baseline_schedule: &TradeSchedule<T>,
    costs: &TradingCosts<T>,
) -> Result<StrategyComparison<T>> {
    let strategy_equity = equity_curve(spread, strategy_schedule, costs)?;
    let baseline_equity = equity_curve(spread, baseline_schedule, costs)?;
    Ok(StrategyComparison {
        strategy: compute_metrics(&strategy_equity, strategy_schedule)?,
        baseline: compute_metrics(&baseline_equity, baseline_schedule)?,
        strategy_equity,
        baseline_equity,
    })
}

/// Write aligned equity curves as `index,date,equity_strategy,equity_baseline`
/// CSV, preceded by `#`-prefixed audit header lines. The baseline column is
/// left empty when no baseline was run.
pub fn write_equity_csv<T: Scalar, W: Write>(
    mut out: W,
    header_lines: &[String],
    dates: Option<&[NaiveDate]>,
    strategy: &EquityCurve<T>,
    baseline: Option<&EquityCurve<T>>,
) -> Result<()> {
    if let Some(b) = baseline {
        if strategy.len() != b.len() {
            return Err(Error::ShapeMismatch(format!(
                "strategy curve has {} points, baseline {}",
                strategy.len(),
                b.len()
            )));
        }
    }
    if let Some(d) = dates {
        if d.len() != strategy.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} dates vs {} equity points",
                d.len(),
                strategy.len()
            )));
        }
    }
    for line in header_lines {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "index,date,equity_strategy,equity_baseline")?;
    for j in 0..strategy.len() {
        let date = dates.map(|d| d[j].to_string()).unwrap_or_default();
        let base = baseline
            .map(|b| b.values()[j].to_string())
            .unwrap_or_default();
        writeln!(out, "{j},{date},{},{base}", strategy.values()[j])?;
    }
    Ok(())
}
