use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use sigtrade_core::engine::{entry_payoff, exit_payoff, Side, TradingCosts};
use sigtrade_core::models::{generate_training_set, OuParams, SampleGenerator, TimeGrid};
use sigtrade_core::policy::{train, OptimizerConfig};
use sigtrade_core::{Error, Result};

use crate::commands::{to_value, write_json_doc};
use crate::config::FileConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffArg {
    /// Y = X (stop on highs)
    Identity,
    /// Y = e^{-rt}(-X - c)
    LongEntry,
    /// Y = e^{-rt}(X - c)
    LongExit,
    /// Y = e^{-rt}(X - c) on the entry leg
    ShortEntry,
    /// Y = e^{-rt}(-X - c) on the exit leg
    ShortExit,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    mean: Option<f64>,
    #[arg(long)]
    speed: Option<f64>,
    #[arg(long)]
    vol: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Training sample count
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, short = 'n')]
    order: Option<usize>,
    /// Payoff evaluated on raw sample values
    #[arg(long, value_enum)]
    payoff: Option<PayoffArg>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    step_size: Option<f64>,
    #[arg(long)]
    init_scale: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    sharpness: Option<f64>,
    #[arg(long)]
    entry_cost: Option<f64>,
    #[arg(long)]
    exit_cost: Option<f64>,
    #[arg(long)]
    entry_rate: Option<f64>,
    #[arg(long)]
    exit_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output policy JSON (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Resolved {
    mean_level: f64,
    speed: f64,
    vol: f64,
    x0: f64,
    steps: usize,
    t_max: f64,
    samples: usize,
    order: usize,
    payoff: PayoffArg,
    iterations: usize,
    step_size: f64,
    init_scale: f64,
    threshold: f64,
    sharpness: f64,
    entry_cost: f64,
    exit_cost: f64,
    entry_rate: f64,
    exit_rate: f64,
    seed: u64,
}

fn parse_payoff(name: &str) -> Result<PayoffArg> {
    PayoffArg::from_str(name, true)
        .map_err(|_| Error::Validation(format!("unknown payoff '{name}'")))
}

pub fn run(args: TrainArgs, file: &FileConfig) -> Result<()> {
    let section = file.train.clone().unwrap_or_default();
    let mean_level = args.mean.or(section.mean_level).unwrap_or(10.0);
    let payoff = match args.payoff {
        Some(p) => p,
        None => match &section.payoff {
            Some(name) => parse_payoff(name)?,
            None => PayoffArg::Identity,
        },
    };
    let resolved = Resolved {
        mean_level,
        speed: args.speed.or(section.speed).unwrap_or(10.0),
        vol: args.vol.or(section.vol).unwrap_or(1.0),
        x0: args.x0.or(section.x0).unwrap_or(mean_level),
        steps: args.steps.or(section.steps).unwrap_or(100),
        t_max: args.t_max.or(section.t_max).unwrap_or(1.0),
        samples: args.samples.or(section.samples).unwrap_or(100),
        order: args.order.or(section.order).unwrap_or(3),
        payoff,
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
    };

    let params = OuParams::new(resolved.mean_level, resolved.speed, resolved.vol)?;
    let grid = TimeGrid::new(resolved.steps, resolved.t_max)?;
    let generator = SampleGenerator::Ou { params };
    let costs = TradingCosts {
        entry_cost: resolved.entry_cost,
        exit_cost: resolved.exit_cost,
        entry_rate: resolved.entry_rate,
        exit_rate: resolved.exit_rate,
    };
    let kind = resolved.payoff;
    let set = generate_training_set(
        &generator,
        resolved.x0,
        &grid,
        resolved.samples,
        resolved.order,
        move |times: &[f64], values: &[f64]| match kind {
            PayoffArg::Identity => values.to_vec(),
            PayoffArg::LongEntry => entry_payoff(times, values, &costs, Side::Long)
                .values()
                .to_vec(),
            PayoffArg::LongExit => exit_payoff(times, values, &costs, Side::Long)
                .values()
                .to_vec(),
            PayoffArg::ShortEntry => entry_payoff(times, values, &costs, Side::Short)
                .values()
                .to_vec(),
            PayoffArg::ShortExit => exit_payoff(times, values, &costs, Side::Short)
                .values()
                .to_vec(),
        },
        resolved.seed,
    )?;
    let optimizer = OptimizerConfig {
        iterations: resolved.iterations,
        step_size: resolved.step_size,
        init_scale: resolved.init_scale,
        seed: resolved.seed,
        sharpness: resolved.sharpness,
        threshold: resolved.threshold,
    };
    let outcome = train(&set, &optimizer)?;
    let policy_json: serde_json::Value =
        serde_json::from_str(&outcome.policy.to_json()).expect("policy JSON parses back");
    write_json_doc(
        args.out.or(section.out).as_deref(),
        to_value(&resolved),
        "train",
        serde_json::json!({
            "best_loss": outcome.best_loss,
            "iterations_run": outcome.loss_history.len() - 1,
            "policy": policy_json,
        }),
    )
}
