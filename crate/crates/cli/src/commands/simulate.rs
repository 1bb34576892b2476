use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use sigtrade_core::models::{simulate_ou, OuParams, TimeGrid};
use sigtrade_core::Result;

use crate::commands::{to_value, write_file};
use crate::config::FileConfig;
use crate::pathio::write_series_csv;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Long-run mean level
    #[arg(long)]
    mean: Option<f64>,
    /// Mean-reversion speed
    #[arg(long)]
    speed: Option<f64>,
    /// Volatility
    #[arg(long)]
    vol: Option<f64>,
    /// Initial value (defaults to the mean level)
    #[arg(long)]
    x0: Option<f64>,
    /// Number of grid steps
    #[arg(long)]
    steps: Option<usize>,
    /// Horizon
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (stdout when omitted)
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
    seed: u64,
}

pub fn run(args: SimulateArgs, file: &FileConfig) -> Result<()> {
    let section = file.simulate.clone().unwrap_or_default();
    let mean_level = args.mean.or(section.mean_level).unwrap_or(10.0);
    let resolved = Resolved {
        mean_level,
        speed: args.speed.or(section.speed).unwrap_or(10.0),
        vol: args.vol.or(section.vol).unwrap_or(1.0),
        x0: args.x0.or(section.x0).unwrap_or(mean_level),
        steps: args.steps.or(section.steps).unwrap_or(100),
        t_max: args.t_max.or(section.t_max).unwrap_or(1.0),
        seed: args.seed.or(section.seed).or(file.seed).unwrap_or(42),
    };
    let params = OuParams::new(resolved.mean_level, resolved.speed, resolved.vol)?;
    let grid = TimeGrid::new(resolved.steps, resolved.t_max)?;
    let path = simulate_ou(&params, resolved.x0, &grid, resolved.seed);
    let header = vec![format!("config: {}", to_value(&resolved))];
    let out_path = args.out.or(section.out);
    let mut buf = Vec::new();
    write_series_csv(
        &mut buf,
        &header,
        "value",
        path.times(),
        &path.coordinate(0),
    )?;
    match out_path {
        Some(p) => write_file(&p, &buf)?,
        None => print!("{}", String::from_utf8_lossy(&buf)),
    }
    Ok(())
}
