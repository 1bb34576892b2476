use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use sigtrade_core::models::{
    generate_training_set, mix_seed, simulate_ou_batch, OuParams, SampleGenerator, TimeGrid,
};
use sigtrade_core::policy::{train, OptimizerConfig};
use sigtrade_core::{Error, Result};

use crate::commands::{to_value, write_file};
use crate::config::FileConfig;

/// The simulated-sweep parameter rows: a mean sweep at vol 1 and a vol
/// sweep at mean 10, reversion speed 10 throughout.
pub const DEFAULT_ROWS: [(f64, f64, f64); 10] = [
    (1.0, 1.0, 10.0),
    (5.0, 1.0, 10.0),
    (10.0, 1.0, 10.0),
    (15.0, 1.0, 10.0),
    (20.0, 1.0, 10.0),
    (10.0, 0.1, 10.0),
    (10.0, 0.5, 10.0),
    (10.0, 1.0, 10.0),
    (10.0, 1.5, 10.0),
    (10.0, 2.0, 10.0),
];

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Parameter rows as `mean:vol:speed[,mean:vol:speed...]`
    /// (defaults to the built-in sweep)
    #[arg(long)]
    rows: Option<String>,
    #[arg(long)]
    train_samples: Option<usize>,
    #[arg(long)]
    test_samples: Option<usize>,
    /// Number of independent seeds averaged per row
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, short = 'n')]
    order: Option<usize>,
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
    /// Common initial value (defaults to each row's mean level)
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Emit JSON instead of CSV
    #[arg(long)]
    json: bool,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct Resolved {
    rows: Vec<(f64, f64, f64)>,
    train_samples: usize,
    test_samples: usize,
    seeds: usize,
    steps: usize,
    t_max: f64,
    order: usize,
    iterations: usize,
    step_size: f64,
    init_scale: f64,
    threshold: f64,
    sharpness: f64,
    x0: Option<f64>,
    seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowResult {
    pub mean_level: f64,
    pub vol: f64,
    pub speed: f64,
    pub mean_stopped_value: f64,
}

fn parse_rows(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::new();
    for (i, part) in text.split(',').enumerate() {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 3 {
            return Err(Error::Validation(format!(
                "row {i}: expected mean:vol:speed, got '{part}'"
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| Error::Validation(format!("row {i}: bad number '{s}': {e}")))
        };
        rows.push((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
    }
    Ok(rows)
}

/// Train on `train_samples` OU paths with payoff `Y = X`, then report the
/// mean raw value at the hard stop over `test_samples` held-out paths;
/// averaged over `seeds` independent replications.
#[allow(clippy::too_many_arguments)]
pub fn sweep_row(
    mean_level: f64,
    vol: f64,
    speed: f64,
    row_index: usize,
    resolved_x0: Option<f64>,
    train_samples: usize,
    test_samples: usize,
    seeds: usize,
    grid: &TimeGrid<f64>,
    order: usize,
    optimizer_base: &OptimizerConfig<f64>,
    master_seed: u64,
) -> Result<f64> {
    let params = OuParams::new(mean_level, speed, vol)?;
    let x0 = resolved_x0.unwrap_or(mean_level);
    let generator = SampleGenerator::Ou { params };
    let mut seed_means = Vec::with_capacity(seeds);
    for s in 0..seeds {
        let train_seed = mix_seed(master_seed, (row_index * 1000 + s * 2) as u64);
        let test_seed = mix_seed(master_seed, (row_index * 1000 + s * 2 + 1) as u64);
        let set = generate_training_set(
            &generator,
            x0,
            grid,
            train_samples,
            order,
            |_times: &[f64], values: &[f64]| values.to_vec(),
            train_seed,
        )?;
        let optimizer = OptimizerConfig {
            seed: train_seed,
            ..optimizer_base.clone()
        };
        let outcome = train(&set, &optimizer)?;
        let times = grid.times();
        let test_paths = simulate_ou_batch(&params, x0, grid, test_samples, test_seed);
        let mut total = 0.0;
        for path in &test_paths {
            let raw = path.coordinate(0);
            let (idx, _) = outcome.policy.evaluate_stop(&times, &raw)?;
            total += raw[idx];
        }
        seed_means.push(total / test_samples as f64);
    }
    Ok(seed_means.iter().sum::<f64>() / seeds as f64)
}

pub fn run(args: Table1Args, file: &FileConfig) -> Result<()> {
    let section = file.table1.clone().unwrap_or_default();
    let rows_text = args.rows.or(section.rows);
    let rows = match rows_text {
        Some(text) => parse_rows(&text)?,
        None => DEFAULT_ROWS.to_vec(),
    };
    let resolved = Resolved {
        rows: rows.clone(),
        train_samples: args.train_samples.or(section.train_samples).unwrap_or(100),
        test_samples: args.test_samples.or(section.test_samples).unwrap_or(10),
        seeds: args.seeds.or(section.seeds).unwrap_or(10),
        steps: args.steps.or(section.steps).unwrap_or(100),
        t_max: args.t_max.or(section.t_max).unwrap_or(1.0),
        order: args.order.or(section.order).unwrap_or(3),
        iterations: args.iterations.or(section.iterations).unwrap_or(200),
        step_size: args.step_size.or(section.step_size).unwrap_or(0.01),
        init_scale: args.init_scale.or(section.init_scale).unwrap_or(0.1),
        threshold: args.threshold.or(section.threshold).unwrap_or(0.05),
        sharpness: args.sharpness.or(section.sharpness).unwrap_or(20.0),
        x0: args.x0.or(section.x0),
        seed: args.seed.or(section.seed).or(file.seed).unwrap_or(42),
    };
    if resolved.seeds < 1 || resolved.test_samples < 1 {
        return Err(Error::InvalidArgument(
            "seeds and test_samples must be >= 1".into(),
        ));
    }
    let grid = TimeGrid::new(resolved.steps, resolved.t_max)?;
    let optimizer_base = OptimizerConfig {
        iterations: resolved.iterations,
        step_size: resolved.step_size,
        init_scale: resolved.init_scale,
        seed: 0,
        sharpness: resolved.sharpness,
        threshold: resolved.threshold,
    };
    let mut results = Vec::with_capacity(rows.len());
    for (i, &(mean_level, vol, speed)) in rows.iter().enumerate() {
        let value = sweep_row(
            mean_level,
            vol,
            speed,
            i,
            resolved.x0,
            resolved.train_samples,
            resolved.test_samples,
            resolved.seeds,
            &grid,
            resolved.order,
            &optimizer_base,
            resolved.seed,
        )?;
        results.push(RowResult {
            mean_level,
            vol,
            speed,
            mean_stopped_value: value,
        });
    }

    let use_json = args.json || section.json.unwrap_or(false);
    let out = args.out.or(section.out);
    if use_json {
        crate::commands::write_json_doc(
            out.as_deref(),
            to_value(&resolved),
            "table1",
            serde_json::json!({ "rows": results }),
        )
    } else {
        let mut buf = Vec::new();
        use std::io::Write;
        writeln!(buf, "# config: {}", to_value(&resolved))?;
        writeln!(buf, "mean_level,vol,speed,mean_stopped_value")?;
        for r in &results {
            writeln!(
                buf,
                "{},{},{},{}",
                r.mean_level, r.vol, r.speed, r.mean_stopped_value
            )?;
        }
        match out {
            Some(p) => write_file(&p, &buf)?,
            None => print!("{}", String::from_utf8_lossy(&buf)),
        }
        Ok(())
    }
}
