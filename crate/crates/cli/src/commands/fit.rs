use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use sigtrade_core::models::{fit_ou_mle, ou_log_likelihood};
use sigtrade_core::{Error, Result};

use crate::commands::{to_value, write_json_doc};
use crate::config::FileConfig;
use crate::pathio::read_path_csv;

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV path file with header `time,<value>` (1-D)
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Sampling interval of the series
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Serialize)]
struct Resolved {
    input: PathBuf,
    dt: f64,
}

pub fn run(args: FitArgs, file: &FileConfig) -> Result<()> {
    let section = file.fit.clone().unwrap_or_default();
    let resolved = Resolved {
        input: args
            .input
            .or(section.input)
            .ok_or_else(|| Error::Validation("no input file given (--input)".into()))?,
        dt: args.dt.or(section.dt).unwrap_or(1.0),
    };
    let path = read_path_csv(&resolved.input)?;
    if path.dimension() != 1 {
        return Err(Error::InvalidArgument(format!(
            "fit expects a 1-D series, found {} coordinates",
            path.dimension()
        )));
    }
    let values = path.coordinate(0);
    let params = fit_ou_mle(&values, resolved.dt)?;
    let log_likelihood = ou_log_likelihood(&values, &params, resolved.dt);
    write_json_doc(
        None,
        to_value(&resolved),
        "fit",
        serde_json::json!({
            "params": params,
            "log_likelihood": log_likelihood,
        }),
    )
}
