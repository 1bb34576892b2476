use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use sigtrade_core::signature::{augment, signature, TimeScaling};
use sigtrade_core::{Error, Result};

use crate::config::FileConfig;
use crate::pathio::read_path_csv;

#[derive(Debug, Args)]
pub struct SigArgs {
    /// CSV path file with header `time,<coordinates...>`
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Truncation order (1..=6)
    #[arg(long, short = 'n')]
    order: Option<usize>,
    /// Keep the raw time grid instead of rescaling it to [0,1]
    #[arg(long)]
    raw_time: bool,
}

#[derive(Serialize)]
struct Resolved {
    input: PathBuf,
    order: usize,
    raw_time: bool,
}

pub fn run(args: SigArgs, file: &FileConfig) -> Result<()> {
    let section = file.sig.clone().unwrap_or_default();
    let resolved = Resolved {
        input: args
            .input
            .or(section.input)
            .ok_or_else(|| Error::Validation("no input file given (--input)".into()))?,
        order: args.order.or(section.order).unwrap_or(3),
        raw_time: args.raw_time || section.raw_time.unwrap_or(false),
    };
    if resolved.order < 1 || resolved.order > 6 {
        return Err(Error::InvalidArgument("order must be in 1..=6".into()));
    }
    let path = read_path_csv(&resolved.input)?;
    let scaling = if resolved.raw_time {
        TimeScaling::Raw
    } else {
        TimeScaling::Unit
    };
    let sig = signature(&augment(&path, scaling), resolved.order)?;
    println!("{}", sig.to_json());
    Ok(())
}
