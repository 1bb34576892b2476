//! CSV path files: a `time` column followed by one or more coordinate
//! columns.

use std::io::Write;
use std::path::Path as FsPath;

use sigtrade_core::signature::Path;
use sigtrade_core::{Error, Result};

pub fn read_path_csv(path: &FsPath) -> Result<Path<f64>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Validation(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_reader(file);
    let width = {
        let headers = reader.headers().map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        if headers.len() < 2 || !headers[0].trim().eq_ignore_ascii_case("time") {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header 'time,<coordinate columns...>'".into(),
            });
        }
        headers.len()
    };
    let mut times = Vec::new();
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            msg: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != width {
            return Err(Error::Parse {
                line,
                msg: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let mut fields = record.iter().map(|f| {
            f.trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("bad number '{f}': {e}"),
            })
        });
        times.push(fields.next().unwrap()?);
        points.push(fields.collect::<Result<Vec<f64>>>()?);
    }
    Path::new(times, points)
}

pub fn write_series_csv<W: Write>(
    mut out: W,
    header_lines: &[String],
    value_column: &str,
    times: &[f64],
    values: &[f64],
) -> Result<()> {
    for line in header_lines {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "time,{value_column}")?;
    for (t, v) in times.iter().zip(values) {
        writeln!(out, "{t},{v}")?;
    }
    Ok(())
}
