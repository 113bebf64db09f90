//! Format conversion, with formats inferred from file extensions.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use lpkit::io::{coefficients_to_json, load_coefficients, load_lpgf, read_grid_csv, save_coefficients, save_lpgf, write_grid_csv};
use lpkit::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Grid,
    GridCsv,
    Coefficients,
    Json,
}

fn format_of(path: &Path) -> Result<Format> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("lpgf") => Ok(Format::Grid),
        Some("csv") => Ok(Format::GridCsv),
        Some("lpco") => Ok(Format::Coefficients),
        Some("json") => Ok(Format::Json),
        _ => Err(Error::Format(format!("{}: unknown extension (lpgf, csv, lpco, json)", path.display()))),
    }
}

pub fn convert(input: &Path, output: &Path) -> Result<()> {
    match (format_of(input)?, format_of(output)?) {
        (Format::Grid, Format::GridCsv) => write_grid_csv(&load_lpgf(input)?, BufWriter::new(File::create(output)?)),
        (Format::GridCsv, Format::Grid) => save_lpgf(&read_grid_csv(BufReader::new(File::open(input)?))?, output),
        (Format::Grid, Format::Grid) => save_lpgf(&load_lpgf(input)?, output),
        (Format::Coefficients, Format::Coefficients) => save_coefficients(&load_coefficients(input)?, output),
        (Format::Coefficients, Format::Json) => {
            let json = coefficients_to_json(&load_coefficients(input)?);
            fs::write(output, serde_json::to_string_pretty(&json)? + "\n")?;
            Ok(())
        }
        (from, to) => Err(Error::Format(format!("no conversion from {from:?} to {to:?}"))),
    }
}
