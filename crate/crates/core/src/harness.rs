//! Empirical boundedness harness: run a ratio functional over seeds and
//! scale-window widths, then check that the worst ratio stops growing.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default allowed growth of the worst ratio between the narrowest and wider windows.
pub const GROWTH_TOLERANCE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub seed: u64,
    pub width: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthSummary {
    pub width: usize,
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    pub widths: Vec<WidthSummary>,
    /// `max_w (worst ratio at w) / (worst ratio at the narrowest width) - 1`.
    pub growth: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Evaluates `ratio(seed, width)` for every pair, in parallel; results are ordered by width, then seed.
pub fn run_grid<F>(seeds: &[u64], widths: &[usize], ratio: F) -> Result<Vec<RatioSample>>
where
    F: Fn(u64, usize) -> Result<f64> + Sync,
{
    let cases: Vec<(usize, u64)> = widths.iter().flat_map(|&w| seeds.iter().map(move |&s| (w, s))).collect();
    cases
        .par_iter()
        .map(|&(width, seed)| Ok(RatioSample { seed, width, ratio: ratio(seed, width)? }))
        .collect()
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Per-width statistics and the growth verdict.
pub fn summarize(samples: &[RatioSample], tolerance: f64) -> Result<GrowthSummary> {
    let mut widths: Vec<usize> = samples.iter().map(|s| s.width).collect();
    widths.sort_unstable();
    widths.dedup();
    if widths.is_empty() {
        return Err(Error::DegenerateInput("no samples".into()));
    }
    let mut rows = Vec::with_capacity(widths.len());
    for &width in &widths {
        let mut values: Vec<f64> = samples.iter().filter(|s| s.width == width).map(|s| s.ratio).collect();
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::DegenerateInput(format!("NaN ratio at width {width}")));
        }
        values.sort_by(f64::total_cmp);
        rows.push(WidthSummary {
            width,
            count: values.len(),
            min: values[0],
            median: median(&values),
            max: values[values.len() - 1],
        });
    }
    let base = rows[0].max;
    let growth = rows.iter().map(|r| r.max / base - 1.0).fold(0.0, f64::max);
    Ok(GrowthSummary { widths: rows, growth, tolerance, passed: growth < tolerance })
}

/// `seed,width,ratio` rows in the given order, with full round-trip precision.
pub fn write_samples_csv<W: Write>(samples: &[RatioSample], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for s in samples {
        writer.serialize(s)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_tracks_worst_ratio() {
        let samples = run_grid(&[0, 1, 2], &[4, 8], |s, w| Ok(1.0 + s as f64 * w as f64 / 100.0)).unwrap();
        assert_eq!(samples.len(), 6);
        assert_eq!(samples[0], RatioSample { seed: 0, width: 4, ratio: 1.0 });
        let summary = summarize(&samples, 0.1).unwrap();
        assert_eq!(summary.widths[0].max, 1.08);
        assert_eq!(summary.widths[1].median, 1.08);
        assert!((summary.growth - (1.16 / 1.08 - 1.0)).abs() < 1e-15);
        assert!(summary.passed);
        let flat = summarize(&samples[..3], 0.1).unwrap();
        assert_eq!(flat.growth, 0.0);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_samples_csv(&[RatioSample { seed: 3, width: 4, ratio: 0.1 }], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "seed,width,ratio\n3,4,0.1\n");
    }

    #[test]
    fn errors_propagate() {
        let r = run_grid(&[0], &[4], |_, _| Err(Error::DegenerateInput("x".into())));
        assert!(r.is_err());
        assert!(summarize(&[], 0.1).is_err());
    }
}
