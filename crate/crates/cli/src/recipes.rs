//! Grids and weight sequences described by settings.

use std::path::PathBuf;

use lpkit::grid::{make_grid, GridFunction, GridSpec};
use lpkit::io::load_lpgf;
use lpkit::weights::{power_weight, ScaleRange, WeightSequence};
use lpkit::Result;

use crate::config::{config_error, Settings};

pub fn grid(s: &Settings, n: usize, level: u32, side: f64) -> Result<GridSpec> {
    let n: usize = s.get("n", n)?;
    if !(n == 1 || n == 2) {
        return Err(config_error("n", format!("dimension must be 1 or 2, got {n}")));
    }
    let level: u32 = s.get("L", level)?;
    if !(3..=12).contains(&level) {
        return Err(config_error("L", format!("grid level must lie in 3..=12, got {level}")));
    }
    let side = s.positive("T", side)?;
    make_grid(n, level, side).map_err(|e| config_error("T", e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightRecipe {
    Unit,
    /// `2^(ks)`.
    Power { s: f64 },
    /// `2^(ks) |x - c|^a`.
    Product { s: f64, a: f64, center: Option<f64> },
    /// `2^(k^2)`, outside every class with fixed exponents.
    Square,
    /// `2^(ks) omega` with `omega` read from an LPGF1 file.
    File { path: PathBuf, s: f64 },
}

impl WeightRecipe {
    pub fn parse(field: &str, text: &str) -> Result<Self> {
        let (name, args) = text.split_once(':').unwrap_or((text, ""));
        let mut s = 0.0;
        let mut a = None;
        let mut center = None;
        let mut path = None;
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').unwrap_or(("path", part));
            let number = || value.parse::<f64>().map_err(|_| config_error(field, format!("cannot parse `{value}` for `{key}`")));
            match key {
                "s" => s = number()?,
                "a" => a = Some(number()?),
                "c" | "center" => center = Some(number()?),
                "path" => path = Some(PathBuf::from(value)),
                other => return Err(config_error(field, format!("unknown weight parameter `{other}`"))),
            }
        }
        match name {
            "unit" => Ok(Self::Unit),
            "power" => Ok(Self::Power { s }),
            "product" => Ok(Self::Product {
                s,
                a: a.ok_or_else(|| config_error(field, "product weights need `a=`"))?,
                center,
            }),
            "square" => Ok(Self::Square),
            "file" => Ok(Self::File { path: path.ok_or_else(|| config_error(field, "file weights need a path"))?, s }),
            other => Err(config_error(field, format!("unknown weight recipe `{other}` (unit, power, product, square, file)"))),
        }
    }

    /// Class exponents `(alpha1, alpha2)` the recipe is certified with.
    pub fn alpha(&self) -> (f64, f64) {
        match self {
            Self::Unit | Self::Square => (0.0, 0.0),
            Self::Power { s } | Self::Product { s, .. } | Self::File { s, .. } => (*s, *s),
        }
    }

    pub fn build(&self, field: &str, spec: &GridSpec, range: ScaleRange, p: f64) -> Result<WeightSequence> {
        let wrap = |e: lpkit::Error| config_error(field, e.to_string());
        match self {
            Self::Unit => WeightSequence::unit(*spec, range, p),
            Self::Power { s } => WeightSequence::power(*spec, range, p, *s),
            Self::Square => WeightSequence::per_scale(*spec, range, p, |k| 2f64.powi(k * k)),
            Self::Product { s, a, center } => {
                let c = center.unwrap_or(spec.side() / 2.0);
                let omega = power_weight(spec, *a, [c, c]);
                scaled(spec, range, p, &omega, *s)
            }
            Self::File { path, s } => {
                let omega = load_lpgf(path).map_err(wrap)?;
                if omega.spec() != spec {
                    return Err(config_error(field, format!("{} lives on a different grid", path.display())));
                }
                scaled(spec, range, p, &omega, *s)
            }
        }
        .map_err(wrap)
    }
}

fn scaled(spec: &GridSpec, range: ScaleRange, p: f64, omega: &GridFunction, s: f64) -> Result<WeightSequence> {
    let base = omega.real_parts();
    WeightSequence::from_fn(*spec, range, p, |k| {
        let c = 2f64.powf(k as f64 * s);
        GridFunction::from_real(*spec, base.iter().map(|w| w * c).collect()).expect("grid sized")
    })
}

pub fn weights(s: &Settings, default: &str) -> Result<WeightRecipe> {
    WeightRecipe::parse("weights", s.raw("weights").unwrap_or(default))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipes_parse() {
        assert_eq!(WeightRecipe::parse("w", "power:s=1").unwrap(), WeightRecipe::Power { s: 1.0 });
        assert_eq!(
            WeightRecipe::parse("w", "product:s=0.5,a=0.25").unwrap(),
            WeightRecipe::Product { s: 0.5, a: 0.25, center: None }
        );
        assert_eq!(WeightRecipe::parse("w", "unit").unwrap(), WeightRecipe::Unit);
        assert!(WeightRecipe::parse("w", "product:s=1").is_err());
        assert!(WeightRecipe::parse("w", "power:z=1").is_err());
        assert!(WeightRecipe::parse("w", "bogus").is_err());
    }

    #[test]
    fn grid_bounds_name_fields() {
        let s = Settings::parse("L = 14").unwrap();
        assert!(matches!(grid(&s, 1, 8, 1.0), Err(lpkit::Error::Config { field, .. }) if field == "L"));
        let s = Settings::parse("n = 3").unwrap();
        assert!(matches!(grid(&s, 1, 8, 1.0), Err(lpkit::Error::Config { field, .. }) if field == "n"));
    }
}
