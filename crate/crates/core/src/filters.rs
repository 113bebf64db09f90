//! Radial filter pairs whose Fourier profiles live on the annulus `1/2 <= |xi| <= 2`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpectralMultiplier};

/// Inner annulus on which the analysis profile is bounded below.
pub const INNER_ANNULUS: (f64, f64) = (3.0 / 5.0, 5.0 / 3.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    /// `exp(-1 / (1 - u^2))` in `u = log2 r`.
    Bump,
    /// `cos^3(pi u / 2)` in `u = log2 r`; twice continuously differentiable.
    Cosine,
}

impl std::str::FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bump" => Ok(Self::Bump),
            "cosine" => Ok(Self::Cosine),
            other => Err(Error::InvalidArgument(format!("unknown filter kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Phi,
    Psi,
    PhiTilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterPair {
    kind: FilterKind,
    c_lower: f64,
    normalized: bool,
}

/// Builds the pair; the synthesis profile is `eta / sum_j eta(2^-j r)^2`.
pub fn build_filter_pair(kind: FilterKind) -> FilterPair {
    let mut pair = FilterPair { kind, c_lower: 0.0, normalized: true };
    // eta decreases in |log2 r|, so the minimum over the inner annulus sits at an endpoint
    pair.c_lower = pair.eta(INNER_ANNULUS.0).min(pair.eta(INNER_ANNULUS.1));
    pair
}

impl FilterPair {
    /// Pair whose synthesis profile equals the analysis profile.
    pub fn unnormalized(kind: FilterKind) -> Self {
        Self { normalized: false, ..build_filter_pair(kind) }
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn c_lower(&self) -> f64 {
        self.c_lower
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn profile_log(&self, u: f64) -> f64 {
        if !(u.abs() < 1.0) {
            return 0.0;
        }
        match self.kind {
            FilterKind::Bump => (-1.0 / (1.0 - u * u)).exp(),
            FilterKind::Cosine => (std::f64::consts::FRAC_PI_2 * u).cos().powi(3),
        }
    }

    /// Analysis profile at radius `r`.
    pub fn eta(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        self.profile_log(r.log2())
    }

    /// `sum_j eta(2^-j r)^2`; periodic in `log2 r` with period one.
    pub fn energy(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let u = r.log2();
        let base = u.floor();
        (-1..=2).map(|d| self.profile_log(u - (base + d as f64)).powi(2)).sum()
    }

    /// Synthesis profile at radius `r`.
    pub fn psi_profile(&self, r: f64) -> f64 {
        let e = self.eta(r);
        if e == 0.0 {
            return 0.0;
        }
        if self.normalized {
            e / self.energy(r)
        } else {
            e
        }
    }

    /// `sum_k eta(2^-k r) psi(2^-k r)`; identically one when normalized.
    pub fn partition_sum(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let base = r.log2().floor() as i32;
        (base - 1..=base + 2)
            .map(|k| {
                let s = r * 2f64.powi(-k);
                self.eta(s) * self.psi_profile(s)
            })
            .sum()
    }

    pub fn profile(&self, which: Which, r: f64) -> f64 {
        match which {
            Which::Phi | Which::PhiTilde => self.eta(r),
            Which::Psi => self.psi_profile(r),
        }
    }
}

/// Symbol of the scale-`k` filter: the profile evaluated at `2^-k |xi|`.
pub fn filter_symbol(pair: &FilterPair, which: Which, k: i32, spec: &GridSpec) -> SpectralMultiplier {
    let dilation = 2f64.powi(-k);
    let pair = *pair;
    // profiles are real, so conjugation leaves the tilde symbol unchanged
    SpectralMultiplier::from_radial(*spec, move |r| pair.profile(which, r * dilation))
}

/// Scales whose annulus fits below the Nyquist frequency and above the lowest nonzero frequency.
pub fn representable_window(spec: &GridSpec) -> Option<(i32, i32)> {
    let nyquist = std::f64::consts::PI / spec.spacing();
    let lowest = 2.0 * std::f64::consts::PI / spec.side();
    let mut hi = nyquist.log2().floor() as i32 - 1;
    while 2f64.powi(hi + 1) > nyquist {
        hi -= 1;
    }
    while 2f64.powi(-hi) < spec.spacing() {
        hi -= 1;
    }
    let mut lo = lowest.log2().ceil() as i32 + 1;
    while 2f64.powi(lo - 2) >= lowest {
        lo -= 1;
    }
    (lo <= hi).then_some((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub kind: FilterKind,
    /// Largest profile magnitude sampled outside `[1/2, 2]`.
    pub support_violation: f64,
    /// Smallest profile value sampled on the inner annulus.
    pub inner_minimum: f64,
    pub c_lower: f64,
    /// `sup |sum_k eta psi - 1|` over the sampled radii.
    pub partition_deviation: f64,
    pub samples: usize,
    pub tol: f64,
    pub support_ok: bool,
    pub lower_bound_ok: bool,
    pub partition_ok: bool,
}

impl FilterReport {
    pub fn passed(&self) -> bool {
        self.support_ok && self.lower_bound_ok && self.partition_ok
    }
}

fn log_samples(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(move |i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
}

/// Checks support, inner lower bound and partition of unity on log-spaced radii.
pub fn verify_filter_pair(pair: &FilterPair, samples: usize, tol: f64) -> Result<FilterReport> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 samples, got {samples}")));
    }
    let outside = log_samples(1e-2, 0.5, samples / 2)
        .chain(log_samples(2.0, 1e2, samples / 2))
        .chain([0.5, 2.0, 0.5 * (1.0 - f64::EPSILON), 2.0 * (1.0 + f64::EPSILON)]);
    let support_violation = outside.map(|r| pair.eta(r).abs()).fold(0.0, f64::max);
    let inner_minimum =
        log_samples(INNER_ANNULUS.0, INNER_ANNULUS.1, samples).map(|r| pair.eta(r)).fold(f64::INFINITY, f64::min);
    let partition_deviation =
        log_samples(1e-2, 1e2, samples).map(|r| (pair.partition_sum(r) - 1.0).abs()).fold(0.0, f64::max);
    Ok(FilterReport {
        kind: pair.kind,
        support_violation,
        inner_minimum,
        c_lower: pair.c_lower,
        partition_deviation,
        samples,
        tol,
        support_ok: support_violation == 0.0,
        lower_bound_ok: pair.c_lower > 0.0 && inner_minimum >= pair.c_lower,
        partition_ok: partition_deviation < tol,
    })
}

/// Writes `r,eta,psi_profile` rows for the given radii.
pub fn write_profile_csv<W: Write>(pair: &FilterPair, radii: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "eta", "psi_profile"])?;
    for &r in radii {
        w.write_record([format!("{r:e}"), format!("{:e}", pair.eta(r)), format!("{:e}", pair.psi_profile(r))])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use num_complex::Complex64;

    fn real_symbol(values: &[Complex64]) -> bool {
        values.iter().all(|v| v.im == 0.0)
    }

    #[test]
    fn bump_examples() {
        let pair = build_filter_pair(FilterKind::Bump);
        assert_eq!(pair.eta(3.0), 0.0);
        assert!((pair.partition_sum(1.0) - 1.0).abs() < 1e-12);
        assert!(pair.eta(1.0) >= pair.c_lower() && pair.c_lower() > 0.0);
        assert!((pair.eta(1.0) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn both_kinds_verify() {
        for kind in [FilterKind::Bump, FilterKind::Cosine] {
            let report = verify_filter_pair(&build_filter_pair(kind), 10_000, 1e-12).unwrap();
            assert!(report.passed(), "{report:?}");
            assert_eq!(report.support_violation, 0.0);
            assert!(report.c_lower > 0.05);
        }
    }

    #[test]
    fn unnormalized_pair_fails_partition() {
        // oracle: sum of squared bump values at r = 1 is eta(1)^2 = e^-2
        let pair = FilterPair::unnormalized(FilterKind::Bump);
        let expected = 1.0 - (-2f64).exp();
        let report = verify_filter_pair(&pair, 1000, 1e-12).unwrap();
        assert!(report.partition_deviation >= 0.1);
        assert!((1.0 - pair.partition_sum(1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn too_few_samples() {
        let pair = build_filter_pair(FilterKind::Bump);
        assert!(matches!(verify_filter_pair(&pair, 99, 1e-12), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn symbol_support_and_dilation() {
        let g = make_grid(1, 8, 2.0 * std::f64::consts::PI).unwrap();
        let pair = build_filter_pair(FilterKind::Cosine);
        let s0 = filter_symbol(&pair, Which::Phi, 0, &g);
        assert_eq!(s0.symbol()[3].re, 0.0);
        let s1 = filter_symbol(&pair, Which::Phi, 1, &g);
        assert_eq!(s1.symbol()[2].re, s0.symbol()[1].re);
        assert_eq!(s1.symbol()[2].re, pair.eta(1.0));
        let tilde = filter_symbol(&pair, Which::PhiTilde, 1, &g);
        assert_eq!(tilde, s1);
        assert!(real_symbol(tilde.symbol()));
        for (i, v) in s1.symbol().iter().enumerate() {
            let r = g.frequency(i).abs();
            if !(1.0..=4.0).contains(&r) {
                assert_eq!(v.re, 0.0);
            }
        }
    }

    #[test]
    fn window_examples() {
        assert_eq!(representable_window(&make_grid(1, 9, 8.0).unwrap()), Some((1, 6)));
        assert_eq!(representable_window(&make_grid(2, 6, 4.0).unwrap()), Some((2, 4)));
    }

    #[test]
    fn csv_export() {
        let pair = build_filter_pair(FilterKind::Bump);
        let mut buf = Vec::new();
        write_profile_csv(&pair, &[0.25, 1.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,eta,psi_profile\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
