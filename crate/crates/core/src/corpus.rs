//! Seeded random inputs: band-limited functions, per-scale sequences,
//! coefficient fields and nonnegative bump sums.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::grid::{inverse_dft, wrap_displacement, GridFunction, GridSpec};
use crate::maximal::FunctionSequence;
use crate::transform::CoefficientField;
use crate::weights::ScaleRange;

/// Amplitudes are drawn log-uniformly from this interval.
pub const AMPLITUDE_RANGE: (f64, f64) = (1e-2, 1e2);

/// Generator for case `case` of a run seeded with `seed`.
///
/// Streams are independent, so cases can be generated in any order or in parallel.
pub fn rng_for(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + (b - a) * rng.random::<f64>()).exp()
}

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Real function whose spectrum lies in `lo <= |xi| <= hi`, tapered in `log |xi|`,
/// with unit root-mean-square value times a log-uniform amplitude.
pub fn band_limited(spec: &GridSpec, lo: f64, hi: f64, rng: &mut impl Rng) -> Result<GridFunction> {
    if !(0.0 < lo && lo < hi) {
        return Err(Error::InvalidArgument(format!("need 0 < lo < hi, got {lo}, {hi}")));
    }
    let (a, b) = (lo.log2(), hi.log2());
    let mut spectrum = vec![Complex64::new(0.0, 0.0); spec.len()];
    let mut hit = false;
    for (idx, c) in spectrum.iter_mut().enumerate() {
        let xi = spec.frequency_vector(idx);
        let r = xi[0].hypot(xi[1]);
        if r < lo || r > hi {
            continue;
        }
        let t = (r.log2() - a) / (b - a);
        let taper = (std::f64::consts::PI * (0.05 + 0.9 * t)).sin();
        *c = Complex64::new(normal(rng), normal(rng)) * taper;
        hit = true;
    }
    if !hit {
        return Err(Error::CubeResolution(format!("no grid frequency in [{lo}, {hi}]")));
    }
    let f = inverse_dft(*spec, spectrum)?;
    let re = f.real_parts();
    let rms = (re.iter().map(|v| v * v).sum::<f64>() / re.len() as f64).sqrt();
    if rms == 0.0 {
        return Err(Error::DegenerateInput("band-limited draw vanished".into()));
    }
    let amp = log_uniform(rng, AMPLITUDE_RANGE.0, AMPLITUDE_RANGE.1) / rms;
    GridFunction::from_real(*spec, re.into_iter().map(|v| v * amp).collect())
}

/// Band-limited function reconstructed exactly by the scales of `window`.
pub fn band_limited_in_window(spec: &GridSpec, window: ScaleRange, rng: &mut impl Rng) -> Result<GridFunction> {
    band_limited(spec, 2f64.powi(window.lo), 2f64.powi(window.hi), rng)
}

/// One band-limited function per scale `k`, with spectrum in the annulus `2^(k-1) <= |xi| <= 2^(k+1)`.
pub fn annulus_sequence(spec: &GridSpec, range: ScaleRange, rng: &mut impl Rng) -> Result<FunctionSequence> {
    let members = range
        .iter()
        .map(|k| band_limited(spec, 2f64.powi(k - 1), 2f64.powi(k + 1), rng))
        .collect::<Result<Vec<_>>>()?;
    FunctionSequence::new(range.lo, members)
}

/// Coefficient field with each entry nonzero with probability `density`, complex normal
/// values, and one log-uniform amplitude per scale.
pub fn random_field(
    spec: &GridSpec,
    window: ScaleRange,
    density: f64,
    rng: &mut impl Rng,
) -> Result<CoefficientField> {
    if !(0.0 < density && density <= 1.0) {
        return Err(Error::InvalidArgument(format!("density must lie in (0, 1], got {density}")));
    }
    let mut lam = CoefficientField::zeros(spec, window)?;
    for k in window.iter() {
        let amp = log_uniform(rng, AMPLITUDE_RANGE.0, AMPLITUDE_RANGE.1);
        for v in lam.block_mut(k) {
            if rng.random::<f64>() < density {
                *v = Complex64::new(normal(rng), normal(rng)) * amp;
            }
        }
    }
    if lam.is_zero() {
        let k = window.lo;
        lam.block_mut(k)[0] = Complex64::new(1.0, 0.0);
    }
    Ok(lam)
}

/// Nonnegative sum of `count` periodic Gaussians with random centers, widths and heights.
pub fn gaussian_bumps(spec: &GridSpec, count: usize, rng: &mut impl Rng) -> Result<GridFunction> {
    let side = spec.side();
    let dim = spec.dim();
    let bumps: Vec<([f64; 2], f64, f64)> = (0..count)
        .map(|_| {
            let center = [rng.random::<f64>() * side, rng.random::<f64>() * side];
            let width = log_uniform(rng, side / 128.0, side / 4.0);
            let height = log_uniform(rng, AMPLITUDE_RANGE.0, AMPLITUDE_RANGE.1);
            (center, width, height)
        })
        .collect();
    let f = GridFunction::from_real_fn(*spec, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| {
                let r2: f64 = (0..dim).map(|i| wrap_displacement(x[i] - c[i], side).powi(2)).sum();
                a * (-r2 / (2.0 * w * w)).exp()
            })
            .sum()
    });
    if f.values().iter().all(|v| v.re == 0.0) {
        return Err(Error::DegenerateInput("bump sum vanished".into()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{dft, make_grid};

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| rng_for(7, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| rng_for(7, 3).random()).collect();
        assert_eq!(a, b);
        assert_ne!(rng_for(7, 3).random::<u64>(), rng_for(7, 4).random::<u64>());
    }

    #[test]
    fn band_limited_spectrum_stays_in_band() {
        let g = make_grid(2, 6, 1.0).unwrap();
        let f = band_limited(&g, 20.0, 80.0, &mut rng_for(1, 0)).unwrap();
        assert!(f.is_real());
        let spec = dft(&f);
        let energy: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        let outside: f64 = spec
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let xi = g.frequency_vector(*i);
                let r = xi[0].hypot(xi[1]);
                r < 20.0 || r > 80.0
            })
            .map(|(_, c)| c.norm_sqr())
            .sum();
        assert!(outside <= 1e-24 * energy);
    }

    #[test]
    fn empty_band_is_rejected() {
        let g = make_grid(1, 6, 1.0).unwrap();
        assert!(band_limited(&g, 1.0, 2.0, &mut rng_for(0, 0)).is_err());
    }

    #[test]
    fn bumps_are_nonnegative() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let f = gaussian_bumps(&g, 5, &mut rng_for(2, 1)).unwrap();
        assert!(f.is_nonnegative());
    }

    #[test]
    fn random_field_fits_grid() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let lam = random_field(&g, ScaleRange::new(2, 5).unwrap(), 0.3, &mut rng_for(3, 0)).unwrap();
        assert!(lam.fits(&g));
        assert!(!lam.is_zero());
    }
}
