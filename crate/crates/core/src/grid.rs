//! Periodic sampled functions on the torus `[0, T)^n`.
//!
//! Samples are stored lexicographically with the first axis slowest. The
//! forward DFT uses `exp(-i xi.x)` and the inverse carries the `1 / 2^(nL)`
//! factor, so frequency bin `j` along an axis is `xi = (2 pi / T) * nu` with
//! `nu = j` for `j < 2^(L-1)` and `nu = j - 2^L` otherwise.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_LEVEL: u32 = 3;
pub const MAX_LEVEL: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    level: u32,
    side: f64,
}

/// Validates and builds a grid with `2^level` points per axis on a torus of side `side`.
pub fn make_grid(n: usize, level: u32, side: f64) -> Result<GridSpec> {
    if n != 1 && n != 2 {
        return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {n}")));
    }
    if !(MIN_LEVEL..=MAX_LEVEL).contains(&level) {
        return Err(Error::InvalidArgument(format!(
            "resolution exponent must lie in [{MIN_LEVEL}, {MAX_LEVEL}], got {level}"
        )));
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(Error::InvalidArgument(format!("side length must be positive, got {side}")));
    }
    Ok(GridSpec { n, level, side })
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn per_axis(&self) -> usize {
        1usize << self.level
    }

    pub fn len(&self) -> usize {
        1usize << (self.level as usize * self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `T / 2^L`; exact because the divisor is a power of two.
    pub fn spacing(&self) -> f64 {
        self.side / self.per_axis() as f64
    }

    /// Volume element `h^n` used by every Riemann sum.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// `log2 T` when the side is an exact power of two.
    pub fn side_log2(&self) -> Option<i32> {
        let (mantissa, exp) = frexp(self.side);
        (mantissa == 0.5).then_some(exp - 1)
    }

    /// Signed frequency index of DFT bin `j` along one axis.
    pub fn signed_bin(&self, j: usize) -> i64 {
        let n = self.per_axis();
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Angular frequency of DFT bin `j` along one axis.
    pub fn frequency(&self, j: usize) -> f64 {
        2.0 * PI / self.side * self.signed_bin(j) as f64
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        if self.n == 1 {
            [idx, 0]
        } else {
            let n = self.per_axis();
            [idx / n, idx % n]
        }
    }

    pub fn flatten(&self, ij: [usize; 2]) -> usize {
        if self.n == 1 {
            ij[0]
        } else {
            ij[0] * self.per_axis() + ij[1]
        }
    }

    /// Coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        let ij = self.unflatten(idx);
        [ij[0] as f64 * h, ij[1] as f64 * h]
    }

    /// Frequency vector of DFT bin `idx`.
    pub fn frequency_vector(&self, idx: usize) -> [f64; 2] {
        let ij = self.unflatten(idx);
        if self.n == 1 {
            [self.frequency(ij[0]), 0.0]
        } else {
            [self.frequency(ij[0]), self.frequency(ij[1])]
        }
    }
}

fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let mantissa = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (mantissa, exp - 1022)
}

/// Minimum-image displacement on a circle of circumference `period`.
pub fn wrap_displacement(d: f64, period: f64) -> f64 {
    d - period * (d / period).round()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn constant(spec: GridSpec, c: Complex64) -> Self {
        Self { spec, values: vec![c; spec.len()] }
    }

    pub fn from_real(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(spec, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Real samples that must all be nonnegative and finite.
    pub fn nonnegative(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("sample {i} is {v}, expected a nonnegative real")));
        }
        Self::from_real(spec, values)
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn([f64; 2]) -> Complex64 + Sync) -> Self {
        let values = (0..spec.len()).into_par_iter().map(|i| f(spec.point(i))).collect();
        Self { spec, values }
    }

    pub fn from_real_fn(spec: GridSpec, f: impl Fn([f64; 2]) -> f64 + Sync) -> Self {
        Self::from_fn(spec, |x| Complex64::new(f(x), 0.0))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0 && v.re >= 0.0)
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { spec: self.spec, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        check_same(&self.spec, &other.spec)?;
        Ok(Self {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        check_same(&self.spec, &other.spec)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Relative L2 distance `||self - reference|| / ||reference||`.
    pub fn relative_l2_error(&self, reference: &GridFunction) -> Result<f64> {
        let diff = self.sub(reference)?;
        let den = lp_norm(reference, 2.0, None)?;
        let num = lp_norm(&diff, 2.0, None)?;
        if den == 0.0 {
            return Ok(num);
        }
        Ok(num / den)
    }
}

pub(crate) fn check_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::IncompatibleGrids(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMultiplier {
    spec: GridSpec,
    symbol: Vec<Complex64>,
}

impl SpectralMultiplier {
    pub fn new(spec: GridSpec, symbol: Vec<Complex64>) -> Result<Self> {
        if symbol.len() != spec.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} symbol values, got {}",
                spec.len(),
                symbol.len()
            )));
        }
        Ok(Self { spec, symbol })
    }

    /// Tabulates `symbol(xi)` at every DFT bin.
    pub fn from_fn(spec: GridSpec, symbol: impl Fn([f64; 2]) -> Complex64 + Sync) -> Self {
        let symbol = (0..spec.len()).into_par_iter().map(|i| symbol(spec.frequency_vector(i))).collect();
        Self { spec, symbol }
    }

    pub fn from_radial(spec: GridSpec, profile: impl Fn(f64) -> f64 + Sync) -> Self {
        Self::from_fn(spec, |xi| Complex64::new(profile(xi[0].hypot(xi[1])), 0.0))
    }

    pub fn constant(spec: GridSpec, c: Complex64) -> Self {
        Self { spec, symbol: vec![c; spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn product(&self, other: &SpectralMultiplier) -> Result<Self> {
        check_same(&self.spec, &other.spec)?;
        Ok(Self {
            spec: self.spec,
            symbol: self.symbol.iter().zip(&other.symbol).map(|(a, b)| a * b).collect(),
        })
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

fn transform_in_place(spec: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = spec.per_axis();
    let fft = plan(n, inverse);
    if spec.dim() == 1 {
        fft.process(data);
    } else {
        data.par_chunks_mut(n).for_each(|row| fft.process(row));
        let mut cols = transpose(data, n);
        cols.par_chunks_mut(n).for_each(|col| fft.process(col));
        data.copy_from_slice(&transpose(&cols, n));
    }
    if inverse {
        let scale = 1.0 / spec.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    out.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v = data[i * n + j];
        }
    });
    out
}

/// Forward DFT of the samples (no normalization).
pub fn dft(f: &GridFunction) -> Vec<Complex64> {
    let mut data = f.values.clone();
    transform_in_place(&f.spec, &mut data, false);
    data
}

/// Inverse DFT carrying the `1 / len` factor.
pub fn inverse_dft(spec: GridSpec, mut coefficients: Vec<Complex64>) -> Result<GridFunction> {
    if coefficients.len() != spec.len() {
        return Err(Error::InvalidArgument("coefficient count does not match the grid".into()));
    }
    transform_in_place(&spec, &mut coefficients, true);
    GridFunction::new(spec, coefficients)
}

/// `inverse_dft(symbol * dft(f))`.
pub fn spectral_multiply(f: &GridFunction, m: &SpectralMultiplier) -> Result<GridFunction> {
    check_same(&f.spec, &m.spec)?;
    let mut data = dft(f);
    data.iter_mut().zip(&m.symbol).for_each(|(v, s)| *v *= s);
    transform_in_place(&f.spec, &mut data, true);
    Ok(GridFunction { spec: f.spec, values: data })
}

/// Spectral partial derivative of order `orders[axis]` along each axis.
///
/// The unpaired Nyquist bin is dropped for odd orders.
pub fn spectral_derivative(f: &GridFunction, orders: [u32; 2]) -> GridFunction {
    if orders == [0, 0] {
        return f.clone();
    }
    let spec = f.spec;
    let half = spec.per_axis() / 2;
    let symbol: Vec<Complex64> = (0..spec.len())
        .map(|idx| {
            let ij = spec.unflatten(idx);
            let mut s = Complex64::new(1.0, 0.0);
            for axis in 0..spec.dim() {
                let order = orders[axis];
                if order == 0 {
                    continue;
                }
                if ij[axis] == half && order % 2 == 1 {
                    return Complex64::new(0.0, 0.0);
                }
                s *= Complex64::new(0.0, spec.frequency(ij[axis])).powu(order);
            }
            s
        })
        .collect();
    spectral_multiply(f, &SpectralMultiplier { spec, symbol }).expect("same grid")
}

/// Pairwise (tree) summation over the slice in its given order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len().next_power_of_two() / 2;
    let mid = if mid >= values.len() { values.len() / 2 } else { mid };
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Riemann-sum `L_p` norm of nonnegative samples on `spec`; `p = inf` gives the maximum.
pub fn lp_norm_of_samples(spec: &GridSpec, samples: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("exponent must be positive, got {p}")));
    }
    if samples.len() != spec.len() {
        return Err(Error::IncompatibleGrids("sample count does not match the grid".into()));
    }
    if p.is_infinite() {
        return Ok(samples.iter().copied().fold(0.0, f64::max));
    }
    let powered: Vec<f64> = samples.iter().map(|v| v.abs().powf(p)).collect();
    Ok((spec.cell_volume() * pairwise_sum(&powered)).powf(1.0 / p))
}

/// `(h^n sum |f w|^p)^(1/p)`, or `max |f w|` for infinite `p`.
pub fn lp_norm(f: &GridFunction, p: f64, weight: Option<&GridFunction>) -> Result<f64> {
    let mut samples = f.abs();
    if let Some(w) = weight {
        check_same(&f.spec, &w.spec)?;
        if !w.is_nonnegative() {
            return Err(Error::InvalidWeight("weight must be real and nonnegative".into()));
        }
        samples.iter_mut().zip(&w.values).for_each(|(s, w)| *s *= w.re);
    }
    lp_norm_of_samples(&f.spec, &samples, p)
}
