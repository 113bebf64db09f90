//! Analysis and synthesis with a filter pair, function-side and coefficient-side
//! norms, and the peak functional.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicCube, Lattice, Pyramid};
use crate::error::{Error, Result};
use crate::filters::{filter_symbol, representable_window, FilterPair, Which};
use crate::grid::{lp_norm_of_samples, spectral_multiply, GridFunction, GridSpec};
use crate::maximal::pointwise_lq;
use crate::weights::{ScaleRange, WeightSequence};

/// Coefficients `lambda_{k,m}` on the periodic lattice of each scale in a window.
///
/// Every scale stores its full lattice in lexicographic order; entries never
/// set are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    n: usize,
    side_log2: i32,
    window: ScaleRange,
    blocks: Vec<Vec<Complex64>>,
}

impl CoefficientField {
    pub fn zeros(spec: &GridSpec, window: ScaleRange) -> Result<Self> {
        let mut blocks = Vec::with_capacity(window.len());
        for k in window.iter() {
            blocks.push(vec![Complex64::new(0.0, 0.0); Lattice::new(spec, k)?.len()]);
        }
        let side_log2 = spec.side_log2().expect("checked by the lattice");
        Ok(Self { n: spec.dim(), side_log2, window, blocks })
    }

    /// Field from raw per-scale blocks; block sizes fix the side of the domain.
    pub fn from_blocks(n: usize, window: ScaleRange, blocks: Vec<Vec<Complex64>>) -> Result<Self> {
        if !(n == 1 || n == 2) || blocks.len() != window.len() {
            return Err(Error::Format("block layout does not match the window".into()));
        }
        let per_axis = |len: usize| -> Option<u32> {
            let c = if n == 1 { len } else { (len as f64).sqrt().round() as usize };
            (c.pow(n as u32) == len && c.is_power_of_two()).then(|| c.trailing_zeros())
        };
        let first = per_axis(blocks[0].len()).ok_or_else(|| Error::Format("block size is not a lattice".into()))?;
        let side_log2 = first as i32 - window.lo;
        for (k, b) in window.iter().zip(&blocks) {
            if per_axis(b.len()) != Some((side_log2 + k) as u32) {
                return Err(Error::Format(format!("block at scale {k} has {} entries", b.len())));
            }
        }
        Ok(Self { n, side_log2, window, blocks })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> ScaleRange {
        self.window
    }

    pub fn side(&self) -> f64 {
        2f64.powi(self.side_log2)
    }

    pub fn cells_per_axis(&self, k: i32) -> usize {
        1usize << (self.side_log2 + k)
    }

    pub fn block(&self, k: i32) -> &[Complex64] {
        &self.blocks[(k - self.window.lo) as usize]
    }

    pub fn block_mut(&mut self, k: i32) -> &mut [Complex64] {
        &mut self.blocks[(k - self.window.lo) as usize]
    }

    pub fn blocks(&self) -> &[Vec<Complex64>] {
        &self.blocks
    }

    /// Whether this field lives on the lattices of `spec`.
    pub fn fits(&self, spec: &GridSpec) -> bool {
        spec.dim() == self.n
            && spec.side_log2() == Some(self.side_log2)
            && self.window.iter().all(|k| Lattice::new(spec, k).is_ok())
    }

    fn check_fits(&self, spec: &GridSpec) -> Result<()> {
        if !self.fits(spec) {
            return Err(Error::IncompatibleWindows(format!(
                "coefficients on window {}..={} do not fit grid {spec:?}",
                self.window.lo, self.window.hi
            )));
        }
        Ok(())
    }

    fn flat(&self, k: i32, m: &[i64]) -> Option<usize> {
        if !self.window.contains(k) || m.len() != self.n {
            return None;
        }
        let c = self.cells_per_axis(k) as i64;
        if m.iter().any(|&v| !(0..c).contains(&v)) {
            return None;
        }
        Some(if self.n == 1 { m[0] as usize } else { (m[0] * c + m[1]) as usize })
    }

    pub fn cube_at(&self, k: i32, flat: usize) -> DyadicCube {
        let c = self.cells_per_axis(k);
        if self.n == 1 {
            DyadicCube::new(k, &[flat as i64])
        } else {
            DyadicCube::new(k, &[(flat / c) as i64, (flat % c) as i64])
        }
    }

    /// Entry at `(k, m)`; zero outside the window or lattice.
    pub fn get(&self, k: i32, m: &[i64]) -> Complex64 {
        self.flat(k, m).map_or(Complex64::new(0.0, 0.0), |i| self.block(k)[i])
    }

    pub fn get_cube(&self, q: &DyadicCube) -> Complex64 {
        self.get(q.k, &q.m[..q.n])
    }

    pub fn set(&mut self, k: i32, m: &[i64], value: Complex64) -> Result<()> {
        let i = self
            .flat(k, m)
            .ok_or_else(|| Error::CubeResolution(format!("position {m:?} at scale {k} is outside the field")))?;
        self.block_mut(k)[i] = value;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nonzero_count(&self) -> usize {
        self.blocks.iter().flatten().filter(|v| **v != Complex64::new(0.0, 0.0)).count()
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero_count() == 0
    }

    /// `(k, cube, value)` for every stored entry.
    pub fn entries(&self) -> impl Iterator<Item = (DyadicCube, Complex64)> + '_ {
        self.window
            .iter()
            .flat_map(move |k| self.block(k).iter().enumerate().map(move |(i, v)| (self.cube_at(k, i), *v)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let blocks = self.blocks.iter().map(|b| b.iter().map(|&v| f(v)).collect()).collect();
        Self { blocks, ..self.clone() }
    }

    pub fn same_layout(&self, other: &CoefficientField) -> bool {
        self.n == other.n && self.side_log2 == other.side_log2 && self.window == other.window
    }

    pub fn add(&self, other: &CoefficientField) -> Result<Self> {
        if !self.same_layout(other) {
            return Err(Error::IncompatibleWindows("coefficient layouts differ".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self { blocks, ..self.clone() })
    }

    pub fn max_abs_diff(&self, other: &CoefficientField) -> Result<f64> {
        if !self.same_layout(other) {
            return Err(Error::IncompatibleWindows("coefficient layouts differ".into()));
        }
        Ok(self.blocks.iter().flatten().zip(other.blocks.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub p: f64,
    pub q: f64,
}

impl NormParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite() && q > 0.0) {
            return Err(Error::InvalidArgument(format!("need 0 < p < inf and q > 0, got p = {p}, q = {q}")));
        }
        Ok(Self { p, q })
    }

    /// `n / min(1, p, q)`.
    pub fn j(&self, n: usize) -> f64 {
        n as f64 / self.p.min(self.q).min(1.0)
    }
}

/// Checks that every scale of `window` fits the grid and its frequency band.
pub fn check_window(spec: &GridSpec, window: ScaleRange) -> Result<()> {
    let (lo, hi) = representable_window(spec)
        .ok_or_else(|| Error::CubeResolution(format!("grid {spec:?} resolves no complete annulus")))?;
    if window.lo < lo || window.hi > hi {
        return Err(Error::CubeResolution(format!(
            "scales {}..={} exceed the representable window {lo}..={hi}",
            window.lo, window.hi
        )));
    }
    for k in window.iter() {
        Lattice::new(spec, k)?;
    }
    Ok(())
}

fn convolve(f: &GridFunction, pair: &FilterPair, which: Which, k: i32) -> GridFunction {
    spectral_multiply(f, &filter_symbol(pair, which, k, f.spec())).expect("symbol built on the same grid")
}

/// `lambda_{k,m} = 2^(-kn/2) (phi~_k * f)(2^-k m)`.
pub fn analyze(f: &GridFunction, pair: &FilterPair, window: ScaleRange) -> Result<CoefficientField> {
    let spec = *f.spec();
    check_window(&spec, window)?;
    let mut field = CoefficientField::zeros(&spec, window)?;
    let scales: Vec<i32> = window.iter().collect();
    let blocks: Vec<Vec<Complex64>> = scales
        .par_iter()
        .map(|&k| {
            let g = convolve(f, pair, Which::PhiTilde, k);
            let lattice = Lattice::new(&spec, k).expect("checked window");
            let factor = 2f64.powf(-(k as f64) * spec.dim() as f64 / 2.0);
            (0..lattice.len()).map(|c| g.values()[lattice.corner_point(c)] * factor).collect()
        })
        .collect();
    field.blocks = blocks;
    Ok(field)
}

/// `sum_m lambda_{k,m} psi_{k,m}` for one scale.
pub fn synthesize_scale(lam: &CoefficientField, pair: &FilterPair, spec: &GridSpec, k: i32) -> Result<GridFunction> {
    lam.check_fits(spec)?;
    if !lam.window().contains(k) {
        return Err(Error::IncompatibleWindows(format!("scale {k} is not in the field")));
    }
    let lattice = Lattice::new(spec, k)?;
    let factor = 2f64.powf(-(k as f64) * spec.dim() as f64 / 2.0) / spec.cell_volume();
    let mut impulses = GridFunction::zeros(*spec);
    for (c, v) in lam.block(k).iter().enumerate() {
        impulses.values_mut()[lattice.corner_point(c)] = v * factor;
    }
    spectral_multiply(&impulses, &filter_symbol(pair, Which::Psi, k, spec))
}

/// Inverse transform `sum_{k,m} lambda_{k,m} psi_{k,m}` on the grid.
pub fn synthesize(lam: &CoefficientField, pair: &FilterPair, spec: &GridSpec) -> Result<GridFunction> {
    check_window(spec, lam.window())?;
    lam.check_fits(spec)?;
    let scales: Vec<i32> = lam.window().iter().collect();
    let parts = scales.par_iter().map(|&k| synthesize_scale(lam, pair, spec, k)).collect::<Result<Vec<_>>>()?;
    let mut out = GridFunction::zeros(*spec);
    for part in parts {
        out.values_mut().iter_mut().zip(part.values()).for_each(|(a, b)| *a += b);
    }
    Ok(out)
}

/// `||(sum_k t_k^q |phi_k * f|^q)^(1/q)||_p` over the scales of `t`.
pub fn f_norm(f: &GridFunction, t: &WeightSequence, np: &NormParams, pair: &FilterPair) -> Result<f64> {
    let spec = *f.spec();
    if t.spec() != &spec {
        return Err(Error::IncompatibleGrids("weights and function live on different grids".into()));
    }
    check_window(&spec, t.range()).map_err(|e| Error::IncompatibleWindows(e.to_string()))?;
    let scales: Vec<i32> = t.range().iter().collect();
    let terms: Vec<Vec<f64>> = scales
        .par_iter()
        .map(|&k| {
            let g = convolve(f, pair, Which::Phi, k);
            let w = t.samples(k).expect("scale in range");
            g.values().iter().zip(w).map(|(v, w)| v.norm() * w).collect()
        })
        .collect();
    lp_norm_of_samples(&spec, &pointwise_lq(spec.len(), &terms, np.q), np.p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqNormMode {
    Standard,
    /// Cube-local weights `||t_k | L_(delta p)(Q)||`.
    Delta(f64),
}

fn check_weights_cover(lam: &CoefficientField, t: &WeightSequence) -> Result<()> {
    if !t.range().covers(&lam.window()) {
        return Err(Error::IncompatibleWindows(format!(
            "weights on {}..={} do not cover coefficients on {}..={}",
            t.range().lo,
            t.range().hi,
            lam.window().lo,
            lam.window().hi
        )));
    }
    lam.check_fits(t.spec())
}

/// Coefficient-side quasi-norm.
pub fn seq_norm(lam: &CoefficientField, t: &WeightSequence, np: &NormParams, mode: SeqNormMode) -> Result<f64> {
    check_weights_cover(lam, t)?;
    let spec = *t.spec();
    let n = spec.dim() as f64;
    let scales: Vec<i32> = lam.window().iter().collect();
    let terms: Vec<Vec<f64>> = match mode {
        SeqNormMode::Standard => scales
            .par_iter()
            .map(|&k| {
                let lattice = Lattice::new(&spec, k).expect("fits");
                let w = t.samples(k).expect("covered");
                let block = lam.block(k);
                let factor = 2f64.powf(k as f64 * n / 2.0);
                (0..spec.len()).map(|i| factor * block[lattice.cell_of_point(i)].norm() * w[i]).collect()
            })
            .collect(),
        SeqNormMode::Delta(delta) => {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(Error::InvalidArgument(format!("delta must lie in (0, 1], got {delta}")));
            }
            let e = delta * np.p;
            scales
                .par_iter()
                .map(|&k| {
                    let lattice = Lattice::new(&spec, k).expect("fits");
                    let local = t.local_norms(k, e)?;
                    let block = lam.block(k);
                    let factor = 2f64.powf(k as f64 * n * (0.5 + 1.0 / e));
                    Ok((0..spec.len())
                        .map(|i| {
                            let c = lattice.cell_of_point(i);
                            factor * local[c] * block[c].norm()
                        })
                        .collect())
                })
                .collect::<Result<_>>()?
        }
    };
    lp_norm_of_samples(&spec, &pointwise_lq(spec.len(), &terms, np.q), np.p)
}

/// `lambda*_{k,m} = (sum_h |lambda_{k,h}|^r (1 + |h - m|)^-d)^(1/r)` with periodic lattice distance.
pub fn peak_functional(lam: &CoefficientField, r: f64, d: f64) -> Result<CoefficientField> {
    if !(r > 0.0 && d > 0.0) {
        return Err(Error::InvalidArgument(format!("need r > 0 and d > 0, got r = {r}, d = {d}")));
    }
    let mut out = lam.clone();
    for k in lam.window().iter() {
        let c = lam.cells_per_axis(k);
        let block = lam.block(k);
        let powered: Vec<f64> = block.iter().map(|v| v.norm().powf(r)).collect();
        let wrap = |a: usize, b: usize| {
            let d = a.abs_diff(b);
            d.min(c - d) as f64
        };
        let decay: Vec<f64> = (0..c).map(|o| o.min(c - o) as f64).collect();
        let star: Vec<Complex64> = (0..block.len())
            .into_par_iter()
            .map(|m| {
                let s: f64 = if lam.dim() == 1 {
                    powered.iter().enumerate().map(|(h, v)| v * (1.0 + wrap(h, m)).powf(-d)).sum()
                } else {
                    let (m0, m1) = (m / c, m % c);
                    powered
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0.0)
                        .map(|(h, v)| {
                            let d0 = decay[(h / c + c - m0) % c];
                            let d1 = decay[(h % c + c - m1) % c];
                            v * (1.0 + d0.hypot(d1)).powf(-d)
                        })
                        .sum()
                };
                Complex64::new(s.powf(1.0 / r), 0.0)
            })
            .collect();
        out.block_mut(k).copy_from_slice(&star);
    }
    Ok(out)
}

/// `max |lambda_{k,m}| 2^(kn/2) t_{k,m} / ||lambda||`.
pub fn coefficient_bound_check(lam: &CoefficientField, t: &WeightSequence, np: &NormParams) -> Result<f64> {
    let norm = seq_norm(lam, t, np, SeqNormMode::Standard)?;
    if norm == 0.0 {
        return Err(Error::DegenerateInput("coefficient norm vanishes".into()));
    }
    let n = t.spec().dim() as f64;
    let mut worst = 0.0f64;
    for k in lam.window().iter() {
        let local = t.local_norms(k, np.p)?;
        let factor = 2f64.powf(k as f64 * n / 2.0);
        for (v, tl) in lam.block(k).iter().zip(&local) {
            worst = worst.max(v.norm() * factor * tl / norm);
        }
    }
    Ok(worst)
}

/// Cube-wise sup and inf functionals of `phi~_k * f`.
///
/// The sup field takes the largest sample in each cube; the inf field takes,
/// over the sub-cubes of side `2^(-k-gamma)`, the largest of their smallest samples.
pub fn sup_inf_functionals(
    f: &GridFunction,
    pair: &FilterPair,
    gamma: u32,
    window: ScaleRange,
) -> Result<(CoefficientField, CoefficientField)> {
    let spec = *f.spec();
    check_window(&spec, window)?;
    for k in window.iter() {
        Lattice::new(&spec, k + gamma as i32)?;
    }
    let mut sup = CoefficientField::zeros(&spec, window)?;
    let mut inf = sup.clone();
    for k in window.iter() {
        let g = convolve(f, pair, Which::PhiTilde, k).abs();
        let lattice = Lattice::new(&spec, k)?;
        let fine = Lattice::new(&spec, k + gamma as i32)?;
        let factor = 2f64.powf(-(k as f64) * spec.dim() as f64 / 2.0);
        let maxima = Pyramid::maxima(&spec, &g);
        let minima = Pyramid::minima(&spec, &g);
        let top = maxima.level(lattice.level());
        let fine_min = minima.level(fine.level());
        let ratio = 1usize << gamma;
        for c in 0..lattice.len() {
            sup.block_mut(k)[c] = Complex64::new(factor * top[c], 0.0);
            let cc = lattice.cell_coords(c);
            let mut best = 0.0f64;
            let span1 = if spec.dim() == 1 { 1 } else { ratio };
            for a in 0..ratio {
                for b in 0..span1 {
                    let sub = fine.flat_cell([cc[0] * ratio + a, cc[1] * ratio + b]);
                    best = best.max(fine_min[sub]);
                }
            }
            inf.block_mut(k)[c] = Complex64::new(factor * best, 0.0);
        }
    }
    Ok((sup, inf))
}
