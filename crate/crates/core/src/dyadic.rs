//! Dyadic cubes on the periodic grid, cube means and the Calderon-Zygmund covering.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::maximal::{hl_maximal_with, MaximalKind};

/// The cube `2^-k ([0,1)^n + m)`. Unused trailing components of `m` are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub k: i32,
    pub m: [i64; 2],
    pub n: usize,
}

impl DyadicCube {
    pub fn new(k: i32, m: &[i64]) -> Self {
        assert!(m.len() == 1 || m.len() == 2, "cube index must have 1 or 2 components");
        let mut mm = [0i64; 2];
        mm[..m.len()].copy_from_slice(m);
        Self { k, m: mm, n: m.len() }
    }

    pub fn side(&self) -> f64 {
        2f64.powi(-self.k)
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.n as i32)
    }

    /// Lower-left corner `2^-k m`.
    pub fn corner(&self) -> [f64; 2] {
        let s = self.side();
        [self.m[0] as f64 * s, self.m[1] as f64 * s]
    }

    pub fn center(&self) -> [f64; 2] {
        let s = self.side();
        let c = self.corner();
        if self.n == 1 {
            [c[0] + s / 2.0, 0.0]
        } else {
            [c[0] + s / 2.0, c[1] + s / 2.0]
        }
    }

    pub fn parent(&self) -> Self {
        Self { k: self.k - 1, m: [self.m[0].div_euclid(2), self.m[1].div_euclid(2)], n: self.n }
    }

    /// `[k, m_0, .., m_{n-1}]`.
    pub fn to_vec(&self) -> Vec<i64> {
        let mut v = vec![self.k as i64];
        v.extend_from_slice(&self.m[..self.n]);
        v
    }

    pub fn from_slice(v: &[i64]) -> Result<Self> {
        match v.len() {
            2 | 3 => Ok(Self::new(v[0] as i32, &v[1..])),
            _ => Err(Error::Format(format!("cube must be [k, m..] with 1 or 2 indices, got {v:?}"))),
        }
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "Q(k={}, m={})", self.k, self.m[0])
        } else {
            write!(f, "Q(k={}, m=({}, {}))", self.k, self.m[0], self.m[1])
        }
    }
}

/// Tiling of the torus by the cubes of one scale.
///
/// Level `j = k + log2 T` counts generations below the whole domain; a scale is
/// representable when `T` is a power of two and `0 <= j <= L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    spec: GridSpec,
    k: i32,
    level: u32,
}

impl Lattice {
    pub fn new(spec: &GridSpec, k: i32) -> Result<Self> {
        let t = spec.side_log2().ok_or_else(|| {
            Error::CubeResolution(format!("side {} is not a power of two", spec.side()))
        })?;
        let level = k + t;
        if level < 0 || level > spec.level() as i32 {
            return Err(Error::CubeResolution(format!(
                "scale {k} needs cubes of side 2^{} on a grid with spacing {} and side {}",
                -k,
                spec.spacing(),
                spec.side()
            )));
        }
        Ok(Self { spec: *spec, k, level: level as u32 })
    }

    /// Lattice at dyadic level `level` (generations below the domain).
    pub fn at_level(spec: &GridSpec, level: u32) -> Result<Self> {
        let t = spec.side_log2().ok_or_else(|| {
            Error::CubeResolution(format!("side {} is not a power of two", spec.side()))
        })?;
        Self::new(spec, level as i32 - t)
    }

    pub fn scale(&self) -> i32 {
        self.k
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cells_per_axis(&self) -> usize {
        1usize << self.level
    }

    pub fn len(&self) -> usize {
        1usize << (self.level as usize * self.spec.dim())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid points along one axis of a cell.
    pub fn points_per_side(&self) -> usize {
        1usize << (self.spec.level() - self.level)
    }

    pub fn points_per_cell(&self) -> usize {
        self.points_per_side().pow(self.spec.dim() as u32)
    }

    pub fn cell_of_point(&self, idx: usize) -> usize {
        let ij = self.spec.unflatten(idx);
        let s = self.points_per_side();
        self.flat_cell([ij[0] / s, ij[1] / s])
    }

    pub fn flat_cell(&self, c: [usize; 2]) -> usize {
        if self.spec.dim() == 1 {
            c[0]
        } else {
            c[0] * self.cells_per_axis() + c[1]
        }
    }

    pub fn cell_coords(&self, flat: usize) -> [usize; 2] {
        if self.spec.dim() == 1 {
            [flat, 0]
        } else {
            let c = self.cells_per_axis();
            [flat / c, flat % c]
        }
    }

    pub fn cube(&self, flat: usize) -> DyadicCube {
        let c = self.cell_coords(flat);
        let m = [c[0] as i64, c[1] as i64];
        DyadicCube::new(self.k, &m[..self.spec.dim()])
    }

    /// Flat index of a cube lying in the fundamental domain.
    pub fn index_of(&self, q: &DyadicCube) -> Result<usize> {
        if q.k != self.k || q.n != self.spec.dim() {
            return Err(Error::CubeResolution(format!("{q} does not belong to scale {}", self.k)));
        }
        let c = self.cells_per_axis() as i64;
        let inside = q.m[..q.n].iter().all(|&m| (0..c).contains(&m));
        if !inside {
            return Err(Error::CubeResolution(format!("{q} lies outside the fundamental domain")));
        }
        Ok(self.flat_cell([q.m[0] as usize, q.m[1] as usize]))
    }

    /// Flat index of a cube, reducing its position periodically.
    pub fn index_of_periodic(&self, q: &DyadicCube) -> usize {
        let c = self.cells_per_axis() as i64;
        self.flat_cell([q.m[0].rem_euclid(c) as usize, q.m[1].rem_euclid(c) as usize])
    }

    /// Grid index of the lower-left sample of a cell.
    pub fn corner_point(&self, flat: usize) -> usize {
        let c = self.cell_coords(flat);
        let s = self.points_per_side();
        self.spec.flatten([c[0] * s, c[1] * s])
    }

    /// Grid indices of the samples inside a cell, lexicographic.
    pub fn cell_points(&self, flat: usize) -> Vec<usize> {
        let c = self.cell_coords(flat);
        let s = self.points_per_side();
        if self.spec.dim() == 1 {
            (c[0] * s..(c[0] + 1) * s).collect()
        } else {
            let mut out = Vec::with_capacity(s * s);
            for a in c[0] * s..(c[0] + 1) * s {
                for b in c[1] * s..(c[1] + 1) * s {
                    out.push(self.spec.flatten([a, b]));
                }
            }
            out
        }
    }

    /// Flat indices of the `3^n` cells forming the periodic triple of a cell, with repetition.
    pub fn neighbours(&self, flat: usize) -> Vec<usize> {
        let c = self.cell_coords(flat);
        let n = self.cells_per_axis() as i64;
        let shift = |a: usize, d: i64| (a as i64 + d).rem_euclid(n) as usize;
        if self.spec.dim() == 1 {
            (-1..=1).map(|d| shift(c[0], d)).collect()
        } else {
            let mut out = Vec::with_capacity(9);
            for d0 in -1..=1 {
                for d1 in -1..=1 {
                    out.push(self.flat_cell([shift(c[0], d0), shift(c[1], d1)]));
                }
            }
            out
        }
    }
}

/// Per-level reductions of grid samples over dyadic cells, from the whole
/// domain (level 0) down to single samples (level `L`).
///
/// Sums combine the `2^n` children in a fixed pairwise order, so a parent sum
/// is exactly the tree sum of its children.
#[derive(Debug, Clone)]
pub struct Pyramid {
    spec: GridSpec,
    levels: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
enum Reduce {
    Sum,
    Max,
    Min,
}

impl Pyramid {
    pub fn sums(spec: &GridSpec, samples: &[f64]) -> Self {
        Self::build(spec, samples, Reduce::Sum)
    }

    pub fn maxima(spec: &GridSpec, samples: &[f64]) -> Self {
        Self::build(spec, samples, Reduce::Max)
    }

    pub fn minima(spec: &GridSpec, samples: &[f64]) -> Self {
        Self::build(spec, samples, Reduce::Min)
    }

    fn build(spec: &GridSpec, samples: &[f64], op: Reduce) -> Self {
        assert_eq!(samples.len(), spec.len());
        let combine = |a: f64, b: f64| match op {
            Reduce::Sum => a + b,
            Reduce::Max => a.max(b),
            Reduce::Min => a.min(b),
        };
        let dim = spec.dim();
        let top = spec.level() as usize;
        let mut levels = vec![Vec::new(); top + 1];
        levels[top] = samples.to_vec();
        for j in (0..top).rev() {
            let child = &levels[j + 1];
            let cells = 1usize << j;
            let child_cells = cells * 2;
            let parent = if dim == 1 {
                (0..cells).map(|c| combine(child[2 * c], child[2 * c + 1])).collect()
            } else {
                let mut out = Vec::with_capacity(cells * cells);
                for a in 0..cells {
                    for b in 0..cells {
                        let at = |da: usize, db: usize| child[(2 * a + da) * child_cells + 2 * b + db];
                        out.push(combine(combine(at(0, 0), at(0, 1)), combine(at(1, 0), at(1, 1))));
                    }
                }
                out
            };
            levels[j] = parent;
        }
        Self { spec: *spec, levels }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    /// Reductions at level `j` in lattice order.
    pub fn level(&self, j: u32) -> &[f64] {
        &self.levels[j as usize]
    }

    /// Sums at level `j` divided by the sample count per cell.
    pub fn means(&self, j: u32) -> Vec<f64> {
        let count = (1usize << ((self.depth() - j) as usize * self.spec.dim())) as f64;
        self.levels[j as usize].iter().map(|s| s / count).collect()
    }
}

/// Tree sum of the samples in one cell, matching [`Pyramid::sums`] exactly.
fn cell_tree_sum(spec: &GridSpec, samples: &[f64], origin: [usize; 2], size: usize) -> f64 {
    if size == 1 {
        return samples[spec.flatten(origin)];
    }
    let h = size / 2;
    let sub = |da: usize, db: usize| cell_tree_sum(spec, samples, [origin[0] + da * h, origin[1] + db * h], h);
    if spec.dim() == 1 {
        sub(0, 0) + sub(1, 0)
    } else {
        (sub(0, 0) + sub(0, 1)) + (sub(1, 0) + sub(1, 1))
    }
}

/// Grid version of `(|Q|^-1 int_Q |f|^p)^(1/p)`.
pub fn cube_mean(f: &GridFunction, q: &DyadicCube, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent must be positive and finite, got {p}")));
    }
    let lattice = Lattice::new(f.spec(), q.k)?;
    let flat = lattice.index_of(q)?;
    let samples: Vec<f64> = f.values().iter().map(|v| v.norm().powf(p)).collect();
    let c = lattice.cell_coords(flat);
    let s = lattice.points_per_side();
    let sum = cell_tree_sum(f.spec(), &samples, [c[0] * s, c[1] * s], s);
    Ok((sum / lattice.points_per_cell() as f64).powf(1.0 / p))
}

/// All cubes of scale `k` tiling the fundamental domain, lexicographic.
pub fn enumerate_cubes(spec: &GridSpec, k: i32) -> Result<Vec<DyadicCube>> {
    let lattice = Lattice::new(spec, k)?;
    Ok((0..lattice.len()).map(|i| lattice.cube(i)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverLevel {
    pub i: i32,
    pub cubes: Vec<DyadicCube>,
    pub means: Vec<f64>,
    /// Grid indices of each carved set, sorted.
    pub carved: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CzCover {
    pub a: f64,
    pub beta: f64,
    pub levels: Vec<CoverLevel>,
    /// Grid points where the maximal function exceeds `4^n a^i` outside every tripled cube of level `i`.
    pub omega_violations: Vec<(i32, usize)>,
}

#[derive(Serialize, Deserialize)]
struct CoverLevelJson {
    i: i32,
    cubes: Vec<Vec<i64>>,
    #[serde(rename = "E_sizes")]
    e_sizes: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CzCoverJson {
    a: f64,
    beta: f64,
    levels: Vec<CoverLevelJson>,
    omega_violations: usize,
}

impl CzCover {
    pub fn to_json(&self) -> Result<String> {
        let view = CzCoverJson {
            a: self.a,
            beta: self.beta,
            levels: self
                .levels
                .iter()
                .map(|l| CoverLevelJson {
                    i: l.i,
                    cubes: l.cubes.iter().map(DyadicCube::to_vec).collect(),
                    e_sizes: l.carved.iter().map(Vec::len).collect(),
                })
                .collect(),
            omega_violations: self.omega_violations.len(),
        };
        Ok(serde_json::to_string_pretty(&view)?)
    }
}

struct Selection {
    cubes: Vec<(u32, usize)>,
    means: Vec<f64>,
}

fn select_level(means: &[Vec<f64>], spec: &GridSpec, threshold: f64) -> Selection {
    let dim = spec.dim();
    let mut blocked = vec![false];
    let mut out = Selection { cubes: Vec::new(), means: Vec::new() };
    for (j, level_means) in means.iter().enumerate() {
        let cells = 1usize << j;
        let mut next_blocked = vec![false; level_means.len()];
        for (flat, &mean) in level_means.iter().enumerate() {
            let parent_blocked = if j == 0 {
                false
            } else if dim == 1 {
                blocked[flat / 2]
            } else {
                let (a, b) = (flat / cells, flat % cells);
                blocked[(a / 2) * (cells / 2) + b / 2]
            };
            if parent_blocked {
                next_blocked[flat] = true;
            } else if mean >= threshold {
                out.cubes.push((j as u32, flat));
                out.means.push(mean);
                next_blocked[flat] = true;
            }
        }
        blocked = next_blocked;
    }
    out
}

fn log_base(x: f64, a: f64) -> f64 {
    x.ln() / a.ln()
}

/// Calderon-Zygmund covering of `|f|` at the levels `a^i`, `i` in `i_range`.
///
/// Without an explicit range the levels run from the lowest one whose threshold
/// keeps the whole domain within `2^n a^i` up to the largest sample.
pub fn cz_covering(f: &GridFunction, a: f64, i_range: Option<(i32, i32)>) -> Result<CzCover> {
    let spec = *f.spec();
    let dim = spec.dim();
    let two_n = (1u32 << dim) as f64;
    if !(a >= 2.0 * two_n) {
        return Err(Error::InvalidArgument(format!("level base must be at least 2^(n+1) = {}, got {a}", 2.0 * two_n)));
    }
    Lattice::at_level(&spec, 0)?;
    let samples = f.abs();
    let top = samples.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::DegenerateInput("function vanishes identically".into()));
    }
    let pyramid = Pyramid::sums(&spec, &samples);
    let means: Vec<Vec<f64>> = (0..=spec.level()).map(|j| pyramid.means(j)).collect();
    let domain_mean = means[0][0];

    let lowest_feasible = {
        let mut i = log_base(domain_mean / two_n, a).ceil() as i32;
        while a.powi(i) * two_n < domain_mean {
            i += 1;
        }
        while a.powi(i - 1) * two_n >= domain_mean {
            i -= 1;
        }
        i
    };
    let (i_lo, i_hi) = match i_range {
        Some((lo, hi)) => {
            if lo > hi {
                return Err(Error::InvalidArgument(format!("empty level range {lo}..={hi}")));
            }
            if lo < lowest_feasible {
                return Err(Error::InvalidArgument(format!(
                    "level {lo} selects the whole domain with mean {domain_mean} above 2^n a^{lo}; lowest admissible level is {lowest_feasible}"
                )));
            }
            (lo, hi)
        }
        None => {
            let min_pos = means.iter().flatten().copied().filter(|&m| m > 0.0).fold(f64::INFINITY, f64::min);
            let mut hi = log_base(top, a).floor() as i32;
            while a.powi(hi + 1) <= top {
                hi += 1;
            }
            while a.powi(hi) > top {
                hi -= 1;
            }
            let lo = (log_base(min_pos, a).floor() as i32).max(lowest_feasible);
            (lo, hi.max(lo))
        }
    };

    let maximal = hl_maximal_with(f, MaximalKind::Tripled);
    let maximal = maximal.real_parts();
    let four_n = 4f64.powi(dim as i32);

    let selections: Vec<Selection> = (i_lo..=i_hi + 1).map(|i| select_level(&means, &spec, a.powi(i))).collect();
    let mut levels = Vec::new();
    let mut beta = 1.0f64;
    let mut omega_violations = Vec::new();
    for (offset, i) in (i_lo..=i_hi).enumerate() {
        let sel = &selections[offset];
        let finer = &selections[offset + 1];
        let mut in_finer = vec![false; spec.len()];
        for &(j, flat) in &finer.cubes {
            let lattice = Lattice::at_level(&spec, j)?;
            for idx in lattice.cell_points(flat) {
                in_finer[idx] = true;
            }
        }
        let mut cubes = Vec::with_capacity(sel.cubes.len());
        let mut carved = Vec::with_capacity(sel.cubes.len());
        let mut tripled: Vec<Vec<bool>> = (0..=spec.level()).map(|j| vec![false; 1usize << (j as usize * dim)]).collect();
        for &(j, flat) in &sel.cubes {
            let lattice = Lattice::at_level(&spec, j)?;
            cubes.push(lattice.cube(flat));
            let pts = lattice.cell_points(flat);
            let total = pts.len();
            let e: Vec<usize> = pts.into_iter().filter(|&p| !in_finer[p]).collect();
            beta = beta.max(if e.is_empty() { f64::INFINITY } else { total as f64 / e.len() as f64 });
            carved.push(e);
            for nb in lattice.neighbours(flat) {
                tripled[j as usize][nb] = true;
            }
        }
        let threshold = four_n * a.powi(i);
        let used: Vec<u32> = (0..=spec.level()).filter(|&j| tripled[j as usize].iter().any(|&b| b)).collect();
        let lattices: Vec<Lattice> = used.iter().map(|&j| Lattice::at_level(&spec, j)).collect::<Result<_>>()?;
        for (idx, &mx) in maximal.iter().enumerate() {
            if mx > threshold {
                let covered = used.iter().zip(&lattices).any(|(&j, l)| tripled[j as usize][l.cell_of_point(idx)]);
                if !covered {
                    omega_violations.push((i, idx));
                }
            }
        }
        levels.push(CoverLevel { i, cubes, means: sel.means.clone(), carved });
    }
    Ok(CzCover { a, beta, levels, omega_violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use num_complex::Complex64;

    fn indicator(spec: GridSpec, hi: f64) -> GridFunction {
        GridFunction::from_real_fn(spec, |x| if x[0] < hi { 1.0 } else { 0.0 })
    }

    #[test]
    fn cube_mean_examples() {
        let g = make_grid(1, 6, 1.0).unwrap();
        let c = GridFunction::constant(g, Complex64::new(-2.5, 0.0));
        let q = DyadicCube::new(2, &[3]);
        assert_eq!(cube_mean(&c, &q, 1.0).unwrap(), 2.5);
        let f = indicator(g, 0.5);
        let unit = DyadicCube::new(0, &[0]);
        assert_eq!(cube_mean(&f, &unit, 1.0).unwrap(), 0.5);
        assert_eq!(cube_mean(&f, &unit, 2.0).unwrap(), 0.5f64.sqrt());
    }

    #[test]
    fn unrepresentable_cubes() {
        let g = make_grid(1, 4, 1.0).unwrap();
        let f = GridFunction::zeros(g);
        assert!(matches!(cube_mean(&f, &DyadicCube::new(5, &[0]), 1.0), Err(Error::CubeResolution(_))));
        assert!(matches!(cube_mean(&f, &DyadicCube::new(-1, &[0]), 1.0), Err(Error::CubeResolution(_))));
        assert!(matches!(cube_mean(&f, &DyadicCube::new(1, &[2]), 1.0), Err(Error::CubeResolution(_))));
        let odd = make_grid(1, 4, 3.0).unwrap();
        assert!(matches!(enumerate_cubes(&odd, 0), Err(Error::CubeResolution(_))));
    }

    #[test]
    fn enumerate_examples() {
        let g1 = make_grid(1, 5, 1.0).unwrap();
        assert_eq!(enumerate_cubes(&g1, 1).unwrap(), vec![DyadicCube::new(1, &[0]), DyadicCube::new(1, &[1])]);
        let g2 = make_grid(2, 5, 1.0).unwrap();
        let cubes = enumerate_cubes(&g2, 1).unwrap();
        assert_eq!(cubes.len(), 4);
        assert_eq!(cubes[1], DyadicCube::new(1, &[0, 1]));
        assert!(matches!(enumerate_cubes(&g1, 6), Err(Error::CubeResolution(_))));
        let g8 = make_grid(1, 5, 8.0).unwrap();
        assert_eq!(enumerate_cubes(&g8, -3).unwrap().len(), 1);
        assert_eq!(enumerate_cubes(&g8, 1).unwrap().len(), 16);
    }

    #[test]
    fn pyramid_matches_cube_mean() {
        let g = make_grid(2, 4, 2.0).unwrap();
        let f = GridFunction::from_real_fn(g, |x| (x[0] * 3.1).sin().abs() + x[1] * x[1]);
        let py = Pyramid::sums(&g, &f.abs());
        for j in 0..=4 {
            let lattice = Lattice::at_level(&g, j).unwrap();
            let means = py.means(j);
            for flat in 0..lattice.len() {
                let q = lattice.cube(flat);
                assert_eq!(means[flat], cube_mean(&f, &q, 1.0).unwrap());
            }
        }
    }

    #[test]
    fn cover_selects_half_interval() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let f = indicator(g, 0.125);
        let cover = cz_covering(&f, 4.0, Some((-1, -1))).unwrap();
        assert_eq!(cover.levels[0].cubes, vec![DyadicCube::new(1, &[0])]);
        assert_eq!(cover.levels[0].means, vec![0.25]);
        let empty = cz_covering(&f, 4.0, Some((1, 1))).unwrap();
        assert!(empty.levels[0].cubes.is_empty());
    }

    #[test]
    fn cover_of_constant_is_the_domain() {
        let g = make_grid(2, 5, 1.0).unwrap();
        let f = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        let cover = cz_covering(&f, 9.0, Some((0, 0))).unwrap();
        assert_eq!(cover.levels[0].cubes, vec![DyadicCube::new(0, &[0, 0])]);
        assert_eq!(cover.levels[0].carved[0].len(), g.len());
        assert!(cover.omega_violations.is_empty());
    }

    #[test]
    fn cover_rejects_small_base_and_infeasible_range() {
        let g = make_grid(1, 6, 1.0).unwrap();
        let f = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        assert!(matches!(cz_covering(&f, 4.0 - 1e-9, None), Err(Error::InvalidArgument(_))));
        assert!(matches!(cz_covering(&f, 5.0, Some((-3, 0))), Err(Error::InvalidArgument(_))));
        assert!(matches!(cz_covering(&GridFunction::zeros(g), 5.0, None), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn cover_json_layout() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let cover = cz_covering(&indicator(g, 0.125), 4.0, Some((-1, 0))).unwrap();
        let v: serde_json::Value = serde_json::from_str(&cover.to_json().unwrap()).unwrap();
        assert_eq!(v["a"], 4.0);
        assert_eq!(v["levels"][0]["i"], -1);
        assert_eq!(v["levels"][0]["cubes"][0], serde_json::json!([1, 0]));
        assert!(v["levels"][0]["E_sizes"].is_array());
    }
}
