use num_complex::Complex64;
use rayon::prelude::*;

use super::atoms::{bump, derivative_ratio, AtomFamily, Normalization, ATOM_HEADROOM};
use crate::dyadic::{DyadicCube, Lattice};
use crate::error::{Error, Result};
use crate::filters::{representable_window, FilterPair};
use crate::grid::{GridFunction, GridSpec};
use crate::transform::{analyze, synthesize_scale, CoefficientField};
use crate::weights::ScaleRange;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    pub window: ScaleRange,
    /// Vanishing moments of each atom; only -1 and 0 are supported.
    pub moments: i32,
    pub derivatives: u32,
    pub normalization: Normalization,
}

impl DecomposeOptions {
    /// The full representable window, one vanishing moment, first derivatives.
    pub fn for_grid(spec: &GridSpec) -> Result<Self> {
        let (lo, hi) = representable_window(spec)
            .ok_or_else(|| Error::CubeResolution(format!("grid {spec:?} resolves no complete annulus")))?;
        Ok(Self { window: ScaleRange::new(lo, hi)?, moments: 0, derivatives: 1, normalization: Normalization::default() })
    }
}

/// Partition weight of the cell starting at 0, at position `u` in cell units.
fn partition_weight(u: f64) -> f64 {
    let sq = |v: f64| bump((v - 0.5) / 1.5).powi(2);
    let total: f64 = (-2..=2).map(|j| sq(u - u.floor() - j as f64)).sum();
    sq(u) / total
}

/// `u - m` reduced to `[-c/2, c/2)`.
fn cell_offset(u: f64, m: i64, c: usize) -> f64 {
    let c = c as f64;
    (u - m as f64 + c / 2.0).rem_euclid(c) - c / 2.0
}

struct ScaleGeometry {
    spec: GridSpec,
    lattice: Lattice,
    cells: usize,
    /// Position of every grid point along each axis in cell units.
    coords: Vec<[f64; 2]>,
}

impl ScaleGeometry {
    fn new(spec: &GridSpec, k: i32) -> Result<Self> {
        let lattice = Lattice::new(spec, k)?;
        let cells = lattice.cells_per_axis();
        let unit = 2f64.powi(k);
        let coords = (0..spec.len())
            .map(|i| {
                let x = spec.point(i);
                [x[0] * unit, x[1] * unit]
            })
            .collect();
        Ok(Self { spec: *spec, lattice, cells, coords })
    }

    fn product(&self, factor: impl Fn(usize, f64) -> f64) -> Vec<f64> {
        let n = self.spec.dim();
        self.coords.iter().map(|u| (0..n).map(|a| factor(a, u[a])).product()).collect()
    }

    fn partition(&self, cell: [usize; 2]) -> Vec<f64> {
        self.product(|a, u| partition_weight(cell_offset(u, cell[a] as i64, self.cells)))
    }

    /// Unit-mass bump supported in the intersection of the triples of `cell` and `next`.
    fn bridge(&self, cell: [usize; 2], next: [usize; 2]) -> Vec<f64> {
        let c = self.cells;
        let raw = self.product(|a, u| {
            let step = (next[a] + c - cell[a]) % c;
            let (center, radius) = match step {
                0 => (0.5, 1.5),
                1 => (1.0, 1.0),
                _ => (0.0, 1.0),
            };
            bump((cell_offset(u, cell[a] as i64, c) - center) / radius)
        });
        let mass: f64 = raw.iter().sum::<f64>() * self.spec.cell_volume();
        raw.into_iter().map(|v| v / mass).collect()
    }
}

/// Splits `f` into atoms supported in the triples of dyadic cubes, with coefficients homogeneous in `f`.
pub fn atomic_decompose(f: &GridFunction, pair: &FilterPair) -> Result<(AtomFamily, CoefficientField)> {
    atomic_decompose_with(f, pair, &DecomposeOptions::for_grid(f.spec())?)
}

pub fn atomic_decompose_with(
    f: &GridFunction,
    pair: &FilterPair,
    opts: &DecomposeOptions,
) -> Result<(AtomFamily, CoefficientField)> {
    if !(opts.moments == -1 || opts.moments == 0) {
        return Err(Error::InvalidArgument(format!(
            "decomposition supports moment orders -1 and 0, got {}",
            opts.moments
        )));
    }
    let spec = *f.spec();
    let coeffs = analyze(f, pair, opts.window)?;
    let mut lam = coeffs.map(|_| Complex64::new(0.0, 0.0));
    let mut family = AtomFamily::new(spec, opts.normalization, opts.moments, opts.derivatives);
    let scales: Vec<i32> = opts.window.iter().collect();
    let per_scale = scales
        .par_iter()
        .map(|&k| decompose_scale(&coeffs, pair, &spec, k, opts))
        .collect::<Result<Vec<_>>>()?;
    for (k, pieces) in scales.into_iter().zip(per_scale) {
        for (cube, coefficient, atom) in pieces {
            lam.set(k, &cube.m[..cube.n], coefficient)?;
            family.push(cube, &atom)?;
        }
    }
    Ok((family, lam))
}

type Piece = (DyadicCube, Complex64, GridFunction);

fn decompose_scale(
    coeffs: &CoefficientField,
    pair: &FilterPair,
    spec: &GridSpec,
    k: i32,
    opts: &DecomposeOptions,
) -> Result<Vec<Piece>> {
    let geo = ScaleGeometry::new(spec, k)?;
    if geo.cells < 3 {
        return Err(Error::Decomposition {
            cube: geo.lattice.cube(0),
            reason: format!("scale {k} has {} cells per axis; the partition needs at least 3", geo.cells),
        });
    }
    let fk = synthesize_scale(coeffs, pair, spec, k)?;
    let count = geo.lattice.len();
    let cell = |i: usize| geo.lattice.cell_coords(i);
    let vol = spec.cell_volume();
    let mut pieces: Vec<Vec<Complex64>> = (0..count)
        .into_par_iter()
        .map(|i| geo.partition(cell(i)).iter().zip(fk.values()).map(|(w, v)| v * w).collect())
        .collect();
    if opts.moments == 0 {
        let masses: Vec<Complex64> = pieces.iter().map(|p| p.iter().sum::<Complex64>() * vol).collect();
        let mut running = Vec::with_capacity(count);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in &masses {
            acc += m;
            running.push(acc);
        }
        let bridges: Vec<Vec<f64>> =
            (0..count).into_par_iter().map(|i| geo.bridge(cell(i), cell((i + 1) % count))).collect();
        for i in 0..count {
            let prev = (i + count - 1) % count;
            let (out, inp) = (running[i], running[prev]);
            let piece = &mut pieces[i];
            for (j, v) in piece.iter_mut().enumerate() {
                *v += inp * bridges[prev][j] - out * bridges[i][j];
            }
        }
    }
    pieces
        .into_par_iter()
        .enumerate()
        .filter_map(|(i, values)| {
            let cube = geo.lattice.cube(i);
            let piece = GridFunction::new(*spec, values).expect("grid sized");
            let ratio = derivative_ratio(&piece, k, opts.derivatives, opts.normalization);
            if ratio == 0.0 {
                return None;
            }
            if !ratio.is_finite() {
                return Some(Err(Error::Decomposition { cube, reason: "local piece is not finite".into() }));
            }
            let size = ratio / ATOM_HEADROOM;
            let peak = piece.values().iter().copied().fold(Complex64::new(0.0, 0.0), |best, v| {
                if v.norm() > best.norm() {
                    v
                } else {
                    best
                }
            });
            let phase = peak / peak.norm();
            let coefficient = phase * size;
            Some(Ok((cube, coefficient, piece.scaled(coefficient.inv()))))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_sums_to_one() {
        for i in 0..200 {
            let u = -3.0 + i as f64 * 0.0371;
            let total: f64 = (-6..6).map(|m| partition_weight(u - m as f64)).sum();
            assert!((total - 1.0).abs() < 1e-14, "u = {u}");
        }
        assert_eq!(partition_weight(-1.0), 0.0);
        assert_eq!(partition_weight(2.0), 0.0);
    }
}
