use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicCube, Lattice};
use crate::error::{Error, Result};
use crate::grid::{spectral_derivative, wrap_displacement, GridFunction, GridSpec};

/// Target size of the largest normalized derivative after scaling.
pub(crate) const ATOM_HEADROOM: f64 = 0.9;

/// Scale-dependent bound on `|d^beta a|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `2^(k|beta| + kn/2)`.
    #[default]
    Consistent,
    /// `2^(kn(|beta| + 1/2))`.
    Strict,
}

impl Normalization {
    pub fn derivative_bound(self, k: i32, order: u32, n: usize) -> f64 {
        let (k, order, n) = (k as f64, order as f64, n as f64);
        match self {
            Self::Consistent => 2f64.powf(k * order + k * n / 2.0),
            Self::Strict => 2f64.powf(k * n * (order + 0.5)),
        }
    }
}

/// Multi-indices `beta` with `|beta| <= max_order` in dimension `n`, ordered by total order.
pub fn multi_indices(n: usize, max_order: i32) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for d in 0..=max_order.max(-1) {
        let d = d as u32;
        if n == 1 {
            out.push([d, 0]);
        } else {
            out.extend((0..=d).rev().map(|a| [a, d - a]));
        }
    }
    out
}

pub(crate) fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// Periodic displacement of each grid point from `center`, in units of `scale`.
pub(crate) fn local_coordinates(spec: &GridSpec, center: [f64; 2], scale: f64) -> Vec<[f64; 2]> {
    let t = spec.side();
    (0..spec.len())
        .map(|i| {
            let x = spec.point(i);
            let mut y = [0.0; 2];
            for a in 0..spec.dim() {
                y[a] = wrap_displacement(x[a] - center[a], t) / scale;
            }
            y
        })
        .collect()
}

pub(crate) fn monomial(y: [f64; 2], beta: [u32; 2]) -> f64 {
    y[0].powi(beta[0] as i32) * y[1].powi(beta[1] as i32)
}

fn cube_index(spec: &GridSpec, q: &DyadicCube) -> Result<Lattice> {
    if q.n != spec.dim() {
        return Err(Error::CubeResolution(format!("{q} does not match dimension {}", spec.dim())));
    }
    let lattice = Lattice::new(spec, q.k)?;
    lattice.index_of(q)?;
    Ok(lattice)
}

/// Largest `|d^beta g| / bound(beta)` over `|beta| <= order`.
pub(crate) fn derivative_ratio(g: &GridFunction, k: i32, order: u32, norm: Normalization) -> f64 {
    let n = g.spec().dim();
    multi_indices(n, order as i32)
        .into_iter()
        .map(|beta| {
            let bound = norm.derivative_bound(k, beta[0] + beta[1], n);
            let d = if beta == [0, 0] { g.clone() } else { spectral_derivative(g, beta) };
            d.values().iter().map(|v| v.norm()).fold(0.0, f64::max) / bound
        })
        .fold(0.0, f64::max)
}

/// Moments `sum y^beta g h^n` in coordinates centered at the cube center, scaled by the cube side.
pub(crate) fn local_moments(g: &GridFunction, q: &DyadicCube, order: i32) -> Vec<Complex64> {
    let spec = g.spec();
    let y = local_coordinates(spec, q.center(), q.side());
    let vol = spec.cell_volume();
    multi_indices(spec.dim(), order)
        .into_iter()
        .map(|beta| y.iter().zip(g.values()).map(|(y, v)| v * monomial(*y, beta)).sum::<Complex64>() * vol)
        .collect()
}

/// A smooth tensor bump supported in `3Q` with vanishing moments up to `moments`,
/// scaled so every derivative of order at most `derivatives` sits at 0.9 of its bound.
pub fn build_smooth_atom(q: &DyadicCube, moments: i32, derivatives: u32, spec: &GridSpec) -> Result<GridFunction> {
    build_smooth_atom_with(q, moments, derivatives, spec, Normalization::default())
}

pub fn build_smooth_atom_with(
    q: &DyadicCube,
    moments: i32,
    derivatives: u32,
    spec: &GridSpec,
    norm: Normalization,
) -> Result<GridFunction> {
    if moments < -1 {
        return Err(Error::InvalidArgument(format!("moment order must be at least -1, got {moments}")));
    }
    let lattice = cube_index(spec, q)?;
    if 3.0 * q.side() > spec.side() {
        return Err(Error::CubeResolution(format!("3Q of {q} does not fit in the domain")));
    }
    if lattice.points_per_side() < 4 {
        return Err(Error::AtomConstruction(format!(
            "{q} has {} grid points per side; at least 4 are needed",
            lattice.points_per_side()
        )));
    }
    let y = local_coordinates(spec, q.center(), q.side());
    let n = spec.dim();
    let envelope = |y: &[f64; 2]| (0..n).map(|a| bump(y[a] / 1.5)).product::<f64>();
    let base: Vec<f64> = y.iter().map(envelope).collect();
    let mut values = base.clone();
    let betas = multi_indices(n, moments);
    if !betas.is_empty() {
        let corrector: Vec<f64> = base.iter().map(|b| b * b).collect();
        let dim = betas.len();
        let mut gram = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        for (i, x) in y.iter().enumerate() {
            if base[i] == 0.0 {
                continue;
            }
            let mono: Vec<f64> = betas.iter().map(|b| monomial(*x, *b)).collect();
            for r in 0..dim {
                rhs[r] += mono[r] * base[i];
                for c in 0..dim {
                    gram[(r, c)] += mono[r] * mono[c] * corrector[i];
                }
            }
        }
        let svd = gram.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if !(svd.singular_values.min() > 1e-12 * smax) {
            return Err(Error::AtomConstruction(format!("moment system for {q} at order {moments} is singular")));
        }
        let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::AtomConstruction(e.to_string()))?;
        for (i, x) in y.iter().enumerate() {
            if corrector[i] != 0.0 {
                let poly: f64 = betas.iter().enumerate().map(|(j, b)| coef[j] * monomial(*x, *b)).sum();
                values[i] -= corrector[i] * poly;
            }
        }
    }
    let raw = GridFunction::from_real(*spec, values)?;
    let ratio = derivative_ratio(&raw, q.k, derivatives, norm);
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::AtomConstruction(format!("atom for {q} vanishes after moment correction")));
    }
    Ok(raw.scaled(Complex64::new(ATOM_HEADROOM / ratio, 0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    /// Largest `|a|` at grid points outside `3Q`.
    pub support_violation: f64,
    /// Largest absolute local moment up to the moment order.
    pub moment_violation: f64,
    /// Largest `|d^beta a| / bound(beta)`.
    pub derivative_ratio: f64,
    /// `1 - derivative_ratio`.
    pub margin: f64,
    pub tol: f64,
    pub support_ok: bool,
    pub moments_ok: bool,
    pub derivatives_ok: bool,
}

impl AtomReport {
    pub fn passed(&self) -> bool {
        self.support_ok && self.moments_ok && self.derivatives_ok
    }
}

/// Whether the grid point at local coordinate `y` (units of the cube side, from its center) is in `3Q`.
pub(crate) fn in_triple(y: &[f64; 2], n: usize) -> bool {
    (0..n).all(|a| (-1.5..1.5).contains(&y[a]))
}

pub fn verify_atom(a: &GridFunction, q: &DyadicCube, moments: i32, derivatives: u32) -> AtomReport {
    verify_atom_with(a, q, moments, derivatives, Normalization::default(), 1e-8)
}

pub fn verify_atom_with(
    a: &GridFunction,
    q: &DyadicCube,
    moments: i32,
    derivatives: u32,
    norm: Normalization,
    tol: f64,
) -> AtomReport {
    let spec = a.spec();
    let y = local_coordinates(spec, q.center(), q.side());
    let support_violation = y
        .iter()
        .zip(a.values())
        .filter(|(y, _)| !in_triple(y, spec.dim()))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let moment_violation = local_moments(a, q, moments).iter().map(|m| m.norm()).fold(0.0, f64::max);
    let derivative_ratio = derivative_ratio(a, q.k, derivatives, norm);
    AtomReport {
        support_violation,
        moment_violation,
        derivative_ratio,
        margin: 1.0 - derivative_ratio,
        tol,
        support_ok: support_violation == 0.0,
        moments_ok: moment_violation < tol,
        derivatives_ok: derivative_ratio < 1.0,
    }
}

/// Samples of a grid function on the `3Q` box of a cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    origin: [usize; 2],
    extent: usize,
    values: Vec<Complex64>,
}

impl Patch {
    fn box_indices(spec: &GridSpec, q: &DyadicCube) -> Result<([usize; 2], usize)> {
        let lattice = cube_index(spec, q)?;
        let s = lattice.points_per_side();
        let per = spec.per_axis();
        let mut origin = [0usize; 2];
        for a in 0..spec.dim() {
            origin[a] = ((q.m[a] - 1) * s as i64).rem_euclid(per as i64) as usize;
        }
        Ok((origin, (3 * s).min(per)))
    }

    fn positions(spec: &GridSpec, origin: [usize; 2], extent: usize) -> Vec<usize> {
        let per = spec.per_axis();
        if spec.dim() == 1 {
            (0..extent).map(|i| (origin[0] + i) % per).collect()
        } else {
            let mut out = Vec::with_capacity(extent * extent);
            for a in 0..extent {
                for b in 0..extent {
                    out.push(spec.flatten([(origin[0] + a) % per, (origin[1] + b) % per]));
                }
            }
            out
        }
    }

    /// Restriction of `f` to the `3Q` box; `f` must vanish outside it.
    pub fn from_grid(f: &GridFunction, q: &DyadicCube) -> Result<Self> {
        let (origin, extent) = Self::box_indices(f.spec(), q)?;
        let idx = Self::positions(f.spec(), origin, extent);
        Ok(Self { origin, extent, values: idx.iter().map(|&i| f.values()[i]).collect() })
    }

    pub fn add_into(&self, target: &mut GridFunction, c: Complex64) {
        let idx = Self::positions(target.spec(), self.origin, self.extent);
        let out = target.values_mut();
        for (i, v) in idx.into_iter().zip(&self.values) {
            out[i] += c * v;
        }
    }

    pub fn to_grid(&self, spec: &GridSpec) -> GridFunction {
        let mut g = GridFunction::zeros(*spec);
        self.add_into(&mut g, Complex64::new(1.0, 0.0));
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub cube: DyadicCube,
    patch: Patch,
}

impl Atom {
    pub fn new(cube: DyadicCube, a: &GridFunction) -> Result<Self> {
        Ok(Self { cube, patch: Patch::from_grid(a, &cube)? })
    }

    pub fn to_grid(&self, spec: &GridSpec) -> GridFunction {
        self.patch.to_grid(spec)
    }

    pub(crate) fn patch(&self) -> &Patch {
        &self.patch
    }
}

/// Atoms indexed by cube, all on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFamily {
    spec: GridSpec,
    pub normalization: Normalization,
    pub moments: i32,
    pub derivatives: u32,
    atoms: Vec<Atom>,
}

impl AtomFamily {
    pub fn new(spec: GridSpec, normalization: Normalization, moments: i32, derivatives: u32) -> Self {
        Self { spec, normalization, moments, derivatives, atoms: Vec::new() }
    }

    /// Builds one atom per cube with [`build_smooth_atom_with`].
    pub fn build(
        spec: GridSpec,
        cubes: &[DyadicCube],
        moments: i32,
        derivatives: u32,
        normalization: Normalization,
    ) -> Result<Self> {
        let mut fam = Self::new(spec, normalization, moments, derivatives);
        for q in cubes {
            let a = build_smooth_atom_with(q, moments, derivatives, &spec, normalization)?;
            fam.push(*q, &a)?;
        }
        Ok(fam)
    }

    pub fn push(&mut self, cube: DyadicCube, a: &GridFunction) -> Result<()> {
        if a.spec() != &self.spec {
            return Err(Error::IncompatibleGrids("atom lives on a different grid".into()));
        }
        if self.atoms.iter().any(|x| x.cube == cube) {
            return Err(Error::InvalidArgument(format!("family already holds an atom for {cube}")));
        }
        self.atoms.push(Atom::new(cube, a)?);
        Ok(())
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn get(&self, cube: &DyadicCube) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.cube == *cube)
    }
}

/// `sum lambda_{k,m} a_{k,m}` over the family.
pub fn atomic_synthesize(atoms: &AtomFamily, lam: &crate::transform::CoefficientField, spec: &GridSpec) -> Result<GridFunction> {
    if atoms.spec() != spec {
        return Err(Error::IncompatibleGrids("atom family lives on a different grid".into()));
    }
    if !lam.fits(spec) {
        return Err(Error::IncompatibleWindows("coefficients do not fit the grid".into()));
    }
    let mut covered = lam.map(|_| Complex64::new(0.0, 0.0));
    let mut out = GridFunction::zeros(*spec);
    for atom in atoms.atoms() {
        if !lam.window().contains(atom.cube.k) {
            return Err(Error::IncompatibleWindows(format!("atom at {} is outside the coefficient window", atom.cube)));
        }
        covered.set(atom.cube.k, &atom.cube.m[..atom.cube.n], Complex64::new(1.0, 0.0))?;
        let c = lam.get_cube(&atom.cube);
        if c != Complex64::new(0.0, 0.0) {
            atom.patch().add_into(&mut out, c);
        }
    }
    if let Some((q, _)) = lam.entries().zip(covered.entries()).find_map(|((q, v), (_, hit))| {
        (v != Complex64::new(0.0, 0.0) && hit == Complex64::new(0.0, 0.0)).then_some((q, v))
    }) {
        return Err(Error::IncompatibleWindows(format!("nonzero coefficient at {q} has no atom")));
    }
    Ok(out)
}
