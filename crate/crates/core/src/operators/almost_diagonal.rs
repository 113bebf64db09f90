use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicCube;
use crate::error::{Error, Result};
use crate::grid::wrap_displacement;
use crate::transform::CoefficientField;

/// Parameters of the two-branch decay weight between cubes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaParams {
    pub eps: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// `n / min(1, p, q)`.
    pub j: f64,
}

impl OmegaParams {
    pub fn new(eps: f64, alpha1: f64, alpha2: f64, j: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::ParameterDomain(format!("epsilon must be positive, got {eps}")));
        }
        Ok(Self { eps, alpha1, alpha2, j })
    }
}

fn scale_factor(q: &DyadicCube, p: &DyadicCube, w: &OmegaParams) -> f64 {
    let n = q.n as f64;
    let gap = (p.k - q.k) as f64;
    let rate = if p.k <= q.k {
        w.alpha2 + (n + w.eps) / 2.0
    } else {
        w.alpha1 - (n + w.eps) / 2.0 - w.j + n
    };
    2f64.powf(gap * rate)
}

fn distance_factor(dist: f64, q: &DyadicCube, p: &DyadicCube, w: &OmegaParams) -> f64 {
    let scale = q.side().max(p.side());
    (1.0 + dist / scale).powf(-w.j - w.eps)
}

/// Weight between `Q = Q_{k,m}` and `P = P_{v,h}`, with distance between lower-left corners in `R^n`.
pub fn omega_weight(q: &DyadicCube, p: &DyadicCube, w: &OmegaParams) -> f64 {
    let (a, b) = (q.corner(), p.corner());
    let dist = (a[0] - b[0]).hypot(a[1] - b[1]);
    scale_factor(q, p, w) * distance_factor(dist, q, p, w)
}

/// As [`omega_weight`], with the minimum-image corner distance on a torus of side `period`.
pub fn omega_weight_periodic(q: &DyadicCube, p: &DyadicCube, w: &OmegaParams, period: f64) -> f64 {
    let (a, b) = (q.corner(), p.corner());
    let dist = wrap_displacement(a[0] - b[0], period).hypot(wrap_displacement(a[1] - b[1], period));
    scale_factor(q, p, w) * distance_factor(dist, q, p, w)
}

/// Sparse matrix acting on coefficient fields of one layout.
///
/// Rows are indexed by target position and hold `(source position, value)` pairs,
/// where positions enumerate the field scale by scale in lattice order.
#[derive(Debug, Clone)]
pub struct AlmostDiagonalMatrix {
    layout: CoefficientField,
    offsets: Vec<usize>,
    omega: OmegaParams,
    rows: Vec<Vec<(usize, Complex64)>>,
    bound: f64,
}

impl AlmostDiagonalMatrix {
    /// Empty matrix on the layout of `template`.
    pub fn new(template: &CoefficientField, omega: OmegaParams) -> Self {
        let layout = template.map(|_| Complex64::new(0.0, 0.0));
        let mut offsets = Vec::with_capacity(layout.window().len() + 1);
        let mut acc = 0;
        for b in layout.blocks() {
            offsets.push(acc);
            acc += b.len();
        }
        offsets.push(acc);
        Self { layout, offsets, omega, rows: vec![Vec::new(); acc], bound: 0.0 }
    }

    /// Matrix with every entry exactly the periodic weight `omega_{QP}`.
    pub fn omega_matrix(template: &CoefficientField, omega: OmegaParams) -> Self {
        let mut out = Self::new(template, omega);
        let cubes: Vec<DyadicCube> = out.cubes();
        let period = out.layout.side();
        out.rows = cubes
            .par_iter()
            .map(|q| {
                cubes
                    .iter()
                    .enumerate()
                    .map(|(j, p)| (j, Complex64::new(omega_weight_periodic(q, p, &omega, period), 0.0)))
                    .collect()
            })
            .collect();
        out.bound = 1.0;
        out
    }

    pub fn identity(template: &CoefficientField, omega: OmegaParams) -> Self {
        let mut out = Self::new(template, omega);
        for i in 0..out.rows.len() {
            out.rows[i].push((i, Complex64::new(1.0, 0.0)));
        }
        out.bound = 1.0;
        out
    }

    fn cubes(&self) -> Vec<DyadicCube> {
        self.layout
            .window()
            .iter()
            .flat_map(|k| (0..self.layout.block(k).len()).map(move |i| self.layout.cube_at(k, i)))
            .collect()
    }

    fn position(&self, q: &DyadicCube) -> Result<usize> {
        let w = self.layout.window();
        if !w.contains(q.k) || q.n != self.layout.dim() {
            return Err(Error::IncompatibleWindows(format!("{q} is not in the matrix layout")));
        }
        let c = self.layout.cells_per_axis(q.k) as i64;
        if q.m[..q.n].iter().any(|&v| !(0..c).contains(&v)) {
            return Err(Error::CubeResolution(format!("{q} lies outside the fundamental domain")));
        }
        let local = if q.n == 1 { q.m[0] } else { q.m[0] * c + q.m[1] } as usize;
        Ok(self.offsets[(q.k - w.lo) as usize] + local)
    }

    /// Sets `a_{QP}`, replacing any previous value.
    pub fn insert(&mut self, q: &DyadicCube, p: &DyadicCube, value: Complex64) -> Result<()> {
        let (i, j) = (self.position(q)?, self.position(p)?);
        let row = &mut self.rows[i];
        match row.iter_mut().find(|(s, _)| *s == j) {
            Some(entry) => entry.1 = value,
            None => row.push((j, value)),
        }
        let w = omega_weight_periodic(q, p, &self.omega, self.layout.side());
        self.bound = self.bound.max(value.norm() / w);
        Ok(())
    }

    pub fn omega(&self) -> &OmegaParams {
        &self.omega
    }

    /// `sup |a_{QP}| / omega_{QP}` over stored entries.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    fn scale_of(&self, pos: usize) -> i32 {
        let b = self.offsets.partition_point(|&o| o <= pos) - 1;
        self.layout.window().lo + b as i32
    }

    /// `(A lambda)` split into contributions from coarser-or-equal (`v <= k`) and finer (`v > k`) sources.
    pub fn apply_split(&self, lam: &CoefficientField) -> Result<(CoefficientField, CoefficientField)> {
        if !self.layout.same_layout(lam) {
            return Err(Error::IncompatibleWindows("coefficient layout differs from the matrix layout".into()));
        }
        let source: Vec<Complex64> = lam.blocks().iter().flatten().copied().collect();
        let sums: Vec<(Complex64, Complex64)> = self
            .rows
            .par_iter()
            .enumerate()
            .map(|(i, row)| {
                let k = self.scale_of(i);
                let mut past = Complex64::new(0.0, 0.0);
                let mut future = Complex64::new(0.0, 0.0);
                for &(j, a) in row {
                    if self.scale_of(j) <= k {
                        past += a * source[j];
                    } else {
                        future += a * source[j];
                    }
                }
                (past, future)
            })
            .collect();
        let mut past = self.layout.clone();
        let mut future = self.layout.clone();
        for (b, k) in self.layout.window().iter().enumerate() {
            let range = self.offsets[b]..self.offsets[b + 1];
            for (slot, (p, f)) in sums[range].iter().enumerate() {
                past.block_mut(k)[slot] = *p;
                future.block_mut(k)[slot] = *f;
            }
        }
        Ok((past, future))
    }

    pub fn apply(&self, lam: &CoefficientField) -> Result<CoefficientField> {
        let (past, future) = self.apply_split(lam)?;
        past.add(&future)
    }
}
