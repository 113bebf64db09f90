use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::almost_diagonal::{omega_weight_periodic, OmegaParams};
use super::atoms::{local_coordinates, monomial, multi_indices, Normalization};
use crate::dyadic::DyadicCube;
use crate::error::{Error, Result};
use crate::filters::FilterPair;
use crate::grid::{spectral_derivative, wrap_displacement, GridFunction, GridSpec};
use crate::transform::analyze;
use crate::weights::ScaleRange;

fn fractional(x: f64) -> f64 {
    x - x.floor()
}

/// Decay, smoothness and cancellation orders of a molecule family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoleculeSpec {
    pub n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub j: f64,
    /// Decay rate, greater than `j`.
    pub m_decay: f64,
    pub delta: f64,
    pub kappa: f64,
    pub normalization: Normalization,
}

impl MoleculeSpec {
    /// Spec with `delta = kappa = 1`.
    pub fn new(n: usize, alpha1: f64, alpha2: f64, j: f64, m_decay: f64) -> Result<Self> {
        let spec = Self { n, alpha1, alpha2, j, m_decay, delta: 1.0, kappa: 1.0, normalization: Normalization::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        let s = Self { delta, ..self };
        s.validate()?;
        Ok(s)
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        let s = Self { kappa, ..self };
        s.validate()?;
        Ok(s)
    }

    pub fn with_normalization(self, normalization: Normalization) -> Self {
        Self { normalization, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.n == 1 || self.n == 2) {
            return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {}", self.n)));
        }
        if !(self.m_decay > self.j) {
            return Err(Error::ParameterDomain(format!("decay {} must exceed J = {}", self.m_decay, self.j)));
        }
        let d_lo = fractional(self.alpha2);
        if !(self.delta > d_lo && self.delta <= 1.0) {
            return Err(Error::ParameterDomain(format!("delta {} must lie in ({d_lo}, 1]", self.delta)));
        }
        let k_lo = fractional(self.j - self.alpha2);
        if !(self.kappa > k_lo && self.kappa <= 1.0) {
            return Err(Error::ParameterDomain(format!("kappa {} must lie in ({k_lo}, 1]", self.kappa)));
        }
        Ok(())
    }

    /// `max(floor(J - n - alpha1), -1)`.
    pub fn moments(&self) -> i32 {
        ((self.j - self.n as f64 - self.alpha1).floor() as i32).max(-1)
    }

    pub fn smoothness(&self) -> i32 {
        self.alpha2.floor() as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoleculeKind {
    Synthesis,
    Analysis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    /// Largest ratio of measured value to envelope.
    pub worst_ratio: f64,
    /// `1 - worst_ratio`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeReport {
    pub kind: MoleculeKind,
    /// Largest `|int y^beta g| / int |g|` with `y = 2^k (x - x_Q)`.
    pub moment_violation: f64,
    pub moment_tol: f64,
    pub conditions: Vec<ConditionCheck>,
    /// Lower end of the admissible `kappa` range, read as the fractional part of `J - alpha2`.
    pub kappa_floor: f64,
}

impl MoleculeReport {
    pub fn passed(&self) -> bool {
        self.moment_violation < self.moment_tol && self.conditions.iter().all(|c| c.margin > 0.0)
    }

    pub fn worst_margin(&self) -> f64 {
        self.conditions.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

struct Geometry {
    spec: GridSpec,
    k: i32,
    /// `|x - x_Q|` with periodic distance.
    dist: Vec<f64>,
}

impl Geometry {
    fn new(spec: &GridSpec, q: &DyadicCube) -> Self {
        let c = q.corner();
        let t = spec.side();
        let dist = (0..spec.len())
            .map(|i| {
                let x = spec.point(i);
                let d0 = wrap_displacement(x[0] - c[0], t);
                let d1 = if spec.dim() == 2 { wrap_displacement(x[1] - c[1], t) } else { 0.0 };
                d0.hypot(d1)
            })
            .collect();
        Self { spec: *spec, k: q.k, dist }
    }

    fn envelope(&self, d: f64, exponent: f64) -> f64 {
        (1.0 + 2f64.powi(self.k) * d.max(0.0)).powf(-exponent)
    }

    fn decay_ratio(&self, g: &[f64], amplitude: f64, exponent: f64) -> f64 {
        g.iter().zip(&self.dist).map(|(v, d)| v / (amplitude * self.envelope(*d, exponent))).fold(0.0, f64::max)
    }

    /// Offsets in grid steps: `h, 2h, 4h, 2^(-k-1)`.
    fn offsets(&self) -> Vec<usize> {
        let per = self.spec.per_axis();
        let half_cell = (2f64.powi(-self.k - 1) / self.spec.spacing()).round() as usize;
        let mut out: Vec<usize> = [1, 2, 4, half_cell].into_iter().filter(|&s| s >= 1 && s < per).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn shifted(&self, i: usize, axis: usize, s: usize) -> usize {
        let per = self.spec.per_axis();
        let mut ij = self.spec.unflatten(i);
        ij[axis] = (ij[axis] + s) % per;
        self.spec.flatten(ij)
    }

    fn holder_ratio(&self, d: &[Complex64], bound: f64, order: f64, m: f64) -> f64 {
        let h = self.spec.spacing();
        let mut worst = 0.0f64;
        for s in self.offsets() {
            let len = s as f64 * h;
            let scale = bound * 2f64.powf(self.k as f64 * order) * len.powf(order);
            for axis in 0..self.spec.dim() {
                for i in 0..d.len() {
                    let diff = (d[i] - d[self.shifted(i, axis, s)]).norm();
                    if diff > 0.0 {
                        worst = worst.max(diff / (scale * self.envelope(self.dist[i] - len, m)));
                    }
                }
            }
        }
        worst
    }
}

fn abs_derivative(g: &GridFunction, beta: [u32; 2]) -> Vec<f64> {
    if beta == [0, 0] {
        g.abs()
    } else {
        spectral_derivative(g, beta).abs()
    }
}

fn check(name: &str, worst: f64) -> ConditionCheck {
    ConditionCheck { name: name.into(), worst_ratio: worst, margin: 1.0 - worst }
}

/// Checks the moment, decay, derivative and Hölder conditions of a molecule near `q`.
pub fn verify_molecule(g: &GridFunction, q: &DyadicCube, spec: &MoleculeSpec, kind: MoleculeKind) -> MoleculeReport {
    let grid = g.spec();
    let geo = Geometry::new(grid, q);
    let n = grid.dim();
    let k = q.k as f64;
    let amp = 2f64.powf(k * n as f64 / 2.0);
    let m = spec.m_decay;

    let (moment_order, decay_exp, deriv_order, holder_order, names) = match kind {
        MoleculeKind::Synthesis => (
            spec.moments(),
            m.max(m - spec.alpha1),
            spec.smoothness(),
            spec.delta,
            ["cond1", "cond2", "cond3"],
        ),
        MoleculeKind::Analysis => (
            spec.smoothness(),
            m.max(m + n as f64 + spec.alpha2 - spec.j),
            spec.moments(),
            spec.kappa,
            ["cond1.1", "cond1.2", "cond1.3"],
        ),
    };
    let bound = |order: u32| match (kind, spec.normalization) {
        (MoleculeKind::Synthesis, Normalization::Strict) => 2f64.powf(k * (order as f64 + 0.5)),
        _ => 2f64.powf(k * order as f64 + k * n as f64 / 2.0),
    };

    let y = local_coordinates(grid, q.corner(), q.side());
    let mass: f64 = g.abs().iter().sum::<f64>();
    let moment_violation = if mass == 0.0 {
        0.0
    } else {
        multi_indices(n, moment_order)
            .into_iter()
            .map(|beta| {
                let s: Complex64 = y.iter().zip(g.values()).map(|(y, v)| v * monomial(*y, beta)).sum();
                s.norm() / mass
            })
            .fold(0.0, f64::max)
    };

    let mut conditions = vec![check(names[0], geo.decay_ratio(&g.abs(), amp, decay_exp))];
    if deriv_order >= 0 {
        let betas = multi_indices(n, deriv_order);
        let decay = betas
            .par_iter()
            .map(|beta| geo.decay_ratio(&abs_derivative(g, *beta), bound(beta[0] + beta[1]), m))
            .reduce(|| 0.0, f64::max);
        conditions.push(check(names[1], decay));
        let holder = betas
            .par_iter()
            .filter(|beta| (beta[0] + beta[1]) as i32 == deriv_order)
            .map(|beta| {
                let d = if *beta == [0, 0] { g.clone() } else { spectral_derivative(g, *beta) };
                geo.holder_ratio(d.values(), bound(beta[0] + beta[1]), holder_order, m)
            })
            .reduce(|| 0.0, f64::max);
        conditions.push(check(names[2], holder));
    }
    MoleculeReport {
        kind,
        moment_violation,
        moment_tol: 1e-8,
        conditions,
        kappa_floor: fractional(spec.j - spec.alpha2),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRatio {
    /// Cube of the molecule.
    pub molecule: DyadicCube,
    /// Cube of the analysis function.
    pub target: DyadicCube,
    /// Corner distance in units of the larger side, periodic.
    pub separation: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixCheck {
    pub max_ratio: f64,
    pub pairs: Vec<PairRatio>,
}

impl MatrixCheck {
    /// Largest ratio over pairs with separation at most `sep`.
    pub fn max_within(&self, sep: f64) -> f64 {
        self.pairs.iter().filter(|p| p.separation <= sep).map(|p| p.ratio).fold(0.0, f64::max)
    }
}

/// `|<rho_{v,h}, phi_{k,m}>| / omega_{Q_{k,m} P_{v,h}}` over all molecules and all analysis cubes in `window`.
pub fn molecule_matrix_check(
    mols: &[(DyadicCube, GridFunction)],
    pair: &FilterPair,
    window: ScaleRange,
    omega: &OmegaParams,
    eps_limit: f64,
) -> Result<MatrixCheck> {
    if omega.eps > eps_limit {
        return Err(Error::ParameterDomain(format!("epsilon {} exceeds the admissible {eps_limit}", omega.eps)));
    }
    let per_molecule = mols
        .par_iter()
        .map(|(p, rho)| {
            let coeffs = analyze(rho, pair, window)?;
            let period = rho.spec().side();
            Ok(coeffs
                .entries()
                .map(|(q, v)| {
                    let (a, b) = (q.corner(), p.corner());
                    let dist = wrap_displacement(a[0] - b[0], period).hypot(wrap_displacement(a[1] - b[1], period));
                    PairRatio {
                        molecule: *p,
                        target: q,
                        separation: dist / q.side().max(p.side()),
                        ratio: v.norm() / omega_weight_periodic(&q, p, omega, period),
                    }
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<PairRatio> = per_molecule.into_iter().flatten().collect();
    let max_ratio = pairs.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok(MatrixCheck { max_ratio, pairs })
}
