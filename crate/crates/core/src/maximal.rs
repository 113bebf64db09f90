//! Dyadic Hardy-Littlewood maximal operators and the ratio functionals of the
//! vector-valued maximal inequalities.

use rayon::prelude::*;

use crate::dyadic::{Lattice, Pyramid};
use crate::error::{Error, Result};
use crate::grid::{check_same, lp_norm_of_samples, pairwise_sum, GridFunction, GridSpec};
use crate::weights::{ScaleRange, WeightSequence};

/// Which cubes the supremum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaximalKind {
    /// Dyadic cubes containing the point.
    #[default]
    Dyadic,
    /// Dyadic cubes containing the point and every periodic triple `3P` of a
    /// dyadic cube `P` that contains it.
    Tripled,
}

fn maximal_samples(spec: &GridSpec, samples: &[f64], kind: MaximalKind) -> Vec<f64> {
    let pyramid = Pyramid::sums(spec, samples);
    let dim = spec.dim();
    let tripled_count = 3f64.powi(dim as i32);
    let mut best = pyramid.means(0);
    for j in 1..=spec.level() {
        let lattice = Lattice::at_level(spec, j).expect("level within grid");
        let means = pyramid.means(j);
        let candidate: Vec<f64> = match kind {
            MaximalKind::Dyadic => means,
            MaximalKind::Tripled => {
                let sums = pyramid.level(j);
                let per_cell = lattice.points_per_cell() as f64;
                let triple: Vec<f64> = (0..lattice.len())
                    .into_par_iter()
                    .map(|c| {
                        let s: f64 = lattice.neighbours(c).iter().map(|&nb| sums[nb]).sum();
                        s / (tripled_count * per_cell)
                    })
                    .collect();
                (0..lattice.len())
                    .into_par_iter()
                    .map(|c| lattice.neighbours(c).iter().map(|&nb| triple[nb]).fold(means[c], f64::max))
                    .collect()
            }
        };
        let cells = lattice.cells_per_axis();
        best = candidate
            .into_iter()
            .enumerate()
            .map(|(c, v)| {
                let parent = if dim == 1 { c / 2 } else { (c / cells / 2) * (cells / 2) + (c % cells) / 2 };
                v.max(best[parent])
            })
            .collect();
    }
    best
}

/// Dyadic maximal function of `|f|`.
pub fn hl_maximal(f: &GridFunction) -> GridFunction {
    hl_maximal_with(f, MaximalKind::Dyadic)
}

/// Maximal function of `|f|` over the chosen cube family.
///
/// Panics when the grid side is not a power of two, since no dyadic cube is then representable.
pub fn hl_maximal_with(f: &GridFunction, kind: MaximalKind) -> GridFunction {
    let spec = *f.spec();
    Lattice::at_level(&spec, 0).expect("dyadic cubes need a power-of-two side");
    let out = maximal_samples(&spec, &f.abs(), kind);
    GridFunction::from_real(spec, out).expect("same grid")
}

/// `(M(|f|^sigma))^(1/sigma)`.
pub fn m_sigma(f: &GridFunction, sigma: f64) -> Result<GridFunction> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let spec = *f.spec();
    Lattice::at_level(&spec, 0)?;
    let powered: Vec<f64> = f.abs().iter().map(|v| v.powf(sigma)).collect();
    let m = maximal_samples(&spec, &powered, MaximalKind::Dyadic);
    GridFunction::from_real(spec, m.into_iter().map(|v| v.powf(1.0 / sigma)).collect())
}

/// Scale-indexed family of functions on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSequence {
    range: ScaleRange,
    members: Vec<GridFunction>,
}

impl FunctionSequence {
    pub fn new(lo: i32, members: Vec<GridFunction>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidArgument("empty function sequence".into()))?;
        let spec = *first.spec();
        members.iter().try_for_each(|f| check_same(&spec, f.spec()))?;
        let range = ScaleRange::new(lo, lo + members.len() as i32 - 1)?;
        Ok(Self { range, members })
    }

    pub fn range(&self) -> ScaleRange {
        self.range
    }

    pub fn spec(&self) -> &GridSpec {
        self.members[0].spec()
    }

    pub fn get(&self, k: i32) -> Option<&GridFunction> {
        self.range.contains(k).then(|| &self.members[(k - self.range.lo) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &GridFunction)> {
        self.range.iter().zip(&self.members)
    }
}

fn integral(spec: &GridSpec, samples: &[f64]) -> f64 {
    spec.cell_volume() * pairwise_sum(samples)
}

/// `int (Mf)^p g / int |f|^p Mg`.
pub fn fefferman_stein_pair_ratio(f: &GridFunction, g: &GridFunction, p: f64) -> Result<f64> {
    check_same(f.spec(), g.spec())?;
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("need p > 1, got {p}")));
    }
    if !g.is_nonnegative() {
        return Err(Error::InvalidArgument("g must be real and nonnegative".into()));
    }
    let spec = *f.spec();
    let mf = hl_maximal(f).real_parts();
    let mg = hl_maximal(g).real_parts();
    let gv = g.real_parts();
    let fa = f.abs();
    let lhs: Vec<f64> = mf.iter().zip(&gv).map(|(m, g)| m.powf(p) * g).collect();
    let rhs: Vec<f64> = fa.iter().zip(&mg).map(|(f, m)| f.powf(p) * m).collect();
    let den = integral(&spec, &rhs);
    if den == 0.0 {
        return Err(Error::DegenerateInput("right-hand side vanishes".into()));
    }
    Ok(integral(&spec, &lhs) / den)
}

/// `|| (sum_k terms_k^q)^(1/q) ||_p` for pointwise terms.
pub(crate) fn mixed_norm(spec: &GridSpec, terms: &[Vec<f64>], p: f64, q: f64) -> Result<f64> {
    let pointwise = pointwise_lq(spec.len(), terms, q);
    lp_norm_of_samples(spec, &pointwise, p)
}

/// Pointwise `(sum_k a_k^q)^(1/q)`, computed relative to the largest term.
pub(crate) fn pointwise_lq(len: usize, terms: &[Vec<f64>], q: f64) -> Vec<f64> {
    (0..len)
        .into_par_iter()
        .map(|i| {
            let top = terms.iter().map(|t| t[i]).fold(0.0, f64::max);
            if top == 0.0 || q.is_infinite() {
                return top;
            }
            let s: f64 = terms.iter().map(|t| (t[i] / top).powf(q)).sum();
            top * s.powf(1.0 / q)
        })
        .collect()
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite() && q > 1.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 1 < p, q < inf, got p = {p}, q = {q}")));
    }
    Ok(())
}

fn weighted_terms(fs: &FunctionSequence, t: &WeightSequence, values: &[Vec<f64>], shift: i32) -> Result<Vec<Vec<f64>>> {
    fs.range()
        .iter()
        .zip(values)
        .map(|(k, v)| {
            let w = t.samples(k - shift)?;
            Ok(v.iter().zip(w).map(|(a, b)| a * b).collect())
        })
        .collect()
}

fn right_side(fs: &FunctionSequence, t: &WeightSequence, p: f64, q: f64) -> Result<f64> {
    let abs: Vec<Vec<f64>> = fs.iter().map(|(_, f)| f.abs()).collect();
    let terms = weighted_terms(fs, t, &abs, 0)?;
    let rhs = mixed_norm(fs.spec(), &terms, p, q)?;
    if rhs == 0.0 {
        return Err(Error::DegenerateInput("right-hand side vanishes".into()));
    }
    Ok(rhs)
}

/// `||(sum_k t_{k-shift}^q (Mf_k)^q)^(1/q)||_p / (2^(-shift alpha) ||(sum_k t_k^q |f_k|^q)^(1/q)||_p)`
/// with `alpha = alpha1` for `shift > 0`, `alpha2` for `shift < 0`.
pub fn vector_maximal_ratio(
    fs: &FunctionSequence,
    t: &WeightSequence,
    p: f64,
    q: f64,
    shift: i32,
    alpha: (f64, f64),
) -> Result<f64> {
    check_exponents(p, q)?;
    check_same(fs.spec(), t.spec())?;
    let maximal: Vec<Vec<f64>> = fs.iter().collect::<Vec<_>>().par_iter().map(|(_, f)| hl_maximal(f).real_parts()).collect();
    let lhs = mixed_norm(fs.spec(), &weighted_terms(fs, t, &maximal, shift)?, p, q)?;
    let rhs = right_side(fs, t, p, q)?;
    let exponent = match shift {
        0 => 0.0,
        s if s > 0 => alpha.0,
        _ => alpha.1,
    };
    Ok(lhs / (2f64.powf(-(shift as f64) * exponent) * rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelDirection {
    /// Sum over coarser scales `j <= k`.
    Past,
    /// Sum over finer scales `j >= k`.
    Future,
}

/// Ratio for the kernel-summed maximal function `sum_j 2^((j-k)K) M f_j`.
///
/// `Past` requires `K > alpha2`, `Future` requires `K < alpha1`.
pub fn kernel_maximal_ratio(
    fs: &FunctionSequence,
    t: &WeightSequence,
    p: f64,
    q: f64,
    kernel: f64,
    direction: KernelDirection,
    alpha: (f64, f64),
) -> Result<f64> {
    match direction {
        KernelDirection::Past if !(kernel > alpha.1) => {
            return Err(Error::ParameterDomain(format!("past kernel needs K > alpha2 = {}, got {kernel}", alpha.1)))
        }
        KernelDirection::Future if !(kernel < alpha.0) => {
            return Err(Error::ParameterDomain(format!("future kernel needs K < alpha1 = {}, got {kernel}", alpha.0)))
        }
        _ => {}
    }
    check_exponents(p, q)?;
    check_same(fs.spec(), t.spec())?;
    let maximal: Vec<Vec<f64>> = fs.iter().collect::<Vec<_>>().par_iter().map(|(_, f)| hl_maximal(f).real_parts()).collect();
    let scales: Vec<i32> = fs.range().iter().collect();
    let len = fs.spec().len();
    let summed: Vec<Vec<f64>> = scales
        .iter()
        .map(|&k| {
            let mut acc = vec![0.0; len];
            for (b, &j) in scales.iter().enumerate() {
                let take = match direction {
                    KernelDirection::Past => j <= k,
                    KernelDirection::Future => j >= k,
                };
                if take {
                    let c = 2f64.powf((j - k) as f64 * kernel);
                    acc.iter_mut().zip(&maximal[b]).for_each(|(a, m)| *a += c * m);
                }
            }
            acc
        })
        .collect();
    let lhs = mixed_norm(fs.spec(), &weighted_terms(fs, t, &summed, 0)?, p, q)?;
    Ok(lhs / right_side(fs, t, p, q)?)
}

/// Both sides of the discrete convolution inequality for nonnegative sequences on a shared range.
pub fn discrete_convolution_bound(
    fs: &FunctionSequence,
    gs: &FunctionSequence,
    a: f64,
    q: f64,
    p: f64,
    r: f64,
) -> Result<(f64, f64)> {
    if !(0.0 < a && a < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < a < 1, got {a}")));
    }
    if !(q > 0.0 && q.is_finite() && p >= 1.0 && r >= 1.0) {
        return Err(Error::InvalidArgument("need 0 < q < inf and p, r >= 1".into()));
    }
    if fs.range() != gs.range() {
        return Err(Error::IncompatibleWindows("f and g sequences must share their range".into()));
    }
    check_same(fs.spec(), gs.spec())?;
    let spec = *fs.spec();
    let f: Vec<Vec<f64>> = fs.iter().map(|(_, f)| f.real_parts()).collect();
    let g: Vec<Vec<f64>> = gs.iter().map(|(_, g)| g.real_parts()).collect();
    if f.iter().chain(&g).flatten().any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("sequences must be nonnegative".into()));
    }
    if g.iter().flatten().all(|v| *v == 0.0) {
        if f.iter().flatten().all(|v| *v == 0.0) {
            return Ok((0.0, 0.0));
        }
        return Err(Error::DegenerateInput("g sequence vanishes".into()));
    }
    let count = f.len();
    let pairs: Vec<Vec<f64>> = (0..count)
        .map(|k| {
            (0..count)
                .map(|j| {
                    let prod: Vec<f64> = g[k].iter().zip(&f[j]).map(|(a, b)| a * b).collect();
                    integral(&spec, &prod).powf(1.0 / q)
                })
                .collect()
        })
        .collect();
    let mut lhs = 0.0;
    for (k, row) in pairs.iter().enumerate() {
        let delta: f64 = (0..=k).map(|j| a.powi((k - j) as i32) * row[j]).sum();
        let eta: f64 = (k..count).map(|j| a.powi((j - k) as i32) * row[j]).sum();
        lhs += delta.powf(q) + eta.powf(q);
    }
    let r_dual = if r == 1.0 { f64::INFINITY } else if r.is_infinite() { 1.0 } else { r / (r - 1.0) };
    let p_dual = if p == 1.0 { f64::INFINITY } else if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    let rhs = mixed_norm(&spec, &f, p, r)? * mixed_norm(&spec, &g, p_dual, r_dual)?;
    Ok((lhs, rhs))
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
    fn constant_is_fixed() {
        let g = make_grid(2, 5, 1.0).unwrap();
        let f = GridFunction::constant(g, Complex64::new(0.0, -2.0));
        for kind in [MaximalKind::Dyadic, MaximalKind::Tripled] {
            let m = hl_maximal_with(&f, kind);
            assert!(m.values().iter().all(|v| v.re == 2.0 && v.im == 0.0));
        }
        let ms = m_sigma(&f, 3.0).unwrap();
        assert!(ms.values().iter().all(|v| (v.re - 2.0).abs() < 1e-14));
    }

    #[test]
    fn indicator_at_one_half() {
        // brute force: cubes containing 1/2 are [1/2, 1/2 + 2^-j) and [0, 1)
        let g = make_grid(1, 8, 1.0).unwrap();
        let f = indicator(g, 0.125);
        let m = hl_maximal(&f);
        assert_eq!(m.values()[128].re, 0.125);
        let m2 = m_sigma(&f, 2.0).unwrap();
        assert!((m2.values()[128].re - 0.125f64.sqrt()).abs() < 1e-15);
        let tripled = hl_maximal_with(&f, MaximalKind::Tripled);
        assert!((tripled.values()[128].re - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_and_sigma_one() {
        let g = make_grid(1, 7, 2.0).unwrap();
        let f = GridFunction::from_real_fn(g, |x| (5.0 * x[0]).sin());
        let m = hl_maximal(&f);
        let mc = hl_maximal(&f.scaled(Complex64::new(0.0, -3.0)));
        for (a, b) in m.values().iter().zip(mc.values()) {
            assert!((3.0 * a.re - b.re).abs() < 1e-13);
        }
        assert!(m_sigma(&f, 1.0).unwrap().max_abs_diff(&m).unwrap() < 1e-15);
        assert!(m.values().iter().zip(f.values()).all(|(m, f)| m.re >= f.norm()));
    }

    #[test]
    fn pair_ratio_examples() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let one = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        assert!((fefferman_stein_pair_ratio(&one, &one, 2.0).unwrap() - 1.0).abs() < 1e-14);
        let chi = indicator(g, 0.125);
        let r = fefferman_stein_pair_ratio(&chi, &chi, 2.0).unwrap();
        assert!(r.is_finite() && r > 0.0);
        let r3 = fefferman_stein_pair_ratio(&chi.scaled(Complex64::new(3.0, 0.0)), &chi, 2.0).unwrap();
        assert!((r - r3).abs() < 1e-12 * r);
        let zero = GridFunction::zeros(g);
        assert!(matches!(fefferman_stein_pair_ratio(&zero, &chi, 2.0), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn single_constant_scale_ratio_is_one() {
        let g = make_grid(1, 6, 1.0).unwrap();
        let fs = FunctionSequence::new(2, vec![GridFunction::constant(g, Complex64::new(1.5, 0.0))]).unwrap();
        let t = WeightSequence::unit(g, ScaleRange::new(2, 2).unwrap(), 2.0).unwrap();
        let r = vector_maximal_ratio(&fs, &t, 2.0, 2.0, 0, (0.0, 0.0)).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        let k = kernel_maximal_ratio(&fs, &t, 2.0, 2.0, 1.0, KernelDirection::Past, (0.0, 0.0)).unwrap();
        assert!((k - r).abs() < 1e-14);
    }

    #[test]
    fn kernel_preconditions() {
        let g = make_grid(1, 5, 1.0).unwrap();
        let fs = FunctionSequence::new(0, vec![GridFunction::constant(g, Complex64::new(1.0, 0.0))]).unwrap();
        let t = WeightSequence::power(g, ScaleRange::new(0, 0).unwrap(), 2.0, 1.0).unwrap();
        let past = kernel_maximal_ratio(&fs, &t, 2.0, 2.0, 1.0, KernelDirection::Past, (1.0, 1.0));
        assert!(matches!(past, Err(Error::ParameterDomain(_))));
        let fut = kernel_maximal_ratio(&fs, &t, 2.0, 2.0, 1.0, KernelDirection::Future, (1.0, 1.0));
        assert!(matches!(fut, Err(Error::ParameterDomain(_))));
    }

    #[test]
    fn convolution_bound_zero_and_degenerate() {
        let g = make_grid(1, 5, 1.0).unwrap();
        let z = FunctionSequence::new(0, vec![GridFunction::zeros(g); 3]).unwrap();
        assert_eq!(discrete_convolution_bound(&z, &z, 0.5, 1.0, 2.0, 2.0).unwrap(), (0.0, 0.0));
        let one = FunctionSequence::new(0, vec![GridFunction::constant(g, Complex64::new(1.0, 0.0)); 3]).unwrap();
        assert!(matches!(discrete_convolution_bound(&one, &z, 0.5, 1.0, 2.0, 2.0), Err(Error::DegenerateInput(_))));
        let (lhs, rhs) = discrete_convolution_bound(&z, &one, 0.5, 1.0, 2.0, 2.0).unwrap();
        assert_eq!(lhs, 0.0);
        assert_eq!(rhs, 0.0);
    }
}
