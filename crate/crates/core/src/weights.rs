//! Weight sequences, Muckenhoupt estimates over dyadic cubes, and the
//! two-sided cross-scale class constants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicCube, Lattice, Pyramid};
use crate::error::{Error, Result};
use crate::grid::{check_same, wrap_displacement, GridFunction, GridSpec};

/// Inclusive range of scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub lo: i32,
    pub hi: i32,
}

impl ScaleRange {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty scale range {lo}..={hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i32) -> bool {
        (self.lo..=self.hi).contains(&k)
    }

    pub fn covers(&self, other: &ScaleRange) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.lo..=self.hi
    }
}

/// Strictly positive weights `t_k`, one grid function per scale.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    spec: GridSpec,
    range: ScaleRange,
    p: f64,
    weights: Vec<Vec<f64>>,
}

fn check_positive(spec: &GridSpec, w: &GridFunction) -> Result<Vec<f64>> {
    check_same(spec, w.spec())?;
    w.values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v.im != 0.0 || !(v.re > 0.0) || !v.re.is_finite() {
                Err(Error::InvalidWeight(format!("sample {i} is {v}, weights must be finite and positive")))
            } else {
                Ok(v.re)
            }
        })
        .collect()
}

impl WeightSequence {
    pub fn new(spec: GridSpec, range: ScaleRange, p: f64, weights: Vec<GridFunction>) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidArgument(format!("exponent must be positive, got {p}")));
        }
        if weights.len() != range.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} scales",
                weights.len(),
                range.len()
            )));
        }
        let weights = weights.iter().map(|w| check_positive(&spec, w)).collect::<Result<_>>()?;
        Ok(Self { spec, range, p, weights })
    }

    pub fn from_fn(
        spec: GridSpec,
        range: ScaleRange,
        p: f64,
        weight: impl Fn(i32) -> GridFunction,
    ) -> Result<Self> {
        Self::new(spec, range, p, range.iter().map(weight).collect())
    }

    /// `t_k` constant in space.
    pub fn per_scale(spec: GridSpec, range: ScaleRange, p: f64, value: impl Fn(i32) -> f64) -> Result<Self> {
        Self::from_fn(spec, range, p, |k| GridFunction::from_real(spec, vec![value(k); spec.len()]).unwrap())
    }

    /// `t_k = 2^(ks)`.
    pub fn power(spec: GridSpec, range: ScaleRange, p: f64, s: f64) -> Result<Self> {
        Self::per_scale(spec, range, p, |k| 2f64.powf(k as f64 * s))
    }

    pub fn unit(spec: GridSpec, range: ScaleRange, p: f64) -> Result<Self> {
        Self::per_scale(spec, range, p, |_| 1.0)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn range(&self) -> ScaleRange {
        self.range
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::InvalidArgument(format!("exponent must be positive, got {p}")));
        }
        Ok(Self { p, ..self.clone() })
    }

    /// Samples of `t_k`.
    pub fn samples(&self, k: i32) -> Result<&[f64]> {
        if !self.range.contains(k) {
            return Err(Error::IncompatibleWindows(format!(
                "scale {k} outside weight range {}..={}",
                self.range.lo, self.range.hi
            )));
        }
        Ok(&self.weights[(k - self.range.lo) as usize])
    }

    pub fn weight(&self, k: i32) -> Result<GridFunction> {
        GridFunction::from_real(self.spec, self.samples(k)?.to_vec())
    }

    /// `||t_k | L_e(Q)||` for every cube `Q` of scale `k`, lattice order.
    pub fn local_norms(&self, k: i32, exponent: f64) -> Result<Vec<f64>> {
        let lattice = Lattice::new(&self.spec, k)?;
        let powered: Vec<f64> = self.samples(k)?.iter().map(|t| t.powf(exponent)).collect();
        let pyramid = Pyramid::sums(&self.spec, &powered);
        let vol = self.spec.cell_volume();
        Ok(pyramid.level(lattice.level()).iter().map(|s| (vol * s).powf(1.0 / exponent)).collect())
    }

    /// `t_{k,m} = ||t_k | L_p(Q_{k,m})||`.
    pub fn local_norm(&self, q: &DyadicCube) -> Result<f64> {
        let lattice = Lattice::new(&self.spec, q.k)?;
        let idx = lattice.index_of(q)?;
        Ok(self.local_norms(q.k, self.p)?[idx])
    }

    /// Pointwise power `t_k^e` as a new sequence with exponent `p`.
    pub fn powered(&self, e: f64, p: f64) -> Result<Self> {
        let weights = self.weights.iter().map(|w| w.iter().map(|t| t.powf(e)).collect()).collect();
        let out = Self { spec: self.spec, range: self.range, p, weights };
        out.weights.iter().try_for_each(|w| {
            if w.iter().all(|t| *t > 0.0 && t.is_finite()) {
                Ok(())
            } else {
                Err(Error::InvalidWeight("powered weight is not finite and positive".into()))
            }
        })?;
        Ok(out)
    }
}

/// `|x - center|^exponent` sampled at cell centers with periodic distance.
pub fn power_weight(spec: &GridSpec, exponent: f64, center: [f64; 2]) -> GridFunction {
    let h = spec.spacing();
    let side = spec.side();
    let dim = spec.dim();
    GridFunction::from_real_fn(*spec, |x| {
        let mut r2 = 0.0;
        for axis in 0..dim {
            let d = wrap_displacement(x[axis] + h / 2.0 - center[axis], side);
            r2 += d * d;
        }
        r2.sqrt().powf(exponent)
    })
}

/// `{t_k = 2^(ks) omega}` over `range`; `omega^p` is expected in the class `A_(p/r)`.
pub fn make_power_weight_sequence(
    s: f64,
    omega: &GridFunction,
    p: f64,
    r: f64,
    range: ScaleRange,
) -> Result<WeightSequence> {
    if !(0.0 < r && r < p) {
        return Err(Error::InvalidArgument(format!("need 0 < r < p, got r = {r}, p = {p}")));
    }
    let spec = *omega.spec();
    let base = check_positive(&spec, omega)?;
    WeightSequence::from_fn(spec, range, p, |k| {
        let scale = 2f64.powf(k as f64 * s);
        GridFunction::from_real(spec, base.iter().map(|w| w * scale).collect()).unwrap()
    })
}

fn positive_samples(w: &GridFunction) -> Result<Vec<f64>> {
    let spec = *w.spec();
    check_positive(&spec, w)
}

fn check_depth(spec: &GridSpec, depth: u32) -> Result<()> {
    Lattice::at_level(spec, 0)?;
    if depth > spec.level() {
        return Err(Error::CubeResolution(format!("depth {depth} exceeds grid level {}", spec.level())));
    }
    Ok(())
}

/// Dyadic lower estimate of the `A_p` constant over cubes down to `depth`
/// generations below the domain.
pub fn ap_constant(w: &GridFunction, p: f64, depth: u32) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent must be at least 1, got {p}")));
    }
    let spec = *w.spec();
    check_depth(&spec, depth)?;
    let samples = positive_samples(w)?;
    let sums = Pyramid::sums(&spec, &samples);
    if p == 1.0 {
        let minima = Pyramid::minima(&spec, &samples);
        return Ok((0..=depth)
            .flat_map(|j| {
                let means = sums.means(j);
                let mins = minima.level(j).to_vec();
                means.into_iter().zip(mins).map(|(m, lo)| m / lo).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max));
    }
    let dual_exp = -1.0 / (p - 1.0);
    let dual: Vec<f64> = samples.iter().map(|v| v.powf(dual_exp)).collect();
    let dual_sums = Pyramid::sums(&spec, &dual);
    Ok((0..=depth)
        .flat_map(|j| {
            let a = sums.means(j);
            let b = dual_sums.means(j);
            a.into_iter().zip(b).map(|(a, b)| a * b.powf(p - 1.0)).collect::<Vec<_>>()
        })
        .fold(0.0, f64::max))
}

/// Whether `|x|^alpha` belongs to `A_p` on `R^n`.
pub fn power_weight_in_ap(alpha: f64, p: f64, n: usize) -> bool {
    debug_assert!(p > 1.0);
    let n = n as f64;
    -n < alpha && alpha < n * (p - 1.0)
}

/// Largest candidate `eps` with `M_{Q,1+eps}(w) <= c_max M_Q(w)` on every cube down to `depth`.
pub fn reverse_holder_exponent(w: &GridFunction, depth: u32, c_max: f64, candidates: &[f64]) -> Result<Option<f64>> {
    let spec = *w.spec();
    check_depth(&spec, depth)?;
    let samples = positive_samples(w)?;
    let base = Pyramid::sums(&spec, &samples);
    let mut best = None;
    for &eps in candidates {
        let e = 1.0 + eps;
        let powered: Vec<f64> = samples.iter().map(|v| v.powf(e)).collect();
        let lifted = Pyramid::sums(&spec, &powered);
        let worst = (0..=depth)
            .flat_map(|j| {
                let hi = lifted.means(j);
                let lo = base.means(j);
                hi.into_iter().zip(lo).map(move |(h, l)| h.powf(1.0 / e) / l).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        if worst <= c_max && best.is_none_or(|b: f64| eps > b) {
            best = Some(eps);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XClassParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub p: f64,
    pub theta: f64,
}

impl XClassParams {
    /// `sigma1 = theta (p/theta)'` and `sigma2 = p`.
    pub fn standing(alpha1: f64, alpha2: f64, p: f64, theta: f64) -> Result<Self> {
        if !(0.0 < theta && theta <= p) {
            return Err(Error::InvalidArgument(format!("need 0 < theta <= p, got theta = {theta}, p = {p}")));
        }
        let ratio = p / theta;
        let sigma1 = if ratio == 1.0 { f64::INFINITY } else { theta * ratio / (ratio - 1.0) };
        Ok(Self { alpha1, alpha2, sigma1, sigma2: p, p, theta })
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma1 > 0.0 && self.sigma2 > 0.0 && self.p > 0.0) {
            return Err(Error::InvalidArgument("class exponents must be positive".into()));
        }
        if !(0.0 < self.theta && self.theta <= self.p) {
            return Err(Error::InvalidArgument("need 0 < theta <= p".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub k: i32,
    pub j: i32,
    pub cube: DyadicCube,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XClassReport {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    /// Fitted `(alpha1, alpha2)`: the largest lower and smallest upper exponents.
    pub alpha_fit: (f64, f64),
    /// Constants left over at the fitted exponents.
    pub residual: (f64, f64),
    pub worst_cases: Vec<WorstCase>,
    pub depth: u32,
}

/// `M_{Q,e}` of the samples for every cube at every level down to `depth`;
/// `e = inf` gives the maximum and `e = -inf` the reciprocal of the minimum.
fn level_means(spec: &GridSpec, samples: &[f64], e: f64, depth: u32) -> Vec<Vec<f64>> {
    if e.is_infinite() {
        let py = if e > 0.0 { Pyramid::maxima(spec, samples) } else { Pyramid::minima(spec, samples) };
        return (0..=depth).map(|j| py.level(j).to_vec()).collect();
    }
    let powered: Vec<f64> = samples.iter().map(|v| v.powf(e)).collect();
    let py = Pyramid::sums(spec, &powered);
    (0..=depth).map(|j| py.means(j).into_iter().map(|m| m.powf(1.0 / e)).collect()).collect()
}

#[derive(Clone, Copy)]
struct Best {
    log2: f64,
    k: i32,
    j: i32,
    level: u32,
    cell: usize,
}

impl Best {
    fn none() -> Self {
        Best { log2: f64::NEG_INFINITY, k: 0, j: 0, level: 0, cell: 0 }
    }
    fn offer(&mut self, other: Best) {
        if other.log2 > self.log2 {
            *self = other;
        }
    }
}

/// Cross-scale constants of a weight sequence over dyadic cubes down to `depth`.
///
/// `C1 = max M_{Q,p}(t_k) M_{Q,sigma1}(1/t_j) 2^(alpha1 (j-k))` and
/// `C2 = max M_{Q,sigma2}(t_j) / M_{Q,p}(t_k) 2^(-alpha2 (j-k))`, both over `k <= j`.
pub fn x_class_constants(t: &WeightSequence, params: &XClassParams, depth: u32) -> Result<XClassReport> {
    params.validate()?;
    let spec = *t.spec();
    check_depth(&spec, depth)?;
    let range = t.range();
    if range.len() < 2 {
        return Err(Error::InvalidArgument("need at least two scales".into()));
    }
    let scales: Vec<i32> = range.iter().collect();
    let per_scale: Vec<[Vec<Vec<f64>>; 3]> = scales
        .par_iter()
        .map(|&k| {
            let w = t.samples(k).unwrap();
            let inv: Vec<f64> = w.iter().map(|v| 1.0 / v).collect();
            [
                level_means(&spec, w, params.p, depth),
                level_means(&spec, &inv, params.sigma1, depth),
                level_means(&spec, w, params.sigma2, depth),
            ]
        })
        .collect();
    let gaps = scales.len();
    // max over cubes of log2 products, per scale gap d = j - k
    let mut lower = vec![Best::none(); gaps];
    let mut upper = vec![Best::none(); gaps];
    for level in 0..=depth {
        let cells = per_scale[0][0][level as usize].len();
        for cell in 0..cells {
            for (a, &k) in scales.iter().enumerate() {
                let tk = per_scale[a][0][level as usize][cell].log2();
                for (b, &j) in scales.iter().enumerate().skip(a) {
                    let d = b - a;
                    let inv_j = per_scale[b][1][level as usize][cell].log2();
                    let big_j = per_scale[b][2][level as usize][cell].log2();
                    lower[d].offer(Best { log2: tk + inv_j, k, j, level, cell });
                    upper[d].offer(Best { log2: big_j - tk, k, j, level, cell });
                }
            }
        }
    }
    let cube_of = |b: &Best| -> Result<DyadicCube> { Ok(Lattice::at_level(&spec, b.level)?.cube(b.cell)) };

    let pick = |table: &[Best], weight: &dyn Fn(usize) -> f64| -> (f64, Best) {
        let mut best = (f64::NEG_INFINITY, table[0]);
        for (d, b) in table.iter().enumerate() {
            let v = b.log2 + weight(d);
            if v > best.0 {
                best = (v, *b);
            }
        }
        best
    };
    let (c1_log, w1) = pick(&lower, &|d| params.alpha1 * d as f64);
    let (c2_log, w2) = pick(&upper, &|d| -params.alpha2 * d as f64);

    let alpha1_fit = (1..gaps)
        .map(|d| (lower[0].log2 - lower[d].log2) / d as f64)
        .fold(f64::INFINITY, f64::min);
    let alpha2_fit = (1..gaps)
        .map(|d| (upper[d].log2 - upper[0].log2) / d as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let (r1, _) = pick(&lower, &|d| alpha1_fit * d as f64);
    let (r2, _) = pick(&upper, &|d| -alpha2_fit * d as f64);

    Ok(XClassReport {
        c1: c1_log.exp2(),
        c2: c2_log.exp2(),
        alpha_fit: (alpha1_fit, alpha2_fit),
        residual: (r1.exp2(), r2.exp2()),
        worst_cases: vec![
            WorstCase { k: w1.k, j: w1.j, cube: cube_of(&w1)? },
            WorstCase { k: w2.k, j: w2.j, cube: cube_of(&w2)? },
        ],
        depth,
    })
}

/// Per-scale `A_(p/theta)` estimates of `t_k^p` and their max/min spread.
pub fn same_muckenhoupt_check(t: &WeightSequence, p: f64, theta: f64, depth: u32) -> Result<(Vec<f64>, f64)> {
    if !(theta > 0.0 && p / theta > 1.0) {
        return Err(Error::InvalidArgument(format!("need p/theta > 1, got p = {p}, theta = {theta}")));
    }
    let spec = *t.spec();
    let constants = t
        .range()
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&k| {
            let w: Vec<f64> = t.samples(k)?.iter().map(|v| v.powf(p)).collect();
            ap_constant(&GridFunction::from_real(spec, w)?, p / theta, depth)
        })
        .collect::<Result<Vec<f64>>>()?;
    let hi = constants.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = constants.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((constants, hi / lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use num_complex::Complex64;

    #[test]
    fn identity_weight_has_unit_constant() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let one = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        assert_eq!(ap_constant(&one, 2.0, 8).unwrap(), 1.0);
        assert_eq!(ap_constant(&one, 1.0, 8).unwrap(), 1.0);
    }

    #[test]
    fn nonpositive_weights_are_rejected() {
        let g = make_grid(1, 5, 1.0).unwrap();
        let w = GridFunction::from_real_fn(g, |x| x[0]);
        assert!(matches!(ap_constant(&w, 2.0, 3), Err(Error::InvalidWeight(_))));
        let one = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        assert!(matches!(ap_constant(&one, 0.5, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(ap_constant(&one, 2.0, 6), Err(Error::CubeResolution(_))));
    }

    #[test]
    fn power_weight_membership() {
        assert!(power_weight_in_ap(0.5, 2.0, 1));
        assert!(!power_weight_in_ap(1.0, 2.0, 1));
        assert!(!power_weight_in_ap(-1.0, 2.0, 1));
        assert!(power_weight_in_ap(1.5, 2.0, 2));
    }

    #[test]
    fn power_sequence_examples() {
        let g = make_grid(1, 5, 1.0).unwrap();
        let one = GridFunction::constant(g, Complex64::new(1.0, 0.0));
        let range = ScaleRange::new(0, 4).unwrap();
        let t = make_power_weight_sequence(0.0, &one, 2.0, 1.0, range).unwrap();
        assert!(range.iter().all(|k| t.samples(k).unwrap().iter().all(|&v| v == 1.0)));
        let t = make_power_weight_sequence(1.0, &one, 2.0, 1.0, range).unwrap();
        assert!(t.samples(3).unwrap().iter().all(|&v| v == 8.0));
        assert!(matches!(make_power_weight_sequence(1.0, &one, 2.0, 2.0, range), Err(Error::InvalidArgument(_))));
        let zero = GridFunction::zeros(g);
        assert!(matches!(make_power_weight_sequence(1.0, &zero, 2.0, 1.0, range), Err(Error::InvalidWeight(_))));
    }

    #[test]
    fn telescoping_constants() {
        let g = make_grid(1, 6, 1.0).unwrap();
        for s in [-1.0, 0.0, 0.5, 1.0] {
            let t = WeightSequence::power(g, ScaleRange::new(-2, 3).unwrap(), 2.0, s).unwrap();
            let params = XClassParams::standing(s, s, 2.0, 1.0).unwrap();
            let r = x_class_constants(&t, &params, 5).unwrap();
            assert!((r.c1 - 1.0).abs() < 1e-12, "{r:?}");
            assert!((r.c2 - 1.0).abs() < 1e-12, "{r:?}");
            assert!((r.alpha_fit.0 - s).abs() < 1e-12);
            assert!((r.alpha_fit.1 - s).abs() < 1e-12);
        }
    }

    #[test]
    fn same_constant_for_scale_only_weights() {
        let g = make_grid(1, 7, 2.0).unwrap();
        let t = WeightSequence::power(g, ScaleRange::new(0, 3).unwrap(), 2.0, 0.7).unwrap();
        let (c, spread) = same_muckenhoupt_check(&t, 2.0, 1.0, 6).unwrap();
        assert!(c.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!((spread - 1.0).abs() < 1e-12);
        let w = power_weight(&g, 0.25, [1.0, 0.0]);
        let t = WeightSequence::from_fn(g, ScaleRange::new(0, 3).unwrap(), 2.0, |_| w.clone()).unwrap();
        let (_, spread) = same_muckenhoupt_check(&t, 2.0, 1.0, 6).unwrap();
        assert_eq!(spread, 1.0);
    }

    #[test]
    fn local_norm_of_constant() {
        let g = make_grid(2, 5, 1.0).unwrap();
        let t = WeightSequence::per_scale(g, ScaleRange::new(0, 2).unwrap(), 2.0, |_| 3.0).unwrap();
        let q = DyadicCube::new(2, &[1, 3]);
        assert!((t.local_norm(&q).unwrap() - 3.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn power_weight_is_regularized() {
        let g = make_grid(1, 6, 2.0).unwrap();
        let w = power_weight(&g, -0.5, [1.0, 0.0]);
        assert!(w.values().iter().all(|v| v.re.is_finite() && v.re > 0.0));
        let h = g.spacing();
        assert!((w.values()[32].re - (h / 2.0).powf(-0.5)).abs() < 1e-12);
    }
}
