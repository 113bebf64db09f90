//! Elementary and Sobolev-type embedding checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicCube, Lattice};
use crate::error::{Error, Result};
use crate::filters::FilterPair;
use crate::grid::GridFunction;
use crate::transform::{f_norm, seq_norm, CoefficientField, NormParams, SeqNormMode};
use crate::weights::{ScaleRange, WeightSequence};

/// `(||f||` with inner exponent `r`, `||f||` with inner exponent `q)`; the first never exceeds the second when `q <= r`.
pub fn elementary_embedding_check(
    f: &GridFunction,
    t: &WeightSequence,
    p: f64,
    q: f64,
    r: f64,
    pair: &FilterPair,
) -> Result<(f64, f64)> {
    if !(q <= r) {
        return Err(Error::ParameterDomain(format!("need q <= r, got q = {q}, r = {r}")));
    }
    let lhs = f_norm(f, t, &NormParams::new(p, r)?, pair)?;
    let rhs = f_norm(f, t, &NormParams::new(p, q)?, pair)?;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevCondition {
    pub sup: f64,
    /// Cube attaining the supremum.
    pub worst: DyadicCube,
}

/// `sup_{k, Q} ||w_k | L_{p1}(Q)|| / ||t_k | L_{p0}(Q)||` over cubes of side `2^-k`, `k` in `window`;
/// the exponents are those carried by `t` and `w`.
pub fn sobolev_condition(t: &WeightSequence, w: &WeightSequence, window: ScaleRange) -> Result<SobolevCondition> {
    if t.spec() != w.spec() {
        return Err(Error::IncompatibleGrids("weight sequences live on different grids".into()));
    }
    if !t.range().covers(&window) || !w.range().covers(&window) {
        return Err(Error::IncompatibleWindows(format!(
            "window {}..={} is not covered by both weight sequences",
            window.lo, window.hi
        )));
    }
    let mut best = SobolevCondition { sup: f64::NEG_INFINITY, worst: DyadicCube::new(window.lo, &[0; 2][..t.spec().dim()]) };
    for k in window.iter() {
        let lattice = Lattice::new(t.spec(), k)?;
        let source = t.local_norms(k, t.p())?;
        let target = w.local_norms(k, w.p())?;
        for (c, (a, b)) in target.iter().zip(&source).enumerate() {
            if *b == 0.0 {
                return Err(Error::DegenerateInput(format!("source weight vanishes on {}", lattice.cube(c))));
            }
            if a / b > best.sup {
                best = SobolevCondition { sup: a / b, worst: lattice.cube(c) };
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevExponents {
    pub p0: f64,
    pub q: f64,
    pub p1: f64,
    pub r: f64,
}

/// `||lambda||` in the target space over `||lambda||` in the source space.
pub fn sobolev_ratio(lam: &CoefficientField, t: &WeightSequence, w: &WeightSequence, e: &SobolevExponents) -> Result<f64> {
    if !(e.p0 < e.p1) {
        return Err(Error::ParameterDomain(format!("need p0 < p1, got p0 = {}, p1 = {}", e.p0, e.p1)));
    }
    let source = seq_norm(lam, t, &NormParams::new(e.p0, e.q)?, SeqNormMode::Standard)?;
    if source == 0.0 {
        return Err(Error::DegenerateInput("source norm vanishes".into()));
    }
    let target = seq_norm(lam, w, &NormParams::new(e.p1, e.r)?, SeqNormMode::Standard)?;
    Ok(target / source)
}

/// Report of one embedding case: the condition supremum and measured ratios by window width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCase {
    pub condition_sup: f64,
    pub ratios: BTreeMap<String, f64>,
}

impl EmbeddingCase {
    pub fn new(condition_sup: f64) -> Self {
        Self { condition_sup, ratios: BTreeMap::new() }
    }

    pub fn record(&mut self, width: usize, ratio: f64) {
        self.ratios.insert(width.to_string(), ratio);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{build_filter_pair, FilterKind};
    use crate::grid::make_grid;
    use num_complex::Complex64;

    fn window(lo: i32, hi: i32) -> ScaleRange {
        ScaleRange::new(lo, hi).unwrap()
    }

    #[test]
    fn classical_pair_condition_is_one() {
        let g = make_grid(1, 10, 1.0).unwrap();
        let (p0, p1, s0) = (1.5, 3.0, 1.0);
        let s1 = s0 - 1.0 / p0 + 1.0 / p1;
        let t = WeightSequence::power(g, window(0, 8), p0, s0).unwrap();
        let w = WeightSequence::power(g, window(0, 8), p1, s1).unwrap();
        let cond = sobolev_condition(&t, &w, window(0, 8)).unwrap();
        assert!((cond.sup - 1.0).abs() < 1e-12);
        assert_eq!(sobolev_condition(&t, &t, window(0, 8)).unwrap().sup, 1.0);
    }

    #[test]
    fn violating_pair_grows_with_depth() {
        let g = make_grid(1, 10, 1.0).unwrap();
        let t = WeightSequence::power(g, window(0, 8), 1.5, 1.0).unwrap();
        let w = WeightSequence::power(g, window(0, 8), 3.0, 1.0).unwrap();
        let gap = 1.0 / 1.5 - 1.0 / 3.0;
        for hi in [4, 8] {
            let cond = sobolev_condition(&t, &w, window(0, hi)).unwrap();
            assert!((cond.sup / 2f64.powf(hi as f64 * gap) - 1.0).abs() < 1e-12);
            assert_eq!(cond.worst.k, hi);
        }
    }

    #[test]
    fn sobolev_ratio_single_entry_and_zero() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let t = WeightSequence::power(g, window(0, 5), 1.0, 0.5).unwrap();
        let w = WeightSequence::power(g, window(0, 5), 2.0, 0.0).unwrap();
        let e = SobolevExponents { p0: 1.0, q: 1.0, p1: 2.0, r: 2.0 };
        let mut lam = CoefficientField::zeros(&g, window(0, 5)).unwrap();
        assert!(matches!(sobolev_ratio(&lam, &t, &w, &e), Err(Error::DegenerateInput(_))));
        lam.set(3, &[2], Complex64::new(1.0, 1.0)).unwrap();
        let q = DyadicCube::new(3, &[2]);
        let expected = w.local_norm(&q).unwrap() / t.local_norm(&q).unwrap();
        assert!((sobolev_ratio(&lam, &t, &w, &e).unwrap() - expected).abs() < 1e-12 * expected);
        let bad = SobolevExponents { p0: 2.0, ..e };
        assert!(matches!(sobolev_ratio(&lam, &t, &w, &bad), Err(Error::ParameterDomain(_))));
    }

    #[test]
    fn elementary_equal_exponents() {
        let g = make_grid(1, 9, 8.0).unwrap();
        let pair = build_filter_pair(FilterKind::Cosine);
        let f = GridFunction::from_real_fn(g, |x| (5.0 * x[0]).sin() + (13.0 * x[0]).cos());
        let t = WeightSequence::power(g, window(1, 6), 2.0, 0.5).unwrap();
        let (a, b) = elementary_embedding_check(&f, &t, 2.0, 1.5, 1.5, &pair).unwrap();
        assert_eq!(a, b);
        let (a, b) = elementary_embedding_check(&f, &t, 2.0, 1.0, 2.0, &pair).unwrap();
        assert!(a <= b);
        assert!(elementary_embedding_check(&f, &t, 2.0, 2.0, 1.0, &pair).is_err());
    }

    #[test]
    fn case_json() {
        let mut case = EmbeddingCase::new(1.0);
        case.record(4, 0.5);
        let v: serde_json::Value = serde_json::from_str(&case.to_json().unwrap()).unwrap();
        assert_eq!(v["ratios"]["4"], 0.5);
        assert_eq!(v["condition_sup"], 1.0);
    }
}
