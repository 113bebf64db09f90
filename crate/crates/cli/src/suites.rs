//! The verification suites. Each one reads its own keys from the settings,
//! runs its cases and returns a report; nothing is written here.

use lpkit::corpus::{annulus_sequence, band_limited_in_window, random_field, rng_for};
use lpkit::dyadic::enumerate_cubes;
use lpkit::embeddings::{elementary_embedding_check, sobolev_condition, sobolev_ratio, EmbeddingCase, SobolevExponents};
use lpkit::filters::{build_filter_pair, representable_window, verify_filter_pair, FilterKind, FilterPair};
use lpkit::grid::GridSpec;
use lpkit::harness::{run_grid, summarize, GrowthSummary, RatioSample};
use lpkit::maximal::{kernel_maximal_ratio, vector_maximal_ratio, KernelDirection};
use lpkit::operators::{
    atomic_decompose_with, atomic_synthesize, build_smooth_atom_with, verify_atom_with, AlmostDiagonalMatrix,
    DecomposeOptions, Normalization, OmegaParams,
};
use lpkit::transform::{analyze, check_window, f_norm, seq_norm, synthesize, CoefficientField, NormParams, SeqNormMode};
use lpkit::weights::{x_class_constants, ScaleRange, XClassParams};
use lpkit::{Error, Result};
use serde_json::json;

use crate::config::{config_error, Settings};
use crate::recipes::{grid, weights};
use crate::report::{CaseTable, Criterion, Report};

pub const SUITES: [&str; 8] =
    ["filters", "reconstruct", "maximal", "xclass", "transform-norms", "almost-diagonal", "atoms", "embed"];

pub fn run(suite: &str, s: &Settings, seed: u64) -> Result<Report> {
    match suite {
        "filters" => filters(s),
        "reconstruct" => reconstruct(s, seed),
        "maximal" => maximal(s, seed),
        "xclass" => xclass(s),
        "transform-norms" => transform_norms(s, seed),
        "almost-diagonal" => almost_diagonal(s, seed),
        "atoms" => atoms(s, seed),
        "embed" => embed(s, seed),
        other => Err(config_error("suite", format!("unknown suite `{other}`"))),
    }
}

/// Shortest round-trip text, so reports are byte-stable.
fn num(v: f64) -> String {
    format!("{v}")
}

fn kind(s: &Settings) -> Result<FilterKind> {
    match s.raw("kind").unwrap_or("bump") {
        "bump" => Ok(FilterKind::Bump),
        "cosine" => Ok(FilterKind::Cosine),
        other => Err(config_error("kind", format!("unknown filter kind `{other}` (bump, cosine)"))),
    }
}

fn pair(s: &Settings) -> Result<FilterPair> {
    Ok(build_filter_pair(kind(s)?))
}

fn norm_params(s: &Settings, p_default: f64, q_default: f64) -> Result<NormParams> {
    let p = s.positive("p", p_default)?;
    let q = s.positive("q", q_default)?;
    NormParams::new(p, q).map_err(|e| config_error("p", e.to_string()))
}

fn representable(spec: &GridSpec) -> Result<(i32, i32)> {
    representable_window(spec).ok_or_else(|| config_error("L", "the grid resolves no complete annulus"))
}

/// The `window` setting, checked against the grid, or the full representable window.
fn window(s: &Settings, spec: &GridSpec) -> Result<ScaleRange> {
    match s.window("window")? {
        Some(w) => {
            check_window(spec, w).map_err(|e| config_error("window", e.to_string()))?;
            Ok(w)
        }
        None => {
            let (lo, hi) = representable(spec)?;
            ScaleRange::new(lo, hi)
        }
    }
}

fn case_seeds(s: &Settings, base: u64, default: usize) -> Result<Vec<u64>> {
    let count: usize = s.get("seeds", default)?;
    if count == 0 {
        return Err(config_error("seeds", "need at least one seed"));
    }
    Ok((0..count as u64).map(|i| base.wrapping_add(i)).collect())
}

fn widths(s: &Settings) -> Result<Vec<usize>> {
    let w: Vec<usize> = s.list("widths", &[4, 8])?;
    if w.is_empty() || w.contains(&0) {
        return Err(config_error("widths", "widths must be positive"));
    }
    Ok(w)
}

/// `[lo, lo + w - 1]` for every width, each checked against the grid when `checked`.
fn nested(spec: &GridSpec, lo: i32, widths: &[usize], checked: bool) -> Result<()> {
    for &w in widths {
        let range = ScaleRange::new(lo, lo + w as i32 - 1).map_err(|e| config_error("widths", e.to_string()))?;
        if checked {
            check_window(spec, range).map_err(|e| config_error("widths", e.to_string()))?;
        }
    }
    Ok(())
}

fn range_of(lo: i32, width: usize) -> ScaleRange {
    ScaleRange::new(lo, lo + width as i32 - 1).expect("validated by nested")
}

fn growth_table(samples: &[RatioSample]) -> CaseTable {
    let mut table = CaseTable::new(&["seed", "width", "ratio"]);
    for r in samples {
        table.push(vec![r.seed.to_string(), r.width.to_string(), num(r.ratio)]);
    }
    table
}

fn growth_criterion(name: &str, summary: &GrowthSummary) -> Criterion {
    Criterion::below(name, summary.growth, summary.tolerance)
}

fn tolerance(s: &Settings, default: f64) -> Result<f64> {
    s.positive("tol", default)
}

fn filters(s: &Settings) -> Result<Report> {
    s.restrict("filters", &["kind", "samples", "tol", "c_lower"])?;
    let pair = pair(s)?;
    let samples: usize = s.get("samples", 10_000)?;
    let tol = tolerance(s, 1e-12)?;
    let c_min = s.positive("c_lower", 0.05)?;
    let r = verify_filter_pair(&pair, samples, tol).map_err(|e| config_error("samples", e.to_string()))?;

    let mut cases = CaseTable::new(&["radius", "analysis", "synthesis", "partition"]);
    let steps = 200;
    for i in 0..=steps {
        let radius = 2f64.powf(-2.0 + 4.0 * i as f64 / steps as f64);
        let partition: f64 = (-40..=40).map(|k| pair.eta(2f64.powi(-k) * radius) * pair.psi_profile(2f64.powi(-k) * radius)).sum();
        cases.push(vec![num(radius), num(pair.eta(radius)), num(pair.psi_profile(radius)), num(partition)]);
    }
    Ok(Report {
        suite: "filters",
        statement: "Admissible filter pair: annular support, lower bound on the inner annulus, discrete partition of unity.",
        criteria: vec![
            Criterion::holds("support", r.support_violation == 0.0),
            Criterion::above("lower-bound", r.c_lower, c_min),
            Criterion::below("partition", r.partition_deviation, tol),
        ],
        metrics: serde_json::to_value(&r)?,
        cases,
    })
}

fn reconstruct(s: &Settings, seed: u64) -> Result<Report> {
    s.restrict("reconstruct", &["n", "L", "T", "window", "seeds", "kind", "tol"])?;
    let spec = grid(s, 1, 9, 8.0)?;
    let win = window(s, &spec)?;
    let pair = pair(s)?;
    let tol = tolerance(s, if spec.dim() == 1 { 1e-6 } else { 1e-5 })?;
    let seeds = case_seeds(s, seed, 10)?;
    let errors = run_grid(&seeds, &[win.len()], |seed, _| {
        let f = band_limited_in_window(&spec, win, &mut rng_for(seed, 0))?;
        synthesize(&analyze(&f, &pair, win)?, &pair, &spec)?.relative_l2_error(&f)
    })?;
    let worst = errors.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let mut cases = CaseTable::new(&["seed", "relative_error"]);
    for r in &errors {
        cases.push(vec![r.seed.to_string(), num(r.ratio)]);
    }
    Ok(Report {
        suite: "reconstruct",
        statement: "Synthesis after analysis is the identity on functions whose spectrum lies in the window.",
        criteria: vec![Criterion::below("max-relative-error", worst, tol)],
        metrics: json!({ "window": [win.lo, win.hi], "max_relative_error": worst }),
        cases,
    })
}

fn direction(s: &Settings) -> Result<KernelDirection> {
    match s.raw("direction").unwrap_or("past") {
        "past" => Ok(KernelDirection::Past),
        "future" => Ok(KernelDirection::Future),
        other => Err(config_error("direction", format!("unknown direction `{other}` (past, future)"))),
    }
}

fn alpha(s: &Settings, default: (f64, f64)) -> Result<(f64, f64)> {
    match s.list::<f64>("alpha", &[default.0, default.1])?.as_slice() {
        [a1, a2] => Ok((*a1, *a2)),
        _ => Err(config_error("alpha", "expected two exponents `alpha1,alpha2`")),
    }
}

fn maximal(s: &Settings, seed: u64) -> Result<Report> {
    s.restrict(
        "maximal",
        &["n", "L", "T", "weights", "alpha", "p", "q", "shift", "widths", "lo", "seeds", "mode", "K", "direction", "tol"],
    )?;
    let spec = grid(s, 1, 12, 1.0)?;
    let recipe = weights(s, "product:s=0.5,a=0.25")?;
    let alpha = alpha(s, recipe.alpha())?;
    let np = norm_params(s, 2.0, 2.0)?;
    let (p, q) = (np.p, np.q);
    let shift: i32 = s.get("shift", 0)?;
    let widths = widths(s)?;
    let lo: i32 = s.get("lo", 3)?;
    nested(&spec, lo, &widths, false)?;
    let seeds = case_seeds(s, seed, 20)?;
    let tol = tolerance(s, lpkit::harness::GROWTH_TOLERANCE)?;
    let kernel_mode = match s.raw("mode").unwrap_or("vector") {
        "vector" => None,
        "kernel" => Some((s.get("K", alpha.1 + 1.0)?, direction(s)?)),
        other => return Err(config_error("mode", format!("unknown mode `{other}` (vector, kernel)"))),
    };
    if let Some((k, d)) = kernel_mode {
        let probe = annulus_sequence(&spec, range_of(lo, 1), &mut rng_for(seed, 0))?;
        let t = recipe.build("weights", &spec, range_of(lo, 1), p)?;
        if let Err(Error::ParameterDomain(m)) = kernel_maximal_ratio(&probe, &t, p, q, k, d, alpha) {
            return Err(config_error("K", m));
        }
    }
    let pad = shift.unsigned_abs() as i32;
    let samples = run_grid(&seeds, &widths, |seed, w| {
        let range = range_of(lo, w);
        let fs = annulus_sequence(&spec, range, &mut rng_for(seed, w as u64))?;
        match kernel_mode {
            None => {
                let t = recipe.build("weights", &spec, ScaleRange::new(range.lo - pad, range.hi + pad)?, p)?;
                vector_maximal_ratio(&fs, &t, p, q, shift, alpha)
            }
            Some((k, d)) => {
                let t = recipe.build("weights", &spec, range, p)?;
                kernel_maximal_ratio(&fs, &t, p, q, k, d, alpha)
            }
        }
    })?;
    let summary = summarize(&samples, tol)?;
    Ok(Report {
        suite: "maximal",
        statement: "Weighted vector-valued maximal inequality: the ratio of the maximal side to the data side stays bounded as the scale range grows.",
        criteria: vec![growth_criterion("bounded-ratio", &summary)],
        metrics: serde_json::to_value(&summary)?,
        cases: growth_table(&samples),
    })
}

fn xclass(s: &Settings) -> Result<Report> {
    s.restrict("xclass", &["n", "L", "T", "weights", "alpha", "p", "theta", "window", "depths", "bound", "tol"])?;
    let recipe = weights(s, "power:s=1")?;
    let alpha = alpha(s, recipe.alpha())?;
    let p = s.positive("p", 2.0)?;
    let theta = s.positive("theta", 1.0)?;
    let params = XClassParams::standing(alpha.0, alpha.1, p, theta).map_err(|e| config_error("theta", e.to_string()))?;
    let level: u32 = s.get("L", 10)?;
    let depths: Vec<u32> = s.list("depths", &[level])?;
    let bound: Option<f64> = s.raw("bound").map(|_| s.positive("bound", 1.0)).transpose()?;
    let tol = tolerance(s, 0.05)?;

    let mut cases = CaseTable::new(&["depth", "C1", "C2", "alpha1_fit", "alpha2_fit", "residual1", "residual2"]);
    let mut reports = Vec::new();
    for &depth in &depths {
        let mut local = s.clone();
        local.set("L", &depth.to_string());
        let spec = grid(&local, 1, depth, 2.0)?;
        let range = s.window("window")?.unwrap_or(ScaleRange::new(-2, 4)?);
        let t = recipe.build("weights", &spec, range, p)?;
        let r = x_class_constants(&t, &params, depth)?;
        cases.push(vec![
            depth.to_string(),
            num(r.c1),
            num(r.c2),
            num(r.alpha_fit.0),
            num(r.alpha_fit.1),
            num(r.residual.0),
            num(r.residual.1),
        ]);
        reports.push(r);
    }
    let mut criteria = vec![
        Criterion::holds("finite", reports.iter().all(|r| r.c1.is_finite() && r.c2.is_finite())),
        Criterion::holds("ordered-exponents", reports.iter().all(|r| r.alpha_fit.1 >= r.alpha_fit.0 - 1e-9)),
    ];
    if let Some(b) = bound {
        let worst = reports.iter().map(|r| r.c1.max(r.c2)).fold(0.0, f64::max);
        criteria.push(Criterion::below("bound", worst, b * (1.0 + 1e-12)));
    }
    if let [.., a, b] = reports.as_slice() {
        let drift = (b.c1 / a.c1 - 1.0).abs().max((b.c2 / a.c2 - 1.0).abs());
        criteria.push(Criterion::below("stable-in-depth", drift, tol));
    }
    Ok(Report {
        suite: "xclass",
        statement: "Cross-scale weight class constants C1 and C2 with fitted exponents, alpha2 >= alpha1.",
        criteria,
        metrics: serde_json::to_value(&reports)?,
        cases,
    })
}

fn transform_norms(s: &Settings, seed: u64) -> Result<Report> {
    s.restrict(
        "transform-norms",
        &["n", "L", "T", "kind", "p", "q", "weights", "widths", "lo", "seeds", "delta", "tol"],
    )?;
    let spec = grid(s, 1, 12, 1.0)?;
    let pair = pair(s)?;
    let np = norm_params(s, 2.0, 2.0)?;
    let recipe = weights(s, "power:s=0")?;
    let widths = widths(s)?;
    let lo: i32 = s.get("lo", representable(&spec)?.0)?;
    nested(&spec, lo, &widths, true)?;
    let seeds = case_seeds(s, seed, 20)?;
    let tol = tolerance(s, lpkit::harness::GROWTH_TOLERANCE)?;
    let mode = match s.raw("delta") {
        None => SeqNormMode::Standard,
        Some(_) => SeqNormMode::Delta(s.positive("delta", 1.0)?),
    };
    let samples = run_grid(&seeds, &widths, |seed, w| {
        let win = range_of(lo, w);
        let t = recipe.build("weights", &spec, win, np.p)?;
        let f = band_limited_in_window(&spec, win, &mut rng_for(seed, w as u64))?;
        let lam = analyze(&f, &pair, win)?;
        Ok(f_norm(&f, &t, &np, &pair)? / seq_norm(&lam, &t, &np, mode)?)
    })?;
    // the equivalence constant at each width is max(max ratio, 1 / min ratio)
    let folded: Vec<RatioSample> = samples
        .iter()
        .map(|r| RatioSample { ratio: r.ratio.max(1.0 / r.ratio), ..r.clone() })
        .collect();
    let summary = summarize(&folded, tol)?;
    Ok(Report {
        suite: "transform-norms",
        statement: "The function-side norm and the coefficient-side norm of the analysis coefficients are equivalent.",
        criteria: vec![growth_criterion("bounded-constant", &summary)],
        metrics: serde_json::to_value(&summary)?,
        cases: growth_table(&samples),
    })
}

fn almost_diagonal(s: &Settings, seed: u64) -> Result<Report> {
    s.restrict(
        "almost-diagonal",
        &["n", "L", "T", "eps", "s", "p", "q", "widths", "lo", "seeds", "density", "tol"],
    )?;
    let spec = grid(s, 1, 10, 1.0)?;
    let np = norm_params(s, 2.0, 2.0)?;
    let eps = s.positive("eps", 1.0)?;
    let smooth: f64 = s.get("s", 0.0)?;
    let widths = widths(s)?;
    let lo: i32 = s.get("lo", 0)?;
    nested(&spec, lo, &widths, false)?;
    let density = s.positive("density", 1.0)?;
    if density > 1.0 {
        return Err(config_error("density", "density must not exceed 1"));
    }
    let seeds = case_seeds(s, seed, 20)?;
    let tol = tolerance(s, lpkit::harness::GROWTH_TOLERANCE)?;
    let omega = OmegaParams::new(eps, smooth, smooth, np.j(spec.dim())).map_err(|e| config_error("eps", e.to_string()))?;
    let matrices = widths
        .iter()
        .map(|&w| {
            let template = CoefficientField::zeros(&spec, range_of(lo, w)).map_err(|e| config_error("widths", e.to_string()))?;
            Ok((w, AlmostDiagonalMatrix::omega_matrix(&template, omega)))
        })
        .collect::<Result<Vec<_>>>()?;
    let samples = run_grid(&seeds, &widths, |seed, w| {
        let win = range_of(lo, w);
        let (_, a) = matrices.iter().find(|m| m.0 == w).expect("one matrix per width");
        let t = lpkit::weights::WeightSequence::power(spec, win, np.p, smooth)?;
        let lam = random_field(&spec, win, density, &mut rng_for(seed, w as u64))?;
        Ok(seq_norm(&a.apply(&lam)?, &t, &np, SeqNormMode::Standard)? / seq_norm(&lam, &t, &np, SeqNormMode::Standard)?)
    })?;
    let summary = summarize(&samples, tol)?;
    Ok(Report {
        suite: "almost-diagonal",
        statement: "Almost-diagonal matrices act boundedly on weighted coefficient spaces.",
        criteria: vec![growth_criterion("bounded-ratio", &summary)],
        metrics: serde_json::to_value(&summary)?,
        cases: growth_table(&samples),
    })
}

fn normalization(s: &Settings) -> Result<Normalization> {
    match s.raw("normalization").unwrap_or("consistent") {
        "consistent" => Ok(Normalization::Consistent),
        "strict" => Ok(Normalization::Strict),
        other => Err(config_error("normalization", format!("unknown normalization `{other}` (consistent, strict)"))),
    }
}

fn atoms(s: &Settings, seed: u64) -> Result<Report> {
    s.restrict("atoms", &["n", "L", "T", "kind", "N", "K", "normalization", "scale", "seeds", "tol"])?;
    let spec = grid(s, 1, 10, 8.0)?;
    let moments: i32 = s.get("N", 0)?;
    let derivatives: u32 = s.get("K", 1)?;
    let norm = normalization(s)?;
    let scale: i32 = s.get("scale", 2)?;
    let tol = tolerance(s, 1e-5)?;
    if moments < -1 {
        return Err(config_error("N", "moment order must be at least -1"));
    }
    let cubes = enumerate_cubes(&spec, scale).map_err(|e| config_error("scale", e.to_string()))?;

    let mut cases = CaseTable::new(&["kind", "case", "metric", "value"]);
    let mut all_atoms = true;
    let mut margin = f64::INFINITY;
    for q in &cubes {
        let a = build_smooth_atom_with(q, moments, derivatives, &spec, norm)
            .map_err(|e| config_error("N", e.to_string()))?;
        let r = verify_atom_with(&a, q, moments, derivatives, norm, 1e-8);
        all_atoms &= r.passed();
        margin = margin.min(r.margin);
        let label = q.to_string();
        cases.push(vec!["atom".into(), label.clone(), "support".into(), num(r.support_violation)]);
        cases.push(vec!["atom".into(), label.clone(), "moments".into(), num(r.moment_violation)]);
        cases.push(vec!["atom".into(), label, "derivative_ratio".into(), num(r.derivative_ratio)]);
    }
    let mut criteria = vec![Criterion::holds("atom-conditions", all_atoms)];

    let mut metrics = json!({ "atoms": cubes.len(), "smallest_margin": margin });
    if moments <= 0 {
        let pair = pair(s)?;
        let opts = DecomposeOptions { moments, derivatives, normalization: norm, ..DecomposeOptions::for_grid(&spec)? };
        let t = lpkit::weights::WeightSequence::power(spec, opts.window, 2.0, 0.0)?;
        let np = NormParams::new(2.0, 2.0)?;
        let seeds = case_seeds(s, seed, 5)?;
        let mut worst = 0.0f64;
        let mut constants = Vec::new();
        for &case in &seeds {
            let f = band_limited_in_window(&spec, opts.window, &mut rng_for(case, 10))?;
            let (family, lam) = atomic_decompose_with(&f, &pair, &opts)?;
            let error = atomic_synthesize(&family, &lam, &spec)?.relative_l2_error(&f)?;
            let c = seq_norm(&lam, &t, &np, SeqNormMode::Standard)? / f_norm(&f, &t, &np, &pair)?;
            worst = worst.max(error);
            constants.push(c);
            cases.push(vec!["decompose".into(), case.to_string(), "relative_error".into(), num(error)]);
            cases.push(vec!["decompose".into(), case.to_string(), "coefficient_constant".into(), num(c)]);
        }
        criteria.push(Criterion::below("decomposition-error", worst, tol));
        criteria.push(Criterion::holds("finite-constant", constants.iter().all(|c| c.is_finite())));
        metrics["decomposition_error"] = json!(worst);
        metrics["constants"] = json!(constants);
    }
    Ok(Report {
        suite: "atoms",
        statement: "Smooth atoms meet their support, moment and derivative conditions; the atomic decomposition reconstructs f with controlled coefficients.",
        criteria,
        metrics,
        cases,
    })
}

fn embed(s: &Settings, seed: u64) -> Result<Report> {
    s.restrict(
        "embed",
        &["n", "L", "T", "kind", "p0", "p1", "s0", "s1", "q", "r", "widths", "lo", "seeds", "tol"],
    )?;
    let spec = grid(s, 1, 10, 1.0)?;
    let pair = pair(s)?;
    let p0 = s.positive("p0", 1.5)?;
    let p1 = s.positive("p1", 3.0)?;
    if p1 < p0 {
        return Err(config_error("p1", format!("need p1 >= p0, got p0 = {p0}, p1 = {p1}")));
    }
    let s0: f64 = s.get("s0", 1.0)?;
    let n = spec.dim() as f64;
    let s1: f64 = s.get("s1", s0 - n / p0 + n / p1)?;
    let q = s.positive("q", 2.0)?;
    let r = s.positive("r", 2.0)?;
    let widths = widths(s)?;
    let lo: i32 = s.get("lo", 0)?;
    nested(&spec, lo, &widths, false)?;
    let seeds = case_seeds(s, seed, 20)?;
    let tol = tolerance(s, lpkit::harness::GROWTH_TOLERANCE)?;
    let widest = range_of(lo, *widths.iter().max().expect("nonempty"));
    let t = lpkit::weights::WeightSequence::power(spec, widest, p0, s0)?;
    let w = lpkit::weights::WeightSequence::power(spec, widest, p1, s1)?;
    let condition = sobolev_condition(&t, &w, widest)?;
    let conditions = widths
        .iter()
        .map(|&width| Ok(sobolev_condition(&t, &w, range_of(lo, width))?.sup))
        .collect::<Result<Vec<f64>>>()?;
    let condition_growth = conditions.iter().copied().fold(0.0, f64::max) / conditions[0] - 1.0;

    let e = SobolevExponents { p0, q, p1, r };
    let samples = run_grid(&seeds, &widths, |seed, width| {
        let lam = random_field(&spec, range_of(lo, width), 1.0, &mut rng_for(seed, width as u64))?;
        sobolev_ratio(&lam, &t, &w, &e)
    })?;
    let summary = summarize(&samples, tol)?;
    let mut case = EmbeddingCase::new(condition.sup);
    for wsum in &summary.widths {
        case.ratios.insert(wsum.width.to_string(), wsum.max);
    }

    let mut criteria = vec![
        Criterion::below("bounded-condition", condition_growth, tol),
        growth_criterion("bounded-ratio", &summary),
    ];
    if q <= r {
        let (flo, fhi) = representable(&spec)?;
        let win = ScaleRange::new(flo, fhi)?;
        let tf = lpkit::weights::WeightSequence::power(spec, win, p0, s0)?;
        let mut exact = true;
        for &seed in &seeds {
            let f = band_limited_in_window(&spec, win, &mut rng_for(seed, 11))?;
            let (lhs, rhs) = elementary_embedding_check(&f, &tf, p0, q, r, &pair)?;
            exact &= lhs <= rhs;
        }
        criteria.push(Criterion::holds("elementary-embedding", exact));
    }
    Ok(Report {
        suite: "embed",
        statement: "Elementary embedding between inner exponents, and the Sobolev-type embedding between coefficient spaces under the cube condition.",
        criteria,
        metrics: json!({ "case": case, "growth": summary, "s1": s1, "condition_by_width": conditions, "worst_cube": condition.worst.to_string() }),
        cases: growth_table(&samples),
    })
}
