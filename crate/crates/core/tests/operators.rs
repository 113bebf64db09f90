use lpkit::dyadic::DyadicCube;
use lpkit::filters::{build_filter_pair, FilterKind};
use lpkit::grid::{make_grid, GridFunction, GridSpec};
use lpkit::operators::*;
use lpkit::transform::{analyze, f_norm, seq_norm, synthesize, CoefficientField, NormParams, SeqNormMode};
use lpkit::weights::{ScaleRange, WeightSequence};
use lpkit::Error;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn window(lo: i32, hi: i32) -> ScaleRange {
    ScaleRange::new(lo, hi).unwrap()
}

fn omega(eps: f64, a1: f64, a2: f64, j: f64) -> OmegaParams {
    OmegaParams::new(eps, a1, a2, j).unwrap()
}

#[test]
fn omega_examples() {
    let w = omega(1.0, 0.0, 0.0, 1.0);
    let q = DyadicCube::new(3, &[5]);
    assert_eq!(omega_weight(&q, &q, &w), 1.0);
    let p = DyadicCube::new(2, &[0]);
    assert_eq!(omega_weight(&DyadicCube::new(3, &[0]), &p, &w), 0.5);
    let far = |d: i64| omega_weight(&DyadicCube::new(0, &[0]), &DyadicCube::new(0, &[d]), &w);
    let ratio = far(2000) / far(1000);
    assert!((ratio / 2f64.powf(-2.0) - 1.0).abs() < 1e-3);
}

#[test]
fn omega_branch_selection() {
    let w = omega(0.5, 0.3, 1.7, 2.0);
    let fine = DyadicCube::new(4, &[0, 0]);
    let coarse = DyadicCube::new(1, &[0, 0]);
    // v <= k branch with gap -3, then v > k branch with gap +3
    let low = 2f64.powf(-3.0 * (1.7 + 2.5 / 2.0));
    let high = 2f64.powf(3.0 * (0.3 - 2.5 / 2.0 - 2.0 + 2.0));
    assert!((omega_weight(&fine, &coarse, &w) - low).abs() < 1e-15);
    assert!((omega_weight(&coarse, &fine, &w) - high).abs() < 1e-15);
    assert!(matches!(OmegaParams::new(0.0, 0.0, 0.0, 1.0), Err(Error::ParameterDomain(_))));
}

fn random_field(spec: &GridSpec, w: ScaleRange, seed: u64) -> CoefficientField {
    let mut lam = CoefficientField::zeros(spec, w).unwrap();
    let mut state = seed;
    for k in w.iter() {
        for v in lam.block_mut(k) {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *v = c(((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5);
        }
    }
    lam
}

#[test]
fn almost_diagonal_identity_and_single_entry() {
    let g = make_grid(1, 8, 1.0).unwrap();
    let w = window(1, 4);
    let lam = random_field(&g, w, 3);
    let id = AlmostDiagonalMatrix::identity(&lam, omega(1.0, 0.0, 0.0, 1.0));
    assert_eq!(id.apply(&lam).unwrap(), lam);

    let mut a = AlmostDiagonalMatrix::new(&lam, omega(1.0, 0.0, 0.0, 1.0));
    let (q, p) = (DyadicCube::new(2, &[1]), DyadicCube::new(4, &[9]));
    a.insert(&q, &p, c(2.0)).unwrap();
    let out = a.apply(&lam).unwrap();
    for (cube, v) in out.entries() {
        if cube == q {
            assert_eq!(v, 2.0 * lam.get_cube(&p));
        } else {
            assert_eq!(v, c(0.0));
        }
    }
    let (past, future) = a.apply_split(&lam).unwrap();
    assert!(past.is_zero());
    assert_eq!(future, out);
    assert!(a.bound() > 0.0 && a.bound().is_finite());

    let other = CoefficientField::zeros(&g, window(1, 3)).unwrap();
    assert!(matches!(a.apply(&other), Err(Error::IncompatibleWindows(_))));
}

#[test]
fn omega_matrix_has_unit_bound() {
    let g = make_grid(1, 6, 1.0).unwrap();
    let lam = random_field(&g, window(0, 3), 9);
    let a = AlmostDiagonalMatrix::omega_matrix(&lam, omega(1.0, 0.0, 0.0, 1.0));
    assert_eq!(a.bound(), 1.0);
    assert_eq!(a.nnz(), 15 * 15);
    let t = WeightSequence::unit(g, window(0, 3), 2.0).unwrap();
    let np = NormParams::new(2.0, 2.0).unwrap();
    let ratio = seq_norm(&a.apply(&lam).unwrap(), &t, &np, SeqNormMode::Standard).unwrap()
        / seq_norm(&lam, &t, &np, SeqNormMode::Standard).unwrap();
    assert!(ratio.is_finite() && ratio > 0.0);
}

#[test]
fn atoms_round_trip() {
    let g1 = make_grid(1, 9, 8.0).unwrap();
    for (q, moments) in [(DyadicCube::new(2, &[5]), -1), (DyadicCube::new(2, &[5]), 0), (DyadicCube::new(1, &[3]), 1)] {
        let a = build_smooth_atom(&q, moments, 2, &g1).unwrap();
        let report = verify_atom(&a, &q, moments, 2);
        assert!(report.passed(), "{report:?}");
        assert!(report.margin > 0.0);
        if moments >= 0 {
            assert!(report.moment_violation < 1e-10);
        }
    }
    let g2 = make_grid(2, 6, 4.0).unwrap();
    let q = DyadicCube::new(1, &[2, 7]);
    let a = build_smooth_atom(&q, 1, 1, &g2).unwrap();
    let report = verify_atom(&a, &q, 1, 1);
    assert!(report.passed(), "{report:?}");
}

#[test]
fn atom_violations_are_flagged() {
    let g = make_grid(1, 9, 8.0).unwrap();
    let q = DyadicCube::new(2, &[8]);
    let center = q.center()[0];
    let wide = GridFunction::from_real_fn(g, |x| {
        let u = (x[0] - center) / (2.0 * q.side());
        if u.abs() < 1.0 { (-1.0 / (1.0 - u * u)).exp() } else { 0.0 }
    });
    let report = verify_atom(&wide, &q, -1, 0);
    assert!(report.support_violation > 0.0 && !report.support_ok);

    let narrow = GridFunction::from_real_fn(g, |x| {
        let u = (x[0] - center) / (1.5 * q.side());
        if u.abs() < 1.0 { (-1.0 / (1.0 - u * u)).exp() } else { 0.0 }
    });
    let mass: f64 = narrow.real_parts().iter().sum::<f64>() * g.spacing();
    let report = verify_atom(&narrow, &q, 0, 0);
    assert!(!report.moments_ok);
    assert!((report.moment_violation - mass).abs() < 1e-12 * mass);
}

#[test]
fn atom_preconditions() {
    let g = make_grid(1, 6, 8.0).unwrap();
    assert!(matches!(
        build_smooth_atom(&DyadicCube::new(3, &[0]), 0, 1, &g),
        Err(Error::AtomConstruction(_))
    ));
    assert!(matches!(build_smooth_atom(&DyadicCube::new(-2, &[0]), 0, 1, &g), Err(Error::CubeResolution(_))));
    assert!(matches!(build_smooth_atom(&DyadicCube::new(0, &[9]), 0, 1, &g), Err(Error::CubeResolution(_))));
}

#[test]
fn strict_normalization_is_checked_literally() {
    let g = make_grid(2, 6, 4.0).unwrap();
    let q = DyadicCube::new(1, &[0, 0]);
    let a = build_smooth_atom_with(&q, 0, 1, &g, Normalization::Strict).unwrap();
    assert!(verify_atom_with(&a, &q, 0, 1, Normalization::Strict, 1e-8).passed());
    let consistent = verify_atom_with(&a, &q, 0, 1, Normalization::Consistent, 1e-8);
    assert!((consistent.derivative_ratio - 0.9 * 2f64.powf(1.0)).abs() > 1e-3 || consistent.passed());
}

#[test]
fn psi_passes_as_synthesis_molecule() {
    let g = make_grid(1, 10, 16.0).unwrap();
    let pair = build_filter_pair(FilterKind::Bump);
    let w = window(2, 4);
    let mut lam = CoefficientField::zeros(&g, w).unwrap();
    let q = DyadicCube::new(3, &[40]);
    lam.set(3, &[40], c(1.0)).unwrap();
    let psi = synthesize(&lam, &pair, &g).unwrap();
    let spec = MoleculeSpec::new(1, 0.0, 0.5, 1.0, 1.5).unwrap();
    let first = verify_molecule(&psi, &q, &spec, MoleculeKind::Synthesis);
    let worst = first.conditions.iter().map(|c| c.worst_ratio).fold(0.0, f64::max);
    assert!(worst.is_finite());
    let scaled = psi.scaled(c(0.9 / worst));
    let report = verify_molecule(&scaled, &q, &spec, MoleculeKind::Synthesis);
    assert!(report.passed(), "{report:?}");

    let tail = scaled.map(|v| v + 0.05);
    let bad = verify_molecule(&tail, &q, &spec, MoleculeKind::Synthesis);
    assert!(bad.condition("cond1").unwrap().margin < 0.0);
}

#[test]
fn atom_passes_as_molecule_after_rescaling() {
    let g = make_grid(1, 9, 8.0).unwrap();
    let q = DyadicCube::new(2, &[12]);
    let a = build_smooth_atom(&q, 0, 2, &g).unwrap();
    let spec = MoleculeSpec::new(1, 0.0, 1.0, 1.0, 2.0).unwrap();
    let first = verify_molecule(&a, &q, &spec, MoleculeKind::Synthesis);
    let worst = first.conditions.iter().map(|c| c.worst_ratio).fold(0.0, f64::max);
    let rescaled = a.scaled(c(0.9 / worst));
    let report = verify_molecule(&rescaled, &q, &spec, MoleculeKind::Synthesis);
    assert!(report.passed(), "{report:?}");
    assert!(report.moment_violation < 1e-10);
    let analysis = verify_molecule(&rescaled, &q, &spec, MoleculeKind::Analysis);
    assert_eq!(analysis.conditions.len(), 3);
    assert!(analysis.moment_violation < 1e-10);
}

#[test]
fn molecule_spec_domain() {
    assert_eq!(MoleculeSpec::new(1, 0.0, 0.0, 1.0, 2.0).unwrap().moments(), 0);
    assert_eq!(MoleculeSpec::new(2, 1.0, 0.0, 2.0, 3.0).unwrap().moments(), -1);
    assert_eq!(MoleculeSpec::new(1, -1.5, 0.0, 1.0, 2.0).unwrap().moments(), 1);
    assert!(matches!(MoleculeSpec::new(1, 0.0, 0.0, 1.0, 1.0), Err(Error::ParameterDomain(_))));
    let s = MoleculeSpec::new(1, 0.0, 0.5, 1.0, 2.0).unwrap();
    assert!(matches!(s.with_delta(0.5), Err(Error::ParameterDomain(_))));
    assert!(s.with_delta(0.6).is_ok());
    assert!(matches!(s.with_kappa(0.4), Err(Error::ParameterDomain(_))));
}

#[test]
fn matrix_check_examples() {
    let g = make_grid(1, 9, 8.0).unwrap();
    let pair = build_filter_pair(FilterKind::Bump);
    let w = OmegaParams::new(0.5, 0.0, 0.0, 1.0).unwrap();
    let zero = vec![(DyadicCube::new(3, &[4]), GridFunction::zeros(g))];
    assert_eq!(molecule_matrix_check(&zero, &pair, window(2, 5), &w, 1.0).unwrap().max_ratio, 0.0);
    assert!(matches!(
        molecule_matrix_check(&zero, &pair, window(2, 5), &w, 0.25),
        Err(Error::ParameterDomain(_))
    ));

    let q = DyadicCube::new(3, &[4]);
    let a = build_smooth_atom(&q, 0, 1, &g).unwrap();
    let check = molecule_matrix_check(&[(q, a)], &pair, window(2, 5), &w, 1.0).unwrap();
    assert!(check.max_ratio.is_finite() && check.max_ratio > 0.0);
    assert!(check.max_within(4.0) <= check.max_within(16.0));
}

fn band_limited(spec: GridSpec, seed: u64) -> GridFunction {
    // two cosines well inside the interior of the 2..6 window
    let freq = [6.0 + seed as f64, 15.0 + 2.0 * seed as f64];
    let t = spec.side();
    GridFunction::from_real_fn(spec, move |x| {
        (2.0 * std::f64::consts::PI * freq[0] * x[0] / t).cos() + 0.5 * (2.0 * std::f64::consts::PI * freq[1] * x[0] / t + 0.3).sin()
    })
}

#[test]
fn decompose_round_trip_and_linearity() {
    let g = make_grid(1, 9, 8.0).unwrap();
    let pair = build_filter_pair(FilterKind::Bump);
    let opts = DecomposeOptions { window: window(2, 6), ..DecomposeOptions::for_grid(&g).unwrap() };
    let f = band_limited(g, 1);
    let (family, lam) = atomic_decompose_with(&f, &pair, &opts).unwrap();
    let back = atomic_synthesize(&family, &lam, &g).unwrap();
    assert!(back.relative_l2_error(&f).unwrap() < 1e-5);
    for atom in family.atoms().iter().step_by(37) {
        let report = verify_atom(&atom.to_grid(&g), &atom.cube, 0, 1);
        assert!(report.passed(), "{:?} {report:?}", atom.cube);
    }

    let scale = Complex64::new(-2.0, 0.5);
    let (family2, lam2) = atomic_decompose_with(&f.scaled(scale), &pair, &opts).unwrap();
    assert!(lam.scaled(scale).max_abs_diff(&lam2).unwrap() < 1e-9 * lam2.blocks().iter().flatten().map(|v| v.norm()).fold(0.0, f64::max));
    assert_eq!(family.len(), family2.len());

    let t = WeightSequence::unit(g, window(2, 6), 2.0).unwrap();
    let np = NormParams::new(2.0, 2.0).unwrap();
    let ratio = seq_norm(&lam, &t, &np, SeqNormMode::Standard).unwrap() / f_norm(&f, &t, &np, &pair).unwrap();
    assert!(ratio.is_finite() && ratio > 0.0);
}

#[test]
fn decompose_edge_cases() {
    let g = make_grid(2, 6, 4.0).unwrap();
    let pair = build_filter_pair(FilterKind::Cosine);
    let (family, lam) = atomic_decompose(&GridFunction::zeros(g), &pair).unwrap();
    assert!(family.is_empty() && lam.is_zero());
    let opts = DecomposeOptions { moments: 1, ..DecomposeOptions::for_grid(&g).unwrap() };
    assert!(matches!(atomic_decompose_with(&GridFunction::zeros(g), &pair, &opts), Err(Error::InvalidArgument(_))));

    let f = GridFunction::from_real_fn(g, |x| (2.0 * std::f64::consts::PI * (3.0 * x[0] + 2.0 * x[1]) / 4.0).cos());
    let (family, lam) = atomic_decompose(&f, &pair).unwrap();
    let back = atomic_synthesize(&family, &lam, &g).unwrap();
    assert!(back.relative_l2_error(&f).unwrap() < 1e-5);
    let coeffs = analyze(&f, &pair, lam.window()).unwrap();
    assert!(coeffs.nonzero_count() > 0);
}

#[test]
fn atomic_synthesize_basics() {
    let g = make_grid(1, 9, 8.0).unwrap();
    let q = DyadicCube::new(2, &[3]);
    let fam = AtomFamily::build(g, &[q], 0, 1, Normalization::Consistent).unwrap();
    let mut lam = CoefficientField::zeros(&g, window(2, 3)).unwrap();
    assert!(atomic_synthesize(&fam, &lam, &g).unwrap().values().iter().all(|v| v.norm() == 0.0));
    lam.set(2, &[3], c(1.0)).unwrap();
    let single = atomic_synthesize(&fam, &lam, &g).unwrap();
    let direct = build_smooth_atom(&q, 0, 1, &g).unwrap();
    assert_eq!(single.max_abs_diff(&direct).unwrap(), 0.0);
    lam.set(3, &[0], c(1.0)).unwrap();
    assert!(matches!(atomic_synthesize(&fam, &lam, &g), Err(Error::IncompatibleWindows(_))));
}
