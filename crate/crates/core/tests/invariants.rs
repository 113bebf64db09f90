use lpkit::corpus::{band_limited_in_window, gaussian_bumps, random_field, rng_for};
use lpkit::dyadic::{cube_mean, cz_covering, Lattice};
use lpkit::embeddings::elementary_embedding_check;
use lpkit::filters::{build_filter_pair, filter_symbol, FilterKind, Which};
use lpkit::grid::{dft, inverse_dft, make_grid, spectral_multiply, GridFunction, GridSpec};
use lpkit::maximal::hl_maximal;
use lpkit::transform::{
    analyze, coefficient_bound_check, f_norm, peak_functional, seq_norm, synthesize, NormParams, SeqNormMode,
};
use lpkit::weights::{ap_constant, power_weight, ScaleRange, WeightSequence};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid_1d() -> GridSpec {
    make_grid(1, 9, 8.0).unwrap()
}

fn window() -> ScaleRange {
    ScaleRange::new(2, 6).unwrap()
}

fn noise(spec: &GridSpec, seed: u64) -> GridFunction {
    use rand::Rng;
    let mut rng = rng_for(seed, 99);
    let values = (0..spec.len()).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    GridFunction::new(*spec, values).unwrap()
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-10.0f64..10.0, -10.0f64..10.0).prop_filter("nonzero", |(a, b)| a.hypot(*b) > 1e-3).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dft_round_trip(seed in any::<u64>(), two_d in any::<bool>()) {
        let g = if two_d { make_grid(2, 5, 1.0).unwrap() } else { grid_1d() };
        let f = noise(&g, seed);
        let back = inverse_dft(g, dft(&f)).unwrap();
        prop_assert!(back.max_abs_diff(&f).unwrap() < 1e-13);
    }

    #[test]
    fn multipliers_compose(seed in any::<u64>(), k in 2i32..6) {
        let g = grid_1d();
        let pair = build_filter_pair(FilterKind::Bump);
        let f = noise(&g, seed);
        let a = filter_symbol(&pair, Which::Phi, k, &g);
        let b = filter_symbol(&pair, Which::Psi, k + 1, &g);
        let twice = spectral_multiply(&spectral_multiply(&f, &a).unwrap(), &b).unwrap();
        let once = spectral_multiply(&f, &a.product(&b).unwrap()).unwrap();
        prop_assert!(twice.max_abs_diff(&once).unwrap() < 1e-12);
    }

    #[test]
    fn reconstruction_is_exact_on_band(seed in any::<u64>()) {
        let g = grid_1d();
        let pair = build_filter_pair(FilterKind::Cosine);
        let f = band_limited_in_window(&g, window(), &mut rng_for(seed, 0)).unwrap();
        let back = synthesize(&analyze(&f, &pair, window()).unwrap(), &pair, &g).unwrap();
        prop_assert!(back.relative_l2_error(&f).unwrap() < 1e-10);
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), c in complex(), p in 1.0f64..3.0, q in 1.0f64..3.0) {
        let g = grid_1d();
        let pair = build_filter_pair(FilterKind::Bump);
        let t = WeightSequence::power(g, window(), p, 0.5).unwrap();
        let np = NormParams::new(p, q).unwrap();
        let f = band_limited_in_window(&g, window(), &mut rng_for(seed, 1)).unwrap();
        let base = f_norm(&f, &t, &np, &pair).unwrap();
        let scaled = f_norm(&f.scaled(c), &t, &np, &pair).unwrap();
        prop_assert!((scaled - c.norm() * base).abs() <= 1e-10 * scaled);
        let lam = analyze(&f, &pair, window()).unwrap();
        let a = seq_norm(&lam, &t, &np, SeqNormMode::Standard).unwrap();
        let b = seq_norm(&lam.scaled(c), &t, &np, SeqNormMode::Standard).unwrap();
        prop_assert!((b - c.norm() * a).abs() <= 1e-10 * b);
    }

    #[test]
    fn sequence_norm_triangle(s1 in any::<u64>(), s2 in any::<u64>(), p in 1.0f64..3.0, q in 1.0f64..3.0) {
        let g = grid_1d();
        let t = WeightSequence::power(g, window(), p, -0.5).unwrap();
        let np = NormParams::new(p, q).unwrap();
        let a = random_field(&g, window(), 0.4, &mut rng_for(s1, 2)).unwrap();
        let b = random_field(&g, window(), 0.4, &mut rng_for(s2, 3)).unwrap();
        let norm = |x| seq_norm(x, &t, &np, SeqNormMode::Standard).unwrap();
        prop_assert!(norm(&a.add(&b).unwrap()) <= (norm(&a) + norm(&b)) * (1.0 + 1e-12));
    }

    #[test]
    fn maximal_is_sublinear_monotone_and_majorizes(s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = make_grid(1, 8, 1.0).unwrap();
        let f = noise(&g, s1);
        let h = noise(&g, s2);
        let mf = hl_maximal(&f).real_parts();
        let mh = hl_maximal(&h).real_parts();
        let sum = hl_maximal(&f.add(&h).unwrap()).real_parts();
        let dominating = GridFunction::from_real(g, f.abs().iter().map(|v| v + 0.1).collect()).unwrap();
        let md = hl_maximal(&dominating).real_parts();
        for i in 0..g.len() {
            prop_assert!(sum[i] <= mf[i] + mh[i] + 1e-12);
            prop_assert!(mf[i] <= md[i] + 1e-12);
            prop_assert!(mf[i] >= f.values()[i].norm() - 1e-12);
        }
    }

    #[test]
    fn cz_cubes_respect_thresholds(seed in any::<u64>()) {
        let g = make_grid(1, 9, 1.0).unwrap();
        let f = gaussian_bumps(&g, 4, &mut rng_for(seed, 4)).unwrap();
        let cover = cz_covering(&f, 4.0, None).unwrap();
        prop_assert!(cover.omega_violations.is_empty());
        prop_assert!(cover.beta.is_finite() && cover.beta >= 1.0);
        for level in &cover.levels {
            let a_i = 4f64.powi(level.i);
            for (cube, mean) in level.cubes.iter().zip(&level.means) {
                prop_assert!(a_i <= *mean && *mean <= 2.0 * a_i);
                prop_assert!((cube_mean(&f, cube, 1.0).unwrap() - mean).abs() <= 1e-12 * mean);
                Lattice::new(&g, cube.k).unwrap().index_of(cube).unwrap();
            }
        }
    }

    #[test]
    fn ap_estimates_are_monotone_in_p(exponent in -0.9f64..0.9, p in 1.2f64..3.0, dq in 0.0f64..2.0) {
        let g = make_grid(1, 9, 2.0).unwrap();
        let w = power_weight(&g, exponent, [1.0, 0.0]);
        let a_p = ap_constant(&w, p, 9).unwrap();
        let a_q = ap_constant(&w, p + dq, 9).unwrap();
        prop_assert!(a_p >= 1.0 - 1e-12);
        prop_assert!(a_q <= a_p * (1.0 + 1e-12));
    }

    #[test]
    fn elementary_embedding_is_exact(seed in any::<u64>(), q in 0.5f64..3.0, dr in 0.0f64..2.0, p in 1.0f64..3.0) {
        let g = grid_1d();
        let pair = build_filter_pair(FilterKind::Cosine);
        let t = WeightSequence::power(g, window(), p, 0.25).unwrap();
        let f = band_limited_in_window(&g, window(), &mut rng_for(seed, 5)).unwrap();
        let (lhs, rhs) = elementary_embedding_check(&f, &t, p, q, q + dr, &pair).unwrap();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn peak_functional_dominates(seed in any::<u64>(), r in 0.5f64..3.0, d in 0.5f64..4.0) {
        let g = make_grid(2, 5, 4.0).unwrap();
        let win = ScaleRange::new(0, 3).unwrap();
        let lam = random_field(&g, win, 0.3, &mut rng_for(seed, 6)).unwrap();
        let star = peak_functional(&lam, r, d).unwrap();
        for k in win.iter() {
            for (a, b) in lam.block(k).iter().zip(star.block(k)) {
                prop_assert!(b.re >= a.norm() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn coefficient_bound_holds(seed in any::<u64>(), p in 1.0f64..3.0, q in 0.5f64..3.0, s in -1.0f64..1.0) {
        let g = grid_1d();
        let t = WeightSequence::power(g, window(), p, s).unwrap();
        let lam = random_field(&g, window(), 0.5, &mut rng_for(seed, 7)).unwrap();
        prop_assert!(coefficient_bound_check(&lam, &t, &NormParams::new(p, q).unwrap()).unwrap() <= 1.0 + 1e-12);
    }
}
