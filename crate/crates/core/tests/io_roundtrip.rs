use lpkit::corpus::{band_limited, random_field, rng_for};
use lpkit::dyadic::DyadicCube;
use lpkit::filters::{build_filter_pair, FilterKind};
use lpkit::grid::{make_grid, GridFunction};
use lpkit::io::*;
use lpkit::operators::{atomic_decompose, atomic_synthesize, AtomFamily, Normalization};
use lpkit::weights::ScaleRange;
use lpkit::Error;
use num_complex::Complex64;

#[test]
fn binary_grid_files_are_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = make_grid(2, 5, 4.0).unwrap();
    let f = band_limited(&g, 2.0, 30.0, &mut rng_for(1, 0)).unwrap().map(|v| v * Complex64::new(1.0, -0.25));
    let path = dir.path().join("f.lpgf");
    save_lpgf(&f, &path).unwrap();
    assert_eq!(load_lpgf(&path).unwrap(), f);
}

#[test]
fn csv_round_trip_preserves_values() {
    let g = make_grid(1, 7, 1.0).unwrap();
    let f = GridFunction::from_real_fn(g, |x| (std::f64::consts::TAU * 3.0 * x[0]).sin() / 3.0);
    let mut buf = Vec::new();
    write_grid_csv(&f, &mut buf).unwrap();
    let back = read_grid_csv(buf.as_slice()).unwrap();
    assert_eq!(back, f);
}

#[test]
fn corrupt_magic_is_a_format_error() {
    let g = make_grid(1, 4, 1.0).unwrap();
    let mut buf = Vec::new();
    write_lpgf(&GridFunction::zeros(g), &mut buf).unwrap();
    buf[0] = b'X';
    assert!(matches!(read_lpgf(buf.as_slice()), Err(Error::Format(_))));
    assert!(matches!(read_lpgf(&buf[..3]), Err(Error::Format(_))));
}

#[test]
fn coefficient_files_round_trip_and_list() {
    let dir = tempfile::tempdir().unwrap();
    let g = make_grid(1, 8, 2.0).unwrap();
    let lam = random_field(&g, ScaleRange::new(0, 4).unwrap(), 0.2, &mut rng_for(5, 0)).unwrap();
    let path = dir.path().join("c.lpco");
    save_coefficients(&lam, &path).unwrap();
    let back = load_coefficients(&path).unwrap();
    assert_eq!(back, lam);
    let json = coefficients_to_json(&lam);
    assert_eq!(json["entries"].as_array().unwrap().len(), lam.len());
}

#[test]
fn atom_families_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = make_grid(1, 9, 8.0).unwrap();
    let pair = build_filter_pair(FilterKind::Bump);
    let f = band_limited(&g, 4.0, 64.0, &mut rng_for(2, 0)).unwrap();
    let (family, lam) = atomic_decompose(&f, &pair).unwrap();
    save_atom_family(&family, dir.path()).unwrap();
    let loaded = load_atom_family(dir.path()).unwrap();
    assert_eq!(loaded.len(), family.len());
    assert_eq!(loaded.normalization, Normalization::Consistent);
    let a = atomic_synthesize(&family, &lam, &g).unwrap();
    let b = atomic_synthesize(&loaded, &lam, &g).unwrap();
    assert_eq!(a, b);

    let empty = AtomFamily::new(g, Normalization::Strict, -1, 2);
    let sub = dir.path().join("empty");
    save_atom_family(&empty, &sub).unwrap();
    let back = load_atom_family(&sub).unwrap();
    assert!(back.is_empty());
    assert_eq!((back.moments, back.derivatives), (-1, 2));
    assert!(back.get(&DyadicCube::new(0, &[0])).is_none());
}
