use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use worldfn::euclidean::ContinuityStatus;
use worldfn::{
    build_metric_tensor, check_linear_structure, covariant_coordinates, detect_dimension, full_report,
    EuclideanConfig, GeometrySpec, Point,
};

fn random_points(n: usize, dim: usize, seed: u64, center: &[f64], spread: f64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point::new((0..dim).map(|a| center[a] + spread * rng.random_range(-1.0..1.0)).collect()))
        .collect()
}

#[test]
fn euclidean_kernels_pass_at_their_dimension() {
    for n in 1..=4 {
        for seed in [1, 2] {
            let g = GeometrySpec::euclidean(n).unwrap();
            let cands = random_points(20, n, seed, &vec![0.0; n], 1.0);
            let r = full_report(&g, &cands, &EuclideanConfig { seed, ..Default::default() }).unwrap();
            assert!(r.verdict, "n={n} seed={seed}\n{}", r.summary());
            assert_eq!(r.detected_dim, Some(n));
        }
    }
}

#[test]
fn twenty_points_in_three_dimensions() {
    let g = GeometrySpec::euclidean(3).unwrap();
    let cands = random_points(20, 3, 5, &[0.0; 3], 3.0);
    let est = detect_dimension(&g, &cands, 1e-9, 200, 10, 0).unwrap().unwrap();
    assert_eq!(est.dim, 3);
    assert_eq!(est.witness.len(), 4);
    assert!(!est.saturated);
}

#[test]
fn minkowski_fails_only_positivity() {
    let g = GeometrySpec::minkowski(4, 1.0).unwrap();
    let cands = random_points(20, 4, 3, &[0.0; 4], 1.0);
    let r = full_report(&g, &cands, &EuclideanConfig::default()).unwrap();
    assert!(!r.verdict);
    assert_eq!(r.failed_conditions(), vec!["III"], "{}", r.summary());
    assert!(r.condition_iii.unwrap().eigenvalues.iter().any(|v| *v < 0.0));
}

#[test]
fn deformed_linear_structure_is_off_by_d() {
    let d = 0.1;
    let g = GeometrySpec::deformed_minkowski(4, 1.0, d).unwrap();
    let origin = Point::new(vec![0.0; 4]);
    let mut spokes = vec![Point::from([30.0, 0.0, 0.0, 0.0])];
    for i in 1..4 {
        let mut p = vec![30.0, 0.0, 0.0, 0.0];
        p[i] = 7.5;
        spokes.push(Point::new(p));
    }
    let mt = build_metric_tensor(&g, &origin, &spokes, 1e-7).unwrap();
    let pts = random_points(12, 4, 9, &[15.0, 0.5, 0.5, 0.5], 0.3);
    // Each pair on its own: every σ_M with the basis is timelike, so the
    // residual is d up to the small perturbation of the inverse metric.
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let c = check_linear_structure(&g, &mt, &[(pts[i].clone(), pts[j].clone())], 1e-7).unwrap();
            assert!((c.worst_residual - d).abs() < 0.02 * d, "{}", c.worst_residual);
        }
    }
}

#[test]
fn covariant_coordinates_are_additive_in_euclidean_space() {
    let g = GeometrySpec::euclidean(3).unwrap();
    let basis = random_points(4, 3, 11, &[0.0; 3], 2.0);
    let pts = random_points(30, 3, 12, &[0.0; 3], 5.0);
    let o = &basis[0];
    let x = |p: &Point| covariant_coordinates(&g, o, &basis[1..], p).unwrap();
    for w in pts.windows(2) {
        let mid = Point::new(w[0].coords().iter().zip(w[1].coords()).map(|(a, b)| 0.5 * (a + b)).collect());
        let (a, b, m) = (x(&w[0]), x(&w[1]), x(&mid));
        for i in 0..3 {
            assert!((m[i] - 0.5 * (a[i] + b[i])).abs() <= 1e-9 * (1.0 + m[i].abs()));
        }
    }
}

#[test]
fn euclidean_continuity_targets_are_unique() {
    let g = GeometrySpec::euclidean(2).unwrap();
    let cands = random_points(10, 2, 4, &[0.0; 2], 1.0);
    let r = full_report(&g, &cands, &EuclideanConfig { continuity_samples: 8, ..Default::default() }).unwrap();
    let iv = r.condition_iv.unwrap();
    assert!(iv.outcomes.iter().all(|o| o.status == ContinuityStatus::Unique));
}
