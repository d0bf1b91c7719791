use proptest::prelude::*;
use worldfn::{
    gram_determinant, is_equivalent, is_linearly_dependent, scalar_product, GeometrySpec, GramMatrix, Point,
    PointPairVector,
};

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim)
}

fn dot(a: &PointPairVector, b: &PointPairVector) -> f64 {
    a.label_delta().iter().zip(b.label_delta()).map(|(x, y)| x * y).sum()
}

proptest! {
    #[test]
    fn euclidean_product_is_the_dot_product(a0 in coords(3), a1 in coords(3), b0 in coords(3), b1 in coords(3)) {
        let g = GeometrySpec::euclidean(3).unwrap();
        let a = PointPairVector::new(a0, a1);
        let b = PointPairVector::new(b0, b1);
        let s = scalar_product(&g, &a, &b).unwrap();
        let oracle = dot(&a, &b);
        let scale = a.two_sigma(&g).unwrap().sqrt() * b.two_sigma(&g).unwrap().sqrt();
        prop_assert!((s - oracle).abs() <= 1e-9 * (1.0 + scale));
    }

    #[test]
    fn product_with_itself_is_two_sigma_and_symmetric(a0 in coords(4), a1 in coords(4), b0 in coords(4), b1 in coords(4), d in 0.0f64..1.0) {
        let a = PointPairVector::new(a0, a1);
        let b = PointPairVector::new(b0, b1);
        for g in [
            GeometrySpec::euclidean(4).unwrap(),
            GeometrySpec::minkowski(4, 1.0).unwrap(),
            GeometrySpec::deformed_minkowski(4, 1.0, d).unwrap(),
        ] {
            let aa = scalar_product(&g, &a, &a).unwrap();
            let two = a.two_sigma(&g).unwrap();
            prop_assert!((aa - two).abs() <= 1e-12 * (1.0 + two.abs()));
            prop_assert_eq!(scalar_product(&g, &a, &b).unwrap(), scalar_product(&g, &b, &a).unwrap());
        }
    }

    #[test]
    fn n_plus_one_spokes_are_dependent(base in coords(3), spokes in prop::collection::vec(coords(3), 4)) {
        let g = GeometrySpec::euclidean(3).unwrap();
        let spokes: Vec<Point> = spokes.into_iter().map(Point::new).collect();
        prop_assert!(is_linearly_dependent(&g, &Point::new(base), &spokes, 1e-6).unwrap());
    }

    #[test]
    fn random_n_spokes_are_independent(base in coords(3), spokes in prop::collection::vec(coords(3), 3)) {
        let g = GeometrySpec::euclidean(3).unwrap();
        let base = Point::new(base);
        let spokes: Vec<Point> = spokes.into_iter().map(Point::new).collect();
        let m = GramMatrix::new(&g, &base, &spokes).unwrap();
        // Skip the probability-zero flat draws.
        prop_assume!(m.determinant().abs() > 1e-6 * m.scale());
        prop_assert!(!is_linearly_dependent(&g, &base, &spokes, 1e-9).unwrap());
    }

    #[test]
    fn euclidean_translates_are_equivalent_and_transitive(
        o in coords(3), d in coords(3), s1 in coords(3), s2 in coords(3)
    ) {
        prop_assume!(d.iter().map(|x| x * x).sum::<f64>() > 1e-6);
        let g = GeometrySpec::euclidean(3).unwrap();
        let shift = |v: &[f64], s: &[f64]| v.iter().zip(s).map(|(a, b)| a + b).collect::<Vec<_>>();
        let end = shift(&o, &d);
        let a = PointPairVector::new(o.clone(), end.clone());
        let b = PointPairVector::new(shift(&o, &s1), shift(&end, &s1));
        let c = PointPairVector::new(shift(&o, &s2), shift(&end, &s2));
        let tol = 1e-9;
        prop_assert!(is_equivalent(&g, &a, &b, tol).unwrap());
        prop_assert!(is_equivalent(&g, &b, &c, tol).unwrap());
        prop_assert!(is_equivalent(&g, &a, &c, tol).unwrap());
    }
}

#[test]
fn gram_three_collinear_points() {
    let g = GeometrySpec::euclidean(2).unwrap();
    let f = gram_determinant(&g, &[0.0, 0.0].into(), &[[1.0, 1.0].into(), [2.0, 2.0].into()]).unwrap();
    assert_eq!(f, 0.0);
}
