use proptest::prelude::*;
use worldfn::{
    hausdorff_distance, sample_object, section_of_segment, GeometrySpec, ImplicitObject, Point, PointCloud, Region,
    SamplingOptions,
};

fn reassert(obj: &ImplicitObject, cloud: &PointCloud) {
    for p in &cloud.points {
        assert!(obj.predicate_residual(p).unwrap().abs() <= cloud.tol, "{p}");
    }
}

#[test]
fn sampled_points_satisfy_their_predicate() {
    let e3 = GeometrySpec::euclidean(3).unwrap();
    let region = Region::cube(&[0.0, 0.0, 0.0], 1.6).unwrap();
    let opts = SamplingOptions::new(0.05, 1e-3);
    for obj in [
        ImplicitObject::sphere(&e3, [0.0, 0.0, 0.0], [1.0, 0.5, 0.0]).unwrap(),
        ImplicitObject::ellipsoid(&e3, [-0.5, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap(),
        ImplicitObject::cylinder(&e3, [0.0, 0.7, 0.0], [-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]).unwrap(),
    ] {
        let cloud = sample_object(&obj, &region, &opts).unwrap();
        assert!(cloud.len() > 100, "{:?} gave {}", obj.kind(), cloud.len());
        reassert(&obj, &cloud);
    }
    let d = GeometrySpec::deformed_minkowski(2, 1.0, 0.1).unwrap();
    let seg = ImplicitObject::segment(&d, [0.0, 0.0], [2.0, 0.0]).unwrap();
    let cloud = sample_object(&seg, &Region::cube(&[1.0, 0.0], 1.0).unwrap(), &SamplingOptions::new(0.01, 1e-4)).unwrap();
    reassert(&seg, &cloud);
    assert!(cloud.inapplicable > 0);
}

#[test]
fn deformed_tube_keeps_its_width() {
    let d = GeometrySpec::deformed_minkowski(2, 1.0, 0.1).unwrap();
    let seg = ImplicitObject::segment(&d, [0.0, 0.0], [2.0, 0.0]).unwrap();
    let region = Region::around(&[1.0, 0.0], &[1.0, 0.6]).unwrap();
    let widths: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&tol| {
            let c = sample_object(&seg, &region, &SamplingOptions::new(0.005, tol)).unwrap();
            c.max_distance_from_line(&[0.0, 0.0].into(), &[2.0, 0.0].into())
        })
        .collect();
    // The midpoint radius of the tube is √(1.5 d).
    let r0 = 0.15f64.sqrt();
    for w in widths {
        assert!(w >= r0 - 0.01, "{w}");
    }
}

#[test]
fn ellipsoid_degenerates_to_segment_on_a_grid() {
    let g = GeometrySpec::deformed_minkowski(3, 1.0, 0.2).unwrap();
    let (f1, f2) = ([0.0, 0.0, 0.0], [4.0, 1.0, -0.5]);
    let seg = ImplicitObject::segment(&g, f1, f2).unwrap();
    let ell = ImplicitObject::ellipsoid(&g, f1, f2, f2).unwrap();
    for i in 0..30 {
        for j in 0..30 {
            for k in 0..30 {
                let r = Point::new(vec![-1.0 + 0.2 * i as f64, -3.0 + 0.2 * j as f64, -3.0 + 0.2 * k as f64]);
                match (seg.predicate_residual(&r), ell.predicate_residual(&r)) {
                    (Ok(a), Ok(b)) => assert!((a - b).abs() <= 1e-12),
                    (Err(_), Err(_)) => {}
                    other => panic!("applicability differs at {r}: {other:?}"),
                }
            }
        }
    }
}

#[test]
fn tube_section_thickens_with_deformation() {
    let r = |d: f64| (1.5 * d).sqrt();
    let mut last = 0.0;
    for d in [0.01, 0.1, 0.5] {
        let g = GeometrySpec::deformed_minkowski(2, 1.0, d).unwrap();
        let region = Region::around(&[1.0, 0.0], &[0.3, r(d) + 0.2]).unwrap();
        let s = section_of_segment(
            &g,
            &[0.0, 0.0].into(),
            &[2.0, 0.0].into(),
            &[1.0, r(d)].into(),
            &region,
            &SamplingOptions::new(0.002, 1e-4),
        )
        .unwrap();
        assert!(s.diameter >= last, "d={d}: {} < {last}", s.diameter);
        assert!((s.diameter - 2.0 * r(d)).abs() < 0.02, "d={d}: {}", s.diameter);
        last = s.diameter;
    }
}

#[test]
fn euclidean_cylinder_depends_only_on_the_axis() {
    let g = GeometrySpec::euclidean(2).unwrap();
    let region = Region::new(vec![-1.0, -1.0], vec![5.0, 1.0]).unwrap();
    let opts = SamplingOptions::new(0.02, 1e-4);
    let p = [2.0, 0.5];
    let c1 = sample_object(&ImplicitObject::cylinder(&g, p, [0.0, 0.0], [4.0, 0.0]).unwrap(), &region, &opts).unwrap();
    let c2 = sample_object(&ImplicitObject::cylinder(&g, p, [0.0, 0.0], [1.5, 0.0]).unwrap(), &region, &opts).unwrap();
    assert!(hausdorff_distance(&c1, &c2).unwrap() <= 2.0 * opts.resolution);
}

#[test]
fn cloud_json_round_trip_is_bit_exact() {
    let g = GeometrySpec::euclidean(2).unwrap();
    let s = ImplicitObject::sphere(&g, [0.1, -0.3], [1.0, 0.7]).unwrap();
    let cloud = sample_object(&s, &Region::cube(&[0.0, 0.0], 2.0).unwrap(), &SamplingOptions::new(0.05, 1e-4)).unwrap();
    let back = PointCloud::from_json(&cloud.to_json()).unwrap();
    assert_eq!(back, cloud);
    for (a, b) in back.points.iter().zip(&cloud.points) {
        for (x, y) in a.coords().iter().zip(b.coords()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn defining_points_have_zero_residual(
        o in prop::collection::vec(-5.0f64..5.0, 3),
        p in prop::collection::vec(-5.0f64..5.0, 3),
        f in prop::collection::vec(-5.0f64..5.0, 3),
    ) {
        let g = GeometrySpec::euclidean(3).unwrap();
        let (o, p, f) = (Point::new(o), Point::new(p), Point::new(f));
        prop_assume!(o != f);
        let sphere = ImplicitObject::sphere(&g, o.clone(), p.clone()).unwrap();
        prop_assert_eq!(sphere.predicate_residual(&p).unwrap(), 0.0);
        let ell = ImplicitObject::ellipsoid(&g, o.clone(), f.clone(), p.clone()).unwrap();
        prop_assert_eq!(ell.predicate_residual(&p).unwrap(), 0.0);
        let seg = ImplicitObject::segment(&g, o.clone(), f.clone()).unwrap();
        prop_assert_eq!(seg.predicate_residual(&o).unwrap(), 0.0);
        prop_assert_eq!(seg.predicate_residual(&f).unwrap(), 0.0);
        if let Ok(cyl) = ImplicitObject::cylinder(&g, p.clone(), o.clone(), f.clone()) {
            prop_assert_eq!(cyl.predicate_residual(&p).unwrap(), 0.0);
        }
    }

    #[test]
    fn euclidean_section_shrinks_with_tolerance(x in 0.3f64..1.7) {
        let g = GeometrySpec::euclidean(2).unwrap();
        let region = Region::cube(&[x, 0.0], 0.4).unwrap();
        let diam = |tol: f64| {
            section_of_segment(&g, &[0.0, 0.0].into(), &[2.0, 0.0].into(), &[x, 0.0].into(), &region, &SamplingOptions::new(0.004, tol))
                .unwrap()
                .diameter
        };
        let (a, b) = (diam(1e-2), diam(1e-4));
        prop_assert!(b < a, "{} !< {}", b, a);
        prop_assert!(b < 0.1);
    }
}
