//! WebAssembly bindings for the demo page in `www/`.
//!
//! Geometries cross the boundary as the engine's JSON wire form and results
//! come back as JSON strings, so the page needs no generated type glue.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use worldfn::{
    sample_object, solve_equivalence, EquivalenceOptions, GeometrySpec, ImplicitObject, Point, PointPairVector,
    Region, SamplingOptions,
};

/// Largest grid the page may request; keeps the tab responsive.
pub const NODE_BUDGET: u64 = 2_000_000;

fn geometry(spec: &str) -> Result<GeometrySpec, String> {
    GeometrySpec::from_json(spec).map_err(|e| e.to_string())
}

fn region(lo: &[f64], hi: &[f64]) -> Result<Region, String> {
    Region::new(lo.to_vec(), hi.to_vec()).map_err(|e| e.to_string())
}

fn coords(points: &[Point]) -> Vec<Value> {
    points.iter().map(|p| json!(p.coords())).collect()
}

/// σ(P,Q), 2σ and the interval class.
pub fn sigma_json(spec: &str, p: &[f64], q: &[f64]) -> Result<String, String> {
    let g = geometry(spec)?;
    let (p, q) = (Point::from(p), Point::from(q));
    let class = g.classify_interval(&p, &q).map_err(|e| e.to_string())?;
    let sigma = g.sigma(&p, &q).map_err(|e| e.to_string())?;
    Ok(json!({ "sigma": sigma, "two_sigma": class.two_sigma, "class": g.interval_label(&class) }).to_string())
}

/// Grid sample of the segment [start,end] inside the box `lo..hi`.
pub fn segment_json(
    spec: &str,
    start: &[f64],
    end: &[f64],
    lo: &[f64],
    hi: &[f64],
    resolution: f64,
    tol: f64,
) -> Result<String, String> {
    let g = geometry(spec)?;
    let seg = ImplicitObject::segment(&g, start, end).map_err(|e| e.to_string())?;
    let opts = SamplingOptions::new(resolution, tol).with_budget(NODE_BUDGET);
    let cloud = sample_object(&seg, &region(lo, hi)?, &opts).map_err(|e| e.to_string())?;
    let extent = cloud.max_distance_from_line(&Point::from(start), &Point::from(end));
    Ok(json!({
        "points": coords(&cloud.points),
        "transverse_extent": extent,
        "nodes_scanned": cloud.nodes_scanned,
    })
    .to_string())
}

/// End points Q1 for which Q0Q1 is equivalent to origin->end, searched in `lo..hi`.
#[allow(clippy::too_many_arguments)]
pub fn equivalence_json(
    spec: &str,
    origin: &[f64],
    end: &[f64],
    at: &[f64],
    lo: &[f64],
    hi: &[f64],
    resolution: f64,
    tol: f64,
) -> Result<String, String> {
    let g = geometry(spec)?;
    let v = PointPairVector::new(origin, end);
    let mut opts = EquivalenceOptions::new(resolution, tol);
    opts.node_budget = NODE_BUDGET;
    let set = solve_equivalence(&g, &v, &Point::from(at), &region(lo, hi)?, &opts).map_err(|e| e.to_string())?;
    let centers: Vec<Point> = set.clusters.iter().map(|c| c.center.clone()).collect();
    Ok(json!({
        "cardinality": set.cardinality_class.name(),
        "clusters": coords(&centers),
        "points": coords(&set.solutions.points),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn sigma(spec: &str, p: &[f64], q: &[f64]) -> Result<String, JsError> {
    sigma_json(spec, p, q).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn segment(
    spec: &str,
    start: &[f64],
    end: &[f64],
    lo: &[f64],
    hi: &[f64],
    resolution: f64,
    tol: f64,
) -> Result<String, JsError> {
    segment_json(spec, start, end, lo, hi, resolution, tol).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn equivalence(
    spec: &str,
    origin: &[f64],
    end: &[f64],
    at: &[f64],
    lo: &[f64],
    hi: &[f64],
    resolution: f64,
    tol: f64,
) -> Result<String, JsError> {
    equivalence_json(spec, origin, end, at, lo, hi, resolution, tol).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFORMED: &str = r#"{"kind":"deformed_minkowski","dim":2,"c":1,"d":0.1}"#;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn sigma_classifies() {
        let v = parse(&sigma_json(r#"{"kind":"minkowski","dim":2,"c":1}"#, &[0.0, 0.0], &[0.0, 1.0]).unwrap());
        assert_eq!(v["sigma"], json!(-0.5));
        assert_eq!(v["class"], json!("spacelike"));
        assert!(sigma_json("{}", &[0.0], &[1.0]).is_err());
    }

    #[test]
    fn deformed_segment_is_a_tube() {
        let v = parse(&segment_json(DEFORMED, &[0.0, 0.0], &[2.0, 0.0], &[-0.5, -1.0], &[2.5, 1.0], 0.01, 1e-3).unwrap());
        assert!(v["points"].as_array().unwrap().len() > 100);
        assert!(v["transverse_extent"].as_f64().unwrap() > 0.3);
    }

    #[test]
    fn deformed_translate_splits_in_two() {
        let v = parse(
            &equivalence_json(DEFORMED, &[0.0, 0.0], &[1.0, 0.0], &[3.0, 0.0], &[3.5, -1.0], &[5.0, 1.0], 0.01, 1e-4)
                .unwrap(),
        );
        assert_eq!(v["cardinality"], json!("FiniteMultiple"));
        assert_eq!(v["clusters"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn oversized_grid_is_refused() {
        assert!(segment_json(DEFORMED, &[0.0, 0.0], &[2.0, 0.0], &[-5.0, -5.0], &[5.0, 5.0], 1e-3, 1e-3).is_err());
    }
}
