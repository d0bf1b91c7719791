//! Does a world function describe proper Euclidean geometry?
//!
//! Four conditions together decide it, all stated through σ:
//!
//! 1. there is a dimension n: some n+1 points span a nondegenerate Gram
//!    matrix and no n+2 points do;
//! 2. σ is the quadratic form of the inverse metric tensor applied to
//!    covariant coordinate differences;
//! 3. the metric tensor is positive definite;
//! 4. every admissible tuple of covariant coordinates belongs to exactly one point.
//!
//! Universal quantifiers are checked on seeded random samples, so a pass
//! means "no counterexample among N samples".

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::cluster_points;
use crate::error::{Error, Result};
use crate::grid::{self, Region, ScanOptions};
use crate::kernel::{GeometryKind, GeometrySpec, Point};
use crate::linalg::symmetric_eigen;
use crate::objects::check_region;
use crate::par;
use crate::vector::{common_origin_product, is_degenerate, GramMatrix, EUCLIDEAN_TOL, GENERAL_TOL};

pub const DEFAULT_MAX_DIM: usize = 10;
pub const DEFAULT_TUPLE_SAMPLES: usize = 200;

/// Largest n with a nondegenerate (n+1)-tuple and no nondegenerate sampled
/// (n+2)-tuple, together with its witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub dim: usize,
    /// P0, P1, ..., Pn with a nondegenerate Gram matrix.
    pub witness: Vec<Point>,
    /// Sampled (n+2)-tuples that were all degenerate.
    pub samples_checked: usize,
    /// The estimate hit the candidate count or the dimension cap, so it is a
    /// lower bound rather than a dimension.
    pub saturated: bool,
}

fn tuple_is_degenerate(geom: &GeometrySpec, pts: &[&Point], tol: f64) -> bool {
    let spokes: Vec<Point> = pts[1..].iter().map(|p| (*p).clone()).collect();
    match GramMatrix::new(geom, pts[0], &spokes) {
        Ok(g) => is_degenerate(&g, tol),
        Err(_) => true,
    }
}

/// Estimates the dimension of the point set `candidates`.
///
/// A basis is grown greedily from `candidates[0]` in list order. Then
/// `samples` random (n+2)-tuples are tested; a nondegenerate one raises
/// the estimate and becomes the new witness, and sampling restarts one
/// level up. Returns `None` when no pair of candidates is nondegenerate.
pub fn detect_dimension(
    geom: &GeometrySpec,
    candidates: &[Point],
    tol: f64,
    samples: usize,
    max_dim: usize,
    seed: u64,
) -> Result<Option<DimensionEstimate>> {
    for p in candidates {
        geom.check_point(p)?;
    }
    if candidates.len() < 2 {
        return Ok(None);
    }
    let mut witness: Vec<&Point> = vec![&candidates[0]];
    for c in &candidates[1..] {
        if witness.len() > max_dim {
            break;
        }
        witness.push(c);
        if tuple_is_degenerate(geom, &witness, tol) {
            witness.pop();
        }
    }
    if witness.len() < 2 {
        return Ok(None);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    loop {
        let n = witness.len() - 1;
        let k = n + 2;
        if n >= max_dim || k > candidates.len() {
            break;
        }
        checked = 0;
        let mut grown = None;
        for _ in 0..samples {
            let idx = sample(&mut rng, candidates.len(), k);
            let tuple: Vec<&Point> = idx.iter().map(|i| &candidates[i]).collect();
            checked += 1;
            if !tuple_is_degenerate(geom, &tuple, tol) {
                grown = Some(tuple);
                break;
            }
        }
        match grown {
            Some(t) => witness = t,
            None => break,
        }
    }
    let dim = witness.len() - 1;
    Ok(Some(DimensionEstimate {
        dim,
        saturated: dim >= max_dim || dim + 1 >= candidates.len(),
        witness: witness.into_iter().cloned().collect(),
        samples_checked: checked,
    }))
}

/// Covariant metric tensor g_ik = (P0Pi.P0Pk) of a basis, with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    pub origin: Point,
    pub spokes: Vec<Point>,
    pub g_lower: DMatrix<f64>,
    pub g_upper: DMatrix<f64>,
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
}

impl MetricTensor {
    pub fn dim(&self) -> usize {
        self.spokes.len()
    }
}

pub fn build_metric_tensor(geom: &GeometrySpec, origin: &Point, spokes: &[Point], tol: f64) -> Result<MetricTensor> {
    let gram = GramMatrix::new(geom, origin, spokes)?;
    if is_degenerate(&gram, tol) {
        return Err(Error::Singular { det: gram.determinant() });
    }
    let g_lower = gram.entries;
    let g_upper = g_lower
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { det: g_lower.determinant() })?;
    let eigenvalues = symmetric_eigen(&g_lower).values;
    Ok(MetricTensor {
        origin: origin.clone(),
        spokes: spokes.to_vec(),
        g_lower,
        g_upper,
        eigenvalues,
    })
}

/// x_i(P) = (P0Pi.P0P).
pub fn covariant_coordinates(geom: &GeometrySpec, origin: &Point, spokes: &[Point], p: &Point) -> Result<Vec<f64>> {
    geom.check_point(origin)?;
    geom.check_point(p)?;
    spokes
        .iter()
        .map(|s| {
            geom.check_point(s)?;
            Ok(common_origin_product(geom, origin.coords(), s.coords(), p.coords()).expect("validated"))
        })
        .collect()
}

fn covariant_at(geom: &GeometrySpec, mt: &MetricTensor, p: &[f64], out: &mut [f64]) -> Option<()> {
    for (o, s) in out.iter_mut().zip(&mt.spokes) {
        *o = common_origin_product(geom, mt.origin.coords(), s.coords(), p)?;
    }
    Some(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub passed: bool,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
}

/// Passes when every eigenvalue of the metric tensor exceeds `tol`.
pub fn check_positivity(mt: &MetricTensor, tol: f64) -> PositivityCheck {
    let min = mt.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    PositivityCheck {
        passed: !mt.eigenvalues.is_empty() && min > tol,
        eigenvalues: mt.eigenvalues.clone(),
        min_eigenvalue: min,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearStructureCheck {
    pub passed: bool,
    pub pairs_checked: usize,
    pub worst_residual: f64,
    pub worst_pair: Option<(Point, Point)>,
    /// Magnitude the residuals are compared against: 1 + the largest |σ|
    /// or quadratic-form term met.
    pub scale: f64,
    pub tol: f64,
}

/// Residual |σ(P,Q) − ½ g^{ik} Δx_i Δx_k| over the sample pairs.
pub fn check_linear_structure(
    geom: &GeometrySpec,
    mt: &MetricTensor,
    pairs: &[(Point, Point)],
    tol: f64,
) -> Result<LinearStructureCheck> {
    for (p, q) in pairs {
        geom.check_point(p)?;
        geom.check_point(q)?;
    }
    let n = mt.dim();
    let per_pair: Vec<(f64, f64)> = par::map_vec(pairs, |(p, q)| {
        let mut xp = vec![0.0; n];
        let mut xq = vec![0.0; n];
        covariant_at(geom, mt, p.coords(), &mut xp).expect("validated");
        covariant_at(geom, mt, q.coords(), &mut xq).expect("validated");
        let dx: Vec<f64> = xp.iter().zip(&xq).map(|(a, b)| a - b).collect();
        let mut form = 0.0;
        let mut magnitude: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                let t = mt.g_upper[(i, k)] * dx[i] * dx[k];
                form += t;
                magnitude += t.abs();
            }
        }
        let s = geom.sigma_at(p.coords(), q.coords()).expect("validated");
        ((s - 0.5 * form).abs(), s.abs().max(0.5 * magnitude))
    });
    let mut check = LinearStructureCheck {
        passed: true,
        pairs_checked: pairs.len(),
        worst_residual: 0.0,
        worst_pair: None,
        scale: 1.0,
        tol,
    };
    let mut biggest: f64 = 0.0;
    for (i, (r, m)) in per_pair.into_iter().enumerate() {
        biggest = biggest.max(m);
        if check.worst_pair.is_none() || r > check.worst_residual {
            check.worst_residual = r;
            check.worst_pair = Some(pairs[i].clone());
        }
    }
    check.scale = 1.0 + biggest;
    check.passed = check.worst_residual <= tol * check.scale;
    Ok(check)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuityStatus {
    Unique,
    NoSolution,
    MultipleSolutions,
    /// The scan would have exceeded the node budget.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityOutcome {
    pub y: Vec<f64>,
    pub status: ContinuityStatus,
    pub clusters: usize,
    /// One representative point per solution cluster.
    pub solutions: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCheck {
    pub passed: bool,
    pub outcomes: Vec<ContinuityOutcome>,
    pub zero_solution_witness: Option<Vec<f64>>,
    pub multi_solution_witness: Option<Vec<f64>>,
}

/// Whitening map M with MᵀM = |g|⁻¹, so that ‖M(x(P) − y)‖ behaves like a
/// distance in P for a positive basis and stays well scaled otherwise.
fn whitening(mt: &MetricTensor) -> DMatrix<f64> {
    let e = symmetric_eigen(&mt.g_lower);
    let n = mt.dim();
    DMatrix::from_fn(n, n, |r, c| e.vectors[(c, r)] / e.values[r].abs().max(f64::MIN_POSITIVE).sqrt())
}

/// For each target `y`, finds the points P in `region` whose covariant
/// coordinates equal `y` and counts them by clustering at three grid steps.
pub fn check_continuity(
    geom: &GeometrySpec,
    mt: &MetricTensor,
    y_samples: &[Vec<f64>],
    region: &Region,
    resolution: f64,
    tol: f64,
    node_budget: u64,
) -> Result<ContinuityCheck> {
    check_region(geom, region)?;
    let n = mt.dim();
    if let Some(bad) = y_samples.iter().find(|y| y.len() != n) {
        return Err(Error::ArityMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    let w = whitening(mt);
    let opts = ScanOptions {
        resolution,
        tol,
        node_budget,
        refine: true,
    };
    let mut check = ContinuityCheck {
        passed: true,
        outcomes: Vec::new(),
        zero_solution_witness: None,
        multi_solution_witness: None,
    };
    for y in y_samples {
        let residual = |p: &[f64]| {
            let mut x = vec![0.0; n];
            covariant_at(geom, mt, p, &mut x)?;
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            let mut norm2 = 0.0;
            for r in 0..n {
                let mut acc = 0.0;
                for c in 0..n {
                    acc += w[(r, c)] * d[c];
                }
                norm2 += acc * acc;
            }
            Some(norm2.sqrt())
        };
        let outcome = match grid::scan(region, &opts, geom.is_discrete(), residual) {
            Err(Error::BudgetExceeded { .. }) => ContinuityOutcome {
                y: y.clone(),
                status: ContinuityStatus::Inconclusive,
                clusters: 0,
                solutions: Vec::new(),
            },
            Err(e) => return Err(e),
            Ok(out) => {
                let points: Vec<Point> = out.points.into_iter().map(Point::new).collect();
                let clusters = cluster_points(&points, 3.0 * resolution);
                let status = match clusters.len() {
                    0 => ContinuityStatus::NoSolution,
                    1 => ContinuityStatus::Unique,
                    _ => ContinuityStatus::MultipleSolutions,
                };
                ContinuityOutcome {
                    y: y.clone(),
                    status,
                    clusters: clusters.len(),
                    solutions: clusters.into_iter().map(|c| c.center).collect(),
                }
            }
        };
        match outcome.status {
            ContinuityStatus::Unique => {}
            ContinuityStatus::NoSolution => {
                check.passed = false;
                check.zero_solution_witness.get_or_insert_with(|| y.clone());
            }
            ContinuityStatus::MultipleSolutions => {
                check.passed = false;
                check.multi_solution_witness.get_or_insert_with(|| y.clone());
            }
            ContinuityStatus::Inconclusive => check.passed = false,
        }
        check.outcomes.push(outcome);
    }
    Ok(check)
}

/// Settings for [`full_report`]. `None` fields are derived from the input.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanConfig {
    pub seed: u64,
    /// Gram degeneracy tolerance; defaults by kernel kind.
    pub tol: Option<f64>,
    pub tuple_samples: usize,
    pub max_dim: usize,
    /// Pairs used for the linear-structure check.
    pub pair_samples: usize,
    /// Coordinate targets for the continuity check.
    pub continuity_samples: usize,
    /// Continuity search box; defaults to the candidates' bounding box grown by 10%.
    pub region: Option<Region>,
    /// Continuity grid step; defaults to 1/20 of the widest region side.
    pub resolution: Option<f64>,
    pub node_budget: u64,
}

impl Default for EuclideanConfig {
    fn default() -> Self {
        EuclideanConfig {
            seed: 0,
            tol: None,
            tuple_samples: DEFAULT_TUPLE_SAMPLES,
            max_dim: DEFAULT_MAX_DIM,
            pair_samples: 200,
            continuity_samples: 4,
            region: None,
            resolution: None,
            node_budget: grid::DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionCheck {
    pub passed: bool,
    pub estimate: Option<DimensionEstimate>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EuclideanessReport {
    pub geometry: GeometrySpec,
    pub seed: u64,
    pub tol: f64,
    pub detected_dim: Option<usize>,
    /// Dimension at which conditions II to IV were evaluated.
    pub evaluated_dim: usize,
    /// The basis P0..Pn used for II to IV.
    pub basis: Vec<Point>,
    pub condition_i: DimensionCheck,
    pub condition_ii: Option<LinearStructureCheck>,
    pub condition_iii: Option<PositivityCheck>,
    pub condition_iv: Option<ContinuityCheck>,
    /// Set when II to IV could not run, e.g. on a singular basis.
    pub failure: Option<String>,
    pub verdict: bool,
}

impl EuclideanessReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Names of the conditions that failed, in order.
    pub fn failed_conditions(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.condition_i.passed {
            out.push("I");
        }
        if !self.condition_ii.as_ref().is_some_and(|c| c.passed) {
            out.push("II");
        }
        if !self.condition_iii.as_ref().is_some_and(|c| c.passed) {
            out.push("III");
        }
        if !self.condition_iv.as_ref().is_some_and(|c| c.passed) {
            out.push("IV");
        }
        out
    }

    pub fn summary(&self) -> String {
        let g = crate::fmt::sig9;
        let mut s = String::new();
        let verdict = if self.verdict { "euclidean" } else { "not-euclidean" };
        s.push_str(&format!(
            "verdict={verdict} detected_dim={} evaluated_dim={}\n",
            self.detected_dim.map_or("none".to_string(), |d| d.to_string()),
            self.evaluated_dim
        ));
        let mark = |b: bool| if b { "pass" } else { "fail" };
        s.push_str(&format!("condition I: {} ({})\n", mark(self.condition_i.passed), self.condition_i.note));
        match &self.condition_ii {
            Some(c) => s.push_str(&format!(
                "condition II: {} worst_residual={} scale={} pairs={}\n",
                mark(c.passed),
                g(c.worst_residual),
                g(c.scale),
                c.pairs_checked
            )),
            None => s.push_str("condition II: not run\n"),
        }
        match &self.condition_iii {
            Some(c) => s.push_str(&format!(
                "condition III: {} eigenvalues=[{}]\n",
                mark(c.passed),
                c.eigenvalues.iter().map(|v| g(*v)).collect::<Vec<_>>().join(",")
            )),
            None => s.push_str("condition III: not run\n"),
        }
        match &self.condition_iv {
            Some(c) => {
                let unique = c.outcomes.iter().filter(|o| o.status == ContinuityStatus::Unique).count();
                s.push_str(&format!(
                    "condition IV: {} unique={}/{}\n",
                    mark(c.passed),
                    unique,
                    c.outcomes.len()
                ));
            }
            None => s.push_str("condition IV: not run\n"),
        }
        if let Some(f) = &self.failure {
            s.push_str(&format!("note: {f}\n"));
        }
        s
    }
}

fn default_tol(geom: &GeometrySpec) -> f64 {
    if geom.kind() == GeometryKind::Euclidean {
        EUCLIDEAN_TOL
    } else {
        GENERAL_TOL
    }
}

fn bounding_region(points: &[Point]) -> Result<Region> {
    let dim = points[0].dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for (a, x) in p.coords().iter().enumerate() {
            lo[a] = lo[a].min(*x);
            hi[a] = hi[a].max(*x);
        }
    }
    for a in 0..dim {
        let pad = 0.1 * (hi[a] - lo[a]).max(1e-3);
        lo[a] -= pad;
        hi[a] += pad;
    }
    Region::new(lo, hi)
}

/// Runs conditions I to IV in order.
///
/// II to IV use the witness basis of condition I. When condition I fails,
/// they are still evaluated, at the label arity of the geometry with the
/// first n+1 candidates as basis, so that the report can say which other
/// conditions break.
pub fn full_report(geom: &GeometrySpec, candidates: &[Point], config: &EuclideanConfig) -> Result<EuclideanessReport> {
    let tol = config.tol.unwrap_or_else(|| default_tol(geom));
    let estimate = detect_dimension(geom, candidates, tol, config.tuple_samples, config.max_dim, config.seed)?;

    let (passed_i, note) = match &estimate {
        None => (false, "no nondegenerate pair among the candidates".to_string()),
        Some(e) if e.saturated => (
            false,
            format!("dimension not bounded: nondegenerate {}-tuples up to the sampling limit", e.dim + 1),
        ),
        Some(e) => (true, format!("dim {} on {} sampled {}-tuples", e.dim, e.samples_checked, e.dim + 2)),
    };
    let mut report = EuclideanessReport {
        geometry: geom.clone(),
        seed: config.seed,
        tol,
        detected_dim: estimate.as_ref().filter(|_| passed_i).map(|e| e.dim),
        evaluated_dim: 0,
        basis: Vec::new(),
        condition_i: DimensionCheck {
            passed: passed_i,
            estimate: estimate.clone(),
            note,
        },
        condition_ii: None,
        condition_iii: None,
        condition_iv: None,
        failure: None,
        verdict: false,
    };

    let basis: Vec<Point> = match (&estimate, passed_i) {
        (Some(e), true) => e.witness.clone(),
        _ => {
            let n = geom.dim().min(candidates.len().saturating_sub(1));
            candidates[..(n + 1).min(candidates.len())].to_vec()
        }
    };
    if basis.len() < 2 {
        report.failure = Some("not enough candidates to form a basis".into());
        return Ok(report);
    }
    report.evaluated_dim = basis.len() - 1;
    report.basis = basis.clone();

    let mt = match build_metric_tensor(geom, &basis[0], &basis[1..], tol) {
        Ok(mt) => mt,
        Err(Error::Singular { det }) => {
            report.failure = Some(format!("basis is degenerate (det {det:e})"));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let m = candidates.len();
    let pairs: Vec<(Point, Point)> = if m * (m - 1) / 2 <= config.pair_samples {
        let mut v = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                v.push((candidates[i].clone(), candidates[j].clone()));
            }
        }
        v
    } else {
        (0..config.pair_samples)
            .map(|_| {
                let idx = sample(&mut rng, m, 2);
                (candidates[idx.index(0)].clone(), candidates[idx.index(1)].clone())
            })
            .collect()
    };
    report.condition_ii = Some(check_linear_structure(geom, &mt, &pairs, tol)?);
    report.condition_iii = Some(check_positivity(&mt, tol));

    let region = match &config.region {
        Some(r) => r.clone(),
        None => bounding_region(candidates)?,
    };
    let resolution = config.resolution.unwrap_or_else(|| {
        let widest = region.half_widths().into_iter().fold(0.0, f64::max) * 2.0;
        if geom.is_discrete() {
            1.0
        } else {
            widest / 20.0
        }
    });
    // Targets: covariant coordinates of interior points of the region,
    // nudged so they are not tied to grid nodes.
    let center = region.center();
    let half = region.half_widths();
    let mut ys = Vec::with_capacity(config.continuity_samples);
    for _ in 0..config.continuity_samples {
        let p: Vec<f64> = if geom.is_discrete() {
            let len = geom.table_len().unwrap_or(1);
            vec![rng.random_range(0..len) as f64]
        } else {
            center
                .iter()
                .zip(&half)
                .map(|(c, h)| c + 0.5 * h * rng.random_range(-1.0..1.0))
                .collect()
        };
        let mut x = covariant_coordinates(geom, &mt.origin, &mt.spokes, &Point::new(p))?;
        if !geom.is_discrete() {
            for xi in &mut x {
                *xi += 1e-3 * resolution * rng.random_range(-1.0..1.0);
            }
        }
        ys.push(x);
    }
    let iv_tol = if geom.is_discrete() { tol } else { 0.1 * resolution };
    report.condition_iv = Some(check_continuity(
        geom,
        &mt,
        &ys,
        &region,
        resolution,
        iv_tol,
        config.node_budget,
    )?);

    report.verdict = passed_i
        && report.condition_ii.as_ref().is_some_and(|c| c.passed)
        && report.condition_iii.as_ref().is_some_and(|c| c.passed)
        && report.condition_iv.as_ref().is_some_and(|c| c.passed);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> Vec<Point> {
        v.iter().map(|p| Point::from(*p)).collect()
    }

    #[test]
    fn metric_tensor_examples() {
        let e2 = GeometrySpec::euclidean(2).unwrap();
        let o = Point::from([0.0, 0.0]);
        let mt = build_metric_tensor(&e2, &o, &pts(&[&[1.0, 0.0], &[0.0, 1.0]]), 1e-9).unwrap();
        assert_eq!(mt.g_lower, DMatrix::identity(2, 2));
        assert_eq!(mt.eigenvalues, vec![1.0, 1.0]);
        assert!(check_positivity(&mt, 1e-9).passed);

        let skew = pts(&[&[1.0, 0.0], &[1.0, 1.0]]);
        let mt = build_metric_tensor(&e2, &o, &skew, 1e-9).unwrap();
        assert_eq!(mt.g_lower, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]));
        assert!(((&mt.g_upper * &mt.g_lower) - DMatrix::identity(2, 2)).norm() < 1e-12);

        let m = GeometrySpec::minkowski(4, 1.0).unwrap();
        let unit: Vec<Point> = (0..4)
            .map(|i| {
                let mut c = vec![0.0; 4];
                c[i] = 1.0;
                Point::new(c)
            })
            .collect();
        let mt = build_metric_tensor(&m, &Point::new(vec![0.0; 4]), &unit, 1e-9).unwrap();
        assert_eq!(mt.g_lower, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, -1.0, -1.0])));
        assert_eq!(mt.eigenvalues, vec![1.0, -1.0, -1.0, -1.0]);
        let pos = check_positivity(&mt, 1e-9);
        assert!(!pos.passed);
        assert_eq!(pos.min_eigenvalue, -1.0);
    }

    #[test]
    fn singular_basis_is_rejected() {
        let e2 = GeometrySpec::euclidean(2).unwrap();
        let o = Point::from([0.0, 0.0]);
        let err = build_metric_tensor(&e2, &o, &pts(&[&[1.0, 0.0], &[2.0, 0.0]]), 1e-9);
        assert!(matches!(err, Err(Error::Singular { .. })));
    }

    #[test]
    fn covariant_examples() {
        let e2 = GeometrySpec::euclidean(2).unwrap();
        let o = Point::from([0.0, 0.0]);
        let axes = pts(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(covariant_coordinates(&e2, &o, &axes, &[3.0, 4.0].into()).unwrap(), vec![3.0, 4.0]);
        assert_eq!(covariant_coordinates(&e2, &o, &axes, &o).unwrap(), vec![0.0, 0.0]);
        let skew = pts(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert_eq!(covariant_coordinates(&e2, &o, &skew, &[1.0, 0.0].into()).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn dimension_examples() {
        let e2 = GeometrySpec::euclidean(2).unwrap();
        let line = pts(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]]);
        assert_eq!(detect_dimension(&e2, &line, 1e-9, 200, 10, 1).unwrap().unwrap().dim, 1);

        let t = GeometrySpec::tabulated(vec![vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
        let two = vec![Point::index(0), Point::index(1)];
        assert_eq!(detect_dimension(&t, &two, 1e-9, 200, 10, 1).unwrap().unwrap().dim, 1);

        let same = pts(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(detect_dimension(&e2, &same, 1e-9, 200, 10, 1).unwrap(), None);
    }

    #[test]
    fn tabulated_range_gap_gives_zero_solution_witness() {
        // Three points on a line at 0, 1, 3.
        let xs = [0.0f64, 1.0, 3.0];
        let table: Vec<Vec<f64>> = xs.iter().map(|a| xs.iter().map(|b| 0.5 * (a - b).powi(2)).collect()).collect();
        let t = GeometrySpec::tabulated(table).unwrap();
        let mt = build_metric_tensor(&t, &Point::index(0), &[Point::index(1)], 1e-9).unwrap();
        let region = Region::new(vec![0.0], vec![2.0]).unwrap();
        let c = check_continuity(&t, &mt, &[vec![1.0], vec![2.0]], &region, 1.0, 1e-9, 1000).unwrap();
        assert_eq!(c.outcomes[0].status, ContinuityStatus::Unique);
        assert_eq!(c.outcomes[1].status, ContinuityStatus::NoSolution);
        assert_eq!(c.zero_solution_witness, Some(vec![2.0]));
        assert!(!c.passed);
    }
}
