//! Solving the equivalence equations at a new origin, and what the shape of
//! the solution set says about the geometry.
//!
//! In a single-variant geometry a vector has exactly one equivalent vector
//! at every origin. Otherwise the solutions spread out, and equivalence
//! stops being transitive.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::cluster::{cluster_points, is_single_compact, Cluster};
use crate::error::{Error, Result};
use crate::grid::{self, Region, ScanOptions};
use crate::kernel::{GeometrySpec, Point};
use crate::objects::check_region;
use crate::vector::{equivalence_residual_raw, equivalence_scale, is_equivalent, PointPairVector};

/// Cluster linkage radius in grid steps.
pub const CLUSTER_RADIUS_STEPS: f64 = 3.0;
/// Growth exponent at or above which a non-compact set counts as a continuum.
pub const CONTINUUM_EXPONENT: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CardinalityClass {
    /// Nothing passed the tolerance inside the region.
    Empty,
    Unique,
    FiniteMultiple,
    Continuum,
}

impl CardinalityClass {
    pub fn name(self) -> &'static str {
        match self {
            CardinalityClass::Empty => "Empty",
            CardinalityClass::Unique => "Unique",
            CardinalityClass::FiniteMultiple => "FiniteMultiple",
            CardinalityClass::Continuum => "Continuum",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceOptions {
    pub resolution: f64,
    pub tol: f64,
    pub node_budget: u64,
    /// Evaluate the scalar product as (Q0Q1.P0P1), grouped differently,
    /// and the two equations in reverse order. The solution set must not
    /// depend on it beyond rounding.
    pub swap_order: bool,
}

impl EquivalenceOptions {
    pub fn new(resolution: f64, tol: f64) -> Self {
        EquivalenceOptions {
            resolution,
            tol,
            node_budget: grid::DEFAULT_NODE_BUDGET,
            swap_order: false,
        }
    }

    fn scan(&self, resolution: f64) -> ScanOptions {
        ScanOptions {
            resolution,
            tol: self.tol,
            node_budget: self.node_budget,
            refine: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSolutionSet {
    pub reference: PointPairVector,
    pub target_origin: Point,
    /// End points Q1 with Q0Q1 equivalent to the reference.
    pub solutions: PointCloud,
    pub cardinality_class: CardinalityClass,
    pub cluster_count: usize,
    pub clusters: Vec<Cluster>,
    pub cluster_radius: f64,
    /// Accepted points at half the resolution, when that scan was needed.
    pub refined_count: Option<usize>,
    /// log2 of the accepted-point growth under resolution halving.
    pub growth_exponent: Option<f64>,
    pub diagnostic: Option<String>,
}

impl EquivalenceSolutionSet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution set serializes")
    }
}

/// Q0 shifted by the label difference of `v`: where a translation would put
/// the end point. Used only here to centre default search boxes.
pub fn translation_guess(v: &PointPairVector, q0: &Point) -> Point {
    Point::new(q0.coords().iter().zip(v.label_delta()).map(|(q, d)| q + d).collect())
}

/// Box of half-width 3|v| around the translation guess (half-width 3 for
/// null vectors). A heuristic; any region can be passed instead.
pub fn default_search_region(geom: &GeometrySpec, v: &PointPairVector, q0: &Point) -> Result<Region> {
    geom.check_point(q0)?;
    let len = v.two_sigma(geom)?.abs().sqrt();
    let half = 3.0 * if len > 0.0 { len } else { 1.0 };
    Region::cube(translation_guess(v, q0).coords(), half)
}

struct Equations<'a> {
    geom: &'a GeometrySpec,
    p0: &'a [f64],
    p1: &'a [f64],
    q0: &'a [f64],
    two_a: f64,
    swap: bool,
}

impl<'a> Equations<'a> {
    fn new(geom: &'a GeometrySpec, v: &'a PointPairVector, q0: &'a Point, swap: bool) -> Result<Self> {
        geom.check_point(q0)?;
        Ok(Equations {
            geom,
            p0: v.origin.coords(),
            p1: v.end.coords(),
            q0: q0.coords(),
            two_a: v.two_sigma(geom)?,
            swap,
        })
    }

    /// Signed squared length of Q0Q1 and the scalar product with the reference.
    #[inline]
    fn terms(&self, q1: &[f64]) -> Option<(f64, f64)> {
        let s = |a: &[f64], b: &[f64]| self.geom.sigma_at(a, b);
        let two_b = 2.0 * s(self.q0, q1)?;
        let dot = if self.swap {
            (s(self.q0, self.p1)? - s(self.q0, self.p0)?) + (s(q1, self.p0)? - s(q1, self.p1)?)
        } else {
            (s(self.p0, q1)? + s(self.p1, self.q0)?) - (s(self.p0, self.q0)? + s(self.p1, q1)?)
        };
        Some((two_b, dot))
    }

    #[inline]
    fn residual(&self, q1: &[f64]) -> Option<f64> {
        let (two_b, dot) = self.terms(q1)?;
        if self.swap {
            equivalence_residual_raw(two_b, self.two_a, dot)
        } else {
            equivalence_residual_raw(self.two_a, two_b, dot)
        }
    }

    /// The two signed equation errors, whose common zeros are the solutions.
    #[inline]
    fn equations(&self, q1: &[f64], out: &mut [f64]) -> Option<()> {
        let (two_b, dot) = self.terms(q1)?;
        let (ta, tb) = (self.two_a, two_b);
        if ta * tb < 0.0 {
            return None;
        }
        let product = (ta * tb).sqrt();
        let expected = if ta < 0.0 || tb < 0.0 { -product } else { product };
        out[0] = dot - expected;
        out[1] = ta.abs().sqrt() - tb.abs().sqrt();
        Some(())
    }

    fn scan(&self, region: &Region, opts: &ScanOptions) -> Result<PointCloud> {
        let system = grid::System {
            m: 2,
            eval: &|x: &[f64], out: &mut [f64]| self.equations(x, out),
        };
        let out = grid::scan_system(region, opts, self.geom.is_discrete(), &|x: &[f64]| self.residual(x), &system)?;
        Ok(PointCloud::from_scan(region, opts.resolution, opts.tol, out))
    }
}

/// Residual of the equivalence equations for the candidate end point `q1`,
/// `None` where the pair is mixed timelike/spacelike.
pub fn equivalence_equations_residual(
    geom: &GeometrySpec,
    v: &PointPairVector,
    q0: &Point,
    q1: &Point,
) -> Result<Option<f64>> {
    geom.check_point(q1)?;
    Ok(Equations::new(geom, v, q0, false)?.residual(q1.coords()))
}

/// Finds every Q1 in `region` with Q0Q1 equivalent to `v` and classifies
/// the solution set.
///
/// A single cluster no wider than the cluster radius is `Unique`. Anything
/// else is rescanned at half the resolution: an accepted-point growth
/// exponent of at least [`CONTINUUM_EXPONENT`] means `Continuum`, a stable
/// cluster count means `FiniteMultiple`.
pub fn solve_equivalence(
    geom: &GeometrySpec,
    v: &PointPairVector,
    q0: &Point,
    region: &Region,
    opts: &EquivalenceOptions,
) -> Result<EquivalenceSolutionSet> {
    geom.check_point(&v.origin)?;
    geom.check_point(&v.end)?;
    check_region(geom, region)?;
    let eq = Equations::new(geom, v, q0, opts.swap_order)?;
    let radius = CLUSTER_RADIUS_STEPS * opts.resolution;

    let mut set = EquivalenceSolutionSet {
        reference: v.clone(),
        target_origin: q0.clone(),
        solutions: PointCloud::from_scan(region, opts.resolution, opts.tol, Default::default()),
        cardinality_class: CardinalityClass::Empty,
        cluster_count: 0,
        clusters: Vec::new(),
        cluster_radius: radius,
        refined_count: None,
        growth_exponent: None,
        diagnostic: None,
    };

    if v.is_zero() {
        // Only the zero vector is equivalent to the zero vector.
        set.solutions.points = vec![q0.clone()];
        set.solutions.residuals = vec![0.0];
        set.cardinality_class = CardinalityClass::Unique;
        set.cluster_count = 1;
        set.clusters = cluster_points(&set.solutions.points, radius);
        set.diagnostic = Some("zero reference vector".into());
        return Ok(set);
    }

    let coarse = eq.scan(region, &opts.scan(opts.resolution))?;
    set.clusters = cluster_points(&coarse.points, radius);
    set.cluster_count = set.clusters.len();
    let n_coarse = coarse.len();
    set.solutions = coarse;

    if n_coarse == 0 {
        set.diagnostic = Some("no solution inside the region at this tolerance".into());
        return Ok(set);
    }
    if is_single_compact(&set.solutions.points, radius) {
        set.cardinality_class = CardinalityClass::Unique;
        return Ok(set);
    }

    let fine_opts = opts.scan(0.5 * opts.resolution);
    let fine = eq.scan(region, &fine_opts)?;
    let fine_clusters = cluster_points(&fine.points, CLUSTER_RADIUS_STEPS * fine_opts.resolution).len();
    let k = (fine.len().max(1) as f64 / n_coarse as f64).log2();
    set.refined_count = Some(fine.len());
    set.growth_exponent = Some(k);
    set.cardinality_class = if k >= CONTINUUM_EXPONENT {
        CardinalityClass::Continuum
    } else if fine_clusters == set.cluster_count {
        CardinalityClass::FiniteMultiple
    } else {
        set.diagnostic = Some(format!(
            "cluster count changed from {} to {fine_clusters} under refinement",
            set.cluster_count
        ));
        CardinalityClass::Continuum
    };
    Ok(set)
}

/// a eqv b and b eqv c, but not a eqv c.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntransitivityWitness {
    pub a: PointPairVector,
    pub b: PointPairVector,
    pub c: PointPairVector,
    pub residual_ab: f64,
    pub residual_bc: f64,
    /// Residual of the failing pair; `None` if a and c are timelike/spacelike mixed.
    pub residual_ac: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessOptions {
    pub resolution: f64,
    pub tol: f64,
    /// Total predicate evaluations allowed across all scans.
    pub evaluation_budget: u64,
    /// Required factor by which the a-to-c residual must exceed the tolerance.
    pub margin: f64,
}

impl WitnessOptions {
    pub fn new(resolution: f64, tol: f64, evaluation_budget: u64) -> Self {
        WitnessOptions {
            resolution,
            tol,
            evaluation_budget,
            margin: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSearch {
    pub witness: Option<IntransitivityWitness>,
    pub evaluations: u64,
    pub candidates_tried: usize,
    /// Set when the budget ran out before all candidates were tried.
    pub budget_exhausted: bool,
}

/// Searches for a = `v`, b at `q0` and c at `r0` breaking transitivity.
///
/// Candidates b come from the solution set of `a` at `q0` inside `region`,
/// farthest from the translation guess first. For each b, the vectors
/// equivalent to it are solved at `r0` in `region` shifted by `r0 − q0`,
/// and the c least equivalent to a is tested. "None found" only means the
/// budget or the candidates ran out.
pub fn find_intransitivity_witness(
    geom: &GeometrySpec,
    v: &PointPairVector,
    q0: &Point,
    r0: &Point,
    region: &Region,
    opts: &WitnessOptions,
) -> Result<WitnessSearch> {
    geom.check_point(r0)?;
    check_region(geom, region)?;
    let mut search = WitnessSearch {
        witness: None,
        evaluations: 0,
        candidates_tried: 0,
        budget_exhausted: false,
    };
    if v.is_zero() {
        return Ok(search);
    }
    let scan_opts = ScanOptions {
        resolution: opts.resolution,
        tol: opts.tol,
        node_budget: grid::DEFAULT_NODE_BUDGET,
        refine: true,
    };
    let nodes = region.node_count(opts.resolution);
    if nodes > opts.evaluation_budget as u128 {
        return Err(Error::BudgetExceeded {
            nodes,
            budget: opts.evaluation_budget,
        });
    }

    let eq_a = Equations::new(geom, v, q0, false)?;
    let b_cloud = eq_a.scan(region, &scan_opts)?;
    search.evaluations += b_cloud.evaluations;

    let guess = translation_guess(v, q0);
    let mut order: Vec<usize> = (0..b_cloud.len()).collect();
    order.sort_by(|&i, &j| {
        let di = b_cloud.points[i].label_distance(&guess);
        let dj = b_cloud.points[j].label_distance(&guess);
        dj.total_cmp(&di).then(i.cmp(&j))
    });

    let shift: Vec<f64> = r0.coords().iter().zip(q0.coords()).map(|(r, q)| r - q).collect();
    let c_region = Region::new(
        region.lo.iter().zip(&shift).map(|(l, s)| l + s).collect(),
        region.hi.iter().zip(&shift).map(|(h, s)| h + s).collect(),
    )?;
    let two_a = eq_a.two_a;
    let dot_ac = |c_end: &[f64]| {
        let s = |x: &[f64], y: &[f64]| geom.sigma_at(x, y);
        Some((s(eq_a.p0, c_end)? + s(eq_a.p1, r0.coords())?) - (s(eq_a.p0, r0.coords())? + s(eq_a.p1, c_end)?))
    };

    for &bi in &order {
        if search.evaluations + nodes as u64 > opts.evaluation_budget {
            search.budget_exhausted = true;
            break;
        }
        search.candidates_tried += 1;
        let b = PointPairVector::new(q0.clone(), b_cloud.points[bi].clone());
        if b.is_zero() {
            continue;
        }
        let eq_b = Equations::new(geom, &b, r0, false)?;
        let c_cloud = eq_b.scan(&c_region, &scan_opts)?;
        search.evaluations += c_cloud.evaluations;

        // The c that is least equivalent to a, scored relative to the tolerance scale.
        let mut best: Option<(f64, usize, Option<f64>)> = None;
        for (ci, c_end) in c_cloud.points.iter().enumerate() {
            if c_end == r0 {
                continue;
            }
            let two_c = 2.0 * geom.sigma_at(r0.coords(), c_end.coords()).expect("validated");
            let raw = dot_ac(c_end.coords()).and_then(|dot| equivalence_residual_raw(two_a, two_c, dot));
            let score = match raw {
                Some(r) => r / (opts.tol * equivalence_scale(two_a, two_c)),
                None => f64::INFINITY,
            };
            if best.is_none_or(|(s, _, _)| score > s) {
                best = Some((score, ci, raw));
            }
        }
        let Some((score, ci, raw)) = best else { continue };
        if score <= opts.margin {
            continue;
        }
        let c = PointPairVector::new(r0.clone(), c_cloud.points[ci].clone());
        // Re-verify through the public relation, independently of the scans.
        if is_equivalent(geom, v, &b, opts.tol)?
            && is_equivalent(geom, &b, &c, opts.tol)?
            && !is_equivalent(geom, v, &c, opts.tol)?
        {
            search.witness = Some(IntransitivityWitness {
                residual_ab: b_cloud.residuals[bi],
                residual_bc: c_cloud.residuals[ci],
                residual_ac: raw,
                a: v.clone(),
                b,
                c,
            });
            break;
        }
    }
    Ok(search)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_guess_and_default_region() {
        let g = GeometrySpec::euclidean(2).unwrap();
        let v = PointPairVector::new([0.0, 0.0], [3.0, 4.0]);
        let q0 = Point::from([1.0, 1.0]);
        assert_eq!(translation_guess(&v, &q0), Point::from([4.0, 5.0]));
        let r = default_search_region(&g, &v, &q0).unwrap();
        assert_eq!(r.lo, vec![-11.0, -10.0]);
        assert_eq!(r.hi, vec![19.0, 20.0]);
    }

    #[test]
    fn residual_vanishes_at_the_translate() {
        let g = GeometrySpec::euclidean(3).unwrap();
        let v = PointPairVector::new([0.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let q0 = Point::from([5.0, 5.0, 5.0]);
        let r = equivalence_equations_residual(&g, &v, &q0, &[6.0, 5.0, 5.0].into()).unwrap();
        assert_eq!(r, Some(0.0));
        let off = equivalence_equations_residual(&g, &v, &q0, &[5.0, 6.0, 5.0].into()).unwrap();
        assert!(off.unwrap() > 0.5);
    }

    #[test]
    fn zero_vector_is_unique_at_the_origin() {
        let g = GeometrySpec::euclidean(2).unwrap();
        let v = PointPairVector::new([1.0, 1.0], [1.0, 1.0]);
        let q0 = Point::from([3.0, 2.0]);
        let region = default_search_region(&g, &v, &q0).unwrap();
        let s = solve_equivalence(&g, &v, &q0, &region, &EquivalenceOptions::new(0.1, 1e-4)).unwrap();
        assert_eq!(s.cardinality_class, CardinalityClass::Unique);
        assert_eq!(s.solutions.points, vec![q0]);
    }

    #[test]
    fn empty_region_is_a_diagnostic() {
        let g = GeometrySpec::euclidean(2).unwrap();
        let v = PointPairVector::new([0.0, 0.0], [1.0, 0.0]);
        let region = Region::cube(&[-5.0, -5.0], 0.5).unwrap();
        let s = solve_equivalence(&g, &v, &[0.0, 0.0].into(), &region, &EquivalenceOptions::new(0.05, 1e-4)).unwrap();
        assert_eq!(s.cardinality_class, CardinalityClass::Empty);
        assert!(s.diagnostic.is_some());
    }

    #[test]
    fn deformed_plane_gives_two_solutions() {
        // In 1+1 dimensions the deformed solution set is the pair (4.2, ±√0.44).
        let g = GeometrySpec::deformed_minkowski(2, 1.0, 0.1).unwrap();
        let v = PointPairVector::new([0.0, 0.0], [1.0, 0.0]);
        let q0 = Point::from([3.0, 0.0]);
        let region = default_search_region(&g, &v, &q0).unwrap();
        let s = solve_equivalence(&g, &v, &q0, &region, &EquivalenceOptions::new(0.02, 1e-5)).unwrap();
        assert_eq!(s.cardinality_class, CardinalityClass::FiniteMultiple, "{s:?}");
        assert_eq!(s.cluster_count, 2);
        let x = 0.44f64.sqrt();
        let mut centers: Vec<&Point> = s.clusters.iter().map(|c| &c.center).collect();
        centers.sort_by(|a, b| a.coords()[1].total_cmp(&b.coords()[1]));
        for (c, sign) in centers.into_iter().zip([-1.0, 1.0]) {
            assert!((c.coords()[0] - 4.2).abs() < 0.02, "{c:?}");
            assert!((c.coords()[1] - sign * x).abs() < 0.02, "{c:?}");
        }
    }

    #[test]
    fn zero_seed_has_no_witness() {
        let g = GeometrySpec::deformed_minkowski(2, 1.0, 0.1).unwrap();
        let v = PointPairVector::new([0.0, 0.0], [0.0, 0.0]);
        let region = Region::cube(&[3.0, 0.0], 1.0).unwrap();
        let w = find_intransitivity_witness(&g, &v, &[3.0, 0.0].into(), &[0.0, 5.0].into(), &region, &WitnessOptions::new(0.05, 1e-4, 1_000_000)).unwrap();
        assert!(w.witness.is_none());
        assert_eq!(w.evaluations, 0);
    }
}
