//! Geometric objects as implicit point sets defined through σ, their
//! sampling into point clouds, and section measurements.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::grid::{self, Region, ScanOptions};
use crate::kernel::{GeometrySpec, Point};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Sphere,
    Ellipsoid,
    Segment,
    Cylinder,
    Section,
}

/// Defining points, named by their role.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `{R | ρ(O,R) = ρ(O,P)}`
    Sphere { center: Point, surface: Point },
    /// `{R | ρ(F1,R) + ρ(F2,R) = ρ(F1,P) + ρ(F2,P)}`
    Ellipsoid { focus1: Point, focus2: Point, surface: Point },
    /// `{R | √(2σ(P0,R)) + √(2σ(R,P1)) = √(2σ(P0,P1))}`
    Segment { start: Point, end: Point },
    /// `{R | S(F1,F2,R) = S(F1,F2,P)}` with Heron areas.
    Cylinder { surface: Point, axis1: Point, axis2: Point },
    /// `{R | ρ(F1,R) = ρ(F1,P) ∧ ρ(F2,R) = ρ(F2,P)}` for P on segment [F1F2].
    Section { point: Point, start: Point, end: Point },
}

impl Shape {
    pub fn kind(&self) -> ObjectKind {
        match self {
            Shape::Sphere { .. } => ObjectKind::Sphere,
            Shape::Ellipsoid { .. } => ObjectKind::Ellipsoid,
            Shape::Segment { .. } => ObjectKind::Segment,
            Shape::Cylinder { .. } => ObjectKind::Cylinder,
            Shape::Section { .. } => ObjectKind::Section,
        }
    }

    pub fn defining_points(&self) -> Vec<&Point> {
        match self {
            Shape::Sphere { center, surface } => vec![center, surface],
            Shape::Ellipsoid {
                focus1,
                focus2,
                surface,
            } => vec![focus1, focus2, surface],
            Shape::Segment { start, end } => vec![start, end],
            Shape::Cylinder {
                surface,
                axis1,
                axis2,
            } => vec![surface, axis1, axis2],
            Shape::Section { point, start, end } => vec![point, start, end],
        }
    }
}

/// Precomputed constants of the defining equation.
#[derive(Clone, Debug, PartialEq)]
enum Compiled {
    Sphere { rho: f64 },
    Ellipsoid { total: f64 },
    Segment { length: f64 },
    Cylinder { axis_length: f64, area: f64 },
    Section { rho1: f64, rho2: f64 },
}

/// A predicate over points built from σ, bound to its geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitObject {
    geometry: GeometrySpec,
    shape: Shape,
    compiled: Compiled,
}

#[inline]
fn rho(geom: &GeometrySpec, a: &[f64], b: &[f64]) -> Option<f64> {
    let two = 2.0 * geom.sigma_at(a, b)?;
    (two >= 0.0).then(|| two.sqrt())
}

/// Triangle area from real side lengths (Heron), in the cancellation-safe
/// ordering. `None` when the radicand is negative beyond rounding, i.e. the
/// sides violate the triangle inequality.
pub fn heron_area(a: f64, b: f64, c: f64) -> Option<f64> {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let radicand = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    // Collinear sides can round a zero radicand slightly negative.
    let floor = -8.0 * f64::EPSILON * (a + b + c).powi(4);
    (radicand >= floor).then(|| 0.25 * radicand.max(0.0).sqrt())
}

fn inapplicable(what: &str) -> Error {
    Error::Inapplicable(format!("{what} needs a radical with 2σ < 0"))
}

impl ImplicitObject {
    pub fn new(geometry: &GeometrySpec, shape: Shape) -> Result<Self> {
        for p in shape.defining_points() {
            geometry.check_point(p)?;
        }
        let g = geometry;
        let compiled = match &shape {
            Shape::Sphere { center, surface } => Compiled::Sphere {
                rho: rho(g, center.coords(), surface.coords()).ok_or_else(|| inapplicable("sphere radius"))?,
            },
            Shape::Ellipsoid {
                focus1,
                focus2,
                surface,
            } => {
                let r1 = rho(g, focus1.coords(), surface.coords());
                let r2 = rho(g, focus2.coords(), surface.coords());
                match (r1, r2) {
                    (Some(a), Some(b)) => Compiled::Ellipsoid { total: a + b },
                    _ => return Err(inapplicable("ellipsoid constant")),
                }
            }
            Shape::Segment { start, end } => Compiled::Segment {
                length: rho(g, start.coords(), end.coords()).ok_or_else(|| inapplicable("segment length"))?,
            },
            Shape::Cylinder {
                surface,
                axis1,
                axis2,
            } => {
                if axis1 == axis2 {
                    return Err(Error::InvalidArgument("cylinder axis points must differ".into()));
                }
                let axis_length = rho(g, axis1.coords(), axis2.coords())
                    .ok_or_else(|| inapplicable("cylinder axis"))?;
                let b = rho(g, axis1.coords(), surface.coords()).ok_or_else(|| inapplicable("cylinder"))?;
                let c = rho(g, axis2.coords(), surface.coords()).ok_or_else(|| inapplicable("cylinder"))?;
                let area = heron_area(axis_length, b, c).ok_or_else(|| {
                    Error::Inapplicable("Heron radicand of the defining triangle is negative".into())
                })?;
                Compiled::Cylinder { axis_length, area }
            }
            Shape::Section { point, start, end } => {
                let r1 = rho(g, start.coords(), point.coords());
                let r2 = rho(g, end.coords(), point.coords());
                match (r1, r2) {
                    (Some(rho1), Some(rho2)) => Compiled::Section { rho1, rho2 },
                    _ => return Err(inapplicable("section")),
                }
            }
        };
        Ok(ImplicitObject {
            geometry: geometry.clone(),
            shape,
            compiled,
        })
    }

    pub fn segment(geom: &GeometrySpec, start: impl Into<Point>, end: impl Into<Point>) -> Result<Self> {
        Self::new(
            geom,
            Shape::Segment {
                start: start.into(),
                end: end.into(),
            },
        )
    }

    pub fn sphere(geom: &GeometrySpec, center: impl Into<Point>, surface: impl Into<Point>) -> Result<Self> {
        Self::new(
            geom,
            Shape::Sphere {
                center: center.into(),
                surface: surface.into(),
            },
        )
    }

    pub fn ellipsoid(
        geom: &GeometrySpec,
        focus1: impl Into<Point>,
        focus2: impl Into<Point>,
        surface: impl Into<Point>,
    ) -> Result<Self> {
        Self::new(
            geom,
            Shape::Ellipsoid {
                focus1: focus1.into(),
                focus2: focus2.into(),
                surface: surface.into(),
            },
        )
    }

    pub fn cylinder(
        geom: &GeometrySpec,
        surface: impl Into<Point>,
        axis1: impl Into<Point>,
        axis2: impl Into<Point>,
    ) -> Result<Self> {
        Self::new(
            geom,
            Shape::Cylinder {
                surface: surface.into(),
                axis1: axis1.into(),
                axis2: axis2.into(),
            },
        )
    }

    pub fn section(
        geom: &GeometrySpec,
        point: impl Into<Point>,
        start: impl Into<Point>,
        end: impl Into<Point>,
    ) -> Result<Self> {
        Self::new(
            geom,
            Shape::Section {
                point: point.into(),
                start: start.into(),
                end: end.into(),
            },
        )
    }

    pub fn geometry(&self) -> &GeometrySpec {
        &self.geometry
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn kind(&self) -> ObjectKind {
        self.shape.kind()
    }

    /// Residual of the defining equation at `r`, zero exactly on the object.
    ///
    /// Errors with [`Error::Inapplicable`] when a radical needed at `r` has
    /// 2σ < 0 or the Heron radicand is negative.
    pub fn predicate_residual(&self, r: &Point) -> Result<f64> {
        self.geometry.check_point(r)?;
        self.residual_at(r.coords())
            .ok_or_else(|| Error::Inapplicable(format!("probe {r} for {:?}", self.kind())))
    }

    #[inline]
    pub(crate) fn residual_at(&self, r: &[f64]) -> Option<f64> {
        let g = &self.geometry;
        match (&self.shape, &self.compiled) {
            (Shape::Sphere { center, .. }, Compiled::Sphere { rho: rad }) => {
                Some(rho(g, center.coords(), r)? - rad)
            }
            (Shape::Ellipsoid { focus1, focus2, .. }, Compiled::Ellipsoid { total }) => {
                Some(rho(g, focus1.coords(), r)? + rho(g, focus2.coords(), r)? - total)
            }
            (Shape::Segment { start, end }, Compiled::Segment { length }) => {
                Some(rho(g, start.coords(), r)? + rho(g, r, end.coords())? - length)
            }
            (Shape::Cylinder { axis1, axis2, .. }, Compiled::Cylinder { axis_length, area }) => {
                let b = rho(g, axis1.coords(), r)?;
                let c = rho(g, axis2.coords(), r)?;
                Some(heron_area(*axis_length, b, c)? - area)
            }
            (Shape::Section { start, end, .. }, Compiled::Section { rho1, rho2 }) => {
                let d1 = (rho(g, start.coords(), r)? - rho1).abs();
                let d2 = (rho(g, end.coords(), r)? - rho2).abs();
                Some(d1.max(d2))
            }
            _ => unreachable!("compiled constants always match the shape"),
        }
    }
}

/// Sampling parameters: grid step, acceptance tolerance and node budget.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingOptions {
    pub resolution: f64,
    pub tol: f64,
    pub node_budget: u64,
}

impl SamplingOptions {
    pub fn new(resolution: f64, tol: f64) -> Self {
        SamplingOptions {
            resolution,
            tol,
            node_budget: grid::DEFAULT_NODE_BUDGET,
        }
    }

    pub fn with_budget(mut self, node_budget: u64) -> Self {
        self.node_budget = node_budget;
        self
    }

    pub(crate) fn scan(&self) -> ScanOptions {
        ScanOptions {
            resolution: self.resolution,
            tol: self.tol,
            node_budget: self.node_budget,
            refine: true,
        }
    }
}

pub(crate) fn check_region(geom: &GeometrySpec, region: &Region) -> Result<()> {
    if region.dim() != geom.dim() {
        return Err(Error::ArityMismatch {
            expected: geom.dim(),
            got: region.dim(),
        });
    }
    Ok(())
}

/// Grid-scans `region` for points with `|residual| <= tol`. An empty cloud
/// is a valid result.
pub fn sample_object(obj: &ImplicitObject, region: &Region, opts: &SamplingOptions) -> Result<PointCloud> {
    check_region(&obj.geometry, region)?;
    let out = grid::scan(region, &opts.scan(), obj.geometry.is_discrete(), |x| obj.residual_at(x))?;
    Ok(PointCloud::from_scan(region, opts.resolution, opts.tol, out))
}

/// Which metric a section diameter was measured with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiameterMetric {
    /// ρ = √(2σ) of the geometry itself; every pair had 2σ >= 0.
    Geometry,
    /// Coordinate-label distance, used when some pair had 2σ < 0.
    Label,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionMeasurement {
    pub cloud: PointCloud,
    pub diameter: f64,
    pub metric: DiameterMetric,
}

/// Samples the section of segment [F1F2] at `point` and measures its diameter.
pub fn section_of_segment(
    geom: &GeometrySpec,
    start: &Point,
    end: &Point,
    point: &Point,
    region: &Region,
    opts: &SamplingOptions,
) -> Result<SectionMeasurement> {
    let seg = ImplicitObject::segment(geom, start.clone(), end.clone())?;
    let on_segment = seg.predicate_residual(point)?;
    if on_segment.abs() > opts.tol {
        return Err(Error::InvalidArgument(format!(
            "point {point} is not on the segment (residual {on_segment:e} > tol {:e})",
            opts.tol
        )));
    }
    let obj = ImplicitObject::section(geom, point.clone(), start.clone(), end.clone())?;
    let cloud = sample_object(&obj, region, opts)?;
    let (diameter, metric) = cloud_diameter(geom, &cloud);
    Ok(SectionMeasurement {
        cloud,
        diameter,
        metric,
    })
}

/// Diameter from the geometry's own ρ when every pair is real, else from labels.
pub fn cloud_diameter(geom: &GeometrySpec, cloud: &PointCloud) -> (f64, DiameterMetric) {
    let pts = &cloud.points;
    let own: Option<f64> = par::map_reduce(
        pts.len(),
        |i| {
            pts[i + 1..].iter().try_fold(0.0f64, |m, q| {
                let two = 2.0 * geom.sigma_at(pts[i].coords(), q.coords())?;
                (two >= 0.0).then(|| m.max(two.sqrt()))
            })
        },
        || Some(0.0),
        |a, b| Some(a?.max(b?)),
    );
    match own {
        Some(d) => (d, DiameterMetric::Geometry),
        None => (cloud.label_diameter(), DiameterMetric::Label),
    }
}
