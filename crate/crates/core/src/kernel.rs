//! World-function kernels.
//!
//! A [`GeometrySpec`] is the single source of truth for σ(P,Q). Every other
//! module in the crate derives its quantities (lengths, scalar products,
//! implicit objects) from [`GeometrySpec::sigma`] and nothing else; point
//! coordinates are labels fed to the kernel, not a geometric structure.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative null tolerance: `|2σ| <= 1e-12 * (1 + |2σ_M|)`.
pub const DEFAULT_NULL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Euclidean,
    Minkowski,
    DeformedMinkowski,
    Tabulated,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Euclidean => "euclidean",
            GeometryKind::Minkowski => "minkowski",
            GeometryKind::DeformedMinkowski => "deformed_minkowski",
            GeometryKind::Tabulated => "tabulated",
        }
    }
}

/// A labeled location. The label is a coordinate tuple for the continuous
/// kernels and a one-element index for [`GeometryKind::Tabulated`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn index(i: usize) -> Self {
        Point(vec![i as f64])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Euclidean distance between the coordinate labels. This is a
    /// comparison device for point clouds, not a geometric distance.
    pub fn label_distance(&self, other: &Point) -> f64 {
        label_distance(&self.0, &other.0)
    }
}

pub(crate) fn label_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalKind {
    Timelike,
    Spacelike,
    Null,
}

/// Sign class of an interval together with the signed value 2σ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalClass {
    pub kind: IntervalKind,
    pub two_sigma: f64,
}

/// A named world-function kernel.
///
/// Construct through [`GeometrySpec::euclidean`], [`GeometrySpec::minkowski`],
/// [`GeometrySpec::deformed_minkowski`], [`GeometrySpec::tabulated`], or by
/// deserializing the JSON form. The value is immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometrySpec {
    kind: GeometryKind,
    dim: usize,
    light_speed: f64,
    deformation: f64,
    table: Option<Vec<Vec<f64>>>,
    null_tolerance: f64,
}

impl GeometrySpec {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::build(GeometryKind::Euclidean, dim, 1.0, 0.0, None)
    }

    /// Minkowski kernel with `g = diag(c², -1, ..., -1)`; coordinate 0 is time.
    pub fn minkowski(dim: usize, light_speed: f64) -> Result<Self> {
        Self::build(GeometryKind::Minkowski, dim, light_speed, 0.0, None)
    }

    /// `σ_d = σ_M + d·sgn(σ_M)` with `sgn(0) = 0`.
    ///
    /// `d` stands for ħ/(2bc); the constituents are not modeled separately.
    pub fn deformed_minkowski(dim: usize, light_speed: f64, deformation: f64) -> Result<Self> {
        Self::build(
            GeometryKind::DeformedMinkowski,
            dim,
            light_speed,
            deformation,
            None,
        )
    }

    /// A finite geometry given by a symmetric, zero-diagonal σ table. Points
    /// are one-element labels holding the row index.
    pub fn tabulated(table: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(GeometryKind::Tabulated, 1, 1.0, 0.0, Some(table))
    }

    fn build(
        kind: GeometryKind,
        dim: usize,
        light_speed: f64,
        deformation: f64,
        table: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGeometry("dim must be positive".into()));
        }
        if !(light_speed.is_finite() && light_speed > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "light speed must be positive and finite, got {light_speed}"
            )));
        }
        if !(deformation.is_finite() && deformation >= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "deformation must be finite and >= 0, got {deformation}"
            )));
        }
        if let Some(t) = &table {
            validate_table(t)?;
            if dim != 1 {
                return Err(Error::InvalidGeometry(
                    "tabulated geometries use one-element index labels (dim = 1)".into(),
                ));
            }
        }
        Ok(GeometrySpec {
            kind,
            dim,
            light_speed,
            deformation,
            table,
            null_tolerance: DEFAULT_NULL_TOLERANCE,
        })
    }

    pub fn with_null_tolerance(mut self, rel: f64) -> Self {
        self.null_tolerance = rel.abs();
        self
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn light_speed(&self) -> f64 {
        self.light_speed
    }

    pub fn deformation(&self) -> f64 {
        self.deformation
    }

    pub fn table(&self) -> Option<&[Vec<f64>]> {
        self.table.as_deref()
    }

    pub fn null_tolerance(&self) -> f64 {
        self.null_tolerance
    }

    /// Points of a tabulated geometry are discrete; grid refinement is skipped.
    pub fn is_discrete(&self) -> bool {
        self.kind == GeometryKind::Tabulated
    }

    /// Number of enumerated points (tabulated kind only).
    pub fn table_len(&self) -> Option<usize> {
        self.table.as_ref().map(Vec::len)
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        self.check_coords(p.coords())
    }

    pub(crate) fn check_coords(&self, c: &[f64]) -> Result<()> {
        if c.len() != self.dim {
            return Err(Error::ArityMismatch {
                expected: self.dim,
                got: c.len(),
            });
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(t) = &self.table {
            if table_index(c[0], t.len()).is_none() {
                return Err(Error::IndexOutOfRange {
                    label: c[0],
                    len: t.len(),
                });
            }
        }
        Ok(())
    }

    /// σ(P,Q).
    pub fn sigma(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.sigma_at(p.coords(), q.coords()).expect("labels validated"))
    }

    /// σ on raw labels. Returns `None` only for labels that do not name a
    /// point of a tabulated geometry; arity must already match.
    #[inline]
    pub(crate) fn sigma_at(&self, a: &[f64], b: &[f64]) -> Option<f64> {
        debug_assert_eq!(a.len(), self.dim);
        debug_assert_eq!(b.len(), self.dim);
        match self.kind {
            GeometryKind::Euclidean => Some(0.5 * squared_label_distance(a, b)),
            GeometryKind::Minkowski => Some(self.sigma_minkowski(a, b)),
            GeometryKind::DeformedMinkowski => {
                let m = self.sigma_minkowski(a, b);
                Some(m + self.deformation * sgn(m))
            }
            GeometryKind::Tabulated => {
                let t = self.table.as_ref().expect("tabulated kind carries a table");
                let i = table_index(a[0], t.len())?;
                let j = table_index(b[0], t.len())?;
                Some(t[i][j])
            }
        }
    }

    #[inline]
    fn sigma_minkowski(&self, a: &[f64], b: &[f64]) -> f64 {
        let dt = a[0] - b[0];
        let c2 = self.light_speed * self.light_speed;
        let space: f64 = a[1..]
            .iter()
            .zip(&b[1..])
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        0.5 * (c2 * dt * dt - space)
    }

    /// The undeformed reference value used to scale the null tolerance.
    fn reference_sigma(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            GeometryKind::DeformedMinkowski => self.sigma_minkowski(a, b),
            _ => self.sigma_at(a, b).unwrap_or(0.0),
        }
    }

    pub fn classify_interval(&self, p: &Point, q: &Point) -> Result<IntervalClass> {
        let s = self.sigma(p, q)?;
        let reference = self.reference_sigma(p.coords(), q.coords());
        Ok(self.classify_two_sigma(2.0 * s, 2.0 * reference))
    }

    pub(crate) fn classify_two_sigma(&self, two_sigma: f64, reference: f64) -> IntervalClass {
        let tol = self.null_tolerance * (1.0 + reference.abs());
        let kind = if two_sigma.abs() <= tol {
            IntervalKind::Null
        } else if two_sigma > 0.0 {
            IntervalKind::Timelike
        } else {
            IntervalKind::Spacelike
        };
        IntervalClass { kind, two_sigma }
    }

    /// Text label for an interval class in this geometry's vocabulary:
    /// definite kernels report signs, Minkowski kernels report causal classes.
    pub fn interval_label(&self, class: &IntervalClass) -> &'static str {
        match (self.kind, class.kind) {
            (GeometryKind::Minkowski | GeometryKind::DeformedMinkowski, IntervalKind::Timelike) => {
                "timelike"
            }
            (GeometryKind::Minkowski | GeometryKind::DeformedMinkowski, IntervalKind::Spacelike) => {
                "spacelike"
            }
            (GeometryKind::Minkowski | GeometryKind::DeformedMinkowski, IntervalKind::Null) => {
                "null"
            }
            (_, IntervalKind::Timelike) => "positive",
            (_, IntervalKind::Spacelike) => "negative",
            (_, IntervalKind::Null) => "zero",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("geometry spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[inline]
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
fn squared_label_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn table_index(label: f64, len: usize) -> Option<usize> {
    if label >= 0.0 && label.fract() == 0.0 && label < len as f64 {
        Some(label as usize)
    } else {
        None
    }
}

fn validate_table(t: &[Vec<f64>]) -> Result<()> {
    let n = t.len();
    if n == 0 {
        return Err(Error::InvalidGeometry("table is empty".into()));
    }
    for (i, row) in t.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidGeometry(format!(
                "table row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "table row {i} has a non-finite entry"
            )));
        }
        if row[i] != 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "table diagonal entry {i} is {}, expected 0",
                row[i]
            )));
        }
        for j in 0..i {
            if row[j] != t[j][i] {
                return Err(Error::InvalidGeometry(format!(
                    "table is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Wire form: `{"kind", "dim", "c", "d", "table"}`; unknown fields rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: GeometryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<Vec<f64>>>,
}

impl Serialize for GeometrySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let minkowskian = matches!(
            self.kind,
            GeometryKind::Minkowski | GeometryKind::DeformedMinkowski
        );
        RawSpec {
            kind: self.kind,
            dim: Some(self.dim),
            c: minkowskian.then_some(self.light_speed),
            d: (self.kind == GeometryKind::DeformedMinkowski).then_some(self.deformation),
            table: self.table.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeometrySpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawSpec::deserialize(de)?;
        let reject = |field: &str| {
            D::Error::custom(format!(
                "field `{field}` does not apply to kind `{}`",
                raw.kind.name()
            ))
        };
        let spec = match raw.kind {
            GeometryKind::Euclidean => {
                if raw.c.is_some() {
                    return Err(reject("c"));
                }
                if raw.d.is_some() {
                    return Err(reject("d"));
                }
                if raw.table.is_some() {
                    return Err(reject("table"));
                }
                let dim = raw.dim.ok_or_else(|| D::Error::missing_field("dim"))?;
                GeometrySpec::euclidean(dim)
            }
            GeometryKind::Minkowski => {
                if raw.d.is_some() {
                    return Err(reject("d"));
                }
                if raw.table.is_some() {
                    return Err(reject("table"));
                }
                GeometrySpec::minkowski(raw.dim.unwrap_or(4), raw.c.unwrap_or(1.0))
            }
            GeometryKind::DeformedMinkowski => {
                if raw.table.is_some() {
                    return Err(reject("table"));
                }
                let d = raw.d.ok_or_else(|| D::Error::missing_field("d"))?;
                GeometrySpec::deformed_minkowski(raw.dim.unwrap_or(4), raw.c.unwrap_or(1.0), d)
            }
            GeometryKind::Tabulated => {
                if raw.c.is_some() {
                    return Err(reject("c"));
                }
                if raw.d.is_some() {
                    return Err(reject("d"));
                }
                let table = raw.table.ok_or_else(|| D::Error::missing_field("table"))?;
                if let Some(dim) = raw.dim {
                    if dim != 1 {
                        return Err(D::Error::custom("tabulated geometries require dim = 1"));
                    }
                }
                GeometrySpec::tabulated(table)
            }
        };
        spec.map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_sigma_is_half_squared_distance() {
        let g = GeometrySpec::euclidean(3).unwrap();
        let s = g.sigma(&[0.0, 0.0, 0.0].into(), &[3.0, 4.0, 0.0].into()).unwrap();
        assert_eq!(s, 12.5);
    }

    #[test]
    fn minkowski_and_deformed_time_step() {
        let p: Point = [0.0, 0.0, 0.0, 0.0].into();
        let q: Point = [1.0, 0.0, 0.0, 0.0].into();
        let m = GeometrySpec::minkowski(4, 1.0).unwrap();
        assert_eq!(m.sigma(&p, &q).unwrap(), 0.5);
        let d = GeometrySpec::deformed_minkowski(4, 1.0, 0.1).unwrap();
        assert!((d.sigma(&p, &q).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn deformed_keeps_zero_diagonal_and_null_rays() {
        let d = GeometrySpec::deformed_minkowski(4, 1.0, 0.5).unwrap();
        let p: Point = [1.0, 2.0, 3.0, 4.0].into();
        assert_eq!(d.sigma(&p, &p).unwrap(), 0.0);
        let ray: Point = [2.0, 3.0, 3.0, 4.0].into();
        assert_eq!(d.sigma(&p, &ray).unwrap(), 0.0);
    }

    #[test]
    fn light_speed_scales_time() {
        let m = GeometrySpec::minkowski(2, 2.0).unwrap();
        let s = m.sigma(&[0.0, 0.0].into(), &[1.0, 1.0].into()).unwrap();
        assert_eq!(s, 1.5);
    }

    #[test]
    fn interval_classes() {
        let m = GeometrySpec::minkowski(4, 1.0).unwrap();
        let o: Point = [0.0; 4].into();
        let c = m.classify_interval(&o, &[0.0, 1.0, 0.0, 0.0].into()).unwrap();
        assert_eq!(c.kind, IntervalKind::Spacelike);
        assert_eq!(c.two_sigma, -1.0);
        let c = m.classify_interval(&o, &[1.0, 1.0, 0.0, 0.0].into()).unwrap();
        assert_eq!(c.kind, IntervalKind::Null);
        assert_eq!(c.two_sigma, 0.0);
        assert_eq!(m.interval_label(&c), "null");

        let e = GeometrySpec::euclidean(2).unwrap();
        let c = e.classify_interval(&[0.0, 0.0].into(), &[1e-3, 0.0].into()).unwrap();
        assert_eq!(c.kind, IntervalKind::Timelike);
        assert!(c.two_sigma > 0.0);
        assert_eq!(e.interval_label(&c), "positive");
    }

    #[test]
    fn arity_and_index_errors() {
        let e = GeometrySpec::euclidean(3).unwrap();
        assert!(matches!(
            e.sigma(&[0.0, 0.0].into(), &[0.0, 0.0, 0.0].into()),
            Err(Error::ArityMismatch { expected: 3, got: 2 })
        ));
        let t = GeometrySpec::tabulated(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(t.sigma(&Point::index(0), &Point::index(1)).unwrap(), 1.0);
        assert!(matches!(
            t.sigma(&Point::index(0), &Point::index(2)),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(t.sigma(&[0.5].into(), &Point::index(1)).is_err());
        assert!(matches!(
            e.sigma(&[f64::NAN, 0.0, 0.0].into(), &[0.0; 3].into()),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn table_validation() {
        assert!(GeometrySpec::tabulated(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(GeometrySpec::tabulated(vec![vec![1.0]]).is_err());
        assert!(GeometrySpec::tabulated(vec![vec![0.0, 1.0]]).is_err());
        assert!(GeometrySpec::tabulated(vec![]).is_err());
    }

    #[test]
    fn json_schema() {
        let g = GeometrySpec::from_json(r#"{"kind":"deformed_minkowski","dim":4,"c":1,"d":0.1}"#)
            .unwrap();
        assert_eq!(g, GeometrySpec::deformed_minkowski(4, 1.0, 0.1).unwrap());
        assert_eq!(g.to_json(), r#"{"kind":"deformed_minkowski","dim":4,"c":1.0,"d":0.1}"#);
        assert_eq!(GeometrySpec::from_json(&g.to_json()).unwrap(), g);

        let t = GeometrySpec::from_json(r#"{"kind":"tabulated","table":[[0,0.5],[0.5,0]]}"#)
            .unwrap();
        assert_eq!(t.table_len(), Some(2));

        assert!(GeometrySpec::from_json(r#"{"kind":"euclidean","dim":2,"extra":1}"#).is_err());
        assert!(GeometrySpec::from_json(r#"{"kind":"euclidean","dim":2,"c":1}"#).is_err());
        assert!(GeometrySpec::from_json(r#"{"kind":"euclidean"}"#).is_err());
        assert!(GeometrySpec::from_json(r#"{"kind":"minkowski","dim":4,"c":-1}"#).is_err());
        assert!(GeometrySpec::from_json(r#"{"kind":"riemann","dim":4}"#).is_err());
    }
}
