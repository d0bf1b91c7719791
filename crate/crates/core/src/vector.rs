//! Vectors as ordered point pairs, and everything built from them through σ:
//! length, scalar product, Gram determinants, linear dependence, equivalence.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{GeometrySpec, IntervalKind, Point};

/// Default tolerance for Euclidean kernels.
pub const EUCLIDEAN_TOL: f64 = 1e-9;
/// Default tolerance for every other kernel.
pub const GENERAL_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPairVector {
    pub origin: Point,
    pub end: Point,
}

impl PointPairVector {
    pub fn new(origin: impl Into<Point>, end: impl Into<Point>) -> Self {
        PointPairVector {
            origin: origin.into(),
            end: end.into(),
        }
    }

    /// The zero vector: origin and end carry the same label.
    pub fn is_zero(&self) -> bool {
        self.origin == self.end
    }

    /// 2σ(origin, end), the signed squared length.
    pub fn two_sigma(&self, geom: &GeometrySpec) -> Result<f64> {
        Ok(2.0 * geom.sigma(&self.origin, &self.end)?)
    }

    /// Coordinate difference `end - origin`, used only by translation oracles.
    pub fn label_delta(&self) -> Vec<f64> {
        self.end
            .coords()
            .iter()
            .zip(self.origin.coords())
            .map(|(e, o)| e - o)
            .collect()
    }
}

/// Magnitude tagged with its interval class. For 2σ < 0 the true length is
/// imaginary; `magnitude` then holds √(−2σ) and `imaginary` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Length {
    pub class: IntervalKind,
    pub magnitude: f64,
    pub imaginary: bool,
    pub two_sigma: f64,
}

pub fn length(geom: &GeometrySpec, v: &PointPairVector) -> Result<Length> {
    let class = geom.classify_interval(&v.origin, &v.end)?;
    let two = class.two_sigma;
    Ok(Length {
        class: class.kind,
        magnitude: two.abs().sqrt(),
        imaginary: two < 0.0,
        two_sigma: two,
    })
}

/// (P0P1.Q0Q1) = σ(P0,Q1) + σ(P1,Q0) − σ(P0,Q0) − σ(P1,Q1).
pub fn scalar_product(geom: &GeometrySpec, a: &PointPairVector, b: &PointPairVector) -> Result<f64> {
    for p in [&a.origin, &a.end, &b.origin, &b.end] {
        geom.check_point(p)?;
    }
    let s = |x: &Point, y: &Point| geom.sigma_at(x.coords(), y.coords()).expect("validated");
    // Grouped so that swapping a and b gives the same bits and a zero
    // vector on either side cancels exactly.
    let value = (s(&a.origin, &b.end) + s(&a.end, &b.origin)) - (s(&a.origin, &b.origin) + s(&a.end, &b.end));
    if a.origin == b.origin {
        // Common origin: the cosine-theorem form agrees up to rounding.
        let common = s(&a.origin, &b.end) + s(&a.end, &a.origin) - s(&a.end, &b.end);
        debug_assert!((value - common).abs() <= 1e-12 * (1.0 + common.abs()));
    }
    Ok(value)
}

/// Scalar product of two vectors sharing origin `p0`, on raw labels.
#[inline]
pub(crate) fn common_origin_product(
    geom: &GeometrySpec,
    p0: &[f64],
    a: &[f64],
    b: &[f64],
) -> Option<f64> {
    Some(geom.sigma_at(p0, a)? + geom.sigma_at(p0, b)? - geom.sigma_at(a, b)?)
}

/// Matrix of scalar products (P0Pi.P0Pk) written through σ alone:
/// `σ(P0,Pi) + σ(P0,Pk) − σ(Pi,Pk)`. Its diagonal is 2σ(P0,Pi).
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub base: Point,
    pub spokes: Vec<Point>,
    pub entries: DMatrix<f64>,
}

impl GramMatrix {
    pub fn new(geom: &GeometrySpec, base: &Point, spokes: &[Point]) -> Result<Self> {
        if spokes.is_empty() {
            return Err(Error::InvalidArgument("at least one spoke is required".into()));
        }
        geom.check_point(base)?;
        for p in spokes {
            geom.check_point(p)?;
        }
        let n = spokes.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for k in i..n {
                let v = common_origin_product(geom, base.coords(), spokes[i].coords(), spokes[k].coords())
                    .expect("validated");
                m[(i, k)] = v;
                m[(k, i)] = v;
            }
        }
        Ok(GramMatrix {
            base: base.clone(),
            spokes: spokes.to_vec(),
            entries: m,
        })
    }

    pub fn determinant(&self) -> f64 {
        self.entries.determinant()
    }

    /// Hadamard bound Π‖row_i‖₂, so that `|det| / scale ∈ [0, 1]`.
    ///
    /// For a positive-definite matrix this dominates the product of the
    /// diagonal, and unlike that product it stays meaningful when a spoke
    /// is null in an indefinite kernel.
    pub fn scale(&self) -> f64 {
        self.entries.row_iter().map(|r| r.norm()).product()
    }
}

/// F_n: determinant of the σ-expressed Gram matrix.
pub fn gram_determinant(geom: &GeometrySpec, base: &Point, spokes: &[Point]) -> Result<f64> {
    Ok(GramMatrix::new(geom, base, spokes)?.determinant())
}

/// True when `|F_n| <= tol * scale` (see [`GramMatrix::scale`]).
pub fn is_linearly_dependent(
    geom: &GeometrySpec,
    base: &Point,
    spokes: &[Point],
    tol: f64,
) -> Result<bool> {
    let g = GramMatrix::new(geom, base, spokes)?;
    Ok(is_degenerate(&g, tol))
}

pub(crate) fn is_degenerate(g: &GramMatrix, tol: f64) -> bool {
    let scale = g.scale();
    scale == 0.0 || g.determinant().abs() <= tol * scale
}

/// Residual of the equivalence relation for a pair with known signed
/// squared lengths and scalar product:
/// `max(|(a.b) − |a||b||, ||a| − |b||)`.
///
/// For two spacelike vectors the lengths are imaginary, so `|a||b|` is
/// `−√(2σ_a·2σ_b)`. Mixed timelike/spacelike pairs have no residual.
#[inline]
pub(crate) fn equivalence_residual_raw(two_a: f64, two_b: f64, dot: f64) -> Option<f64> {
    let product = two_a * two_b;
    if product < 0.0 {
        return None;
    }
    let spacelike = two_a < 0.0 || two_b < 0.0;
    let magnitude = product.sqrt();
    let expected = if spacelike { -magnitude } else { magnitude };
    let length_gap = (two_a.abs().sqrt() - two_b.abs().sqrt()).abs();
    Some((dot - expected).abs().max(length_gap))
}

/// Relative scale used with [`equivalence_residual_raw`].
#[inline]
pub(crate) fn equivalence_scale(two_a: f64, two_b: f64) -> f64 {
    1.0 + (two_a * two_b).abs().sqrt()
}

/// Equivalence residual of two vectors, `None` for a mixed timelike/spacelike
/// pair, where the relation is undefined.
pub fn equivalence_residual(
    geom: &GeometrySpec,
    a: &PointPairVector,
    b: &PointPairVector,
) -> Result<Option<f64>> {
    let dot = scalar_product(geom, a, b)?;
    Ok(equivalence_residual_raw(a.two_sigma(geom)?, b.two_sigma(geom)?, dot))
}

/// `a eqv b`: (a.b) = |a||b| and |a| = |b|, within `tol * (1 + |a||b|)`.
///
/// A zero vector is equivalent only to another zero vector; mixed
/// timelike/spacelike pairs are never equivalent.
pub fn is_equivalent(
    geom: &GeometrySpec,
    a: &PointPairVector,
    b: &PointPairVector,
    tol: f64,
) -> Result<bool> {
    if a.is_zero() || b.is_zero() {
        return Ok(a.is_zero() && b.is_zero());
    }
    let (ta, tb) = (a.two_sigma(geom)?, b.two_sigma(geom)?);
    let dot = scalar_product(geom, a, b)?;
    Ok(match equivalence_residual_raw(ta, tb, dot) {
        Some(r) => r <= tol * equivalence_scale(ta, tb),
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize) -> GeometrySpec {
        GeometrySpec::euclidean(n).unwrap()
    }

    #[test]
    fn lengths() {
        let l = length(&e(2), &PointPairVector::new([0.0, 0.0], [3.0, 4.0])).unwrap();
        assert_eq!(l.magnitude, 5.0);
        assert_eq!(l.class, IntervalKind::Timelike);

        let m = GeometrySpec::minkowski(4, 1.0).unwrap();
        let l = length(&m, &PointPairVector::new([0.0; 4], [2.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!((l.magnitude, l.class, l.imaginary), (2.0, IntervalKind::Timelike, false));

        let l = length(&m, &PointPairVector::new([0.0; 4], [0.0, 3.0, 0.0, 0.0])).unwrap();
        assert_eq!((l.magnitude, l.class, l.imaginary), (3.0, IntervalKind::Spacelike, true));

        for g in [e(4), m.clone(), GeometrySpec::deformed_minkowski(4, 1.0, 0.3).unwrap()] {
            let p = [1.0, -2.0, 0.5, 3.0];
            let l = length(&g, &PointPairVector::new(p, p)).unwrap();
            assert_eq!((l.magnitude, l.class), (0.0, IntervalKind::Null));
        }
    }

    #[test]
    fn orthogonal_axes_have_zero_product() {
        let v1 = PointPairVector::new([0.0, 0.0], [1.0, 0.0]);
        let v2 = PointPairVector::new([0.0, 0.0], [0.0, 1.0]);
        assert_eq!(scalar_product(&e(2), &v1, &v2).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_second_vector_gives_zero() {
        for g in [
            e(3),
            GeometrySpec::minkowski(3, 1.0).unwrap(),
            GeometrySpec::deformed_minkowski(3, 1.0, 0.2).unwrap(),
        ] {
            let v1 = PointPairVector::new([0.3, 1.0, -2.0], [4.0, 0.5, 1.0]);
            let v2 = PointPairVector::new([7.0, -1.0, 2.0], [7.0, -1.0, 2.0]);
            assert_eq!(scalar_product(&g, &v1, &v2).unwrap(), 0.0);
        }
    }

    #[test]
    fn gram_determinants() {
        let o: Point = [0.0, 0.0].into();
        let three: Vec<Point> = vec![[1.0, 0.0].into(), [0.0, 1.0].into(), [1.0, 1.0].into()];
        assert!(gram_determinant(&e(2), &o, &three).unwrap().abs() < 1e-15);
        assert!(is_linearly_dependent(&e(2), &o, &three, 1e-9).unwrap());

        // Entries σ(P0,Pi)+σ(P0,Pk)−σ(Pi,Pk): diag(1,1) for the unit axes,
        // evaluated by hand: 0.5+0.5−0 on the diagonal, 0.5+0.5−1 off it.
        let two = &three[..2];
        let g = GramMatrix::new(&e(2), &o, two).unwrap();
        assert_eq!(g.entries, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]));
        assert_eq!(g.determinant(), 1.0);
        assert!(!is_linearly_dependent(&e(2), &o, two, 1e-9).unwrap());

        assert_eq!(gram_determinant(&e(2), &o, std::slice::from_ref(&o)).unwrap(), 0.0);
        assert!(is_linearly_dependent(&e(2), &o, std::slice::from_ref(&o), 1e-9).unwrap());
        assert!(GramMatrix::new(&e(2), &o, &[]).is_err());
    }

    #[test]
    fn gram_diagonal_is_two_sigma() {
        let g = GeometrySpec::deformed_minkowski(3, 1.0, 0.1).unwrap();
        let o: Point = [0.0, 0.0, 0.0].into();
        let spokes: Vec<Point> = vec![[2.0, 1.0, 0.0].into(), [0.5, 3.0, 1.0].into()];
        let m = GramMatrix::new(&g, &o, &spokes).unwrap();
        for (i, p) in spokes.iter().enumerate() {
            assert_eq!(m.entries[(i, i)], 2.0 * g.sigma(&o, p).unwrap());
        }
    }

    #[test]
    fn equivalence_examples() {
        let v1 = PointPairVector::new([0.0, 0.0], [1.0, 0.0]);
        let shifted = PointPairVector::new([5.0, 5.0], [6.0, 5.0]);
        let orth = PointPairVector::new([0.0, 0.0], [0.0, 1.0]);
        assert!(is_equivalent(&e(2), &v1, &shifted, 1e-9).unwrap());
        assert!(is_equivalent(&e(2), &v1, &v1, 1e-9).unwrap());
        assert!(!is_equivalent(&e(2), &v1, &orth, 1e-9).unwrap());

        let zero = PointPairVector::new([2.0, 2.0], [2.0, 2.0]);
        let zero2 = PointPairVector::new([3.0, 1.0], [3.0, 1.0]);
        assert!(!is_equivalent(&e(2), &v1, &zero, 1e-9).unwrap());
        assert!(is_equivalent(&e(2), &zero, &zero2, 1e-9).unwrap());
    }

    #[test]
    fn spacelike_translates_are_equivalent_and_mixed_pairs_are_not() {
        let m = GeometrySpec::minkowski(2, 1.0).unwrap();
        let s1 = PointPairVector::new([0.0, 0.0], [0.0, 1.0]);
        let s2 = PointPairVector::new([3.0, 2.0], [3.0, 3.0]);
        assert!(is_equivalent(&m, &s1, &s2, 1e-12).unwrap());
        let t = PointPairVector::new([0.0, 0.0], [1.0, 0.0]);
        assert!(!is_equivalent(&m, &s1, &t, 1e-12).unwrap());
        assert_eq!(equivalence_residual(&m, &s1, &t).unwrap(), None);
    }
}
