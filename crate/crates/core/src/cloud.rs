//! Sampled point sets and their CSV/JSON forms.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Region, ScanOutcome};
use crate::kernel::{label_distance, Point};
use crate::par;

/// A finite sample of points satisfying a predicate within `tol`.
///
/// Points are stored in lexicographic order of their labels and every
/// stored residual satisfies `|residual| <= tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointCloud {
    pub dim: usize,
    pub region: Region,
    pub resolution: f64,
    pub tol: f64,
    pub nodes_scanned: u64,
    /// Probes excluded because a needed radical had 2σ < 0.
    pub inapplicable: u64,
    pub evaluations: u64,
    pub points: Vec<Point>,
    pub residuals: Vec<f64>,
}

impl PointCloud {
    pub(crate) fn from_scan(region: &Region, resolution: f64, tol: f64, out: ScanOutcome) -> Self {
        PointCloud {
            dim: region.dim(),
            region: region.clone(),
            resolution,
            tol,
            nodes_scanned: out.nodes,
            inapplicable: out.inapplicable,
            evaluations: out.evaluations,
            points: out.points.into_iter().map(Point::new).collect(),
            residuals: out.residuals,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Largest label distance from the straight coordinate line through `a`
    /// and `b` (or from `a` when they coincide).
    pub fn max_distance_from_line(&self, a: &Point, b: &Point) -> f64 {
        let a = a.coords();
        let dir: Vec<f64> = b.coords().iter().zip(a).map(|(x, y)| x - y).collect();
        let len2: f64 = dir.iter().map(|x| x * x).sum();
        self.points
            .iter()
            .map(|p| {
                let rel: Vec<f64> = p.coords().iter().zip(a).map(|(x, y)| x - y).collect();
                let along = if len2 > 0.0 {
                    rel.iter().zip(&dir).map(|(r, d)| r * d).sum::<f64>() / len2
                } else {
                    0.0
                };
                rel.iter()
                    .zip(&dir)
                    .map(|(r, d)| (r - along * d).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest pairwise label distance.
    pub fn label_diameter(&self) -> f64 {
        let pts = &self.points;
        par::map_reduce(
            pts.len(),
            |i| {
                pts[i + 1..]
                    .iter()
                    .map(|q| pts[i].label_distance(q))
                    .fold(0.0, f64::max)
            },
            || 0.0,
            f64::max,
        )
    }

    /// Header `x0,..,x{n-1},residual`, one point per LF-terminated row.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.dim {
            let _ = write!(s, "x{i},");
        }
        s.push_str("residual\n");
        for (p, r) in self.points.iter().zip(&self.residuals) {
            for x in p.coords() {
                let _ = write!(s, "{x},");
            }
            let _ = writeln!(s, "{r}");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("point cloud serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cloud: PointCloud = serde_json::from_str(s)?;
        if cloud.points.len() != cloud.residuals.len() {
            return Err(Error::Parse(format!(
                "{} points but {} residuals",
                cloud.points.len(),
                cloud.residuals.len()
            )));
        }
        if cloud.points.iter().any(|p| p.dim() != cloud.dim) {
            return Err(Error::Parse("point arity does not match `dim`".into()));
        }
        Ok(cloud)
    }
}

/// Symmetric Hausdorff distance under the coordinate-label metric.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if a.dim != b.dim {
        return Err(Error::ArityMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    Ok(directed(&a.points, &b.points).max(directed(&b.points, &a.points)))
}

fn directed(from: &[Point], to: &[Point]) -> f64 {
    let nearest: Vec<f64> = par::map_vec(from, |p| {
        to.iter()
            .map(|q| label_distance(p.coords(), q.coords()))
            .fold(f64::INFINITY, f64::min)
    });
    nearest.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(points: Vec<Vec<f64>>) -> PointCloud {
        let n = points.len();
        PointCloud {
            dim: points.first().map_or(2, Vec::len),
            region: Region::cube(&[0.0, 0.0], 1.0).unwrap(),
            resolution: 0.1,
            tol: 1e-3,
            nodes_scanned: 441,
            inapplicable: 0,
            evaluations: 441,
            points: points.into_iter().map(Point::new).collect(),
            residuals: vec![1e-4; n],
        }
    }

    #[test]
    fn csv_layout() {
        let c = cloud(vec![vec![0.0, 0.5], vec![1.0, -0.25]]);
        assert_eq!(c.to_csv(), "x0,x1,residual\n0,0.5,0.0001\n1,-0.25,0.0001\n");
        assert_eq!(cloud(vec![]).to_csv(), "x0,x1,residual\n");
    }

    #[test]
    fn json_rejects_inconsistent_arrays() {
        let mut c = cloud(vec![vec![0.0, 0.5]]);
        c.residuals.clear();
        assert!(PointCloud::from_json(&c.to_json()).is_err());
    }

    #[test]
    fn hausdorff_basics() {
        let a = cloud(vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let b = cloud(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 3.0]]);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 3.0);
        assert_eq!(hausdorff_distance(&b, &a).unwrap(), 3.0);
        assert!(matches!(hausdorff_distance(&a, &cloud(vec![])), Err(Error::EmptyCloud)));
    }

    #[test]
    fn line_distance_and_diameter() {
        let c = cloud(vec![vec![0.0, 0.1], vec![0.5, -0.2], vec![1.0, 0.0]]);
        let d = c.max_distance_from_line(&[0.0, 0.0].into(), &[1.0, 0.0].into());
        assert!((d - 0.2).abs() < 1e-15);
        assert!((c.label_diameter() - (1.0f64 + 0.01).sqrt()).abs() < 1e-15);
    }
}
