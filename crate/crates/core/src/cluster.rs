//! Single-linkage clustering of labelled points by coordinate proximity.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::kernel::{label_distance, Point};

/// A group of points, each within `radius` of another member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: Point,
    pub size: usize,
    /// Largest pairwise label distance inside the cluster. Exact up to
    /// [`EXACT_DIAMETER_LIMIT`] members, a double-sweep lower bound beyond.
    pub diameter: f64,
}

pub const EXACT_DIAMETER_LIMIT: usize = 4096;

fn diameter_of(points: &[Point], members: &[usize]) -> f64 {
    let d = |i: usize, j: usize| label_distance(points[i].coords(), points[j].coords());
    if members.len() <= EXACT_DIAMETER_LIMIT {
        let mut best: f64 = 0.0;
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                best = best.max(d(i, j));
            }
        }
        return best;
    }
    let farthest = |from: usize| {
        members
            .iter()
            .map(|&j| (j, d(from, j)))
            .fold((from, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    };
    let (a, _) = farthest(members[0]);
    farthest(a).1
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Member indices of each cluster. Points closer than `radius` are linked;
/// clusters are ordered by their smallest member index, members ascending.
pub fn cluster_indices(points: &[Point], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let cell = |p: &Point| -> Vec<i64> { p.coords().iter().map(|x| (x / radius).floor() as i64).collect() };
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        buckets.entry(cell(p)).or_default().push(i);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let dim = points[0].dim();
    let offsets = 3usize.pow(dim as u32);
    let mut key = vec![0i64; dim];
    for (i, p) in points.iter().enumerate() {
        let home = cell(p);
        for mut code in 0..offsets {
            for (k, h) in key.iter_mut().zip(&home) {
                *k = h + (code % 3) as i64 - 1;
                code /= 3;
            }
            let Some(members) = buckets.get(&key) else { continue };
            for &j in members {
                if j > i && label_distance(p.coords(), points[j].coords()) <= radius {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

/// Clusters with centroid and diameter.
pub fn cluster_points(points: &[Point], radius: f64) -> Vec<Cluster> {
    cluster_indices(points, radius)
        .into_iter()
        .map(|members| {
            let dim = points[members[0]].dim();
            let mut center = vec![0.0; dim];
            for &i in &members {
                for (c, x) in center.iter_mut().zip(points[i].coords()) {
                    *c += x;
                }
            }
            for c in &mut center {
                *c /= members.len() as f64;
            }
            let diameter = diameter_of(points, &members);
            Cluster {
                center: Point::new(center),
                size: members.len(),
                diameter,
            }
        })
        .collect()
}

/// True when the points form exactly one cluster no wider than `radius`.
/// Stops at the first pair that is too far apart.
pub fn is_single_compact(points: &[Point], radius: f64) -> bool {
    if points.is_empty() {
        return false;
    }
    for (k, p) in points.iter().enumerate() {
        for q in &points[k + 1..] {
            if label_distance(p.coords(), q.coords()) > radius {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[[f64; 2]]) -> Vec<Point> {
        v.iter().map(|p| Point::from(*p)).collect()
    }

    #[test]
    fn chains_link_and_gaps_split() {
        let p = pts(&[[0.0, 0.0], [0.1, 0.0], [0.2, 0.0], [5.0, 5.0], [5.05, 5.0]]);
        let c = cluster_points(&p, 0.15);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].size, 3);
        assert!((c[0].center.coords()[0] - 0.1).abs() < 1e-15);
        assert!((c[0].diameter - 0.2).abs() < 1e-15);
        assert_eq!(cluster_indices(&p, 0.15)[1], vec![3, 4]);
        assert!(!is_single_compact(&p, 0.15));
        assert!(is_single_compact(&p[..2], 0.15));
    }

    #[test]
    fn negative_coordinates_share_cells_correctly() {
        let p = pts(&[[-0.01, -0.01], [0.01, 0.01]]);
        assert_eq!(cluster_points(&p, 0.05).len(), 1);
        assert!(cluster_points(&[], 1.0).is_empty());
    }
}
