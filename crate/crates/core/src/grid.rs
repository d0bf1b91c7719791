//! Grid-scan level-set extraction with axis-wise refinement.
//!
//! Every node of a regular grid over a box is evaluated. A node becomes a
//! candidate when its residual could reach the tolerance inside its own
//! cell, judged from the variation to its axis neighbours; candidates are
//! then refined inside the cell by bisection (on a sign change) or
//! golden-section search on |residual| along each axis in turn. Only points
//! that end with |residual| <= tol are kept.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::lex_cmp;
use crate::par;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

const CHUNK: usize = 4096;
const SWEEPS: usize = 24;
const GOLDEN_STEPS: usize = 26;
const BISECT_STEPS: usize = 52;

/// Axis-aligned box `lo <= x <= hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidRegion(format!(
                "bounds have lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (a, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite()) || l > h {
                return Err(Error::InvalidRegion(format!(
                    "axis {a} is not well ordered: [{l}, {h}]"
                )));
            }
        }
        Ok(Region { lo, hi })
    }

    /// Box of half-width `half` on every axis around `center`.
    pub fn cube(center: &[f64], half: f64) -> Result<Self> {
        Self::new(
            center.iter().map(|c| c - half).collect(),
            center.iter().map(|c| c + half).collect(),
        )
    }

    /// Box with per-axis half-widths around `center`.
    pub fn around(center: &[f64], half: &[f64]) -> Result<Self> {
        Self::new(
            center.iter().zip(half).map(|(c, h)| c - h).collect(),
            center.iter().zip(half).map(|(c, h)| c + h).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn half_widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (h - l)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    /// Nodes per axis at step `h`.
    pub fn axis_counts(&self, h: f64) -> Vec<usize> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, u)| ((u - l) / h + 1e-9).floor() as usize + 1)
            .collect()
    }

    pub fn node_count(&self, h: f64) -> u128 {
        self.axis_counts(h).iter().map(|&n| n as u128).product()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOptions {
    pub resolution: f64,
    pub tol: f64,
    pub node_budget: u64,
    /// Refine candidates inside their cells. Ignored for discrete geometries.
    pub refine: bool,
}

impl ScanOptions {
    pub fn new(resolution: f64, tol: f64) -> Self {
        ScanOptions {
            resolution,
            tol,
            node_budget: DEFAULT_NODE_BUDGET,
            refine: true,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be nonnegative, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ScanOutcome {
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub nodes: u64,
    pub inapplicable: u64,
    pub evaluations: u64,
}

struct Grid<'a> {
    region: &'a Region,
    h: f64,
    counts: Vec<usize>,
    strides: Vec<usize>,
}

impl<'a> Grid<'a> {
    fn new(region: &'a Region, h: f64) -> Self {
        let counts = region.axis_counts(h);
        let mut strides = vec![1; counts.len()];
        for a in (0..counts.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * counts[a + 1];
        }
        Grid {
            region,
            h,
            counts,
            strides,
        }
    }

    fn len(&self) -> usize {
        self.counts.iter().product()
    }

    fn coords(&self, mut idx: usize, out: &mut [f64]) {
        for (a, x) in out.iter_mut().enumerate().take(self.counts.len()) {
            let i = idx / self.strides[a];
            idx %= self.strides[a];
            *x = self.region.lo[a] + i as f64 * self.h;
        }
    }

    fn axis_index(&self, idx: usize, a: usize) -> usize {
        (idx / self.strides[a]) % self.counts[a]
    }
}

/// Scans `region` and returns the accepted points in lexicographic order.
///
/// `residual` returns `None` at inapplicable probes; those never become
/// candidates and are tallied in the outcome.
pub(crate) fn scan<F>(region: &Region, opts: &ScanOptions, discrete: bool, residual: F) -> Result<ScanOutcome>
where
    F: Fn(&[f64]) -> Option<f64> + Sync + Send,
{
    scan_impl(region, opts, discrete, &residual, None)
}

/// Writes the equation values at a point into the output slice; `None`
/// marks an inapplicable probe.
pub(crate) type SystemFn<'a> = dyn Fn(&[f64], &mut [f64]) -> Option<()> + Sync + 'a;

/// A system of `m` equations whose common zeros are the target set.
pub(crate) struct System<'a> {
    pub m: usize,
    pub eval: &'a SystemFn<'a>,
}

impl System<'_> {
    fn norm(&self, x: &[f64]) -> Option<f64> {
        let mut f = vec![0.0; self.m];
        (self.eval)(x, &mut f)?;
        Some(f.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
}

/// Like [`scan`], for a residual that combines several equations (e.g. the
/// maximum of their magnitudes). Candidates are polished by damped
/// Gauss-Newton steps on the system inside their cell, falling back to the
/// axis search on the system norm. Coordinate search alone stalls on the
/// ridges of a max-residual and crawls towards degenerate roots; acceptance
/// still uses `residual`.
pub(crate) fn scan_system<F>(
    region: &Region,
    opts: &ScanOptions,
    discrete: bool,
    residual: &F,
    system: &System,
) -> Result<ScanOutcome>
where
    F: Fn(&[f64]) -> Option<f64> + Sync + Send,
{
    scan_impl(region, opts, discrete, residual, Some(system))
}

fn scan_impl<F>(
    region: &Region,
    opts: &ScanOptions,
    discrete: bool,
    residual: &F,
    system: Option<&System>,
) -> Result<ScanOutcome>
where
    F: Fn(&[f64]) -> Option<f64> + Sync + Send,
{
    opts.validate()?;
    let nodes = region.node_count(opts.resolution);
    if nodes > opts.node_budget as u128 {
        return Err(Error::BudgetExceeded {
            nodes,
            budget: opts.node_budget,
        });
    }
    let grid = Grid::new(region, opts.resolution);
    let n = grid.len();
    let dim = region.dim();

    let values: Vec<f64> = par::map_chunks(n, CHUNK, |range| {
        let mut x = vec![0.0; dim];
        range
            .map(|i| {
                grid.coords(i, &mut x);
                residual(&x).filter(|v| v.is_finite()).unwrap_or(f64::NAN)
            })
            .collect()
    });
    let inapplicable = values.iter().filter(|v| v.is_nan()).count() as u64;

    let tol = opts.tol;
    let candidates: Vec<usize> = par::map_chunks(n, CHUNK, |range| {
        range
            .filter(|&i| {
                let r = values[i];
                if r.is_nan() {
                    return false;
                }
                let slack = if discrete { 0.0 } else { neighbour_slack(&grid, &values, i) };
                r.abs() <= tol + slack
            })
            .collect()
    });

    let refine = opts.refine && !discrete;
    let refined: Vec<(Vec<f64>, f64, u64)> = par::map_vec(&candidates, |&i| {
        let mut x = vec![0.0; dim];
        grid.coords(i, &mut x);
        if !refine {
            return (x, values[i], 0);
        }
        let Some(system) = system else {
            return refine_in_cell(residual, region, &x, values[i], opts.resolution, tol);
        };
        let eval = |y: &[f64]| residual(y).filter(|v| v.is_finite()).unwrap_or(f64::NAN);
        let (y, mut evals) = gauss_newton_in_cell(system, region, &x, opts.resolution, tol);
        let r = eval(&y);
        evals += 1;
        if r.abs() <= tol {
            return (y, r, evals);
        }
        let start = system.norm(&x).unwrap_or(f64::NAN);
        let (z, _, more) = refine_in_cell(&|p: &[f64]| system.norm(p), region, &x, start, opts.resolution, tol);
        let rz = eval(&z);
        evals += more + 1;
        // Keep the best of the node, the Newton point and the axis-search point.
        let mut best = (x, values[i]);
        for cand in [(y, r), (z, rz)] {
            if cand.1.abs() < best.1.abs() {
                best = cand;
            }
        }
        (best.0, best.1, evals)
    });

    let mut evaluations = n as u64;
    let mut accepted: Vec<(Vec<f64>, f64)> = Vec::new();
    for (x, r, evals) in refined {
        evaluations += evals;
        if r.abs() <= tol {
            accepted.push((x, r));
        }
    }
    accepted.sort_by(|a, b| lex_cmp(&a.0, &b.0).then(a.1.total_cmp(&b.1)));
    accepted.dedup_by(|a, b| a.0 == b.0);

    let (points, residuals) = accepted.into_iter().unzip();
    Ok(ScanOutcome {
        points,
        residuals,
        nodes: n as u64,
        inapplicable,
        evaluations,
    })
}

/// Half the largest change to an axis neighbour, summed over axes: a linear
/// estimate of how far the residual can move between the node and the
/// corner of its cell.
fn neighbour_slack(grid: &Grid, values: &[f64], i: usize) -> f64 {
    let r = values[i];
    let mut slack = 0.0;
    for a in 0..grid.counts.len() {
        let k = grid.axis_index(i, a);
        let mut worst: f64 = 0.0;
        if k > 0 {
            let v = values[i - grid.strides[a]];
            if !v.is_nan() {
                worst = worst.max((v - r).abs());
            }
        }
        if k + 1 < grid.counts[a] {
            let v = values[i + grid.strides[a]];
            if !v.is_nan() {
                worst = worst.max((v - r).abs());
            }
        }
        slack += 0.5 * worst;
    }
    slack
}

fn refine_in_cell<F>(residual: &F, region: &Region, node: &[f64], r0: f64, h: f64, tol: f64) -> (Vec<f64>, f64, u64)
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let target = tol / 10.0;
    let mut x = node.to_vec();
    let mut r = r0;
    let mut evals = 0u64;
    let mut eval = |y: &[f64], evals: &mut u64| -> f64 {
        *evals += 1;
        residual(y).filter(|v| v.is_finite()).unwrap_or(f64::NAN)
    };

    for _ in 0..SWEEPS {
        if r.abs() <= target {
            break;
        }
        let before = r.abs();
        for a in 0..x.len() {
            if r.abs() <= target {
                break;
            }
            let lo = (node[a] - 0.5 * h).max(region.lo[a]);
            let hi = (node[a] + 0.5 * h).min(region.hi[a]);
            if hi <= lo {
                continue;
            }
            let (t, v) = refine_axis(&mut eval, &mut evals, &mut x, a, lo, hi, r, target);
            if v.abs() < r.abs() {
                x[a] = t;
                r = v;
            }
        }
        if r.abs() >= before {
            break;
        }
    }
    (x, r, evals)
}

#[allow(clippy::too_many_arguments)]
fn refine_axis<E>(
    eval: &mut E,
    evals: &mut u64,
    x: &mut [f64],
    a: usize,
    lo: f64,
    hi: f64,
    r: f64,
    target: f64,
) -> (f64, f64)
where
    E: FnMut(&[f64], &mut u64) -> f64,
{
    let x0 = x[a];
    let mut at = |t: f64, x: &mut [f64], evals: &mut u64| {
        x[a] = t;
        let v = eval(x, evals);
        x[a] = x0;
        v
    };

    let f_lo = at(lo, x, evals);
    let f_hi = at(hi, x, evals);
    let mut best = (x0, r);
    for (t, v) in [(lo, f_lo), (hi, f_hi)] {
        if !v.is_nan() && v.abs() < best.1.abs() {
            best = (t, v);
        }
    }

    // Sign change against the current point: bisect towards the root.
    let bracket = if !f_lo.is_nan() && f_lo * r < 0.0 {
        Some((lo, f_lo, x0, r))
    } else if !f_hi.is_nan() && f_hi * r < 0.0 {
        Some((x0, r, hi, f_hi))
    } else {
        None
    };
    if let Some((mut a0, mut fa, mut b0, _)) = bracket {
        for _ in 0..BISECT_STEPS {
            let m = 0.5 * (a0 + b0);
            if m == a0 || m == b0 {
                break;
            }
            let fm = at(m, x, evals);
            if fm.is_nan() {
                break;
            }
            if fm.abs() < best.1.abs() {
                best = (m, fm);
            }
            if fm.abs() <= target * 1e-3 {
                break;
            }
            if fm * fa < 0.0 {
                b0 = m;
            } else {
                a0 = m;
                fa = fm;
            }
        }
        return best;
    }

    // No bracket: golden-section search on |r| over the cell.
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let score = |v: f64| if v.is_nan() { f64::INFINITY } else { v.abs() };
    let (mut a0, mut b0) = (lo, hi);
    let mut c = b0 - inv_phi * (b0 - a0);
    let mut d = a0 + inv_phi * (b0 - a0);
    let mut fc = at(c, x, evals);
    let mut fd = at(d, x, evals);
    for _ in 0..GOLDEN_STEPS {
        for (t, v) in [(c, fc), (d, fd)] {
            if !v.is_nan() && v.abs() < best.1.abs() {
                best = (t, v);
            }
        }
        if best.1.abs() <= target {
            break;
        }
        if score(fc) <= score(fd) {
            b0 = d;
            d = c;
            fd = fc;
            c = b0 - inv_phi * (b0 - a0);
            fc = at(c, x, evals);
        } else {
            a0 = c;
            c = d;
            fc = fd;
            d = a0 + inv_phi * (b0 - a0);
            fd = at(d, x, evals);
        }
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if !v.is_nan() && v.abs() < best.1.abs() {
            best = (t, v);
        }
    }
    best
}

/// Damped minimum-norm Gauss-Newton on `system`, confined to the cell of
/// `node`. The Jacobian is taken by central differences.
fn gauss_newton_in_cell(system: &System, region: &Region, node: &[f64], h: f64, tol: f64) -> (Vec<f64>, u64) {
    const STEPS: usize = 40;
    let n = node.len();
    let m = system.m;
    let lo: Vec<f64> = (0..n).map(|a| (node[a] - 0.5 * h).max(region.lo[a])).collect();
    let hi: Vec<f64> = (0..n).map(|a| (node[a] + 0.5 * h).min(region.hi[a])).collect();
    let mut evals = 0u64;
    let mut f = vec![0.0; m];
    let eval = |x: &[f64], out: &mut [f64], evals: &mut u64| {
        *evals += 1;
        (system.eval)(x, out).is_some() && out.iter().all(|v| v.is_finite())
    };
    let mut x = node.to_vec();
    if !eval(&x, &mut f, &mut evals) {
        return (x, evals);
    }
    let mut norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = 1e-3 * tol;
    let mut jac = nalgebra::DMatrix::<f64>::zeros(m, n);
    let (mut fp, mut fm, mut trial_f) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut probe = x.clone();
    for _ in 0..STEPS {
        if norm <= target {
            break;
        }
        for a in 0..n {
            let step = 1e-6 * (h + x[a].abs() * 1e-3);
            probe.copy_from_slice(&x);
            probe[a] = x[a] + step;
            let ok_p = eval(&probe, &mut fp, &mut evals);
            probe[a] = x[a] - step;
            let ok_m = eval(&probe, &mut fm, &mut evals);
            if !(ok_p && ok_m) {
                return (x, evals);
            }
            for k in 0..m {
                jac[(k, a)] = (fp[k] - fm[k]) / (2.0 * step);
            }
        }
        let jjt = &jac * jac.transpose();
        let damping = 1e-12 * jjt.trace().abs() + f64::MIN_POSITIVE;
        let lhs = jjt + nalgebra::DMatrix::identity(m, m) * damping;
        let rhs = nalgebra::DVector::from_column_slice(&f);
        let Some(z) = lhs.lu().solve(&rhs) else { break };
        let delta = jac.transpose() * z;
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let trial: Vec<f64> = (0..n).map(|a| (x[a] - scale * delta[a]).clamp(lo[a], hi[a])).collect();
            if eval(&trial, &mut trial_f, &mut evals) {
                let t_norm = trial_f.iter().map(|v| v * v).sum::<f64>().sqrt();
                if t_norm < norm {
                    x = trial;
                    f.copy_from_slice(&trial_f);
                    norm = t_norm;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_validation_and_counts() {
        assert!(Region::new(vec![0.0], vec![-1.0]).is_err());
        assert!(Region::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Region::new(vec![f64::NAN], vec![1.0]).is_err());
        let r = Region::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(r.axis_counts(0.25), vec![5, 9]);
        assert_eq!(r.node_count(0.25), 45);
        assert_eq!(Region::cube(&[1.0, 2.0], 0.5).unwrap().center(), vec![1.0, 2.0]);
    }

    #[test]
    fn budget_is_enforced() {
        let r = Region::cube(&[0.0, 0.0, 0.0], 1.0).unwrap();
        let mut o = ScanOptions::new(0.01, 1e-3);
        o.node_budget = 1000;
        assert!(matches!(scan(&r, &o, false, |_| Some(0.0)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn circle_is_found_between_nodes() {
        // Coarse grid, tight tolerance: nodes almost never sit on the circle.
        let r = Region::cube(&[0.0, 0.0], 1.5).unwrap();
        let o = ScanOptions::new(0.1, 1e-6);
        let out = scan(&r, &o, false, |x| Some((x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0)).unwrap();
        assert!(out.points.len() > 40, "{}", out.points.len());
        for (p, res) in out.points.iter().zip(&out.residuals) {
            assert!(res.abs() <= 1e-6);
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() <= 1e-6);
        }
        let mut sorted = out.points.clone();
        sorted.sort_by(|a, b| lex_cmp(a, b));
        assert_eq!(sorted, out.points);
    }

    #[test]
    fn inapplicable_nodes_are_counted() {
        let r = Region::new(vec![-1.0], vec![1.0]).unwrap();
        let o = ScanOptions::new(0.5, 0.1);
        let out = scan(&r, &o, false, |x| (x[0] >= 0.0).then_some(x[0])).unwrap();
        assert_eq!(out.nodes, 5);
        assert_eq!(out.inapplicable, 2);
        assert!(out.points.iter().all(|p| p[0] >= 0.0));
    }
}
