//! Auditing distance axioms and world-function axioms on finite samples.
//!
//! Violations are data: each check reports PASS or the worst counterexample
//! found, with ties broken by the smallest sample indices so reports are
//! identical however the triple enumeration is partitioned.

use serde::Serialize;

use crate::error::Result;
use crate::kernel::{GeometrySpec, Point};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// ρ real and nonnegative, ρ(P,Q) = ρ(Q,P).
    NonNegativitySymmetry,
    /// ρ(P,Q) = 0 iff P = Q.
    IdentityOfIndiscernibles,
    /// ρ(P,Q) + ρ(P,R) >= ρ(R,Q).
    Triangle,
    /// σ(P,P) = 0 and σ(P,Q) = σ(Q,P), exactly.
    ZeroDiagonalSymmetry,
    /// √(2σ(P,Q)) + √(2σ(P,R)) <= √(2σ(R,Q)) for σ(R,Q) > 0.
    ReversedTriangle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Sample indices. Triangle-type witnesses list `[end, end, via]`.
    pub indices: Vec<usize>,
    pub points: Vec<Point>,
    /// Amount by which the axiom is violated (positive).
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Tuples the axiom was evaluated on.
    pub checked: usize,
    /// Tuples excluded because a needed radical had 2σ < 0, or because the
    /// tuple lies outside the axiom's domain.
    pub inapplicable: usize,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// Worst violation so far: larger residual wins, then smaller indices.
#[derive(Clone, Debug)]
struct Worst {
    residual: f64,
    indices: Vec<usize>,
}

fn better(a: Option<Worst>, b: Option<Worst>) -> Option<Worst> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let ord = b
                .residual
                .total_cmp(&a.residual)
                .then_with(|| a.indices.cmp(&b.indices));
            if ord.is_le() {
                Some(a)
            } else {
                Some(b)
            }
        }
    }
}

fn offer(slot: &mut Option<Worst>, residual: f64, indices: Vec<usize>) {
    let cand = Some(Worst { residual, indices });
    *slot = better(slot.take(), cand);
}

struct Tally {
    checked: usize,
    inapplicable: usize,
    worst: Option<Worst>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checked: 0,
            inapplicable: 0,
            worst: None,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.inapplicable += other.inapplicable;
        self.worst = better(self.worst, other.worst);
        self
    }

    fn finish(self, axiom: Axiom, sample: &[Point]) -> AxiomCheck {
        let witness = self.worst.map(|w| Witness {
            points: w.indices.iter().map(|&i| sample[i].clone()).collect(),
            indices: w.indices,
            residual: w.residual,
        });
        AxiomCheck {
            axiom,
            passed: witness.is_none(),
            checked: self.checked,
            inapplicable: self.inapplicable,
            witness,
        }
    }
}

struct SigmaTable {
    n: usize,
    s: Vec<f64>,
}

impl SigmaTable {
    fn new(geom: &GeometrySpec, sample: &[Point]) -> Result<Self> {
        for p in sample {
            geom.check_point(p)?;
        }
        let n = sample.len();
        let mut s = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                s[i * n + j] = geom
                    .sigma_at(sample[i].coords(), sample[j].coords())
                    .expect("labels validated");
            }
        }
        Ok(SigmaTable { n, s })
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.n + j]
    }

    /// ρ = √(2σ) when real.
    #[inline]
    fn rho(&self, i: usize, j: usize) -> Option<f64> {
        let two = 2.0 * self.get(i, j);
        (two >= 0.0).then(|| two.sqrt())
    }
}

fn triangle_witness(end_a: usize, end_b: usize, via: usize) -> Vec<usize> {
    let (a, b) = if end_a <= end_b {
        (end_a, end_b)
    } else {
        (end_b, end_a)
    };
    vec![a, b, via]
}

/// Checks nonnegativity/symmetry, identity of indiscernibles and the
/// triangle axiom on `sample`, using ρ = √(2σ).
///
/// The triangle axiom is tested over all ordered triples; triples involving
/// a pair with 2σ < 0 are counted as inapplicable since ρ is not real there.
pub fn audit_metric_axioms(geom: &GeometrySpec, sample: &[Point], tol: f64) -> Result<AxiomReport> {
    let t = SigmaTable::new(geom, sample)?;
    let n = t.n;

    let mut first = Tally::new();
    for i in 0..n {
        for j in 0..n {
            first.checked += 1;
            let two = 2.0 * t.get(i, j);
            if two < -tol {
                offer(&mut first.worst, -two, vec![i, j]);
            }
            let asym = (t.get(i, j) - t.get(j, i)).abs();
            if asym > tol {
                offer(&mut first.worst, asym, vec![i, j]);
            }
        }
    }

    let mut ident = Tally::new();
    for i in 0..n {
        for j in 0..n {
            let Some(r) = t.rho(i, j) else {
                ident.inapplicable += 1;
                continue;
            };
            ident.checked += 1;
            let same = sample[i] == sample[j];
            if same && r > tol {
                offer(&mut ident.worst, r, vec![i, j]);
            } else if !same && r <= tol {
                offer(&mut ident.worst, tol - r, vec![i, j]);
            }
        }
    }

    let tri = par::map_reduce(
        n,
        |p| {
            let mut tally = Tally::new();
            for q in 0..n {
                for r in 0..n {
                    match (t.rho(p, q), t.rho(p, r), t.rho(r, q)) {
                        (Some(pq), Some(pr), Some(rq)) => {
                            tally.checked += 1;
                            let deficit = rq - pq - pr;
                            if deficit > tol * (1.0 + rq) {
                                offer(&mut tally.worst, deficit, triangle_witness(r, q, p));
                            }
                        }
                        _ => tally.inapplicable += 1,
                    }
                }
            }
            tally
        },
        Tally::new,
        Tally::merge,
    );

    Ok(AxiomReport {
        checks: vec![
            first.finish(Axiom::NonNegativitySymmetry, sample),
            ident.finish(Axiom::IdentityOfIndiscernibles, sample),
            tri.finish(Axiom::Triangle, sample),
        ],
    })
}

/// Checks σ(P,P) = 0 and exact symmetry, then the reversed triangle
/// inequality.
///
/// A triple (P,Q,R) is applicable when σ(R,Q) > 0, both other radicands are
/// nonnegative, and R,Q span the longest side (σ(P,Q), σ(P,R) <= σ(R,Q)).
/// For timelike triples of a Minkowski kernel the last condition is exactly
/// "P lies causally between R and Q", the configuration the inequality
/// constrains; other triples are counted as inapplicable.
pub fn audit_world_function_axioms(
    geom: &GeometrySpec,
    sample: &[Point],
    tol: f64,
) -> Result<AxiomReport> {
    let t = SigmaTable::new(geom, sample)?;
    let n = t.n;

    let mut basic = Tally::new();
    for i in 0..n {
        basic.checked += 1;
        if t.get(i, i) != 0.0 {
            offer(&mut basic.worst, t.get(i, i).abs(), vec![i, i]);
        }
        for j in (i + 1)..n {
            basic.checked += 1;
            if t.get(i, j) != t.get(j, i) {
                offer(&mut basic.worst, (t.get(i, j) - t.get(j, i)).abs(), vec![i, j]);
            }
        }
    }

    let reversed = par::map_reduce(
        n,
        |p| {
            let mut tally = Tally::new();
            for q in 0..n {
                for r in 0..n {
                    let (rq, pq, pr) = (t.get(r, q), t.get(p, q), t.get(p, r));
                    if !(rq > 0.0 && pq >= 0.0 && pr >= 0.0 && pq <= rq && pr <= rq) {
                        tally.inapplicable += 1;
                        continue;
                    }
                    tally.checked += 1;
                    let long = (2.0 * rq).sqrt();
                    let excess = (2.0 * pq).sqrt() + (2.0 * pr).sqrt() - long;
                    if excess > tol * (1.0 + long) {
                        offer(&mut tally.worst, excess, triangle_witness(r, q, p));
                    }
                }
            }
            tally
        },
        Tally::new,
        Tally::merge,
    );

    Ok(AxiomReport {
        checks: vec![
            basic.finish(Axiom::ZeroDiagonalSymmetry, sample),
            reversed.finish(Axiom::ReversedTriangle, sample),
        ],
    })
}
