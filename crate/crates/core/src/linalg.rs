//! Cyclic Jacobi diagonalisation for the small symmetric matrices that come
//! out of Gram constructions.

use nalgebra::DMatrix;

/// Off-diagonal Frobenius norm at which the iteration stops.
pub const JACOBI_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricEigen {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

fn off_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi rotations until the off-diagonal norm is at most
/// `JACOBI_TOL` times the matrix norm (absolute for tiny matrices).
pub fn symmetric_eigen(m: &DMatrix<f64>) -> SymmetricEigen {
    assert!(m.is_square(), "matrix must be square");
    let n = m.nrows();
    let mut a = m.clone();
    // Work on the symmetric part; callers pass symmetric input anyway.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let mut v = DMatrix::<f64>::identity(n, n);
    let threshold = JACOBI_TOL * a.norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymmetricEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_is_sorted() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 3.0, -1.0]));
        assert_eq!(symmetric_eigen(&m).values, vec![3.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn reconstructs_and_matches_library() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, -2.0, 1.0, 2.0, 0.5, -2.0, 0.5, -3.0]);
        let e = symmetric_eigen(&m);
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
        let back = &e.vectors * lambda * e.vectors.transpose();
        assert!((back - &m).norm() < 1e-9);
        let mut reference: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in e.values.iter().zip(reference) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn two_by_two_skew_basis() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eigen(&m);
        let s5 = 5f64.sqrt();
        assert!((e.values[0] - (3.0 + s5) / 2.0).abs() < 1e-12);
        assert!((e.values[1] - (3.0 - s5) / 2.0).abs() < 1e-12);
    }
}
