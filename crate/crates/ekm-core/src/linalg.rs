//! Self-contained dense real matrices and a cyclic Jacobi eigensolver.
//!
//! The solver only has to handle the small M x M Gram matrices that arise
//! from training sets (M = number of images, a few hundred at most), so the
//! Jacobi rotation method is used: it is simple, preserves symmetry exactly,
//! and produces an orthogonal eigenvector set without any re-orthogonalization
//! pass. All arithmetic is f64.

use thiserror::Error;

/// Relative tolerance used by default for the eigensolver, both for the
/// symmetry pre-check and the off-diagonal convergence target.
pub const DEFAULT_EIG_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 50;

#[derive(Debug, Error, PartialEq)]
pub enum LinAlgError {
    #[error("dimension mismatch in {op}: {lhs} vs {rhs}")]
    DimensionMismatch {
        op: &'static str,
        lhs: String,
        rhs: String,
    },
    #[error("matrix is not symmetric within tolerance (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NotConverged { sweeps: usize, off_norm: f64 },
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
}

/// Row-major dense matrix of f64.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// One eigenvalue with its unit-norm eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinAlgError> {
        if data.len() != rows * cols {
            return Err(LinAlgError::DimensionMismatch {
                op: "from_vec",
                lhs: format!("{rows}x{cols}"),
                rhs: format!("{} entries", data.len()),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(LinAlgError::NonFiniteEntry);
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Build from nested rows; handy in tests.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinAlgError::DimensionMismatch {
                    op: "from_rows",
                    lhs: format!("{c} cols"),
                    rhs: format!("{} cols", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        DenseMatrix::from_vec(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `Aᵀ A` for a d x M matrix, yielding an M x M result.
///
/// Only the upper triangle is computed; the lower is mirrored from it, so
/// the output is symmetric bit-for-bit.
pub fn gram(a: &DenseMatrix) -> DenseMatrix {
    let m = a.cols;
    let mut g = DenseMatrix::zeros(m, m);
    // Accumulate row outer products: one sequential pass over `a`, with the
    // M x M accumulator staying cache-resident.
    for r in 0..a.rows {
        let row = a.row(r);
        for i in 0..m {
            let ri = row[i];
            if ri != 0.0 {
                let out = &mut g.data[i * m..(i + 1) * m];
                for j in i..m {
                    out[j] += ri * row[j];
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            g.data[i * m + j] = g.data[j * m + i];
        }
    }
    g
}

/// `A x`.
pub fn matvec(a: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>, LinAlgError> {
    if a.cols != x.len() {
        return Err(LinAlgError::DimensionMismatch {
            op: "matvec",
            lhs: format!("{}x{}", a.rows, a.cols),
            rhs: format!("len {}", x.len()),
        });
    }
    Ok((0..a.rows).map(|i| dot(a.row(i), x)).collect())
}

/// `A B`.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, LinAlgError> {
    if a.cols != b.rows {
        return Err(LinAlgError::DimensionMismatch {
            op: "matmul",
            lhs: format!("{}x{}", a.rows, a.cols),
            rhs: format!("{}x{}", b.rows, b.cols),
        });
    }
    let mut c = DenseMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let arow = a.row(i);
        let crow = &mut c.data[i * b.cols..(i + 1) * b.cols];
        for (k, &aik) in arow.iter().enumerate() {
            if aik != 0.0 {
                let brow = b.row(k);
                for j in 0..b.cols {
                    crow[j] += aik * brow[j];
                }
            }
        }
    }
    Ok(c)
}

pub fn transpose(a: &DenseMatrix) -> DenseMatrix {
    let mut t = DenseMatrix::zeros(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            t.data[j * a.rows + i] = a.data[i * a.cols + j];
        }
    }
    t
}

pub fn scale(a: &DenseMatrix, factor: f64) -> DenseMatrix {
    DenseMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().map(|v| v * factor).collect(),
    }
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) -> Result<(), LinAlgError> {
    if x.len() != y.len() {
        return Err(LinAlgError::DimensionMismatch {
            op: "axpy",
            lhs: format!("len {}", x.len()),
            rhs: format!("len {}", y.len()),
        });
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
    Ok(())
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Sweeps run until the off-diagonal Frobenius norm drops to
/// `tol * ||S||_F` (or 50 sweeps elapse, which is an error). The returned
/// pairs are sorted by descending eigenvalue, and each vector is
/// sign-normalized so that its largest-magnitude component is positive
/// (ties broken by lowest index) — serialized results are reproducible.
///
/// `tol` also bounds the accepted input asymmetry: `max|S - Sᵀ|` must not
/// exceed `tol * max|S|`.
pub fn eig_symmetric(s: &DenseMatrix, tol: f64) -> Result<Vec<EigenPair>, LinAlgError> {
    eig_symmetric_sweeps(s, tol, MAX_SWEEPS)
}

fn eig_symmetric_sweeps(
    s: &DenseMatrix,
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<EigenPair>, LinAlgError> {
    let n = s.rows;
    if n != s.cols {
        return Err(LinAlgError::DimensionMismatch {
            op: "eig_symmetric",
            lhs: format!("{} rows", s.rows),
            rhs: format!("{} cols", s.cols),
        });
    }

    let max_abs = s.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let max_asym = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (s.get(i, j) - s.get(j, i)).abs())
        .fold(0.0f64, f64::max);
    if max_asym > tol * max_abs {
        return Err(LinAlgError::NotSymmetric {
            max_asymmetry: max_asym,
        });
    }

    // Work on an exactly-symmetrized copy. (s+s)/2 == s, so symmetric
    // inputs pass through bit-exactly.
    let mut a = s.clone();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, avg);
            a.set(j, i, avg);
        }
    }

    let norm_f = a.frobenius_norm();
    let target = tol * norm_f;
    let mut v = DenseMatrix::identity(n);

    let mut converged = false;
    let mut off = off_diagonal_norm(&a);
    for _ in 0..max_sweeps {
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && off > target {
        return Err(LinAlgError::NotConverged {
            sweeps: max_sweeps,
            off_norm: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .expect("eigenvalues are finite")
    });

    let pairs = order
        .into_iter()
        .map(|k| {
            let mut vector = v.column(k);
            fix_sign(&mut vector);
            EigenPair {
                value: a.get(k, k),
                vector,
            }
        })
        .collect();
    Ok(pairs)
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows;
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let x = a.get(i, j);
            sum += 2.0 * x * x;
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating the (p, q) entry.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
    let t = if theta.abs() > 1e150 {
        // theta^2 would overflow; in this regime t ~= 1/(2 theta).
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    let h = t * apq;
    let app = a.get(p, p);
    let aqq = a.get(q, q);
    a.set(p, p, app - h);
    a.set(q, q, aqq + h);
    a.set(p, q, 0.0);
    a.set(q, p, 0.0);

    let n = a.rows;
    for j in 0..n {
        if j == p || j == q {
            continue;
        }
        let g = a.get(j, p);
        let h = a.get(j, q);
        let gp = g - s * (h + g * tau);
        let hq = h + s * (g - h * tau);
        a.set(j, p, gp);
        a.set(p, j, gp);
        a.set(j, q, hq);
        a.set(q, j, hq);
    }
    for j in 0..n {
        let g = v.get(j, p);
        let h = v.get(j, q);
        v.set(j, p, g - s * (h + g * tau));
        v.set(j, q, h + s * (g - h * tau));
    }
}

/// Flip the vector so its largest-magnitude component (lowest index on
/// ties) is positive.
fn fix_sign(vector: &mut [f64]) {
    let mut best = 0;
    for (i, v) in vector.iter().enumerate() {
        if v.abs() > vector[best].abs() {
            best = i;
        }
    }
    if vector[best] < 0.0 {
        for v in vector.iter_mut() {
            *v = -*v;
        }
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force triple-loop product, the independent oracle for matmul
    /// and gram.
    fn naive_matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        let mut c = DenseMatrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = 0.0;
                for k in 0..a.cols() {
                    acc += a.get(i, k) * b.get(k, j);
                }
                c.set(i, j, acc);
            }
        }
        c
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| rng.random_range(-5.0..5.0)).collect();
        DenseMatrix::from_vec(rows, cols, data).unwrap()
    }

    fn random_symmetric(rng: &mut impl Rng, n: usize) -> DenseMatrix {
        let mut s = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-5.0..5.0);
                s.set(i, j, v);
                s.set(j, i, v);
            }
        }
        s
    }

    #[test]
    fn gram_of_identity_is_identity() {
        let eye = DenseMatrix::identity(2);
        assert_eq!(gram(&eye), eye);
    }

    #[test]
    fn gram_of_single_column_is_squared_norm() {
        let a = DenseMatrix::from_vec(2, 1, vec![3.0, 4.0]).unwrap();
        let g = gram(&a);
        assert_eq!((g.rows(), g.cols()), (1, 1));
        assert_eq!(g.get(0, 0), 25.0);
    }

    #[test]
    fn gram_matches_naive_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 5, 3);
        let expected = naive_matmul(&transpose(&a), &a);
        let g = gram(&a);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(g.get(i, j), expected.get(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gram_is_bitwise_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(&mut rng, 7, 4);
        let g = gram(&a);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.get(i, j).to_bits(), g.get(j, i).to_bits());
            }
        }
    }

    #[test]
    fn eig_of_diagonal_matrix() {
        let s = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 3.0]]).unwrap();
        let pairs = eig_symmetric(&s, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(pairs[0].value, 3.0);
        assert_eq!(pairs[1].value, 2.0);
        assert_eq!(pairs[0].vector, vec![0.0, 1.0]);
        assert_eq!(pairs[1].vector, vec![1.0, 0.0]);
    }

    #[test]
    fn eig_matches_characteristic_polynomial_2x2() {
        // [[2,1],[1,2]] has lambda^2 - 4 lambda + 3 = 0 -> 3 and 1.
        let s = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let pairs = eig_symmetric(&s, DEFAULT_EIG_TOL).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(pairs[0].value, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pairs[1].value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pairs[0].vector[0], inv_sqrt2, epsilon = 1e-12);
        assert_abs_diff_eq!(pairs[0].vector[1], inv_sqrt2, epsilon = 1e-12);
        // Sign rule: equal magnitudes tie-break to a positive first entry.
        assert_abs_diff_eq!(pairs[1].vector[0], inv_sqrt2, epsilon = 1e-12);
        assert_abs_diff_eq!(pairs[1].vector[1], -inv_sqrt2, epsilon = 1e-12);
    }

    #[test]
    fn eig_residuals_are_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = random_symmetric(&mut rng, 8);
        let pairs = eig_symmetric(&s, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(pairs.len(), 8);
        for pair in &pairs {
            let sv = matvec(&s, &pair.vector).unwrap();
            let residual: f64 = sv
                .iter()
                .zip(&pair.vector)
                .map(|(a, b)| (a - pair.value * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(residual <= 1e-8, "residual {residual}");
            assert_abs_diff_eq!(norm2(&pair.vector), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eig_of_1x1() {
        let s = DenseMatrix::from_vec(1, 1, vec![-4.5]).unwrap();
        let pairs = eig_symmetric(&s, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(pairs[0].value, -4.5);
        assert_eq!(pairs[0].vector, vec![1.0]);
    }

    #[test]
    fn eig_rejects_asymmetric_input() {
        let s = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.5, 1.0]]).unwrap();
        assert!(matches!(
            eig_symmetric(&s, DEFAULT_EIG_TOL),
            Err(LinAlgError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn eig_reports_non_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_symmetric(&mut rng, 6);
        // One sweep cannot reach a 1e-12 relative target from scratch.
        let err = eig_symmetric_sweeps(&s, 1e-12, 1).unwrap_err();
        match err {
            LinAlgError::NotConverged { sweeps, off_norm } => {
                assert_eq!(sweeps, 1);
                assert!(off_norm > 0.0);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn matvec_identity_and_zero() {
        let x = vec![1.0, -2.0, 3.0];
        assert_eq!(matvec(&DenseMatrix::identity(3), &x).unwrap(), x);
        assert_eq!(
            matvec(&DenseMatrix::zeros(3, 3), &x).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn matvec_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 4, 3);
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
        let got = matvec(&a, &x).unwrap();
        for i in 0..4 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += a.get(i, k) * x[k];
            }
            assert_abs_diff_eq!(got[i], acc, epsilon = 1e-12);
        }
    }

    #[test]
    fn matmul_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_matrix(&mut rng, 4, 3);
        let b = random_matrix(&mut rng, 3, 5);
        let got = matmul(&a, &b).unwrap();
        let expected = naive_matmul(&a, &b);
        for i in 0..4 {
            for j in 0..5 {
                assert_abs_diff_eq!(got.get(i, j), expected.get(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatches_are_errors() {
        let a = DenseMatrix::zeros(2, 3);
        let b = DenseMatrix::zeros(2, 3);
        assert!(matches!(
            matmul(&a, &b),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            matvec(&a, &[1.0, 2.0]),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
        let mut y = vec![0.0; 2];
        assert!(matches!(
            axpy(1.0, &[1.0, 2.0, 3.0], &mut y),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn transpose_scale_axpy_basics() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]).unwrap();
        let t = transpose(&a);
        assert_eq!((t.rows(), t.cols()), (2, 3));
        assert_eq!(t.get(0, 2), 5.0);
        assert_eq!(t.get(1, 0), 2.0);

        let doubled = scale(&a, 2.0);
        assert_eq!(doubled.get(2, 1), 12.0);

        let mut y = vec![1.0, 1.0];
        axpy(3.0, &[2.0, -1.0], &mut y).unwrap();
        assert_eq!(y, vec![7.0, -2.0]);
    }

    /// 2x2 and 3x3 determinants by cofactor expansion, the oracle for the
    /// eigenvalue-product invariant.
    fn det_cofactor(s: &DenseMatrix) -> f64 {
        match s.rows() {
            1 => s.get(0, 0),
            2 => s.get(0, 0) * s.get(1, 1) - s.get(0, 1) * s.get(1, 0),
            3 => {
                s.get(0, 0) * (s.get(1, 1) * s.get(2, 2) - s.get(1, 2) * s.get(2, 1))
                    - s.get(0, 1) * (s.get(1, 0) * s.get(2, 2) - s.get(1, 2) * s.get(2, 0))
                    + s.get(0, 2) * (s.get(1, 0) * s.get(2, 1) - s.get(1, 1) * s.get(2, 0))
            }
            _ => unreachable!(),
        }
    }

    fn arb_symmetric(max_n: usize) -> impl Strategy<Value = DenseMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(-10.0..10.0f64, n * (n + 1) / 2).prop_map(move |upper| {
                let mut s = DenseMatrix::zeros(n, n);
                let mut it = upper.into_iter();
                for i in 0..n {
                    for j in i..n {
                        let v = it.next().unwrap();
                        s.set(i, j, v);
                        s.set(j, i, v);
                    }
                }
                s
            })
        })
    }

    proptest! {
        #[test]
        fn eig_invariants(s in arb_symmetric(8)) {
            let n = s.rows();
            let pairs = eig_symmetric(&s, DEFAULT_EIG_TOL).unwrap();

            // Eigenvalue sum equals the trace.
            let trace: f64 = (0..n).map(|i| s.get(i, i)).sum();
            let sum: f64 = pairs.iter().map(|p| p.value).sum();
            prop_assert!((sum - trace).abs() <= 1e-8 * trace.abs() + 1e-12);

            // Sorted non-increasing.
            for w in pairs.windows(2) {
                prop_assert!(w[0].value >= w[1].value);
            }

            // Orthonormal as a matrix: ||V^T V - I||_F <= 1e-7.
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let d = dot(&pairs[i].vector, &pairs[j].vector)
                        - if i == j { 1.0 } else { 0.0 };
                    off += d * d;
                }
            }
            prop_assert!(off.sqrt() <= 1e-7);

            // Pairwise orthogonality when the eigenvalue gap is clear.
            for i in 0..n {
                for j in (i + 1)..n {
                    if (pairs[i].value - pairs[j].value).abs() > 1e-6 {
                        prop_assert!(dot(&pairs[i].vector, &pairs[j].vector).abs() <= 1e-8);
                    }
                }
            }

            // Residuals.
            let norm_f = s.frobenius_norm();
            for pair in &pairs {
                let sv = matvec(&s, &pair.vector).unwrap();
                let res: f64 = sv
                    .iter()
                    .zip(&pair.vector)
                    .map(|(a, b)| (a - pair.value * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                prop_assert!(res <= 1e-8 * norm_f.max(1.0));
            }
        }

        #[test]
        fn eig_product_matches_determinant(s in arb_symmetric(3)) {
            let pairs = eig_symmetric(&s, DEFAULT_EIG_TOL).unwrap();
            let prod: f64 = pairs.iter().map(|p| p.value).product();
            let det = det_cofactor(&s);
            prop_assert!((prod - det).abs() <= 1e-9 * (1.0 + det.abs()));
        }
    }
}
