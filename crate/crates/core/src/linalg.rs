//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is sized for dimensions up to 64; there is no blocking and
//! no external BLAS. The eigensolver is cyclic Jacobi and the exponential is
//! Taylor scaling-and-squaring.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

pub type C64 = Complex64;

/// Input validation tolerance for Hermiticity and positivity.
pub const TAU_HERM: f64 = 1e-9;
/// Eigensolver residual tolerance.
pub const TAU_EIG: f64 = 1e-10;
/// Eigenvalues at or below this count as zero when computing ranks.
pub const TAU_RANK: f64 = 1e-10;
/// Pattern tolerance for standard-form extraction.
pub const TAU_FORM: f64 = 1e-8;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("non-finite matrix entry".into()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Square matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let m = if n == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = if n == 0 { 0 } else { rows[0].len() };
        Self::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// Column vector |v⟩.
    pub fn column(v: &[C64]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i])
    }

    /// |v⟩⟨w|.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// ⟨v|M|w⟩.
    pub fn sandwich_vec(&self, v: &[C64], w: &[C64]) -> C64 {
        let mw = self.matvec(w);
        v.iter().zip(&mw).map(|(a, b)| a.conj() * b).sum()
    }

    /// A·M·A† for a square A.
    pub fn conjugate_by(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(a * self) * &a.adjoint()
    }

    pub fn hermitian_part(&self) -> ComplexMatrix {
        (self + &self.adjoint()).scale_re(0.5)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_residual() <= tol
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && (&(&self.adjoint() * self) - &ComplexMatrix::identity(self.rows)).max_abs() <= tol
    }

    /// Largest entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Hilbert–Schmidt inner product tr(A†B).
    pub fn hs_inner(&self, other: &ComplexMatrix) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix difference shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix sum shape mismatch"
        );
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

/// Ordered subsystem dimensions of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TensorShape {
    factors: Vec<usize>,
}

impl TensorShape {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Dimension("empty tensor shape".into()));
        }
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::Dimension(format!(
                "subsystem dimensions must be >= 2, got {factors:?}"
            )));
        }
        Ok(TensorShape { factors })
    }

    /// `n` copies of dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }

    /// Concatenation `self ⊗ other`.
    pub fn join(&self, other: &TensorShape) -> TensorShape {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        TensorShape { factors: f }
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(Error::Dimension(format!(
                "shape {:?} (total {}) does not fit a {}x{} matrix",
                self.factors,
                self.total(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    /// Splits a flat index into per-subsystem digits (row-major).
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &d) in out.iter_mut().zip(&self.factors).rev() {
            *slot = idx % d;
            idx /= d;
        }
        out
    }

    pub fn flat(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of a list, left to right.
pub fn kron_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for m in ms {
        out = kron(&out, m);
    }
    out
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems retain their order.
pub fn partial_trace(
    m: &ComplexMatrix,
    shape: &TensorShape,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    shape.check(m)?;
    let n = shape.len();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.iter().any(|&k| k >= n) {
        return Err(Error::Dimension(format!(
            "subsystem index out of range in {keep:?}"
        )));
    }
    let kept: Vec<usize> = keep_sorted.iter().map(|&k| shape.factors[k]).collect();
    let traced: Vec<usize> = (0..n).filter(|k| !keep_sorted.contains(k)).collect();
    let dk: usize = kept.iter().product();
    let dt: usize = traced.iter().map(|&k| shape.factors[k]).product();
    let kept_shape = TensorShape {
        factors: if kept.is_empty() { vec![1] } else { kept },
    };
    let traced_shape = TensorShape {
        factors: if traced.is_empty() {
            vec![1]
        } else {
            traced.iter().map(|&k| shape.factors[k]).collect()
        },
    };
    let compose = |kd: &[usize], td: &[usize]| {
        let mut digits = vec![0; n];
        for (slot, &k) in keep_sorted.iter().enumerate() {
            digits[k] = kd[slot];
        }
        for (slot, &k) in traced.iter().enumerate() {
            digits[k] = td[slot];
        }
        shape.flat(&digits)
    };
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        let id = kept_shape.digits(i);
        for j in 0..dk {
            let jd = kept_shape.digits(j);
            let mut acc = ZERO;
            for t in 0..dt {
                let td = traced_shape.digits(t);
                acc += m[(compose(&id, &td), compose(&jd, &td))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the tensor factor `subsystem` only.
pub fn partial_transpose(
    m: &ComplexMatrix,
    shape: &TensorShape,
    subsystem: usize,
) -> Result<ComplexMatrix> {
    shape.check(m)?;
    if subsystem >= shape.len() {
        return Err(Error::Dimension(format!(
            "subsystem {subsystem} out of range for {} factors",
            shape.len()
        )));
    }
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let mut id = shape.digits(i);
        for j in 0..n {
            let mut jd = shape.digits(j);
            std::mem::swap(&mut id[subsystem], &mut jd[subsystem]);
            out[(shape.flat(&id), shape.flat(&jd))] = m[(i, j)];
            std::mem::swap(&mut id[subsystem], &mut jd[subsystem]);
        }
    }
    Ok(out)
}

/// Reorders tensor factors: new factor `k` is old factor `perm[k]`.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    shape: &TensorShape,
    perm: &[usize],
) -> Result<ComplexMatrix> {
    shape.check(m)?;
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..shape.len()).collect::<Vec<_>>() {
        return Err(Error::Dimension(format!(
            "{perm:?} is not a permutation of {} factors",
            shape.len()
        )));
    }
    let idx = permutation_index_map(shape, perm);
    let n = m.rows();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| m[(idx[i], idx[j])]))
}

/// Same reordering applied to a state vector.
pub fn permute_vector(v: &[C64], shape: &TensorShape, perm: &[usize]) -> Vec<C64> {
    let idx = permutation_index_map(shape, perm);
    idx.iter().map(|&k| v[k]).collect()
}

fn permutation_index_map(shape: &TensorShape, perm: &[usize]) -> Vec<usize> {
    let new_shape = TensorShape {
        factors: perm.iter().map(|&p| shape.factors[p]).collect(),
    };
    (0..shape.total())
        .map(|new| {
            let nd = new_shape.digits(new);
            let mut od = vec![0; perm.len()];
            for (k, &p) in perm.iter().enumerate() {
                od[p] = nd[k];
            }
            shape.flat(&od)
        })
        .collect()
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `i` belongs to `values[i]`.
    pub vectors: ComplexMatrix,
}

/// Cyclic complex Jacobi eigensolver.
pub fn herm_eig(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Dimension(
            "eigendecomposition needs a square matrix".into(),
        ));
    }
    let res = m.hermiticity_residual();
    if res > TAU_HERM * m.max_abs().max(1.0) {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (residual {res:e})"
        )));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let ph = apq / r;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // Rotation on (p,q): diag(1, conj(ph)) · [[c, s], [-s, c]].
                let v00 = c(cs, 0.0);
                let v01 = c(sn, 0.0);
                let v10 = ph.conj() * (-sn);
                let v11 = ph.conj() * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * v00 + akq * v10;
                    a[(k, q)] = akp * v01 + akq * v11;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = v00.conj() * apk + v10.conj() * aqk;
                    a[(q, k)] = v01.conj() * apk + v11.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * v00 + vkq * v10;
                    v[(k, q)] = vkp * v01 + vkq * v11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(Eigen { values, vectors })
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn mat_exp(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "exponential of a non-square matrix");
    let n = m.rows();
    let norm = m.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale_re(0.5f64.powi(squarings));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = (&term * &a).scale_re(1.0 / k as f64);
        result += &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Solves a small dense real system with partial pivoting. Returns `None` if singular.
pub fn solve_real(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |s, x| s.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

/// Determinant of a small real matrix by elimination.
pub fn det_real(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty");
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(*herm_eig(m)?.values.last().unwrap_or(&0.0))
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨v|w⟩.
pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}
