//! Dense matrices over any [`Scalar`], with exact elimination over `Q`.

use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_q, to_f64, Scalar, Q};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = (0..self.rows)
            .map(|r| &self.data[r * self.cols..(r + 1) * self.cols])
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, cols: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = std::mem::replace(&mut out[(i, j)], T::zero());
                    out[(i, j)] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = &self[(i, k)];
                    if a.is_zero() || x.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * x.clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc + x.clone() * y.clone();
    }
    acc
}

pub fn vadd<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vsub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vscale<T: Scalar>(a: &[T], c: &Q) -> Vec<T> {
    a.iter().map(|x| x.scale(c)).collect()
}

pub fn vneg<T: Scalar>(a: &[T]) -> Vec<T> {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

pub fn is_zero_vec<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Result of rational Gauss–Jordan elimination.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix<Q>,
    pub pivots: Vec<usize>,
}

/// Reduced row-echelon form; pivots chosen left to right, first nonzero row.
pub fn rref(m: &Matrix<Q>) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = Q::one() / a[(r, c)].clone();
        for j in c..a.cols {
            let x = &a[(r, j)] * &inv;
            a[(r, j)] = x;
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..a.cols {
                if a[(r, j)].is_zero() {
                    continue;
                }
                let x = &a[(i, j)] - &f * &a[(r, j)];
                a[(i, j)] = x;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

pub fn rank(m: &Matrix<Q>) -> usize {
    rref(m).pivots.len()
}

/// Null-space basis: one vector per free column (ascending), with that
/// variable set to 1 and the other free variables to 0.
pub fn null_space(m: &Matrix<Q>) -> Vec<Vec<Q>> {
    let Rref { matrix, pivots } = rref(m);
    let n = m.cols;
    let mut is_pivot = vec![None; n];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![Q::zero(); n];
        v[free] = Q::one();
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = -matrix[(row, free)].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn inverse(m: &Matrix<Q>) -> Result<Matrix<Q>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            got: m.cols,
        });
    }
    let n = m.rows;
    let mut aug = Matrix::<Q>::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = Q::one();
    }
    let r = rref(&aug);
    if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    let mut inv = Matrix::<Q>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = r.matrix[(i, n + j)].clone();
        }
    }
    Ok(inv)
}

/// Determinant by fraction-exact elimination.
pub fn det(m: &Matrix<Q>) -> Q {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            for j in 0..n {
                a.data.swap(p * n + j, c * n + j);
            }
            d = -d;
        }
        let piv = a[(c, c)].clone();
        d *= &piv;
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = &a[(i, c)] / &piv;
            for j in c..n {
                let x = &a[(i, j)] - &f * &a[(c, j)];
                a[(i, j)] = x;
            }
        }
    }
    d
}

/// Leading principal minors, used for positive-definiteness.
pub fn leading_minors(m: &Matrix<Q>) -> Vec<Q> {
    (1..=m.rows)
        .map(|k| {
            let mut s = Matrix::<Q>::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    s[(i, j)] = m[(i, j)].clone();
                }
            }
            det(&s)
        })
        .collect()
}

/// Inner product `aᵀ G b`.
pub fn gram_dot<T: Scalar>(g: &Matrix<T>, a: &[T], b: &[T]) -> T {
    dot(a, &g.mul_vec(b))
}

/// Orthogonal (not normalized) basis of the span of `vectors` under `g`.
pub fn gram_schmidt(g: &Matrix<Q>, vectors: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = gram_dot(g, &w, u) / gram_dot(g, u, u);
            w = vsub(&w, &vscale(u, &c));
        }
        if !is_zero_vec(&w) {
            out.push(w);
        }
    }
    out
}

/// Basis of the `g`-orthogonal complement of span(`basis`) in Qⁿ.
pub fn orthogonal_complement(g: &Matrix<Q>, basis: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = g.rows;
    if basis.is_empty() {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    let rows: Vec<Vec<Q>> = basis.iter().map(|b| g.mul_vec(b)).collect();
    let m = Matrix::from_rows(rows).expect("uniform rows");
    let ns = null_space(&m);
    gram_schmidt(g, &ns)
}

/// Row-reduced basis of a span (canonical for comparing subspaces).
pub fn span_basis(n: usize, vectors: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(vectors.to_vec()).expect("uniform rows");
    let r = rref(&m);
    (0..r.pivots.len())
        .map(|i| r.matrix.row(i).to_vec())
        .filter(|v| v.len() == n)
        .collect()
}

/// Orthogonal projection onto span(`basis`) w.r.t. `g`: `B (BᵀGB)⁻¹ BᵀG`.
pub fn orthogonal_projector(g: &Matrix<Q>, basis: &[Vec<Q>]) -> Matrix<Q> {
    let n = g.rows;
    if basis.is_empty() {
        return Matrix::zeros(n, n);
    }
    let b = Matrix::from_columns(n, basis);
    let bt_g = b.transpose().mul(g);
    let gram = bt_g.mul(&b);
    let inv = inverse(&gram).expect("independent basis");
    b.mul(&inv).mul(&bt_g)
}

pub fn in_span(n: usize, basis: &[Vec<Q>], v: &[Q]) -> bool {
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    span_basis(n, &all).len() == span_basis(n, basis).len()
}

pub fn format_matrix(m: &Matrix<Q>) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(format_q).collect())
        .collect()
}

pub fn to_f64_matrix(m: &Matrix<Q>) -> Matrix<f64> {
    m.map(to_f64)
}

/// Numerical rank: singular values below `rel_tol · σ_max` count as zero.
pub fn float_rank(m: &Matrix<f64>, rel_tol: f64) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let dm = DMatrix::from_row_slice(m.rows, m.cols, &m.data);
    let sv = dm.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 || !smax.is_finite() {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qf};

    fn mq(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn null_space_pattern() {
        let m = mq(&[&[1, 2, 0, 1], &[0, 0, 1, 1]]);
        let ns = null_space(&m);
        assert_eq!(ns.len(), 2);
        assert_eq!(ns[0], vec![q(-2), q(1), q(0), q(0)]);
        assert_eq!(ns[1], vec![q(-1), q(0), q(-1), q(1)]);
        for v in &ns {
            assert!(is_zero_vec(&m.mul_vec(v)));
        }
    }

    #[test]
    fn inverse_and_det() {
        let m = mq(&[&[2, 1], &[1, 1]]);
        assert_eq!(det(&m), q(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(inverse(&mq(&[&[1, 2], &[2, 4]])), Err(Error::Singular));
        assert_eq!(det(&mq(&[&[0, 1], &[1, 0]])), q(-1));
    }

    #[test]
    fn complement_and_projector() {
        let g = mq(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 1]]);
        let b = vec![vec![q(1), q(0), q(0)]];
        let c = orthogonal_complement(&g, &b);
        assert_eq!(c.len(), 2);
        for v in &c {
            assert_eq!(gram_dot(&g, v, &b[0]), q(0));
        }
        let p = orthogonal_projector(&g, &b);
        assert_eq!(p.mul(&p), p);
        assert_eq!(p.mul_vec(&[q(1), q(0), q(0)]), vec![q(1), q(0), q(0)]);
        assert_eq!(p.mul_vec(&c[0]), vec![q(0); 3]);
        let _ = qf(1, 2);
    }

    #[test]
    fn float_rank_threshold() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-14]]).unwrap();
        assert_eq!(float_rank(&m, 1e-10), 1);
        let m = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1e-3]]).unwrap();
        assert_eq!(float_rank(&m, 1e-10), 2);
    }
}
