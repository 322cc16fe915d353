//! Group layer in exponential coordinates: BCH products, `Ad(exp(−W))`, dexp.

use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, Structure};
use crate::error::{Error, Result};
use crate::linalg::{vadd, vscale, Matrix};
use crate::scalar::{qf, Scalar, Q};

/// A point `(exp(W), Y)` of `TN ≅ N × 𝔫`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPoint<T> {
    pub w: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Scalar> TangentPoint<T> {
    pub fn new(w: Vec<T>, y: Vec<T>) -> Result<Self> {
        if w.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: w.len(),
                got: y.len(),
            });
        }
        Ok(TangentPoint { w, y })
    }

    pub fn at_identity(y: Vec<T>) -> Self {
        TangentPoint {
            w: vec![T::zero(); y.len()],
            y,
        }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// `(w1..wn, y1..yn)` as one coordinate vector.
    pub fn coords(&self) -> Vec<T> {
        let mut c = self.w.clone();
        c.extend(self.y.iter().cloned());
        c
    }

    pub fn from_coords(c: &[T]) -> Self {
        let n = c.len() / 2;
        TangentPoint {
            w: c[..n].to_vec(),
            y: c[n..].to_vec(),
        }
    }
}

/// Coordinate systems on the group besides the exponential chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Chart {
    Exponential,
    /// Matrix-style coordinates on `H_{2m+1}` with basis `X1..Xm, Y1..Ym, Z`:
    /// the central coordinate is `z_exp + ½ Σ x_i y_i`.
    HeisenbergMatrix { m: usize },
}

impl Chart {
    pub fn to_exponential<T: Scalar>(&self, c: &[T]) -> Vec<T> {
        match self {
            Chart::Exponential => c.to_vec(),
            Chart::HeisenbergMatrix { m } => {
                let mut out = c.to_vec();
                out[2 * m] = out[2 * m].clone() - heis_shift(c, *m);
                out
            }
        }
    }

    pub fn from_exponential<T: Scalar>(&self, c: &[T]) -> Vec<T> {
        match self {
            Chart::Exponential => c.to_vec(),
            Chart::HeisenbergMatrix { m } => {
                let mut out = c.to_vec();
                out[2 * m] = out[2 * m].clone() + heis_shift(c, *m);
                out
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Chart::Exponential => "exponential",
            Chart::HeisenbergMatrix { .. } => "heisenberg-matrix",
        }
    }
}

fn heis_shift<T: Scalar>(c: &[T], m: usize) -> T {
    let mut s = T::zero();
    for i in 0..m {
        s = s + c[i].clone() * c[m + i].clone();
    }
    s.scale(&qf(1, 2))
}

/// A group element with its chart; exponential coordinates are canonical.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub coords: Vec<Q>,
    pub chart: Chart,
}

impl GroupElement {
    pub fn exponential(coords: Vec<Q>) -> Self {
        GroupElement {
            coords,
            chart: Chart::Exponential,
        }
    }

    pub fn in_chart(coords: Vec<Q>, chart: Chart) -> Self {
        GroupElement { coords, chart }
    }

    pub fn to_exponential(&self) -> Vec<Q> {
        self.chart.to_exponential(&self.coords)
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|c| *c == Q::from_integer(0.into()))
    }
}

/// `exp(w) exp(u) = exp(bch(w, u))` via the closed forms for step ≤ 3.
pub fn bch<T: Scalar>(s: &Structure<T>, step: usize, w: &[T], u: &[T]) -> Result<Vec<T>> {
    if step > 3 {
        return Err(Error::StepUnsupported(step));
    }
    let mut out = vadd(w, u);
    if step >= 2 {
        let wu = s.bracket(w, u);
        out = vadd(&out, &vscale(&wu, &qf(1, 2)));
        if step == 3 {
            let a = s.bracket(w, &wu);
            let b = s.bracket(u, &s.bracket(u, w));
            out = vadd(&out, &vscale(&vadd(&a, &b), &qf(1, 12)));
        }
    }
    Ok(out)
}

pub fn bch_product(alg: &LieAlgebra, w: &[Q], u: &[Q]) -> Result<Vec<Q>> {
    check(alg, w)?;
    check(alg, u)?;
    bch(alg.structure_q(), alg.step()?, w, u)
}

fn check(alg: &LieAlgebra, v: &[Q]) -> Result<()> {
    if v.len() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            got: v.len(),
        });
    }
    Ok(())
}

/// `Σ_i c_i M^i` for a nilpotent `M`, stopping once the power vanishes.
fn nilpotent_series<T: Scalar>(m: &Matrix<T>, coeff: impl Fn(usize) -> Q) -> Matrix<T> {
    let n = m.rows();
    let mut acc = Matrix::identity(n).scale(&coeff(0));
    let mut p = Matrix::identity(n);
    for i in 1..=n {
        p = p.mul(m);
        if p.is_zero() {
            break;
        }
        acc = acc.add(&p.scale(&coeff(i)));
    }
    acc
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// `Ad(exp(−w)) = Σ (−ad w)^i / i!`.
pub fn adjoint_inverse_with<T: Scalar>(s: &Structure<T>, w: &[T]) -> Matrix<T> {
    let m = s.ad(w).neg();
    nilpotent_series(&m, |i| qf(1, factorial(i)))
}

/// `Φ(ad w) = Σ ad(−w)^i / (i+1)!`.
pub fn dexp_with<T: Scalar>(s: &Structure<T>, w: &[T]) -> Matrix<T> {
    let m = s.ad(w).neg();
    nilpotent_series(&m, |i| qf(1, factorial(i + 1)))
}

/// `Φ(ad w)⁻¹` by the terminating Neumann series of `N = I − Φ`.
pub fn dexp_inverse_with<T: Scalar>(s: &Structure<T>, w: &[T]) -> Matrix<T> {
    let phi = dexp_with(s, w);
    let n = phi.rows();
    let nmat = Matrix::identity(n).sub(&phi);
    nilpotent_series(&nmat, |_| qf(1, 1))
}

/// Coefficients `c_0..c_k` of `Φ⁻¹(x) = x / (1 − e^{−x}) = Σ c_m x^m`.
pub fn dexp_inverse_coefficients(k: usize) -> Vec<Q> {
    let phi = |i: usize| {
        let sign = if i.is_multiple_of(2) { 1 } else { -1 };
        qf(sign, factorial(i + 1))
    };
    let mut c = vec![qf(1, 1)];
    for m in 1..=k {
        let mut acc = qf(0, 1);
        for i in 1..=m {
            acc -= phi(i) * &c[m - i];
        }
        c.push(acc);
    }
    c
}

/// `Φ(ad w)⁻¹ v` by repeated brackets, given [`dexp_inverse_coefficients`] in `T`.
pub fn dexp_inverse_apply<T: Scalar>(s: &Structure<T>, coeffs: &[T], w: &[T], v: &[T]) -> Vec<T> {
    let mut acc = v.to_vec();
    let mut term = v.to_vec();
    for c in coeffs.iter().skip(1) {
        term = s.bracket(w, &term);
        if term.iter().all(T::is_zero) {
            break;
        }
        for (a, t) in acc.iter_mut().zip(&term) {
            *a = a.clone() + c.clone() * t.clone();
        }
    }
    acc
}

pub fn adjoint_inverse(alg: &LieAlgebra, w: &[Q]) -> Result<Matrix<Q>> {
    check(alg, w)?;
    Ok(adjoint_inverse_with(alg.structure_q(), w))
}

pub fn dexp(alg: &LieAlgebra, w: &[Q]) -> Result<Matrix<Q>> {
    check(alg, w)?;
    Ok(dexp_with(alg.structure_q(), w))
}

pub fn dexp_inverse(alg: &LieAlgebra, w: &[Q]) -> Result<Matrix<Q>> {
    check(alg, w)?;
    Ok(dexp_inverse_with(alg.structure_q(), w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int_brackets;
    use crate::scalar::q;
    use std::collections::BTreeMap;

    #[test]
    fn dexp_inverse_vector_form() {
        let alg = LieAlgebra::new("n", 5, &int_brackets(&[(1, 2, 3, 1), (1, 3, 4, 1), (2, 3, 5, 1)]), None, BTreeMap::new()).unwrap();
        let c = dexp_inverse_coefficients(5);
        assert_eq!(&c[..5], &[q(1), qf(1, 2), qf(1, 12), q(0), qf(-1, 720)]);
        let w = vec![q(1), qf(-2, 3), q(2), q(0), q(5)];
        let v = vec![qf(1, 2), q(3), q(-1), q(2), q(1)];
        let m = dexp_inverse_with(alg.structure_q(), &w).mul_vec(&v);
        assert_eq!(dexp_inverse_apply(alg.structure_q(), &c, &w, &v), m);
    }

    fn alg(n: usize, br: &[(usize, usize, usize, i64)]) -> LieAlgebra {
        LieAlgebra::new("t", n, &int_brackets(br), None, BTreeMap::new()).unwrap()
    }

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn bch_closed_forms() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let r = bch_product(&h, &v(&[2, 0, 0]), &v(&[0, 3, 0])).unwrap();
        assert_eq!(r, v(&[2, 3, 3]));
        let n2 = alg(4, &[(1, 2, 3, 1), (1, 3, 4, 1)]);
        let r = bch_product(&n2, &v(&[1, 0, 0, 0]), &v(&[0, 1, 0, 0])).unwrap();
        assert_eq!(r, vec![q(1), q(1), qf(1, 2), qf(1, 12)]);
        let w = v(&[1, -2, 3, 4]);
        let back = bch_product(&n2, &w, &crate::linalg::vneg(&w)).unwrap();
        assert_eq!(back, v(&[0, 0, 0, 0]));
        let four = alg(5, &[(1, 2, 3, 1), (1, 3, 4, 1), (1, 4, 5, 1)]);
        assert_eq!(
            bch_product(&four, &v(&[1, 0, 0, 0, 0]), &v(&[0, 1, 0, 0, 0])),
            Err(Error::StepUnsupported(4))
        );
    }

    #[test]
    fn adjoint_series() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let a = adjoint_inverse(&h, &v(&[0, 5, 0])).unwrap();
        assert_eq!(a.mul_vec(&v(&[1, 0, 0])), v(&[1, 0, 5]));
        assert_eq!(adjoint_inverse(&h, &v(&[0, 0, 0])).unwrap(), Matrix::identity(3));
        let n2 = alg(4, &[(1, 2, 3, 1), (1, 3, 4, 1)]);
        let a = adjoint_inverse(&n2, &v(&[1, 0, 0, 0])).unwrap();
        assert_eq!(a.mul_vec(&v(&[0, 1, 0, 0])), vec![q(0), q(1), q(-1), qf(1, 2)]);
    }

    #[test]
    fn dexp_and_inverse() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let d = dexp(&h, &v(&[4, 0, 0])).unwrap();
        assert_eq!(d.mul_vec(&v(&[0, 1, 0])), v(&[0, 1, -2]));
        let n1 = alg(5, &[(1, 2, 3, 1), (1, 3, 5, 1), (2, 4, 5, 1)]);
        let w = vec![q(1), qf(-2, 3), q(3), qf(1, 5), q(7)];
        let p = dexp(&n1, &w).unwrap().mul(&dexp_inverse(&n1, &w).unwrap());
        assert_eq!(p, Matrix::identity(5));
    }

    #[test]
    fn heisenberg_chart() {
        let c = Chart::HeisenbergMatrix { m: 1 };
        let e = v(&[2, 3, 1]);
        let m = c.from_exponential(&e);
        assert_eq!(m, v(&[2, 3, 4]));
        assert_eq!(c.to_exponential(&m), e);
    }
}
