//! First integrals of the geodesic flow: values and gradients `(U, V)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{j_apply, LieAlgebra, Structure};
use crate::error::{Error, Result};
use crate::group::{adjoint_inverse_with, dexp_inverse_with, TangentPoint};
use crate::linalg::{is_zero_vec, vadd, vneg, vscale, vsub, Matrix};
use crate::poly::{tangent_variables, PolyVector, Polynomial};
use crate::scalar::{format_q, q, qf, to_f64, Scalar, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum IntegralKind {
    Energy,
    Linear(Vec<Q>),
    Quadratic(Matrix<Q>),
    RightInvariant(Vec<Q>),
    /// `checked` is false for matrices admitted without the derivation/skew checks.
    Derivation { d: Matrix<Q>, checked: bool },
    Butler(usize),
    QuotientInduced(Box<FirstIntegral>, Box<FirstIntegral>),
}

/// A first-integral candidate. Constructors validate the hypotheses of each family.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstIntegral {
    kind: IntegralKind,
    label: Option<String>,
}

/// `grad f(p, Y) = (U, V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientPair<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> GradientPair<T> {
    pub fn stacked(&self) -> Vec<T> {
        let mut c = self.u.clone();
        c.extend(self.v.iter().cloned());
        c
    }
}

/// Exact coordinate expansion of an integral in `(w, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialIntegral {
    pub value: Polynomial,
    pub u: PolyVector,
    pub v: PolyVector,
}

fn dim_check(alg: &LieAlgebra, len: usize) -> Result<()> {
    if len != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            got: len,
        });
    }
    Ok(())
}

fn square_check(alg: &LieAlgebra, m: &Matrix<Q>) -> Result<()> {
    if m.rows() != alg.dim() || m.cols() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            got: m.rows(),
        });
    }
    Ok(())
}

/// First basis pair `(i, j)` (1-based) where `D[e_i,e_j] ≠ [De_i,e_j] + [e_i,De_j]`.
pub fn derivation_defect(alg: &LieAlgebra, d: &Matrix<Q>) -> Option<(usize, usize)> {
    let n = alg.dim();
    let s = alg.structure_q();
    for i in 0..n {
        for j in i + 1..n {
            let (ei, ej) = (alg.basis_vector(i), alg.basis_vector(j));
            let lhs = d.mul_vec(&s.bracket(&ei, &ej));
            let rhs = vadd(
                &s.bracket(&d.mul_vec(&ei), &ej),
                &s.bracket(&ei, &d.mul_vec(&ej)),
            );
            if lhs != rhs {
                return Some((i + 1, j + 1));
            }
        }
    }
    None
}

/// `G M` is skew.
pub fn is_gram_skew(alg: &LieAlgebra, m: &Matrix<Q>) -> bool {
    let gm = alg.metric().mul(m);
    gm.add(&gm.transpose()).is_zero()
}

/// `G M` is symmetric.
pub fn is_gram_symmetric(alg: &LieAlgebra, m: &Matrix<Q>) -> bool {
    let gm = alg.metric().mul(m);
    gm == gm.transpose()
}

impl FirstIntegral {
    pub fn energy() -> Self {
        FirstIntegral {
            kind: IntegralKind::Energy,
            label: None,
        }
    }

    pub fn linear(alg: &LieAlgebra, x: Vec<Q>) -> Result<Self> {
        dim_check(alg, x.len())?;
        Ok(FirstIntegral {
            kind: IntegralKind::Linear(x),
            label: None,
        })
    }

    pub fn quadratic(alg: &LieAlgebra, s: Matrix<Q>) -> Result<Self> {
        square_check(alg, &s)?;
        if !is_gram_symmetric(alg, &s) {
            return Err(Error::NonSymmetric);
        }
        Ok(FirstIntegral {
            kind: IntegralKind::Quadratic(s),
            label: None,
        })
    }

    pub fn right_invariant(alg: &LieAlgebra, x: Vec<Q>) -> Result<Self> {
        dim_check(alg, x.len())?;
        Ok(FirstIntegral {
            kind: IntegralKind::RightInvariant(x),
            label: None,
        })
    }

    pub fn derivation(alg: &LieAlgebra, d: Matrix<Q>) -> Result<Self> {
        square_check(alg, &d)?;
        let step = alg.step()?;
        if step > 3 {
            return Err(Error::StepMismatch {
                required: "<= 3".into(),
                actual: step,
            });
        }
        if let Some(pair) = derivation_defect(alg, &d) {
            return Err(Error::NonDerivation { pair });
        }
        if !is_gram_skew(alg, &d) {
            return Err(Error::NonSkew);
        }
        Ok(FirstIntegral {
            kind: IntegralKind::Derivation { d, checked: true },
            label: None,
        })
    }

    /// Builds `f_{D*}` by the same formula without validating `D`; gradients
    /// are then taken by exact differentiation of the value.
    pub fn derivation_unchecked(alg: &LieAlgebra, d: Matrix<Q>) -> Result<Self> {
        square_check(alg, &d)?;
        let step = alg.step()?;
        if step > 3 {
            return Err(Error::StepMismatch {
                required: "<= 3".into(),
                actual: step,
            });
        }
        let checked = derivation_defect(alg, &d).is_none() && is_gram_skew(alg, &d);
        Ok(FirstIntegral {
            kind: IntegralKind::Derivation { d, checked },
            label: None,
        })
    }

    pub fn butler(alg: &LieAlgebra, i: usize) -> Result<Self> {
        let step = alg.step()?;
        if step != 2 {
            return Err(Error::StepMismatch {
                required: "2".into(),
                actual: step,
            });
        }
        Ok(FirstIntegral {
            kind: IntegralKind::Butler(i),
            label: None,
        })
    }

    pub fn quotient(numerator: FirstIntegral, denominator: FirstIntegral) -> Self {
        FirstIntegral {
            kind: IntegralKind::QuotientInduced(Box::new(numerator), Box::new(denominator)),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn kind(&self) -> &IntegralKind {
        &self.kind
    }

    pub fn is_polynomial(&self) -> bool {
        !matches!(self.kind, IntegralKind::QuotientInduced(..))
    }

    /// Invariant under left translations (value independent of `w`).
    pub fn is_invariant(&self) -> bool {
        matches!(
            self.kind,
            IntegralKind::Energy
                | IntegralKind::Linear(_)
                | IntegralKind::Quadratic(_)
                | IntegralKind::Butler(_)
        )
    }

    /// Canonical textual form, accepted back by the notation parser.
    pub fn spec(&self, alg: &LieAlgebra) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        self.canonical_spec(alg)
    }

    pub fn canonical_spec(&self, alg: &LieAlgebra) -> String {
        let vec_ref = |x: &[Q]| -> String {
            let nz: Vec<usize> = (0..x.len()).filter(|&i| x[i] != q(0)).collect();
            if nz.len() == 1 && x[nz[0]] == q(1) {
                alg.labels()[nz[0]].clone()
            } else {
                format!(
                    "[{}]",
                    x.iter().map(format_q).collect::<Vec<_>>().join(",")
                )
            }
        };
        let mat_ref = |m: &Matrix<Q>| -> String {
            format!(
                "[{}]",
                m.to_rows()
                    .iter()
                    .map(|r| r.iter().map(format_q).collect::<Vec<_>>().join(","))
                    .collect::<Vec<_>>()
                    .join(";")
            )
        };
        match &self.kind {
            IntegralKind::Energy => "E".into(),
            IntegralKind::Linear(x) => format!("lin:{}", vec_ref(x)),
            IntegralKind::RightInvariant(x) => format!("right:{}", vec_ref(x)),
            IntegralKind::Quadratic(s) => format!("quad:{}", mat_ref(s)),
            IntegralKind::Derivation { d, .. } => format!("der:{}", mat_ref(d)),
            IntegralKind::Butler(i) => format!("butler:{i}"),
            IntegralKind::QuotientInduced(a, b) => {
                format!("quot({} / {})", a.spec(alg), b.spec(alg))
            }
        }
    }

    pub fn prepare<T: Scalar>(&self, alg: &LieAlgebra) -> Result<Prepared<T>> {
        let conv_v = |x: &[Q]| x.iter().map(T::from_rational).collect::<Vec<T>>();
        let conv_m = |m: &Matrix<Q>| m.map(T::from_rational);
        Ok(match &self.kind {
            IntegralKind::Energy => Prepared::Energy,
            IntegralKind::Linear(x) => Prepared::Linear(conv_v(x)),
            IntegralKind::Quadratic(s) => Prepared::Quadratic(conv_m(s)),
            IntegralKind::RightInvariant(x) => Prepared::Right(conv_v(x)),
            IntegralKind::Derivation { d, checked } => {
                let coord = if *checked {
                    None
                } else {
                    let p = self.polynomial_value(alg)?;
                    let (u, v) = coordinate_gradient(alg, &p)?;
                    Some(Arc::new((u, v)))
                };
                Prepared::Derivation {
                    d: conv_m(d),
                    coordinate_gradient: coord,
                }
            }
            IntegralKind::Butler(i) => Prepared::Butler(*i),
            IntegralKind::QuotientInduced(a, b) => Prepared::Quotient(
                Box::new(a.prepare(alg)?),
                Box::new(b.prepare(alg)?),
            ),
        })
    }

    /// Exact value at a rational point.
    pub fn value(&self, alg: &LieAlgebra, pt: &TangentPoint<Q>) -> Result<Q> {
        let ev = Evaluator::<Q>::new(alg)?;
        self.prepare::<Q>(alg)?.value(&ev, pt)
    }

    pub fn gradient(&self, alg: &LieAlgebra, pt: &TangentPoint<Q>) -> Result<GradientPair<Q>> {
        let ev = Evaluator::<Q>::new(alg)?;
        self.prepare::<Q>(alg)?.gradient(&ev, pt)
    }

    pub fn value_f64(&self, alg: &LieAlgebra, pt: &TangentPoint<f64>) -> Result<f64> {
        let ev = Evaluator::<f64>::new(alg)?;
        self.prepare::<f64>(alg)?.value_f64(&ev, pt)
    }

    pub fn gradient_f64(
        &self,
        alg: &LieAlgebra,
        pt: &TangentPoint<f64>,
    ) -> Result<GradientPair<f64>> {
        let ev = Evaluator::<f64>::new(alg)?;
        self.prepare::<f64>(alg)?.gradient_f64(&ev, pt)
    }

    fn polynomial_value(&self, alg: &LieAlgebra) -> Result<Polynomial> {
        if !self.is_polynomial() {
            return Err(Error::NonPolynomialVariant(self.canonical_spec(alg)));
        }
        let ev = Evaluator::<Polynomial>::new(alg)?;
        let (w, y) = tangent_variables(alg.dim());
        let pt = TangentPoint { w, y };
        let plain = match &self.kind {
            IntegralKind::Derivation { d, .. } => Prepared::Derivation {
                d: d.map(Polynomial::from_rational),
                coordinate_gradient: None,
            },
            _ => self.prepare::<Polynomial>(alg)?,
        };
        Ok(plain.value(&ev, &pt)?.with_nvars(2 * alg.dim()))
    }

    /// Value and gradient as exact polynomials in `(w1..wn, y1..yn)`.
    pub fn as_polynomial(&self, alg: &LieAlgebra) -> Result<PolynomialIntegral> {
        if !self.is_polynomial() {
            return Err(Error::NonPolynomialVariant(self.canonical_spec(alg)));
        }
        let nv = 2 * alg.dim();
        let ev = Evaluator::<Polynomial>::new(alg)?;
        let (w, y) = tangent_variables(alg.dim());
        let pt = TangentPoint { w, y };
        let prep = self.prepare::<Polynomial>(alg)?;
        let value = self.polynomial_value(alg)?;
        let g = prep.gradient(&ev, &pt)?;
        let lift = |v: Vec<Polynomial>| PolyVector::new(v.into_iter().map(|p| p.with_nvars(nv)).collect());
        Ok(PolynomialIntegral {
            value,
            u: lift(g.u),
            v: lift(g.v),
        })
    }
}

/// Gradient of a coordinate polynomial: `U = G⁻¹ Φ(ad W)^{-T} ∇_w f`, `V = G⁻¹ ∇_y f`.
pub fn coordinate_gradient(alg: &LieAlgebra, f: &Polynomial) -> Result<(PolyVector, PolyVector)> {
    let n = alg.dim();
    let nv = 2 * n;
    let f = f.clone().with_nvars(nv);
    let s = alg.structure::<Polynomial>();
    let (w, _) = tangent_variables(n);
    let gw: Vec<Polynomial> = (0..n)
        .map(|i| f.partial_derivative(i))
        .collect::<Result<_>>()?;
    let gy: Vec<Polynomial> = (0..n)
        .map(|i| f.partial_derivative(n + i))
        .collect::<Result<_>>()?;
    let phi_inv = dexp_inverse_with(&s, &w);
    let u = s.raise(&phi_inv.transpose().mul_vec(&gw));
    let v = s.raise(&gy);
    let lift = |v: Vec<Polynomial>| PolyVector::new(v.into_iter().map(|p| p.with_nvars(nv)).collect());
    Ok((lift(u), lift(v)))
}

impl fmt::Display for FirstIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => f.write_str(l),
            None => write!(f, "{:?}", self.kind),
        }
    }
}

/// Algebra data converted to the scalar ring used for evaluation.
#[derive(Clone, Debug)]
pub struct Evaluator<T> {
    pub s: Structure<T>,
    pub step: usize,
    pub proj_v: Matrix<T>,
    pub proj_z: Matrix<T>,
}

impl<T: Scalar> Evaluator<T> {
    pub fn new(alg: &LieAlgebra) -> Result<Self> {
        let an = alg.analyze()?;
        Ok(Evaluator {
            s: alg.structure::<T>(),
            step: an.step,
            proj_v: an.proj_v.map(T::from_rational),
            proj_z: an.proj_complemented.map(T::from_rational),
        })
    }
}

/// An integral with its data converted to `T`.
#[derive(Clone, Debug)]
pub enum Prepared<T> {
    Energy,
    Linear(Vec<T>),
    Quadratic(Matrix<T>),
    Right(Vec<T>),
    Derivation {
        d: Matrix<T>,
        coordinate_gradient: Option<Arc<(PolyVector, PolyVector)>>,
    },
    Butler(usize),
    Quotient(Box<Prepared<T>>, Box<Prepared<T>>),
}

/// `DW − ½[W,DW] + (1/6)[W,[W,DW]]`.
fn derivation_field<T: Scalar>(s: &Structure<T>, d: &Matrix<T>, w: &[T]) -> Vec<T> {
    let dw = d.mul_vec(w);
    let b1 = s.bracket(w, &dw);
    let b2 = s.bracket(w, &b1);
    vadd(&vsub(&dw, &vscale(&b1, &qf(1, 2))), &vscale(&b2, &qf(1, 6)))
}

fn butler_powers<T: Scalar>(ev: &Evaluator<T>, y: &[T], i: usize) -> (Vec<T>, Vec<Vec<T>>) {
    let v = ev.proj_v.mul_vec(y);
    let z = ev.proj_z.mul_vec(y);
    let mut pw = vec![v];
    for _ in 0..2 * i {
        let next = j_apply(&ev.s, &ev.proj_v, &z, pw.last().unwrap());
        pw.push(next);
    }
    (z, pw)
}

impl<T: Scalar> Prepared<T> {
    pub fn value(&self, ev: &Evaluator<T>, pt: &TangentPoint<T>) -> Result<T> {
        let s = &ev.s;
        let y = &pt.y;
        Ok(match self {
            Prepared::Energy => s.inner(y, y).scale(&qf(1, 2)),
            Prepared::Linear(x) => s.inner(y, x),
            Prepared::Quadratic(m) => s.inner(y, &m.mul_vec(y)).scale(&qf(1, 2)),
            Prepared::Right(x) => {
                let a = adjoint_inverse_with(s, &pt.w).mul_vec(x);
                s.inner(&a, y)
            }
            Prepared::Derivation { d, .. } => s.inner(&derivation_field(s, d, &pt.w), y),
            Prepared::Butler(i) => {
                let (_, pw) = butler_powers(ev, y, *i);
                s.inner(&pw[0], pw.last().unwrap())
            }
            Prepared::Quotient(..) => {
                return Err(Error::NonPolynomialVariant("quotient-induced".into()))
            }
        })
    }

    pub fn gradient(&self, ev: &Evaluator<T>, pt: &TangentPoint<T>) -> Result<GradientPair<T>> {
        let s = &ev.s;
        let n = s.n;
        let y = &pt.y;
        let zero = || vec![T::zero(); n];
        Ok(match self {
            Prepared::Energy => GradientPair {
                u: zero(),
                v: y.clone(),
            },
            Prepared::Linear(x) => GradientPair {
                u: zero(),
                v: x.clone(),
            },
            Prepared::Quadratic(m) => GradientPair {
                u: zero(),
                v: m.mul_vec(y),
            },
            Prepared::Right(x) => {
                let a = adjoint_inverse_with(s, &pt.w).mul_vec(x);
                GradientPair {
                    u: s.ad_transpose_apply(&a, y),
                    v: a,
                }
            }
            Prepared::Derivation {
                d,
                coordinate_gradient: None,
            } => {
                let w = &pt.w;
                let dw = d.mul_vec(w);
                let u = vadd(
                    &vadd(&vneg(&d.mul_vec(y)), &s.ad_transpose_apply(&dw, y)),
                    &vscale(&s.ad_transpose_apply(&s.bracket(&dw, w), y), &qf(1, 2)),
                );
                GradientPair {
                    u,
                    v: derivation_field(s, d, w),
                }
            }
            Prepared::Derivation {
                coordinate_gradient: Some(g),
                ..
            } => {
                let c = pt.coords();
                GradientPair {
                    u: g.0.evaluate(&c)?,
                    v: g.1.evaluate(&c)?,
                }
            }
            Prepared::Butler(i) => {
                let i = *i;
                let (_, pw) = butler_powers(ev, y, i);
                let mut v = vscale(&pw[2 * i], &q(2));
                for j in 0..2 * i {
                    let b = s.bracket(&pw[j], &pw[2 * i - 1 - j]);
                    let b = if j % 2 == 0 { vneg(&b) } else { b };
                    v = vadd(&v, &b);
                }
                GradientPair { u: zero(), v }
            }
            Prepared::Quotient(..) => {
                return Err(Error::NonPolynomialVariant("quotient-induced".into()))
            }
        })
    }
}

impl Prepared<f64> {
    pub fn value_f64(&self, ev: &Evaluator<f64>, pt: &TangentPoint<f64>) -> Result<f64> {
        match self {
            Prepared::Quotient(a, b) => {
                let num = a.value_f64(ev, pt)?;
                let den = b.value_f64(ev, pt)?;
                Ok(quotient_function(num, den))
            }
            _ => self.value(ev, pt),
        }
    }

    /// Denominator value for quotient-induced integrals.
    pub fn denominator_f64(&self, ev: &Evaluator<f64>, pt: &TangentPoint<f64>) -> Result<Option<f64>> {
        match self {
            Prepared::Quotient(_, b) => Ok(Some(b.value_f64(ev, pt)?)),
            _ => Ok(None),
        }
    }

    pub fn gradient_f64(
        &self,
        ev: &Evaluator<f64>,
        pt: &TangentPoint<f64>,
    ) -> Result<GradientPair<f64>> {
        match self {
            Prepared::Quotient(a, b) => {
                let (num, den) = (a.value_f64(ev, pt)?, b.value_f64(ev, pt)?);
                let ga = a.gradient_f64(ev, pt)?;
                let gb = b.gradient_f64(ev, pt)?;
                let damp = (-1.0 / (den * den)).exp();
                let arg = 2.0 * PI * num / den;
                let h_num = damp * arg.cos() * 2.0 * PI / den;
                let h_den = damp * (2.0 / (den * den * den) * arg.sin() - arg.cos() * 2.0 * PI * num / (den * den));
                let comb = |x: &[f64], y: &[f64]| -> Vec<f64> {
                    x.iter().zip(y).map(|(p, q)| h_num * p + h_den * q).collect()
                };
                Ok(GradientPair {
                    u: comb(&ga.u, &gb.u),
                    v: comb(&ga.v, &gb.v),
                })
            }
            _ => self.gradient(ev, pt),
        }
    }
}

/// `e^{−1/d²} sin(2π n/d)`.
pub fn quotient_function(num: f64, den: f64) -> f64 {
    (-1.0 / (den * den)).exp() * (2.0 * PI * num / den).sin()
}

/// Converts an exact point to floats.
pub fn point_to_f64(pt: &TangentPoint<Q>) -> TangentPoint<f64> {
    TangentPoint {
        w: pt.w.iter().map(to_f64).collect(),
        y: pt.y.iter().map(to_f64).collect(),
    }
}

/// True if every `w`-exponent of the polynomial is zero.
pub fn independent_of_position(p: &Polynomial, n: usize) -> bool {
    (0..n).all(|i| p.degree_in(i) == 0)
}

pub fn zero_gradient_u<T: Scalar>(g: &GradientPair<T>) -> bool {
    is_zero_vec(&g.u)
}
