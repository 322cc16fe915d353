//! Linear solvers for skew-symmetric derivations and symmetric Killing
//! 2-tensors, and gradient-rank independence scans.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::group::TangentPoint;
use crate::integrals::{Evaluator, FirstIntegral, Prepared};
use crate::linalg::{self, null_space, rank, span_basis, unit, vsub, Matrix};
use crate::poly::{Monomial, Polynomial};
use crate::scalar::{q_from_f64_grid, Scalar, Q};

/// Basis of the solution set of a homogeneous linear condition on matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSpace {
    pub basis: Vec<Matrix<Q>>,
    pub dim: usize,
    pub constraints_rank: usize,
    pub unknowns: usize,
}

impl SolutionSpace {
    fn from_null_space(
        generators: &[Matrix<Q>],
        constraints: &Matrix<Q>,
    ) -> SolutionSpace {
        let ns = if constraints.rows() == 0 {
            (0..generators.len())
                .map(|i| unit(generators.len(), i))
                .collect()
        } else {
            null_space(constraints)
        };
        let basis: Vec<Matrix<Q>> = ns
            .iter()
            .map(|c| combine(generators, c))
            .collect();
        SolutionSpace {
            dim: basis.len(),
            basis,
            constraints_rank: if constraints.rows() == 0 {
                0
            } else {
                rank(constraints)
            },
            unknowns: generators.len(),
        }
    }

    /// Whether `m` lies in the span of the basis.
    pub fn contains(&self, m: &Matrix<Q>) -> bool {
        let n2 = m.rows() * m.cols();
        let flat: Vec<Vec<Q>> = self.basis.iter().map(|b| b.entries().to_vec()).collect();
        linalg::in_span(n2, &flat, m.entries())
    }

    /// Same span as another space.
    pub fn same_span(&self, other: &[Matrix<Q>]) -> bool {
        let n2 = self
            .basis
            .first()
            .or(other.first())
            .map_or(0, |b| b.rows() * b.cols());
        let a: Vec<Vec<Q>> = self.basis.iter().map(|b| b.entries().to_vec()).collect();
        let b: Vec<Vec<Q>> = other.iter().map(|b| b.entries().to_vec()).collect();
        span_basis(n2, &a) == span_basis(n2, &b)
    }

    /// Linear combination of the basis.
    pub fn element(&self, coeffs: &[Q]) -> Matrix<Q> {
        combine(&self.basis, coeffs)
    }
}

fn combine(generators: &[Matrix<Q>], c: &[Q]) -> Matrix<Q> {
    let n = generators.first().map_or(0, Matrix::rows);
    let mut m = Matrix::zeros(n, n);
    for (g, x) in generators.iter().zip(c) {
        if *x != Q::from_integer(0.into()) {
            m = m.add(&g.scale(x));
        }
    }
    m
}

fn columns_to_matrix(cols: &[Vec<Q>]) -> Matrix<Q> {
    let rows = cols.first().map_or(0, Vec::len);
    Matrix::from_columns(rows, cols)
}

/// `G⁻¹ A` for every elementary skew `A`, in `(i, j)`, `i < j` order.
fn skew_generators(alg: &LieAlgebra) -> Vec<Matrix<Q>> {
    let n = alg.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut a = Matrix::zeros(n, n);
            a[(i, j)] = Q::from_integer(1.into());
            a[(j, i)] = Q::from_integer((-1).into());
            out.push(alg.metric_inv().mul(&a));
        }
    }
    out
}

/// `G⁻¹ B` for every elementary symmetric `B`, in `(i, j)`, `i ≤ j` order.
fn symmetric_generators(alg: &LieAlgebra) -> Vec<Matrix<Q>> {
    let n = alg.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut b = Matrix::zeros(n, n);
            b[(i, j)] = Q::from_integer(1.into());
            b[(j, i)] = Q::from_integer(1.into());
            out.push(alg.metric_inv().mul(&b));
        }
    }
    out
}

fn derivation_defect_vector(alg: &LieAlgebra, d: &Matrix<Q>) -> Vec<Q> {
    let n = alg.dim();
    let s = alg.structure_q();
    let mut out = Vec::with_capacity(n * n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (ei, ej) = (unit(n, i), unit(n, j));
            let lhs = d.mul_vec(&s.bracket(&ei, &ej));
            let r1 = s.bracket(&d.mul_vec(&ei), &ej);
            let r2 = s.bracket(&ei, &d.mul_vec(&ej));
            out.extend(vsub(&vsub(&lhs, &r1), &r2));
        }
    }
    out
}

/// Gram-skew derivations.
pub fn skew_derivations(alg: &LieAlgebra) -> SolutionSpace {
    let gens = skew_generators(alg);
    if gens.is_empty() {
        return SolutionSpace {
            basis: vec![],
            dim: 0,
            constraints_rank: 0,
            unknowns: 0,
        };
    }
    let cols: Vec<Vec<Q>> = gens
        .iter()
        .map(|d| derivation_defect_vector(alg, d))
        .collect();
    SolutionSpace::from_null_space(&gens, &columns_to_matrix(&cols))
}

/// `⟨Y, [SY, Y]⟩` as a polynomial in `y1..yn` (variables `0..n`).
pub fn killing_cubic(alg: &LieAlgebra, s: &Matrix<Q>) -> Polynomial {
    let n = alg.dim();
    let st = alg.structure::<Polynomial>();
    let y: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i).unwrap()).collect();
    let sy = s.map(Polynomial::from_rational).mul_vec(&y);
    st.inner(&y, &st.bracket(&sy, &y)).with_nvars(n)
}

fn coefficient_columns(polys: &[Polynomial]) -> Matrix<Q> {
    let mut monos: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in polys {
        for m in p.terms().keys() {
            let k = monos.len();
            monos.entry(m.clone()).or_insert(k);
        }
    }
    let mut m = Matrix::zeros(monos.len(), polys.len());
    for (c, p) in polys.iter().enumerate() {
        for (mono, coeff) in p.terms() {
            m[(monos[mono], c)] = coeff.clone();
        }
    }
    m
}

/// Gram-symmetric `S` with `⟨Y,[SY,Y]⟩ ≡ 0`.
pub fn killing2_tensors(alg: &LieAlgebra) -> SolutionSpace {
    let gens = symmetric_generators(alg);
    let polys: Vec<Polynomial> = gens.iter().map(|s| killing_cubic(alg, s)).collect();
    SolutionSpace::from_null_space(&gens, &coefficient_columns(&polys))
}

/// Outcome of the structured (2-step / 3-step) Killing-tensor conditions.
#[derive(Clone, Debug, Serialize)]
pub struct StructuredReport {
    pub step: usize,
    /// Per generic basis element: conditions (i), (ii), (iii) in order.
    pub basis_conditions: Vec<Vec<bool>>,
    pub structured_dim: usize,
    pub generic_dim: usize,
    pub same_span: bool,
    pub passed: bool,
}

/// Residuals of the structured conditions; all zero iff they hold.
pub fn structured_residuals(alg: &LieAlgebra, s: &Matrix<Q>) -> Result<Vec<Vec<Q>>> {
    let an = alg.analyze()?;
    let st = alg.structure_q();
    let step = an.step;
    if step != 2 && step != 3 {
        return Err(Error::StepMismatch {
            required: "2 or 3".into(),
            actual: step,
        });
    }
    let v = &an.v_complement;
    let c = &an.complemented;
    let mut r1 = Vec::new();
    for x in v {
        for y in v {
            r1.extend(vsub(
                &st.bracket(&s.mul_vec(x), y),
                &st.bracket(x, &s.mul_vec(y)),
            ));
        }
    }
    let mut r2 = Vec::new();
    for x in v {
        let op = |u: &[Q]| -> Vec<Q> {
            let a = st.bracket(x, &s.mul_vec(u));
            if step == 3 {
                vsub(&a, &st.bracket(&s.mul_vec(x), u))
            } else {
                a
            }
        };
        for u1 in c {
            for u2 in c {
                r2.push(alg.inner(&op(u1), u2) + alg.inner(u1, &op(u2)));
            }
        }
    }
    let r3 = if step == 3 && !c.is_empty() {
        restricted_cubic(alg, s, c).terms().values().cloned().collect()
    } else {
        Vec::new()
    };
    Ok(vec![r1, r2, r3])
}

pub fn killing2_structured(alg: &LieAlgebra) -> Result<StructuredReport> {
    let step = alg.step()?;
    let generic = killing2_tensors(alg);
    let mut basis_conditions = Vec::new();
    for s in &generic.basis {
        let r = structured_residuals(alg, s)?;
        let mut flags: Vec<bool> = r.iter().map(|x| linalg::is_zero_vec(x)).collect();
        if step == 2 {
            flags.truncate(2);
        }
        basis_conditions.push(flags);
    }
    let gens = symmetric_generators(alg);
    let an = alg.analyze()?;
    let mut linear = Vec::new();
    let mut cubics = Vec::new();
    for g in &gens {
        let r = structured_residuals(alg, g)?;
        linear.push([r[0].clone(), r[1].clone()].concat());
        cubics.push(if step == 3 {
            restricted_cubic(alg, g, &an.complemented)
        } else {
            Polynomial::zero_in(0)
        });
    }
    let mut rows = columns_to_matrix(&linear).to_rows();
    rows.extend(coefficient_columns(&cubics).to_rows());
    let m = if rows.is_empty() {
        Matrix::zeros(0, gens.len())
    } else {
        Matrix::from_rows(rows)?
    };
    let structured = SolutionSpace::from_null_space(&gens, &m);
    let same = structured.same_span(&generic.basis);
    let all_hold = basis_conditions.iter().all(|f| f.iter().all(|&b| b));
    Ok(StructuredReport {
        step,
        basis_conditions,
        structured_dim: structured.dim,
        generic_dim: generic.dim,
        same_span: same,
        passed: same && all_hold,
    })
}

/// `⟨X, [SX, X]⟩` for `X` ranging over span(`c`), in the coordinates of `c`.
fn restricted_cubic(alg: &LieAlgebra, s: &Matrix<Q>, c: &[Vec<Q>]) -> Polynomial {
    let n = alg.dim();
    let k = c.len();
    let sp = alg.structure::<Polynomial>();
    let mut x = vec![Polynomial::zero_in(k); n];
    for (i, b) in c.iter().enumerate() {
        let ci = Polynomial::var(k, i).unwrap();
        for t in 0..n {
            x[t] = &x[t] + &ci.scale_by(&b[t]);
        }
    }
    let sx = s.map(Polynomial::from_rational).mul_vec(&x);
    sp.inner(&x, &sp.bracket(&sx, &x)).with_nvars(k)
}

/// Exact rank of the stacked gradients at a rational point.
pub fn gradient_rank(set: &[FirstIntegral], alg: &LieAlgebra, pt: &TangentPoint<Q>) -> Result<usize> {
    let ev = Evaluator::<Q>::new(alg)?;
    let rows: Vec<Vec<Q>> = set
        .iter()
        .map(|f| Ok(f.prepare::<Q>(alg)?.gradient(&ev, pt)?.stacked()))
        .collect::<Result<_>>()?;
    Ok(rank(&Matrix::from_rows(rows)?))
}

pub const FLOAT_RANK_TOL: f64 = 1e-10;

/// Float rank (σ-threshold) of the stacked gradients.
pub fn gradient_rank_f64(
    prepared: &[Prepared<f64>],
    ev: &Evaluator<f64>,
    pt: &TangentPoint<f64>,
) -> Result<usize> {
    let rows: Vec<Vec<f64>> = prepared
        .iter()
        .map(|p| Ok(p.gradient_f64(ev, pt)?.stacked()))
        .collect::<Result<_>>()?;
    Ok(linalg::float_rank(&Matrix::from_rows(rows)?, FLOAT_RANK_TOL))
}

type Predicate = Arc<dyn Fn(&[f64], &[f64]) -> bool + Send + Sync>;

/// A sampling region on `TN` (the dense set where independence is claimed).
#[derive(Clone)]
pub struct Region {
    pub description: String,
    test: Predicate,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Region({})", self.description)
    }
}

impl Region {
    pub fn new(
        description: impl Into<String>,
        test: impl Fn(&[f64], &[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Region {
            description: description.into(),
            test: Arc::new(test),
        }
    }

    pub fn everywhere() -> Self {
        Region::new("everywhere", |_, _| true)
    }

    pub fn contains(&self, w: &[f64], y: &[f64]) -> bool {
        (self.test)(w, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankPath {
    Float,
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanStats {
    pub path: RankPath,
    pub target_rank: usize,
    pub accepted: usize,
    pub attempts: usize,
    pub min_rank: usize,
    pub max_rank: usize,
    pub full_rank: usize,
    pub full_rank_fraction: f64,
}

/// Minimum |f_den| accepted when sampling near quotient-induced integrals.
pub const QUOTIENT_MARGIN: f64 = 0.1;

/// Samples `[−2, 2]^{2n}` with rejection, then reports gradient ranks.
pub fn independence_scan(
    set: &[FirstIntegral],
    alg: &LieAlgebra,
    region: &Region,
    n_samples: usize,
    seed: u64,
    path: RankPath,
) -> Result<ScanStats> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty integral set".into()));
    }
    let n = alg.dim();
    let ev = Evaluator::<f64>::new(alg)?;
    let prepared: Vec<Prepared<f64>> = set
        .iter()
        .map(|f| f.prepare::<f64>(alg))
        .collect::<Result<_>>()?;
    if path == RankPath::Exact && set.iter().any(|f| !f.is_polynomial()) {
        return Err(Error::NonPolynomialVariant(
            "exact rank needs polynomial integrals".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = n_samples.max(1) * 1000;
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n_samples);
    let mut attempts = 0;
    while points.len() < n_samples && attempts < max_attempts {
        attempts += 1;
        let mut c: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        if path == RankPath::Exact {
            c = c.iter().map(|&x| (x * 64.0).round() / 64.0).collect();
        }
        let pt = TangentPoint::from_coords(&c);
        if !region.contains(&pt.w, &pt.y) {
            continue;
        }
        let mut ok = true;
        for p in &prepared {
            if let Some(d) = p.denominator_f64(&ev, &pt)? {
                if d.abs() < QUOTIENT_MARGIN {
                    ok = false;
                }
            }
        }
        if ok {
            points.push(c);
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyRegion { attempts });
    }
    let ranks: Vec<usize> = match path {
        RankPath::Float => points
            .par_iter()
            .map(|c| gradient_rank_f64(&prepared, &ev, &TangentPoint::from_coords(c)))
            .collect::<Result<_>>()?,
        RankPath::Exact => {
            let evq = Evaluator::<Q>::new(alg)?;
            let prepq: Vec<Prepared<Q>> = set
                .iter()
                .map(|f| f.prepare::<Q>(alg))
                .collect::<Result<_>>()?;
            points
                .par_iter()
                .map(|c| {
                    let qc: Vec<Q> = c.iter().map(|&x| q_from_f64_grid(x, 64)).collect();
                    let pt = TangentPoint::from_coords(&qc);
                    let rows: Vec<Vec<Q>> = prepq
                        .iter()
                        .map(|p| Ok(p.gradient(&evq, &pt)?.stacked()))
                        .collect::<Result<_>>()?;
                    Ok(rank(&Matrix::from_rows(rows)?))
                })
                .collect::<Result<_>>()?
        }
    };
    let target = set.len();
    let full = ranks.iter().filter(|&&r| r == target).count();
    Ok(ScanStats {
        path,
        target_rank: target,
        accepted: ranks.len(),
        attempts,
        min_rank: *ranks.iter().min().unwrap(),
        max_rank: *ranks.iter().max().unwrap(),
        full_rank: full,
        full_rank_fraction: full as f64 / ranks.len() as f64,
    })
}

/// Random element of a solution space with small integer coefficients.
pub fn random_element(space: &SolutionSpace, rng: &mut impl Rng) -> Matrix<Q> {
    let c: Vec<Q> = (0..space.dim)
        .map(|_| Q::from_integer(rng.gen_range(-2i64..=2).into()))
        .collect();
    if space.dim == 0 {
        return Matrix::zeros(0, 0);
    }
    space.element(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int_brackets;
    use crate::scalar::q;

    fn alg(n: usize, br: &[(usize, usize, usize, i64)]) -> LieAlgebra {
        LieAlgebra::new("t", n, &int_brackets(br), None, BTreeMap::new()).unwrap()
    }

    #[test]
    fn h3_spaces() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let d = skew_derivations(&h);
        assert_eq!(d.dim, 1);
        let k = killing2_tensors(&h);
        assert_eq!(k.dim, 2);
        assert!(k.contains(&Matrix::identity(3)));
    }

    #[test]
    fn abelian_derivations_are_all_skew() {
        let a = alg(4, &[]);
        assert_eq!(skew_derivations(&a).dim, 6);
        assert_eq!(killing2_tensors(&a).dim, 10);
    }

    #[test]
    fn n23_spaces() {
        let a = alg(5, &[(1, 2, 3, 1), (1, 3, 4, 1), (2, 3, 5, 1)]);
        assert_eq!(skew_derivations(&a).dim, 1);
        assert_eq!(killing2_tensors(&a).dim, 5);
        let r = killing2_structured(&a).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn structured_matches_generic_2step() {
        let h5 = alg(5, &[(1, 3, 5, 1), (2, 4, 5, 1)]);
        let r = killing2_structured(&h5).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.structured_dim, r.generic_dim);
        let mut s1 = Matrix::zeros(5, 5);
        s1[(0, 0)] = q(1);
        s1[(2, 2)] = q(1);
        assert!(structured_residuals(&h5, &s1)
            .unwrap()
            .iter()
            .all(|r| linalg::is_zero_vec(r)));
    }

    #[test]
    fn duplicate_rank() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let set = vec![FirstIntegral::energy(), FirstIntegral::energy()];
        let pt = TangentPoint::new(vec![q(1), q(2), q(3)], vec![q(1), q(-1), q(2)]).unwrap();
        assert_eq!(gradient_rank(&set, &h, &pt).unwrap(), 1);
    }

    #[test]
    fn empty_region_reported() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let set = vec![FirstIntegral::energy()];
        let never = Region::new("never", |_, _| false);
        let e = independence_scan(&set, &h, &never, 3, 1, RankPath::Float);
        assert!(matches!(e, Err(Error::EmptyRegion { .. })));
    }
}
