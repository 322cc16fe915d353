//! Exact Poisson brackets of first integrals on `TN`.
//!
//! `{f, g} = ⟨U, V'⟩ − ⟨U', V⟩ − ⟨Y, [V, V']⟩` with `grad f = (U, V)`,
//! `grad g = (U', V')`, assembled from the coordinate polynomials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{LieAlgebra, Structure};
use crate::error::{Error, Result};
use crate::integrals::{is_gram_skew, FirstIntegral, IntegralKind, PolynomialIntegral};
use crate::linalg::{is_zero_vec, null_space, Matrix};
use crate::poly::{tangent_variables, Polynomial};
use crate::scalar::Q;
use crate::solvers::{killing2_tensors, skew_derivations, SolutionSpace};

#[derive(Clone, Debug)]
pub struct BracketResult {
    pub poly: Polynomial,
    pub is_zero: bool,
    pub matched_integral: Option<FirstIntegral>,
}

/// Bracket of two expanded integrals.
pub fn bracket_expanded(
    alg: &LieAlgebra,
    s: &Structure<Polynomial>,
    f: &PolynomialIntegral,
    g: &PolynomialIntegral,
) -> Polynomial {
    let (_, y) = tangent_variables(alg.dim());
    let a = s.inner(&f.u.components, &g.v.components);
    let b = s.inner(&g.u.components, &f.v.components);
    let c = s.inner(&y, &s.bracket(&f.v.components, &g.v.components));
    (a - b - c).with_nvars(2 * alg.dim())
}

/// `{f, g}`, matched against `candidates` (first equal candidate wins).
pub fn poisson_bracket_with(
    f: &FirstIntegral,
    g: &FirstIntegral,
    alg: &LieAlgebra,
    candidates: &[FirstIntegral],
) -> Result<BracketResult> {
    let s = alg.structure::<Polynomial>();
    let pf = f.as_polynomial(alg)?;
    let pg = g.as_polynomial(alg)?;
    let poly = bracket_expanded(alg, &s, &pf, &pg);
    let mut matched = None;
    for c in candidates {
        if c.as_polynomial(alg)?.value == poly {
            matched = Some(c.clone());
            break;
        }
    }
    Ok(BracketResult {
        is_zero: poly.is_identically_zero(),
        poly,
        matched_integral: matched,
    })
}

/// `{f, g}` matched against the natural candidate of the pair (see [`natural_candidates`]).
pub fn poisson_bracket(f: &FirstIntegral, g: &FirstIntegral, alg: &LieAlgebra) -> Result<BracketResult> {
    let cands = natural_candidates(f, g, alg)?;
    poisson_bracket_with(f, g, alg, &cands)
}

/// Candidates predicted by the isometry-algebra homomorphism:
/// `f_{[X1,X2]*}`, `f_{(DX)*}`, `f_{[D1,D2]*}`.
pub fn natural_candidates(
    f: &FirstIntegral,
    g: &FirstIntegral,
    alg: &LieAlgebra,
) -> Result<Vec<FirstIntegral>> {
    use IntegralKind::*;
    Ok(match (f.kind(), g.kind()) {
        (RightInvariant(x1), RightInvariant(x2)) => {
            vec![FirstIntegral::right_invariant(alg, alg.bracket(x1, x2)?)?]
        }
        (Derivation { d, .. }, RightInvariant(x)) => {
            vec![FirstIntegral::right_invariant(alg, d.mul_vec(x))?]
        }
        (RightInvariant(x), Derivation { d, .. }) => {
            let dx = d.mul_vec(x).iter().map(|c| -c.clone()).collect();
            vec![FirstIntegral::right_invariant(alg, dx)?]
        }
        (Derivation { d: d1, .. }, Derivation { d: d2, .. }) => {
            vec![FirstIntegral::derivation_unchecked(alg, d1.commutator(d2))?]
        }
        _ => Vec::new(),
    })
}

#[derive(Clone, Debug)]
pub struct FirstIntegralCheck {
    pub holds: bool,
    /// `{f, E}` when it is not identically zero.
    pub witness: Option<Polynomial>,
}

/// `f` is a first integral iff `{f, E} ≡ 0`.
pub fn is_first_integral(f: &FirstIntegral, alg: &LieAlgebra) -> Result<FirstIntegralCheck> {
    let r = poisson_bracket_with(f, &FirstIntegral::energy(), alg, &[])?;
    Ok(FirstIntegralCheck {
        holds: r.is_zero,
        witness: if r.is_zero { None } else { Some(r.poly) },
    })
}

/// `{f, E}` from precomputed expansions.
pub fn energy_bracket(alg: &LieAlgebra, s: &Structure<Polynomial>, f: &PolynomialIntegral) -> Result<Polynomial> {
    let e = FirstIntegral::energy().as_polynomial(alg)?;
    Ok(bracket_expanded(alg, s, f, &e))
}

/// Table of pairwise brackets; entry `(i, j)` is `{f_i, f_j}`.
#[derive(Clone, Debug)]
pub struct InvolutionTable {
    pub entries: Vec<Vec<Polynomial>>,
}

impl InvolutionTable {
    pub fn all_zero(&self) -> bool {
        self.entries
            .iter()
            .all(|r| r.iter().all(Polynomial::is_identically_zero))
    }

    /// Nonzero off-diagonal pairs `(i, j)` with `i < j`.
    pub fn failures(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.entries.len() {
            for j in i + 1..self.entries.len() {
                if !self.entries[i][j].is_identically_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn expand_all(set: &[FirstIntegral], alg: &LieAlgebra) -> Result<Vec<PolynomialIntegral>> {
    set.par_iter().map(|f| f.as_polynomial(alg)).collect()
}

pub fn involution_table(set: &[FirstIntegral], alg: &LieAlgebra) -> Result<InvolutionTable> {
    let polys = expand_all(set, alg)?;
    involution_table_expanded(alg, &polys)
}

pub fn involution_table_expanded(
    alg: &LieAlgebra,
    polys: &[PolynomialIntegral],
) -> Result<InvolutionTable> {
    let k = polys.len();
    let s = alg.structure::<Polynomial>();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let vals: Vec<Polynomial> = pairs
        .par_iter()
        .map(|&(i, j)| bracket_expanded(alg, &s, &polys[i], &polys[j]))
        .collect();
    let nv = 2 * alg.dim();
    let mut entries = vec![vec![Polynomial::zero_in(nv); k]; k];
    for ((i, j), p) in pairs.into_iter().zip(vals) {
        entries[j][i] = -p.clone();
        entries[i][j] = p;
    }
    Ok(InvolutionTable { entries })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub lhs: String,
    pub rhs: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub algebra: String,
    pub step: usize,
    pub derivation_dim: usize,
    pub checks: Vec<IdentityCheck>,
    pub identities_passed: bool,
    pub injective: bool,
    pub passed: bool,
}

fn random_q(rng: &mut impl Rng) -> Q {
    Q::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=4).into())
}

fn matrix_text(m: &Matrix<Q>) -> String {
    crate::linalg::format_matrix(m)
        .iter()
        .map(|r| r.join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn vec_text(v: &[Q]) -> String {
    v.iter()
        .map(crate::scalar::format_q)
        .collect::<Vec<_>>()
        .join(",")
}

/// Checks `{f_{D1*}, f_{D2*}} = f_{[D1,D2]*}`, `{f_{D*}, f_{X*}} = f_{(DX)*}`,
/// `{f_{X1*}, f_{X2*}} = f_{[X1,X2]*}` on basis elements and random
/// combinations, and injectivity of `(D, X) ↦ f_{D*} + f_{X*}`.
pub fn verify_iso_homomorphism(alg: &LieAlgebra, trials: usize, seed: u64) -> Result<IsoReport> {
    let step = alg.step()?;
    if step != 2 && step != 3 {
        return Err(Error::StepMismatch {
            required: "2 or 3".into(),
            actual: step,
        });
    }
    let ders = skew_derivations(alg);
    verify_iso_with(alg, &ders, trials, seed)
}

pub fn verify_iso_with(
    alg: &LieAlgebra,
    ders: &SolutionSpace,
    trials: usize,
    seed: u64,
) -> Result<IsoReport> {
    let step = alg.step()?;
    let n = alg.dim();
    let s = alg.structure::<Polynomial>();
    let xs: Vec<Vec<Q>> = (0..n).map(|i| alg.basis_vector(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d_list: Vec<(String, Matrix<Q>)> = ders
        .basis
        .iter()
        .enumerate()
        .map(|(i, d)| (format!("D#{i}"), d.clone()))
        .collect();
    let mut x_list: Vec<(String, Vec<Q>)> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (alg.labels()[i].clone(), x.clone()))
        .collect();
    let base_d = d_list.len();
    let base_x = x_list.len();
    for t in 0..trials {
        if ders.dim > 0 {
            let c: Vec<Q> = (0..ders.dim).map(|_| random_q(&mut rng)).collect();
            d_list.push((format!("D~{t}"), ders.element(&c)));
        }
        let x: Vec<Q> = (0..n).map(|_| random_q(&mut rng)).collect();
        x_list.push((format!("X~{t}=[{}]", vec_text(&x)), x));
    }

    let mut jobs: Vec<(String, String, String, FirstIntegral, FirstIntegral, FirstIntegral)> =
        Vec::new();
    let der = |d: &Matrix<Q>| FirstIntegral::derivation_unchecked(alg, d.clone());
    let right = |x: &[Q]| FirstIntegral::right_invariant(alg, x.to_vec());
    let pairs = |base: usize, total: usize| -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..base)
            .flat_map(|i| (0..base).map(move |j| (i, j)))
            .collect();
        let extra = total - base;
        for t in 0..extra {
            out.push((base + t, base + (t + 1) % extra));
        }
        out
    };
    for (i, j) in pairs(base_d, d_list.len()) {
        let (na, a) = &d_list[i];
        let (nb, b) = &d_list[j];
        jobs.push((
            "{f_D1*, f_D2*} = f_[D1,D2]*".into(),
            format!("{{f_{na}*, f_{nb}*}}"),
            format!("der:[{}]", matrix_text(&a.commutator(b))),
            der(a)?,
            der(b)?,
            der(&a.commutator(b))?,
        ));
    }
    let mut dx_pairs: Vec<(usize, usize)> = (0..base_d)
        .flat_map(|i| (0..base_x).map(move |j| (i, j)))
        .collect();
    for t in 0..d_list.len() - base_d {
        dx_pairs.push((base_d + t, base_x + t));
    }
    for (i, j) in dx_pairs {
        let (nd, d) = &d_list[i];
        let (nx, x) = &x_list[j];
        let dx = d.mul_vec(x);
        jobs.push((
            "{f_D*, f_X*} = f_(DX)*".into(),
            format!("{{f_{nd}*, f_{nx}*}}"),
            format!("right:[{}]", vec_text(&dx)),
            der(d)?,
            right(x)?,
            right(&dx)?,
        ));
    }
    for (i, j) in pairs(base_x, x_list.len()) {
        let (na, a) = &x_list[i];
        let (nb, b) = &x_list[j];
        let c = alg.bracket(a, b)?;
        jobs.push((
            "{f_X1*, f_X2*} = f_[X1,X2]*".into(),
            format!("{{f_{na}*, f_{nb}*}}"),
            format!("right:[{}]", vec_text(&c)),
            right(a)?,
            right(b)?,
            right(&c)?,
        ));
    }
    let checks: Vec<IdentityCheck> = jobs
        .par_iter()
        .map(|(id, lhs, rhs, f, g, h)| {
            let pf = f.as_polynomial(alg)?;
            let pg = g.as_polynomial(alg)?;
            let ph = h.as_polynomial(alg)?;
            let br = bracket_expanded(alg, &s, &pf, &pg);
            let diff = &br - &ph.value;
            let passed = diff.is_identically_zero();
            Ok(IdentityCheck {
                identity: id.clone(),
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                passed,
                witness: if passed { None } else { Some(diff.render()) },
            })
        })
        .collect::<Result<_>>()?;
    let injective = check_injective(alg, ders)?;
    let identities_passed = checks.iter().all(|c| c.passed);
    Ok(IsoReport {
        algebra: alg.name().to_string(),
        step,
        derivation_dim: ders.dim,
        checks,
        identities_passed,
        injective,
        passed: identities_passed && injective,
    })
}

/// `Σ c_k f_{D_k*} + Σ x_i f_{e_i*} ≡ 0` forces all coefficients to vanish.
fn check_injective(alg: &LieAlgebra, ders: &SolutionSpace) -> Result<bool> {
    let mut polys = Vec::new();
    for d in &ders.basis {
        polys.push(FirstIntegral::derivation_unchecked(alg, d.clone())?.as_polynomial(alg)?.value);
    }
    for i in 0..alg.dim() {
        polys.push(
            FirstIntegral::right_invariant(alg, alg.basis_vector(i))?
                .as_polynomial(alg)?
                .value,
        );
    }
    let mut monos = std::collections::BTreeMap::new();
    for p in &polys {
        for m in p.terms().keys() {
            let k = monos.len();
            monos.entry(m.clone()).or_insert(k);
        }
    }
    let mut m = Matrix::<Q>::zeros(monos.len().max(1), polys.len());
    for (c, p) in polys.iter().enumerate() {
        for (mono, coeff) in p.terms() {
            m[(monos[mono], c)] = coeff.clone();
        }
    }
    Ok(null_space(&m).is_empty())
}

/// Tally of one "bracket vanishes ⟺ predicate" criterion.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CriterionTally {
    pub name: String,
    pub instances: usize,
    pub predicate_true: usize,
    pub agreements: usize,
    pub disagreements: Vec<String>,
}

impl CriterionTally {
    fn record(&mut self, predicate: bool, bracket_zero: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if predicate {
            self.predicate_true += 1;
        }
        if predicate == bracket_zero {
            self.agreements += 1;
        } else {
            self.disagreements.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriteriaReport {
    pub algebra: String,
    pub criteria: Vec<CriterionTally>,
    pub passed: bool,
}

fn sparse_vector(n: usize, rng: &mut impl Rng) -> Vec<Q> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.6) {
                Q::from_integer(0.into())
            } else {
                Q::from_integer(rng.gen_range(-2i64..=2).into())
            }
        })
        .collect()
}

fn sparse_combination(space: &SolutionSpace, rng: &mut impl Rng) -> Option<Matrix<Q>> {
    if space.dim == 0 {
        return None;
    }
    let c = sparse_vector(space.dim, rng);
    Some(space.element(&c))
}

/// The four involution criteria on random instances:
/// `{f_U,f_V}=0 ⟺ [U,V]=0`, `{f_U,g_S}=0 ⟺ ad(U)S Gram-skew`,
/// `{f_D*,f_U}=0 ⟺ DU=0`, `{f_D*,g_S}=0 ⟺ DS Gram-skew`.
///
/// `U, V` are sparse small-integer vectors, `S` ranges over the Killing
/// tensors and `D` over the skew derivations, so both outcomes occur.
pub fn involution_criteria(alg: &LieAlgebra, instances: usize, seed: u64) -> Result<CriteriaReport> {
    let n = alg.dim();
    let ders = skew_derivations(alg);
    let kill = killing2_tensors(alg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = [
        CriterionTally {
            name: "{f_U,f_V}=0 <=> [U,V]=0".into(),
            ..Default::default()
        },
        CriterionTally {
            name: "{f_U,g_S}=0 <=> ad(U)S skew".into(),
            ..Default::default()
        },
        CriterionTally {
            name: "{f_D*,f_U}=0 <=> DU=0".into(),
            ..Default::default()
        },
        CriterionTally {
            name: "{f_D*,g_S}=0 <=> DS skew".into(),
            ..Default::default()
        },
    ];
    let lin = |x: &[Q]| FirstIntegral::linear(alg, x.to_vec());
    for _ in 0..instances {
        let u = sparse_vector(n, &mut rng);
        let v = sparse_vector(n, &mut rng);
        let s = sparse_combination(&kill, &mut rng).unwrap_or_else(|| Matrix::identity(n));
        let d = sparse_combination(&ders, &mut rng);

        let br = poisson_bracket_with(&lin(&u)?, &lin(&v)?, alg, &[])?;
        let pred = is_zero_vec(&alg.bracket(&u, &v)?);
        t[0].record(pred, br.is_zero, || format!("U=[{}] V=[{}]", vec_text(&u), vec_text(&v)));

        let gs = FirstIntegral::quadratic(alg, s.clone())?;
        let br = poisson_bracket_with(&lin(&u)?, &gs, alg, &[])?;
        let pred = is_gram_skew(alg, &alg.ad(&u)?.mul(&s));
        t[1].record(pred, br.is_zero, || format!("U=[{}] S=[{}]", vec_text(&u), matrix_text(&s)));

        if let Some(d) = d {
            let fd = FirstIntegral::derivation(alg, d.clone())?;
            let br = poisson_bracket_with(&fd, &lin(&u)?, alg, &[])?;
            let pred = is_zero_vec(&d.mul_vec(&u));
            t[2].record(pred, br.is_zero, || format!("D=[{}] U=[{}]", matrix_text(&d), vec_text(&u)));

            let br = poisson_bracket_with(&fd, &gs, alg, &[])?;
            let pred = is_gram_skew(alg, &d.mul(&s));
            t[3].record(pred, br.is_zero, || format!("D=[{}] S=[{}]", matrix_text(&d), matrix_text(&s)));
        }
    }
    let passed = t.iter().all(CriterionTally::passed);
    Ok(CriteriaReport {
        algebra: alg.name().to_string(),
        criteria: t.to_vec(),
        passed,
    })
}

/// `{g_i, g_k}` for all `i, k ≤ max`; returns the failing pairs.
pub fn butler_involution(alg: &LieAlgebra, max: usize) -> Result<Vec<(usize, usize)>> {
    let gs: Vec<FirstIntegral> = (0..=max)
        .map(|i| FirstIntegral::butler(alg, i))
        .collect::<Result<_>>()?;
    let table = involution_table(&gs, alg)?;
    Ok(table.failures())
}

/// `{f_{X*}, f} ≡ 0` for every basis `X` and invariant `f`; returns failures.
pub fn invariants_commute_with_right(
    alg: &LieAlgebra,
    invariants: &[FirstIntegral],
) -> Result<Vec<(usize, String)>> {
    let s = alg.structure::<Polynomial>();
    let mut out = Vec::new();
    let inv: Vec<PolynomialIntegral> = expand_all(invariants, alg)?;
    for i in 0..alg.dim() {
        let r = FirstIntegral::right_invariant(alg, alg.basis_vector(i))?.as_polynomial(alg)?;
        for (k, p) in inv.iter().enumerate() {
            if !bracket_expanded(alg, &s, &r, p).is_identically_zero() {
                out.push((i, invariants[k].spec(alg)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int_brackets;
    use crate::scalar::q;
    use std::collections::BTreeMap;

    fn alg(n: usize, br: &[(usize, usize, usize, i64)]) -> LieAlgebra {
        LieAlgebra::new("t", n, &int_brackets(br), None, BTreeMap::new()).unwrap()
    }

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn heisenberg_right_brackets() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let x = FirstIntegral::right_invariant(&h, v(&[1, 0, 0])).unwrap();
        let y = FirstIntegral::right_invariant(&h, v(&[0, 1, 0])).unwrap();
        let r = poisson_bracket(&x, &y, &h).unwrap();
        let z = FirstIntegral::right_invariant(&h, v(&[0, 0, 1])).unwrap();
        assert_eq!(r.matched_integral, Some(z.clone()));
        let fz = FirstIntegral::linear(&h, v(&[0, 0, 1])).unwrap();
        assert!(poisson_bracket(&fz, &x, &h).unwrap().is_zero);
        let e = FirstIntegral::energy();
        assert!(poisson_bracket(&e, &e, &h).unwrap().is_zero);
    }

    #[test]
    fn first_integral_test() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let bad = FirstIntegral::linear(&h, v(&[1, 0, 0])).unwrap();
        let c = is_first_integral(&bad, &h).unwrap();
        assert!(!c.holds);
        assert!(c.witness.unwrap().degree_in(5) >= 1);
        let n2 = alg(4, &[(1, 2, 3, 1), (1, 3, 4, 1)]);
        let good = FirstIntegral::linear(&n2, v(&[0, 0, 0, 1])).unwrap();
        assert!(is_first_integral(&good, &n2).unwrap().holds);
        assert!(is_first_integral(&FirstIntegral::energy(), &n2).unwrap().holds);
    }

    #[test]
    fn iso_h3_and_abelian() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let r = verify_iso_homomorphism(&h, 2, 7).unwrap();
        assert!(r.passed, "{:?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        assert_eq!(r.derivation_dim, 1);
        let a = alg(3, &[]);
        assert!(matches!(
            verify_iso_homomorphism(&a, 1, 7),
            Err(Error::StepMismatch { .. })
        ));
    }

    #[test]
    fn criteria_h3() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let r = involution_criteria(&h, 20, 3).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn butler_pairs_commute_h5() {
        let h5 = alg(5, &[(1, 3, 5, 1), (2, 4, 5, 1)]);
        assert!(butler_involution(&h5, 2).unwrap().is_empty());
    }
}
