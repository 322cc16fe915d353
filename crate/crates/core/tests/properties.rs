use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nilflow::algebra::{int_brackets, LieAlgebra};
use nilflow::catalog::resolve;
use nilflow::group::{adjoint_inverse, bch_product, dexp, dexp_inverse, TangentPoint};
use nilflow::integrals::{coordinate_gradient, is_gram_skew, Evaluator, FirstIntegral, PolynomialIntegral};
use nilflow::linalg::{vadd, vscale, Matrix};
use nilflow::poisson::{bracket_expanded, is_first_integral};
use nilflow::poly::{Monomial, PolyVector, Polynomial};
use nilflow::scalar::{qf, to_f64, Q};
use nilflow::solvers::{killing2_tensors, random_element, skew_derivations};

const ALGEBRAS: &[&str] = &[
    "h3", "h5", "n1", "n2", "n3", "n23free", "n6_10", "n6_19(1)", "n6_20", "n6_22(1)", "n6_24(-1)", "n6_25", "n6_26",
];
const STEP_TWO: &[&str] = &["h3", "h5", "r2+h3", "n6_22(1)", "n6_26", "r+h3"];
const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-6;

fn algebra(i: usize) -> LieAlgebra {
    resolve(ALGEBRAS[i % ALGEBRAS.len()]).unwrap().algebra
}

/// h3 with a non-orthonormal left-invariant metric.
fn skewed_h3() -> LieAlgebra {
    let g = Matrix::from_rows(vec![
        vec![qf(2, 1), qf(1, 1), qf(0, 1)],
        vec![qf(1, 1), qf(2, 1), qf(0, 1)],
        vec![qf(0, 1), qf(0, 1), qf(3, 1)],
    ])
    .unwrap();
    LieAlgebra::new("h3g", 3, &int_brackets(&[(1, 2, 3, 1)]), Some(g), BTreeMap::new()).unwrap()
}

fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qf(n, d))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rational(), n)
}

fn polynomial(nvars: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u8..3, nvars), rational()), 0..5).prop_map(move |terms| {
        Polynomial::from_terms(
            nvars,
            terms.into_iter().map(|(e, c)| (Monomial::from_exponents(e), c)),
        )
    })
}

fn point(n: usize) -> impl Strategy<Value = TangentPoint<Q>> {
    (vector(n), vector(n)).prop_map(|(w, y)| TangentPoint::new(w, y).unwrap())
}

fn at(p: &PolyVector, pt: &TangentPoint<Q>) -> Vec<Q> {
    p.evaluate(&pt.coords()).unwrap()
}

/// Expansion of a coordinate polynomial with its gradient.
fn expand(alg: &LieAlgebra, f: Polynomial) -> PolynomialIntegral {
    let (u, v) = coordinate_gradient(alg, &f).unwrap();
    PolynomialIntegral { value: f, u, v }
}

fn bracket(alg: &LieAlgebra, f: &PolynomialIntegral, g: &PolynomialIntegral) -> Polynomial {
    bracket_expanded(alg, &alg.structure::<Polynomial>(), f, g)
}

fn combine(a: &PolynomialIntegral, b: &PolynomialIntegral, c: &Q) -> PolynomialIntegral {
    let lin = |x: &PolyVector, y: &PolyVector| {
        PolyVector::new(
            x.components
                .iter()
                .zip(&y.components)
                .map(|(p, q)| p + &q.scale_by(c))
                .collect(),
        )
    };
    PolynomialIntegral {
        value: &a.value + &b.value.scale_by(c),
        u: lin(&a.u, &b.u),
        v: lin(&a.v, &b.v),
    }
}

fn sample_integrals(alg: &LieAlgebra, seed: u64, x: Vec<Q>) -> Vec<FirstIntegral> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![FirstIntegral::energy(), FirstIntegral::right_invariant(alg, x).unwrap()];
    let der = skew_derivations(alg);
    if der.dim > 0 {
        out.push(FirstIntegral::derivation(alg, random_element(&der, &mut rng)).unwrap());
    }
    out.push(FirstIntegral::quadratic(alg, random_element(&killing2_tensors(alg), &mut rng)).unwrap());
    if alg.step().unwrap() == 2 {
        out.push(FirstIntegral::butler(alg, 1).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_axioms(a in polynomial(3), b in polynomial(3), c in polynomial(3)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_identically_zero());
    }

    #[test]
    fn evaluation_is_a_ring_map(a in polynomial(3), b in polynomial(3), x in vector(3)) {
        let ea = a.evaluate_q(&x).unwrap();
        let eb = b.evaluate_q(&x).unwrap();
        prop_assert_eq!((&a + &b).evaluate_q(&x).unwrap(), &ea + &eb);
        prop_assert_eq!((&a * &b).evaluate_q(&x).unwrap(), &ea * &eb);
    }

    #[test]
    fn derivative_obeys_leibniz(a in polynomial(3), b in polynomial(3), i in 0usize..3) {
        let lhs = (&a * &b).partial_derivative(i).unwrap();
        let rhs = &(&a.partial_derivative(i).unwrap() * &b) + &(&a * &b.partial_derivative(i).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobi_identity(k in 0usize..13, x in vector(6), y in vector(6), z in vector(6)) {
        let alg = algebra(k);
        let n = alg.dim();
        let (x, y, z) = (&x[..n], &y[..n], &z[..n]);
        let b = |a: &[Q], c: &[Q]| alg.bracket(a, c).unwrap();
        let sum = vadd(&vadd(&b(x, &b(y, z)), &b(y, &b(z, x))), &b(z, &b(x, y)));
        prop_assert!(sum.iter().all(|v| *v == qf(0, 1)));
    }

    #[test]
    fn ad_transpose_is_adjoint(k in 0usize..14, x in vector(6), y in vector(6), z in vector(6)) {
        let alg = if k == 13 { skewed_h3() } else { algebra(k) };
        let n = alg.dim();
        let (x, y, z) = (&x[..n], &y[..n], &z[..n]);
        let lhs = alg.inner(&alg.ad_transpose(x).unwrap().mul_vec(y), z);
        let rhs = alg.inner(y, &alg.bracket(x, z).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn adjoint_is_an_automorphism(k in 0usize..13, w in vector(6), x in vector(6), y in vector(6)) {
        let alg = algebra(k);
        let n = alg.dim();
        let (w, x, y) = (&w[..n], &x[..n], &y[..n]);
        let a = adjoint_inverse(&alg, w).unwrap();
        let lhs = a.mul_vec(&alg.bracket(x, y).unwrap());
        let rhs = alg.bracket(&a.mul_vec(x), &a.mul_vec(y)).unwrap();
        prop_assert_eq!(lhs, rhs);
        let minus: Vec<Q> = w.iter().map(|c| -c.clone()).collect();
        prop_assert_eq!(a.mul(&adjoint_inverse(&alg, &minus).unwrap()), Matrix::identity(n));
        prop_assert_eq!(dexp(&alg, w).unwrap().mul(&dexp_inverse(&alg, w).unwrap()), Matrix::identity(n));
    }

    #[test]
    fn bch_is_associative(k in 0usize..13, a in vector(6), b in vector(6), c in vector(6)) {
        let alg = algebra(k);
        let n = alg.dim();
        let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
        let left = bch_product(&alg, &bch_product(&alg, a, b).unwrap(), c).unwrap();
        let right = bch_product(&alg, a, &bch_product(&alg, b, c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let minus: Vec<Q> = a.iter().map(|x| -x.clone()).collect();
        prop_assert!(bch_product(&alg, a, &minus).unwrap().iter().all(|x| *x == qf(0, 1)));
    }

    #[test]
    fn derivations_are_derivations(k in 0usize..13, seed in any::<u64>(), x in vector(6), y in vector(6)) {
        let alg = algebra(k);
        let n = alg.dim();
        let space = skew_derivations(&alg);
        prop_assume!(space.dim > 0);
        let d = random_element(&space, &mut ChaCha8Rng::seed_from_u64(seed));
        let (x, y) = (&x[..n], &y[..n]);
        let lhs = d.mul_vec(&alg.bracket(x, y).unwrap());
        let rhs = vadd(&alg.bracket(&d.mul_vec(x), y).unwrap(), &alg.bracket(x, &d.mul_vec(y)).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert!(is_gram_skew(&alg, &d));
    }

    #[test]
    fn closed_form_gradients_match_coordinates(k in 0usize..14, seed in any::<u64>(), x in vector(6), pt in point(6)) {
        let alg = if k == 13 { skewed_h3() } else { algebra(k) };
        let n = alg.dim();
        let pt = TangentPoint::new(pt.w[..n].to_vec(), pt.y[..n].to_vec()).unwrap();
        for f in sample_integrals(&alg, seed, x[..n].to_vec()) {
            let exp = f.as_polynomial(&alg).unwrap();
            let (u, v) = coordinate_gradient(&alg, &exp.value).unwrap();
            let g = f.gradient(&alg, &pt).unwrap();
            prop_assert_eq!(&g.u, &at(&u, &pt), "{}", f.spec(&alg));
            prop_assert_eq!(&g.v, &at(&v, &pt), "{}", f.spec(&alg));
            prop_assert_eq!(f.value(&alg, &pt).unwrap(), exp.value.evaluate_q(&pt.coords()).unwrap());
        }
    }

    #[test]
    fn gradient_matches_finite_differences(k in 0usize..14, seed in any::<u64>(), x in vector(6), pt in point(6), d in point(6)) {
        let alg = if k == 13 { skewed_h3() } else { algebra(k) };
        let n = alg.dim();
        let w: Vec<Q> = pt.w[..n].to_vec();
        let y: Vec<Q> = pt.y[..n].to_vec();
        let (dw, dy) = (&d.w[..n], &d.y[..n]);
        let base = TangentPoint::new(w.clone(), y.clone()).unwrap();
        for f in sample_integrals(&alg, seed, x[..n].to_vec()) {
            let g = f.gradient(&alg, &base).unwrap();
            let moved = dexp(&alg, &w).unwrap().mul_vec(dw);
            let predicted = to_f64(&(alg.inner(&g.u, &moved) + alg.inner(&g.v, dy)));
            let shifted = |h: f64| {
                let c: Vec<f64> = base
                    .coords()
                    .iter()
                    .zip(dw.iter().chain(dy))
                    .map(|(p, q)| to_f64(p) + h * to_f64(q))
                    .collect();
                f.value_f64(&alg, &TangentPoint::from_coords(&c)).unwrap()
            };
            let fd = (shifted(FD_STEP) - shifted(-FD_STEP)) / (2.0 * FD_STEP);
            prop_assert!((fd - predicted).abs() <= FD_TOL * (1.0 + predicted.abs()), "{}: {fd} vs {predicted}", f.spec(&alg));
        }
    }

    #[test]
    fn bracket_is_antisymmetric_and_bilinear(k in 0usize..13, a in polynomial(12), b in polynomial(12), c in polynomial(12), s in rational()) {
        let alg = algebra(k);
        let nv = 2 * alg.dim();
        let trim = |p: Polynomial| {
            Polynomial::from_terms(nv, p.terms().iter().map(|(m, c)| {
                (Monomial::from_exponents(m.exponents().iter().copied().take(nv).collect()), c.clone())
            }))
        };
        let (f, g, h) = (expand(&alg, trim(a)), expand(&alg, trim(b)), expand(&alg, trim(c)));
        prop_assert!((bracket(&alg, &f, &g) + bracket(&alg, &g, &f)).is_identically_zero());
        let lhs = bracket(&alg, &combine(&f, &h, &s), &g);
        let rhs = &bracket(&alg, &f, &g) + &bracket(&alg, &h, &g).scale_by(&s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn right_invariant_brackets_satisfy_jacobi(k in 0usize..13, x in vector(6), y in vector(6), z in vector(6)) {
        let alg = algebra(k);
        let n = alg.dim();
        let r = |v: &[Q]| FirstIntegral::right_invariant(&alg, v.to_vec()).unwrap().as_polynomial(&alg).unwrap();
        let (f, g, h) = (r(&x[..n]), r(&y[..n]), r(&z[..n]));
        let outer = |a: &PolynomialIntegral, b: &PolynomialIntegral, c: &PolynomialIntegral| {
            bracket(&alg, &expand(&alg, bracket(&alg, a, b)), c)
        };
        let sum = &(&outer(&f, &g, &h) + &outer(&g, &h, &f)) + &outer(&h, &f, &g);
        prop_assert!(sum.is_identically_zero());
    }

    #[test]
    fn killing_tensors_give_first_integrals(k in 0usize..14, seed in any::<u64>()) {
        let alg = if k == 13 { skewed_h3() } else { algebra(k) };
        let s = random_element(&killing2_tensors(&alg), &mut ChaCha8Rng::seed_from_u64(seed));
        let f = FirstIntegral::quadratic(&alg, s).unwrap();
        prop_assert!(is_first_integral(&f, &alg).unwrap().holds);
    }

    #[test]
    fn butler_zero_is_norm_of_v_part(k in 0usize..6, y in vector(6)) {
        let alg = resolve(STEP_TWO[k]).unwrap().algebra;
        let n = alg.dim();
        let y = y[..n].to_vec();
        let ev = Evaluator::<Q>::new(&alg).unwrap();
        let v = ev.proj_v.mul_vec(&y);
        let g0 = FirstIntegral::butler(&alg, 0).unwrap();
        let pt = TangentPoint::at_identity(y);
        prop_assert_eq!(g0.value(&alg, &pt).unwrap(), alg.inner(&v, &v));
    }

    #[test]
    fn j_map_is_skew(k in 0usize..6, c in vector(6)) {
        let alg = resolve(STEP_TWO[k]).unwrap().algebra;
        let n = alg.dim();
        let ev = Evaluator::<Q>::new(&alg).unwrap();
        let z = ev.proj_z.mul_vec(&c[..n]);
        let j = alg.j_map(&z).unwrap();
        prop_assert!(is_gram_skew(&alg, &j));
        let half = vscale(&z, &qf(1, 2));
        prop_assert_eq!(alg.j_map(&half).unwrap(), j.scale(&qf(1, 2)));
    }
}
