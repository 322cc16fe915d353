//! Lattices, left translations and invariance of quotient-induced integrals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::group::{adjoint_inverse, bch, bch_product, Chart, GroupElement, TangentPoint};
use crate::integrals::{Evaluator, FirstIntegral, IntegralKind};
use crate::linalg::vsub;
use crate::poly::{tangent_variables, Polynomial};
use crate::scalar::{q, to_f64, Q};

/// Minimum `|f_den|` accepted when sampling for quotient-induced integrals.
pub const SAMPLE_DENOMINATOR_MIN: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub name: String,
    pub generators: Vec<GroupElement>,
}

impl Lattice {
    pub fn new(name: impl Into<String>, generators: Vec<GroupElement>) -> Result<Self> {
        if generators.iter().any(GroupElement::is_identity) {
            return Err(Error::InvalidArgument("lattice generator is the identity".into()));
        }
        Ok(Lattice {
            name: name.into(),
            generators,
        })
    }

    /// Lattice generated by `scales[i] · e_i`, read in `chart`.
    pub fn scaled_basis(name: impl Into<String>, scales: &[Q], chart: Chart) -> Result<Self> {
        let n = scales.len();
        let gens = (0..n)
            .map(|i| {
                let mut c = vec![q(0); n];
                c[i] = scales[i].clone();
                GroupElement::in_chart(c, chart.clone())
            })
            .collect();
        Self::new(name, gens)
    }

    pub fn exponential_generators(&self) -> Vec<Vec<Q>> {
        self.generators.iter().map(GroupElement::to_exponential).collect()
    }
}

/// `γ · (p, Y) = (γp, Y)`.
pub fn left_translate(alg: &LieAlgebra, gamma: &GroupElement, pt: &TangentPoint<Q>) -> Result<TangentPoint<Q>> {
    let w = bch_product(alg, &gamma.to_exponential(), &pt.w)?;
    Ok(TangentPoint { w, y: pt.y.clone() })
}

pub fn left_translate_f64(
    alg: &LieAlgebra,
    gamma_exp: &[f64],
    pt: &TangentPoint<f64>,
) -> Result<TangentPoint<f64>> {
    let w = bch(alg.structure_f64(), alg.step()?, gamma_exp, &pt.w)?;
    Ok(TangentPoint { w, y: pt.y.clone() })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub integral: String,
    pub lattice: String,
    pub samples: usize,
    pub attempts: usize,
    pub max_deviation: f64,
}

/// Max over samples and generators of `|f(γ·pt) − f(pt)|`.
pub fn invariance_check(
    f: &FirstIntegral,
    lat: &Lattice,
    alg: &LieAlgebra,
    n_samples: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    let n = alg.dim();
    let ev = Evaluator::<f64>::new(alg)?;
    let prepared = f.prepare::<f64>(alg)?;
    let gens: Vec<Vec<f64>> = lat
        .exponential_generators()
        .iter()
        .map(|g| g.iter().map(to_f64).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = 1000 * n_samples.max(1);
    let mut points = Vec::with_capacity(n_samples);
    let mut attempts = 0;
    while points.len() < n_samples && attempts < max_attempts {
        attempts += 1;
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let pt = TangentPoint { w, y };
        if let Some(d) = prepared.denominator_f64(&ev, &pt)? {
            if d.abs() < SAMPLE_DENOMINATOR_MIN {
                continue;
            }
        }
        points.push(pt);
    }
    if points.is_empty() {
        return Err(Error::EmptyRegion { attempts });
    }
    let max_deviation = points
        .par_iter()
        .map(|pt| {
            let base = prepared.value_f64(&ev, pt)?;
            let mut worst: f64 = 0.0;
            for g in &gens {
                let moved = left_translate_f64(alg, g, pt)?;
                if let Some(d) = prepared.denominator_f64(&ev, &moved)? {
                    if d.abs() < crate::geodesic::DENOMINATOR_FLOOR {
                        return Err(Error::DenominatorVanished { index: 0, value: d });
                    }
                }
                worst = worst.max((prepared.value_f64(&ev, &moved)? - base).abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(InvarianceReport {
        integral: f.spec(alg),
        lattice: lat.name.clone(),
        samples: points.len(),
        attempts,
        max_deviation,
    })
}

/// `f_{X*}(γ·p) − f_{X*}(p)` as an exact polynomial in `(w, y)`,
/// by substituting `w ↦ bch(γ, w)`.
pub fn translation_shift(alg: &LieAlgebra, gamma: &GroupElement, x: &[Q]) -> Result<Polynomial> {
    let f = FirstIntegral::right_invariant(alg, x.to_vec())?.as_polynomial(alg)?.value;
    let n = alg.dim();
    let (w, y) = tangent_variables(n);
    let g: Vec<Polynomial> = gamma
        .to_exponential()
        .iter()
        .map(|c| Polynomial::constant(2 * n, c.clone()))
        .collect();
    let moved_w = bch(&alg.structure::<Polynomial>(), alg.step()?, &g, &w)?;
    let mut point = moved_w;
    point.extend(y);
    let moved = f.evaluate(&point)?;
    Ok((moved - f).with_nvars(2 * n))
}

/// The ratio `c` with `f_{X*}(γ·p) − f_{X*}(p) = c · f_C(p)` when it exists.
///
/// Cross-checks the polynomial shift against `Ad(γ⁻¹)X − X`.
pub fn shift_multiple(alg: &LieAlgebra, gamma: &GroupElement, x: &[Q], central: &[Q]) -> Result<Option<Q>> {
    let shift = translation_shift(alg, gamma, x)?;
    let ad = adjoint_inverse(alg, &gamma.to_exponential())?;
    let dx = vsub(&ad.mul_vec(x), x);
    let via_ad = FirstIntegral::right_invariant(alg, dx.clone())?.as_polynomial(alg)?.value;
    if via_ad != shift {
        return Err(Error::InvalidArgument("translation shift mismatch".into()));
    }
    let fc = FirstIntegral::linear(alg, central.to_vec())?.as_polynomial(alg)?.value;
    if shift.is_identically_zero() {
        return Ok(Some(q(0)));
    }
    let (m, c) = fc.terms().iter().next().expect("nonzero central integral");
    let ratio = shift.coefficient(m) / c;
    Ok((fc.scale_by(&ratio) == shift).then_some(ratio))
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftEntry {
    pub generator: usize,
    pub integral: String,
    #[serde(with = "opt_q")]
    pub multiple: Option<Q>,
}

mod opt_q {
    use super::Q;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&x.to_string()),
            None => s.serialize_none(),
        }
    }
}

/// For each quotient-induced integral `quot(f_{X*} / f_C)` and each generator,
/// the shift multiple; invariance of `sin(2π ·)` needs integers.
pub fn quotient_shift_table(alg: &LieAlgebra, lat: &Lattice, f: &FirstIntegral) -> Result<Vec<ShiftEntry>> {
    let (x, c) = match f.kind() {
        IntegralKind::QuotientInduced(a, b) => match (a.kind(), b.kind()) {
            (IntegralKind::RightInvariant(x), IntegralKind::Linear(c)) => (x.clone(), c.clone()),
            _ => return Err(Error::InvalidArgument("expected quot(right:X / lin:C)".into())),
        },
        _ => return Err(Error::InvalidArgument("expected a quotient-induced integral".into())),
    };
    lat.generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            Ok(ShiftEntry {
                generator: i,
                integral: f.spec(alg),
                multiple: shift_multiple(alg, g, &x, &c)?,
            })
        })
        .collect()
}

/// Product in the group law `(x, y, z)(x', y', z') = (x+x', y+y', z+z'+x y')` of
/// 3×3 upper unitriangular matrices.
pub fn heisenberg_matrix_product(a: &[Q], b: &[Q]) -> Vec<Q> {
    vec![&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2] + &a[0] * &b[1]]
}
