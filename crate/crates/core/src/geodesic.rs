//! Geodesic flow in body coordinates: `Ẏ = ad^τ(Y)Y`, `Ẇ = Φ(ad W)⁻¹ Y`.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{LieAlgebra, Structure};
use crate::error::{Error, Result};
use crate::group::{dexp_inverse_apply, dexp_inverse_coefficients, TangentPoint};
use crate::scalar::to_f64;
use crate::integrals::{Evaluator, FirstIntegral, Prepared};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_END: f64 = 10.0;
pub const DENOMINATOR_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stepper {
    Rk4,
    Rk4Adaptive,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub algebra: String,
    pub stepper: Stepper,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<TangentPoint<f64>>,
    pub elapsed_secs: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &TangentPoint<f64> {
        self.states.last().expect("trajectory has the initial state")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.states.first().map_or(0, TangentPoint::dim);
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("w{i}")));
        header.extend((1..=n).map(|i| format!("y{i}")));
        wtr.write_record(&header).map_err(csv_err)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut row = vec![t.to_string()];
            row.extend(s.w.iter().chain(&s.y).map(f64::to_string));
            wtr.write_record(&row).map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `(dw, dy)` of the energy Hamiltonian field at `(exp W, Y)`.
pub fn hamiltonian_field(s: &Structure<f64>, pt: &TangentPoint<f64>) -> (Vec<f64>, Vec<f64>) {
    Field::new(s).eval(pt)
}

/// The Hamiltonian vector field with the `Φ⁻¹` series coefficients cached.
struct Field<'a> {
    s: &'a Structure<f64>,
    coeffs: Vec<f64>,
}

impl<'a> Field<'a> {
    fn new(s: &'a Structure<f64>) -> Self {
        let coeffs = dexp_inverse_coefficients(s.n).iter().map(to_f64).collect();
        Field { s, coeffs }
    }

    fn eval(&self, pt: &TangentPoint<f64>) -> (Vec<f64>, Vec<f64>) {
        let dy = self.s.ad_transpose_apply(&pt.y, &pt.y);
        let dw = dexp_inverse_apply(self.s, &self.coeffs, &pt.w, &pt.y);
        (dw, dy)
    }
}

fn axpy(base: &TangentPoint<f64>, h: f64, k: &(Vec<f64>, Vec<f64>)) -> TangentPoint<f64> {
    TangentPoint {
        w: base.w.iter().zip(&k.0).map(|(a, b)| a + h * b).collect(),
        y: base.y.iter().zip(&k.1).map(|(a, b)| a + h * b).collect(),
    }
}

fn rk4_step(field: &Field, pt: &TangentPoint<f64>, h: f64, sign: f64) -> TangentPoint<f64> {
    let f = |p: &TangentPoint<f64>| {
        let (dw, dy) = field.eval(p);
        (
            dw.into_iter().map(|x| sign * x).collect::<Vec<_>>(),
            dy.into_iter().map(|x| sign * x).collect::<Vec<_>>(),
        )
    };
    let k1 = f(pt);
    let k2 = f(&axpy(pt, h / 2.0, &k1));
    let k3 = f(&axpy(pt, h / 2.0, &k2));
    let k4 = f(&axpy(pt, h, &k3));
    let comb = |a: &[f64], s: [&[f64]; 4]| -> Vec<f64> {
        (0..a.len())
            .map(|i| a[i] + h / 6.0 * (s[0][i] + 2.0 * s[1][i] + 2.0 * s[2][i] + s[3][i]))
            .collect()
    };
    TangentPoint {
        w: comb(&pt.w, [&k1.0, &k2.0, &k3.0, &k4.0]),
        y: comb(&pt.y, [&k1.1, &k2.1, &k3.1, &k4.1]),
    }
}

fn finite(p: &TangentPoint<f64>) -> bool {
    p.w.iter().chain(&p.y).all(|x| x.is_finite())
}

fn validate(alg: &LieAlgebra, initial: &TangentPoint<f64>, dt: f64, t_end: f64) -> Result<()> {
    if initial.w.len() != alg.dim() || initial.y.len() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            got: initial.y.len(),
        });
    }
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "dt and t_end must be positive, got dt={dt}, t_end={t_end}"
        )));
    }
    Ok(())
}

/// Fixed-step RK4 from `initial` to `t_end`.
pub fn integrate(alg: &LieAlgebra, initial: &TangentPoint<f64>, dt: f64, t_end: f64) -> Result<Trajectory> {
    integrate_signed(alg, initial, dt, t_end, 1.0)
}

/// Fixed-step RK4 on the negated field.
pub fn integrate_reversed(
    alg: &LieAlgebra,
    initial: &TangentPoint<f64>,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    integrate_signed(alg, initial, dt, t_end, -1.0)
}

fn integrate_signed(
    alg: &LieAlgebra,
    initial: &TangentPoint<f64>,
    dt: f64,
    t_end: f64,
    sign: f64,
) -> Result<Trajectory> {
    validate(alg, initial, dt, t_end)?;
    alg.analyze()?;
    let start = Instant::now();
    let s = &Field::new(alg.structure_f64());
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(initial.clone());
    for k in 1..=steps {
        let t = (k as f64 * dt).min(t_end);
        let h = t - times[k - 1];
        let next = rk4_step(s, &states[k - 1], h, sign);
        if !finite(&next) {
            return Err(Error::NonFinite { last_valid: k - 1 });
        }
        times.push(t);
        states.push(next);
    }
    Ok(Trajectory {
        algebra: alg.name().to_string(),
        stepper: Stepper::Rk4,
        dt,
        times,
        states,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

fn max_diff(a: &TangentPoint<f64>, b: &TangentPoint<f64>) -> f64 {
    a.w.iter()
        .chain(&a.y)
        .zip(b.w.iter().chain(&b.y))
        .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// RK4 with step doubling; `tol` bounds the per-step local error estimate.
pub fn integrate_adaptive(
    alg: &LieAlgebra,
    initial: &TangentPoint<f64>,
    dt0: f64,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    validate(alg, initial, dt0, t_end)?;
    alg.analyze()?;
    let start = Instant::now();
    let s = &Field::new(alg.structure_f64());
    let mut times = vec![0.0];
    let mut states = vec![initial.clone()];
    let mut h = dt0;
    let mut t = 0.0;
    while t < t_end {
        h = h.min(t_end - t);
        let cur = states.last().unwrap();
        let full = rk4_step(s, cur, h, 1.0);
        let half = rk4_step(s, &rk4_step(s, cur, h / 2.0, 1.0), h / 2.0, 1.0);
        let err = max_diff(&half, &full) / 15.0;
        if !finite(&half) {
            return Err(Error::NonFinite {
                last_valid: states.len() - 1,
            });
        }
        if err <= tol || h < 1e-12 {
            t += h;
            times.push(t);
            states.push(half);
        }
        let factor = if err == 0.0 { 2.0 } else { 0.9 * (tol / err).powf(0.2) };
        h *= factor.clamp(0.2, 2.0);
    }
    Ok(Trajectory {
        algebra: alg.name().to_string(),
        stepper: Stepper::Rk4Adaptive,
        dt: dt0,
        times,
        states,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralDrift {
    pub integral: String,
    pub initial: f64,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservationReport {
    pub algebra: String,
    pub stepper: Stepper,
    pub dt: f64,
    pub t_end: f64,
    pub integrals: Vec<IntegralDrift>,
    pub energy_rel_drift: f64,
    pub wall_clock_secs: f64,
}

impl ConservationReport {
    pub fn max_rel_drift(&self) -> f64 {
        self.integrals
            .iter()
            .map(|d| d.max_rel_drift)
            .fold(self.energy_rel_drift, f64::max)
    }
}

fn drift_of(
    prepared: &Prepared<f64>,
    ev: &Evaluator<f64>,
    traj: &Trajectory,
    name: String,
) -> Result<IntegralDrift> {
    for (i, st) in traj.states.iter().enumerate() {
        if let Some(d) = prepared.denominator_f64(ev, st)? {
            if d.abs() < DENOMINATOR_FLOOR {
                return Err(Error::DenominatorVanished { index: i, value: d });
            }
        }
    }
    let initial = prepared.value_f64(ev, &traj.states[0])?;
    let mut max_abs: f64 = 0.0;
    for st in &traj.states[1..] {
        max_abs = max_abs.max((prepared.value_f64(ev, st)? - initial).abs());
    }
    Ok(IntegralDrift {
        integral: name,
        initial,
        max_abs_drift: max_abs,
        max_rel_drift: max_abs / initial.abs().max(1.0),
    })
}

/// Drift of each integral (and of the energy) along `traj`.
pub fn conservation_report(
    alg: &LieAlgebra,
    traj: &Trajectory,
    integrals: &[FirstIntegral],
) -> Result<ConservationReport> {
    let start = Instant::now();
    let ev = Evaluator::<f64>::new(alg)?;
    let mut all: Vec<(String, Prepared<f64>)> = integrals
        .iter()
        .map(|f| Ok((f.spec(alg), f.prepare::<f64>(alg)?)))
        .collect::<Result<_>>()?;
    all.push(("E".into(), Prepared::Energy));
    let mut drifts = all
        .par_iter()
        .map(|(name, p)| drift_of(p, &ev, traj, name.clone()))
        .collect::<Result<Vec<_>>>()?;
    let energy = drifts.pop().expect("energy appended");
    Ok(ConservationReport {
        algebra: alg.name().to_string(),
        stepper: traj.stepper,
        dt: traj.dt,
        t_end: *traj.times.last().unwrap_or(&0.0),
        integrals: drifts,
        energy_rel_drift: energy.max_rel_drift,
        wall_clock_secs: traj.elapsed_secs + start.elapsed().as_secs_f64(),
    })
}

/// Relative state error after integrating forward and then back on the negated field.
pub fn reversibility_error(alg: &LieAlgebra, initial: &TangentPoint<f64>, dt: f64, t_end: f64) -> Result<f64> {
    let fwd = integrate(alg, initial, dt, t_end)?;
    let back = integrate_reversed(alg, fwd.final_state(), dt, t_end)?;
    Ok(max_diff(initial, back.final_state()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int_brackets;
    use crate::integrals::point_to_f64;
    use crate::linalg::dot;
    use crate::scalar::{q, to_f64, Q};
    use std::collections::BTreeMap;

    fn alg(n: usize, br: &[(usize, usize, usize, i64)]) -> LieAlgebra {
        LieAlgebra::new("t", n, &int_brackets(br), None, BTreeMap::new()).unwrap()
    }

    fn tp(w: &[f64], y: &[f64]) -> TangentPoint<f64> {
        TangentPoint::new(w.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn abelian_straight_lines() {
        let a = alg(3, &[]);
        let y = [0.3, -1.2, 2.0];
        let (dw, dy) = hamiltonian_field(a.structure_f64(), &tp(&[1.0, 2.0, 3.0], &y));
        assert_eq!(dy, vec![0.0; 3]);
        assert_eq!(dw, y.to_vec());
        let tr = integrate(&a, &tp(&[0.0; 3], &y), 1e-2, 1.0).unwrap();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            for (w, y) in s.w.iter().zip(&y) {
                assert!((w - t * y).abs() < 1e-12);
            }
        }
        assert!((tr.times.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn field_matches_exact_and_is_tangent() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let pt = TangentPoint::new(vec![q(1), q(-2), q(3)], vec![q(1), q(0), q(1)]).unwrap();
        let sq = h.structure_q();
        let dy_q: Vec<Q> = sq.ad_transpose_apply(&pt.y, &pt.y);
        let dw_q = crate::group::dexp_inverse(&h, &pt.w).unwrap().mul_vec(&pt.y);
        let (dw, dy) = hamiltonian_field(h.structure_f64(), &point_to_f64(&pt));
        for i in 0..3 {
            assert!((dy[i] - to_f64(&dy_q[i])).abs() < 1e-15);
            assert!((dw[i] - to_f64(&dw_q[i])).abs() < 1e-15);
        }
        assert_eq!(dy_q, vec![q(0), q(1), q(0)]);
        let n1 = alg(5, &[(1, 2, 3, 1), (1, 3, 5, 1), (2, 4, 5, 1)]);
        let y = [0.7, -0.2, 1.1, 0.4, -0.9];
        let (_, dy) = hamiltonian_field(n1.structure_f64(), &tp(&[0.0; 5], &y));
        assert!(dot(&dy, &y).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_conservation_and_reversibility() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let init = tp(&[0.0; 3], &[1.0, 0.0, 1.0]);
        let tr = integrate(&h, &init, 1e-3, 10.0).unwrap();
        assert_eq!(tr.len(), 10_001);
        let x = FirstIntegral::right_invariant(&h, vec![q(1), q(0), q(0)]).unwrap();
        let r = conservation_report(&h, &tr, &[x]).unwrap();
        assert!(r.energy_rel_drift < 1e-10, "{r:?}");
        assert!(r.integrals[0].max_rel_drift < 1e-8, "{r:?}");
        assert!(reversibility_error(&h, &init, 1e-3, 2.0).unwrap() < 1e-7);
    }

    #[test]
    fn central_linear_constant_on_n2() {
        let n2 = alg(4, &[(1, 2, 3, 1), (1, 3, 4, 1)]);
        let init = tp(&[0.2, -0.4, 0.1, 0.3], &[0.9, -1.3, 0.5, 1.7]);
        let tr = integrate(&n2, &init, 1e-3, 10.0).unwrap();
        let f = FirstIntegral::linear(&n2, vec![q(0), q(0), q(0), q(1)]).unwrap();
        let zero = FirstIntegral::linear(&n2, vec![q(0); 4]).unwrap();
        let r = conservation_report(&n2, &tr, &[f, zero]).unwrap();
        assert!(r.integrals[0].max_rel_drift < 1e-9);
        assert_eq!(r.integrals[1].max_abs_drift, 0.0);
    }

    #[test]
    fn adaptive_tracks_fixed() {
        let n2 = alg(4, &[(1, 2, 3, 1), (1, 3, 4, 1)]);
        let init = tp(&[0.0; 4], &[0.9, -1.3, 0.5, 1.7]);
        let a = integrate_adaptive(&n2, &init, 1e-2, 5.0, 1e-12).unwrap();
        let f = integrate(&n2, &init, 1e-3, 5.0).unwrap();
        assert!((a.times.last().unwrap() - 5.0).abs() < 1e-12);
        assert!(max_diff(a.final_state(), f.final_state()) < 1e-8);
        assert!(a.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn quotient_denominator_guard() {
        let h = alg(3, &[(1, 2, 3, 1)]);
        let num = FirstIntegral::right_invariant(&h, vec![q(1), q(0), q(0)]).unwrap();
        let den = FirstIntegral::linear(&h, vec![q(0), q(0), q(1)]).unwrap();
        let f = FirstIntegral::quotient(num, den);
        let tr = integrate(&h, &tp(&[0.0; 3], &[1.0, 0.5, 0.0]), 1e-2, 0.1).unwrap();
        assert!(matches!(
            conservation_report(&h, &tr, &[f]),
            Err(Error::DenominatorVanished { index: 0, .. })
        ));
    }

    #[test]
    fn csv_header() {
        let a = alg(2, &[]);
        let tr = integrate(&a, &tp(&[0.0; 2], &[1.0, 0.0]), 0.5, 1.0).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,w1,w2,y1,y2");
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn rejects_bad_steps() {
        let a = alg(2, &[]);
        assert!(integrate(&a, &tp(&[0.0; 2], &[1.0, 0.0]), 0.0, 1.0).is_err());
        assert!(integrate(&a, &tp(&[0.0; 2], &[1.0, 0.0]), 0.1, -1.0).is_err());
    }
}
